#include <catch_amalgamated.hpp>

#include "ntcu/scenarios.hpp"
#include "support.hpp"

using namespace ntcu;
using namespace ntcu::testing;

namespace {

long ipow(long b, long e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// slope of the determinant of the psi-section on interval block i at stage m, by hand:
// l_i windings from the circle step, (p_i^{k_n} - 1) faithful copies at each later step
Rational psi_block_slope(const std::vector<long>& k, const std::vector<long>& p, int m, int i) {
    auto dim = [&](int n, int j) {
        if (j == n) j = n - 1;
        long d = 1;
        for (int a = 1; a <= j; ++a) d *= ipow(p[a - 1], k[a - 1]);
        for (int a = j + 1; a <= n - 1; ++a) d *= ipow(p[j - 1], k[a - 1]);
        return d;
    };
    long w = ipow(4, i) * dim(i + 1, i);
    for (int n = i + 1; n < m; ++n) w *= ipow(p[i - 1], k[n - 1]) - 1;
    return Rational(w) / Rational(dim(m, i));
}

}  // namespace

TEST_CASE("GJL dimensions and parameters") {
    auto s = build_gjl(4, {2, 3, 4, 5});
    CHECK(s.p == std::vector<long>{2, 3, 5, 7});
    CHECK(s.dim(2, 1) == 4);
    CHECK(s.dim(2, 2) == 4);
    CHECK(s.dim(3, 1) == 32);
    CHECK(s.dim(3, 2) == 108);
    CHECK(s.r(1) == 3);
    CHECK(s.r(2) == 26);
    CHECK(s.r(3) == 624);
    CHECK(s.r(4) == 16806);
    CHECK(s.l(1) == 16);
    CHECK(s.l(2) == 1728);
    CHECK(s.l(3) == 4320000);
    CHECK(s.t(1) == Q(1, 2));
    CHECK(s.t(2) == Q(1, 4));
    CHECK(s.t(3) == Q(3, 4));
    CHECK(s.t(5) == Q(5, 8));
    // the partial maps fill the target blocks
    for (int n = 1; n <= 3; ++n) {
        mpz_class ratio = s.dim(n + 1, n) / s.dim(n, n);
        CHECK(s.phi_n(n).total() == ratio.get_si());
        CHECK(s.psi_n(n).total() == ratio.get_si());
        CHECK(s.circle_step(n).total() == ratio.get_si());
        for (int i = 1; i < n; ++i) CHECK(s.interval_step(n, i).total() * s.dim(n, i) == s.dim(n + 1, i));
        CHECK(pattern_k1(s.circle_step(n)) == 1);
    }
    CHECK(s.blocks(3).size() == 3);
}

TEST_CASE("GJL input validation") {
    CHECK_THROWS_AS(build_gjl(3, {3, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_gjl(3, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_gjl(4, {2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(build_gjl(9, {2, 3, 4, 5, 6, 7, 8, 9}), std::invalid_argument);
    CHECK_THROWS_AS(gjl_step_distance(build_gjl(3, {2, 3}), 3), std::invalid_argument);
}

TEST_CASE("desk limit override") {
    CHECK(desk_limit(4) == 4);
    setenv("NT_DESK_LIMIT", "9", 1);
    CHECK(desk_limit(4) == 9);
    CHECK_NOTHROW(build_gjl(5, {2, 3, 4, 5}));
    unsetenv("NT_DESK_LIMIT");
    CHECK_THROWS(build_gjl(5, {2, 3, 4, 5}));
}

TEST_CASE("GJL first steps") {
    auto s = build_gjl(3, {2, 3});
    for (int n = 1; n <= 2; ++n) {
        auto st = gjl_step_distance(s, n);
        CHECK(st.dcu.exact);
        CHECK(st.dcu.value == Q(1, s.r(n)));
        CHECK(st.dstar.value == Ext(st.dcu.value));
    }
    // the first step against the brute-force matcher
    DcuOracle orc(s.phi_n(1), s.psi_n(1));
    CHECK(orc.confirms(Q(1, 3)));
}

TEST_CASE("GJL obstruction against the hand formula") {
    std::vector<long> k{2, 3, 4};
    auto s = build_gjl(4, k);
    for (int m = 2; m <= 4; ++m) {
        auto op = gjl_obstruction(s, m, true);
        auto of = gjl_obstruction(s, m, false);
        CHECK(of.value == 0);
        REQUIRE(op.per_block.size() == (size_t)m - 1);
        for (int i = 1; i < m; ++i) CHECK(op.per_block[(size_t)i - 1] == psi_block_slope(k, s.p, m, i) / 2);
    }
    CHECK(gjl_obstruction(s, 2, true).value == 2);
    CHECK(gjl_obstruction(s, 3, true).value == 8);
    CHECK(gjl_obstruction(s, 4, true).value == 32);
    // pushed fields have the block sizes
    auto f = gjl_section_fields(s, 3, true);
    CHECK(f[0].total() == 32);
    CHECK(f[1].total() == 108);
}

TEST_CASE("GJL report") {
    auto R = gjl_report(3, {2, 3});
    for (auto& c : R.checks) {
        INFO(c.name << " " << c.detail);
        CHECK(c.pass);
    }
    CHECK(R.all_pass());
}

TEST_CASE("Robert patterns") {
    auto p = robert_pattern(2, 3);
    CHECK(p.total() == 8);
    CHECK(pattern_lifts(p).size() == 8);
    for (long k = 0; k <= 3; ++k)
        for (long l = 0; l <= 3; ++l) {
            auto R = robert_report(k, l, 2);
            for (auto& c : R.checks) {
                INFO(c.name << " " << c.detail);
                CHECK(c.pass);
            }
        }
    // stage d_cu against the brute-force matcher
    for (int n = 1; n <= 2; ++n) {
        auto a = robert_pattern(2, n), b = robert_pattern(0, n);
        auto d = d_cu(a, b);
        DcuOracle orc(a, b);
        CHECK(orc.confirms(d.value));
        CHECK(d.value <= Q(1, 1L << n));
    }
    CHECK_THROWS_AS(robert_report(-1, 0, 2), std::invalid_argument);
}

TEST_CASE("novel unitaries") {
    for (int n = 2; n <= 5; ++n) {
        auto u = novel_unitary(n, false), v = novel_unitary(n, true);
        CHECK(u.total() == (1L << n));
        // v = -u: every phase moves by 1/2
        auto d = det_hat(v) - det_hat(u);
        CHECK(d.is_constant());
        CHECK(d.eval(0) == Q(1, 2));
        auto ev = novel_pattern(n, false);
        CHECK(ev.total() == (1L << n));
    }
    CHECK_THROWS_AS(novel_unitary(1, false), std::invalid_argument);
}

TEST_CASE("novel report") {
    for (int n = 2; n <= 4; ++n) {
        auto R = novel_report(n);
        for (auto& c : R.checks) {
            INFO(c.name << " " << c.detail);
            CHECK(c.pass);
        }
        REQUIRE(R.fibers.size() == 1);
        CHECK(R.fibers[0].max == Ext(Q(3, 4)));
    }
    for (int n = 2; n <= 3; ++n) {
        auto a = novel_pattern(n, false), b = novel_pattern(n, true);
        DcuOracle orc(a, b);
        CHECK(orc.confirms(d_cu(a, b).value));
    }
    auto S = novel_sweep(5);
    CHECK(S.all_pass());
    size_t halves = 0;
    for (auto& c : S.checks)
        if (c.name.find("halves") != std::string::npos) ++halves;
    CHECK(halves == 3);
}
