#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "support.hpp"

using namespace ntcu;
using namespace ntcu::testing;

namespace {
EigenPattern rot(const Rational& c, long mult = 1) {
    EigenPattern p{Space::Circle, Space::Interval, {}};
    p.maps.push_back({MapKind::Winding, PLFunction::linear(Space::Interval, 0, 1), 1, c, mult});
    return p;
}

Rational brute_point(bool circle, std::vector<Rational> a, const std::vector<Rational>& b) {
    std::vector<size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rational best = 2;
    do {
        Rational w = 0;
        for (size_t i = 0; i < a.size(); ++i)
            w = qmax(w, circle ? circ_dist(a[i], b[idx[i]]) : qabs(Rational(a[i] - b[idx[i]])));
        best = qmin(best, w);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}
}  // namespace

TEST_CASE("rotation by a quarter", "[matching]") {
    auto r = d_cu(rot(0), rot(Q(1, 4)));
    CHECK(r.exact);
    CHECK(r.value == Q(1, 4));
    CHECK(d_cu(rot(0), rot(0)).value == 0);
    CHECK(d_cu(rot(0), rot(Q(3, 4))).value == Q(1, 4));
}

TEST_CASE("interval identity against a constant", "[matching]") {
    EigenPattern a{Space::Interval, Space::Interval, {}}, b = a;
    a.maps.push_back({MapKind::PL, PLFunction::linear(Space::Interval, 0, 1), 1, 0, 1});
    b.maps.push_back({MapKind::Const, {}, 1, Q(1, 2), 1});
    CHECK(d_cu(a, b).value == Q(1, 2));
}

TEST_CASE("symmetric patterns reduce", "[matching]") {
    EigenPattern a{Space::Circle, Space::Interval, {}}, b = a;
    for (auto c : {Rational(0), Q(1, 2)}) {
        a.maps.push_back({MapKind::Winding, PLFunction::linear(Space::Interval, 0, 1), 1, c, 1});
        b.maps.push_back({MapKind::Winding, PLFunction::linear(Space::Interval, 0, 1), 1, Rational(c + Q(1, 8)), 1});
    }
    auto r = d_cu(a, b);
    CHECK(r.value == Q(1, 8));
    CHECK(r.symmetry == 2);
}

TEST_CASE("unequal multiplicity and mismatched spaces", "[matching]") {
    CHECK_THROWS_AS(d_cu(rot(0), rot(0, 2)), std::invalid_argument);
    EigenPattern a{Space::Interval, Space::Interval, {}};
    a.maps.push_back({MapKind::Const, {}, 1, 0, 1});
    CHECK_THROWS_AS(d_cu(a, rot(0)), TypeError);
}

TEST_CASE("bottleneck at a point matches permutations", "[matching]") {
    Rng g(7);
    for (int it = 0; it < 300; ++it) {
        bool circle = it % 2;
        std::uniform_int_distribution<int> nd(1, 6);
        int n = nd(g);
        std::vector<Rational> a, b;
        for (int i = 0; i < n; ++i) {
            a.push_back(rand_q(g, 24, 0, 1));
            b.push_back(rand_q(g, 24, 0, 1));
        }
        if (circle)
            for (auto* v : {&a, &b})
                for (auto& x : *v) x = frac(x);
        INFO("case " << it);
        CHECK(mt::point_cost(circle, a, b) == brute_point(circle, a, b));
    }
}

TEST_CASE("d_cu agrees with the brute-force oracle", "[matching][oracle]") {
    Rng g(2024);
    int checked = 0;
    for (int it = 0; it < 80; ++it) {
        Space X = it % 2 ? Space::Circle : Space::Interval;
        Space Y = it % 5 == 4 ? Space::Circle : Space::Interval;
        std::uniform_int_distribution<long> td(1, 4);
        long tot = td(g);
        auto a = rand_pattern(g, X, Y, tot), b = rand_pattern(g, X, Y, tot);
        auto r = d_cu(a, b);
        INFO("case " << it << " value " << to_string(r.value));
        REQUIRE(r.exact);
        DcuOracle o(a, b);
        CHECK(o.confirms(r.value));
        auto nx = std::upper_bound(o.cands.begin(), o.cands.end(), r.value);
        if (nx != o.cands.end()) CHECK_FALSE(o.confirms(*nx));
        ++checked;
    }
    CHECK(checked == 80);
}

TEST_CASE("certified mode agrees with the cell sweep", "[matching]") {
    Rng g(99);
    DcuOptions low;
    low.event_cap = 0;
    int exact = 0;
    for (int it = 0; it < 120; ++it) {
        Space X = it % 2 ? Space::Circle : Space::Interval;
        std::uniform_int_distribution<long> td(2, 5);
        long tot = td(g);
        auto a = rand_pattern(g, X, Space::Interval, tot), b = rand_pattern(g, X, Space::Interval, tot);
        auto full = d_cu(a, b);
        DcuResult c;
        try {
            c = d_cu(a, b, low);
        } catch (const std::runtime_error&) {
            continue;  // fast maps on both sides: mode not applicable
        }
        INFO("case " << it);
        CHECK(c.value <= full.value);
        CHECK(c.upper >= full.value);
        if (c.exact) {
            CHECK(c.value == full.value);
            ++exact;
        }
    }
    CHECK(exact > 0);
}
