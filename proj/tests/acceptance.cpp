// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "ntcu/queries.hpp"
#include "support.hpp"

using namespace ntcu;
using namespace ntcu::testing;

namespace {

// pinned tolerances and budgets
constexpr double kNumericTol = 1e-9;
constexpr double kRobertSeconds = 10.0;
constexpr double kGJLSeconds = 30.0;
constexpr long kOracleSteps = 100000;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void need(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Outcome robert() {
    Outcome o;
    auto t0 = Clock::now();
    long pairs = 0;
    for (long k = 0; k <= 8; ++k)
        for (long l = 0; l <= 8; ++l) {
            NTMorphism f{robert_pattern(k, 2), 1, K0Image::all()}, g{robert_pattern(l, 2), 1, K0Image::all()};
            Rational dR = d_R(f, g, canonical_basis(Space::Circle), trivial_basis(Space::Interval, 4));
            Ext total = k1_map(f) == k1_map(g) ? Ext(dR) : Ext::infinity();  // d(H) and d_triv vanish
            Rational expect = Rational(std::labs(k - l)) / 2;
            o.need(total == Ext(expect), "frak_d(" + std::to_string(k) + "," + std::to_string(l) + ") = " + total.str());
            ++pairs;
        }
    Ext prev = Ext::infinity();
    for (int n = 2; n <= 10; ++n) {
        Ext worst(Rational(0));
        for (long k = 0; k <= 8; ++k)
            for (long l = k + 1; l <= 8; ++l) {
                auto a = robert_pattern(k, n), b = robert_pattern(l, n);
                DStarOptions opt;
                opt.known_dcu = d_cu(a, b);
                auto r = d_star_k1(a, b, opt);
                o.need(r.exact && r.value <= Ext(Q(1, 1L << n)),
                       "d* stage " + std::to_string(n) + " (" + std::to_string(k) + "," + std::to_string(l) + ")");
                worst = emax(worst, r.value);
            }
        o.need(worst < prev, "stage maxima decrease");
        prev = worst;
        o.detail << "n=" << n << ":" << worst.str() << " ";
    }
    double s = seconds_since(t0);
    o.need(s < kRobertSeconds, "runtime");
    o.detail << "| " << pairs << " frak_d pairs, " << s << " s";
    return o;
}

Outcome gjl(ScenarioReport& R) {
    Outcome o;
    auto t0 = Clock::now();
    auto s = build_gjl(4, {2, 3, 4});
    for (int n = 1; n <= 3; ++n) {
        auto st = gjl_step_distance(s, n);
        o.need(st.dcu.exact && st.dcu.value <= st.bound, "d_cu step " + std::to_string(n));
        o.need(st.dstar.exact && st.dstar.value == Ext(st.dcu.value), "d* step " + std::to_string(n));
        o.detail << "n=" << n << ": d_cu=" << to_string(st.dcu.value) << " 1/r_n=" << to_string(st.bound) << " d*="
                 << st.dstar.value.str() << "; ";
    }
    double secs = seconds_since(t0);
    o.need(secs < kGJLSeconds, "runtime");
    o.detail << secs << " s";
    R = gjl_report(4, {2, 3, 4});
    return o;
}

// hand formula for the psi-section slope on block i at stage m (see the unit tests)
Rational psi_slope(const GJLSystem& s, int m, int i) {
    mpz_class w = s.l(i);
    for (int n = i + 1; n < m; ++n) w *= GJLSystem::pow(s.pp(i), s.kk(n)) - 1;
    return Rational(w) / Rational(s.dim(m, i));
}

Outcome obstruction(const ScenarioReport& R) {
    Outcome o;
    auto s = build_gjl(4, {2, 3, 4});
    Rational prev = -1;
    int reach = 0;
    for (int m = 2; m <= 4; ++m) {
        auto op = gjl_obstruction(s, m, true), of = gjl_obstruction(s, m, false);
        o.need(of.value == 0, "phi obstruction at m=" + std::to_string(m));
        Rational hand = 0;
        for (int i = 1; i < m; ++i) hand = qmax(hand, Rational(psi_slope(s, m, i) / 2));
        o.need(op.value == hand, "psi obstruction against the hand formula at m=" + std::to_string(m));
        o.need(op.value > prev, "strict growth at m=" + std::to_string(m));
        prev = op.value;
        if (!reach && op.value >= 3) reach = m;
        o.detail << "m=" << m << ": psi " << to_string(op.value) << ", phi " << to_string(of.value) << "; ";
    }
    o.need(reach > 0, "psi obstruction reaches 3");
    bool recorded = false;
    for (auto& q : R.rows)
        if (q.name == "first stage with psi obstruction >= 3" && q.stage == reach) recorded = true;
    o.need(recorded, "stage recorded in the report");
    o.detail << "first stage >= 3: m=" << reach;
    return o;
}

Outcome novel() {
    Outcome o;
    auto R = novel_sweep(10);
    for (auto& c : R.checks) o.need(c.pass, c.name + " " + c.detail);
    Ext fiber, lb;
    for (auto& q : R.rows) {
        if (q.name == "frak_d") o.need(q.value == Ext(0), "frak_d = 0 at n=" + std::to_string(q.stage));
        if (q.name == "d*_Cu K1 stage") {
            o.need(q.exact && q.value <= Ext(Q(1, 1L << (q.stage - 1))), "d* at n=" + std::to_string(q.stage));
            if (q.stage == 10) o.detail << "d*(n=10)=" << q.value.str() << " ";
        }
        if (q.name == "fiber norm at I (rotation summand, lower bound)") fiber = q.value;
        if (q.name == "frak_d*_Cu lower bound") lb = q.value;
    }
    o.need(Ext(Q(1, 2)) <= fiber, "fiber norm >= 1/2");
    o.need(Ext(Q(1, 8)) <= lb, "frak_d* lower bound >= 1/8");
    o.detail << "fiber=" << fiber.str() << " (exact; stated 1/2), frak_d* >= " << lb.str();
    return o;
}

Outcome non_diagonalisable() {
    Outcome o;
    std::string dir = NTCU_SAMPLES;
    auto R = io::query_frakd(dir + "/phi_u.json", dir + "/phi_u.json", dir + "/circle_canonical.json",
                             dir + "/interval_trivial1.json");
    bool norm = false, nondiag = false, rot = false;
    for (auto& q : R.rows) {
        if (q.name == "rotation(1) of A, quotient norm") norm = q.value == Ext(Q(1, 2));
        if (q.name == "A diagonalisable") nondiag = q.value == Ext(0) && q.note.rfind("structural", 0) == 0;
    }
    for (auto& w : R.witnesses)
        if (w.rfind("rotation(1) of A = ", 0) == 0)
            rot = io::pl_from(io::json::parse(w.substr(19))) == PLFunction::linear(Space::Interval, 0, 1);
    o.need(rot, "rotation(1) = [t]");
    o.need(norm, "h_norm 1/2");
    o.need(nondiag, "structural non-diagonalisability");
    o.detail << "rotation(1)=[t] " << rot << ", norm 1/2 " << norm << ", structural " << nondiag;
    return o;
}

Outcome equivalence() {
    Outcome o;
    Rng g(606);
    const int N = 200;
    for (int it = 0; it < N; ++it) {
        auto c = rand_nt_config(g);
        o.need(k1_map(c.f) == k1_map(c.g), "equal K1 parts");
        auto a = frak_d(c.f, c.g, c.C, c.D), b = frak_d(c.f, c.g, c.Cp, c.Dp);
        o.need(a.total <= Rational(2) * b.total, "frak_d_CD <= 2 frak_d_C'D' case " + std::to_string(it));
        o.need(h_equal(relative_rotation(c.f, c.g, c.C, c.D), key_closed_form(c.f, c.g, c.C)), "lemma (i)");
        auto [lhs, rhs] = key_basis_change(c.f, c.g, c.C, c.D, c.Cp, c.Dp);
        o.need(h_equal(lhs, rhs), "lemma (ii)");
    }
    o.detail << N << " configurations";
    return o;
}

// y_m increasing with sup y, so x << y iff x <= y_m for some m; m runs past the grid scale
bool waybelow_by_sequence(const LscFunction& x, const LscFunction& y) {
    for (long m = 1; m <= 64; ++m)
        if (lsc_leq(x, lsc_approx(y, m))) return true;
    return false;
}

LscFunction rand_lsc(Rng& g, Space s) {
    std::uniform_int_distribution<int> na(0, 3), coin(0, 5), mult(1, 2);
    LscFunction x = LscFunction::zero(s);
    int n = na(g);
    for (int i = 0; i < n; ++i) {
        Rational a = rand_q(g, 8, 0, 1), b = rand_q(g, 8, 0, 1);
        if (s == Space::Interval && a > b) std::swap(a, b);
        if (s == Space::Circle && b <= a) b += 1;
        if (a == b) continue;
        OpenSet u = OpenSet::arc(s, a, b);
        if (s == Space::Interval && a == 0 && coin(g) < 3) u = OpenSet(s, {{0, b, true, false}});
        if (s == Space::Interval && b == 1 && coin(g) < 3) u = OpenSet(s, {{a, 1, false, true}});
        LscFunction f = indicator(u);
        if (coin(g) == 0) {
            auto p = f.pieces(), at = f.at();
            for (auto& v : p) v = v ? kInf : 0;
            for (auto& v : at) v = v ? kInf : 0;
            f = LscFunction(s, f.cuts(), p, at);
        } else {
            f = lsc_scale(mult(g), f);
        }
        x = lsc_add(x, f);
    }
    return x;
}

Outcome oracles() {
    Outcome o;
    Rng g(7007);
    int pat = 0, wb = 0, wb_true = 0;
    while (pat < 500) {
        Space X = pat % 2 ? Space::Circle : Space::Interval;
        Space Y = pat % 5 == 4 ? Space::Circle : Space::Interval;
        std::uniform_int_distribution<long> td(1, 4);
        long tot = td(g);
        auto a = rand_pattern(g, X, Y, tot, 4), b = rand_pattern(g, X, Y, tot, 4);
        auto r = d_cu(a, b);
        DcuOracle orc(a, b);
        bool ok = r.exact && orc.confirms(r.value);
        auto nx = std::upper_bound(orc.cands.begin(), orc.cands.end(), r.value);
        if (nx != orc.cands.end()) ok = ok && !orc.confirms(*nx);
        o.need(ok, "pattern " + std::to_string(pat));
        ++pat;
    }
    while (wb < 500) {
        Space s = wb % 2 ? Space::Circle : Space::Interval;
        auto y = rand_lsc(g, s);
        std::uniform_int_distribution<int> how(0, 2);
        LscFunction x = how(g) == 0 ? lsc_approx(y, std::uniform_int_distribution<long>(2, 20)(g)) : rand_lsc(g, s);
        bool fast = lsc_waybelow(x, y), seq = waybelow_by_sequence(x, y);
        o.need(fast == seq, "way-below pair " + std::to_string(wb) + " x=" + x.str() + " y=" + y.str());
        wb_true += fast;
        ++wb;
    }
    o.detail << pat << " patterns, " << wb << " way-below pairs (" << wb_true << " way-below)";
    return o;
}

PositiveField rand_positive(Rng& g, Space Y, long tot) {
    PositiveField a{Y, {}};
    std::uniform_int_distribution<long> md(1, tot);
    long left = tot;
    while (left > 0) {
        long m = std::min(left, md(g));
        auto f = rand_pl(g, Y, 4, 8, 0, 1);
        if (Y == Space::Circle) {
            auto pts = f.points();
            pts.back().v = pts.front().v;
            f = PLFunction(Y, pts, 0);
        }
        a.add(f, m);
        left -= m;
    }
    return a;
}

Outcome traces() {
    Outcome o;
    Rng g(8080);
    int zero_pairs = 0, pairs = 0;
    for (int it = 0; it < 300; ++it) {
        Space X = it % 2 ? Space::Circle : Space::Interval;
        std::uniform_int_distribution<long> td(1, 3);
        long tot = td(g);
        auto a = rand_pattern(g, X, Space::Interval, tot);
        EigenPattern b = a;
        std::reverse(b.maps.begin(), b.maps.end());
        auto c = it % 3 ? rand_pattern(g, X, Space::Interval, tot) : b;
        for (auto* q : {&b, &c}) {
            Rational d = d_cu(a, *q).value, af = aff_t_distance(a, *q);
            if (d == 0) {
                ++zero_pairs;
                o.need(af == 0, "d_cu = 0 forces aff_t = 0, case " + std::to_string(it));
            }
            o.need(h_distance(a, *q, K0Image::all()) <= af, "h_distance <= aff_t, case " + std::to_string(it));
            o.need(h_distance(a, *q, K0Image::lattice(Q(1, tot))) <= af, "lattice h_distance <= aff_t");
            ++pairs;
        }
    }
    int fields = 0;
    for (int it = 0; it < 200; ++it) {
        Space Y = it % 3 == 2 ? Space::Circle : Space::Interval;
        std::uniform_int_distribution<long> td(1, 4);
        long tot = td(g);
        auto x = rand_positive(g, Y, tot), y = rand_positive(g, Y, tot);
        o.need(sup_gap(x, y) <= d_cu(thomsen_nu(x), thomsen_nu(y)).value, "trace gap case " + std::to_string(it));
        ++fields;
    }
    o.detail << pairs << " pattern pairs (" << zero_pairs << " with d_cu = 0), " << fields << " positive field pairs";
    return o;
}

Outcome determinants() {
    Outcome o;
    double worst = 0;
    int count = 0;
    auto check_field = [&](const UnitaryField& u, const std::string& name) {
        PLFunction d = det_hat(u);
        for (int k = 0; k <= 4; ++k) {
            Rational y = Q(k, 4) + (k < 4 ? Q(1, 101) : Rational(0));
            auto num = numeric_det_at(u, y, kOracleSteps);
            double err = num.ok ? std::abs(num.value - to_double(d.eval(y))) : 1.0;
            worst = std::max(worst, err);
            o.need(err < kNumericTol, name + " at y=" + to_string(y));
        }
        ++count;
    };
    for (long k = 0; k <= 8; ++k)
        for (int n = 2; n <= 4; ++n) {
            UnitaryField u{Space::Interval, {}};
            for (long j = 0; j < (1L << n); ++j) u.add(PLFunction::linear(Space::Interval, Q(j, 1L << n), k));
            check_field(u, "robert u_" + std::to_string(k) + "," + std::to_string(n));
        }
    for (int n = 2; n <= 8; ++n) {
        check_field(novel_unitary(n, false), "novel u_" + std::to_string(n));
        check_field(novel_unitary(n, true), "novel v_" + std::to_string(n));
    }
    auto s = build_gjl(4, {2, 3, 4});
    for (int m = 2; m <= 4; ++m)
        for (bool psi : {false, true}) {
            auto fs = gjl_section_fields(s, m, psi);
            for (size_t i = 0; i < fs.size(); ++i)
                check_field(fs[i], std::string(psi ? "psi" : "phi") + " section m=" + std::to_string(m));
        }
    // restricted generator images at the novel arc ideal: symbolic minus numeric is
    // constant in y modulo integers
    int restricted = 0;
    for (int n = 2; n <= 3; ++n)
        for (bool v : {false, true}) {
            auto p = novel_pattern(n, v);
            auto r = restricted_generator_image(p, novel_arc(), K0Image::all());
            double base = 0;
            for (int k = 0; k <= 8; ++k) {
                Rational y = qmin(Rational(Q(k, 8) + Q(1, 97)), Rational(1));
                auto nd = restricted_numeric(p, {0, Q(1, 4)}, y, kOracleSteps);
                double diff = to_double(r.h.rep.eval(y)) - nd.value;
                if (k == 0) base = diff;
                double off = diff - base;
                double err = nd.ok ? std::abs(off - std::round(off)) : 1.0;
                worst = std::max(worst, err);
                o.need(err < kNumericTol, "restricted image n=" + std::to_string(n));
            }
            ++restricted;
        }
    o.detail << count << " fields, " << restricted << " restricted images, max error " << worst;
    return o;
}

Outcome axioms() {
    Outcome o;
    Rng g(4242);
    const int N = 1000;
    for (int it = 0; it < N; ++it) {
        Space s = it % 2 ? Space::Circle : Space::Interval;
        auto x = rand_lsc(g, s), y = rand_lsc(g, s), z = rand_lsc(g, s);
        std::string c = " case " + std::to_string(it);
        // O1: increasing finite chains have the pointwise max as supremum, and it is least
        std::vector<LscFunction> ch{x, lsc_max(x, y), lsc_max(lsc_max(x, y), z)};
        auto sup = lsc_sup(ch);
        o.need(sup == ch.back(), "O1 sup is the last term" + c);
        for (auto& t : ch) o.need(lsc_leq(t, sup), "O1 upper bound" + c);
        auto ub = lsc_add(lsc_add(x, y), z);
        o.need(lsc_leq(sup, ub), "O1 least" + c);
        // O2: y is the sup of its canonical approximations, each way-below y
        LscFunction prev = LscFunction::zero(s);
        for (long m = 1; m <= 6; ++m) {
            auto ym = lsc_approx(y, m);
            o.need(lsc_leq(prev, ym), "O2 increasing" + c);
            o.need(lsc_waybelow(ym, y), "O2 way-below" + c);
            prev = ym;
        }
        std::vector<Rational> probes;
        for (auto& t : y.cuts())
            for (auto d : {Rational(0), Q(1, 1000), Q(-1, 1000)}) probes.push_back(t + d);
        probes.push_back(Q(1, 3));
        for (auto t : probes) {
            if (s == Space::Interval && (t < 0 || t > 1)) continue;
            if (s == Space::Circle) t = frac(t);
            NVal want = y.eval(t), got = lsc_approx(y, 4096).eval(t);
            o.need(want == kInf ? got >= 4096 : got == want, "O2 sup reaches y" + c);
        }
        // O3: addition preserves <= and <<
        auto x2 = lsc_max(x, z), y2 = lsc_add(y, z);
        o.need(lsc_leq(lsc_add(x, y), lsc_add(x2, y2)), "O3 order" + c);
        auto xa = lsc_approx(x, 3), ya = lsc_approx(y, 5);
        o.need(lsc_waybelow(lsc_add(xa, ya), lsc_add(x, y)), "O3 way-below" + c);
        // O4: sup of sums of chains is the sum of the sups
        std::vector<LscFunction> cx{xa, x}, cy{ya, lsc_max(ya, z)}, cs{lsc_add(xa, ya), lsc_add(x, lsc_max(ya, z))};
        o.need(lsc_sup(cs) == lsc_add(lsc_sup(cx), lsc_sup(cy)), "O4" + c);
    }
    o.detail << N << " triples";
    return o;
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail.str() << std::endl;
        failed += !o.pass;
    };
    ScenarioReport gjl_rep;
    report(1, "Robert family frak_d = |k-l|/2, stage d* <= 1/2^n", robert);
    report(2, "GJL step distances d_cu <= 1/r_n and d* = d_cu", [&] { return gjl(gjl_rep); });
    report(3, "GJL determinant obstruction", [&] { return obstruction(gjl_rep); });
    report(4, "pair u, -u: frak_d = 0, d* <= 1/2^(n-1), fiber and frak_d* bounds", novel);
    report(5, "non-diagonalisable phi_u", non_diagonalisable);
    report(6, "metric equivalence and the key lemma", equivalence);
    report(7, "oracle equivalence for d_cu and way-below", oracles);
    report(8, "trace comparison", traces);
    report(9, "determinants against the numeric oracle", determinants);
    report(10, "Cu axioms O1-O4", axioms);
    return failed ? 1 : 0;
}
