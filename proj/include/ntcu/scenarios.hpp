#pragma once
// Builders for the three example families (GJL systems, the Robert family, the pair
// phi_u, phi_v over the 2^n towers) and their reports.

#include <cstdlib>
#include <future>

#include "refined.hpp"

namespace ntcu {

// NT_DESK_LIMIT overrides the default stage cap
inline long desk_limit(long dflt) {
    if (const char* e = std::getenv("NT_DESK_LIMIT")) {
        long v = std::atol(e);
        if (v > 0) return v;
    }
    return dflt;
}

// ---------------------------------------------------------------- reports

// source: "claim" = compared against a stated result, "derived" = exact value checked
// against an independent computation, "info" = reported only
struct Quantity {
    std::string name;
    long stage = 0;
    Ext value;
    bool exact = true;
    std::string source = "info";
    std::string note;
};

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ScenarioReport {
    std::string scenario;
    std::vector<Quantity> rows;
    std::vector<Assertion> checks;
    std::vector<std::string> witnesses;
    std::vector<std::string> notes;
    std::vector<FiberReport> fibers;

    void add(const std::string& name, long stage, const Ext& v, const std::string& source, bool exact = true,
             const std::string& note = "") {
        rows.push_back({name, stage, v, exact, source, note});
    }
    bool check(const std::string& name, bool pass, const std::string& detail = "") {
        checks.push_back({name, pass, detail});
        return pass;
    }
    bool all_pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    void merge(const ScenarioReport& o) {
        rows.insert(rows.end(), o.rows.begin(), o.rows.end());
        checks.insert(checks.end(), o.checks.begin(), o.checks.end());
        witnesses.insert(witnesses.end(), o.witnesses.begin(), o.witnesses.end());
        notes.insert(notes.end(), o.notes.begin(), o.notes.end());
        fibers.insert(fibers.end(), o.fibers.begin(), o.fibers.end());
    }
};

// ---------------------------------------------------------------- GJL systems

inline std::vector<long> first_primes(size_t n) {
    std::vector<long> p;
    for (long c = 2; p.size() < n; ++c) {
        bool prime = true;
        for (long q : p) {
            if (q * q > c) break;
            if (c % q == 0) { prime = false; break; }
        }
        if (prime) p.push_back(c);
    }
    return p;
}

// base-2 radical inverse of n: 1/2, 1/4, 3/4, 1/8, ...
inline Rational van_der_corput(long n) {
    Rational x = 0, w = Q(1, 2);
    for (long m = n; m > 0; m /= 2, w /= 2)
        if (m & 1) x += w;
    return x;
}

struct GJLSystem {
    std::vector<long> k, p;  // k_1.., p_1.. stored from index 0
    int n_max = 4;

    long kk(int j) const { return k.at((size_t)j - 1); }
    long pp(int j) const { return p.at((size_t)j - 1); }

    static mpz_class pow(long b, long e) {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), (unsigned long)b, (unsigned long)e);
        return r;
    }

    // [n,i] = prod_{j<=i} p_j^{k_j} prod_{i<j<n} p_i^{k_j}, [n,n] = [n,n-1], [1,1] = 1
    mpz_class dim(int n, int i) const {
        if (n == 1) return 1;
        if (i == n) i = n - 1;
        mpz_class d = 1;
        for (int j = 1; j <= i; ++j) d *= pow(pp(j), kk(j));
        for (int j = i + 1; j <= n - 1; ++j) d *= pow(pp(i), kk(j));
        return d;
    }
    long r(int n) const { return pow(pp(n), kk(n)).get_si() - 1; }
    // l_n = 4^n [n+1,n], the reading adopted for the undefined index
    mpz_class l(int n) const { return pow(4, n) * dim(n + 1, n); }
    Rational t(int n) const { return van_der_corput(n); }
    Rational z(int n) const { return van_der_corput(n); }  // angle of z_n

    std::vector<Block> blocks(int n) const {
        std::vector<Block> b;
        for (int i = 1; i <= n - 1; ++i) b.push_back(make_block(Space::Interval, dim(n, i), K0Image::all()));
        b.push_back(make_block(Space::Circle, dim(n, n), K0Image::lattice(1)));
        return b;
    }

    // n-th partial maps, scalar patterns C(T) -> C([0,1]); block amplification is a
    // multiplicity and does not change any distance
    EigenPattern phi_n(int n) const {
        EigenPattern q{Space::Circle, Space::Interval, {}};
        auto id = PLFunction::linear(Space::Interval, 0, 1);
        q.maps.push_back({MapKind::Winding, id, 1, 0, 1});
        q.maps.push_back({MapKind::Winding, id, -1, 0, 1});
        long rn = r(n);
        for (long j = 1; j < rn; ++j) q.maps.push_back({MapKind::Const, {}, 1, Q(j, rn), 1});
        return q;
    }
    EigenPattern psi_n(int n) const {
        EigenPattern q{Space::Circle, Space::Interval, {}};
        mpz_class ln = l(n);
        if (!ln.fits_slong_p()) throw std::overflow_error("l_n does not fit a machine integer");
        q.maps.push_back({MapKind::Winding, PLFunction::linear(Space::Interval, 0, 1), ln.get_si(), 0, 1});
        long rn = r(n);
        for (long j = 0; j < rn; ++j) q.maps.push_back({MapKind::Const, {}, 1, Q(j, rn), 1});
        return q;
    }
    // interval block i of A_n into block i of A_{n+1}: f -> diag(f,...,f, f(t_n))
    EigenPattern interval_step(int n, int i) const {
        EigenPattern q{Space::Interval, Space::Interval, {}};
        long copies = pow(pp(i), kk(n)).get_si() - 1;
        q.maps.push_back({MapKind::PL, PLFunction::linear(Space::Interval, 0, 1), 1, 0, copies});
        q.maps.push_back({MapKind::Const, {}, 1, t(n), 1});
        return q;
    }
    // circle block of A_n into the circle block of A_{n+1}: f -> diag(f, f(z_n),...)
    EigenPattern circle_step(int n) const {
        EigenPattern q{Space::Circle, Space::Circle, {}};
        long pad = mpz_class(dim(n + 1, n + 1) / dim(n, n)).get_si() - 1;
        q.maps.push_back({MapKind::Winding, PLFunction::linear(Space::Circle, 0, 1), 1, 0, 1});
        q.maps.push_back({MapKind::Const, {}, 1, z(n), pad});
        return q;
    }
};

inline GJLSystem build_gjl(int n_max, const std::vector<long>& k) {
    if (k.empty() || k[0] < 2) throw std::invalid_argument("k-sequence must start at k_1 >= 2");
    for (size_t i = 1; i < k.size(); ++i)
        if (k[i] <= k[i - 1]) throw std::invalid_argument("k-sequence must be strictly increasing");
    if (n_max < 2) throw std::invalid_argument("need at least two stages");
    if (n_max > desk_limit(4)) throw std::invalid_argument("GJL stage count above the desk limit");
    if ((int)k.size() < n_max - 1) throw std::invalid_argument("k-sequence shorter than the stage count");
    GJLSystem s;
    s.k = k;
    s.p = first_primes(k.size());
    s.n_max = n_max;
    return s;
}

struct GJLStep {
    DcuResult dcu;
    DStarResult dstar;
    Rational bound;
};

inline GJLStep gjl_step_distance(const GJLSystem& s, int n) {
    if (n < 1 || n >= s.n_max) throw std::invalid_argument("step index out of range");
    GJLStep st;
    auto a = s.phi_n(n), b = s.psi_n(n);
    st.dcu = d_cu(a, b);
    DStarOptions o;
    o.known_dcu = st.dcu;
    st.dstar = d_star_k1(a, b, o);
    st.bound = Q(1, s.r(n));
    return st;
}

struct GJLObstruction {
    Rational value = 0;    // max over interval blocks, constants quotient
    Rational lattice = 0;  // same with the lattice (1/[m,i]) Z
    std::vector<Rational> per_block;
};

// the canonical unitary z of A_1 pushed to the interval blocks 1..m-1 of A_m
inline std::vector<UnitaryField> gjl_section_fields(const GJLSystem& s, int m, bool psi) {
    UnitaryField u{Space::Circle, {}};
    u.add(PLFunction::linear(Space::Circle, 0, 1));
    std::vector<UnitaryField> ints;
    for (int n = 1; n < m; ++n) {
        std::vector<UnitaryField> next;
        for (int i = 1; i <= n - 1; ++i) next.push_back(push_unitary(s.interval_step(n, i), ints[(size_t)i - 1]));
        next.push_back(push_unitary(psi ? s.psi_n(n) : s.phi_n(n), u));
        u = push_unitary(s.circle_step(n), u);
        ints = std::move(next);
    }
    return ints;
}

// normalized determinant of the pushed section, per interval block
inline GJLObstruction gjl_obstruction(const GJLSystem& s, int m, bool psi) {
    if (m < 2 || m > s.n_max) throw std::invalid_argument("stage out of range");
    auto ints = gjl_section_fields(s, m, psi);
    GJLObstruction o;
    for (int i = 1; i <= m - 1; ++i) {
        auto& f = ints[(size_t)i - 1];
        mpz_class d = s.dim(m, i);
        if (f.total() != d.get_si()) throw std::logic_error("block size bookkeeping");
        PLFunction h = det_hat(f);
        Rational v = h_norm({h, K0Image::all()});
        o.per_block.push_back(v);
        o.value = qmax(o.value, v);
        o.lattice = qmax(o.lattice, h_norm({h, K0Image::lattice(Rational(1) / Rational(d))}));
    }
    return o;
}

inline ScenarioReport gjl_report(int n_max, const std::vector<long>& k) {
    ScenarioReport R;
    R.scenario = "gjl";
    auto s = build_gjl(n_max, k);
    R.notes.push_back("l_n = 4^n [n+1,n] (the index [n,n+1] is undefined; this reading is a convention)");
    R.notes.push_back("t_n = z_n angle = van der Corput base 2");
    std::vector<std::future<GJLStep>> jobs;
    for (int n = 1; n < n_max; ++n) jobs.push_back(std::async(std::launch::async, [&s, n] { return gjl_step_distance(s, n); }));
    for (int n = 1; n < n_max; ++n) {
        GJLStep st = jobs[(size_t)n - 1].get();
        R.add("r_n", n, Ext(Rational(s.r(n))), "info");
        R.add("l_n", n, Ext(Rational(s.l(n))), "info", true, "convention [n+1,n]");
        R.add("d_cu(phi^n, psi^n)", n, Ext(st.dcu.value), "claim", st.dcu.exact, st.dcu.method);
        R.add("d*_Cu K1 (phi^n, psi^n)", n, st.dstar.value, "claim", st.dstar.exact, st.dstar.method);
        R.check("GJL step " + std::to_string(n) + ": d_cu <= 1/r_n", st.dcu.exact && st.dcu.value <= st.bound,
                to_string(st.dcu.value) + " vs " + to_string(st.bound));
        R.check("GJL step " + std::to_string(n) + ": d*_Cu(K1) = d_cu",
                st.dstar.exact && st.dstar.value == Ext(st.dcu.value), st.dstar.value.str() + " (" + st.dstar.method + ")");
        R.witnesses.push_back("step " + std::to_string(n) + ": d_cu attained at y = " + to_string(st.dcu.witness_y));
    }
    Rational prev = -1;
    bool increasing = true;
    int reach3 = 0;
    std::vector<std::future<GJLObstruction>> ops, ofs;
    for (int m = 2; m <= n_max; ++m) {
        ops.push_back(std::async(std::launch::async, [&s, m] { return gjl_obstruction(s, m, true); }));
        ofs.push_back(std::async(std::launch::async, [&s, m] { return gjl_obstruction(s, m, false); }));
    }
    for (int m = 2; m <= n_max; ++m) {
        auto op = ops[(size_t)m - 2].get(), of = ofs[(size_t)m - 2].get();
        R.add("obstruction psi-system", m, Ext(op.value), "derived");
        R.add("obstruction psi-system, lattice quotient", m, Ext(op.lattice), "info");
        R.add("obstruction phi-system", m, Ext(of.value), "claim");
        R.check("phi-system obstruction vanishes at m=" + std::to_string(m), of.value == 0, to_string(of.value));
        if (op.value <= prev) increasing = false;
        prev = op.value;
        if (!reach3 && op.value >= 3) reach3 = m;
    }
    R.check("psi-system obstruction strictly increasing", increasing);
    R.check("psi-system obstruction reaches 3", reach3 > 0, reach3 ? "first at m=" + std::to_string(reach3) : "not within range");
    if (reach3) R.add("first stage with psi obstruction >= 3", reach3, Ext(Rational(reach3)), "claim");
    return R;
}

// ---------------------------------------------------------------- Robert family

// phi_{u_{k,n}}: C(T) -> C([0,1]) (x) M_{2^n}, eigenvalues k t + j/2^n
inline EigenPattern robert_pattern(long k, int n) {
    EigenPattern p{Space::Circle, Space::Interval, {}};
    for (long j = 0; j < (1L << n); ++j)
        p.maps.push_back({MapKind::Winding, PLFunction::linear(Space::Interval, 0, 1), k, Q(j, 1L << n), 1});
    return p;
}

inline ScenarioReport robert_report(long k, long l, int n) {
    if (k < 0 || l < 0) throw std::invalid_argument("k, l must be nonnegative");
    if (n < 0 || n > desk_limit(12)) throw std::invalid_argument("Robert stage outside the desk limit");
    ScenarioReport R;
    R.scenario = "robert";
    auto a = robert_pattern(k, n), b = robert_pattern(l, n);
    auto dc = d_cu(a, b);
    DStarOptions o;
    o.known_dcu = dc;
    auto ds = d_star_k1(a, b, o);
    Rational stage_bound = Q(1, 1L << n);
    R.add("d_cu stage", n, Ext(dc.value), "derived", dc.exact, dc.method);
    R.add("d*_Cu K1 stage", n, ds.value, "claim", ds.exact, ds.method);
    R.check("Robert d*_Cu(K1) <= 1/2^n", ds.exact && ds.value <= Ext(stage_bound), ds.value.str());
    R.check("Robert d_cu <= 1/2^n", dc.value <= stage_bound);
    // frak_d of the limit morphisms: d(H) = 0 since the stage Cu-distances tend to 0
    NTMorphism f{a, 1, K0Image::all()}, g{b, 1, K0Image::all()};
    auto C = canonical_basis(Space::Circle);
    auto D = trivial_basis(Space::Interval, 1L << n);
    Rational dR = d_R(f, g, C, D);
    bool k1eq = k1_map(f) == k1_map(g);
    Rational dH = 0;
    R.add("frak_d: d(H) in the limit", n, Ext(dH), "claim", true, "stage d_cu <= 1/2^n tends to 0");
    R.add("frak_d: d_R", n, Ext(dR), "claim");
    R.add("frak_d: d_triv", n, k1eq ? Ext(Rational(0)) : Ext::infinity(), "derived");
    Ext total = k1eq ? Ext(Rational(dH + dR)) : Ext::infinity();
    R.add("frak_d", n, total, "claim");
    Rational expect = Rational(std::labs(k - l)) / 2;
    R.check("Robert frak_d = |k-l|/2 for (k,l)=(" + std::to_string(k) + "," + std::to_string(l) + ")",
            total == Ext(expect), total.str() + " vs " + to_string(expect));
    R.add("stage aff_t distance", n, Ext(aff_t_distance(a, b)), "info", true, "atoms at the stage, not the limit");
    R.add("stage d(H), constants quotient", n, Ext(h_distance(a, b, K0Image::all())), "info");
    auto rot = relative_rotation(f, g, C, D);
    R.witnesses.push_back("relative rotation representative " + to_string(rot.rep.eval(1) - rot.rep.eval(0)) +
                          " t + const");
    // a fiber at (1_U, 1_{U_{1/2^n}}): the y-corners carry no K1
    OpenSet U = OpenSet::arc(Space::Circle, 0, Q(1, 1L << (n + 1)));
    R.fibers.push_back(fiber_diagram(a, b, indicator(U), indicator(open_fatten(U, stage_bound))));
    R.check("Robert fiber at (1_U, 1_U_r) commutes", R.fibers.back().max == Ext(0));
    return R;
}

// ---------------------------------------------------------------- the pair u, v

inline PLFunction novel_f() {
    return PLFunction(Space::Interval, {{0, 0}, {Q(1, 2), Q(1, 4)}, {1, 0}});
}
inline PLFunction novel_g() {
    return PLFunction(Space::Interval, {{0, 0}, {Q(1, 4), Q(1, 4)}, {Q(1, 2), 0}, {Q(3, 4), Q(1, 4)}, {1, 0}});
}

// u_n = diag(e(f), lambda_k, -e(g), -lambda_k) with lambda_k = e(k/2^{n+1}); v_n = -u_n
inline UnitaryField novel_unitary(int n, bool v) {
    if (n < 2) throw std::invalid_argument("stage must be at least 2");
    Rational sh = v ? Q(1, 2) : Rational(0);
    long den = 1L << (n + 1);
    UnitaryField u{Space::Interval, {}};
    u.add(novel_f().shifted(sh));
    for (long k = 1; k < (1L << (n - 1)); ++k) u.add(PLFunction::constant(Space::Interval, Rational(Q(k, den) + sh)));
    u.add(novel_g().shifted(Rational(Q(1, 2) + sh)));
    for (long k = 1; k < (1L << (n - 1)); ++k)
        u.add(PLFunction::constant(Space::Interval, Rational(Q(1, 2) + Q(k, den) + sh)));
    return u;
}

inline EigenPattern novel_pattern(int n, bool v) {
    EigenPattern p{Space::Circle, Space::Interval, {}};
    for (auto& e : novel_unitary(n, v).entries)
        p.maps.push_back(e.f.is_constant() ? PatternMap{MapKind::Const, {}, 1, e.f.eval(0), e.mult}
                                           : PatternMap{MapKind::PL, e.f, 1, 0, e.mult});
    return p;
}

inline OpenSet novel_arc() { return OpenSet::arc(Space::Circle, 0, Q(1, 4)); }

inline ScenarioReport novel_report(int n) {
    if (n < 2 || n > desk_limit(12)) throw std::invalid_argument("stage outside [2, desk limit]");
    ScenarioReport R;
    R.scenario = "novel";
    auto a = novel_pattern(n, false), b = novel_pattern(n, true);
    auto dc = d_cu(a, b);
    DStarOptions o;
    o.known_dcu = dc;
    auto ds = d_star_k1(a, b, o);
    Rational bound = Q(1, 1L << (n - 1));
    R.add("d_cu stage", n, Ext(dc.value), "derived", dc.exact, dc.method);
    R.add("d*_Cu K1 stage", n, ds.value, "claim", ds.exact, ds.method);
    R.check("novel d*_Cu(K1) <= 1/2^(n-1) at n=" + std::to_string(n), ds.exact && ds.value <= Ext(bound), ds.value.str());
    if (!ds.witness.empty()) R.witnesses.push_back("last failing fiber below d*: " + ds.witness);
    // frak_d: u = -v gives equal determinants modulo constants
    NTMorphism f{a, 1, K0Image::all()}, g{b, 1, K0Image::all()};
    auto C = canonical_basis(Space::Circle);
    auto D = trivial_basis(Space::Interval, 1L << n);
    Rational dR = d_R(f, g, C, D);
    bool k1eq = k1_map(f) == k1_map(g);
    R.add("frak_d: d(H) in the limit", n, Ext(Rational(0)), "claim", true, "stage d_cu <= 1/2^(n-1) tends to 0");
    R.add("frak_d: d_R", n, Ext(dR), "claim");
    R.add("frak_d: d_triv", n, k1eq ? Ext(Rational(0)) : Ext::infinity(), "derived");
    Ext total = k1eq ? Ext(dR) : Ext::infinity();
    R.add("frak_d", n, total, "claim");
    R.check("novel frak_d = 0 at n=" + std::to_string(n), total == Ext(0), total.str());
    // the arc ideal I = (1, e^{2 pi i/4})
    OpenSet I = novel_arc();
    auto ru = restricted_generator_image(a, I, K0Image::all());
    auto rv = restricted_generator_image(b, I, K0Image::all());
    R.check("restricted image of u is [C + 4f]", (ru.h.rep - novel_f().scaled(4)).is_constant());
    R.check("restricted image of v is [C' + 4g]", (rv.h.rep - novel_g().scaled(4)).is_constant());
    R.check("I_phi is the whole algebra", ru.target.support.is_full() && rv.target.support.is_full());
    LscFunction z = LscFunction::constant(Space::Interval, kInf);
    auto F = fiber_diagram_bar(a, b, I, z, FiberMetric::FrakD);
    R.fibers.push_back(F);
    R.add("fiber norm at I (rotation summand, lower bound)", n, F.max, "claim", true,
          "half the oscillation of 4(f-g); unnormalized trace");
    R.check("fiber norm at I >= 1/2", Ext(Q(1, 2)) <= F.max, F.max.str());
    auto lb = d_star_bar_lower(a, b, FiberMetric::FrakD, {I}, K0Image::all(), o);
    R.add("frak_d*_Cu lower bound", n, lb.value, "claim", false, lb.witness);
    R.check("frak_d*_Cu lower bound >= 1/8", Ext(Q(1, 8)) <= lb.value, lb.value.str());
    auto triv = d_star_bar_lower(a, b, FiberMetric::Triv, {I}, K0Image::all(), o);
    R.add("d*_Cu K1bar with trivial metric", n, triv.value, "derived", triv.exact, triv.method);
    R.check("dominance: d_cu <= d*_Cu(K1)", Ext(dc.value) <= ds.value);
    R.check("dominance: frak_d*_Cu lower bound <= d*_Cu(K1bar, triv)", lb.value <= triv.value);
    R.check("dominance: d*_Cu(K1) <= d*_Cu(K1bar, triv)", ds.value <= triv.value);
    return R;
}

// stages 2..n_max in parallel, plus the halving of d* across stages
inline ScenarioReport novel_sweep(int n_max) {
    std::vector<std::future<ScenarioReport>> jobs;
    for (int n = 2; n <= n_max; ++n) jobs.push_back(std::async(std::launch::async, [n] { return novel_report(n); }));
    ScenarioReport R;
    R.scenario = "novel";
    std::vector<Ext> ds;
    for (auto& j : jobs) {
        auto r = j.get();
        for (auto& q : r.rows)
            if (q.name == "d*_Cu K1 stage") ds.push_back(q.value);
        R.merge(r);
    }
    for (size_t i = 0; i + 1 < ds.size(); ++i)
        R.check("d*_Cu(K1) halves from stage " + std::to_string(i + 2), ds[i + 1] == Rational(Q(1, 2)) * ds[i],
                ds[i].str() + " -> " + ds[i + 1].str());
    return R;
}

}  // namespace ntcu
