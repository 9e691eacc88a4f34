#pragma once
// The Cu_K construction for K = K1 (and K1-bar data at arc ideals), fiber diagrams
// and the refined metrics d*.

#include <optional>
#include <map>

#include "matching.hpp"
#include "nielsen_thomsen.hpp"

namespace ntcu {

enum class KType { K1, K1Bar };
enum class FiberMetric { Triv, FrakD };

inline const char* ktype_name(KType k) { return k == KType::K1 ? "K1" : "K1bar"; }
inline const char* fiber_metric_name(FiberMetric m) { return m == FiberMetric::Triv ? "triv" : "frakd"; }

// ---------------------------------------------------------------- ideals

// One connected component of an ideal's support. On the circle the full circle is a
// single component running over [0,1].
struct IdealComponent {
    Arc arc;
    bool full = false;
    bool ztype = false;  // K1 of the component ideal is Z
};

// Ideal of C(Y) (x) M_n given by its open support. K1 is Z per component that is an
// open arc of the circle or an interval interior to (0,1); components touching 0 or 1
// of the interval, and point spaces, carry no K1.
struct IdealModel {
    OpenSet support;
    std::vector<IdealComponent> comps;
    K0Image hmodel = K0Image::all();

    long k1_rank() const {
        long n = 0;
        for (auto& c : comps) n += c.ztype;
        return n;
    }

    // index of the component containing the (nonempty) component c of a smaller ideal
    long containing(const IdealComponent& c) const {
        for (size_t i = 0; i < comps.size(); ++i) {
            auto& d = comps[i];
            if (d.full) return (long)i;
            if (c.full) continue;
            if (support.space() == Space::Interval) {
                bool left = d.arc.a < c.arc.a || (d.arc.a == c.arc.a && (d.arc.lclosed || !c.arc.lclosed));
                bool right = c.arc.b < d.arc.b || (c.arc.b == d.arc.b && (d.arc.rclosed || !c.arc.rclosed));
                if (left && right) return (long)i;
            } else {
                Rational s = frac(c.arc.a - d.arc.a);
                if (s + (c.arc.b - c.arc.a) <= d.arc.b - d.arc.a) return (long)i;
            }
        }
        return -1;
    }
};

inline IdealModel ideal_of(const OpenSet& s) {
    IdealModel I{s, {}, K0Image::all()};
    if (s.space() == Space::Point) {
        if (s.is_full()) I.comps.push_back({{0, 1}, true, false});
        return I;
    }
    if (s.space() == Space::Circle && s.is_full()) {
        I.comps.push_back({{0, 1}, true, true});
        return I;
    }
    for (auto& a : s.arcs()) {
        bool z = s.space() == Space::Circle || (!a.lclosed && !a.rclosed);
        I.comps.push_back({a, s.is_full(), z});
    }
    return I;
}

inline OpenSet lsc_support(const LscFunction& x) { return x.level_set(1); }
inline IdealModel ideal_of(const LscFunction& x) { return ideal_of(lsc_support(x)); }

// Phase of the arc-rescaled generator of component c, evaluated at a lifted point x of
// the domain: F(x - a) with F(z) = floor(z) + min(frac(z)/len, 1) on the circle, the
// clamp of (x - a)/len on the interval. Integer valued off the component.
inline Rational generator_phase(Space X, const IdealComponent& c, const Rational& x) {
    Rational len = c.arc.b - c.arc.a;
    if (X == Space::Circle) {
        Rational z = x - c.arc.a;
        Rational f = frac(z);
        return Rational(qfloor(z)) + qmin(Rational(f / len), Rational(1));
    }
    Rational v = (x - c.arc.a) / len;
    return qmax(Rational(0), qmin(v, Rational(1)));
}

// total degree of the image of the generator of c on the target component d
inline long component_degree(const std::vector<Lift>& lifts, Space X, const IdealComponent& c,
                             const IdealComponent& d) {
    Rational y0 = d.full ? Rational(0) : d.arc.a, y1 = d.full ? Rational(1) : d.arc.b;
    Rational s = 0;
    for (auto& l : lifts)
        s += Rational(l.mult) * (generator_phase(X, c, l.f.eval(y1)) - generator_phase(X, c, l.f.eval(y0)));
    if (s.get_den() != 1) throw std::logic_error("non-integral degree on a support component");
    return s.get_num().get_si();
}

// degree vector (over target comps) of the generator of c pushed through the lifts
inline std::vector<long> generator_image(const std::vector<Lift>& lifts, Space X, const IdealComponent& c,
                                         const IdealModel& target) {
    std::vector<long> out(target.comps.size(), 0);
    for (size_t j = 0; j < target.comps.size(); ++j)
        if (target.comps[j].ztype) out[j] = component_degree(lifts, X, c, target.comps[j]);
    return out;
}

// K(I <= J): each component's class moves into the containing component (0 if that
// one has trivial K1). Returns false when some component is not contained.
inline bool k_transport(const IdealModel& I, const std::vector<long>& g, const IdealModel& J, std::vector<long>& out) {
    out.assign(J.comps.size(), 0);
    for (size_t i = 0; i < I.comps.size(); ++i) {
        long j = J.containing(I.comps[i]);
        if (j < 0) return false;
        if (J.comps[(size_t)j].ztype) out[(size_t)j] += g[i];
    }
    return true;
}

// ---------------------------------------------------------------- Cu_K1 elements

struct CuKElement {
    LscFunction x;
    std::vector<long> g;  // aligned with ideal_of(x).comps; zero on non-Z components
};

enum class CuKOrder { Leq, WayBelow, Incomparable };

inline const char* cuk_order_name(CuKOrder o) {
    switch (o) {
        case CuKOrder::Leq: return "leq";
        case CuKOrder::WayBelow: return "waybelow";
        default: return "incomparable";
    }
}

inline void check_element(const CuKElement& e) {
    auto I = ideal_of(e.x);
    if (e.g.size() != I.comps.size()) throw std::invalid_argument("K-class does not match the ideal of x");
    for (size_t i = 0; i < e.g.size(); ++i)
        if (!I.comps[i].ztype && e.g[i] != 0) throw std::invalid_argument("K-class on a component with trivial K1");
}

inline CuKElement cuk_zero(Space s) { return {LscFunction::zero(s), {}}; }

// i: x -> (x, 0)
inline CuKElement cuk_embed(const LscFunction& x) { return {x, std::vector<long>(ideal_of(x).comps.size(), 0)}; }

// j: the K-class pushed to the whole algebra
inline std::vector<long> cuk_global_class(const CuKElement& e) {
    auto I = ideal_of(e.x);
    auto A = ideal_of(OpenSet::whole(e.x.space()));
    std::vector<long> out;
    if (!k_transport(I, e.g, A, out)) throw std::logic_error("ideal not contained in the algebra");
    return out;
}

// a section of j: (1, h) over the whole algebra
inline CuKElement cuk_section(Space s, const std::vector<long>& h) {
    CuKElement e{LscFunction::constant(s, 1), {}};
    auto I = ideal_of(e.x);
    if (h.size() != I.comps.size()) throw std::invalid_argument("class does not match K of the algebra");
    e.g = h;
    check_element(e);
    return e;
}

inline CuKElement cuk_add(const CuKElement& a, const CuKElement& b) {
    CuKElement s{lsc_add(a.x, b.x), {}};
    auto I = ideal_of(s.x);
    std::vector<long> ta, tb;
    if (!k_transport(ideal_of(a.x), a.g, I, ta) || !k_transport(ideal_of(b.x), b.g, I, tb))
        throw std::logic_error("summand ideal not contained in the sum ideal");
    s.g.resize(ta.size());
    for (size_t i = 0; i < ta.size(); ++i) s.g[i] = ta[i] + tb[i];
    return s;
}

inline CuKOrder cuk_order(const CuKElement& a, const CuKElement& b) {
    if (a.x.space() != b.x.space()) throw TypeError("elements over different spaces");
    if (!lsc_leq(a.x, b.x)) return CuKOrder::Incomparable;
    std::vector<long> t;
    if (!k_transport(ideal_of(a.x), a.g, ideal_of(b.x), t) || t != b.g) return CuKOrder::Incomparable;
    return lsc_waybelow(a.x, b.x) ? CuKOrder::WayBelow : CuKOrder::Leq;
}

inline CuKElement cuk_morphism_apply(const EigenPattern& p, const CuKElement& e) {
    check_element(e);
    CuKElement out{apply_pattern(p, e.x), {}};
    auto I = ideal_of(e.x), J = ideal_of(out.x);
    auto lifts = pattern_lifts(p);
    out.g.assign(J.comps.size(), 0);
    for (size_t i = 0; i < I.comps.size(); ++i) {
        if (e.g[i] == 0) continue;
        auto v = generator_image(lifts, p.X, I.comps[i], J);
        for (size_t j = 0; j < v.size(); ++j) out.g[j] += e.g[i] * v[j];
    }
    return out;
}

// ---------------------------------------------------------------- K1-bar at arc ideals

struct RestrictedImage {
    HClass h;              // H-part in H(A) of the codomain, unnormalized trace
    std::vector<long> k1;  // degrees over the components of the image support
    IdealModel target;
};

// The generator of K1-bar(I) for a single arc I of the domain circle is the arc-rescaled
// winding unitary; its image has phase sum_j mult_j Theta(L_j(y)).
inline RestrictedImage restricted_generator_image(const EigenPattern& p, const OpenSet& I, const K0Image& k0) {
    if (p.X != Space::Circle) throw TypeError("restricted generators live on circle domains");
    if (I.space() != Space::Circle) throw TypeError("ideal support must be a circle open set");
    auto Iid = ideal_of(I);
    if (Iid.comps.size() != 1) throw std::invalid_argument("restricted generator needs a single-arc ideal");
    const IdealComponent& c = Iid.comps[0];
    auto lifts = pattern_lifts(p);
    Space Yr = p.Y == Space::Circle ? Space::Interval : p.Y;
    PLFunction rep = PLFunction::constant(Yr, 0);
    std::vector<Rational> tg{frac(c.arc.a)};
    if (!c.full) tg.push_back(frac(c.arc.b));
    for (auto& l : lifts) {
        std::vector<Breakpoint> pts;
        if (p.Y == Space::Point) {
            Rational v = generator_phase(p.X, c, l.f.eval(0));
            pts = {{0, v}, {1, v}};
        } else {
            auto ys = detail::critical_params({l}, tg, true, p.Y);
            if (p.Y == Space::Circle) ys.push_back(1);
            for (auto& y : ys) pts.push_back({y, generator_phase(p.X, c, l.f.eval(y))});
        }
        rep = rep + PLFunction(Yr, pts, 0).scaled(l.mult);
    }
    RestrictedImage r{{rep, k0}, {}, ideal_of(lsc_support(apply_pattern(p, indicator(I))))};
    r.k1 = generator_image(lifts, p.X, c, r.target);
    return r;
}

// the diagonal entries exp(2 pi i Theta(L_j(y))) computed from the eigenvalues as complex
// numbers, fed to the path-integration oracle; checks the factor 1/|V|
inline NumericDet restricted_numeric(const EigenPattern& p, const Arc& V, const Rational& y, long steps) {
    double a = to_double(V.a), len = to_double(Rational(V.b - V.a));
    std::vector<double> ph, w;
    for (auto& l : pattern_lifts(p)) {
        double th = std::arg(std::polar(1.0, 2 * M_PI * to_double(l.f.eval(y)))) / (2 * M_PI);
        double z = th - a;
        z -= std::floor(z);
        ph.push_back(std::min(z / len, 1.0));
        w.push_back((double)l.mult);
    }
    auto path = [&](double s, std::vector<std::complex<double>>& out) {
        out.resize(ph.size());
        for (size_t j = 0; j < ph.size(); ++j) out[j] = std::polar(1.0, 2 * M_PI * s * ph[j]);
    };
    return numeric_det_oracle(path, w, steps, 1.0);
}

// ---------------------------------------------------------------- fiber diagrams

struct PathPair {
    std::string name;
    Ext distance;
};

struct FiberReport {
    KType k = KType::K1;
    FiberMetric metric = FiberMetric::Triv;
    std::string x, y;
    std::vector<std::pair<std::string, std::string>> corners;  // name, group
    std::vector<PathPair> pairs;
    Ext max;
    bool lower_bound = false;  // distances are certified lower bounds
};

inline std::string k1_group_str(const IdealModel& I) {
    long r = I.k1_rank();
    if (r == 0) return "0";
    return r == 1 ? "Z" : "Z^" + std::to_string(r);
}

inline Ext fiber_norm(const FiberReport& F) { return F.max; }

// Fiber diagram of alpha, beta at coordinates (x, y) for K = K1 with the trivial metric.
// Each generator of K(I_x) is followed along both paths into the y-corners; a pair whose
// K_delta arrow needs an order relation that fails is left out.
inline FiberReport fiber_diagram(const EigenPattern& a, const EigenPattern& b, const LscFunction& x,
                                 const LscFunction& y) {
    if (a.X != b.X || a.Y != b.Y) throw TypeError("patterns between different spaces");
    FiberReport F;
    F.x = x.str();
    F.y = y.str();
    if (!lsc_leq(x, y)) throw std::invalid_argument("fiber coordinates need x <= y");
    LscFunction ax = apply_pattern(a, x), ay = apply_pattern(a, y), bx = apply_pattern(b, x), by = apply_pattern(b, y);
    IdealModel Ix = ideal_of(x), Iy = ideal_of(y), Iax = ideal_of(ax), Iay = ideal_of(ay), Ibx = ideal_of(bx),
               Iby = ideal_of(by);
    F.corners = {{"K(x)", k1_group_str(Ix)},           {"K(y)", k1_group_str(Iy)},
                 {"K(alpha0 x)", k1_group_str(Iax)}, {"K(alpha0 y)", k1_group_str(Iay)},
                 {"K(beta0 x)", k1_group_str(Ibx)},  {"K(beta0 y)", k1_group_str(Iby)}};
    auto La = pattern_lifts(a), Lb = pattern_lifts(b);
    auto push = [&](const std::vector<Lift>& L, const IdealModel& I, const std::vector<long>& g, const IdealModel& J) {
        std::vector<long> out(J.comps.size(), 0);
        for (size_t i = 0; i < I.comps.size(); ++i) {
            if (g[i] == 0) continue;
            auto v = generator_image(L, a.X, I.comps[i], J);
            for (size_t j = 0; j < v.size(); ++j) out[j] += g[i] * v[j];
        }
        return out;
    };
    bool nat_a = true, nat_b = true, cross_a = true, cross_b = true;
    bool have_a = lsc_leq(bx, ay), have_b = lsc_leq(ax, by);
    for (size_t i = 0; i < Ix.comps.size(); ++i) {
        if (!Ix.comps[i].ztype) continue;
        std::vector<long> g(Ix.comps.size(), 0);
        g[i] = 1;
        std::vector<long> gy, t1, t2, t3, t4;
        k_transport(Ix, g, Iy, gy);
        k_transport(Iax, push(La, Ix, g, Iax), Iay, t1);
        k_transport(Ibx, push(Lb, Ix, g, Ibx), Iby, t2);
        if (t1 != push(La, Iy, gy, Iay)) nat_a = false;
        if (t2 != push(Lb, Iy, gy, Iby)) nat_b = false;
        if (have_a) {
            if (!k_transport(Ibx, push(Lb, Ix, g, Ibx), Iay, t3)) throw std::logic_error("order without containment");
            if (t3 != t1) cross_a = false;
        }
        if (have_b) {
            if (!k_transport(Iax, push(La, Ix, g, Iax), Iby, t4)) throw std::logic_error("order without containment");
            if (t4 != t2) cross_b = false;
        }
    }
    auto d = [](bool eq) { return eq ? Ext(Rational(0)) : Ext::infinity(); };
    F.pairs.push_back({"alpha_y K(x<=y) | K(alpha0 x<=alpha0 y) alpha_x", d(nat_a)});
    F.pairs.push_back({"beta_y K(x<=y) | K(beta0 x<=beta0 y) beta_x", d(nat_b)});
    if (have_a) F.pairs.push_back({"K(alpha0 x<=alpha0 y) alpha_x | K(beta0 x<=alpha0 y) beta_x", d(cross_a)});
    if (have_b) F.pairs.push_back({"K(beta0 x<=beta0 y) beta_x | K(alpha0 x<=beta0 y) alpha_x", d(cross_b)});
    F.max = Ext(Rational(0));
    for (auto& p : F.pairs) F.max = emax(F.max, p.distance);
    return F;
}

// Left-hand side of the lower-bound proposition at x = 1_I (single arc) and z >= alpha0(x),
// beta0(x). For K1 the value is 0 or infinity. For K1-bar with frak_d the rotation summand
// of frak_d is returned, which bounds the distance from below; with d_triv, 0 or infinity.
inline Ext lower_bound_check(const EigenPattern& a, const EigenPattern& b, const OpenSet& I, const LscFunction& z,
                             KType k, FiberMetric m, const K0Image& k0 = K0Image::all()) {
    LscFunction x = indicator(I);
    LscFunction ax = apply_pattern(a, x), bx = apply_pattern(b, x);
    if (!lsc_leq(ax, z) || !lsc_leq(bx, z)) throw std::invalid_argument("lower bound needs alpha0(x), beta0(x) <= z");
    IdealModel Iz = ideal_of(z);
    auto ra = restricted_generator_image(a, I, k0), rb = restricted_generator_image(b, I, k0);
    std::vector<long> ta, tb;
    k_transport(ra.target, ra.k1, Iz, ta);
    k_transport(rb.target, rb.k1, Iz, tb);
    if (k == KType::K1) return ta == tb ? Ext(Rational(0)) : Ext::infinity();
    if (m == FiberMetric::Triv) return ta == tb && h_is_zero(ra.h - rb.h) ? Ext(Rational(0)) : Ext::infinity();
    if (ta != tb) return Ext::infinity();
    if (!Iz.support.is_full()) throw std::invalid_argument("H-parts are compared in the whole algebra only");
    return Ext(h_norm(ra.h - rb.h));
}

inline FiberReport fiber_diagram_bar(const EigenPattern& a, const EigenPattern& b, const OpenSet& I,
                                     const LscFunction& z, FiberMetric m, const K0Image& k0 = K0Image::all()) {
    FiberReport F;
    F.k = KType::K1Bar;
    F.metric = m;
    F.x = indicator(I).str();
    F.y = z.str();
    F.corners = {{"K(x)", "K1bar(I), generator = arc-rescaled winding unitary"}, {"K(z)", "K1bar(I_z)"}};
    Ext v = lower_bound_check(a, b, I, z, KType::K1Bar, m, k0);
    F.pairs.push_back({"K(alpha0 x<=z) alpha_I | K(beta0 x<=z) beta_I", v});
    F.max = v;
    F.lower_bound = m == FiberMetric::FrakD;
    return F;
}

// ---------------------------------------------------------------- d*

struct DStarOptions {
    long check_cap = 400000;  // fiber evaluations before giving up with an upper bound
    long grid_cap = 64;       // critical values kept per arc family in K1-bar lower bounds
    DcuOptions dcu;
    std::optional<DcuResult> known_dcu;  // reuse an already computed d_cu
};

struct DStarResult {
    Ext value;
    Rational eps0 = 0;
    bool exact = true;
    bool lower_only = false;  // value is a certified lower bound
    std::string method;
    std::string witness;
    long checks = 0;
};

namespace rf {

struct Side {
    std::vector<Lift> lifts, moving;
    std::vector<std::pair<Rational, long>> consts;  // position mod 1, mult
    EigenPattern moving_pat;
};

inline Side split(const EigenPattern& p) {
    Side s;
    s.lifts = pattern_lifts(p);
    s.moving_pat = {p.X, p.Y, {}};
    for (auto& l : s.lifts) {
        if (l.f.is_constant() && l.f.winding() == 0) {
            s.consts.push_back({p.X == Space::Circle ? frac(l.f.eval(0)) : l.f.eval(0), l.mult});
        } else {
            s.moving.push_back(l);
            PatternMap m;
            m.kind = MapKind::PL;
            m.phi = l.f;
            m.mult = l.mult;
            s.moving_pat.maps.push_back(m);
        }
    }
    std::sort(s.consts.begin(), s.consts.end());
    return s;
}

inline bool const_in(const Side& s, const OpenSet& U) {
    for (auto& c : s.consts)
        if (U.contains(c.first)) return true;
    return false;
}

inline IdealModel support_of(const Side& s, const OpenSet& U, Space Y) {
    if (const_in(s, U)) return ideal_of(OpenSet::whole(Y));
    if (s.moving.empty()) return ideal_of(OpenSet::empty(Y));
    return ideal_of(lsc_support(apply_pattern(s.moving_pat, indicator(U))));
}

// direction S -> T at (1_U, 1_{U_r}): the alpha path against the K_delta path through T
inline bool commutes_dir(const Side& S, const Side& T, const OpenSet& U, const OpenSet& Ur, Space X, Space Y) {
    IdealModel tgt = support_of(S, Ur, Y);
    if (tgt.k1_rank() == 0) return true;
    IdealComponent c = ideal_of(U).comps.at(0);
    std::vector<long> p1(tgt.comps.size(), 0);
    for (size_t j = 0; j < tgt.comps.size(); ++j)
        if (tgt.comps[j].ztype) p1[j] = component_degree(S.moving, X, c, tgt.comps[j]);
    IdealModel src = support_of(T, U, Y);
    std::vector<long> img(src.comps.size(), 0), p2;
    for (size_t j = 0; j < src.comps.size(); ++j)
        if (src.comps[j].ztype) img[j] = component_degree(T.moving, X, c, src.comps[j]);
    if (!k_transport(src, img, tgt, p2)) return true;  // no K_delta arrow
    return p1 == p2;
}

inline bool same_lifts(std::vector<Lift> A, std::vector<Lift> B) {
    if (A.size() != B.size()) return false;
    for (auto& a : A) {
        bool hit = false;
        for (auto& b : B)
            if (b.f == a.f && b.mult == a.mult) { hit = true; break; }
        if (!hit) return false;
    }
    return true;
}

// sup over y of half the largest gap between consecutive eigenvalues on the circle;
// the constants alone give an upper bound, used when the events are too many
inline Rational cover_radius(const Side& s, Space Y, long event_cap, const Rational& enough) {
    Rational bound = 1;
    if (!s.consts.empty()) {
        Rational g = 0;
        for (size_t i = 0; i < s.consts.size(); ++i) {
            Rational nx = i + 1 < s.consts.size() ? s.consts[i + 1].first : Rational(s.consts[0].first + 1);
            g = qmax(g, Rational(nx - s.consts[i].first));
        }
        bound = g / 2;
    }
    if (Y == Space::Point || bound <= enough) return bound;
    // lifts differing by a constant never cross, so only pairs of different shapes matter
    std::vector<std::vector<size_t>> shapes;
    std::vector<PLFunction> keys;
    for (size_t i = 0; i < s.lifts.size(); ++i) {
        PLFunction k = s.lifts[i].f.shifted(Rational(-s.lifts[i].f.eval(0)));
        size_t g = 0;
        while (g < keys.size() && !(keys[g] == k)) ++g;
        if (g == keys.size()) keys.push_back(k), shapes.emplace_back();
        shapes[g].push_back(i);
    }
    std::vector<Rational> ys{0, 1};
    for (auto& l : s.lifts)
        for (auto& t : l.f.breakpoints()) ys.push_back(t);
    for (size_t g = 0; g < shapes.size(); ++g)
        for (size_t h = g + 1; h < shapes.size(); ++h)
            for (size_t i : shapes[g])
                for (size_t j : shapes[h]) {
                    PLFunction d = s.lifts[i].f - s.lifts[j].f;
                    auto& p = d.points();
                    for (size_t k = 0; k + 1 < p.size(); ++k)
                        detail::segment_hits(p[k].t, p[k].v, p[k + 1].t, p[k + 1].v, 0, true, ys);
                    if ((long)ys.size() > event_cap) return bound;
                }
    mt::sort_unique(ys);
    Rational best = 0;
    for (auto& y : ys) {
        if (y < 0 || y > 1) continue;
        std::vector<Rational> v;
        for (auto& l : s.lifts) v.push_back(frac(l.f.eval(y)));
        std::sort(v.begin(), v.end());
        Rational g = v.front() + 1 - v.back();
        for (size_t i = 0; i + 1 < v.size(); ++i) g = qmax(g, Rational(v[i + 1] - v[i]));
        best = qmax(best, g);
    }
    return qmin(bound, Rational(best / 2));
}

// critical values of the eigenvalue maps: values at breakpoints and at the ends
inline std::vector<Rational> critical_values(const Side& s) {
    std::vector<Rational> v;
    for (auto& c : s.consts) v.push_back(c.first);
    for (auto& l : s.moving)
        for (auto& b : l.f.points()) v.push_back(frac(b.v));
    mt::sort_unique(v);
    return v;
}

// lifts of the values into the window (lo, hi)
inline std::vector<Rational> in_window(const std::vector<Rational>& vals, const Rational& lo, const Rational& hi) {
    std::vector<Rational> out{lo, hi};
    for (auto& v : vals) {
        Rational w = v + Rational(qceil(Rational(lo - v)));
        for (; w <= hi; w += 1) out.push_back(w);
    }
    mt::sort_unique(out);
    return out;
}

struct Gap {
    Rational lo, hi;
    bool walls;
    const Side* S;
    const Side* T;
    std::vector<Rational> vals;
};

}  // namespace rf

// d*_{Cu,d_triv} for K = K1: inf{r > eps0 : every fiber F(1_U, 1_{U_r}) commutes}, with
// U ranging over single arcs whose ends lie on the critical grid of the window.
inline DStarResult d_star_k1(const EigenPattern& a, const EigenPattern& b, const DStarOptions& opt = {}) {
    if (a.X != b.X || a.Y != b.Y) throw TypeError("patterns between different spaces");
    if (a.X != Space::Circle) throw TypeError("d* is implemented for circle domains");
    DStarResult R;
    auto dc = opt.known_dcu ? *opt.known_dcu : d_cu(a, b, opt.dcu);
    R.eps0 = dc.value;
    R.exact = dc.exact;
    R.value = Ext(R.eps0);
    rf::Side A = rf::split(a), B = rf::split(b);
    if (a.Y == Space::Point) { R.method = "point codomain, K1 = 0"; return R; }
    if (rf::same_lifts(A.lifts, B.lifts)) { R.method = "identical patterns"; return R; }
    if (a.Y == Space::Circle && pattern_k1(a) != pattern_k1(b)) {
        R.value = Ext::infinity();
        R.method = "K1 maps differ";
        R.witness = "U = circle";
        return R;
    }
    Rational rc = qmax(rf::cover_radius(A, a.Y, 20000, R.eps0), rf::cover_radius(B, a.Y, 20000, R.eps0));
    if (rc <= R.eps0) {
        R.method = "cover radius " + to_string(rc) + " <= eps0";
        return R;
    }
    // windows between consecutive constants of S, where U_r can miss them all
    std::vector<Rational> crit = rf::critical_values(A);
    {
        auto cb = rf::critical_values(B);
        crit.insert(crit.end(), cb.begin(), cb.end());
        mt::sort_unique(crit);
    }
    std::vector<rf::Gap> gaps;
    for (int dir = 0; dir < 2; ++dir) {
        const rf::Side& S = dir ? B : A;
        const rf::Side& T = dir ? A : B;
        if (S.consts.empty()) {
            gaps.push_back({0, 2, false, &S, &T, rf::in_window(crit, 0, 2)});
            continue;
        }
        for (size_t i = 0; i < S.consts.size(); ++i) {
            Rational lo = S.consts[i].first;
            Rational hi = i + 1 < S.consts.size() ? S.consts[i + 1].first : Rational(S.consts[0].first + 1);
            if (hi - lo <= 2 * R.eps0) continue;
            gaps.push_back({lo, hi, true, &S, &T, rf::in_window(crit, lo, hi)});
        }
    }
    std::vector<Rational> cand{R.eps0, rc};
    for (auto& g : gaps) {
        Rational top = g.walls ? qmin(rc, Rational((g.hi - g.lo) / 2)) : rc;
        for (size_t i = 0; i < g.vals.size(); ++i)
            for (size_t j = i + 1; j < g.vals.size(); ++j) {
                Rational d = g.vals[j] - g.vals[i];
                for (Rational r : {d, Rational(d / 2)})
                    if (r > R.eps0 && r <= top) cand.push_back(r);
            }
    }
    mt::sort_unique(cand);
    bool capped = false;
    auto good = [&](const Rational& r, std::string& wit) {
        for (auto& g : gaps) {
            if (g.walls && g.hi - g.lo <= 2 * r) continue;
            std::vector<Rational> grid;
            for (auto& v : g.vals)
                for (Rational w : {v, Rational(v + r), Rational(v - r)}) {
                    if (g.walls && (w < g.lo + r || w > g.hi - r)) continue;
                    if (!g.walls && (w < 0 || w >= 2)) continue;
                    grid.push_back(w);
                }
            mt::sort_unique(grid);
            grid = mt::with_midpoints(grid);
            for (size_t i = 0; i < grid.size(); ++i) {
                if (!g.walls && grid[i] >= 1) break;
                for (size_t j = i + 1; j < grid.size(); ++j) {
                    if (!g.walls && grid[j] - grid[i] + 2 * r >= 1) break;
                    if (++R.checks > opt.check_cap) { capped = true; return false; }
                    OpenSet U = OpenSet::arc(Space::Circle, grid[i], grid[j]);
                    OpenSet Ur = OpenSet::arc(Space::Circle, grid[i] - r, grid[j] + r);
                    if (!rf::commutes_dir(*g.S, *g.T, U, Ur, a.X, a.Y)) {
                        wit = "U=" + U.str() + " r=" + to_string(r);
                        return false;
                    }
                }
            }
        }
        return true;
    };
    for (size_t i = 0; i + 1 < cand.size(); ++i) {
        std::string w;
        Rational mid = (cand[i] + cand[i + 1]) / 2;
        if (good(mid, w)) {
            R.value = Ext(cand[i]);
            R.method = "critical scan";
            return R;
        }
        if (capped) break;
        R.witness = w;
        if (good(cand[i + 1], w)) {
            R.value = Ext(cand[i + 1]);
            R.method = "critical scan";
            return R;
        }
        if (capped) break;
        R.witness = w;
    }
    R.value = Ext(rc);
    R.method = capped ? "scan capped; cover radius is an upper bound" : "critical scan reached the cover radius";
    if (capped) R.exact = false;
    return R;
}

// Lower bound for d* in the K1-bar version from the lower-bound proposition: for single
// arcs I on the critical grid, d(...) <= 4 d*, with z the full support.
inline DStarResult d_star_bar_lower(const EigenPattern& a, const EigenPattern& b, FiberMetric m,
                                    const std::vector<OpenSet>& arcs = {}, const K0Image& k0 = K0Image::all(),
                                    const DStarOptions& opt = {}) {
    if (a.X != Space::Circle) throw TypeError("d* is implemented for circle domains");
    DStarResult R;
    auto dc = opt.known_dcu ? *opt.known_dcu : d_cu(a, b, opt.dcu);
    R.eps0 = dc.value;
    R.value = Ext(R.eps0);
    R.lower_only = true;
    R.exact = false;
    R.method = "lower-bound proposition";
    std::vector<OpenSet> family = arcs;
    if (family.empty()) {
        auto A = rf::split(a), B = rf::split(b);
        auto v = rf::critical_values(A);
        auto w = rf::critical_values(B);
        v.insert(v.end(), w.begin(), w.end());
        mt::sort_unique(v);
        v = mt::with_midpoints(v);
        if ((long)v.size() > opt.grid_cap) {
            std::vector<Rational> s;
            for (long i = 0; i < opt.grid_cap; ++i) s.push_back(v[(size_t)(i * (long)v.size() / opt.grid_cap)]);
            v = s;
        }
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = 0; j < v.size(); ++j)
                if (i != j) family.push_back(OpenSet::arc(Space::Circle, v[i], j > i ? v[j] : Rational(v[j] + 1)));
    }
    LscFunction z = LscFunction::constant(a.Y, kInf);
    for (auto& I : family) {
        Ext d = lower_bound_check(a, b, I, z, KType::K1Bar, m, k0);
        Ext q = d.inf ? d : Ext(Rational(d.v / 4));
        if (R.value < q) {
            R.value = q;
            R.witness = "I=" + I.str() + " distance=" + d.str();
        }
        if (d.inf) {
            R.exact = true;
            R.lower_only = false;
            R.method = "trivial metric fiber never commutes";
            break;
        }
    }
    return R;
}

inline DStarResult d_star(const EigenPattern& a, const EigenPattern& b, KType k, FiberMetric m,
                          const DStarOptions& opt = {}) {
    if (k == KType::K1) {
        if (m != FiberMetric::Triv) throw std::invalid_argument("frak_d compares K1-bar morphisms; use the trivial metric for K1");
        return d_star_k1(a, b, opt);
    }
    return d_star_bar_lower(a, b, m, {}, K0Image::all(), opt);
}

}  // namespace ntcu
