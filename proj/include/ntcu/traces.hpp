#pragma once
// Trace-level comparison of pattern morphisms, Thomsen elements and the metric d_N.

#include <map>

#include "matching.hpp"

namespace ntcu {

// ---------------------------------------------------------------- measures

namespace tr {

// one sample of the parameter space: an exact critical point, or a generic point of
// an open cell (represented by an interior point)
struct Sample {
    Rational y;
    bool generic = false;
};

// an atom of a signed eigenvalue measure at a sample; `fixed` atoms can coincide with
// atoms of another sample, moving atoms of a generic sample never do
struct Atom {
    Rational pos;
    Rational w;
    bool fixed;
};

inline bool locally_constant(const PLFunction& f, const Rational& y) {
    auto& p = f.points();
    for (size_t i = 0; i + 1 < p.size(); ++i)
        if (p[i].t <= y && y <= p[i + 1].t) return p[i].v == p[i + 1].v;
    return true;
}

// sigma(y) = mu_P(y) - mu_Q(y), normalized counting measures
inline std::vector<Atom> signed_measure(const std::vector<Lift>& A, long na, const std::vector<Lift>& B, long nb,
                                        const Sample& s, bool circle) {
    std::map<Rational, std::pair<Rational, bool>> m;
    auto put = [&](const std::vector<Lift>& L, const Rational& w) {
        for (auto& l : L) {
            Rational x = l.f.eval(s.y);
            if (circle) x = frac(x);
            auto& e = m[x];
            e.first += w * l.mult;
            bool fx = !s.generic || locally_constant(l.f, s.y);
            e.second = e.second || fx;
        }
    };
    put(A, Q(1, na));
    put(B, Q(-1, nb));
    std::vector<Atom> out;
    for (auto& [x, e] : m)
        if (e.first != 0) out.push_back({x, e.first, e.second});
    return out;
}

inline Rational mass(const std::vector<Atom>& s) {
    Rational t = 0;
    for (auto& a : s) t += qabs(a.w);
    return t;
}

// critical parameters: breakpoints and coincidences of any two eigenvalue maps
inline std::vector<Sample> samples(const std::vector<Lift>& A, const std::vector<Lift>& B, bool circle, Space Y) {
    if (Y == Space::Point) return {{0, false}};
    std::vector<Lift> all = A;
    all.insert(all.end(), B.begin(), B.end());
    std::vector<Rational> ev = mt::base_events(A, B);
    std::vector<Rational> zero{0};
    mt::pair_events(all, all, true, zero, circle, ev);
    mt::clip01(ev);
    std::vector<Sample> out;
    for (size_t i = 0; i < ev.size(); ++i) {
        out.push_back({ev[i], false});
        if (i + 1 < ev.size()) out.push_back({Rational((ev[i] + ev[i + 1]) / 2), true});
    }
    return out;
}

// a parameter away from every rational with small denominator
inline Rational generic_point(long salt) {
    static const long primes[] = {1000003, 1000033, 1000037, 1000039, 1000081, 1000099};
    long p = primes[salt % 6];
    return Q(p / 3 + 17 * salt, p);
}

}  // namespace tr

// sup_y of the total variation between the normalized eigenvalue-counting measures,
// i.e. sup over ||h|| <= 1 of ||P(h)^ - Q(h)^||
inline Rational aff_t_distance(const EigenPattern& P, const EigenPattern& Qp) {
    if (P.X != Qp.X || P.Y != Qp.Y) throw TypeError("patterns over different spaces");
    auto A = pattern_lifts(P), B = pattern_lifts(Qp);
    long na = P.total(), nb = Qp.total();
    if (na == 0 || nb == 0) throw std::invalid_argument("empty pattern");
    bool circle = P.X == Space::Circle;
    if (P.X == Space::Point) return 0;
    // total variation never exceeds 2: a parameter with no coincidence settles it
    if (P.Y != Space::Point)
        for (long s = 0; s < 3; ++s)
            if (tr::mass(tr::signed_measure(A, na, B, nb, {tr::generic_point(s), false}, circle)) == 2) return 2;
    Rational best = 0;
    for (auto& s : tr::samples(A, B, circle, P.Y))
        best = qmax(best, tr::mass(tr::signed_measure(A, na, B, nb, {s.y, false}, circle)));
    return best;
}

namespace tr {

// (w1, w2) weight pairs for h evaluated against sigma(y1) and sigma(y2)
inline std::vector<std::pair<Rational, Rational>> joint(const std::vector<Atom>& s1, const std::vector<Atom>& s2) {
    std::vector<std::pair<Rational, Rational>> g;
    std::map<Rational, size_t> fixed_at;
    for (auto& a : s1) {
        if (a.fixed) fixed_at[a.pos] = g.size();
        g.push_back({a.w, 0});
    }
    for (auto& b : s2) {
        auto it = b.fixed ? fixed_at.find(b.pos) : fixed_at.end();
        if (it != fixed_at.end()) g[it->second].second += b.w;
        else g.push_back({0, b.w});
    }
    return g;
}

// sup over h in [-1,1]^atoms of F(v,u) with u = <h,w1>, v = <h,w2> and
// F(v,u) = min_{p in cZ} max(u - p, p - v); the zonotope's vertices and its edge
// crossings with the lines u + v in cZ carry the maximum
inline Rational lattice_sup(const std::vector<std::pair<Rational, Rational>>& gens, const Rational& c) {
    std::vector<std::pair<Rational, Rational>> g;
    for (auto [a, b] : gens) {
        if (a == 0 && b == 0) continue;
        if (b < 0 || (b == 0 && a < 0)) { a = -a; b = -b; }
        g.push_back({a, b});
    }
    auto F = [&](const Rational& u, const Rational& v) {
        Rational mid = (u + v) / 2;
        Rational k = Rational(qfloor(Rational(mid / c))) * c;
        Rational d = qmin(Rational(mid - k), Rational(k + c - mid));
        return Rational((u - v) / 2 + d);
    };
    if (g.empty()) return F(0, 0);
    // sort by angle in the closed upper half plane (half-open at the positive axis)
    std::sort(g.begin(), g.end(), [](const auto& x, const auto& y) {
        // cross(x,y) > 0 means x before y
        Rational cr = x.first * y.second - x.second * y.first;
        return cr > 0;
    });
    Rational su = 0, sv = 0;
    for (auto& [a, b] : g) { su += a; sv += b; }
    std::vector<std::pair<Rational, Rational>> verts;
    Rational u = -su, v = -sv;
    verts.push_back({u, v});
    for (auto& [a, b] : g) { u += 2 * a; v += 2 * b; verts.push_back({u, v}); }
    for (auto& [a, b] : g) { u -= 2 * a; v -= 2 * b; verts.push_back({u, v}); }
    Rational best = -1;
    for (size_t i = 0; i + 1 < verts.size(); ++i) {
        auto [u0, v0] = verts[i];
        auto [u1, v1] = verts[i + 1];
        best = qmax(best, F(u0, v0));
        Rational s0 = u0 + v0, s1 = u1 + v1;
        if (s0 == s1) continue;
        Rational lo = qmin(s0, s1), hi = qmax(s0, s1);
        for (mpz_class k = qceil(Rational(lo / c)); Rational(k) * c <= hi; ++k) {
            Rational lam = (Rational(k) * c - s0) / (s1 - s0);
            best = qmax(best, F(u0 + lam * (u1 - u0), v0 + lam * (v1 - v0)));
        }
    }
    return best;
}

}  // namespace tr

// aff_t-style distance with the inner norm replaced by the quotient norm of H
inline Rational h_distance(const EigenPattern& P, const EigenPattern& Qp, const K0Image& k0) {
    if (P.X != Qp.X || P.Y != Qp.Y) throw TypeError("patterns over different spaces");
    if (k0.kind == K0Kind::Zero) return aff_t_distance(P, Qp);
    auto A = pattern_lifts(P), B = pattern_lifts(Qp);
    long na = P.total(), nb = Qp.total();
    if (P.X == Space::Point) return 0;
    bool circle = P.X == Space::Circle;
    Rational cap = aff_t_distance(P, Qp);
    if (cap == 0) return 0;
    auto value = [&](const std::vector<tr::Atom>& s1, const std::vector<tr::Atom>& s2) {
        auto g = tr::joint(s1, s2);
        if (k0.kind == K0Kind::AllConstants) {
            Rational t = 0;
            for (auto& [a, b] : g) t += qabs(Rational(a - b));
            return Rational(t / 2);
        }
        return tr::lattice_sup(g, k0.step);
    };
    Rational best = 0;
    if (P.Y != Space::Point) {
        // two generic parameters: the bound is often attained outright
        auto s1 = tr::signed_measure(A, na, B, nb, {tr::generic_point(1), true}, circle);
        auto s2 = tr::signed_measure(A, na, B, nb, {tr::generic_point(4), true}, circle);
        best = value(s1, s2);
        if (best == cap) return best;
    }
    auto ss = tr::samples(A, B, circle, P.Y);
    std::vector<std::vector<tr::Atom>> sig;
    for (auto& s : ss) sig.push_back(tr::signed_measure(A, na, B, nb, s, circle));
    for (size_t i = 0; i < ss.size(); ++i)
        for (size_t j = 0; j < ss.size(); ++j) {
            if (i == j && !ss[i].generic) continue;
            best = qmax(best, value(sig[i], sig[j]));
            if (best == cap) return best;
        }
    return best;
}

// the trace action of a pattern on a real function over X
inline PLFunction trace_action(const EigenPattern& p, const PLFunction& h) {
    DiagField d{p.X, {}};
    d.add(h);
    return normalized_trace(push_unitary(p, d));
}

// ---------------------------------------------------------------- Thomsen elements

// nu_a: 1_{(t,1]} -> rank of (a - t)_+, represented by the pattern of eigenvalue
// functions of a (values clamped into [0,1])
inline EigenPattern thomsen_nu(const PositiveField& a) {
    EigenPattern p{Space::Interval, a.base, {}};
    for (auto& e : a.entries) {
        auto [lo, hi] = e.f.range();
        if (lo < 0) throw std::invalid_argument("positive field has a negative value");
        if (hi > 1) throw std::invalid_argument("positive field needs norm <= 1 (rescale first)");
        if (e.f.space() == Space::Circle && e.f.winding() != 0) throw std::invalid_argument("positive field winds");
        p.maps.push_back({MapKind::PL, e.f, 1, 0, e.mult});
    }
    return p;
}

inline OpenSet upper_set(const Rational& t) { return OpenSet(Space::Interval, {{t, 1, false, true}}); }

inline LscFunction nu_apply(const EigenPattern& nu, const Rational& t) { return apply_pattern(nu, indicator(upper_set(t))); }

// max(f - d, 0) as a PL function
inline PLFunction pl_shift_clamp(const PLFunction& f, const Rational& d) {
    auto& p = f.points();
    std::vector<Breakpoint> q;
    for (size_t i = 0; i < p.size(); ++i) {
        Rational v = p[i].v - d;
        q.push_back({p[i].t, qmax(v, Rational(0))});
        if (i + 1 < p.size()) {
            Rational w = p[i + 1].v - d;
            if ((v < 0 && w > 0) || (v > 0 && w < 0))
                q.push_back({p[i].t + (0 - v) * (p[i + 1].t - p[i].t) / (w - v), 0});
        }
    }
    return PLFunction(f.space(), q, 0);
}

// ||a^ - b^||: sup over y of the gap between normalized traces
inline Rational sup_gap(const PositiveField& a, const PositiveField& b) {
    auto [lo, hi] = (normalized_trace(a) - normalized_trace(b)).range();
    return qmax(qabs(lo), qabs(hi));
}

// nu_delta(1_{(t,1]}) = nu(1_{(t+delta,1]})
inline EigenPattern nu_delta(const EigenPattern& nu, const Rational& delta) {
    if (delta < 0) throw std::invalid_argument("negative shift");
    if (nu.X != Space::Interval) throw TypeError("Thomsen elements live on [0,1]");
    EigenPattern p = nu;
    for (auto& m : p.maps) {
        PLFunction f = map_lift(m, p.Y);
        m = {MapKind::PL, pl_shift_clamp(f, delta), 1, 0, m.mult};
    }
    return p;
}

// the field a pushed through a pattern alpha: entries a_i o alpha_j
inline PositiveField push_positive(const EigenPattern& alpha, const PositiveField& a) {
    return push_unitary(alpha, a);
}

struct DNResult {
    Rational value = 0;
    bool exact = true;
    size_t argmax = 0;
};

// d_N(alpha, beta) = sup over nu_a in N of d_cu(alpha o nu_a, beta o nu_a)
inline DNResult d_N(const EigenPattern& alpha, const EigenPattern& beta, const std::vector<PositiveField>& N,
                    const DcuOptions& opt = {}) {
    if (N.empty()) throw std::invalid_argument("d_N needs a nonempty family");
    DNResult r;
    for (size_t i = 0; i < N.size(); ++i) {
        auto x = d_cu(thomsen_nu(push_positive(alpha, N[i])), thomsen_nu(push_positive(beta, N[i])), opt);
        r.exact = r.exact && x.exact;
        if (i == 0 || x.value > r.value) { r.value = x.value; r.argmax = i; }
    }
    return r;
}

// for g << h in F: alpha(g) <= beta(h) and beta(g) <= alpha(h)
inline bool finite_set_compare(const EigenPattern& alpha, const EigenPattern& beta,
                               const std::vector<std::pair<LscFunction, LscFunction>>& F) {
    for (auto& [g, h] : F) {
        if (!lsc_waybelow(g, h)) continue;
        if (!lsc_leq(apply_pattern(alpha, g), apply_pattern(beta, h))) return false;
        if (!lsc_leq(apply_pattern(beta, g), apply_pattern(alpha, h))) return false;
    }
    return true;
}

}  // namespace ntcu
