#pragma once
// Shared random generators and independent oracles for the test binaries.

#include <random>
#include <set>

#include "ntcu/nielsen_thomsen.hpp"

namespace ntcu::testing {

using Rng = std::mt19937_64;

inline Rational rand_q(Rng& g, long den, long lo, long hi) {
    std::uniform_int_distribution<long> d(lo * den, hi * den);
    return Q(d(g), den);
}

// PL on [0,1] with up to `maxbp` breakpoints and values on a grid of step 1/den in [lo,hi]
inline PLFunction rand_pl(Rng& g, Space s, int maxbp, long den, long lo, long hi) {
    if (s == Space::Point) return PLFunction::constant(Space::Point, rand_q(g, den, lo, hi));
    std::uniform_int_distribution<int> nb(2, std::max(2, maxbp));
    int n = nb(g);
    std::set<Rational> ts{0, 1};
    while ((int)ts.size() < n) ts.insert(rand_q(g, 8, 0, 1));
    std::vector<Breakpoint> pts;
    for (auto& t : ts) pts.push_back({t, rand_q(g, den, lo, hi)});
    long w = 0;
    if (s == Space::Circle) {
        std::uniform_int_distribution<int> wd(-1, 1);
        w = wd(g);
        pts.back().v = pts.front().v + w;
    }
    return PLFunction(s, pts, w);
}

inline EigenPattern rand_pattern(Rng& g, Space X, Space Y, long total, int maxbp = 4) {
    EigenPattern p{X, Y, {}};
    std::uniform_int_distribution<int> kind(0, 2);
    long left = total;
    while (left > 0) {
        std::uniform_int_distribution<long> md(1, left);
        long m = md(g);
        left -= m;
        PatternMap pm;
        pm.mult = m;
        int k = kind(g);
        if (k == 0) {
            pm.kind = MapKind::Const;
            pm.c = X == Space::Interval ? rand_q(g, 8, 0, 1) : frac(rand_q(g, 8, 0, 1));
        } else if (X == Space::Interval || k == 1) {
            pm.kind = MapKind::PL;
            pm.phi = rand_pl(g, Y, maxbp, 8, 0, 1);
            if (Y == Space::Circle) {
                auto pts = pm.phi.points();
                pts.back().v = pts.front().v;
                pm.phi = PLFunction(Y, pts, 0);
            }
        } else {
            pm.kind = MapKind::Winding;
            std::uniform_int_distribution<int> ld(-2, 2);
            pm.ell = ld(g);
            pm.phi = rand_pl(g, Y, maxbp, 8, 0, 1);
            pm.c = rand_q(g, 8, 0, 1);
        }
        p.maps.push_back(pm);
    }
    return p;
}

// Independent oracle for d_cu: candidate values are the distances between eigenvalues
// at all parameters where the combinatorics can change, and a candidate r passes when
// alpha(1_U) <= beta(1_{U_r}) and back, checked through apply_pattern/lsc_leq for the
// arcs tightly around runs of eigenvalues.
struct DcuOracle {
    EigenPattern P, Qp;
    bool circle;
    std::vector<Rational> ys;
    std::vector<Rational> cands;

    DcuOracle(const EigenPattern& a, const EigenPattern& b) : P(a), Qp(b), circle(a.X == Space::Circle) {
        auto A = pattern_lifts(P), B = pattern_lifts(Qp);
        std::vector<Lift> all = A;
        all.insert(all.end(), B.begin(), B.end());
        std::vector<Rational> y{0, 1};
        for (auto& l : all)
            for (auto& t : l.f.breakpoints()) y.push_back(t);
        auto hits = [&](const PLFunction& d) {
            auto& p = d.points();
            for (size_t i = 0; i + 1 < p.size(); ++i) {
                Rational v0 = p[i].v, v1 = p[i + 1].v;
                if (v0 == v1) continue;
                Rational lo = qmin(v0, v1), hi = qmax(v0, v1);
                mpz_class m0 = circle ? qceil(lo) : mpz_class(0), m1 = circle ? qfloor(hi) : mpz_class(0);
                for (mpz_class m = m0; m <= m1; ++m) {
                    Rational c(m);
                    if (c < lo || c > hi) continue;
                    y.push_back(p[i].t + (c - v0) * (p[i + 1].t - p[i].t) / (v1 - v0));
                }
            }
        };
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = i + 1; j < all.size(); ++j) hits(all[i].f - all[j].f);
        if (circle) {
            // a_i + a_k = b_j + b_l mod 1: where the best cyclic shift can peak inside a cell
            std::vector<PLFunction> sa, sb;
            for (size_t i = 0; i < A.size(); ++i)
                for (size_t k = i; k < A.size(); ++k) sa.push_back(A[i].f + A[k].f);
            for (size_t j = 0; j < B.size(); ++j)
                for (size_t l = j; l < B.size(); ++l) sb.push_back(B[j].f + B[l].f);
            for (auto& s : sa)
                for (auto& t : sb) hits(s - t);
        }
        for (auto& v : y)
            if (v >= 0 && v <= 1) ys.push_back(v);
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        std::set<Rational> c{0};
        for (auto& t : ys)
            for (auto& a : A)
                for (auto& b : B) {
                    Rational d = a.f.eval(t) - b.f.eval(t);
                    c.insert(circle ? circ_dist(d, 0) : qabs(d));
                }
        cands.assign(c.begin(), c.end());
    }

    bool one_way(const EigenPattern& x, const EigenPattern& z, const Rational& r, const Rational& delta) const {
        auto L = pattern_lifts(x);
        for (auto& t : ys) {
            std::vector<Rational> v;
            for (auto& l : L) v.push_back(circle ? frac(l.f.eval(t)) : l.f.eval(t));
            for (auto& p : v)
                for (auto& q : v) {
                    Rational a = p - delta, b = q + delta;
                    if (circle && q < p) b += 1;
                    if (!circle && q < p) continue;
                    OpenSet U = OpenSet::arc(x.X, a, b);
                    if (!lsc_leq(apply_pattern(x, indicator(U)), apply_pattern(z, indicator(open_fatten(U, r)))))
                        return false;
                }
        }
        return true;
    }

    bool passes(const Rational& r, const Rational& delta) const {
        return one_way(P, Qp, r, delta) && one_way(Qp, P, r, delta);
    }

    Rational delta() const {
        Rational g = 1;
        for (size_t i = 0; i + 1 < cands.size(); ++i) g = qmin(g, cands[i + 1] - cands[i]);
        return g / 8;
    }

    // Confirms that `value` is the least passing candidate.
    bool confirms(const Rational& value) const {
        auto it = std::find(cands.begin(), cands.end(), value);
        if (it == cands.end()) return false;
        Rational d = delta();
        if (!passes(value, d)) return false;
        if (it == cands.begin()) return true;
        return !passes(*(it - 1), d);
    }
};

// periodic PL function on the circle with values in [lo, hi]
inline PLFunction rand_periodic(Rng& g, int maxbp, long den, long lo, long hi) {
    auto f = rand_pl(g, Space::Interval, maxbp, den, lo, hi);
    auto pts = f.points();
    pts.back().v = pts.front().v;
    return PLFunction(Space::Circle, pts, 0);
}

// (f, g, C, D, C', D') with equal K1 parts and ||h_1|| <= 1 for the basis change C -> C'
struct NTConfig {
    NTMorphism f, g;
    NTBasis C, D, Cp, Dp;
};

inline NTConfig rand_nt_config(Rng& g) {
    NTConfig c;
    std::uniform_int_distribution<int> coin(0, 1);
    Space Y = coin(g) ? Space::Circle : Space::Interval;
    std::uniform_int_distribution<long> td(1, 3);
    long N = td(g);
    auto draw = [&]() {
        NTMorphism m;
        m.pat = rand_pattern(g, Space::Circle, Y, N, 3);
        return m;
    };
    c.f = draw();
    c.g = draw();
    for (int tries = 0; tries < 50 && k1_map(c.g) != k1_map(c.f); ++tries) c.g = draw();
    if (k1_map(c.g) != k1_map(c.f)) {
        c.g = c.f;
        for (auto& m : c.g.pat.maps)
            if (m.kind != MapKind::PL) m.c += Q(1, 5);
    }
    K0Image k0 = coin(g) ? K0Image::all() : K0Image::lattice(Q(1, N));
    c.f.dst_k0 = c.g.dst_k0 = k0;
    c.C = perturbed(canonical_basis(Space::Circle), rand_periodic(g, 3, 8, -1, 1).scaled(Q(1, 2)));
    c.Cp = perturbed(c.C, rand_periodic(g, 4, 8, -1, 1));
    if (Y == Space::Circle) {
        c.D = perturbed(canonical_basis(Space::Circle, N), rand_periodic(g, 3, 4, -2, 2));
        c.Dp = perturbed(canonical_basis(Space::Circle, N), rand_periodic(g, 3, 4, -2, 2));
    } else {
        c.D = c.Dp = trivial_basis(Y, N);
    }
    return c;
}

}  // namespace ntcu::testing
