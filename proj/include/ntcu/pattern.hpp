#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "lsc.hpp"

namespace ntcu {

enum class MapKind { PL, Winding, Const };

inline const char* map_kind_name(MapKind k) {
    switch (k) {
        case MapKind::PL: return "pl";
        case MapKind::Winding: return "winding";
        default: return "const";
    }
}

// One eigenvalue map Y -> X with multiplicity.
//   PL:      y -> phi(y)
//   Winding: y -> ell*phi(y) + c  (read mod 1)
//   Const:   y -> c
struct PatternMap {
    MapKind kind = MapKind::Const;
    PLFunction phi;
    long ell = 1;
    Rational c = 0;
    long mult = 1;
};

struct EigenPattern {
    Space X = Space::Circle;
    Space Y = Space::Interval;
    std::vector<PatternMap> maps;

    long total() const {
        long n = 0;
        for (auto& m : maps) n += m.mult;
        return n;
    }
};

// the eigenvalue position as a PL function of y (a lift when X is the circle)
inline PLFunction map_lift(const PatternMap& m, Space Y) {
    switch (m.kind) {
        case MapKind::Const: return PLFunction::constant(Y, m.c);
        case MapKind::PL:
            if (m.phi.space() != Y) throw TypeError("map parameter space differs from codomain base");
            return m.phi;
        default:
            if (m.phi.space() != Y) throw TypeError("map parameter space differs from codomain base");
            return m.phi.scaled(m.ell).shifted(m.c);
    }
}

struct Lift {
    PLFunction f;
    long mult;
};

// strict order on PL functions, for merging equal lifts
struct PLLess {
    bool operator()(const PLFunction& f, const PLFunction& g) const {
        if (f.winding() != g.winding()) return f.winding() < g.winding();
        auto& a = f.points();
        auto& b = g.points();
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i].t != b[i].t) return a[i].t < b[i].t;
            if (a[i].v != b[i].v) return a[i].v < b[i].v;
        }
        return false;
    }
};

inline std::vector<Lift> pattern_lifts(const EigenPattern& p) {
    std::vector<Lift> out;
    std::map<PLFunction, size_t, PLLess> seen;
    for (auto& m : p.maps) {
        if (m.mult <= 0) throw std::invalid_argument("multiplicity must be positive");
        PLFunction f = map_lift(m, p.Y);
        if (p.X == Space::Interval) {
            auto [lo, hi] = f.range();
            if (lo < 0 || hi > 1) throw std::invalid_argument("interval-valued map leaves [0,1]");
            if (f.winding() != 0) throw std::invalid_argument("interval-valued map cannot wind");
        }
        auto [it, fresh] = seen.emplace(f, out.size());
        if (fresh) out.push_back({f, m.mult});
        else out[it->second].mult += m.mult;
    }
    return out;
}

inline void check_pattern(const EigenPattern& p) { (void)pattern_lifts(p); }

// z -> u for a unitary field u: each phase becomes a winding map
inline EigenPattern pattern_of_unitary(const UnitaryField& u) {
    EigenPattern p{Space::Circle, u.base, {}};
    for (auto& e : u.entries) p.maps.push_back({MapKind::Winding, e.f, 1, 0, e.mult});
    return p;
}

// K1 action: total signed winding of the eigenvalue maps around the circle
inline long pattern_k1(const EigenPattern& p) {
    if (p.X != Space::Circle || p.Y != Space::Circle) return 0;
    long w = 0;
    for (auto& l : pattern_lifts(p)) w += l.mult * l.f.winding();
    return w;
}

// the image of the unitary field u (over X) under the pattern: entries u(map(y))
inline UnitaryField push_unitary(const EigenPattern& p, const UnitaryField& u);

namespace detail {

// parameters y in [t0,t1] where the segment (t0,v0)-(t1,v1) hits c (mod 1 when periodic)
inline void segment_hits(const Rational& t0, const Rational& v0, const Rational& t1, const Rational& v1,
                         const Rational& c, bool periodic, std::vector<Rational>& out) {
    if (v0 == v1) return;  // constant pieces contribute their endpoints as cuts anyway
    Rational lo = qmin(v0, v1), hi = qmax(v0, v1);
    auto hit = [&](const Rational& x) { out.push_back(t0 + (x - v0) * (t1 - t0) / (v1 - v0)); };
    if (!periodic) {
        if (lo <= c && c <= hi) hit(c);
        return;
    }
    mpz_class m0 = qceil(Rational(lo - c)), m1 = qfloor(Rational(hi - c));
    for (mpz_class m = m0; m <= m1; ++m) hit(c + Rational(m));
}

inline std::vector<Rational> critical_params(const std::vector<Lift>& lifts, const std::vector<Rational>& targets,
                                             bool periodic, Space Y) {
    std::vector<Rational> ys;
    if (Y == Space::Interval) ys = {0, 1};
    if (Y == Space::Circle) ys = {0};
    for (auto& l : lifts) {
        auto& p = l.f.points();
        for (auto& b : p)
            if (Y != Space::Circle || b.t < 1) ys.push_back(b.t);
        for (size_t i = 0; i + 1 < p.size(); ++i)
            for (auto& c : targets) segment_hits(p[i].t, p[i].v, p[i + 1].t, p[i + 1].v, c, periodic, ys);
    }
    for (auto& y : ys)
        if (Y == Space::Circle && y >= 1) y -= 1;
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    return ys;
}

}  // namespace detail

inline LscFunction apply_pattern(const EigenPattern& p, const LscFunction& s) {
    if (s.space() != p.X) throw TypeError("Lsc function lives on a different space than the pattern domain");
    auto lifts = pattern_lifts(p);
    auto value_at = [&](const Rational& y) {
        NVal v = 0;
        for (auto& l : lifts) {
            NVal sv = s.eval(l.f.eval(y));
            for (long k = 0; k < l.mult; ++k) v = nadd(v, sv);
        }
        return v;
    };
    if (p.Y == Space::Point) return LscFunction::constant(Space::Point, value_at(0));
    auto ys = detail::critical_params(lifts, s.cuts(), p.X == Space::Circle, p.Y);
    std::vector<NVal> piece, at;
    for (auto& y : ys) at.push_back(value_at(y));
    size_t np = p.Y == Space::Circle ? ys.size() : ys.size() - 1;
    for (size_t i = 0; i < np; ++i) {
        Rational hi = i + 1 < ys.size() ? ys[i + 1] : Rational(ys[0] + 1);
        piece.push_back(value_at(Rational((ys[i] + hi) / 2)));
    }
    return LscFunction(p.Y, ys, piece, at);
}

inline UnitaryField push_unitary(const EigenPattern& p, const UnitaryField& u) {
    if (u.base != p.X) throw TypeError("unitary lives on a different space than the pattern domain");
    UnitaryField out{p.Y, {}};
    for (auto& l : pattern_lifts(p)) {
        for (auto& e : u.entries) {
            auto& fp = e.f.points();
            if (fp.size() == 2 && p.Y != Space::Point) {
                // affine entry: a + s x composed with the lift, no preimages needed
                Rational s = fp[1].v - fp[0].v;
                auto pts = l.f.points();
                for (auto& b : pts) b.v = fp[0].v + s * b.v;
                long w = p.Y == Space::Circle ? l.f.winding() * e.f.winding() : 0;
                out.add(PLFunction(p.Y, pts, w), l.mult * e.mult);
                continue;
            }
            // compose e.f (a lift over X) with the lift of the map; PL breakpoints are the
            // map breakpoints plus preimages of e.f's breakpoints
            std::vector<Rational> tg;
            for (auto& b : e.f.points()) tg.push_back(b.t);
            auto ys = detail::critical_params({l}, tg, p.X == Space::Circle, p.Y);
            if (p.Y == Space::Circle) ys.push_back(1);
            std::vector<Breakpoint> pts;
            for (auto& y : ys) pts.push_back({y, e.f.eval(l.f.eval(y))});
            long w = 0;
            if (p.Y == Space::Circle) w = (l.f.winding() * e.f.winding());
            if (p.Y == Space::Point) pts = {{0, pts.front().v}, {1, pts.front().v}};
            out.add(PLFunction(p.Y, pts, w), l.mult * e.mult);
        }
    }
    return out;
}

}  // namespace ntcu
