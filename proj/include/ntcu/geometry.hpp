#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace ntcu {

struct TypeError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class Space { Point, Interval, Circle };

inline const char* space_name(Space s) {
    switch (s) {
        case Space::Point: return "point";
        case Space::Interval: return "interval";
        case Space::Circle: return "circle";
    }
    return "?";
}

inline Space parse_space(const std::string& s) {
    if (s == "point") return Space::Point;
    if (s == "interval") return Space::Interval;
    if (s == "circle") return Space::Circle;
    throw std::invalid_argument("unknown space: " + s);
}

inline Rational space_dist(Space s, const Rational& a, const Rational& b) {
    if (s == Space::Circle) return circ_dist(a, b);
    if (s == Space::Point) return 0;
    return qabs(Rational(a - b));
}

struct Breakpoint {
    Rational t, v;
};

// Piecewise-linear real function on [0,1]. On the circle the parameter wraps and
// v(1) = v(0) + winding, so the function is a lift of a circle-valued phase.
class PLFunction {
public:
    PLFunction() : space_(Space::Interval), pts_{{0, 0}, {1, 0}}, winding_(0) {}

    PLFunction(Space space, std::vector<Breakpoint> pts, long winding = 0)
        : space_(space), pts_(std::move(pts)), winding_(winding) {
        validate();
        canonicalize();
    }

    static PLFunction constant(Space s, const Rational& v) {
        PLFunction f;
        f.space_ = s;
        f.pts_ = {{0, v}, {1, v}};
        f.winding_ = 0;
        return f;
    }

    // t -> a + b t; on the circle b must be an integer (the winding)
    static PLFunction linear(Space s, const Rational& a, const Rational& b) {
        long w = 0;
        if (s == Space::Circle) {
            if (b.get_den() != 1) throw std::invalid_argument("circle lift needs integer slope");
            w = b.get_num().get_si();
        }
        return PLFunction(s, {{0, a}, {1, Rational(a + b)}}, w);
    }

    Space space() const { return space_; }
    long winding() const { return winding_; }
    const std::vector<Breakpoint>& points() const { return pts_; }

    Rational eval(const Rational& t) const {
        if (space_ == Space::Point) return pts_.front().v;
        if (space_ == Space::Interval) {
            if (t < 0 || t > 1) throw std::domain_error("t outside [0,1]: " + to_string(t));
            return eval_unit(t);
        }
        mpz_class k = qfloor(t);
        Rational s = t - Rational(k);
        return eval_unit(s) + Rational(k * winding_);
    }

    std::pair<Rational, Rational> range() const {
        Rational lo = pts_.front().v, hi = lo;
        for (auto& p : pts_) {
            if (p.v < lo) lo = p.v;
            if (p.v > hi) hi = p.v;
        }
        return {lo, hi};
    }

    PLFunction scaled(const Rational& c) const {
        std::vector<Breakpoint> q = pts_;
        for (auto& p : q) p.v *= c;
        long w = 0;
        if (space_ == Space::Circle) {
            Rational cw = c * winding_;
            if (cw.get_den() != 1) throw std::invalid_argument("non-integer winding after scaling");
            w = cw.get_num().get_si();
        }
        return PLFunction(space_, std::move(q), w);
    }

    PLFunction negated() const { return scaled(-1); }

    PLFunction shifted(const Rational& c) const {
        std::vector<Breakpoint> q = pts_;
        for (auto& p : q) p.v += c;
        return PLFunction(space_, std::move(q), winding_);
    }

    friend PLFunction operator+(const PLFunction& f, const PLFunction& g) { return combine(f, g, 1); }
    friend PLFunction operator-(const PLFunction& f, const PLFunction& g) { return combine(f, g, -1); }

    friend bool operator==(const PLFunction& f, const PLFunction& g) {
        if (f.space_ != g.space_ || f.winding_ != g.winding_ || f.pts_.size() != g.pts_.size()) return false;
        for (size_t i = 0; i < f.pts_.size(); ++i)
            if (f.pts_[i].t != g.pts_[i].t || f.pts_[i].v != g.pts_[i].v) return false;
        return true;
    }

    bool is_constant() const {
        for (auto& p : pts_)
            if (p.v != pts_.front().v) return false;
        return true;
    }

    std::vector<Rational> breakpoints() const {
        std::vector<Rational> ts;
        for (auto& p : pts_) ts.push_back(p.t);
        return ts;
    }

    // merged refinement of two breakpoint sets
    static std::vector<Rational> merge_ts(const std::vector<Rational>& a, const std::vector<Rational>& b) {
        std::vector<Rational> m;
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
        m.erase(std::unique(m.begin(), m.end()), m.end());
        return m;
    }

private:
    Space space_ = Space::Interval;
    std::vector<Breakpoint> pts_;
    long winding_ = 0;

    Rational eval_unit(const Rational& t) const {
        auto it = std::lower_bound(pts_.begin(), pts_.end(), t,
                                   [](const Breakpoint& p, const Rational& x) { return p.t < x; });
        if (it == pts_.end()) return pts_.back().v;
        if (it->t == t) return it->v;
        auto lo = it - 1;
        Rational s = (t - lo->t) / (it->t - lo->t);
        return lo->v + s * (it->v - lo->v);
    }

    void validate() const {
        if (pts_.empty()) throw std::invalid_argument("PL function needs breakpoints");
        if (space_ == Space::Point) return;
        if (pts_.size() < 2 || pts_.front().t != 0 || pts_.back().t != 1)
            throw std::invalid_argument("PL breakpoints must cover [0,1]");
        for (size_t i = 1; i < pts_.size(); ++i)
            if (!(pts_[i - 1].t < pts_[i].t)) throw std::invalid_argument("PL breakpoints not increasing");
        if (space_ == Space::Circle) {
            if (pts_.back().v != pts_.front().v + winding_)
                throw std::invalid_argument("circle lift: v(1) must equal v(0) + winding");
        } else if (winding_ != 0) {
            throw std::invalid_argument("winding only on the circle");
        }
    }

    void canonicalize() {
        if (space_ == Space::Point) {
            pts_ = {{0, pts_.front().v}, {1, pts_.front().v}};
            return;
        }
        std::vector<Breakpoint> out;
        for (auto& p : pts_) {
            while (out.size() >= 2) {
                auto& a = out[out.size() - 2];
                auto& b = out.back();
                // drop b when collinear with a and p
                if ((b.v - a.v) * (p.t - a.t) == (p.v - a.v) * (b.t - a.t))
                    out.pop_back();
                else
                    break;
            }
            out.push_back(p);
        }
        pts_ = std::move(out);
    }

    static PLFunction combine(const PLFunction& f, const PLFunction& g, int sign) {
        if (f.space_ != g.space_) throw TypeError("PL arithmetic across different spaces");
        auto ts = merge_ts(f.breakpoints(), g.breakpoints());
        std::vector<Breakpoint> q;
        for (auto& t : ts) q.push_back({t, sign > 0 ? Rational(f.eval_unit(t) + g.eval_unit(t))
                                                    : Rational(f.eval_unit(t) - g.eval_unit(t))});
        return PLFunction(f.space_, std::move(q), f.winding_ + sign * g.winding_);
    }
};

// One component of an open set. On the interval, lclosed/rclosed mark a component
// that contains the endpoint 0 or 1 (relatively open). On the circle a <= b may
// exceed 1 (wrapping) and b - a <= 1; b - a == 1 is the circle minus one point.
struct Arc {
    Rational a, b;
    bool lclosed = false, rclosed = false;
};

class OpenSet {
public:
    OpenSet() = default;
    OpenSet(Space s, std::vector<Arc> arcs, bool full = false) : space_(s), arcs_(std::move(arcs)), full_(full) {
        canonicalize();
    }

    static OpenSet empty(Space s) { return OpenSet(s, {}); }
    static OpenSet whole(Space s) {
        if (s == Space::Interval) return OpenSet(s, {{0, 1, true, true}});
        return OpenSet(s, {}, true);
    }
    static OpenSet arc(Space s, const Rational& a, const Rational& b) { return OpenSet(s, {{a, b}}); }

    Space space() const { return space_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    bool is_full() const {
        if (space_ == Space::Interval)
            return arcs_.size() == 1 && arcs_[0].lclosed && arcs_[0].rclosed;
        return full_;
    }
    bool is_empty() const { return !full_ && arcs_.empty(); }

    bool contains(const Rational& x) const {
        if (full_) return true;
        if (space_ == Space::Point) return false;
        for (auto& c : arcs_) {
            if (space_ == Space::Interval) {
                if ((c.a < x || (c.lclosed && x == c.a)) && (x < c.b || (c.rclosed && x == c.b))) return true;
            } else {
                Rational y = frac(x - c.a);
                if (y > 0 && y < c.b - c.a) return true;
            }
        }
        return false;
    }

    Rational measure() const {
        if (full_) return 1;
        Rational m = 0;
        for (auto& c : arcs_) m += c.b - c.a;
        return m;
    }

    friend bool operator==(const OpenSet& u, const OpenSet& v) {
        if (u.space_ != v.space_ || u.full_ != v.full_ || u.arcs_.size() != v.arcs_.size()) return false;
        for (size_t i = 0; i < u.arcs_.size(); ++i) {
            auto &x = u.arcs_[i], &y = v.arcs_[i];
            if (x.a != y.a || x.b != y.b || x.lclosed != y.lclosed || x.rclosed != y.rclosed) return false;
        }
        return true;
    }

    OpenSet united(const OpenSet& o) const {
        if (o.space_ != space_) throw TypeError("open sets on different spaces");
        if (full_ || o.full_) return whole(space_);
        std::vector<Arc> all = arcs_;
        all.insert(all.end(), o.arcs_.begin(), o.arcs_.end());
        return OpenSet(space_, all);
    }

    std::string str() const {
        if (full_) return std::string(space_name(space_)) + ":full";
        std::string s = std::string(space_name(space_)) + ":{";
        for (size_t i = 0; i < arcs_.size(); ++i) {
            auto& c = arcs_[i];
            s += (i ? "," : "");
            s += (c.lclosed ? "[" : "(") + to_string(c.a) + "," + to_string(c.b) + (c.rclosed ? "]" : ")");
        }
        return s + "}";
    }

private:
    Space space_ = Space::Interval;
    std::vector<Arc> arcs_;
    bool full_ = false;

    void canonicalize() {
        if (space_ == Space::Point) {
            if (!arcs_.empty()) full_ = true;
            arcs_.clear();
            return;
        }
        if (full_) {
            arcs_.clear();
            if (space_ == Space::Interval) {
                arcs_ = {{0, 1, true, true}};
                full_ = false;
            }
            return;
        }
        if (space_ == Space::Interval) canon_interval();
        else canon_circle();
    }

    void canon_interval() {
        std::vector<Arc> in;
        for (auto c : arcs_) {
            if (c.a < 0) { c.a = 0; c.lclosed = true; }
            if (c.b > 1) { c.b = 1; c.rclosed = true; }
            if (c.a != 0) c.lclosed = false;
            if (c.b != 1) c.rclosed = false;
            if (c.a < c.b) in.push_back(c);
        }
        std::sort(in.begin(), in.end(), [](const Arc& x, const Arc& y) {
            if (x.a != y.a) return x.a < y.a;
            return x.lclosed && !y.lclosed;
        });
        std::vector<Arc> out;
        for (auto& c : in) {
            if (!out.empty() && c.a < out.back().b) {
                auto& l = out.back();
                if (c.b > l.b || (c.b == l.b && c.rclosed)) { l.b = c.b; l.rclosed = c.rclosed; }
            } else {
                out.push_back(c);
            }
        }
        arcs_ = std::move(out);
    }

    void canon_circle() {
        std::vector<Arc> in;
        for (auto c : arcs_) {
            if (!(c.a < c.b)) continue;
            if (c.b - c.a > 1) { full_ = true; arcs_.clear(); return; }
            Rational s = frac(c.a);
            Rational len = c.b - c.a;
            in.push_back({s, Rational(s + len)});
        }
        if (in.empty()) { arcs_.clear(); return; }
        std::sort(in.begin(), in.end(), [](const Arc& x, const Arc& y) { return x.a < y.a; });
        std::vector<Arc> out;
        for (auto& c : in) {
            if (!out.empty() && c.a < out.back().b) {
                if (c.b > out.back().b) out.back().b = c.b;
            } else {
                out.push_back(c);
            }
        }
        // wrap: the last arc may run past 1 into the first ones
        while (out.size() > 1 && out.back().b > out.front().a + 1) {
            Rational nb = qmax(out.back().b, Rational(out.front().b + 1));
            out.back().b = nb;
            out.erase(out.begin());
        }
        if (out.size() == 1 && out[0].b - out[0].a > 1) { full_ = true; arcs_.clear(); return; }
        arcs_ = std::move(out);
    }
};

// U_r := union of open r-balls around points of U; U_0 is U itself.
inline OpenSet open_fatten(const OpenSet& u, const Rational& r) {
    if (r < 0) throw std::invalid_argument("negative fattening radius");
    if (r == 0 || u.is_empty() || u.is_full()) return u;
    if (u.space() == Space::Point) return u;
    std::vector<Arc> grown;
    for (auto& c : u.arcs()) {
        Arc g{Rational(c.a - r), Rational(c.b + r), c.lclosed, c.rclosed};
        grown.push_back(g);
    }
    return OpenSet(u.space(), grown);
}

// closure(u) contained in v
inline bool closure_within(const OpenSet& u, const OpenSet& v) {
    if (u.space() != v.space()) throw TypeError("open sets on different spaces");
    if (u.is_empty()) return true;
    if (v.is_full()) return true;
    if (u.space() == Space::Point) return !v.is_empty() || u.is_empty();
    if (u.is_full()) return false;
    for (auto& c : u.arcs()) {
        bool ok = false;
        for (auto& d : v.arcs()) {
            if (u.space() == Space::Interval) {
                bool left = d.a < c.a || (d.a == c.a && d.lclosed);
                bool right = c.b < d.b || (c.b == d.b && d.rclosed);
                if (left && right) { ok = true; break; }
            } else {
                // closed arc [c.a, c.b] inside open arc (d.a, d.b) mod 1
                Rational s = frac(c.a - d.a);
                if (s > 0 && s + (c.b - c.a) < d.b - d.a) { ok = true; break; }
            }
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace ntcu
