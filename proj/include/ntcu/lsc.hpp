#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace ntcu {

using NVal = std::int64_t;
constexpr NVal kInf = std::numeric_limits<NVal>::max();

inline NVal nadd(NVal a, NVal b) {
    if (a == kInf || b == kInf) return kInf;
    return a + b;
}

inline std::string nval_str(NVal v) { return v == kInf ? "inf" : std::to_string(v); }

// Lower semicontinuous step function X -> N ∪ {∞}.
// Interval: cuts run from 0 to 1, piece[i] is the value on (cuts[i], cuts[i+1]).
// Circle: cuts lie in [0,1), piece[i] is the value on (cuts[i], cuts[i+1]) read
// cyclically; no cuts means a constant. Point: one piece, no cuts.
// at[i] is the value at cuts[i] and never exceeds the neighbouring pieces.
class LscFunction {
public:
    LscFunction() : LscFunction(zero(Space::Interval)) {}

    LscFunction(Space s, std::vector<Rational> cuts, std::vector<NVal> piece, std::vector<NVal> at)
        : space_(s), cuts_(std::move(cuts)), piece_(std::move(piece)), at_(std::move(at)) {
        validate();
        canonicalize();
    }

    static LscFunction constant(Space s, NVal v) {
        if (s == Space::Interval) return LscFunction(s, {0, 1}, {v}, {v, v});
        return LscFunction(s, {}, {v}, {});
    }
    static LscFunction zero(Space s) { return constant(s, 0); }

    Space space() const { return space_; }
    const std::vector<Rational>& cuts() const { return cuts_; }
    const std::vector<NVal>& pieces() const { return piece_; }
    const std::vector<NVal>& at() const { return at_; }

    NVal eval(const Rational& x0) const {
        if (space_ == Space::Point) return piece_[0];
        Rational x = space_ == Space::Circle ? frac(x0) : x0;
        if (space_ == Space::Interval && (x < 0 || x > 1)) throw std::domain_error("point outside [0,1]");
        if (cuts_.empty()) return piece_[0];
        for (size_t i = 0; i < cuts_.size(); ++i)
            if (cuts_[i] == x) return at_[i];
        size_t np = piece_.size();
        for (size_t i = 0; i < np; ++i) {
            Rational lo = cuts_[i];
            Rational hi = i + 1 < cuts_.size() ? cuts_[i + 1] : Rational(cuts_[0] + 1);
            if (space_ == Space::Circle) {
                Rational y = x < lo ? Rational(x + 1) : x;
                if (lo < y && y < hi) return piece_[i];
            } else if (lo < x && x < hi) {
                return piece_[i];
            }
        }
        throw std::logic_error("lsc eval fell through");
    }

    // the same function on a finer set of cuts
    void refine(const std::vector<Rational>& fine, std::vector<NVal>& piece, std::vector<NVal>& at) const {
        piece.clear();
        at.clear();
        for (auto& c : fine) at.push_back(eval(c));
        size_t np = space_ == Space::Circle ? fine.size() : fine.size() - 1;
        for (size_t i = 0; i < np; ++i) {
            Rational hi = i + 1 < fine.size() ? fine[i + 1] : Rational(fine[0] + 1);
            piece.push_back(eval(Rational((fine[i] + hi) / 2)));
        }
        if (space_ == Space::Circle && fine.empty()) piece.push_back(piece_[0]);
    }

    // open level set {x >= k}
    OpenSet level_set(NVal k) const {
        if (k <= 0) return OpenSet::whole(space_);
        if (space_ == Space::Point) return piece_[0] >= k ? OpenSet::whole(space_) : OpenSet::empty(space_);
        if (cuts_.empty()) return piece_[0] >= k ? OpenSet::whole(space_) : OpenSet::empty(space_);
        std::vector<Arc> arcs;
        size_t np = piece_.size();
        for (size_t i = 0; i < np; ++i) {
            if (piece_[i] < k) continue;
            Rational lo = cuts_[i];
            Rational hi = i + 1 < cuts_.size() ? cuts_[i + 1] : Rational(cuts_[0] + 1);
            Arc a{lo, hi};
            if (space_ == Space::Interval) {
                if (i == 0 && at_[0] >= k) a.lclosed = true;
                if (i + 1 == np && at_.back() >= k) a.rclosed = true;
            }
            arcs.push_back(a);
        }
        std::vector<Arc> pts;
        for (size_t i = 0; i < cuts_.size(); ++i) {
            if (at_[i] < k) continue;
            if (space_ == Space::Interval && (i == 0 || i + 1 == cuts_.size())) continue;
            // lsc: a point in the level set has both neighbours in it; bridge them
            Rational e = cuts_[i];
            Rational lo = space_ == Space::Circle ? cuts_[(i + cuts_.size() - 1) % cuts_.size()] : cuts_[i - 1];
            if (space_ == Space::Circle && lo >= e) lo -= 1;
            pts.push_back({lo, space_ == Space::Circle && i + 1 >= cuts_.size() ? Rational(cuts_[0] + 1)
                                                                                : cuts_[i + 1]});
            if (space_ == Space::Circle && cuts_.size() == 1) return OpenSet::whole(space_);
        }
        arcs.insert(arcs.end(), pts.begin(), pts.end());
        return OpenSet(space_, arcs);
    }

    NVal max_value() const {
        NVal m = 0;
        for (auto v : piece_) m = std::max(m, v);
        for (auto v : at_) m = std::max(m, v);
        return m;
    }

    bool is_bounded() const { return max_value() != kInf; }

    friend bool operator==(const LscFunction& x, const LscFunction& y) {
        return x.space_ == y.space_ && x.cuts_ == y.cuts_ && x.piece_ == y.piece_ && x.at_ == y.at_;
    }

    std::string str() const {
        std::string s = std::string(space_name(space_)) + "[";
        if (cuts_.empty()) return s + nval_str(piece_[0]) + "]";
        for (size_t i = 0; i < cuts_.size(); ++i) {
            s += "@" + to_string(cuts_[i]) + "=" + nval_str(at_[i]);
            if (i < piece_.size()) s += " " + nval_str(piece_[i]) + " ";
        }
        return s + "]";
    }

    static std::vector<Rational> merged_cuts(const LscFunction& x, const LscFunction& y) {
        if (x.space_ != y.space_) throw TypeError("Lsc functions on different spaces");
        return PLFunction::merge_ts(x.cuts_, y.cuts_);
    }

private:
    Space space_ = Space::Interval;
    std::vector<Rational> cuts_;
    std::vector<NVal> piece_, at_;

    void validate() const {
        if (space_ == Space::Point) {
            if (piece_.size() != 1 || !cuts_.empty()) throw std::invalid_argument("point Lsc needs one value");
            return;
        }
        for (size_t i = 1; i < cuts_.size(); ++i)
            if (!(cuts_[i - 1] < cuts_[i])) throw std::invalid_argument("Lsc cuts not increasing");
        if (at_.size() != cuts_.size()) throw std::invalid_argument("Lsc needs one value per cut");
        if (space_ == Space::Interval) {
            if (cuts_.size() < 2 || cuts_.front() != 0 || cuts_.back() != 1)
                throw std::invalid_argument("interval Lsc cuts must start at 0 and end at 1");
            if (piece_.size() + 1 != cuts_.size()) throw std::invalid_argument("interval Lsc piece count");
        } else {
            if (!cuts_.empty() && (cuts_.front() < 0 || cuts_.back() >= 1))
                throw std::invalid_argument("circle Lsc cuts must lie in [0,1)");
            if (piece_.size() != std::max<size_t>(cuts_.size(), 1)) throw std::invalid_argument("circle Lsc piece count");
        }
        for (auto v : piece_)
            if (v < 0) throw std::invalid_argument("negative Lsc value");
        for (size_t i = 0; i < cuts_.size(); ++i) {
            NVal l, r;
            if (space_ == Space::Interval) {
                l = i > 0 ? piece_[i - 1] : kInf;
                r = i < piece_.size() ? piece_[i] : kInf;
            } else {
                l = piece_[(i + piece_.size() - 1) % piece_.size()];
                r = piece_[i];
            }
            if (at_[i] < 0 || at_[i] > std::min(l, r)) throw std::invalid_argument("not lower semicontinuous");
        }
    }

    void canonicalize() {
        if (space_ == Space::Point) return;
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < cuts_.size(); ++i) {
                if (space_ == Space::Interval) {
                    if (i == 0 || i + 1 == cuts_.size()) continue;
                    if (piece_[i - 1] == piece_[i] && at_[i] == piece_[i]) {
                        cuts_.erase(cuts_.begin() + i);
                        at_.erase(at_.begin() + i);
                        piece_.erase(piece_.begin() + i);
                        changed = true;
                        break;
                    }
                } else {
                    size_t n = cuts_.size();
                    size_t l = (i + n - 1) % n;
                    if (piece_[l] == piece_[i] && at_[i] == piece_[i]) {
                        cuts_.erase(cuts_.begin() + i);
                        at_.erase(at_.begin() + i);
                        if (n == 1) {
                            // constant; keep the single piece value
                        } else if (i == 0) {
                            // piece n-1 wraps onto piece 0; drop piece 0
                            piece_.erase(piece_.begin());
                        } else {
                            piece_.erase(piece_.begin() + i);
                        }
                        changed = true;
                        break;
                    }
                }
            }
        }
        if (space_ == Space::Circle && cuts_.empty()) piece_.resize(1);
    }
};

inline LscFunction indicator(const OpenSet& u) {
    Space s = u.space();
    if (s == Space::Point) return LscFunction::constant(s, u.is_full() ? 1 : 0);
    if (u.is_empty()) return LscFunction::zero(s);
    if (s == Space::Circle && u.is_full()) return LscFunction::constant(s, 1);
    std::vector<Rational> cuts;
    if (s == Space::Interval) cuts = {0, 1};
    for (auto& a : u.arcs()) {
        cuts.push_back(a.a);
        Rational b = s == Space::Circle ? frac(a.b) : a.b;
        cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<NVal> piece, at;
    for (auto& c : cuts) at.push_back(u.contains(c) ? 1 : 0);
    size_t np = s == Space::Circle ? cuts.size() : cuts.size() - 1;
    for (size_t i = 0; i < np; ++i) {
        Rational hi = i + 1 < cuts.size() ? cuts[i + 1] : Rational(cuts[0] + 1);
        piece.push_back(u.contains(Rational((cuts[i] + hi) / 2)) ? 1 : 0);
    }
    return LscFunction(s, cuts, piece, at);
}

namespace detail {
template <class Op>
LscFunction pointwise(const LscFunction& x, const LscFunction& y, Op op) {
    if (x.space() != y.space()) throw TypeError("Lsc functions on different spaces");
    if (x.space() == Space::Point) return LscFunction::constant(Space::Point, op(x.pieces()[0], y.pieces()[0]));
    auto cuts = LscFunction::merged_cuts(x, y);
    if (x.space() == Space::Circle && cuts.empty())
        return LscFunction::constant(Space::Circle, op(x.pieces()[0], y.pieces()[0]));
    std::vector<NVal> px, ax, py, ay;
    x.refine(cuts, px, ax);
    y.refine(cuts, py, ay);
    for (size_t i = 0; i < px.size(); ++i) px[i] = op(px[i], py[i]);
    for (size_t i = 0; i < ax.size(); ++i) ax[i] = op(ax[i], ay[i]);
    return LscFunction(x.space(), cuts, px, ax);
}
}  // namespace detail

inline LscFunction lsc_add(const LscFunction& x, const LscFunction& y) {
    return detail::pointwise(x, y, [](NVal a, NVal b) { return nadd(a, b); });
}

inline LscFunction lsc_max(const LscFunction& x, const LscFunction& y) {
    return detail::pointwise(x, y, [](NVal a, NVal b) { return std::max(a, b); });
}

inline LscFunction lsc_scale(NVal m, const LscFunction& x) {
    LscFunction r = LscFunction::zero(x.space());
    for (NVal i = 0; i < m; ++i) r = lsc_add(r, x);
    return r;
}

inline bool lsc_leq(const LscFunction& x, const LscFunction& y) {
    if (x.space() != y.space()) throw TypeError("Lsc functions on different spaces");
    if (x.space() == Space::Point) return x.pieces()[0] <= y.pieces()[0];
    auto cuts = LscFunction::merged_cuts(x, y);
    if (x.space() == Space::Circle && cuts.empty()) return x.pieces()[0] <= y.pieces()[0];
    std::vector<NVal> px, ax, py, ay;
    x.refine(cuts, px, ax);
    y.refine(cuts, py, ay);
    for (size_t i = 0; i < px.size(); ++i)
        if (px[i] > py[i]) return false;
    for (size_t i = 0; i < ax.size(); ++i)
        if (ax[i] > ay[i]) return false;
    return true;
}

// x << y: x bounded and closure{x >= k} inside {y >= k} for every level k
inline bool lsc_waybelow(const LscFunction& x, const LscFunction& y) {
    if (x.space() != y.space()) throw TypeError("Lsc functions on different spaces");
    if (!x.is_bounded()) return false;
    NVal top = x.max_value();
    for (NVal k = 1; k <= top; ++k)
        if (!closure_within(x.level_set(k), y.level_set(k))) return false;
    return true;
}

inline LscFunction lsc_sup(const std::vector<LscFunction>& chain) {
    if (chain.empty()) throw std::invalid_argument("empty chain");
    for (size_t i = 1; i < chain.size(); ++i)
        if (!lsc_leq(chain[i - 1], chain[i])) throw std::invalid_argument("chain is not increasing");
    LscFunction s = chain[0];
    for (size_t i = 1; i < chain.size(); ++i) s = lsc_max(s, chain[i]);
    return s;
}

// pointwise max of arbitrary elements (used to show sup of incomparable pairs)
inline LscFunction lsc_join(const LscFunction& x, const LscFunction& y) { return lsc_max(x, y); }

// Canonical approximation: level sets shrunk by 1/m, values capped at m.
inline LscFunction lsc_approx(const LscFunction& y, long m) {
    Space s = y.space();
    LscFunction r = LscFunction::zero(s);
    NVal top = y.max_value();
    NVal kmax = top == kInf ? m : std::min<NVal>(top, m);
    Rational e = Q(1, m);
    for (NVal k = 1; k <= kmax; ++k) {
        OpenSet u = y.level_set(k);
        if (u.is_empty()) break;
        if (u.is_full()) { r = lsc_add(r, indicator(u)); continue; }
        std::vector<Arc> shrunk;
        for (auto& a : u.arcs()) {
            Arc b = a;
            if (!(s == Space::Interval && a.lclosed)) b.a += e;
            if (!(s == Space::Interval && a.rclosed)) b.b -= e;
            if (b.a < b.b) {
                if (s == Space::Interval) {
                    b.lclosed = a.lclosed;
                    b.rclosed = a.rclosed;
                }
                shrunk.push_back(b);
            }
        }
        r = lsc_add(r, indicator(OpenSet(s, shrunk)));
    }
    return r;
}

}  // namespace ntcu
