#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pattern.hpp"

namespace ntcu {

struct DcuOptions {
    double event_cap = 40000;  // above this many pairwise events use the certified decoupled method
    long window_cap = 48;      // cyclic shifts examined per cell before splitting it
    int max_depth = 30;
    int certify_rounds = 12;
};

struct DcuResult {
    Rational value = 0;
    bool exact = true;
    Rational upper = 0;  // equals value when exact
    Rational witness_y = 0;
    long symmetry = 1;
    std::string method = "cells";
};

namespace mt {

using i128 = __int128;

inline long fdiv(i128 x, i128 one) {
    i128 q = x / one;
    if ((x % one != 0) && ((x < 0) != (one < 0))) --q;
    return (long)q;
}
inline long fdiv(const Rational& x, const Rational& one) { return qfloor(Rational(x / one)).get_si(); }

// bottleneck matching cost between equal-size sorted multisets on a line
template <class T>
T bottleneck_line(const std::vector<T>& a, const std::vector<T>& b) {
    T c = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        T d = a[i] > b[i] ? T(a[i] - b[i]) : T(b[i] - a[i]);
        if (d > c) c = d;
    }
    return c;
}

// same on the circle R/(one)Z; a and b sorted in [0, one)
template <class T>
T bottleneck_circle(const std::vector<T>& a, const std::vector<T>& b, const T& one) {
    long n = (long)a.size();
    if (n == 0) return 0;
    auto bt = [&](long j) -> T {
        long q = j >= 0 ? j / n : -((-j + n - 1) / n);
        return b[j - q * n] + T(one * q);
    };
    auto P = [&](long k) {
        T m = a[0] - bt(k);
        for (long i = 1; i < n; ++i) {
            T v = a[i] - bt(i + k);
            if (v > m) m = v;
        }
        return m;
    };
    auto M = [&](long k) {
        T m = bt(k) - a[0];
        for (long i = 1; i < n; ++i) {
            T v = bt(i + k) - a[i];
            if (v > m) m = v;
        }
        return m;
    };
    long lo = -n - 1, hi = n + 1;  // M(lo) < P(lo), M(hi) >= P(hi)
    while (hi - lo > 1) {
        long mid = lo + (hi - lo) / 2;
        if (M(mid) >= P(mid)) hi = mid;
        else lo = mid;
    }
    T c1 = M(hi), p1 = P(hi);
    T x = c1 > p1 ? c1 : p1;
    T c0 = M(hi - 1), p0 = P(hi - 1);
    T y = c0 > p0 ? c0 : p0;
    return x < y ? x : y;
}

// Hall condition for matching a into b within closed distance rho, where only
// the points bs of b are known (the rest of b may sit anywhere). Checks every
// run of consecutive a-points whose rho-neighbourhood is not everything; runs
// whose neighbourhood is everything are fine because |a| <= |b|.
template <class T>
bool hall_ok(bool circle, const std::vector<T>& a, const std::vector<T>& bs, const T& rho, const T& one) {
    long n = (long)a.size(), m = (long)bs.size();
    if (n == 0) return true;
    auto cle = [&](const T& x) -> long {  // #bs with lifted position <= x
        if (!circle) return (long)(std::upper_bound(bs.begin(), bs.end(), x) - bs.begin());
        long q = fdiv(x, one);
        T r = x - T(one * q);
        return (long)q * m + (long)(std::upper_bound(bs.begin(), bs.end(), r) - bs.begin());
    };
    auto clt = [&](const T& x) -> long {
        if (!circle) return (long)(std::lower_bound(bs.begin(), bs.end(), x) - bs.begin());
        long q = fdiv(x, one);
        T r = x - T(one * q);
        return (long)q * m + (long)(std::lower_bound(bs.begin(), bs.end(), r) - bs.begin());
    };
    if (!circle) {
        std::vector<long> G(n);
        long star = n;
        for (long i = 0; i < n; ++i) {
            G[i] = clt(a[i] - rho) - i;
            if (star == n && a[i] > rho) star = i;
        }
        long best_all = std::numeric_limits<long>::min(), best_star = best_all;
        for (long j = 0; j < n; ++j) {
            best_all = std::max(best_all, G[j]);
            if (j >= star) best_star = std::max(best_star, G[j]);
            long H = cle(a[j] + rho) - j - 1;
            long g = a[j] + rho >= one ? best_star : best_all;
            if (g > H) return false;
        }
        return true;
    }
    T span = one - rho - rho;  // runs need a_j - a_i < span
    if (!(span > 0)) return true;
    auto at = [&](long j) -> T { return j < n ? a[j] : T(a[j - n] + one); };
    std::vector<long> G(n);
    for (long i = 0; i < n; ++i) G[i] = clt(a[i] - rho) - i;
    std::deque<long> dq;
    long left = 0, pushed = 0;
    for (long j = 0; j < 2 * n - 1; ++j) {
        while (pushed <= std::min(j, n - 1)) {
            while (!dq.empty() && G[dq.back()] <= G[pushed]) dq.pop_back();
            dq.push_back(pushed++);
        }
        long lo = std::max(0L, j - n + 1);
        while (left < lo || (left < pushed && !(at(j) - a[left] < span))) ++left;
        while (!dq.empty() && dq.front() < left) dq.pop_front();
        if (dq.empty()) continue;
        long H = cle(at(j) + rho) - j - 1;
        if (G[dq.front()] > H) return false;
    }
    return true;
}

// common-denominator scaling so the inner loops run on machine integers
struct Scaled {
    bool ok = false;
    mpz_class D = 1;
};

inline Scaled pick_scale(const std::vector<const std::vector<Rational>*>& groups, const Rational* extra = nullptr) {
    Scaled s;
    mpz_class D = 1, maxnum = 0;
    auto feed = [&](const Rational& r) {
        mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), r.get_den_mpz_t());
    };
    for (auto* g : groups)
        for (auto& r : *g) feed(r);
    if (extra) feed(*extra);
    if (mpz_sizeinbase(D.get_mpz_t(), 2) > 44) return s;
    auto grow = [&](const Rational& r) {
        mpz_class v = abs(r.get_num()) * (D / r.get_den());
        if (v > maxnum) maxnum = v;
    };
    for (auto* g : groups)
        for (auto& r : *g) grow(r);
    if (extra) grow(*extra);
    if (mpz_sizeinbase(maxnum.get_mpz_t(), 2) > 58) return s;
    s.ok = true;
    s.D = D;
    return s;
}

inline i128 to_i(const Rational& r, const mpz_class& D) {
    mpz_class v = r.get_num() * (D / r.get_den());
    return (i128)v.get_si();
}

inline std::vector<i128> to_i(const std::vector<Rational>& v, const mpz_class& D) {
    std::vector<i128> o;
    o.reserve(v.size());
    for (auto& r : v) o.push_back(to_i(r, D));
    return o;
}

inline Rational from_i(i128 x, const mpz_class& D) {
    Rational r(mpz_class((long)x), D);
    r.canonicalize();
    return r;
}

inline std::vector<Rational> positions(const std::vector<Lift>& L, const Rational& y, bool circle) {
    std::vector<Rational> p;
    for (auto& l : L) {
        Rational v = l.f.eval(y);
        if (circle) v = frac(v);
        for (long k = 0; k < l.mult; ++k) p.push_back(v);
    }
    std::sort(p.begin(), p.end());
    return p;
}

inline Rational point_cost(bool circle, std::vector<Rational> a, std::vector<Rational> b) {
    if (!std::is_sorted(a.begin(), a.end())) std::sort(a.begin(), a.end());
    if (!std::is_sorted(b.begin(), b.end())) std::sort(b.begin(), b.end());
    auto s = pick_scale({&a, &b});
    if (s.ok) {
        auto ai = to_i(a, s.D), bi = to_i(b, s.D);
        i128 one = to_i(Rational(1), s.D);
        return from_i(circle ? bottleneck_circle<i128>(ai, bi, one) : bottleneck_line<i128>(ai, bi), s.D);
    }
    return circle ? bottleneck_circle<Rational>(a, b, Rational(1)) : bottleneck_line<Rational>(a, b);
}

inline bool hall_at(bool circle, const std::vector<Rational>& a, const std::vector<Rational>& bs, const Rational& rho) {
    auto s = pick_scale({&a, &bs}, &rho);
    if (s.ok) {
        auto ai = to_i(a, s.D), bi = to_i(bs, s.D);
        return hall_ok<i128>(circle, ai, bi, to_i(rho, s.D), to_i(Rational(1), s.D));
    }
    return hall_ok<Rational>(circle, a, bs, rho, Rational(1));
}

// parameters where f - g hits one of the offsets (mod 1 when periodic)
inline void diff_hits(const PLFunction& f, const PLFunction& g, const std::vector<Rational>& offsets, bool periodic,
                      std::vector<Rational>& out) {
    PLFunction d = f - g;
    auto& p = d.points();
    for (size_t i = 0; i + 1 < p.size(); ++i)
        for (auto& c : offsets) detail::segment_hits(p[i].t, p[i].v, p[i + 1].t, p[i + 1].v, c, periodic, out);
}

inline double diff_estimate(const PLFunction& f, const PLFunction& g, bool periodic) {
    auto fp = f.points(), gp = g.points();
    double e = 0;
    auto ts = PLFunction::merge_ts(f.breakpoints(), g.breakpoints());
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        Rational dv = (f.eval(ts[i + 1]) - g.eval(ts[i + 1])) - (f.eval(ts[i]) - g.eval(ts[i]));
        e += periodic ? std::abs(dv.get_d()) + 1 : 1;
    }
    return e;
}

inline double total_variation(const PLFunction& f) {
    double e = 0;
    auto& p = f.points();
    for (size_t i = 0; i + 1 < p.size(); ++i) e += std::abs(Rational(p[i + 1].v - p[i].v).get_d());
    return e;
}

inline void sort_unique(std::vector<Rational>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline std::vector<Rational> with_midpoints(const std::vector<Rational>& ev) {
    std::vector<Rational> o;
    for (size_t i = 0; i < ev.size(); ++i) {
        o.push_back(ev[i]);
        if (i + 1 < ev.size()) o.push_back((ev[i] + ev[i + 1]) / 2);
    }
    return o;
}

inline std::vector<Rational> base_events(const std::vector<Lift>& A, const std::vector<Lift>& B) {
    std::vector<Rational> ev{0, 1};
    for (auto* S : {&A, &B})
        for (auto& l : *S)
            for (auto& t : l.f.breakpoints()) ev.push_back(t);
    return ev;
}

inline void pair_events(const std::vector<Lift>& S, const std::vector<Lift>& T2, bool same, const std::vector<Rational>& offs,
                        bool periodic, std::vector<Rational>& ev) {
    for (size_t i = 0; i < S.size(); ++i)
        for (size_t j = same ? i + 1 : 0; j < T2.size(); ++j) {
            if (S[i].f.is_constant() && T2[j].f.is_constant()) continue;
            diff_hits(S[i].f, T2[j].f, offs, periodic, ev);
        }
}

inline void clip01(std::vector<Rational>& ev) {
    std::vector<Rational> o;
    for (auto& y : ev)
        if (y >= 0 && y <= 1) o.push_back(y);
    ev.swap(o);
    sort_unique(ev);
}

// ----- cell sweep on the circle -------------------------------------------

struct Line {
    Rational c, s;  // c + s*tau on [0,1]
};

// upper envelope of lines on [0,1] as (breakpoints, active line per piece)
inline void envelope(std::vector<Line> ls, std::vector<Rational>& bps) {
    std::sort(ls.begin(), ls.end(), [](const Line& x, const Line& y) {
        if (x.s != y.s) return x.s < y.s;
        return x.c < y.c;
    });
    std::vector<Line> h;
    for (auto& l : ls) {
        if (!h.empty() && h.back().s == l.s) h.pop_back();
        while (h.size() >= 2) {
            auto& l1 = h[h.size() - 2];
            auto& l2 = h.back();
            // l2 useless if intersection(l1,l) <= intersection(l1,l2)
            Rational x13 = (l1.c - l.c) / (l.s - l1.s), x12 = (l1.c - l2.c) / (l2.s - l1.s);
            if (x13 <= x12) h.pop_back();
            else break;
        }
        h.push_back(l);
    }
    for (size_t i = 0; i + 1 < h.size(); ++i) {
        Rational x = (h[i].c - h[i + 1].c) / (h[i + 1].s - h[i].s);
        if (x > 0 && x < 1) bps.push_back(x);
    }
}

inline Rational env_eval(const std::vector<Line>& ls, const Rational& t) {
    Rational m = ls[0].c + ls[0].s * t;
    for (size_t i = 1; i < ls.size(); ++i) {
        Rational v = ls[i].c + ls[i].s * t;
        if (v > m) m = v;
    }
    return m;
}

// reduce a line family: keep the best flat line and the sloped ones that can beat it
template <class T>
std::vector<Line> prune_lines(const std::vector<T>& c, const std::vector<T>& s, const mpz_class& D,
                              const std::function<Rational(const T&)>& conv) {
    bool haveflat = false;
    T flat = 0;
    for (size_t i = 0; i < c.size(); ++i)
        if (s[i] == 0 && (!haveflat || c[i] > flat)) { flat = c[i]; haveflat = true; }
    std::vector<Line> out;
    if (haveflat) out.push_back({conv(flat), 0});
    for (size_t i = 0; i < c.size(); ++i) {
        if (s[i] == 0) continue;
        T top = s[i] > 0 ? T(c[i] + s[i]) : c[i];
        if (haveflat && !(top > flat)) continue;
        out.push_back({conv(c[i]), conv(s[i])});
    }
    (void)D;
    return out;
}

template <class T>
struct CellData {
    std::vector<T> a0, a1, b0, b1;  // sorted by midpoint value, lifted consistently
    T one;
    long n = 0;
    T bt0(long j) const { return shift(b0, j); }
    T bt1(long j) const { return shift(b1, j); }
    T shift(const std::vector<T>& b, long j) const {
        long q = j >= 0 ? j / n : -((-j + n - 1) / n);
        return b[j - q * n] + T(one * q);
    }
    // max over the cell endpoints of P_k and of M_k
    T Pmax(long k) const {
        T m = a0[0] - bt0(k);
        for (long i = 0; i < n; ++i) {
            T v0 = a0[i] - bt0(i + k), v1 = a1[i] - bt1(i + k);
            if (v0 > m) m = v0;
            if (v1 > m) m = v1;
        }
        return m;
    }
    T Mmax(long k) const {
        T m = bt0(k) - a0[0];
        for (long i = 0; i < n; ++i) {
            T v0 = bt0(i + k) - a0[i], v1 = bt1(i + k) - a1[i];
            if (v0 > m) m = v0;
            if (v1 > m) m = v1;
        }
        return m;
    }
};

struct Sweep {
    const std::vector<Lift>* A;
    const std::vector<Lift>* B;
    DcuOptions opt;
    Rational L = 0;
    Rational wy = 0;

    void raise(const Rational& v, const Rational& y) {
        if (v > L) { L = v; wy = y; }
    }

    Rational cost_at(const Rational& y) const {
        return point_cost(true, positions(*A, y, true), positions(*B, y, true));
    }

    template <class T>
    void cell_scan(const CellData<T>& cd, const Rational& y0, const Rational& y1, const mpz_class& D,
                   const std::function<Rational(const T&)>& conv, const std::function<T(const Rational&)>& floorL,
                   int depth) {
        long n = cd.n;
        T Lf = floorL(L);
        // K_hi: largest k with Pmax(k) > L ; K_lo: smallest k with Mmax(k+1) > L
        long lo = -2 * n - 2, hi = 2 * n + 2;
        if (!(cd.Pmax(lo) > Lf)) return;
        while (hi - lo > 1) {
            long mid = lo + (hi - lo) / 2;
            if (cd.Pmax(mid) > Lf) lo = mid;
            else hi = mid;
        }
        long Khi = lo;
        lo = -2 * n - 2, hi = 2 * n + 2;
        if (!(cd.Mmax(hi + 1) > Lf)) return;
        while (hi - lo > 1) {
            long mid = lo + (hi - lo) / 2;
            if (cd.Mmax(mid + 1) > Lf) hi = mid;
            else lo = mid;
        }
        long Klo = hi;
        if (Klo > Khi) return;
        if (Khi - Klo + 1 > opt.window_cap && depth < opt.max_depth) {
            split_ = true;
            return;
        }
        for (long k = Klo; k <= Khi; ++k) {
            std::vector<T> pc(n), ps(n), mc(n), ms(n);
            for (long i = 0; i < n; ++i) {
                T b0 = cd.bt0(i + k), b1 = cd.bt1(i + k);
                pc[i] = cd.a0[i] - b0;
                ps[i] = (cd.a1[i] - b1) - pc[i];
                T c0 = cd.bt0(i + k + 1), c1 = cd.bt1(i + k + 1);
                mc[i] = c0 - cd.a0[i];
                ms[i] = (c1 - cd.a1[i]) - mc[i];
            }
            auto PL = prune_lines<T>(pc, ps, D, conv);
            auto ML = prune_lines<T>(mc, ms, D, conv);
            std::vector<Rational> ts{0, 1};
            envelope(PL, ts);
            envelope(ML, ts);
            sort_unique(ts);
            // crossings of the two envelopes inside each piece
            std::vector<Rational> cand = ts;
            for (size_t i = 0; i + 1 < ts.size(); ++i) {
                Rational d0 = env_eval(PL, ts[i]) - env_eval(ML, ts[i]);
                Rational d1 = env_eval(PL, ts[i + 1]) - env_eval(ML, ts[i + 1]);
                if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) cand.push_back(ts[i] + (ts[i + 1] - ts[i]) * d0 / (d0 - d1));
            }
            for (auto& t : cand) {
                Rational h = qmin(env_eval(PL, t), env_eval(ML, t));
                Rational y = y0 + (y1 - y0) * t;
                raise(h, y);
            }
        }
    }

    bool split_ = false;

    void cell(const Rational& y0, const Rational& y1, int depth) {
        Rational ym = (y0 + y1) / 2;
        auto build = [&](const std::vector<Lift>& S, std::vector<Rational>& v0, std::vector<Rational>& v1) {
            std::vector<std::tuple<Rational, Rational, Rational>> rows;
            for (auto& l : S) {
                Rational m = l.f.eval(ym);
                Rational fl = Rational(qfloor(m));
                Rational p0 = l.f.eval(y0) - fl, p1 = l.f.eval(y1) - fl;
                for (long k = 0; k < l.mult; ++k) rows.emplace_back(m - fl, p0, p1);
            }
            std::sort(rows.begin(), rows.end());
            for (auto& [m, p0, p1] : rows) {
                v0.push_back(p0);
                v1.push_back(p1);
            }
        };
        std::vector<Rational> a0, a1, b0, b1;
        build(*A, a0, a1);
        build(*B, b0, b1);
        split_ = false;
        auto s = pick_scale({&a0, &a1, &b0, &b1});
        if (s.ok) {
            CellData<i128> cd;
            cd.a0 = to_i(a0, s.D), cd.a1 = to_i(a1, s.D), cd.b0 = to_i(b0, s.D), cd.b1 = to_i(b1, s.D);
            cd.one = to_i(Rational(1), s.D);
            cd.n = (long)a0.size();
            mpz_class D = s.D;
            cell_scan<i128>(
                cd, y0, y1, D, [&](const i128& x) { return from_i(x, D); },
                [&](const Rational& q) {
                    mpz_class f = qfloor(Rational(q * Rational(D)));
                    if (mpz_sizeinbase(f.get_mpz_t(), 2) > 60) return (i128)(f > 0 ? (1LL << 60) : -(1LL << 60));
                    return (i128)f.get_si();
                },
                depth);
        } else {
            CellData<Rational> cd;
            cd.a0 = a0, cd.a1 = a1, cd.b0 = b0, cd.b1 = b1;
            cd.one = 1;
            cd.n = (long)a0.size();
            cell_scan<Rational>(
                cd, y0, y1, mpz_class(1), [](const Rational& x) { return x; },
                [](const Rational& q) { return q; }, depth);
        }
        if (split_) {
            raise(cost_at(ym), ym);
            cell(y0, ym, depth + 1);
            cell(ym, y1, depth + 1);
        }
    }
};

// rotation symmetry: largest m with both multisets invariant under +1/m
struct SymReduced {
    long m = 1;
    std::vector<Lift> A, B;
};

inline bool invariant_under(const std::vector<Lift>& S, long m) {
    // group by shape (lift minus its value at 0); offsets mod 1 must be 1/m-periodic
    std::vector<std::pair<PLFunction, std::map<Rational, long>>> groups;
    for (auto& l : S) {
        Rational o = l.f.eval(0);
        PLFunction shape = l.f.shifted(-o);
        Rational off = frac(o);
        bool found = false;
        for (auto& g : groups)
            if (g.first == shape) { g.second[off] += l.mult; found = true; break; }
        if (!found) groups.push_back({shape, {{off, l.mult}}});
    }
    Rational step = Q(1, m);
    for (auto& [shape, offs] : groups)
        for (auto& [o, k] : offs) {
            auto it = offs.find(frac(Rational(o + step)));
            if (it == offs.end() || it->second != k) return false;
        }
    return true;
}

inline std::vector<Lift> quotient(const std::vector<Lift>& S, long m) {
    std::vector<Lift> out;
    Rational step = Q(1, m);
    for (auto& l : S) {
        Rational o = l.f.eval(0);
        Rational off = frac(o);
        if (off >= step) continue;  // one representative per orbit
        PLFunction g = l.f.shifted(off - o).scaled(m);
        bool merged = false;
        for (auto& e : out)
            if (e.f == g) { e.mult += l.mult; merged = true; break; }
        if (!merged) out.push_back({g, l.mult});
    }
    return out;
}

inline SymReduced reduce_symmetry(const std::vector<Lift>& A, const std::vector<Lift>& B) {
    SymReduced r{1, A, B};
    long N = 0;
    for (auto& l : A) N += l.mult;
    long g = 0;
    // candidate orders divide every shape-group size; the total is a safe superset
    for (long m = N; m >= 2; --m) {
        if (N % m) continue;
        if (invariant_under(A, m) && invariant_under(B, m)) {
            r.m = m;
            r.A = quotient(A, m);
            r.B = quotient(B, m);
            return r;
        }
        if (++g > 4096) break;
    }
    return r;
}

}  // namespace mt

inline DcuResult dcu_lifts(Space X, Space Y, const std::vector<Lift>& A0, const std::vector<Lift>& B0,
                           const DcuOptions& opt = {}) {
    long na = 0, nb = 0;
    for (auto& l : A0) na += l.mult;
    for (auto& l : B0) nb += l.mult;
    if (na != nb) throw std::invalid_argument("patterns with different total multiplicity are not supported");
    DcuResult res;
    if (X == Space::Point || na == 0) return res;
    bool circle = X == Space::Circle;
    if (Y == Space::Point) {
        res.value = res.upper = mt::point_cost(circle, mt::positions(A0, 0, circle), mt::positions(B0, 0, circle));
        res.method = "point";
        return res;
    }
    std::vector<Lift> A = A0, B = B0;
    long m = 1;
    if (circle) {
        auto r = mt::reduce_symmetry(A0, B0);
        m = r.m;
        A = r.A;
        B = r.B;
    }
    Rational inv_m = Q(1, m);
    auto scale_back = [&](DcuResult r) {
        r.value *= inv_m;
        r.upper *= inv_m;
        r.symmetry = m;
        return r;
    };
    std::vector<Rational> zero{0};
    double est = 0;
    for (auto* S : {&A, &B})
        for (size_t i = 0; i < S->size(); ++i)
            for (size_t j = i + 1; j < S->size(); ++j)
                if (!((*S)[i].f.is_constant() && (*S)[j].f.is_constant()))
                    est += mt::diff_estimate((*S)[i].f, (*S)[j].f, circle);

    auto cost = [&](const Rational& y) {
        return mt::point_cost(circle, mt::positions(A, y, circle), mt::positions(B, y, circle));
    };

    if (est <= opt.event_cap) {
        auto ev = mt::base_events(A, B);
        mt::pair_events(A, A, true, zero, circle, ev);
        mt::pair_events(B, B, true, zero, circle, ev);
        mt::clip01(ev);
        DcuResult r;
        Rational L = -1;
        for (auto& y : ev) {
            Rational c = cost(y);
            if (c > L) { L = c; r.witness_y = y; }
        }
        if (circle) {
            mt::Sweep sw{&A, &B, opt, L, r.witness_y};
            for (size_t i = 0; i + 1 < ev.size(); ++i) sw.cell(ev[i], ev[i + 1], 0);
            L = sw.L;
            r.witness_y = sw.wy;
        }
        r.value = r.upper = L;
        r.method = circle ? "cells" : "events";
        return scale_back(r);
    }

    // Decoupled: the fastest lifts are left free while locating a witness, then the
    // witness value is certified by an exact Hall check that ignores them.
    std::vector<std::pair<double, int>> order;  // (tv, side*100000+idx)
    for (size_t i = 0; i < A.size(); ++i) order.push_back({mt::total_variation(A[i].f), (int)i});
    for (size_t i = 0; i < B.size(); ++i) order.push_back({mt::total_variation(B[i].f), 1000000 + (int)i});
    std::sort(order.rbegin(), order.rend());
    std::vector<char> fastA(A.size(), 0), fastB(B.size(), 0);
    auto slow_est = [&]() {
        double e = 0;
        std::vector<const Lift*> s;
        for (size_t i = 0; i < A.size(); ++i)
            if (!fastA[i]) s.push_back(&A[i]);
        for (size_t i = 0; i < B.size(); ++i)
            if (!fastB[i]) s.push_back(&B[i]);
        for (size_t i = 0; i < s.size(); ++i)
            for (size_t j = i + 1; j < s.size(); ++j)
                if (!(s[i]->f.is_constant() && s[j]->f.is_constant())) e += 3 * mt::diff_estimate(s[i]->f, s[j]->f, circle);
        return e;
    };
    for (auto& [tv, code] : order) {
        if (slow_est() <= opt.event_cap) break;
        if (code >= 1000000) fastB[code - 1000000] = 1;
        else fastA[code] = 1;
    }
    bool anyA = std::count(fastA.begin(), fastA.end(), 1) > 0, anyB = std::count(fastB.begin(), fastB.end(), 1) > 0;
    if (anyA && anyB) throw std::runtime_error("fast maps on both sides; d_cu not available at this size");
    if (anyA) {
        auto r = dcu_lifts(X, Y, B0, A0, opt);
        return r;
    }
    std::vector<Lift> Bs, As = A;
    for (size_t i = 0; i < B.size(); ++i)
        if (!fastB[i]) Bs.push_back(B[i]);
    // witness search
    std::vector<Rational> ev = mt::base_events(As, Bs);
    mt::pair_events(As, As, true, zero, circle, ev);
    mt::pair_events(Bs, Bs, true, zero, circle, ev);
    mt::pair_events(As, Bs, false, zero, circle, ev);
    {
        std::vector<Rational> consts;
        for (auto* S : {&As, &Bs})
            for (auto& l : *S)
                if (l.f.is_constant()) consts.push_back(circle ? frac(l.f.eval(0)) : l.f.eval(0));
        mt::sort_unique(consts);
        std::vector<Rational> mids;
        for (size_t i = 0; i + 1 < consts.size(); ++i) mids.push_back((consts[i] + consts[i + 1]) / 2);
        if (circle && !consts.empty()) mids.push_back(frac(Rational((consts.back() + consts.front() + 1) / 2)));
        for (auto* S : {&As, &Bs})
            for (auto& l : *S) {
                if (l.f.is_constant()) continue;
                auto& p = l.f.points();
                for (size_t i = 0; i + 1 < p.size(); ++i)
                    for (auto& c : mids) detail::segment_hits(p[i].t, p[i].v, p[i + 1].t, p[i + 1].v, c, circle, ev);
            }
    }
    mt::clip01(ev);
    auto cand = mt::with_midpoints(ev);
    DcuResult r;
    r.method = "certified";
    Rational L = -1;
    for (auto& y : cand) {
        Rational c = cost(y);
        if (c > L) { L = c; r.witness_y = y; }
    }
    auto certify = [&](const Rational& rho, std::vector<Rational>& bad) {
        std::vector<Rational> ce = mt::base_events(As, Bs);
        std::vector<Rational> pm{rho, Rational(-rho)}, aa{0, Rational(2 * rho), Rational(-2 * rho)};
        mt::pair_events(As, Bs, false, pm, circle, ce);
        mt::pair_events(As, As, true, aa, circle, ce);
        if (!circle) {
            std::vector<Rational> bnd{rho, Rational(1 - rho)};
            for (auto& l : As) {
                auto& p = l.f.points();
                for (size_t i = 0; i + 1 < p.size(); ++i)
                    for (auto& c : bnd) detail::segment_hits(p[i].t, p[i].v, p[i + 1].t, p[i + 1].v, c, false, ce);
            }
        }
        mt::clip01(ce);
        bool ok = true;
        for (auto& y : mt::with_midpoints(ce)) {
            if (!mt::hall_at(circle, mt::positions(As, y, circle), mt::positions(Bs, y, circle), rho)) {
                ok = false;
                bad.push_back(y);
                if (bad.size() > 64) break;
            }
        }
        return ok;
    };
    for (int round = 0; round < opt.certify_rounds; ++round) {
        std::vector<Rational> bad;
        if (certify(L, bad)) {
            r.value = r.upper = L;
            return scale_back(r);
        }
        bool raised = false;
        for (auto& y : bad) {
            Rational c = cost(y);
            if (c > L) { L = c; r.witness_y = y; raised = true; }
        }
        if (!raised) break;
    }
    // the pessimistic check could not close the gap: report bounds
    r.value = L;
    r.exact = false;
    Rational hi = circle ? Q(1, 2) : Rational(1);
    Rational lo = L;
    for (int it = 0; it < 24; ++it) {
        Rational mid = (lo + hi) / 2;
        std::vector<Rational> bad;
        if (certify(mid, bad)) hi = mid;
        else lo = mid;
    }
    r.upper = hi;
    return scale_back(r);
}

inline DcuResult d_cu(const EigenPattern& P, const EigenPattern& Qp, const DcuOptions& opt = {}) {
    if (P.X != Qp.X || P.Y != Qp.Y) throw TypeError("patterns over different spaces");
    return dcu_lifts(P.X, P.Y, pattern_lifts(P), pattern_lifts(Qp), opt);
}

}  // namespace ntcu
