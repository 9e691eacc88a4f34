#pragma once

#include <map>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace ntcu {

enum class K0Kind { AllConstants, LatticeConstants, Zero };

struct K0Image {
    K0Kind kind = K0Kind::AllConstants;
    Rational step = 0;

    static K0Image all() { return {K0Kind::AllConstants, 0}; }
    static K0Image zero() { return {K0Kind::Zero, 0}; }
    static K0Image lattice(const Rational& step) {
        if (step <= 0) throw std::invalid_argument("lattice step must be positive");
        return {K0Kind::LatticeConstants, step};
    }
    std::string str() const {
        switch (kind) {
            case K0Kind::AllConstants: return "constants";
            case K0Kind::LatticeConstants: return "lattice(" + to_string(step) + ")";
            default: return "zero";
        }
    }
};

enum class K1Tag { Zero, Z };

struct Block {
    Space base = Space::Interval;
    mpz_class size = 1;
    K1Tag k1 = K1Tag::Zero;
    K0Image k0 = K0Image::all();
};

inline Block make_block(Space base, const mpz_class& size, K0Image k0) {
    if (size < 1) throw std::invalid_argument("block size must be >= 1");
    return {base, size, base == Space::Circle ? K1Tag::Z : K1Tag::Zero, k0};
}

struct ModelAlgebra {
    std::vector<Block> blocks;
};

inline ModelAlgebra direct_sum(const ModelAlgebra& a, const ModelAlgebra& b) {
    ModelAlgebra s = a;
    s.blocks.insert(s.blocks.end(), b.blocks.begin(), b.blocks.end());
    return s;
}

struct Entry {
    PLFunction f;
    long mult = 1;
};

// diagonal field over one block: unitary phases (lifts) or positive values
struct DiagField {
    Space base = Space::Interval;
    std::vector<Entry> entries;

    long total() const {
        long n = 0;
        for (auto& e : entries) n += e.mult;
        return n;
    }
    // sum of mult * winding, the K1 class of a unitary over the circle
    long winding() const {
        long w = 0;
        for (auto& e : entries) w += e.mult * e.f.winding();
        return w;
    }
    void add(const PLFunction& f, long mult = 1) {
        if (mult <= 0) return;
        if (f.space() != base) throw TypeError("entry on a different base space");
        for (auto& e : entries)
            if (e.f == f) { e.mult += mult; return; }
        entries.push_back({f, mult});
    }
    void add_all(const DiagField& o, long times = 1) {
        for (auto& e : o.entries) add(e.f, e.mult * times);
    }
    DiagField adjoint() const {
        DiagField d{base, {}};
        for (auto& e : entries) d.add(e.f.negated(), e.mult);
        return d;
    }
};

using UnitaryField = DiagField;
using PositiveField = DiagField;

inline UnitaryField diag_sum(const UnitaryField& u, const UnitaryField& v) {
    if (u.base != v.base) throw TypeError("diagonal sum over different bases");
    UnitaryField w = u;
    w.add_all(v);
    return w;
}

// the trace of the phase data as an honest function on [0,1]; on the circle the
// result is reported on the interval lift (a nonzero class has no periodic mean)
inline PLFunction trace_sum(const DiagField& u) {
    Space s = u.base == Space::Circle ? Space::Interval : u.base;
    PLFunction acc = PLFunction::constant(s, 0);
    for (auto& e : u.entries) {
        PLFunction g = e.f;
        if (g.space() == Space::Circle) g = PLFunction(Space::Interval, g.points());
        acc = acc + g.scaled(e.mult);
    }
    return acc;
}

inline PLFunction normalized_trace(const DiagField& u) {
    long n = u.total();
    if (n == 0) throw std::invalid_argument("empty field");
    return trace_sum(u).scaled(Q(1, n));
}

// closed arcs of the circle (points allowed), merged
struct ClosedArcs {
    bool full = false;
    std::vector<std::pair<Rational, Rational>> arcs;  // a in [0,1), a <= b < a + 1

    std::string str() const {
        if (full) return "full";
        std::string s;
        for (auto& [a, b] : arcs) s += (s.empty() ? "" : " u ") + ("[" + to_string(a) + "," + to_string(b) + "]");
        return s.empty() ? "empty" : s;
    }
    friend bool operator==(const ClosedArcs& x, const ClosedArcs& y) { return x.full == y.full && x.arcs == y.arcs; }
};

inline ClosedArcs merge_closed(std::vector<std::pair<Rational, Rational>> in) {
    ClosedArcs out;
    for (auto& [a, b] : in)
        if (b - a >= 1) { out.full = true; return out; }
    for (auto& p : in) {
        Rational s = frac(p.first);
        p.second = s + (p.second - p.first);
        p.first = s;
    }
    std::sort(in.begin(), in.end());
    for (auto& p : in) {
        if (!out.arcs.empty() && p.first <= out.arcs.back().second)
            out.arcs.back().second = qmax(out.arcs.back().second, p.second);
        else
            out.arcs.push_back(p);
    }
    while (out.arcs.size() > 1 && out.arcs.back().second >= out.arcs.front().first + 1) {
        out.arcs.back().second = qmax(out.arcs.back().second, Rational(out.arcs.front().second + 1));
        out.arcs.erase(out.arcs.begin());
    }
    if (!out.arcs.empty() && out.arcs.back().second - out.arcs.back().first >= 1) {
        out.full = true;
        out.arcs.clear();
    }
    return out;
}

inline ClosedArcs spectrum_arcs(const UnitaryField& u) {
    std::vector<std::pair<Rational, Rational>> in;
    for (auto& e : u.entries) {
        auto& p = e.f.points();
        for (size_t i = 0; i + 1 < p.size(); ++i)
            in.push_back({qmin(p[i].v, p[i + 1].v), qmax(p[i].v, p[i + 1].v)});
        if (p.size() == 1 || e.f.space() == Space::Point) in.push_back({p[0].v, p[0].v});
    }
    return merge_closed(in);
}

inline UnitaryField rotate(const UnitaryField& u, const Rational& c) {
    UnitaryField v{u.base, {}};
    for (auto& e : u.entries) v.add(e.f.shifted(c), e.mult);
    return v;
}

}  // namespace ntcu
