#pragma once
// Determinants of diagonal unitary fields, H-classes and quotient norms.

#include <cmath>
#include <complex>
#include <functional>

#include "algebra.hpp"

namespace ntcu {

// class of a real affine function modulo the closure of the K0 image
struct HClass {
    PLFunction rep;
    K0Image k0;
};

inline HClass operator+(const HClass& a, const HClass& b) { return {a.rep + b.rep, a.k0}; }
inline HClass operator-(const HClass& a, const HClass& b) { return {a.rep - b.rep, a.k0}; }
inline HClass operator-(const HClass& a) { return {a.rep.negated(), a.k0}; }

// Sum of mult * phase, divided by the block size n. Diagonal sums add, so stacked
// copies of a generator contribute additively (the trace is tau (x) Tr).
inline PLFunction det_hat(const UnitaryField& u, long n = 0) {
    if (n == 0) n = u.total();
    if (n <= 0) throw std::invalid_argument("empty unitary field");
    return trace_sum(u).scaled(Q(1, n));
}

inline HClass det_bar(const UnitaryField& u, const K0Image& k0, long n = 0) { return {det_hat(u, n), k0}; }

inline Rational sup_norm(const PLFunction& f) {
    auto [lo, hi] = f.range();
    return qmax(qabs(lo), qabs(hi));
}

inline Rational h_norm(const HClass& x) {
    auto [lo, hi] = x.rep.range();
    switch (x.k0.kind) {
        case K0Kind::AllConstants: return (hi - lo) / 2;
        case K0Kind::Zero: return qmax(qabs(lo), qabs(hi));
        default: {
            const Rational& c = x.k0.step;
            mpz_class k0 = qfloor(Rational(lo / c)) - 1, k1 = qceil(Rational(hi / c)) + 1;
            Rational best = -1;
            for (mpz_class k = k0; k <= k1; ++k) {
                Rational p = Rational(k) * c;
                Rational v = qmax(Rational(hi - p), Rational(p - lo));
                if (best < 0 || v < best) best = v;
            }
            return best;
        }
    }
}

inline bool h_is_zero(const HClass& x) { return h_norm(x) == 0; }
inline bool h_equal(const HClass& a, const HClass& b) { return h_is_zero(a - b); }

// Nielsen-Thomsen basis of one block: index group {0} (trivial) or Z with generator c1;
// c_k is the k-fold stacking of c1 (of c1* for k < 0)
struct NTBasis {
    Space base = Space::Circle;
    long size = 1;  // block size
    bool trivial = false;
    UnitaryField c1;

    UnitaryField c(long k) const {
        if (k == 0 || trivial) return UnitaryField{base, {}};
        UnitaryField g = k > 0 ? c1 : c1.adjoint();
        UnitaryField out{base, {}};
        out.add_all(g, k > 0 ? k : -k);
        return out;
    }
};

// diag(z, 1, ..., 1) over the circle; the trivial basis elsewhere
inline NTBasis canonical_basis(Space base, long size = 1) {
    NTBasis b{base, size, base != Space::Circle, {base, {}}};
    if (base == Space::Circle) {
        b.c1.add(PLFunction::linear(Space::Circle, 0, 1));
        if (size > 1) b.c1.add(PLFunction::constant(Space::Circle, 0), size - 1);
    }
    return b;
}

inline NTBasis trivial_basis(Space base, long size = 1) { return {base, size, true, {base, {}}}; }

inline void check_basis(const NTBasis& C) {
    if (C.trivial) return;
    if (C.base != Space::Circle) throw std::invalid_argument("only circle blocks carry a K1 generator");
    if (C.c1.total() != C.size) throw std::invalid_argument("basis generator has the wrong size");
    if (C.c1.winding() != 1) throw std::invalid_argument("basis generator must have K1 class 1");
}

// Delta_C(u) = Delta(diag(u, c*_{[u]}))
inline HClass extended_det(const UnitaryField& u, const NTBasis& C, const K0Image& k0) {
    long k = u.base == Space::Circle ? u.winding() : 0;
    if (k != 0 && C.trivial) throw std::invalid_argument("K1 class outside the basis index set");
    PLFunction r = det_hat(u, C.size);
    if (k != 0) r = r - det_hat(C.c(k), C.size);
    return {r, k0};
}

// ---------------------------------------------------------------- numeric oracle

struct NumericDet {
    double value = 0;
    bool ok = true;
    std::string error;
};

// (1/2 pi i) int_0^1 Tr(xi'(s) xi(s)^{-1}) ds for a diagonal path given entrywise, as the
// sum of the increments arg(xi_j(s_{k+1}) / xi_j(s_k)) over a uniform mesh with fixed-order
// pairwise summation. Exact once every increment stays below pi.
inline NumericDet numeric_det_oracle(const std::function<void(double, std::vector<std::complex<double>>&)>& path,
                                     const std::vector<double>& weights, long steps, double normalize = 1.0) {
    NumericDet r;
    if (steps < 1000) throw std::invalid_argument("oracle needs at least 1000 steps");
    std::vector<double> terms((size_t)steps);
    std::vector<std::complex<double>> prev, cur;
    path(0.0, prev);
    for (long k = 1; k <= steps; ++k) {
        path((double)k / (double)steps, cur);
        double acc = 0;
        for (size_t j = 0; j < cur.size(); ++j) {
            if (std::abs(std::abs(cur[j]) - 1.0) > 1e-9) {
                r.ok = false;
                r.error = "non-unitary sample at s=" + std::to_string((double)k / (double)steps);
                return r;
            }
            double inc = std::arg(cur[j] * std::conj(prev[j]));
            if (std::abs(inc) > 3.0) {
                r.ok = false;
                r.error = "mesh too coarse for the phase speed";
                return r;
            }
            acc += weights[j] * inc;
        }
        terms[(size_t)k - 1] = acc / (2 * M_PI);
        std::swap(prev, cur);
    }
    std::function<double(size_t, size_t)> sum = [&](size_t lo, size_t hi) -> double {
        if (hi - lo <= 8) {
            double t = 0;
            for (size_t i = lo; i < hi; ++i) t += terms[i];
            return t;
        }
        size_t mid = lo + (hi - lo) / 2;
        return sum(lo, mid) + sum(mid, hi);
    };
    r.value = sum(0, terms.size()) / normalize;
    return r;
}

// the oracle along the linear phase homotopy s -> exp(2 pi i s phase_j(y)) at one y; the
// trace of a diagonal path is a sum, so each entry gets a mesh fine enough for its speed
inline NumericDet numeric_det_at(const UnitaryField& u, const Rational& y, long steps, long n = 0) {
    if (n == 0) n = u.total();
    NumericDet r;
    std::vector<double> parts;
    for (auto& e : u.entries) {
        double ph = to_double(e.f.eval(y));
        long st = std::max(steps, (long)std::ceil(4 * std::abs(ph)) + 1);
        auto path = [ph](double s, std::vector<std::complex<double>>& out) { out.assign(1, std::polar(1.0, 2 * M_PI * s * ph)); };
        auto one = numeric_det_oracle(path, {(double)e.mult}, st, 1.0);
        if (!one.ok) return one;
        parts.push_back(one.value);
    }
    double acc = 0;
    for (double p : parts) acc += p;
    r.value = acc / (double)n;
    return r;
}

}  // namespace ntcu
