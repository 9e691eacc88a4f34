#pragma once
// Nielsen-Thomsen bases, rotation maps and the metric frak_d on K1-bar morphisms.

#include "determinant.hpp"
#include "traces.hpp"

namespace ntcu {

// a unital morphism M_n(C(X)) -> M_{n*total}(C(Y)) given by an eigenvalue pattern
struct NTMorphism {
    EigenPattern pat;
    long src_size = 1;
    K0Image dst_k0 = K0Image::all();

    long dst_size() const { return src_size * pat.total(); }
};

inline UnitaryField image(const NTMorphism& f, const UnitaryField& u) { return push_unitary(f.pat, u); }

// K1(f)(1): signed winding count (zero when either side has trivial K1)
inline long k1_map(const NTMorphism& f) { return pattern_k1(f.pat); }

struct NTMatrixRep {
    EigenPattern h_part;
    HClass rotation;  // R_CD(f)(1)
    long k1_part = 0;
    long lower_left = 0;  // K1 class of f applied to exp(2 pi i h); always 0
};

inline HClass zero_class(Space Y, const K0Image& k0) {
    return {PLFunction::constant(Y == Space::Circle ? Space::Interval : Y, 0), k0};
}

inline void check_bases(const NTMorphism& f, const NTBasis& C, const NTBasis& D) {
    check_basis(C);
    check_basis(D);
    if (C.base != f.pat.X || C.size != f.src_size) throw std::invalid_argument("domain basis does not match the morphism");
    if (D.base != f.pat.Y || D.size != f.dst_size()) throw std::invalid_argument("codomain basis does not match the morphism");
}

// R_CD(f)(1) = Delta(diag(f(c_1), d*_{K1(f)(1)}))
inline HClass rotation(const NTMorphism& f, const NTBasis& C, const NTBasis& D) {
    check_bases(f, C, D);
    if (C.trivial) return zero_class(f.pat.Y, f.dst_k0);
    return extended_det(image(f, C.c1), D, f.dst_k0);
}

inline NTMatrixRep nt_matrix(const NTMorphism& f, const NTBasis& C, const NTBasis& D) {
    NTMatrixRep m;
    m.h_part = f.pat;
    m.rotation = rotation(f, C, D);
    m.k1_part = C.trivial ? 0 : k1_map(f);
    UnitaryField e{f.pat.X, {}};
    e.add(PLFunction::constant(f.pat.X, Q(1, 3)), f.src_size);
    m.lower_left = f.pat.Y == Space::Circle ? image(f, e).winding() : 0;
    return m;
}

inline HClass relative_rotation(const NTMorphism& f, const NTMorphism& g, const NTBasis& C, const NTBasis& D) {
    return rotation(f, C, D) - rotation(g, C, D);
}

// sup of the quotient norm over the generator set (the single generator of Z, or none)
inline Rational d_R(const NTMorphism& f, const NTMorphism& g, const NTBasis& C, const NTBasis& D) {
    if (C.trivial) return 0;
    return h_norm(relative_rotation(f, g, C, D));
}

struct FrakD {
    Rational dH = 0, dR = 0;
    bool k1_equal = true;
    Ext total;
};

inline FrakD frak_d(const NTMorphism& f, const NTMorphism& g, const NTBasis& C, const NTBasis& D) {
    FrakD r;
    r.dH = h_distance(f.pat, g.pat, f.dst_k0);
    r.k1_equal = C.trivial || k1_map(f) == k1_map(g);
    if (!r.k1_equal) {
        r.total = Ext::infinity();
        return r;
    }
    r.dR = d_R(f, g, C, D);
    r.total = Ext(Rational(r.dH + r.dR));
    return r;
}

// ---------------------------------------------------------------- lemma identities

// (i): with equal K1 parts, Delta(diag(f(c_1), g(c_1)*)) equals the relative rotation
inline HClass key_closed_form(const NTMorphism& f, const NTMorphism& g, const NTBasis& C) {
    if (C.trivial) return zero_class(f.pat.Y, f.dst_k0);
    UnitaryField w = diag_sum(image(f, C.c1), image(g, C.c1).adjoint());
    return det_bar(w, f.dst_k0, f.dst_size());
}

// h_1^ = Delta(diag(c_1, c'_1*)) as a periodic function on the domain
inline PLFunction basis_change(const NTBasis& C, const NTBasis& Cp) {
    if (C.trivial) return PLFunction::constant(C.base, 0);
    UnitaryField w = diag_sum(C.c1, Cp.c1.adjoint());
    PLFunction acc = PLFunction::constant(C.base, 0);
    for (auto& e : w.entries) acc = acc + e.f.scaled(e.mult);
    return acc.scaled(Q(1, C.size));
}

// (ii): R_CD(f,g) - R_C'D'(f,g) against f(h)^ - g(h)^
inline std::pair<HClass, HClass> key_basis_change(const NTMorphism& f, const NTMorphism& g, const NTBasis& C,
                                                  const NTBasis& D, const NTBasis& Cp, const NTBasis& Dp) {
    HClass lhs = relative_rotation(f, g, C, D) - relative_rotation(f, g, Cp, Dp);
    PLFunction h = basis_change(C, Cp);
    HClass rhs{trace_action(f.pat, h) - trace_action(g.pat, h), f.dst_k0};
    return {lhs, rhs};
}

// ---------------------------------------------------------------- diagonalisability

struct DiagResult {
    bool diagonalisable = false;
    bool structural = false;  // negative answer proved for every basis
    std::string witness;
};

inline NTBasis perturbed(const NTBasis& C, const PLFunction& h) {
    if (C.trivial) return C;
    NTBasis b = C;
    UnitaryField c{C.base, {}};
    bool first = true;
    for (auto& e : C.c1.entries) {
        if (first) {
            c.add(e.f + h, 1);
            c.add(e.f, e.mult - 1);
            first = false;
        } else {
            c.add(e.f, e.mult);
        }
    }
    b.c1 = c;
    return b;
}

// Structural obstruction for a circle domain of size one mapping into an interval
// block: if every eigenvalue map is a loop of degree d_j and sum mult_j d_j != 0, the
// rotation of any generator c_1 has representative with rep(1) - rep(0) = sum/n != 0.
inline bool structural_obstruction(const NTMorphism& f, Rational& drift) {
    if (f.pat.X != Space::Circle || f.pat.Y != Space::Interval || f.src_size != 1) return false;
    Rational s = 0;
    for (auto& l : pattern_lifts(f.pat)) {
        Rational d = l.f.eval(1) - l.f.eval(0);
        if (d.get_den() != 1) return false;
        s += d * l.mult;
    }
    drift = s / f.dst_size();
    return s != 0;
}

inline DiagResult is_diagonalisable(const NTMorphism& f, const NTBasis& C, const NTBasis& D,
                                    const std::vector<PLFunction>& family = {}) {
    DiagResult r;
    if (C.trivial || h_is_zero(rotation(f, C, D))) {
        r.diagonalisable = true;
        r.witness = "given bases";
        return r;
    }
    Rational drift;
    if (structural_obstruction(f, drift)) {
        r.structural = true;
        r.witness = "rotation drifts by " + to_string(drift) + " across [0,1] for every generator";
        return r;
    }
    for (size_t i = 0; i < family.size(); ++i) {
        NTBasis Cp = perturbed(C, family[i]);
        for (size_t j = 0; j <= family.size(); ++j) {
            NTBasis Dp = j < family.size() ? perturbed(D, family[j]) : D;
            if (h_is_zero(rotation(f, Cp, Dp))) {
                r.diagonalisable = true;
                r.witness = "perturbation " + std::to_string(i) + "/" + std::to_string(j);
                return r;
            }
        }
    }
    r.witness = "not diagonalisable within search family";
    return r;
}

}  // namespace ntcu
