#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ntcu {

using Rational = mpq_class;

inline Rational Q(long p, long q = 1) {
    if (q == 0) throw std::domain_error("zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

// Accepts "p/q", "p" and plain decimals such as "0.25".
inline Rational parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw std::invalid_argument("empty rational");
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        bool neg = t[0] == '-';
        std::string ip = t.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
        std::string fp = t.substr(dot + 1);
        mpz_class num(ip.empty() ? "0" : ip + fp, 10);
        mpz_class den = 1;
        for (size_t i = 0; i < fp.size(); ++i) den *= 10;
        if (neg) num = -num;
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    Rational r;
    if (r.set_str(t, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rational qabs(const Rational& r) { return r < 0 ? Rational(-r) : r; }
inline Rational qmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational qmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline mpz_class qfloor(const Rational& r) {
    mpz_class z;
    mpz_fdiv_q(z.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return z;
}

inline mpz_class qceil(const Rational& r) {
    mpz_class z;
    mpz_cdiv_q(z.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return z;
}

// representative in [0,1)
inline Rational frac(const Rational& r) { return r - Rational(qfloor(r)); }

inline Rational circ_dist(const Rational& a, const Rational& b) {
    Rational d = frac(a - b);
    Rational e = 1 - d;
    return d < e ? d : e;
}

inline double to_double(const Rational& r) { return r.get_d(); }

// Extended nonnegative value: a rational or +infinity.
struct Ext {
    Rational v = 0;
    bool inf = false;

    Ext() = default;
    Ext(const Rational& r) : v(r) {}
    static Ext infinity() {
        Ext e;
        e.inf = true;
        return e;
    }

    friend Ext operator+(const Ext& a, const Ext& b) {
        if (a.inf || b.inf) return infinity();
        return Ext(Rational(a.v + b.v));
    }
    friend bool operator<(const Ext& a, const Ext& b) {
        if (a.inf) return false;
        if (b.inf) return true;
        return a.v < b.v;
    }
    friend bool operator<=(const Ext& a, const Ext& b) { return !(b < a); }
    friend bool operator==(const Ext& a, const Ext& b) {
        return a.inf == b.inf && (a.inf || a.v == b.v);
    }
    friend Ext operator*(const Rational& c, const Ext& a) {
        if (a.inf) return infinity();
        return Ext(Rational(c * a.v));
    }
    std::string str() const { return inf ? "inf" : to_string(v); }
    double dbl() const { return inf ? 1.0 / 0.0 : v.get_d(); }
};

inline Ext emax(const Ext& a, const Ext& b) { return a < b ? b : a; }

}  // namespace ntcu
