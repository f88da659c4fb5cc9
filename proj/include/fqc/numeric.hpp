#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fqc {

// All counting and series arithmetic is exact: arbitrary-precision integers
// and rationals throughout, no floating point on any result path.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a requested enumeration exceeds the configured budget.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, Integer estimate, Integer budget)
        : Error(what), estimate(std::move(estimate)), budget(std::move(budget)) {}
    Integer estimate;
    Integer budget;
};

inline Integer ipow(Integer base, unsigned exp) {
    Integer r = 1;
    while (exp) {
        if (exp & 1u) r *= base;
        base *= base;
        exp >>= 1u;
    }
    return r;
}

inline std::uint64_t pow_u64(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && r > UINT64_MAX / base) throw Error("pow_u64 overflow");
        r *= base;
    }
    return r;
}

inline Integer numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const Integer& v) { return v.str(); }

// Rationals serialize as "num/den" (den omitted when 1); exactness must
// survive the wire, so never through floating point.
inline std::string to_string(const Rational& v) {
    Integer n = numerator(v), d = denominator(v);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

// log2 of a positive integer, good to ~1e-15 relative error; used only to
// seed integer exponent rounding, never for results.
inline double log2_approx(const Integer& v) {
    if (v <= 0) throw Error("log2_approx: nonpositive");
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v));
    if (bits <= 52) return std::log2(v.convert_to<double>());
    Integer top = v >> (bits - 52);
    return std::log2(top.convert_to<double>()) + static_cast<double>(bits - 52);
}

// Smallest-denominator rational in the closed interval [lo, hi]
// (Stern-Brocot descent). Ties between integers resolve toward zero.
inline Rational simplest_rational_in_interval(Rational lo, Rational hi) {
    if (lo > hi) std::swap(lo, hi);
    if (lo == hi) return lo;
    if (lo <= 0 && hi >= 0) return Rational(0);
    if (hi < 0) return -simplest_rational_in_interval(-hi, -lo);
    // 0 < lo < hi
    Integer nl = numerator(lo), dl = denominator(lo);
    Integer ih = numerator(hi) / denominator(hi);  // floor, hi > 0
    Integer il = (nl + dl - 1) / dl;               // ceil
    if (il <= ih) return Rational(il);
    Integer whole = nl / dl;
    Rational flo = lo - whole, fhi = hi - whole;  // both in (0,1)
    Rational inner = simplest_rational_in_interval(Rational(1) / fhi, Rational(1) / flo);
    return Rational(whole) + Rational(1) / inner;
}

// Best rational approximation of x with denominator <= cap: the last
// continued-fraction convergent that fits (x itself when it already fits).
inline Rational cap_denominator(const Rational& x, const Integer& cap) {
    if (denominator(x) <= cap) return x;
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Integer n = numerator(x), d = denominator(x);
    bool neg = n < 0;
    if (neg) n = -n;
    while (d != 0) {
        Integer a = n / d;
        Integer p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > cap) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        Integer r = n % d;
        n = d; d = r;
    }
    Rational best(p1, q1);
    return neg ? -best : best;
}

}  // namespace fqc
