#pragma once

#include "fqc/numeric.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fqc {

// Polynomial in t with exact rational coefficients, low degree first,
// trimmed; the zero polynomial is empty.
using QPoly = std::vector<Rational>;

namespace qpoly {

inline void trim(QPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const QPoly& a) { return static_cast<int>(a.size()) - 1; }  // -1 for zero

inline QPoly add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

inline QPoly sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

inline QPoly mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

inline QPoly scale(QPoly a, const Rational& s) {
    for (auto& c : a) c *= s;
    trim(a);
    return a;
}

inline std::pair<QPoly, QPoly> divmod(QPoly a, const QPoly& b) {
    if (b.empty()) throw Error("rational-polynomial division by zero");
    QPoly q;
    if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rational(0));
    while (a.size() >= b.size()) {
        const Rational k = a.back() / b.back();
        const std::size_t off = a.size() - b.size();
        q[off] = k;
        for (std::size_t i = 0; i < b.size(); ++i) a[off + i] -= k * b[i];
        a.pop_back();
        trim(a);
        if (a.empty()) break;
    }
    trim(q);
    return {std::move(q), std::move(a)};
}

inline QPoly monic(QPoly a) {
    if (a.empty() || a.back() == 1) return a;
    const Rational s = a.back();
    for (auto& c : a) c /= s;
    return a;
}

inline QPoly gcd(QPoly a, QPoly b) {
    while (!b.empty()) {
        QPoly r = divmod(std::move(a), b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(std::move(a));
}

inline Rational eval(const QPoly& a, const Rational& x) {
    Rational acc(0);
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
}

// Normalize coefficients to integers with content 1 and positive leading
// coefficient of the denominator; purely for printing.
inline std::string format(const QPoly& a, const std::string& var = "t") {
    if (a.empty()) return "0";
    std::string s;
    bool first = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        const bool neg = a[i] < 0;
        const Rational mag = neg ? -a[i] : a[i];
        if (first)
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        first = false;
        const std::string coeff = to_string(mag);
        if (i == 0)
            s += coeff;
        else {
            if (coeff != "1") s += coeff + "*";
            s += var;
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

}  // namespace qpoly

// num/den in lowest terms with den(0) = 1; reproduces its source series
// exactly when expanded.
struct RationalFunction {
    QPoly num;
    QPoly den{Rational(1)};

    bool is_zero() const { return num.empty(); }
    bool operator==(const RationalFunction&) const = default;

    std::string str() const { return "(" + qpoly::format(num) + ")/(" + qpoly::format(den) + ")"; }
};

inline RationalFunction normalized(QPoly num, QPoly den) {
    qpoly::trim(num);
    qpoly::trim(den);
    if (den.empty()) throw Error("rational function with zero denominator");
    if (num.empty()) return {{}, {Rational(1)}};
    QPoly g = qpoly::gcd(num, den);
    if (qpoly::degree(g) > 0) {
        num = qpoly::divmod(std::move(num), g).first;
        den = qpoly::divmod(std::move(den), g).first;
    }
    if (den[0] == 0) throw Error("rational function has a pole at 0");
    const Rational s = den[0];
    for (auto& c : num) c /= s;
    for (auto& c : den) c /= s;
    return {std::move(num), std::move(den)};
}

// Power-series coefficients of num/den through t^M (den(0) = 1).
inline std::vector<Rational> expand(const RationalFunction& R, int M) {
    std::vector<Rational> z(static_cast<std::size_t>(M) + 1, Rational(0));
    for (int k = 0; k <= M; ++k) {
        Rational acc = k < static_cast<int>(R.num.size()) ? R.num[static_cast<std::size_t>(k)] : Rational(0);
        for (int j = 1; j <= k && j < static_cast<int>(R.den.size()); ++j)
            acc -= R.den[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(k - j)];
        z[static_cast<std::size_t>(k)] = acc;
    }
    return z;
}

// deg(num) + deg(den), with deg(0) = 0 as the reporting convention.
inline int total_degree(const RationalFunction& R) {
    const int dn = R.num.empty() ? 0 : qpoly::degree(R.num);
    const int dd = qpoly::degree(R.den);
    return dn + dd;
}

struct SeriesFit {
    std::optional<RationalFunction> result;  // NO_FIT when absent
    int recurrence_order = 0;                // deg(denominator) when present
    int coefficients_used = 0;
    int spare = 0;  // coefficients beyond the determining window
};

namespace detail {

// Berlekamp-Massey over Q: minimal LFSR (connection polynomial C with
// C(0)=1, register length L) generating s entirely.
inline std::pair<QPoly, int> berlekamp_massey(const std::vector<Rational>& s) {
    QPoly C{Rational(1)}, B{Rational(1)};
    int L = 0, m = 1;
    Rational b(1);
    for (std::size_t n = 0; n < s.size(); ++n) {
        Rational d = s[n];
        for (int i = 1; i <= L && i < static_cast<int>(C.size()); ++i)
            d += C[static_cast<std::size_t>(i)] * s[n - static_cast<std::size_t>(i)];
        if (d == 0) {
            ++m;
            continue;
        }
        QPoly shift(static_cast<std::size_t>(m), Rational(0));
        shift.push_back(Rational(1));
        QPoly adj = qpoly::mul(shift, B);
        adj = qpoly::scale(std::move(adj), d / b);
        if (2 * L <= static_cast<int>(n)) {
            QPoly T = C;
            C = qpoly::sub(C, adj);
            L = static_cast<int>(n) + 1 - L;
            B = std::move(T);
            b = d;
            m = 1;
        } else {
            C = qpoly::sub(C, adj);
            ++m;
        }
    }
    return {std::move(C), L};
}

}  // namespace detail

// Minimal rational function whose power series (starting at t^1) matches
// every given coefficient.  The fit is "determined" when the window
// 2*deg(den) + max(0, deg(num) - deg(den)) plus the required spare
// confirmations fits inside the data; otherwise NO_FIT, which always means
// insufficient data, never irrationality.
inline SeriesFit fit_rational(const std::vector<Rational>& seq, int min_spare = 0) {
    if (seq.empty()) throw Error("fit_rational: empty input");
    SeriesFit fit;
    fit.coefficients_used = static_cast<int>(seq.size());
    if (seq.size() < 2) return fit;

    auto [C, L] = detail::berlekamp_massey(seq);

    // numerator of S(t) = sum s_i t^i: first L coefficients of S*C
    QPoly n0(static_cast<std::size_t>(L), Rational(0));
    for (int k = 0; k < L; ++k) {
        Rational acc(0);
        for (int j = 0; j <= k && j < static_cast<int>(C.size()); ++j)
            acc += C[static_cast<std::size_t>(j)] * seq[static_cast<std::size_t>(k - j)];
        n0[static_cast<std::size_t>(k)] = acc;
    }
    qpoly::trim(n0);
    QPoly num(1, Rational(0));  // multiply by t: series starts at t^1
    num.insert(num.end(), n0.begin(), n0.end());
    RationalFunction R = normalized(std::move(num), std::move(C));

    const int dd = qpoly::degree(R.den);
    const int dn = R.num.empty() ? 0 : qpoly::degree(R.num);
    const int window = 2 * dd + std::max(0, dn - dd);
    const int spare = static_cast<int>(seq.size()) - window;
    if (spare < std::max(min_spare, 0)) return fit;  // NO_FIT: underdetermined

    const auto back = expand(R, static_cast<int>(seq.size()));
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (back[i + 1] != seq[i]) throw Error("fit_rational: internal verification failed");
    if (back[0] != 0) throw Error("fit_rational: internal verification failed");

    fit.result = std::move(R);
    fit.recurrence_order = dd;
    fit.spare = spare;
    return fit;
}

inline SeriesFit fit_rational(const std::vector<Integer>& seq, int min_spare = 0) {
    std::vector<Rational> s;
    s.reserve(seq.size());
    for (const Integer& v : seq) s.emplace_back(v);
    return fit_rational(s, min_spare);
}

// The unique Z with Z(0) = 1 and t Z'(t) = P(t) Z(t) through t^M, where P
// is given by its coefficients p_1..p_M.  Coefficients are exact rationals;
// integrality is the caller's to inspect, not assumed.
inline std::vector<Rational> zeta_from_poincare(const std::vector<Rational>& P, int M) {
    if (M < 0 || M > static_cast<int>(P.size())) throw Error("zeta_from_poincare: order exceeds data");
    std::vector<Rational> z(static_cast<std::size_t>(M) + 1, Rational(0));
    z[0] = 1;
    for (int k = 1; k <= M; ++k) {
        Rational acc(0);
        for (int j = 1; j <= k; ++j) acc += P[static_cast<std::size_t>(j - 1)] * z[static_cast<std::size_t>(k - j)];
        z[static_cast<std::size_t>(k)] = acc / k;
    }
    return z;
}

inline std::vector<Rational> zeta_from_poincare(const std::vector<Integer>& P, int M) {
    std::vector<Rational> p;
    p.reserve(P.size());
    for (const Integer& v : P) p.emplace_back(v);
    return zeta_from_poincare(p, M);
}

// Exact check of t Z' - P Z = 0 mod t^{M+1}; Z given from t^0, P from t^1.
inline bool verify_log_derivative(const std::vector<Rational>& Z, const std::vector<Rational>& P, int M) {
    if (Z.empty() || Z[0] != 1) throw Error("verify_log_derivative: Z(0) must be 1");
    if (M >= static_cast<int>(Z.size())) throw Error("verify_log_derivative: Z too short");
    for (int k = 1; k <= M; ++k) {
        Rational lhs = Rational(k) * Z[static_cast<std::size_t>(k)];
        Rational rhs(0);
        for (int j = 1; j <= k; ++j) {
            const Rational pj = j <= static_cast<int>(P.size()) ? P[static_cast<std::size_t>(j - 1)] : Rational(0);
            rhs += pj * Z[static_cast<std::size_t>(k - j)];
        }
        if (lhs != rhs) return false;
    }
    return true;
}

inline bool all_integral(const std::vector<Rational>& v) {
    for (const auto& c : v)
        if (denominator(c) != 1) return false;
    return true;
}

// When the fitted denominator factors as prod (1 - q^{a_i} t) with distinct
// a_i, solve coefficient(m) = sum c_i q^{a_i m} and report whether the c_i
// are integers.  Advisory: failures are reported, never asserted.
struct GeometricStructure {
    bool applicable = false;
    bool integer_constants = false;
    std::vector<std::pair<int, Rational>> constants;  // (a_i, c_i)
};

inline GeometricStructure geometric_structure_check(const RationalFunction& R, const Integer& q,
                                                    const std::vector<Integer>& seq) {
    GeometricStructure out;
    QPoly den = R.den;
    std::vector<int> exps;
    int guard = qpoly::degree(den) + 2;
    while (qpoly::degree(den) > 0 && guard-- > 0) {
        bool split = false;
        Integer power(1);
        for (int a = 0; a <= 64 && static_cast<int>(exps.size()) < 64; ++a) {
            // test root t = q^{-a}
            if (qpoly::eval(den, Rational(1, power)) == 0) {
                QPoly factor{Rational(1), Rational(-power)};
                den = qpoly::divmod(std::move(den), factor).first;
                exps.push_back(a);
                split = true;
                break;
            }
            power *= q;
            if (power > Integer(1) << 400) break;
        }
        if (!split) return out;
    }
    std::sort(exps.begin(), exps.end());
    for (std::size_t i = 1; i < exps.size(); ++i)
        if (exps[i] == exps[i - 1]) return out;  // repeated factor: not a plain geometric sum
    const std::size_t k = exps.size();
    if (k == 0 || seq.size() < k) return out;

    // solve the k x k Vandermonde-type system from m = 1..k
    std::vector<std::vector<Rational>> A(k, std::vector<Rational>(k + 1, Rational(0)));
    for (std::size_t m = 1; m <= k; ++m) {
        for (std::size_t i = 0; i < k; ++i) A[m - 1][i] = Rational(ipow(q, static_cast<unsigned>(exps[i] * static_cast<int>(m))));
        A[m - 1][k] = Rational(seq[m - 1]);
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        while (piv < k && A[piv][col] == 0) ++piv;
        if (piv == k) return out;
        std::swap(A[piv], A[col]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col || A[r][col] == 0) continue;
            const Rational f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= k; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<Rational> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = A[i][k] / A[i][i];

    // verify against the whole sequence
    for (std::size_t m = 1; m <= seq.size(); ++m) {
        Rational acc(0);
        for (std::size_t i = 0; i < k; ++i)
            acc += c[i] * Rational(ipow(q, static_cast<unsigned>(exps[i] * static_cast<int>(m))));
        if (acc != Rational(seq[m - 1])) return out;
    }
    out.applicable = true;
    out.integer_constants = true;
    for (std::size_t i = 0; i < k; ++i) {
        out.constants.emplace_back(exps[i], c[i]);
        if (denominator(c[i]) != 1) out.integer_constants = false;
    }
    return out;
}

}  // namespace fqc
