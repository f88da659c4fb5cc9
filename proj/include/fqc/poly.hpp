#pragma once

#include "fqc/gf.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace fqc {

// Dense univariate polynomial over a Field; coefficients are element
// indices, low degree first, no trailing zeros.  The zero polynomial is the
// empty vector (degree -1).
struct FPoly {
    std::vector<std::uint32_t> c;

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    bool operator==(const FPoly&) const = default;

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    static FPoly x() { return {{0, 1}}; }
    static FPoly constant(std::uint32_t v) { return v ? FPoly{{v}} : FPoly{}; }
};

namespace fpoly {

inline FPoly add(const Field& F, const FPoly& a, const FPoly& b) {
    FPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (std::size_t i = 0; i < r.c.size(); ++i) {
        const std::uint32_t x = i < a.c.size() ? a.c[i] : 0;
        const std::uint32_t y = i < b.c.size() ? b.c[i] : 0;
        r.c[i] = F.add(x, y);
    }
    r.trim();
    return r;
}

inline FPoly sub(const Field& F, const FPoly& a, const FPoly& b) {
    FPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (std::size_t i = 0; i < r.c.size(); ++i) {
        const std::uint32_t x = i < a.c.size() ? a.c[i] : 0;
        const std::uint32_t y = i < b.c.size() ? b.c[i] : 0;
        r.c[i] = F.sub(x, y);
    }
    r.trim();
    return r;
}

inline FPoly mul(const Field& F, const FPoly& a, const FPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    FPoly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = F.add(r.c[i + j], F.mul(a.c[i], b.c[j]));
    }
    return r;
}

inline std::pair<FPoly, FPoly> divmod(const Field& F, FPoly a, const FPoly& b) {
    if (b.is_zero()) throw Error("polynomial division by zero");
    FPoly q;
    if (a.c.size() >= b.c.size()) q.c.assign(a.c.size() - b.c.size() + 1, 0);
    const std::uint32_t lead_inv = F.inv(b.c.back());
    while (a.c.size() >= b.c.size()) {
        const std::uint32_t k = F.mul(a.c.back(), lead_inv);
        const std::size_t off = a.c.size() - b.c.size();
        if (k) {
            q.c[off] = k;
            for (std::size_t i = 0; i < b.c.size(); ++i)
                a.c[off + i] = F.sub(a.c[off + i], F.mul(k, b.c[i]));
        }
        a.c.pop_back();
        a.trim();
        if (a.is_zero()) break;
    }
    q.trim();
    return {std::move(q), std::move(a)};
}

inline FPoly rem(const Field& F, FPoly a, const FPoly& b) {
    return divmod(F, std::move(a), b).second;
}

inline FPoly quot(const Field& F, FPoly a, const FPoly& b) {
    return divmod(F, std::move(a), b).first;
}

inline FPoly monic(const Field& F, FPoly a) {
    if (a.is_zero() || a.c.back() == 1) return a;
    const std::uint32_t s = F.inv(a.c.back());
    for (auto& v : a.c) v = F.mul(v, s);
    return a;
}

inline FPoly gcd(const Field& F, FPoly a, FPoly b) {
    while (!b.is_zero()) {
        FPoly r = rem(F, std::move(a), b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(F, std::move(a));
}

inline FPoly derivative(const Field& F, const FPoly& a) {
    FPoly r;
    if (a.c.size() < 2) return r;
    r.c.resize(a.c.size() - 1);
    for (std::size_t i = 1; i < a.c.size(); ++i) {
        // i mod p as a prime-subfield element (index i mod p)
        r.c[i - 1] = F.mul(a.c[i], static_cast<std::uint32_t>(i % F.characteristic()));
    }
    r.trim();
    return r;
}

inline FPoly mulmod(const Field& F, const FPoly& a, const FPoly& b, const FPoly& f) {
    return rem(F, mul(F, a, b), f);
}

inline FPoly powmod(const Field& F, FPoly base, std::uint64_t e, const FPoly& f) {
    FPoly r = FPoly::constant(1);
    r = rem(F, std::move(r), f);
    base = rem(F, std::move(base), f);
    while (e) {
        if (e & 1u) r = mulmod(F, r, base, f);
        base = mulmod(F, base, base, f);
        e >>= 1u;
    }
    return r;
}

// a^{|F|^k} mod f: k rounds of the cardinality-power map.
inline FPoly cardinality_power(const Field& F, FPoly a, std::uint32_t k, const FPoly& f) {
    for (std::uint32_t i = 0; i < k; ++i) a = powmod(F, std::move(a), F.cardinality(), f);
    return a;
}

inline std::uint32_t eval(const Field& F, const FPoly& a, std::uint32_t x) {
    std::uint32_t acc = 0;
    for (std::size_t i = a.c.size(); i-- > 0;) acc = F.add(F.mul(acc, x), a.c[i]);
    return acc;
}

// Whether g has a root in F: gcd(x^|F| - x, g) nonconstant.  The zero
// polynomial vacuously has every element as a root.
inline bool has_root(const Field& F, const FPoly& g) {
    if (g.is_zero()) return true;
    if (g.degree() == 0) return false;
    if (g.degree() == 1) return true;
    FPoly xq = cardinality_power(F, FPoly::x(), 1, g);
    FPoly d = gcd(F, sub(F, xq, FPoly::x()), g);
    return d.degree() >= 1;
}

// Multiset of irreducible-factor degrees of a monic squarefree g, sorted
// ascending.  Distinct-degree splitting via gcd(g, x^{|F|^i} - x); only
// degrees are needed, so there is no equal-degree stage.
inline std::vector<int> distinct_degree_factor_degrees(const Field& F, FPoly g) {
    g = monic(F, std::move(g));
    std::vector<int> degs;
    FPoly r = rem(F, FPoly::x(), g);
    int i = 0;
    while (g.degree() > 0) {
        ++i;
        if (2 * i > g.degree()) {
            degs.push_back(g.degree());
            break;
        }
        r = cardinality_power(F, std::move(r), 1, g);
        FPoly h = gcd(F, sub(F, r, FPoly::x()), g);
        if (h.degree() > 0) {
            for (int k = 0; k < h.degree() / i; ++k) degs.push_back(i);
            g = quot(F, std::move(g), h);
            r = rem(F, std::move(r), g);
        }
    }
    std::sort(degs.begin(), degs.end());
    return degs;
}

}  // namespace fpoly
}  // namespace fqc
