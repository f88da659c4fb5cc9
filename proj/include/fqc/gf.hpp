#pragma once

#include "fqc/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace fqc {

namespace detail {

inline bool is_prime_u64(std::uint64_t v) {
    if (v < 2) return false;
    for (std::uint64_t d = 2; d * d <= v; ++d)
        if (v % d == 0) return false;
    return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= v; ++d) {
        if (v % d == 0) {
            out.push_back(d);
            while (v % d == 0) v /= d;
        }
    }
    if (v > 1) out.push_back(v);
    return out;
}

// Dense polynomials over F_p (coefficient vectors, low degree first) used
// only while constructing a Field: modulus search and generator checks.
struct PrimePoly {
    static void trim(std::vector<std::uint32_t>& a) {
        while (!a.empty() && a.back() == 0) a.pop_back();
    }

    static std::vector<std::uint32_t> mulmod(const std::vector<std::uint32_t>& a,
                                             const std::vector<std::uint32_t>& b,
                                             const std::vector<std::uint32_t>& f,
                                             std::uint32_t p) {
        if (a.empty() || b.empty()) return {};
        std::vector<std::uint64_t> t(a.size() + b.size() - 1, 0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i]) continue;
            for (std::size_t j = 0; j < b.size(); ++j)
                t[i + j] = (t[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p;
        }
        const std::size_t n = f.size() - 1;  // f monic of degree n
        for (std::size_t j = t.size(); j-- > n;) {
            const std::uint64_t c = t[j];
            if (!c) continue;
            t[j] = 0;
            for (std::size_t i = 0; i < n; ++i)
                t[j - n + i] = (t[j - n + i] + c * (p - f[i])) % p;
        }
        std::vector<std::uint32_t> r(t.begin(), t.begin() + static_cast<long>(std::min(t.size(), n)));
        trim(r);
        return r;
    }

    static std::vector<std::uint32_t> powmod(std::vector<std::uint32_t> base, std::uint64_t e,
                                             const std::vector<std::uint32_t>& f, std::uint32_t p) {
        std::vector<std::uint32_t> r{1};
        while (e) {
            if (e & 1u) r = mulmod(r, base, f, p);
            base = mulmod(base, base, f, p);
            e >>= 1u;
        }
        return r;
    }

    static std::uint32_t inv_mod_p(std::uint32_t a, std::uint32_t p) {
        std::int64_t t = 0, nt = 1, r = p, nr = a % p;
        while (nr != 0) {
            std::int64_t q = r / nr;
            std::swap(t -= q * nt, nt);
            std::swap(r -= q * nr, nr);
        }
        return static_cast<std::uint32_t>(t < 0 ? t + p : t);
    }

    static std::vector<std::uint32_t> gcd(std::vector<std::uint32_t> a, std::vector<std::uint32_t> b,
                                          std::uint32_t p) {
        trim(a);
        trim(b);
        while (!b.empty()) {
            // a mod b
            const std::uint32_t lead_inv = inv_mod_p(b.back(), p);
            while (a.size() >= b.size()) {
                const std::uint64_t c = static_cast<std::uint64_t>(a.back()) * lead_inv % p;
                if (c) {
                    const std::size_t off = a.size() - b.size();
                    for (std::size_t i = 0; i < b.size(); ++i)
                        a[off + i] = static_cast<std::uint32_t>(
                            (a[off + i] + c * (p - b[i])) % p);
                }
                a.pop_back();
                trim(a);
                if (a.empty()) break;
            }
            std::swap(a, b);
        }
        return a;
    }

    // f monic of degree n over F_p.  Uses x^{p^n} = x plus gcd checks at the
    // maximal proper subfield levels n/l.
    static bool is_irreducible(const std::vector<std::uint32_t>& f, std::uint32_t p) {
        const std::size_t n = f.size() - 1;
        if (n == 1) return true;
        std::vector<std::vector<std::uint32_t>> frob_iter(n + 1);
        frob_iter[0] = {0, 1};  // x
        if (f[0] == 0) return false;  // divisible by x
        for (std::size_t i = 1; i <= n; ++i)
            frob_iter[i] = powmod(frob_iter[i - 1], p, f, p);
        if (frob_iter[n] != frob_iter[0]) return false;
        for (std::uint64_t l : prime_factors(n)) {
            std::vector<std::uint32_t> d = frob_iter[n / l];
            // d - x
            if (d.size() < 2) d.resize(2, 0);
            d[1] = d[1] ? d[1] - 1 : p - 1;
            trim(d);
            if (gcd(d, f, p).size() != 1) return false;
        }
        return true;
    }
};

}  // namespace detail

class Field;

// An element of F_{p^n}, identified by the index encoding its coordinate
// vector (c_0,...,c_{n-1}) in the power basis: idx = sum c_i p^i.  Elements
// reference their owning Field and are invalidated if it is moved.
struct FieldElement {
    const Field* field = nullptr;
    std::uint32_t idx = 0;

    bool operator==(const FieldElement&) const = default;
};

// F_{p^n} with table-backed arithmetic.  Immutable after construction; safe
// to share across threads.  Cardinality is capped (kMaxCardinality) because
// every use downstream is enumeration-scale.
class Field {
public:
    static constexpr std::uint64_t kMaxCardinality = 1ull << 20;

    Field(std::uint32_t p, std::uint32_t n) : p_(p), n_(n) {
        if (!detail::is_prime_u64(p)) throw Error("make_field: characteristic " + std::to_string(p) + " is not prime");
        if (n == 0) throw Error("make_field: extension degree must be >= 1");
        std::uint64_t q = 1;
        for (std::uint32_t i = 0; i < n; ++i) {
            q *= p;
            if (q > kMaxCardinality)
                throw Error("make_field: cardinality " + std::to_string(p) + "^" + std::to_string(n) +
                            " exceeds cap 2^20");
        }
        q_ = q;
        find_modulus();
        build_tables();
    }

    Field(const Field&) = delete;
    Field& operator=(const Field&) = delete;
    Field(Field&&) = default;
    Field& operator=(Field&&) = default;

    std::uint32_t characteristic() const { return p_; }
    std::uint32_t degree() const { return n_; }
    std::uint64_t cardinality() const { return q_; }
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }
    std::string label() const { return std::to_string(p_) + "^" + std::to_string(n_); }

    // --- arithmetic on element indices ---

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        if (n_ == 1) {
            const std::uint32_t s = a + b;
            return s >= p_ ? s - p_ : s;
        }
        if (p_ == 2) return a ^ b;
        if (!digits_.empty()) {
            const std::uint8_t* da = &digits_[static_cast<std::size_t>(a) * n_];
            const std::uint8_t* db = &digits_[static_cast<std::size_t>(b) * n_];
            std::uint32_t acc = 0;
            for (std::uint32_t i = 0; i < n_; ++i)
                acc += pw_[i * p_ + dsum_[static_cast<std::size_t>(da[i]) * p_ + db[i]]];
            return acc;
        }
        // p >= 256 forces n == 2 under the cap
        std::uint32_t acc = 0, mult = 1;
        for (std::uint32_t i = 0; i < n_; ++i) {
            std::uint32_t s = a % p_ + b % p_;
            if (s >= p_) s -= p_;
            acc += s * mult;
            a /= p_;
            b /= p_;
            mult *= p_;
        }
        return acc;
    }

    std::uint32_t neg(std::uint32_t a) const { return neg_[a]; }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg_[b]); }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[static_cast<std::size_t>(log_[a]) + log_[b]];
    }

    std::uint32_t inv(std::uint32_t a) const {
        if (a == 0) throw Error("division by zero in " + label());
        return exp_[q_ - 1 - log_[a]];
    }

    std::uint32_t div(std::uint32_t a, std::uint32_t b) const { return mul(a, inv(b)); }

    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const {
        if (a == 0) return e == 0 ? 1 : 0;
        const std::uint64_t q1 = q_ - 1;
        if (q1 == 1) return 1;
        const std::uint64_t r = static_cast<std::uint64_t>(log_[a]) * (e % q1) % q1;
        return exp_[r];
    }

    // a^{p^k}: k iterations of the p-power map (reduced mod n, Fr^n = id).
    std::uint32_t frob(std::uint32_t a, std::uint64_t k) const {
        k %= n_;
        for (std::uint64_t i = 0; i < k; ++i) a = frob_[a];
        return a;
    }

    bool in_subfield(std::uint32_t a, std::uint32_t d) const { return frob(a, d) == a; }

    // Embedding of an integer through the prime subfield.
    std::uint32_t from_integer(const Integer& c) const {
        Integer r = c % p_;
        if (r < 0) r += p_;
        return r.convert_to<std::uint32_t>();
    }

    std::vector<std::uint32_t> coords(std::uint32_t a) const {
        std::vector<std::uint32_t> out(n_);
        for (std::uint32_t i = 0; i < n_; ++i) {
            out[i] = a % p_;
            a /= p_;
        }
        return out;
    }

    FieldElement element(std::uint32_t idx) const { return {this, idx}; }
    FieldElement zero() const { return {this, 0}; }
    FieldElement one() const { return {this, 1}; }

    std::string format(std::uint32_t a) const {
        if (n_ == 1) return std::to_string(a);
        std::string s = "[";
        const auto cs = coords(a);
        for (std::uint32_t i = 0; i < n_; ++i) {
            if (i) s += ",";
            s += std::to_string(cs[i]);
        }
        return s + "]";
    }

private:
    void find_modulus() {
        // Lexicographically smallest monic irreducible, coefficients
        // compared low degree first; deterministic across runs.
        std::vector<std::uint32_t> f(n_ + 1, 0);
        f[n_] = 1;
        std::uint64_t total = 1;
        for (std::uint32_t i = 0; i < n_; ++i) total *= p_;
        for (std::uint64_t k = 0; k < total; ++k) {
            std::uint64_t t = k;
            for (std::uint32_t i = n_; i-- > 0;) {
                f[i] = static_cast<std::uint32_t>(t % p_);
                t /= p_;
            }
            if (detail::PrimePoly::is_irreducible(f, p_)) {
                modulus_ = f;
                return;
            }
        }
        throw Error("no irreducible modulus found");  // unreachable: they exist for every (p,n)
    }

    std::uint32_t idx_of(const std::vector<std::uint32_t>& poly) const {
        std::uint32_t acc = 0, mult = 1;
        for (std::uint32_t i = 0; i < n_; ++i) {
            acc += (i < poly.size() ? poly[i] : 0) * mult;
            mult *= p_;
        }
        return acc;
    }

    std::vector<std::uint32_t> poly_of(std::uint32_t a) const {
        auto cs = coords(a);
        detail::PrimePoly::trim(cs);
        return cs;
    }

    std::uint32_t setup_mul(std::uint32_t a, std::uint32_t b) const {
        return idx_of(detail::PrimePoly::mulmod(poly_of(a), poly_of(b), modulus_, p_));
    }

    std::uint32_t setup_pow(std::uint32_t a, std::uint64_t e) const {
        std::uint32_t r = 1;
        while (e) {
            if (e & 1u) r = setup_mul(r, a);
            a = setup_mul(a, a);
            e >>= 1u;
        }
        return r;
    }

    void build_tables() {
        const std::uint64_t q1 = q_ - 1;

        neg_.resize(q_);
        for (std::uint64_t a = 0; a < q_; ++a) {
            std::uint32_t acc = 0, mult = 1, v = static_cast<std::uint32_t>(a);
            for (std::uint32_t i = 0; i < n_; ++i) {
                const std::uint32_t d = v % p_;
                acc += (d ? p_ - d : 0) * mult;
                v /= p_;
                mult *= p_;
            }
            neg_[a] = acc;
        }

        if (p_ < 256 && n_ > 1) {
            digits_.resize(q_ * n_);
            for (std::uint64_t a = 0; a < q_; ++a) {
                std::uint32_t v = static_cast<std::uint32_t>(a);
                for (std::uint32_t i = 0; i < n_; ++i) {
                    digits_[a * n_ + i] = static_cast<std::uint8_t>(v % p_);
                    v /= p_;
                }
            }
            dsum_.resize(static_cast<std::size_t>(p_) * p_);
            for (std::uint32_t x = 0; x < p_; ++x)
                for (std::uint32_t y = 0; y < p_; ++y) {
                    std::uint32_t s = x + y;
                    if (s >= p_) s -= p_;
                    dsum_[static_cast<std::size_t>(x) * p_ + y] = static_cast<std::uint8_t>(s);
                }
            pw_.resize(static_cast<std::size_t>(n_) * p_);
            std::uint32_t mult = 1;
            for (std::uint32_t i = 0; i < n_; ++i) {
                for (std::uint32_t d = 0; d < p_; ++d) pw_[i * p_ + d] = d * mult;
                mult *= p_;
            }
        }

        // Smallest-index generator of the multiplicative group.
        const auto factors = detail::prime_factors(q1);
        std::uint32_t g = 1;
        for (std::uint64_t cand = 1; cand < q_; ++cand) {
            bool ok = true;
            for (std::uint64_t l : factors) {
                if (setup_pow(static_cast<std::uint32_t>(cand), q1 / l) == 1) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                g = static_cast<std::uint32_t>(cand);
                break;
            }
        }

        exp_.resize(2 * q1);
        log_.assign(q_, 0);
        std::uint32_t acc = 1;
        for (std::uint64_t k = 0; k < q1; ++k) {
            exp_[k] = acc;
            exp_[k + q1] = acc;
            log_[acc] = static_cast<std::uint32_t>(k);
            acc = setup_mul(acc, g);
        }

        frob_.resize(q_);
        frob_[0] = 0;
        for (std::uint64_t a = 1; a < q_; ++a)
            frob_[a] = exp_[static_cast<std::uint64_t>(log_[a]) * (p_ % q1) % q1];
    }

    std::uint32_t p_ = 0;
    std::uint32_t n_ = 0;
    std::uint64_t q_ = 0;
    std::vector<std::uint32_t> modulus_;
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::uint32_t> frob_;
    std::vector<std::uint32_t> neg_;
    std::vector<std::uint8_t> digits_;
    std::vector<std::uint8_t> dsum_;
    std::vector<std::uint32_t> pw_;
};

inline Field make_field(std::uint32_t p, std::uint32_t n) { return Field(p, n); }

inline FieldElement frobenius(FieldElement a, std::uint64_t k) {
    return {a.field, a.field->frob(a.idx, k)};
}

// The p^d elements fixed by Fr^d, in index order.  Subfields are membership
// predicates inside the ambient field; there are no embedded field objects.
inline std::vector<FieldElement> subfield_elements(const Field& F, std::uint32_t d) {
    if (d == 0 || F.degree() % d != 0)
        throw Error("subfield degree " + std::to_string(d) + " does not divide " + std::to_string(F.degree()));
    std::vector<FieldElement> out;
    for (std::uint64_t a = 0; a < F.cardinality(); ++a)
        if (F.in_subfield(static_cast<std::uint32_t>(a), d)) out.push_back({&F, static_cast<std::uint32_t>(a)});
    return out;
}

inline std::vector<std::uint32_t> subfield_indices(const Field& F, std::uint32_t d) {
    if (d == 0 || F.degree() % d != 0)
        throw Error("subfield degree " + std::to_string(d) + " does not divide " + std::to_string(F.degree()));
    std::vector<std::uint32_t> out;
    for (std::uint64_t a = 0; a < F.cardinality(); ++a)
        if (F.in_subfield(static_cast<std::uint32_t>(a), d)) out.push_back(static_cast<std::uint32_t>(a));
    return out;
}

inline FieldElement operator+(FieldElement a, FieldElement b) { return {a.field, a.field->add(a.idx, b.idx)}; }
inline FieldElement operator-(FieldElement a, FieldElement b) { return {a.field, a.field->sub(a.idx, b.idx)}; }
inline FieldElement operator*(FieldElement a, FieldElement b) { return {a.field, a.field->mul(a.idx, b.idx)}; }
inline FieldElement operator/(FieldElement a, FieldElement b) { return {a.field, a.field->div(a.idx, b.idx)}; }
inline FieldElement operator-(FieldElement a) { return {a.field, a.field->neg(a.idx)}; }

}  // namespace fqc
