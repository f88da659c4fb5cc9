#pragma once

#include "fqc/eval.hpp"
#include "fqc/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace fqc {

struct GrowthSample {
    int m = 0;
    Integer count;
};

// Growth classification with an explicit residual witness: POWER means
// |B_m - mu q^{rm}| <= C q^{rm}/q^{m/2} held on every sample (the witness
// exponent is floored to keep C rational).  This is a sample-level
// classification, never an asymptotic proof.
struct GrowthClass {
    enum class Kind { Zero, Bounded, Power } kind = Kind::Zero;
    int r = 0;      // Power only, >= 1
    Rational mu;    // Power only, > 0
    Rational C;     // residual bound witness

    std::string kind_name() const {
        switch (kind) {
            case Kind::Zero: return "ZERO";
            case Kind::Bounded: return "BOUNDED";
            case Kind::Power: return "POWER";
        }
        return "?";
    }
};

inline constexpr std::int64_t kMuDenominatorCap = 1000000;

inline GrowthClass classify_growth(std::vector<GrowthSample> samples, std::uint64_t q) {
    if (q < 2) throw Error("classify_growth: base must be >= 2");
    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.m < b.m; });
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].m == samples[i - 1].m) throw Error("classify_growth: duplicate sample index");
    if (samples.size() < 4) throw Error("classify_growth: need at least 4 samples");
    for (const auto& s : samples)
        if (s.count < 0) throw Error("classify_growth: negative count");

    GrowthClass out;
    Integer max_count = 0;
    for (const auto& s : samples) max_count = std::max(max_count, s.count);
    if (max_count == 0) {
        out.kind = GrowthClass::Kind::Zero;
        out.C = 0;
        return out;
    }

    auto bounded = [&] {
        GrowthClass g;
        g.kind = GrowthClass::Kind::Bounded;
        g.C = Rational(max_count);
        return g;
    };

    // Leading exponent from the two largest nonzero samples; small-m noise
    // is ignored by construction.
    const GrowthSample* top = nullptr;
    const GrowthSample* prev = nullptr;
    for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
        if (it->count == 0) continue;
        if (!top)
            top = &*it;
        else if (!prev) {
            prev = &*it;
            break;
        }
    }
    if (!top || !prev) return bounded();

    const double logq = std::log2(static_cast<double>(q));
    const double slope =
        (log2_approx(top->count) - log2_approx(prev->count)) / (static_cast<double>(top->m - prev->m) * logq);
    const int r = static_cast<int>(std::lround(slope));
    if (r <= 0) return bounded();

    const Rational x_top = Rational(top->count) / Rational(ipow(Integer(q), static_cast<unsigned>(r * top->m)));
    const Rational x_prev = Rational(prev->count) / Rational(ipow(Integer(q), static_cast<unsigned>(r * prev->m)));
    Rational mu;
    if (x_top == x_prev)
        mu = x_top;
    else {
        const Rational delta = x_top > x_prev ? x_top - x_prev : x_prev - x_top;
        mu = simplest_rational_in_interval(x_top - delta, x_top + delta);
    }
    if (denominator(mu) > kMuDenominatorCap) mu = cap_denominator(mu, Integer(kMuDenominatorCap));
    if (mu <= 0) return bounded();

    // Witness: C = max |B_m - mu q^{rm}| / q^{floor(m(2r-1)/2)}.
    Rational C(0);
    for (const auto& s : samples) {
        const Rational main = mu * Rational(ipow(Integer(q), static_cast<unsigned>(r * s.m)));
        Rational resid = Rational(s.count) - main;
        if (resid < 0) resid = -resid;
        const unsigned denom_exp = static_cast<unsigned>((s.m * (2 * r - 1)) / 2);
        const Rational scaled = resid / Rational(ipow(Integer(q), denom_exp));
        C = std::max(C, scaled);
    }

    out.kind = GrowthClass::Kind::Power;
    out.r = r;
    out.mu = mu;
    out.C = C;
    return out;
}

// ---------------------------------------------------------------------------
// Felgner refutation harness
// ---------------------------------------------------------------------------

struct FelgnerRow {
    std::uint64_t p = 0;
    Integer count;       // satisfying x' in F_{p^2}
    std::uint64_t target = 0;  // p
    Integer gap;         // |count - p|
};

enum class FelgnerConclusion { RefutedAtSamples, MatchedSomewhere };

// Sample-level verdict: REFUTED_AT_SAMPLES only when count != p at every
// sampled prime.  The cross-prime growth fit treats the counts as a
// sequence in sample order with the smallest prime as nominal base; it is
// heuristic and advisory only.
struct FelgnerVerdict {
    std::vector<FelgnerRow> rows;
    FelgnerConclusion conclusion = FelgnerConclusion::RefutedAtSamples;
    bool growth_valid = false;
    GrowthClass growth;  // advisory
};

inline FelgnerVerdict felgner_test(const Formula& f, const std::vector<std::uint64_t>& primes,
                                   const EvalOptions& opts = {}) {
    if (f.free.size() != 1)
        throw Error("felgner_test: formula must have exactly one free variable, got " +
                    std::to_string(f.free.size()));
    if (f.free[0].sort != 2)
        throw Error("felgner_test: the free variable must have sort 2 (ranges over F_{p^2})");
    for (const auto& b : f.prefix)
        if (b.sort != 2) throw Error("felgner_test: bound variables must have sort 2");
    if (primes.empty()) throw Error("felgner_test: no primes given");
    for (std::uint64_t p : primes)
        if (!detail::is_prime_u64(p)) throw Error("felgner_test: " + std::to_string(p) + " is not prime");

    FelgnerVerdict verdict;
    bool matched = false;
    for (std::uint64_t p : primes) {
        Field ambient(static_cast<std::uint32_t>(p), 2);
        FelgnerRow row;
        row.p = p;
        row.target = p;
        row.count = count_satisfying(f, ambient, opts);
        row.gap = row.count >= Integer(p) ? row.count - Integer(p) : Integer(p) - row.count;
        if (row.gap == 0) matched = true;
        verdict.rows.push_back(std::move(row));
    }
    verdict.conclusion = matched ? FelgnerConclusion::MatchedSomewhere : FelgnerConclusion::RefutedAtSamples;

    if (verdict.rows.size() >= 4) {
        std::vector<GrowthSample> samples;
        for (std::size_t i = 0; i < verdict.rows.size(); ++i)
            samples.push_back({static_cast<int>(i + 1), verdict.rows[i].count});
        std::uint64_t base = *std::min_element(primes.begin(), primes.end());
        try {
            verdict.growth = classify_growth(std::move(samples), base);
            verdict.growth_valid = true;
        } catch (const Error&) {
            verdict.growth_valid = false;
        }
    }
    return verdict;
}

}  // namespace fqc
