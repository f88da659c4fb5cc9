#pragma once

#include "fqc/eval.hpp"
#include "fqc/formula.hpp"
#include "fqc/poly.hpp"

#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fqc {

// Multiset of irreducible-factor degrees of a fiber polynomial, ascending.
// A part equal to 1 means the fiber has a rational point.
using CycleType = std::vector<int>;

struct FiberClass {
    bool ramified = false;
    CycleType type;  // empty when ramified

    bool operator==(const FiberClass&) const = default;
};

// A plane cover f(x, y) = 0 mapped to the x-line; y is the fiber variable.
struct Cover {
    Poly<Integer> f;
    std::vector<std::string> names;  // VarId -> name
    VarId xv = -1;                   // -1 when f does not mention x
    VarId yv = -1;
    int deg_y = 0;
};

// Accepts "y^3 - x" or "y^3 - x = 0"; variables must be x and y, with y of
// positive degree.
inline Cover parse_cover(const std::string& text) {
    std::string src = text;
    if (src.find('=') == std::string::npos) src += " = 0";
    Formula f = parse(src);
    if (!f.prefix.empty()) throw Error("cover polynomial must not be quantified");
    if (f.atoms.size() != 1 || f.nodes.size() != 1 || f.atoms[0].op != AtomOp::Eq)
        throw Error("cover must be a single polynomial equation");
    Cover c;
    c.f = f.atoms[0].poly;
    c.names = f.names;
    for (VarId v = 0; v < static_cast<VarId>(f.names.size()); ++v) {
        const std::string& n = f.names[static_cast<std::size_t>(v)];
        if (n == "x")
            c.xv = v;
        else if (n == "y")
            c.yv = v;
        else
            throw Error("cover polynomial may only use variables x and y, found '" + n + "'");
    }
    if (c.yv < 0) throw Error("cover polynomial is constant in y");
    c.deg_y = c.f.degree_in(c.yv);
    if (c.deg_y < 1) throw Error("cover polynomial is constant in y");
    return c;
}

namespace detail {

// f(x, y) arranged as univariate-in-y with coefficients univariate in x
// over F, ready for per-fiber specialization.
struct CompiledCover {
    std::vector<FPoly> coeff_in_x;  // index = y-degree
    int deg_y = 0;

    FPoly specialize(const Field& F, std::uint32_t x0) const {
        FPoly g;
        g.c.resize(coeff_in_x.size());
        for (std::size_t j = 0; j < coeff_in_x.size(); ++j) g.c[j] = fpoly::eval(F, coeff_in_x[j], x0);
        g.trim();
        return g;
    }
};

inline CompiledCover compile_cover(const Cover& c, const Field& F) {
    CompiledCover cc;
    cc.coeff_in_x.resize(static_cast<std::size_t>(c.deg_y) + 1);
    for (const auto& [mono, coeff] : c.f.terms) {
        int ydeg = 0, xdeg = 0;
        for (const auto& [v, e] : mono.powers) {
            if (v == c.yv)
                ydeg = e;
            else
                xdeg = e;
        }
        FPoly& target = cc.coeff_in_x[static_cast<std::size_t>(ydeg)];
        if (static_cast<int>(target.c.size()) <= xdeg) target.c.resize(static_cast<std::size_t>(xdeg) + 1, 0);
        target.c[static_cast<std::size_t>(xdeg)] =
            F.add(target.c[static_cast<std::size_t>(xdeg)], F.from_integer(coeff));
    }
    for (auto& p : cc.coeff_in_x) p.trim();
    cc.deg_y = static_cast<int>(cc.coeff_in_x.size()) - 1;
    while (cc.deg_y > 0 && cc.coeff_in_x[static_cast<std::size_t>(cc.deg_y)].is_zero()) --cc.deg_y;
    if (cc.deg_y < 1)
        throw Error("cover degenerates modulo " + std::to_string(F.characteristic()) +
                    ": y-degree drops to " + std::to_string(cc.deg_y));
    if (cc.deg_y != static_cast<int>(cc.coeff_in_x.size()) - 1) cc.coeff_in_x.resize(static_cast<std::size_t>(cc.deg_y) + 1);
    return cc;
}

// Deterministic per-fiber work estimate for budget checks.
inline Integer fiber_cost(const Field& F, int deg_y) {
    const Integer u(deg_y + 1);
    int bits = 1;
    std::uint64_t q = F.cardinality();
    while (q >>= 1) ++bits;
    return u * u * (bits + deg_y + 1);
}

}  // namespace detail

// Cycle type of the Frobenius at x0, read off the distinct-degree
// factorization of f(x0, y); RAMIFIED when the fiber is not separable of
// full degree.
inline FiberClass fiber_cycle_type(const Cover& c, const Field& F, std::uint32_t x0) {
    const detail::CompiledCover cc = detail::compile_cover(c, F);
    FPoly g = cc.specialize(F, x0);
    if (g.degree() < cc.deg_y) return {true, {}};
    FPoly d = fpoly::gcd(F, g, fpoly::derivative(F, g));
    if (d.degree() != 0) return {true, {}};
    return {false, fpoly::distinct_degree_factor_degrees(F, std::move(g))};
}

inline FiberClass fiber_cycle_type(const Cover& c, FieldElement x0) {
    return fiber_cycle_type(c, *x0.field, x0.idx);
}

struct Census {
    std::map<CycleType, Integer> counts;
    Integer ramified{0};
};

// Exact census of fiber classes over all x0 in F.
inline Census frobenius_class_census(const Cover& c, const Field& F, const EvalOptions& opts = {}) {
    const detail::CompiledCover cc = detail::compile_cover(c, F);
    const Integer estimate = Integer(F.cardinality()) * detail::fiber_cost(F, cc.deg_y);
    if (estimate > opts.budget)
        throw BudgetError("frobenius_class_census: estimated " + estimate.str() + " field operations exceed budget " +
                              opts.budget.str(),
                          estimate, opts.budget);

    const std::uint64_t q = F.cardinality();
    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(std::min<std::uint64_t>(q, 64))));
    std::vector<Census> partial(static_cast<std::size_t>(threads));
    auto work = [&](int t) {
        const std::uint64_t lo = q * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(threads);
        const std::uint64_t hi = q * static_cast<std::uint64_t>(t + 1) / static_cast<std::uint64_t>(threads);
        Census& local = partial[static_cast<std::size_t>(t)];
        for (std::uint64_t x0 = lo; x0 < hi; ++x0) {
            FPoly g = cc.specialize(F, static_cast<std::uint32_t>(x0));
            if (g.degree() < cc.deg_y) {
                ++local.ramified;
                continue;
            }
            FPoly d = fpoly::gcd(F, g, fpoly::derivative(F, g));
            if (d.degree() != 0) {
                ++local.ramified;
                continue;
            }
            ++local.counts[fpoly::distinct_degree_factor_degrees(F, std::move(g))];
        }
    };
    if (threads == 1)
        work(0);
    else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    Census total;
    for (const auto& part : partial) {
        total.ramified += part.ramified;
        for (const auto& [type, n] : part.counts) total.counts[type] += n;
    }
    return total;
}

struct ClosedFormCheck {
    int m = 0;
    Integer coefficient;
    Integer expected;           // q^m, +1 with the projective convention
    bool match = false;
    Integer geometric_sum_alt;  // (q^{m+1} - 1)/(q - 1): alternative reading, recorded not asserted
};

// Fiber-point existence pattern of the cover across extensions.
// flags(m): every x0 in F_{q^m} has a rational fiber point.
// coefficients(m): number of x0 with one (plus the point at infinity when
// projective — the projective closure convention adds 1).
struct ExceptionalityReport {
    FieldSpec base;
    int M = 0;
    bool projective = false;
    bool degenerate = false;  // deg_y == 1
    std::vector<char> flags;
    std::vector<Integer> coefficients;
    std::optional<int> detected_period;
    bool exceptional = false;
    bool period_reverified = false;
    int reverify_window = 0;
};

namespace detail {

// flag and count of covered base points over one ambient field
inline std::pair<bool, Integer> scan_level(const Cover& c, const Field& ambient) {
    const CompiledCover cc = compile_cover(c, ambient);
    Integer covered{0};
    bool all = true;
    for (std::uint64_t x0 = 0; x0 < ambient.cardinality(); ++x0) {
        FPoly g = cc.specialize(ambient, static_cast<std::uint32_t>(x0));
        if (fpoly::has_root(ambient, g))
            ++covered;
        else
            all = false;
    }
    return {all, covered};
}

inline std::optional<int> smallest_period(const std::vector<char>& flags) {
    const int M = static_cast<int>(flags.size());
    for (int P = 1; 2 * P <= M; ++P) {
        bool ok = true;
        for (int i = 0; i + P < M; ++i)
            if (flags[static_cast<std::size_t>(i)] != flags[static_cast<std::size_t>(i + P)]) {
                ok = false;
                break;
            }
        if (ok) return P;
    }
    return std::nullopt;
}

// per-level work estimate; nullopt when the ambient exceeds the cap
inline std::optional<Integer> level_cost(const Cover& c, FieldSpec base, int m) {
    std::uint64_t card = 1;
    for (std::uint32_t i = 0; i < base.n * static_cast<std::uint32_t>(m); ++i) {
        card *= base.p;
        if (card > Field::kMaxCardinality) return std::nullopt;
    }
    const Integer u(c.deg_y + 1);
    int bits = 1;
    std::uint64_t q = card;
    while (q >>= 1) ++bits;
    return Integer(card) * u * u * (bits + c.deg_y + 1);
}

inline bool level_feasible(const Cover& c, FieldSpec base, int m, const EvalOptions& opts) {
    const auto cost = level_cost(c, base, m);
    return cost && *cost <= opts.budget;
}

}  // namespace detail

inline Integer census_cost(const Cover& c, const Field& F) {
    return Integer(F.cardinality()) * detail::fiber_cost(F, c.deg_y);
}

inline Integer scan_cost(const Cover& c, FieldSpec base, int M) {
    Integer total = 0;
    for (int m = 1; m <= M; ++m) {
        const auto cost = detail::level_cost(c, base, m);
        if (!cost) throw Error("scan_cost: ambient cardinality exceeds cap at m = " + std::to_string(m));
        total += *cost;
    }
    return total;
}

// Exceptionality detection by flag periodicity: exceptional iff some flag
// is true and the flag sequence is exactly periodic on the window (with one
// full period re-verified on an extension window when budget allows).
inline ExceptionalityReport exceptionality_scan(const Cover& c, FieldSpec base, int M, bool projective = false,
                                                const EvalOptions& opts = {}) {
    if (M < 1) throw Error("exceptionality_scan: M must be >= 1");
    ExceptionalityReport rep;
    rep.base = base;
    rep.M = M;
    rep.projective = projective;
    rep.degenerate = c.deg_y == 1;

    for (int m = 1; m <= M; ++m)
        if (!detail::level_feasible(c, base, m, opts))
            throw BudgetError("exceptionality_scan: budget exceeded at m = " + std::to_string(m), Integer(-1),
                              opts.budget);

    for (int m = 1; m <= M; ++m) {
        Field ambient(base.p, base.n * static_cast<std::uint32_t>(m));
        auto [all, covered] = detail::scan_level(c, ambient);
        rep.flags.push_back(all);
        rep.coefficients.push_back(projective ? covered + 1 : covered);
    }

    rep.detected_period = detail::smallest_period(rep.flags);
    bool any = false;
    for (char fl : rep.flags) any = any || fl;
    rep.exceptional = rep.detected_period.has_value() && any;

    // Re-verify the period claim on an extension window of ceil(M/2)
    // further levels, budget permitting.
    if (rep.detected_period) {
        const int W = (M + 1) / 2;
        const int P = *rep.detected_period;
        rep.reverify_window = 0;
        bool ok = true;
        std::vector<char> extended = rep.flags;
        for (int m = M + 1; m <= M + W; ++m) {
            if (!detail::level_feasible(c, base, m, opts)) break;
            Field ambient(base.p, base.n * static_cast<std::uint32_t>(m));
            const bool all = detail::scan_level(c, ambient).first;
            extended.push_back(all);
            const bool predicted = extended[static_cast<std::size_t>(m - 1 - P)];
            if (all != predicted) {
                ok = false;
                break;
            }
            ++rep.reverify_window;
        }
        rep.period_reverified = ok && rep.reverify_window > 0;
        if (!ok) {
            rep.detected_period = std::nullopt;
            rep.exceptional = false;
        }
    }
    return rep;
}

struct ExceptionalPoincare {
    ExceptionalityReport scan;
    CountSequence seq;
    std::vector<ClosedFormCheck> checks;  // one per flagged m
};

// Polynomial-in-q coefficient check at the flagged levels: the covered
// count must equal the full point count of the base space (q^m affine,
// q^m + 1 with the projective closure).  Mismatches are reported in the
// checks, never silently accepted.
inline ExceptionalPoincare exceptional_poincare(const Cover& c, FieldSpec base, int M, bool projective = false,
                                                const EvalOptions& opts = {}) {
    ExceptionalPoincare out;
    out.scan = exceptionality_scan(c, base, M, projective, opts);
    out.seq.q = base.q();
    out.seq.mode = CoefficientMode::Lifted;
    out.seq.coefficients = out.scan.coefficients;
    const Integer q(base.q());
    for (int m = 1; m <= M; ++m) {
        if (!out.scan.flags[static_cast<std::size_t>(m - 1)]) continue;
        ClosedFormCheck check;
        check.m = m;
        check.coefficient = out.seq.coefficients[static_cast<std::size_t>(m - 1)];
        check.expected = ipow(q, static_cast<unsigned>(m)) + (projective ? 1 : 0);
        check.match = check.coefficient == check.expected;
        check.geometric_sum_alt = (ipow(q, static_cast<unsigned>(m) + 1) - 1) / (q - 1);
        out.checks.push_back(std::move(check));
    }
    return out;
}

}  // namespace fqc
