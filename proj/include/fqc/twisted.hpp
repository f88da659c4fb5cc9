#pragma once

#include "fqc/eval.hpp"
#include "fqc/formula.hpp"
#include "fqc/series.hpp"

#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fqc {

// One Frobenius power per variable: coordinate i ranges over the fixed
// field of Fr_q^{d_i}, i.e. F_{q^{d_i}}.
struct FrobeniusVector {
    std::vector<std::uint32_t> d;

    std::uint32_t lcm() const {
        std::uint32_t l = 1;
        for (std::uint32_t v : d) l = std::lcm(l, v);
        return l;
    }
};

inline FrobeniusVector parse_dvec(const std::string& text) {
    FrobeniusVector fv;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string tok = text.substr(pos, comma - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw Error("bad Frobenius vector '" + text + "'");
        const unsigned long v = std::stoul(tok);
        if (v == 0 || v > 64) throw Error("Frobenius vector entries must be in 1..64");
        fv.d.push_back(static_cast<std::uint32_t>(v));
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    if (fv.d.empty()) throw Error("empty Frobenius vector");
    return fv;
}

// Simultaneous equations f_i = 0 in ordered variables.
struct AffineSystem {
    std::vector<std::string> var_names;    // order of first occurrence
    std::vector<Poly<Integer>> equations;  // indexed over var positions
};

// One equation per line ("poly" or "poly = poly"), '#' comments.  Variables
// are shared across lines.  Quantifiers and inequations are rejected: only
// quantifier-free twisted counting is supported.
inline AffineSystem parse_system(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else
            cur += ch;
    }
    lines.push_back(cur);

    AffineSystem sys;
    auto var_position = [&](const std::string& name) {
        for (std::size_t i = 0; i < sys.var_names.size(); ++i)
            if (sys.var_names[i] == name) return static_cast<VarId>(i);
        sys.var_names.push_back(name);
        return static_cast<VarId>(sys.var_names.size()) - 1;
    };

    for (const std::string& raw : lines) {
        std::string line = raw.substr(0, raw.find('#'));
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.find('=') == std::string::npos) line += " = 0";
        Formula f = parse(line);
        if (!f.prefix.empty())
            throw Error(
                "quantified twisted counting is not supported: systems must be quantifier-free equations "
                "(offending line: '" + raw + "')");
        if (f.atoms.size() != 1 || f.nodes.size() != 1)
            throw Error("each system line must be a single equation (offending line: '" + raw + "')");
        // register the line's variables in occurrence order, even those that
        // cancel out of the normalized polynomial (e.g. "x - x = 0")
        for (const auto& fv : f.free) var_position(f.names[static_cast<std::size_t>(fv.var)]);
        if (f.atoms[0].op == AtomOp::Eq) {
            // remap the line's variable ids into the shared order
            IntegerOps R;
            std::vector<std::pair<Monomial, Integer>> terms;
            for (const auto& [mono, coeff] : f.atoms[0].poly.terms) {
                Monomial nm;
                for (const auto& [v, e] : mono.powers)
                    nm.powers.emplace_back(var_position(f.names[static_cast<std::size_t>(v)]), e);
                std::sort(nm.powers.begin(), nm.powers.end());
                terms.emplace_back(std::move(nm), coeff);
            }
            sys.equations.push_back(polyops::normalized(R, std::move(terms)));
        } else {
            throw Error("systems take equations only; '!=' is not allowed (offending line: '" + raw + "')");
        }
    }
    if (sys.equations.empty()) throw Error("empty system");
    return sys;
}

namespace detail {

struct TwistedPlan {
    const Field* ambient = nullptr;
    std::vector<std::vector<std::uint32_t>> domains;     // per variable position
    std::vector<Poly<std::uint32_t>> equations;          // reduced
    std::uint64_t total = 1;
};

inline Integer twisted_ops_estimate(const AffineSystem& s) {
    Integer ops{1};
    for (const auto& eq : s.equations) {
        ops += 1;
        for (const auto& [mono, coeff] : eq.terms) ops += 1 + 2 * static_cast<int>(mono.powers.size());
    }
    return ops;
}

// Counts solutions in the flattened assignment range [lo, hi); a plain
// odometer enumeration, deliberately independent of the eval module's
// planner so the two can cross-check each other.
inline Integer twisted_chunk(const TwistedPlan& plan, std::uint64_t lo, std::uint64_t hi) {
    const Field& F = *plan.ambient;
    const std::size_t n = plan.domains.size();
    std::vector<std::uint64_t> digit(n, 0);
    std::vector<std::uint32_t> assignment(n, 0);
    std::uint64_t rest = lo;
    for (std::size_t i = n; i-- > 0;) {
        digit[i] = rest % plan.domains[i].size();
        assignment[i] = plan.domains[i][digit[i]];
        rest /= plan.domains[i].size();
    }
    Integer count = 0;
    for (std::uint64_t it = lo; it < hi; ++it) {
        bool ok = true;
        for (const auto& eq : plan.equations) {
            if (polyops::eval(F, eq, assignment) != 0) {
                ok = false;
                break;
            }
        }
        if (ok) ++count;
        for (std::size_t i = n; i-- > 0;) {
            if (++digit[i] < plan.domains[i].size()) {
                assignment[i] = plan.domains[i][digit[i]];
                break;
            }
            digit[i] = 0;
            assignment[i] = plan.domains[i][0];
        }
    }
    return count;
}

}  // namespace detail

// Estimated field operations for one twisted count.
inline Integer twisted_cost(const AffineSystem& s, FieldSpec base, const FrobeniusVector& dvec) {
    Integer assignments{1};
    for (std::uint32_t d : dvec.d) assignments *= ipow(Integer(base.p), base.n * d);
    return assignments * detail::twisted_ops_estimate(s);
}

// Exact count of tuples fixed by the Frobenius vector (x_i in F_{q^{d_i}})
// satisfying every equation.  All coordinates live in one ambient field of
// degree lcm(d) over the base; domains are Frobenius fixed-point filters.
inline Integer twisted_count(const AffineSystem& s, FieldSpec base, const FrobeniusVector& dvec,
                             const EvalOptions& opts = {}) {
    if (dvec.d.size() != s.var_names.size())
        throw Error("twisted_count: Frobenius vector length " + std::to_string(dvec.d.size()) +
                    " != variable count " + std::to_string(s.var_names.size()));
    const std::uint32_t L = dvec.lcm();
    std::uint64_t card = 1;
    for (std::uint32_t i = 0; i < base.n * L; ++i) {
        card *= base.p;
        if (card > Field::kMaxCardinality)
            throw BudgetError("twisted_count: ambient cardinality " + base.label() + " lcm " + std::to_string(L) +
                                  " exceeds cap",
                              Integer(-1), opts.budget);
    }

    const Integer estimate = twisted_cost(s, base, dvec);
    if (estimate > opts.budget)
        throw BudgetError("twisted_count: estimated " + estimate.str() + " field operations exceed budget " +
                              opts.budget.str(),
                          estimate, opts.budget);

    Field ambient(base.p, base.n * L);
    detail::TwistedPlan plan;
    plan.ambient = &ambient;
    for (std::uint32_t d : dvec.d) plan.domains.push_back(subfield_indices(ambient, base.n * d));
    for (const auto& eq : s.equations) plan.equations.push_back(polyops::reduce(ambient, eq));
    std::uint64_t total = 1;
    for (const auto& dom : plan.domains) total *= dom.size();  // fits: counted against the budget above

    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(std::min<std::uint64_t>(total, 64))));
    if (threads <= 1) return detail::twisted_chunk(plan, 0, total);
    std::vector<Integer> partial(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const std::uint64_t lo = total * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(threads);
        const std::uint64_t hi = total * static_cast<std::uint64_t>(t + 1) / static_cast<std::uint64_t>(threads);
        pool.emplace_back([&plan, &partial, t, lo, hi] { partial[static_cast<std::size_t>(t)] = detail::twisted_chunk(plan, lo, hi); });
    }
    for (auto& th : pool) th.join();
    Integer count = 0;
    for (const Integer& c : partial) count += c;
    return count;
}

// Coefficient s = fixed points of Fr_{q^s}^d on the solution set, s = 1..Smax.
inline CountSequence wan_zeta_coefficients(const AffineSystem& s, FieldSpec base, const FrobeniusVector& dvec,
                                           int Smax, const EvalOptions& opts = {}) {
    if (Smax < 1) throw Error("wan_zeta_coefficients: Smax must be >= 1");
    // pre-flight all levels so refusal names the smallest offending s
    for (int lvl = 1; lvl <= Smax; ++lvl) {
        const std::uint32_t L = dvec.lcm();
        std::uint64_t card = 1;
        bool over = false;
        for (std::uint32_t i = 0; i < base.n * static_cast<std::uint32_t>(lvl) * L && !over; ++i) {
            card *= base.p;
            if (card > Field::kMaxCardinality) over = true;
        }
        Integer assignments{1};
        for (std::uint32_t d : dvec.d) assignments *= ipow(Integer(base.p), base.n * static_cast<std::uint32_t>(lvl) * d);
        if (over || assignments * detail::twisted_ops_estimate(s) > opts.budget)
            throw BudgetError("wan_zeta_coefficients: budget exceeded at s = " + std::to_string(lvl), Integer(-1),
                              opts.budget);
    }
    CountSequence seq;
    seq.q = base.q();
    seq.mode = CoefficientMode::Lifted;
    for (int lvl = 1; lvl <= Smax; ++lvl)
        seq.coefficients.push_back(
            twisted_count(s, FieldSpec{base.p, base.n * static_cast<std::uint32_t>(lvl)}, dvec, opts));
    return seq;
}

struct TwistedProbe {
    CountSequence seq;
    SeriesFit fit;
    std::optional<int> fitted_total_degree;
};

// Empirical rationality probe: fit the twisted sequence and report the
// fitted total degree for comparison across (system, d) pairs.
inline TwistedProbe twisted_rationality_probe(const AffineSystem& s, FieldSpec base, const FrobeniusVector& dvec,
                                              int Smax, const EvalOptions& opts = {}) {
    TwistedProbe probe;
    probe.seq = wan_zeta_coefficients(s, base, dvec, Smax, opts);
    probe.fit = fit_rational(probe.seq.coefficients);
    if (probe.fit.result) probe.fitted_total_degree = total_degree(*probe.fit.result);
    return probe;
}

}  // namespace fqc
