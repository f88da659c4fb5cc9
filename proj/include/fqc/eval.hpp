#pragma once

#include "fqc/formula.hpp"
#include "fqc/gf.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace fqc {

// Quantifier-domain convention for Poincare coefficients.  LIFTED scales
// every sort by the extension level m; BASE lifts only the free variables
// (bound variables keep their original subfields).  LIFTED is the default
// everywhere.
enum class CoefficientMode { Lifted, Base };

inline std::string to_string(CoefficientMode m) { return m == CoefficientMode::Lifted ? "lifted" : "base"; }

struct EvalOptions {
    Integer budget{1000000000};  // estimated field operations
    int threads = 1;
};

// Base field spec q = p^n.
struct FieldSpec {
    std::uint32_t p = 0;
    std::uint32_t n = 1;
    std::uint64_t q() const { return pow_u64(p, n); }
    std::string label() const { return std::to_string(p) + "^" + std::to_string(n); }
};

// Accepts "p^n" or a plain prime power.
inline FieldSpec parse_field_spec(const std::string& tok) {
    const auto caret = tok.find('^');
    auto parse_u32 = [&](const std::string& s) -> std::uint32_t {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw Error("bad field spec '" + tok + "'");
        const unsigned long v = std::stoul(s);
        if (v == 0 || v > Field::kMaxCardinality) throw Error("bad field spec '" + tok + "'");
        return static_cast<std::uint32_t>(v);
    };
    if (caret != std::string::npos) {
        FieldSpec fs{parse_u32(tok.substr(0, caret)), parse_u32(tok.substr(caret + 1))};
        if (!detail::is_prime_u64(fs.p)) throw Error("field spec '" + tok + "': characteristic is not prime");
        return fs;
    }
    std::uint32_t q = parse_u32(tok);
    for (std::uint32_t p = 2; p <= q; ++p) {
        if (!detail::is_prime_u64(p) || q % p != 0) continue;
        std::uint32_t n = 0, v = q;
        while (v % p == 0) {
            v /= p;
            ++n;
        }
        if (v != 1) throw Error("field spec '" + tok + "' is not a prime power");
        return {p, n};
    }
    throw Error("bad field spec '" + tok + "'");
}

struct CountSequence {
    std::uint64_t q = 0;  // base cardinality
    CoefficientMode mode = CoefficientMode::Lifted;
    std::vector<Integer> coefficients;  // coefficient m at index m-1

    const Integer& at(int m) const { return coefficients.at(static_cast<std::size_t>(m - 1)); }
    int max_index() const { return static_cast<int>(coefficients.size()); }
};

namespace detail {

struct PlanMonomial {
    std::uint32_t coeff;
    std::vector<std::pair<int, int>> pows;  // (slot, exponent), innermost slot excluded
};

struct PlanAtom {
    bool neq = false;
    std::vector<std::vector<PlanMonomial>> groups;  // by innermost-variable exponent
};

// Effective sort per variable; returning 0 is invalid.
using SortMap = std::function<std::uint32_t(VarId, std::uint32_t declared, bool is_free)>;

// Cost model shared by budget pre-flight and plan construction: one unit
// per atom plus (1 + 2 * factor count) per monomial, times the assignment
// count.
template <class V>
Integer ops_estimate(const BasicFormula<V>& f) {
    Integer ops{1};
    for (const auto& atom : f.atoms) {
        ops += 1;
        for (const auto& [mono, coeff] : atom.poly.terms) ops += 1 + 2 * static_cast<int>(mono.powers.size());
    }
    return ops;
}

struct Plan {
    const Field* F = nullptr;
    int n_slots = 0;
    int n_free = 0;
    std::vector<const std::vector<std::uint32_t>*> domains;  // per slot
    std::vector<char> universal;                             // per slot (bound slots)
    std::vector<PlanAtom> atoms;
    std::vector<Node> nodes;  // owned: plans outlive the formula they came from
    int root = -1;
    std::map<std::uint32_t, std::vector<std::uint32_t>> domain_storage;
    Integer total_assignments{1};
    Integer ops_per_assignment{1};
};

inline Plan build_plan(const FieldFormula& f, const Field& F, const SortMap& sort_map) {
    Plan plan;
    plan.F = &F;
    plan.nodes = f.nodes;
    plan.root = f.root;

    std::vector<std::pair<VarId, std::uint32_t>> order;  // (var, effective sort)
    for (const auto& fv : f.free) order.emplace_back(fv.var, sort_map(fv.var, fv.sort, true));
    plan.n_free = static_cast<int>(order.size());
    for (const auto& b : f.prefix)
        for (VarId v : b.vars) order.emplace_back(v, sort_map(v, b.sort, false));
    plan.n_slots = static_cast<int>(order.size());

    std::map<VarId, int> slot_of;
    for (int s = 0; s < plan.n_slots; ++s) slot_of[order[static_cast<std::size_t>(s)].first] = s;

    plan.universal.assign(static_cast<std::size_t>(plan.n_slots), 0);
    {
        int s = plan.n_free;
        for (const auto& b : f.prefix)
            for (std::size_t i = 0; i < b.vars.size(); ++i) plan.universal[static_cast<std::size_t>(s++)] = b.universal;
    }

    for (const auto& [v, sort] : order) {
        if (sort == 0 || F.degree() % sort != 0)
            throw Error("sort " + std::to_string(sort) + " of variable '" +
                        f.names[static_cast<std::size_t>(v)] + "' is incompatible with ambient field " + F.label());
        if (!plan.domain_storage.count(sort)) plan.domain_storage[sort] = subfield_indices(F, sort);
    }
    plan.domains.resize(static_cast<std::size_t>(plan.n_slots));
    for (int s = 0; s < plan.n_slots; ++s)
        plan.domains[static_cast<std::size_t>(s)] = &plan.domain_storage[order[static_cast<std::size_t>(s)].second];

    const int inner = plan.n_slots - 1;
    for (const auto& atom : f.atoms) {
        PlanAtom pa;
        pa.neq = atom.op == AtomOp::Neq;
        for (const auto& [mono, coeff] : atom.poly.terms) {
            PlanMonomial pm;
            pm.coeff = coeff;
            int inner_exp = 0;
            for (const auto& [v, e] : mono.powers) {
                const int s = slot_of.at(v);
                if (s == inner)
                    inner_exp = e;
                else
                    pm.pows.emplace_back(s, e);
            }
            if (static_cast<int>(pa.groups.size()) <= inner_exp)
                pa.groups.resize(static_cast<std::size_t>(inner_exp) + 1);
            pa.groups[static_cast<std::size_t>(inner_exp)].push_back(std::move(pm));
        }
        if (pa.groups.empty()) pa.groups.resize(1);
        plan.atoms.push_back(std::move(pa));
    }
    plan.ops_per_assignment = ops_estimate(f);

    for (int s = 0; s < plan.n_slots; ++s)
        plan.total_assignments *= static_cast<std::uint64_t>(plan.domains[static_cast<std::size_t>(s)]->size());
    return plan;
}

inline void check_budget(const Plan& plan, const EvalOptions& opts, const std::string& what) {
    const Integer estimate = plan.total_assignments * plan.ops_per_assignment;
    if (estimate > opts.budget)
        throw BudgetError(what + ": estimated " + estimate.str() + " field operations exceed budget " +
                              opts.budget.str(),
                          estimate, opts.budget);
}

// One evaluation context; workers each own one.
class Evaluator {
public:
    explicit Evaluator(const Plan& plan)
        : plan_(plan),
          assign_(static_cast<std::size_t>(plan.n_slots), 0),
          atom_vals_(plan.atoms.size(), 0),
          node_vals_(plan.nodes.size(), 0) {
        horner_.resize(plan.atoms.size());
        for (std::size_t i = 0; i < plan.atoms.size(); ++i)
            horner_[i].assign(plan_.atoms[i].groups.size(), 0);
    }

    std::uint32_t& slot(int s) { return assign_[static_cast<std::size_t>(s)]; }

    // Truth of the quantified suffix starting at bound slot s; all earlier
    // slots must be assigned.  Innermost-quantifier short-circuiting.
    bool eval_bound(int s) {
        const auto& dom = *plan_.domains[static_cast<std::size_t>(s)];
        const bool universal = plan_.universal[static_cast<std::size_t>(s)];
        if (s == plan_.n_slots - 1) {
            prepare_inner();
            for (std::uint32_t v : dom) {
                const bool r = matrix_at_inner(v);
                if (r != universal) return r;  // exists: stop on witness; forall: stop on counterexample
            }
            return universal;
        }
        for (std::uint32_t v : dom) {
            assign_[static_cast<std::size_t>(s)] = v;
            const bool r = eval_bound(s + 1);
            if (r != universal) return r;
        }
        return universal;
    }

    // Full-matrix evaluation with every slot assigned (no Horner path).
    bool matrix_direct() {
        const Field& F = *plan_.F;
        for (std::size_t i = 0; i < plan_.atoms.size(); ++i) {
            const PlanAtom& a = plan_.atoms[i];
            std::uint32_t acc = 0;
            const int inner = plan_.n_slots - 1;
            for (std::size_t e = 0; e < a.groups.size(); ++e) {
                std::uint32_t ge = group_value(a.groups[e]);
                if (e > 0 && inner >= 0)
                    ge = F.mul(ge, F.pow(assign_[static_cast<std::size_t>(inner)], static_cast<std::uint64_t>(e)));
                acc = F.add(acc, ge);
            }
            atom_vals_[i] = (acc == 0) != a.neq;
        }
        return fold_nodes();
    }

    // Precompute per-atom Horner coefficients from all slots but the last.
    void prepare_inner() {
        for (std::size_t i = 0; i < plan_.atoms.size(); ++i) {
            const PlanAtom& a = plan_.atoms[i];
            for (std::size_t e = 0; e < a.groups.size(); ++e) horner_[i][e] = group_value(a.groups[e]);
        }
    }

    bool matrix_at_inner(std::uint32_t v) {
        const Field& F = *plan_.F;
        for (std::size_t i = 0; i < plan_.atoms.size(); ++i) {
            const auto& h = horner_[i];
            std::uint32_t acc = 0;
            for (std::size_t e = h.size(); e-- > 0;) acc = F.add(F.mul(acc, v), h[e]);
            atom_vals_[i] = (acc == 0) != plan_.atoms[i].neq;
        }
        return fold_nodes();
    }

private:
    std::uint32_t group_value(const std::vector<PlanMonomial>& monos) {
        const Field& F = *plan_.F;
        std::uint32_t acc = 0;
        for (const PlanMonomial& m : monos) {
            std::uint32_t v = m.coeff;
            for (const auto& [s, e] : m.pows)
                v = F.mul(v, F.pow(assign_[static_cast<std::size_t>(s)], static_cast<std::uint64_t>(e)));
            acc = F.add(acc, v);
        }
        return acc;
    }

    // Nodes are in child-before-parent order (parser invariant), so one
    // linear sweep suffices.
    bool fold_nodes() {
        const auto& nodes = plan_.nodes;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Node& n = nodes[i];
            switch (n.kind) {
                case NodeKind::Atom: node_vals_[i] = atom_vals_[static_cast<std::size_t>(n.atom)]; break;
                case NodeKind::Not: node_vals_[i] = !node_vals_[static_cast<std::size_t>(n.a)]; break;
                case NodeKind::And:
                    node_vals_[i] = node_vals_[static_cast<std::size_t>(n.a)] && node_vals_[static_cast<std::size_t>(n.b)];
                    break;
                case NodeKind::Or:
                    node_vals_[i] = node_vals_[static_cast<std::size_t>(n.a)] || node_vals_[static_cast<std::size_t>(n.b)];
                    break;
            }
        }
        return node_vals_[static_cast<std::size_t>(plan_.root)];
    }

    const Plan& plan_;
    std::vector<std::uint32_t> assign_;
    std::vector<char> atom_vals_;
    std::vector<char> node_vals_;
    std::vector<std::vector<std::uint32_t>> horner_;
};

// Counts satisfying free assignments in the flattened outer index range
// [lo, hi).  When bound variables exist the outer space is the whole free
// space; otherwise the last free slot runs as the Horner inner loop.
inline Integer count_chunk(const Plan& plan, std::uint64_t lo, std::uint64_t hi, bool inner_is_free) {
    Evaluator ev(plan);
    const int outer_slots = inner_is_free ? plan.n_free - 1 : plan.n_free;
    std::vector<std::uint64_t> radix(static_cast<std::size_t>(outer_slots));
    for (int s = 0; s < outer_slots; ++s) radix[static_cast<std::size_t>(s)] = plan.domains[static_cast<std::size_t>(s)]->size();

    std::vector<std::uint64_t> digit(static_cast<std::size_t>(outer_slots), 0);
    std::uint64_t rest = lo;
    for (int s = outer_slots; s-- > 0;) {
        digit[static_cast<std::size_t>(s)] = rest % radix[static_cast<std::size_t>(s)];
        rest /= radix[static_cast<std::size_t>(s)];
    }
    for (int s = 0; s < outer_slots; ++s)
        ev.slot(s) = (*plan.domains[static_cast<std::size_t>(s)])[digit[static_cast<std::size_t>(s)]];

    Integer count = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
        if (inner_is_free) {
            ev.prepare_inner();
            const auto& dom = *plan.domains[static_cast<std::size_t>(plan.n_free - 1)];
            for (std::uint32_t v : dom)
                if (ev.matrix_at_inner(v)) ++count;
        } else if (plan.n_slots > plan.n_free) {
            if (ev.eval_bound(plan.n_free)) ++count;
        } else {
            if (ev.matrix_direct()) ++count;
        }
        // odometer step
        for (int s = outer_slots; s-- > 0;) {
            if (++digit[static_cast<std::size_t>(s)] < radix[static_cast<std::size_t>(s)]) {
                ev.slot(s) = (*plan.domains[static_cast<std::size_t>(s)])[digit[static_cast<std::size_t>(s)]];
                break;
            }
            digit[static_cast<std::size_t>(s)] = 0;
            ev.slot(s) = (*plan.domains[static_cast<std::size_t>(s)])[0];
        }
    }
    return count;
}

inline Integer count_parallel(const Plan& plan, const EvalOptions& opts) {
    const bool inner_is_free = plan.n_slots == plan.n_free && plan.n_free >= 1;
    std::uint64_t outer = 1;
    const int outer_slots = inner_is_free ? plan.n_free - 1 : plan.n_free;
    for (int s = 0; s < outer_slots; ++s) {
        const std::uint64_t d = plan.domains[static_cast<std::size_t>(s)]->size();
        if (outer > UINT64_MAX / std::max<std::uint64_t>(d, 1)) throw Error("enumeration space too large");
        outer *= d;
    }

    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(std::min<std::uint64_t>(outer, 256))));
    if (threads <= 1 || outer <= 1) return count_chunk(plan, 0, outer, inner_is_free);

    std::vector<Integer> partial(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const std::uint64_t lo = outer * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(threads);
        const std::uint64_t hi = outer * static_cast<std::uint64_t>(t + 1) / static_cast<std::uint64_t>(threads);
        pool.emplace_back([&plan, &partial, t, lo, hi, inner_is_free] {
            partial[static_cast<std::size_t>(t)] = count_chunk(plan, lo, hi, inner_is_free);
        });
    }
    for (auto& th : pool) th.join();
    Integer total = 0;
    for (const Integer& c : partial) total += c;  // fixed order; exact either way
    return total;
}

inline SortMap identity_sorts() {
    return [](VarId, std::uint32_t declared, bool) { return declared; };
}

}  // namespace detail

// Truth of a closed formula: sort-d variables range over the degree-d
// subfield of the ambient field, quantifiers nest outermost-first.
inline bool decide(const FieldFormula& f, const Field& ambient, const EvalOptions& opts = {}) {
    if (!f.free.empty())
        throw Error("decide: formula has free variables (" + free_variables(f)[0] + ", ...)");
    detail::Plan plan = detail::build_plan(f, ambient, detail::identity_sorts());
    detail::check_budget(plan, opts, "decide");
    detail::Evaluator ev(plan);
    if (plan.n_slots == 0) return ev.matrix_direct();
    return ev.eval_bound(0);
}

inline bool decide(const Formula& f, const Field& ambient, const EvalOptions& opts = {}) {
    return decide(reduce(f, ambient), ambient, opts);
}

// Number of free assignments (each within its sort subfield) whose
// substitution makes the quantified matrix true.
inline Integer count_satisfying(const FieldFormula& f, const Field& ambient, const EvalOptions& opts = {}) {
    detail::Plan plan = detail::build_plan(f, ambient, detail::identity_sorts());
    detail::check_budget(plan, opts, "count");
    return detail::count_parallel(plan, opts);
}

inline Integer count_satisfying(const Formula& f, const Field& ambient, const EvalOptions& opts = {}) {
    return count_satisfying(reduce(f, ambient), ambient, opts);
}

namespace detail {

inline Integer count_with_sorts(const Formula& f, const Field& ambient, const SortMap& sorts,
                                const EvalOptions& opts, const std::string& what) {
    Plan plan = build_plan(reduce(f, ambient), ambient, sorts);
    check_budget(plan, opts, what);
    return count_parallel(plan, opts);
}

}  // namespace detail

namespace detail {

inline SortMap poincare_sorts(CoefficientMode mode, std::uint32_t base_degree, int m) {
    if (mode == CoefficientMode::Lifted)
        return [m](VarId, std::uint32_t declared, bool) { return declared * static_cast<std::uint32_t>(m); };
    return [m, e = base_degree](VarId, std::uint32_t declared, bool is_free) {
        return is_free ? e * static_cast<std::uint32_t>(m) : declared;
    };
}

}  // namespace detail

// Total estimated field operations across levels m = 1..M; throws
// BudgetError naming the smallest offending m (cap or budget).
inline Integer poincare_cost(const Formula& f, FieldSpec base, int M, CoefficientMode mode,
                             const EvalOptions& opts) {
    if (M < 1) throw Error("poincare_coefficients: M must be >= 1");
    const Integer per_assignment = detail::ops_estimate(f);
    Integer total = 0;
    for (int m = 1; m <= M; ++m) {
        const std::uint32_t ambient_deg = base.n * static_cast<std::uint32_t>(m);
        std::uint64_t card = 1;
        bool over = false;
        for (std::uint32_t i = 0; i < ambient_deg; ++i) {
            card *= base.p;
            if (card > Field::kMaxCardinality) {
                over = true;
                break;
            }
        }
        if (over)
            throw BudgetError("poincare_coefficients: ambient cardinality exceeds cap at m = " + std::to_string(m),
                              Integer(-1), opts.budget);
        const auto sorts = detail::poincare_sorts(mode, base.n, m);
        Integer assignments{1};
        auto account = [&](VarId v, std::uint32_t declared, bool is_free) {
            const std::uint32_t s = sorts(v, declared, is_free);
            if (s == 0 || ambient_deg % s != 0)
                throw Error("poincare_coefficients: sort " + std::to_string(declared) +
                            " is incompatible with ambient field at m = " + std::to_string(m));
            assignments *= ipow(Integer(base.p), s);
        };
        for (const auto& fv : f.free) account(fv.var, fv.sort, true);
        for (const auto& b : f.prefix)
            for (VarId v : b.vars) account(v, b.sort, false);
        const Integer estimate = assignments * per_assignment;
        if (estimate > opts.budget)
            throw BudgetError("poincare_coefficients: budget exceeded at m = " + std::to_string(m) +
                                  " (estimated " + estimate.str() + " > " + opts.budget.str() + ")",
                              estimate, opts.budget);
        total += estimate;
    }
    return total;
}

// Estimated field operations for one count/decide call.
inline Integer estimate_cost(const Formula& f, const Field& ambient) {
    detail::Plan plan = detail::build_plan(reduce(f, ambient), ambient, detail::identity_sorts());
    return plan.total_assignments * plan.ops_per_assignment;
}

// Poincare coefficients mu(F, q, m) for m = 1..M: the count over the
// ambient field F_{q^m}.  Refuses up front (smallest offending m) when any
// level exceeds the budget or the cardinality cap.
inline CountSequence poincare_coefficients(const Formula& f, FieldSpec base, int M,
                                           CoefficientMode mode = CoefficientMode::Lifted,
                                           const EvalOptions& opts = {}) {
    poincare_cost(f, base, M, mode, opts);  // pre-flight: refuse before computing anything

    CountSequence seq;
    seq.q = base.q();
    seq.mode = mode;
    for (int m = 1; m <= M; ++m) {
        Field ambient(base.p, base.n * static_cast<std::uint32_t>(m));
        seq.coefficients.push_back(detail::count_with_sorts(f, ambient, detail::poincare_sorts(mode, base.n, m),
                                                            opts, "poincare_coefficients"));
    }
    return seq;
}

}  // namespace fqc
