#pragma once

#include "fqc/covers.hpp"
#include "fqc/dichotomy.hpp"
#include "fqc/eval.hpp"
#include "fqc/series.hpp"
#include "fqc/twisted.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fqc {

// Insertion-ordered JSON keeps structured reports byte-stable.  Big
// integers serialize as decimal strings and rationals as "num/den": the
// exactness contract survives the wire.
using Json = nlohmann::ordered_json;

inline Json json_of(const Integer& v) { return v.str(); }
inline Json json_of(const Rational& v) { return to_string(v); }

inline Json json_of(const std::vector<Integer>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(json_of(x));
    return a;
}

inline Json json_of(const std::vector<Rational>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(json_of(x));
    return a;
}

inline Json json_of(const RationalFunction& r) {
    Json j;
    j["numerator"] = json_of(r.num);
    j["denominator"] = json_of(r.den);
    j["display"] = r.str();
    return j;
}

inline Json json_of(const CountSequence& seq) {
    Json j;
    j["q"] = seq.q;
    j["mode"] = to_string(seq.mode);
    j["coefficients"] = json_of(seq.coefficients);
    return j;
}

inline Json json_of(const SeriesFit& fit) {
    Json j;
    j["status"] = fit.result ? "FIT" : "NO_FIT";
    if (fit.result) {
        j["rational_function"] = json_of(*fit.result);
        j["recurrence_order"] = fit.recurrence_order;
        j["total_degree"] = total_degree(*fit.result);
        j["spare_confirmations"] = fit.spare;
    }
    j["coefficients_used"] = fit.coefficients_used;
    return j;
}

inline Json json_of(const GrowthClass& g) {
    Json j;
    j["kind"] = g.kind_name();
    if (g.kind == GrowthClass::Kind::Power) {
        j["r"] = g.r;
        j["mu"] = json_of(g.mu);
    }
    j["C"] = json_of(g.C);
    return j;
}

inline Json json_of(const FelgnerVerdict& v) {
    Json j;
    Json rows = Json::array();
    for (const auto& row : v.rows) {
        Json r;
        r["p"] = row.p;
        r["count"] = json_of(row.count);
        r["target"] = row.target;
        r["gap"] = json_of(row.gap);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["conclusion"] =
        v.conclusion == FelgnerConclusion::RefutedAtSamples ? "REFUTED_AT_SAMPLES" : "MATCHED_SOMEWHERE";
    if (v.growth_valid) j["cross_prime_growth_advisory"] = json_of(v.growth);
    return j;
}

inline Json json_of(const Census& census) {
    Json j;
    Json rows = Json::array();
    for (const auto& [type, count] : census.counts) {
        Json r;
        std::string label;
        for (std::size_t i = 0; i < type.size(); ++i) {
            if (i) label += "+";
            label += std::to_string(type[i]);
        }
        r["cycle_type"] = label;
        r["count"] = json_of(count);
        rows.push_back(std::move(r));
    }
    j["classes"] = std::move(rows);
    j["ramified"] = json_of(census.ramified);
    return j;
}

inline Json json_of(const ExceptionalityReport& rep) {
    Json j;
    j["q"] = rep.base.q();
    j["M"] = rep.M;
    j["projective"] = rep.projective;
    j["degenerate"] = rep.degenerate;
    Json flags = Json::array();
    for (char f : rep.flags) flags.push_back(static_cast<bool>(f));
    j["flags"] = std::move(flags);
    j["coefficients"] = json_of(rep.coefficients);
    if (rep.detected_period)
        j["detected_period"] = *rep.detected_period;
    else
        j["detected_period"] = nullptr;
    j["exceptional"] = rep.exceptional;
    j["period_reverified"] = rep.period_reverified;
    j["reverify_window"] = rep.reverify_window;
    return j;
}

inline Json json_of(const ExceptionalPoincare& ep) {
    Json j;
    j["scan"] = json_of(ep.scan);
    j["sequence"] = json_of(ep.seq);
    Json checks = Json::array();
    for (const auto& check : ep.checks) {
        Json c;
        c["m"] = check.m;
        c["coefficient"] = json_of(check.coefficient);
        c["expected"] = json_of(check.expected);
        c["match"] = check.match;
        c["geometric_sum_alt"] = json_of(check.geometric_sum_alt);
        checks.push_back(std::move(c));
    }
    j["closed_form_checks"] = std::move(checks);
    return j;
}

inline Json json_of(const TwistedProbe& probe) {
    Json j;
    j["sequence"] = json_of(probe.seq);
    j["fit"] = json_of(probe.fit);
    if (probe.fitted_total_degree) j["fitted_total_degree"] = *probe.fitted_total_degree;
    return j;
}

// One report per CLI invocation.  Execution-only parameters (threads,
// timing) stay out: structured output is byte-identical across thread
// counts, and timing goes to stderr.
struct Report {
    std::string command;
    Json inputs = Json::object();
    Json results = Json::object();
    std::string budget_limit;
    std::string estimated_field_ops;  // empty when not applicable

    Json to_json() const {
        Json j;
        j["command"] = command;
        j["inputs"] = inputs;
        j["results"] = results;
        Json b;
        b["limit"] = budget_limit;
        if (!estimated_field_ops.empty()) b["estimated_field_ops"] = estimated_field_ops;
        j["budget"] = std::move(b);
        return j;
    }
};

inline std::string emit_structured(const Report& r) { return r.to_json().dump(2) + "\n"; }

namespace detail {

inline std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    return v.dump();
}

inline bool is_scalar(const Json& v) { return !v.is_object() && !v.is_array(); }

inline void render_text(const Json& v, std::string& out, int indent);

// uniform arrays of flat objects render as aligned tables
inline bool render_table(const Json& arr, std::string& out, int indent) {
    if (arr.empty() || !arr[0].is_object()) return false;
    std::vector<std::string> cols;
    for (auto it = arr[0].begin(); it != arr[0].end(); ++it) cols.push_back(it.key());
    for (const auto& row : arr) {
        if (!row.is_object() || row.size() != cols.size()) return false;
        for (const auto& c : cols)
            if (!row.contains(c) || !is_scalar(row[c])) return false;
    }
    std::vector<std::size_t> width(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) width[i] = cols[i].size();
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : arr) {
        std::vector<std::string> line;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            line.push_back(scalar_text(row[cols[i]]));
            width[i] = std::max(width[i], line.back().size());
        }
        cells.push_back(std::move(line));
    }
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    auto emit_row = [&](const std::vector<std::string>& line) {
        out += pad;
        for (std::size_t i = 0; i < line.size(); ++i) {
            out += line[i];
            if (i + 1 < line.size()) out += std::string(width[i] - line[i].size() + 2, ' ');
        }
        out += "\n";
    };
    emit_row(cols);
    std::vector<std::string> rule;
    for (std::size_t i = 0; i < cols.size(); ++i) rule.push_back(std::string(width[i], '-'));
    emit_row(rule);
    for (const auto& line : cells) emit_row(line);
    return true;
}

inline void render_text(const Json& v, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (is_scalar(it.value())) {
                out += pad + it.key() + ": " + scalar_text(it.value()) + "\n";
            } else if (it.value().is_array() && (it.value().empty() || is_scalar(it.value()[0]))) {
                std::string line;
                for (const auto& e : it.value()) {
                    if (!line.empty()) line += ", ";
                    line += scalar_text(e);
                }
                out += pad + it.key() + ": [" + line + "]\n";
            } else {
                out += pad + it.key() + ":\n";
                render_text(it.value(), out, indent + 2);
            }
        }
    } else if (v.is_array()) {
        if (render_table(v, out, indent)) return;
        for (const auto& e : v) {
            if (is_scalar(e))
                out += pad + "- " + scalar_text(e) + "\n";
            else {
                out += pad + "-\n";
                render_text(e, out, indent + 2);
            }
        }
    } else {
        out += pad + scalar_text(v) + "\n";
    }
}

}  // namespace detail

// Same data as the structured form, rendered as headed key/value blocks
// and aligned tables.
inline std::string emit_text(const Report& r) {
    std::string out;
    out += "== " + r.command + " ==\n";
    detail::render_text(r.to_json(), out, 0);
    return out;
}

}  // namespace fqc
