// fqcount: count, fit, and classify solutions of quantified polynomial
// statements over finite fields.

#include "fqc/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace fqc;

namespace {

struct Common {
    std::string budget = "1000000000";
    int threads = 0;  // 0: hardware concurrency
    std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--budget", c.budget, "Refuse work above this many estimated field operations")
        ->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency; results never depend on it)")
        ->capture_default_str();
    cmd->add_option("--format", c.format, "Report format")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();
}

EvalOptions opts_of(const Common& c) {
    EvalOptions o;
    if (c.budget.empty() || c.budget.find_first_not_of("0123456789") != std::string::npos)
        throw Error("bad --budget '" + c.budget + "'");
    o.budget = Integer(c.budget);
    o.threads = c.threads > 0 ? c.threads : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    return o;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct FormulaInput {
    std::string inline_text;
    std::string file;

    void add(CLI::App* cmd) {
        cmd->add_option("--formula", inline_text, "Formula (or polynomial) text");
        cmd->add_option("--formula-file", file, "Read the formula from a file");
    }

    std::string text() const {
        if (inline_text.empty() == file.empty())
            throw Error("give exactly one of --formula / --formula-file");
        return file.empty() ? inline_text : read_file(file);
    }
};

std::vector<Integer> parse_coeff_list(const std::string& text) {
    std::vector<Integer> out;
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, ',')) {
        std::string trimmed;
        for (char ch : tok)
            if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
        if (trimmed.empty() || trimmed.find_first_not_of("0123456789-") != std::string::npos)
            throw Error("bad coefficient list entry '" + tok + "'");
        out.emplace_back(trimmed);
    }
    if (out.empty()) throw Error("empty coefficient list");
    return out;
}

std::vector<std::uint64_t> parse_prime_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw Error("bad prime list entry '" + tok + "'");
        out.push_back(std::stoull(tok));
    }
    if (out.empty()) throw Error("empty prime list");
    return out;
}

void emit(const Report& rep, const Common& c) {
    std::cout << (c.format == "structured" ? emit_structured(rep) : emit_text(rep));
}

Json fit_with_structure(const CountSequence& seq, int min_spare) {
    Json j;
    SeriesFit fit = fit_rational(seq.coefficients, min_spare);
    j["fit"] = json_of(fit);
    if (fit.result) {
        auto gs = geometric_structure_check(*fit.result, Integer(seq.q), seq.coefficients);
        Json g;
        g["applicable"] = gs.applicable;
        if (gs.applicable) {
            g["integer_constants"] = gs.integer_constants;
            Json cs = Json::array();
            for (const auto& [a, c] : gs.constants) {
                Json entry;
                entry["exponent"] = a;
                entry["constant"] = to_string(c);
                cs.push_back(std::move(entry));
            }
            g["constants"] = std::move(cs);
        }
        j["geometric_structure"] = std::move(g);
    }
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{
        "fqcount: evaluate and count first-order polynomial statements over finite fields,\n"
        "fit Poincare series to exact rational functions, classify growth, analyze covers,\n"
        "and count Frobenius-vector fixed points.  All results are exact integers/rationals."};
    app.require_subcommand(1);

    // ---- decide ----
    auto* decide_cmd = app.add_subcommand("decide", "Truth of a closed formula over one field");
    Common decide_common;
    FormulaInput decide_formula;
    std::string decide_field;
    decide_cmd->add_option("--field", decide_field, "Ambient field p^n")->required();
    decide_formula.add(decide_cmd);
    add_common(decide_cmd, decide_common);
    decide_cmd->callback([&] {
        const FieldSpec fs = parse_field_spec(decide_field);
        Field F(fs.p, fs.n);
        const Formula f = parse(decide_formula.text());
        Report rep;
        rep.command = "decide";
        rep.inputs["field"] = F.label();
        rep.inputs["formula"] = print(f);
        rep.budget_limit = decide_common.budget;
        rep.estimated_field_ops = estimate_cost(f, F).str();
        rep.results["truth"] = decide(f, F, opts_of(decide_common));
        emit(rep, decide_common);
    });

    // ---- count ----
    auto* count_cmd = app.add_subcommand("count", "Count satisfying free assignments over one field");
    Common count_common;
    FormulaInput count_formula;
    std::string count_field;
    count_cmd->add_option("--field", count_field, "Ambient field p^n")->required();
    count_formula.add(count_cmd);
    add_common(count_cmd, count_common);
    count_cmd->callback([&] {
        const FieldSpec fs = parse_field_spec(count_field);
        Field F(fs.p, fs.n);
        const Formula f = parse(count_formula.text());
        Report rep;
        rep.command = "count";
        rep.inputs["field"] = F.label();
        rep.inputs["formula"] = print(f);
        rep.budget_limit = count_common.budget;
        rep.estimated_field_ops = estimate_cost(f, F).str();
        rep.results["count"] = json_of(count_satisfying(f, F, opts_of(count_common)));
        emit(rep, count_common);
    });

    // ---- series ----
    auto* series_cmd =
        app.add_subcommand("series", "Poincare coefficients over F_{q^m}, m = 1..M, plus a rational fit");
    Common series_common;
    FormulaInput series_formula;
    std::string series_q, series_mode = "lifted";
    int series_M = 0, series_min_spare = 0;
    series_cmd->add_option("--q", series_q, "Base field (prime power or p^n)")->required();
    series_cmd->add_option("--max-m", series_M, "Number of coefficients")->required()->check(CLI::PositiveNumber);
    series_cmd->add_option("--mode", series_mode, "Quantifier-domain mode")
        ->check(CLI::IsMember({"lifted", "base"}))
        ->capture_default_str();
    series_cmd->add_option("--min-spare", series_min_spare, "Spare confirmations required for a fit")
        ->capture_default_str();
    series_formula.add(series_cmd);
    add_common(series_cmd, series_common);
    series_cmd->callback([&] {
        const FieldSpec base = parse_field_spec(series_q);
        const CoefficientMode mode = series_mode == "base" ? CoefficientMode::Base : CoefficientMode::Lifted;
        const Formula f = parse(series_formula.text());
        const EvalOptions opts = opts_of(series_common);
        Report rep;
        rep.command = "series";
        rep.inputs["q"] = base.label();
        rep.inputs["max_m"] = series_M;
        rep.inputs["mode"] = series_mode;
        rep.inputs["formula"] = print(f);
        rep.budget_limit = series_common.budget;
        rep.estimated_field_ops = poincare_cost(f, base, series_M, mode, opts).str();
        const CountSequence seq = poincare_coefficients(f, base, series_M, mode, opts);
        rep.results["sequence"] = json_of(seq);
        rep.results.update(fit_with_structure(seq, series_min_spare));
        emit(rep, series_common);
    });

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "Fit a coefficient list to an exact rational function");
    Common fit_common;
    std::string fit_coeffs;
    int fit_min_spare = 0;
    std::uint64_t fit_q = 0;
    fit_cmd->add_option("--coeffs", fit_coeffs, "Comma-separated integers, coefficient m = 1 first")->required();
    fit_cmd->add_option("--min-spare", fit_min_spare, "Spare confirmations required for a fit")->capture_default_str();
    fit_cmd->add_option("--q", fit_q, "Optional base for the geometric-structure check");
    add_common(fit_cmd, fit_common);
    fit_cmd->callback([&] {
        const auto coeffs = parse_coeff_list(fit_coeffs);
        Report rep;
        rep.command = "fit";
        rep.inputs["coefficients"] = json_of(coeffs);
        rep.budget_limit = fit_common.budget;
        CountSequence seq;
        seq.q = fit_q ? fit_q : 2;
        seq.coefficients = coeffs;
        Json out = fit_with_structure(seq, fit_min_spare);
        if (!fit_q) out.erase("geometric_structure");
        rep.results = std::move(out);
        emit(rep, fit_common);
    });

    // ---- zeta ----
    auto* zeta_cmd = app.add_subcommand("zeta", "Zeta series from Poincare coefficients via the log-derivative bridge");
    Common zeta_common;
    FormulaInput zeta_formula;
    std::string zeta_q, zeta_coeffs, zeta_mode = "lifted";
    int zeta_M = 0;
    zeta_cmd->add_option("--coeffs", zeta_coeffs, "Poincare coefficients (skip to compute from a formula)");
    zeta_cmd->add_option("--q", zeta_q, "Base field for computing coefficients");
    zeta_cmd->add_option("--max-m", zeta_M, "Order of the truncation");
    zeta_cmd->add_option("--mode", zeta_mode, "Quantifier-domain mode")
        ->check(CLI::IsMember({"lifted", "base"}))
        ->capture_default_str();
    zeta_formula.add(zeta_cmd);
    add_common(zeta_cmd, zeta_common);
    zeta_cmd->callback([&] {
        const EvalOptions opts = opts_of(zeta_common);
        Report rep;
        rep.command = "zeta";
        rep.budget_limit = zeta_common.budget;
        std::vector<Integer> P;
        if (!zeta_coeffs.empty()) {
            P = parse_coeff_list(zeta_coeffs);
            rep.inputs["coefficients"] = json_of(P);
        } else {
            if (zeta_q.empty() || zeta_M < 1) throw Error("zeta needs --coeffs, or --q with --max-m and a formula");
            const FieldSpec base = parse_field_spec(zeta_q);
            const CoefficientMode mode = zeta_mode == "base" ? CoefficientMode::Base : CoefficientMode::Lifted;
            const Formula f = parse(zeta_formula.text());
            rep.inputs["q"] = base.label();
            rep.inputs["max_m"] = zeta_M;
            rep.inputs["mode"] = zeta_mode;
            rep.inputs["formula"] = print(f);
            rep.estimated_field_ops = poincare_cost(f, base, zeta_M, mode, opts).str();
            P = poincare_coefficients(f, base, zeta_M, mode, opts).coefficients;
        }
        const int M = zeta_M > 0 ? std::min<int>(zeta_M, static_cast<int>(P.size())) : static_cast<int>(P.size());
        const auto Z = zeta_from_poincare(P, M);
        std::vector<Rational> Pr(P.begin(), P.end());
        rep.results["poincare"] = json_of(P);
        rep.results["zeta"] = json_of(Z);
        rep.results["order"] = M;
        rep.results["integral"] = all_integral(Z);
        rep.results["log_derivative_verified"] = verify_log_derivative(Z, Pr, M);
        emit(rep, zeta_common);
    });

    // ---- dichotomy ----
    auto* dich_cmd = app.add_subcommand("dichotomy", "Growth classification of a count sequence");
    Common dich_common;
    FormulaInput dich_formula;
    std::string dich_q, dich_coeffs, dich_mode = "lifted";
    int dich_M = 0;
    dich_cmd->add_option("--q", dich_q, "Base field")->required();
    dich_cmd->add_option("--coeffs", dich_coeffs, "Counts B_1, B_2, ... (skip to compute from a formula)");
    dich_cmd->add_option("--max-m", dich_M, "Levels to compute when a formula is given");
    dich_cmd->add_option("--mode", dich_mode, "Quantifier-domain mode")
        ->check(CLI::IsMember({"lifted", "base"}))
        ->capture_default_str();
    dich_formula.add(dich_cmd);
    add_common(dich_cmd, dich_common);
    dich_cmd->callback([&] {
        const FieldSpec base = parse_field_spec(dich_q);
        const EvalOptions opts = opts_of(dich_common);
        Report rep;
        rep.command = "dichotomy";
        rep.inputs["q"] = base.label();
        rep.budget_limit = dich_common.budget;
        std::vector<Integer> counts;
        if (!dich_coeffs.empty()) {
            counts = parse_coeff_list(dich_coeffs);
            rep.inputs["coefficients"] = json_of(counts);
        } else {
            if (dich_M < 4) throw Error("dichotomy needs --coeffs, or a formula with --max-m >= 4");
            const CoefficientMode mode = dich_mode == "base" ? CoefficientMode::Base : CoefficientMode::Lifted;
            const Formula f = parse(dich_formula.text());
            rep.inputs["max_m"] = dich_M;
            rep.inputs["mode"] = dich_mode;
            rep.inputs["formula"] = print(f);
            rep.estimated_field_ops = poincare_cost(f, base, dich_M, mode, opts).str();
            counts = poincare_coefficients(f, base, dich_M, mode, opts).coefficients;
            rep.results["sequence"] = json_of(counts);
        }
        std::vector<GrowthSample> samples;
        for (std::size_t i = 0; i < counts.size(); ++i) samples.push_back({static_cast<int>(i + 1), counts[i]});
        rep.results["growth"] = json_of(classify_growth(std::move(samples), base.q()));
        emit(rep, dich_common);
    });

    // ---- felgner ----
    auto* felg_cmd = app.add_subcommand(
        "felgner", "Per-prime counting test of a candidate defining formula for F_p inside F_{p^2}");
    Common felg_common;
    FormulaInput felg_formula;
    std::string felg_primes;
    felg_cmd->add_option("--primes", felg_primes, "Comma-separated primes")->required();
    felg_formula.add(felg_cmd);
    add_common(felg_cmd, felg_common);
    felg_cmd->callback([&] {
        const auto primes = parse_prime_list(felg_primes);
        const Formula f = parse(felg_formula.text());
        const EvalOptions opts = opts_of(felg_common);
        Report rep;
        rep.command = "felgner";
        rep.inputs["primes"] = primes;
        rep.inputs["formula"] = print(f);
        rep.budget_limit = felg_common.budget;
        Integer est = 0;
        for (std::uint64_t p : primes) {
            if (!detail::is_prime_u64(p)) continue;  // felgner_test reports the error
            Field F(static_cast<std::uint32_t>(p), 2);
            est += estimate_cost(f, F);
        }
        rep.estimated_field_ops = est.str();
        rep.results = json_of(felgner_test(f, primes, opts));
        emit(rep, felg_common);
    });

    // ---- frobclass ----
    auto* frob_cmd = app.add_subcommand("frobclass", "Census of fiber cycle types of a plane cover f(x, y)");
    Common frob_common;
    FormulaInput frob_formula;
    std::string frob_field;
    frob_cmd->add_option("--field", frob_field, "Base field p^n")->required();
    frob_formula.add(frob_cmd);
    add_common(frob_cmd, frob_common);
    frob_cmd->callback([&] {
        const FieldSpec fs = parse_field_spec(frob_field);
        Field F(fs.p, fs.n);
        const Cover c = parse_cover(frob_formula.text());
        Report rep;
        rep.command = "frobclass";
        rep.inputs["field"] = F.label();
        rep.inputs["cover"] = detail::format_poly(c.names, c.f);
        rep.budget_limit = frob_common.budget;
        rep.estimated_field_ops = census_cost(c, F).str();
        rep.results = json_of(frobenius_class_census(c, F, opts_of(frob_common)));
        emit(rep, frob_common);
    });

    // ---- exceptional ----
    auto* exc_cmd = app.add_subcommand("exceptional", "Exceptionality scan of a plane cover across extensions");
    Common exc_common;
    FormulaInput exc_formula;
    std::string exc_q;
    int exc_M = 0;
    bool exc_projective = false;
    exc_cmd->add_option("--q", exc_q, "Base field")->required();
    exc_cmd->add_option("--max-m", exc_M, "Extension window")->required()->check(CLI::PositiveNumber);
    exc_cmd->add_flag("--projective", exc_projective, "Count the point at infinity on the base line");
    exc_formula.add(exc_cmd);
    add_common(exc_cmd, exc_common);
    exc_cmd->callback([&] {
        const FieldSpec base = parse_field_spec(exc_q);
        const Cover c = parse_cover(exc_formula.text());
        Report rep;
        rep.command = "exceptional";
        rep.inputs["q"] = base.label();
        rep.inputs["max_m"] = exc_M;
        rep.inputs["projective"] = exc_projective;
        rep.inputs["cover"] = detail::format_poly(c.names, c.f);
        rep.budget_limit = exc_common.budget;
        rep.estimated_field_ops = scan_cost(c, base, exc_M).str();
        rep.results = json_of(exceptional_poincare(c, base, exc_M, exc_projective, opts_of(exc_common)));
        emit(rep, exc_common);
    });

    // ---- twisted ----
    auto* tw_cmd = app.add_subcommand(
        "twisted", "Count tuples fixed by a Frobenius vector on an affine system; with --max-m, a zeta sequence");
    Common tw_common;
    std::string tw_q, tw_dvec, tw_system_file;
    int tw_M = 0;
    tw_cmd->add_option("--q", tw_q, "Base field")->required();
    tw_cmd->add_option("--dvec", tw_dvec, "Frobenius vector, e.g. 1,2,2")->required();
    tw_cmd->add_option("--system-file", tw_system_file, "Equations, one per line")->required();
    tw_cmd->add_option("--max-m", tw_M, "Zeta sequence length (omit for a single count)");
    add_common(tw_cmd, tw_common);
    tw_cmd->callback([&] {
        const FieldSpec base = parse_field_spec(tw_q);
        const FrobeniusVector dvec = parse_dvec(tw_dvec);
        const AffineSystem sys = parse_system(read_file(tw_system_file));
        const EvalOptions opts = opts_of(tw_common);
        Report rep;
        rep.command = "twisted";
        rep.inputs["q"] = base.label();
        rep.inputs["dvec"] = dvec.d;
        rep.inputs["variables"] = sys.var_names;
        Json eqs = Json::array();
        for (const auto& eq : sys.equations) eqs.push_back(detail::format_poly(sys.var_names, eq) + " = 0");
        rep.inputs["equations"] = std::move(eqs);
        rep.budget_limit = tw_common.budget;
        if (tw_M > 0) {
            rep.inputs["max_m"] = tw_M;
            Integer est = 0;
            for (int lvl = 1; lvl <= tw_M; ++lvl)
                est += twisted_cost(sys, FieldSpec{base.p, base.n * static_cast<std::uint32_t>(lvl)}, dvec);
            rep.estimated_field_ops = est.str();
            rep.results = json_of(twisted_rationality_probe(sys, base, dvec, tw_M, opts));
        } else {
            rep.estimated_field_ops = twisted_cost(sys, base, dvec).str();
            rep.results["count"] = json_of(twisted_count(sys, base, dvec, opts));
        }
        emit(rep, tw_common);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    int code;
    try {
        code = run(argc, argv);
    } catch (const BudgetError& e) {
        std::cerr << "budget refusal: " << e.what() << "\n";
        code = 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        code = 1;
    }
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::cerr << "time_ms: " << elapsed.count() << "\n";
    return code;
}
