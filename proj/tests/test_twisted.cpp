#include "fqc/twisted.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fqc;

TEST_CASE("parse_system") {
    auto s = parse_system("x1 - x2 = 0\n# comment\nx1^2 + x3\n");
    CHECK(s.var_names == std::vector<std::string>{"x1", "x2", "x3"});
    CHECK(s.equations.size() == 2);

    CHECK_THROWS_WITH(parse_system("E y . y - x = 0\n"),
                      Catch::Matchers::ContainsSubstring("quantified twisted counting is not supported"));
    CHECK_THROWS_WITH(parse_system("x != 0\n"), Catch::Matchers::ContainsSubstring("equations only"));
    CHECK_THROWS_AS(parse_system("  \n# nothing\n"), Error);
}

TEST_CASE("parse_dvec") {
    CHECK(parse_dvec("1,2,2").d == std::vector<std::uint32_t>{1, 2, 2});
    CHECK_THROWS_AS(parse_dvec("1,,2"), Error);
    CHECK_THROWS_AS(parse_dvec("0"), Error);
    CHECK_THROWS_AS(parse_dvec(""), Error);
}

TEST_CASE("twisted_count") {
    SECTION("diagonal forces the subfield intersection") {
        auto s = parse_system("x1 - x2 = 0");
        CHECK(twisted_count(s, {2, 1}, {{1, 2}}) == 2);  // F_2 cap F_4 = F_2
    }
    SECTION("no equations would be empty; a trivial equation spans the subfield") {
        auto s = parse_system("0 = 0\n");
        // one variable is implied only if mentioned; so use x - x
        auto s1 = parse_system("x - x = 0");
        for (std::uint32_t d : {1u, 2u, 3u}) {
            CHECK(twisted_count(s1, {2, 1}, {{d}}) == ipow(Integer(2), d));
        }
        (void)s;
    }
    SECTION("circle over F_3 x F_9 by brute force") {
        auto s = parse_system("x1^2 + x2^2 - 1 = 0");
        // oracle: enumerate F_3 x F_9 inside F_9
        Field F9 = make_field(3, 2);
        auto d1 = subfield_indices(F9, 1);
        auto d2 = subfield_indices(F9, 2);
        Integer expect = 0;
        for (auto a : d1)
            for (auto b : d2) {
                const std::uint32_t v = F9.add(F9.add(F9.mul(a, a), F9.mul(b, b)), F9.from_integer(Integer(-1)));
                if (v == 0) ++expect;
            }
        CHECK(twisted_count(s, {3, 1}, {{1, 2}}) == expect);
    }
    SECTION("length mismatch is an error") {
        auto s = parse_system("x1 - x2 = 0");
        CHECK_THROWS_WITH(twisted_count(s, {2, 1}, {{1}}), Catch::Matchers::ContainsSubstring("length"));
    }
    SECTION("budget refusal") {
        auto s = parse_system("x1 - x2 = 0");
        EvalOptions opts;
        opts.budget = 3;
        CHECK_THROWS_AS(twisted_count(s, {2, 1}, {{1, 2}}, opts), BudgetError);
    }
}

TEST_CASE("twisted_count equals count_satisfying when d = (1,...,1)") {
    struct Case {
        const char* system;
        const char* formula;
    };
    const Case cases[] = {
        {"x1^2 + x2^2 - 1 = 0", "x1^2 + x2^2 - 1 = 0"},
        {"x1*x2 - 1 = 0", "x1*x2 - 1 = 0"},
        {"x1^3 - x2 = 0\nx2 - x3 = 0", "x1^3 - x2 = 0 & x2 - x3 = 0"},
    };
    for (const auto& [sys_text, fml_text] : cases) {
        auto sys = parse_system(sys_text);
        FrobeniusVector ones{std::vector<std::uint32_t>(sys.var_names.size(), 1)};
        for (std::uint32_t p : {2u, 3u}) {
            Field F = make_field(p, 1);
            CHECK(twisted_count(sys, {p, 1}, ones) == count_satisfying(parse(fml_text), F));
        }
    }
}

TEST_CASE("twisted_count is invariant under permuting (variable, d) pairs") {
    // the same equation written so the variable occurrence order flips;
    // each variable keeps its own d entry
    auto s = parse_system("x1^2 - x2 = 0");           // order (x1, x2)
    auto s_perm = parse_system("0 - x2 + x1^2 = 0");  // order (x2, x1)
    CHECK(s_perm.var_names == std::vector<std::string>{"x2", "x1"});
    CHECK(twisted_count(s, {3, 1}, {{1, 2}}) == twisted_count(s_perm, {3, 1}, {{2, 1}}));
    CHECK(twisted_count(s, {2, 1}, {{2, 3}}) == twisted_count(s_perm, {2, 1}, {{3, 2}}));
}

TEST_CASE("domain membership matches the Frobenius fixed-point characterization") {
    Field F = make_field(2, 6);
    for (std::uint32_t d : {1u, 2u, 3u, 6u}) {
        auto dom = subfield_indices(F, d);
        for (std::uint64_t a = 0; a < F.cardinality(); ++a) {
            const bool member = std::find(dom.begin(), dom.end(), static_cast<std::uint32_t>(a)) != dom.end();
            CHECK(member == (F.frob(static_cast<std::uint32_t>(a), d) == a));
        }
    }
}

TEST_CASE("wan_zeta_coefficients") {
    SECTION("untwisted specialization matches ordinary point counts") {
        auto s = parse_system("x1^2 - x2 = 0");
        auto seq = wan_zeta_coefficients(s, {3, 1}, {{1, 1}}, 4);
        // parabola has q^s points over F_{q^s}
        for (int lvl = 1; lvl <= 4; ++lvl)
            CHECK(seq.coefficients[static_cast<std::size_t>(lvl - 1)] ==
                  ipow(Integer(3), static_cast<unsigned>(lvl)));
    }
    SECTION("full subfield of degree 2: (2^s)^2 points") {
        auto s = parse_system("x1 - x1 = 0");
        auto seq = wan_zeta_coefficients(s, {2, 1}, {{2}}, 3);
        CHECK(seq.coefficients == std::vector<Integer>{4, 16, 64});
    }
    SECTION("diagonal with d = (1,2): q^s") {
        auto s = parse_system("x1 - x2 = 0");
        auto seq = wan_zeta_coefficients(s, {2, 1}, {{1, 2}}, 3);
        CHECK(seq.coefficients == std::vector<Integer>{2, 4, 8});
    }
}

TEST_CASE("twisted_rationality_probe") {
    SECTION("untwisted affine line: 5t/(1-5t), total degree 2") {
        auto s = parse_system("x1 - x1 = 0");
        auto probe = twisted_rationality_probe(s, {5, 1}, {{1}}, 6);
        REQUIRE(probe.fit.result);
        CHECK(probe.fit.result->str() == "(5*t)/(1 - 5*t)");
        CHECK(probe.fitted_total_degree == 2);
    }
    SECTION("one variable, d = (2), q = 2: 4t/(1-4t)") {
        auto s = parse_system("x1 - x1 = 0");
        auto probe = twisted_rationality_probe(s, {2, 1}, {{2}}, 6);
        REQUIRE(probe.fit.result);
        CHECK(probe.fitted_total_degree == 2);
        auto expect = expand(*probe.fit.result, 3);
        CHECK(expect[1] == 4);
        CHECK(expect[2] == 16);
    }
    SECTION("divisibility chain d = (1,2) keeps small total degree") {
        auto s = parse_system("x1 - x2 = 0");
        auto probe = twisted_rationality_probe(s, {2, 1}, {{1, 2}}, 6);
        REQUIRE(probe.fit.result);
        CHECK(*probe.fitted_total_degree <= 2);
    }
}
