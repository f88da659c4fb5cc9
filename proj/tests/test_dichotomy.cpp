#include "fqc/dichotomy.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <functional>

using namespace fqc;

namespace {

std::vector<GrowthSample> make_samples(int M, const std::function<Integer(int)>& f) {
    std::vector<GrowthSample> s;
    for (int m = 1; m <= M; ++m) s.push_back({m, f(m)});
    return s;
}

}  // namespace

TEST_CASE("classify_growth") {
    SECTION("(3^m + 1)/2: r = 1, mu = 1/2, residual exactly 1/2") {
        auto s = make_samples(8, [](int m) { return (ipow(Integer(3), static_cast<unsigned>(m)) + 1) / 2; });
        auto g = classify_growth(s, 3);
        REQUIRE(g.kind == GrowthClass::Kind::Power);
        CHECK(g.r == 1);
        CHECK(g.mu == Rational(1, 2));
        // witness bound: residual is 1/2 at every m, so C <= 1
        CHECK(g.C <= 1);
        for (const auto& sample : s) {
            Rational resid = Rational(sample.count) - g.mu * Rational(ipow(Integer(3), static_cast<unsigned>(sample.m)));
            if (resid < 0) resid = -resid;
            CHECK(resid == Rational(1, 2));
        }
    }
    SECTION("all zero") {
        auto g = classify_growth(make_samples(5, [](int) { return Integer(0); }), 3);
        CHECK(g.kind == GrowthClass::Kind::Zero);
    }
    SECTION("constant: BOUNDED with C = 7") {
        auto g = classify_growth(make_samples(6, [](int) { return Integer(7); }), 5);
        REQUIRE(g.kind == GrowthClass::Kind::Bounded);
        CHECK(g.C == 7);
    }
    SECTION("exact powers give (r, mu = 1, C = 0)") {
        for (int r = 1; r <= 3; ++r)
            for (std::uint64_t q : {2ull, 3ull, 5ull}) {
                auto g = classify_growth(
                    make_samples(6, [&](int m) { return ipow(Integer(q), static_cast<unsigned>(r * m)); }), q);
                REQUIRE(g.kind == GrowthClass::Kind::Power);
                CHECK(g.r == r);
                CHECK(g.mu == 1);
                CHECK(g.C == 0);
            }
    }
    SECTION("scale consistency: B -> c B scales mu and C, keeps r") {
        for (long c : {2L, 3L, 7L}) {
            auto base = make_samples(8, [](int m) { return ipow(Integer(3), static_cast<unsigned>(m)); });
            auto scaled = make_samples(8, [&](int m) { return Integer(c) * ipow(Integer(3), static_cast<unsigned>(m)); });
            auto g0 = classify_growth(base, 3);
            auto g1 = classify_growth(scaled, 3);
            CHECK(g1.r == g0.r);
            CHECK(g1.mu == Rational(c) * g0.mu);
            CHECK(g1.C == Rational(c) * g0.C);

            auto half = make_samples(8, [](int m) { return (ipow(Integer(3), static_cast<unsigned>(m)) + 1) / 2; });
            auto halfc = make_samples(8, [&](int m) {
                return Integer(c) * ((ipow(Integer(3), static_cast<unsigned>(m)) + 1) / 2);
            });
            auto h0 = classify_growth(half, 3);
            auto h1 = classify_growth(halfc, 3);
            CHECK(h1.r == h0.r);
            CHECK(h1.mu == Rational(c) * h0.mu);
            CHECK(h1.C == Rational(c) * h0.C);
        }
    }
    SECTION("errors") {
        CHECK_THROWS_AS(classify_growth(make_samples(3, [](int) { return Integer(1); }), 3), Error);
        CHECK_THROWS_AS(classify_growth(make_samples(5, [](int) { return Integer(1); }), 1), Error);
        auto dup = make_samples(5, [](int) { return Integer(1); });
        dup[1].m = dup[0].m;
        CHECK_THROWS_AS(classify_growth(dup, 3), Error);
    }
    SECTION("quadratic growth with a lower-order ripple") {
        auto g = classify_growth(
            make_samples(6, [](int m) { return 3 * ipow(Integer(5), static_cast<unsigned>(2 * m)) + m; }), 5);
        REQUIRE(g.kind == GrowthClass::Kind::Power);
        CHECK(g.r == 2);
        CHECK(g.mu == 3);
    }
}

TEST_CASE("felgner_test") {
    const std::vector<std::uint64_t> primes{3, 5, 7};
    SECTION("x = x counts the whole plane") {
        auto v = felgner_test(parse("free x : ext 2 . x = x"), primes);
        REQUIRE(v.rows.size() == 3);
        CHECK(v.rows[0].count == 9);
        CHECK(v.rows[1].count == 25);
        CHECK(v.rows[2].count == 49);
        CHECK(v.conclusion == FelgnerConclusion::RefutedAtSamples);
    }
    SECTION("squares of F_{p^2}: (p^2 + 1)/2") {
        auto v = felgner_test(parse("free x : ext 2 . E y : ext 2 . y^2 - x = 0"), primes);
        CHECK(v.rows[0].count == 5);
        CHECK(v.rows[1].count == 13);
        CHECK(v.rows[2].count == 25);
        CHECK(v.conclusion == FelgnerConclusion::RefutedAtSamples);
        CHECK(v.rows[0].gap == 2);
    }
    SECTION("empty set") {
        auto v = felgner_test(parse("free x : ext 2 . 1 = 0"), primes);
        for (const auto& row : v.rows) CHECK(row.count == 0);
        CHECK(v.conclusion == FelgnerConclusion::RefutedAtSamples);
    }
    SECTION("a formula that does hit p is reported as matched") {
        // x^2 = x defines {0, 1} inside F_{p^2}: matches p exactly at p = 2
        auto v = felgner_test(parse("free x : ext 2 . x^2 - x = 0"), {2});
        CHECK(v.rows[0].count == 2);
        CHECK(v.conclusion == FelgnerConclusion::MatchedSomewhere);
    }
    SECTION("precondition errors") {
        CHECK_THROWS_WITH(felgner_test(parse("free x : ext 2 . free z : ext 2 . x - z = 0"), primes),
                          Catch::Matchers::ContainsSubstring("exactly one free"));
        CHECK_THROWS_WITH(felgner_test(parse("x = x"), primes),
                          Catch::Matchers::ContainsSubstring("sort 2"));
        CHECK_THROWS_WITH(felgner_test(parse("free x : ext 2 . E y . y^2 - x = 0"), primes),
                          Catch::Matchers::ContainsSubstring("bound"));
        CHECK_THROWS_AS(felgner_test(parse("free x : ext 2 . x = x"), {4}), Error);
    }
    SECTION("advisory growth runs with enough primes") {
        auto v = felgner_test(parse("free x : ext 2 . x = x"), {3, 5, 7, 11});
        CHECK(v.growth_valid);
    }
}
