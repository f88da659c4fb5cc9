#include "fqc/series.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace fqc;

namespace {

std::vector<Integer> ints(std::initializer_list<long> v) {
    return std::vector<Integer>(v.begin(), v.end());
}

RationalFunction rf(std::initializer_list<long> num, std::initializer_list<long> den) {
    QPoly n, d;
    for (long c : num) n.emplace_back(c);
    for (long c : den) d.emplace_back(c);
    return normalized(std::move(n), std::move(d));
}

}  // namespace

TEST_CASE("fit_rational on the stock examples") {
    SECTION("geometric sequence") {
        auto fit = fit_rational(ints({5, 25, 125, 625}));
        REQUIRE(fit.result);
        CHECK(*fit.result == rf({0, 5}, {1, -5}));  // 5t/(1-5t)
        CHECK(fit.recurrence_order == 1);
        CHECK(fit.spare == 2);
        CHECK(total_degree(*fit.result) == 2);
    }
    SECTION("3^m + 1") {
        auto fit = fit_rational(ints({4, 10, 28, 82, 244}));
        REQUIRE(fit.result);
        // t/(1-t) + 3t/(1-3t) = (4t - 6t^2)/((1-t)(1-3t))
        CHECK(*fit.result == rf({0, 4, -6}, {1, -4, 3}));
        CHECK(fit.recurrence_order == 2);
        CHECK(total_degree(*fit.result) == 4);
    }
    SECTION("all zero") {
        auto fit = fit_rational(ints({0, 0, 0, 0}));
        REQUIRE(fit.result);
        CHECK(fit.result->is_zero());
        CHECK(fit.recurrence_order == 0);
        CHECK(total_degree(*fit.result) == 0);
    }
    SECTION("empty input is an error") { CHECK_THROWS_AS(fit_rational(std::vector<Integer>{}), Error); }
    SECTION("single coefficient: NO_FIT, not an answer") {
        auto fit = fit_rational(ints({7}));
        CHECK_FALSE(fit.result);
    }
    SECTION("short junk with a spare margin demanded: NO_FIT") {
        auto fit = fit_rational(ints({3, 17}), 1);
        CHECK_FALSE(fit.result);
    }
}

TEST_CASE("fit_rational round-trips random small rational functions") {
    std::mt19937 rng(20240901);
    std::uniform_int_distribution<int> coeff(-4, 4), deg(0, 3);
    for (int trial = 0; trial < 200; ++trial) {
        QPoly num, den;
        const int dn = deg(rng), dd = deg(rng);
        for (int i = 0; i <= dn; ++i) num.emplace_back(coeff(rng));
        den.emplace_back(1);
        for (int i = 1; i <= dd; ++i) den.emplace_back(coeff(rng));
        qpoly::trim(num);
        RationalFunction R = normalized(std::move(num), std::move(den));
        // force a series with zero constant term: multiply numerator by t
        R.num.insert(R.num.begin(), Rational(0));
        R = normalized(std::move(R.num), std::move(R.den));

        const int terms = 2 * (qpoly::degree(R.den) + 3) + 4;
        auto series = expand(R, terms);
        std::vector<Rational> seq(series.begin() + 1, series.end());
        auto fit = fit_rational(seq, 2);
        REQUIRE(fit.result);
        CHECK(*fit.result == R);
    }
}

TEST_CASE("zeta_from_poincare") {
    SECTION("affine line: P_m = q^m gives 1/(1-qt)") {
        for (long q : {2L, 3L, 5L}) {
            std::vector<Integer> P;
            Integer pw = 1;
            for (int m = 1; m <= 10; ++m) {
                pw *= q;
                P.push_back(pw);
            }
            auto Z = zeta_from_poincare(P, 10);
            auto direct = expand(rf({1}, {1, -q}), 10);
            CHECK(Z == direct);
            CHECK(all_integral(Z));
            std::vector<Rational> Pr(P.begin(), P.end());
            CHECK(verify_log_derivative(Z, Pr, 10));
        }
    }
    SECTION("zero Poincare series gives Z = 1") {
        auto Z = zeta_from_poincare(ints({0, 0, 0, 0}), 4);
        for (int k = 0; k <= 4; ++k) CHECK(Z[static_cast<std::size_t>(k)] == (k == 0 ? 1 : 0));
    }
    SECTION("P_m = 3^m + 1 gives 1/((1-t)(1-3t))") {
        auto Z = zeta_from_poincare(ints({4, 10, 28, 82, 244, 730}), 6);
        auto direct = expand(rf({1}, {1, -4, 3}), 6);
        CHECK(Z == direct);
    }
}

TEST_CASE("verify_log_derivative") {
    SECTION("1/(1-5t) against 5t/(1-5t)") {
        auto Z = expand(rf({1}, {1, -5}), 10);
        std::vector<Rational> P;
        Integer pw = 1;
        for (int m = 1; m <= 10; ++m) {
            pw *= 5;
            P.emplace_back(pw);
        }
        CHECK(verify_log_derivative(Z, P, 10));
    }
    SECTION("Z = 1, P = 0") {
        std::vector<Rational> Z{Rational(1), Rational(0), Rational(0)};
        CHECK(verify_log_derivative(Z, {}, 2));
    }
    SECTION("mismatched pair fails") {
        auto Z = expand(rf({1}, {1, -5}), 4);
        std::vector<Rational> P;
        Integer pw = 1;
        for (int m = 1; m <= 4; ++m) {
            pw *= 4;
            P.emplace_back(pw);  // 4^m, wrong
        }
        CHECK_FALSE(verify_log_derivative(Z, P, 3));
    }
    SECTION("Z(0) != 1 is an error") {
        std::vector<Rational> Z{Rational(2)};
        CHECK_THROWS_AS(verify_log_derivative(Z, {}, 0), Error);
    }
}

TEST_CASE("produced zetas always verify against their source") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> coeff(-9, 9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Integer> P;
        for (int m = 0; m < 8; ++m) P.emplace_back(coeff(rng));
        auto Z = zeta_from_poincare(P, 8);
        std::vector<Rational> Pr(P.begin(), P.end());
        CHECK(verify_log_derivative(Z, Pr, 8));
    }
}

TEST_CASE("total_degree conventions") {
    CHECK(total_degree(rf({0, 5}, {1, -5})) == 2);
    CHECK(total_degree(rf({}, {1})) == 0);
    CHECK(total_degree(rf({0, 4, -6}, {1, -4, 3})) == 4);
}

TEST_CASE("geometric structure of fitted sequences") {
    SECTION("(3^m + 1)/2 has half-integer constants, reported not asserted") {
        std::vector<Integer> seq;
        Integer pw = 1;
        for (int m = 1; m <= 8; ++m) {
            pw *= 3;
            seq.push_back((pw + 1) / 2);
        }
        auto fit = fit_rational(seq, 2);
        REQUIRE(fit.result);
        auto gs = geometric_structure_check(*fit.result, Integer(3), seq);
        REQUIRE(gs.applicable);
        CHECK_FALSE(gs.integer_constants);
        REQUIRE(gs.constants.size() == 2);
        CHECK(gs.constants[0] == std::pair{0, Rational(1, 2)});
        CHECK(gs.constants[1] == std::pair{1, Rational(1, 2)});
    }
    SECTION("3^m + 1 has integer constants") {
        auto fit = fit_rational(ints({4, 10, 28, 82, 244, 730}));
        REQUIRE(fit.result);
        auto gs = geometric_structure_check(*fit.result, Integer(3), ints({4, 10, 28, 82, 244, 730}));
        REQUIRE(gs.applicable);
        CHECK(gs.integer_constants);
    }
}
