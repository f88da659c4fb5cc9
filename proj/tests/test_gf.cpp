#include "fqc/gf.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace fqc;

TEST_CASE("make_field picks the expected moduli") {
    SECTION("prime field: modulus x") {
        Field F = make_field(5, 1);
        CHECK(F.cardinality() == 5);
        CHECK(F.modulus() == std::vector<std::uint32_t>{0, 1});
    }
    SECTION("F_4: the unique irreducible quadratic over F_2") {
        Field F = make_field(2, 2);
        CHECK(F.cardinality() == 4);
        CHECK(F.modulus() == std::vector<std::uint32_t>{1, 1, 1});  // 1 + x + x^2
    }
    SECTION("F_9: lexicographically smallest, verified by rootless enumeration") {
        // Oracle: enumerate monic quadratics x^2 + c1 x + c0 over F_3 in
        // (c0, c1) lexicographic order; irreducible iff rootless.
        std::vector<std::uint32_t> expected;
        for (std::uint32_t c0 = 0; c0 < 3 && expected.empty(); ++c0)
            for (std::uint32_t c1 = 0; c1 < 3 && expected.empty(); ++c1) {
                bool rootless = true;
                for (std::uint32_t r = 0; r < 3; ++r)
                    if ((r * r + c1 * r + c0) % 3 == 0) rootless = false;
                if (rootless) expected = {c0, c1, 1};
            }
        Field F = make_field(3, 2);
        CHECK(F.modulus() == expected);
        CHECK(expected == std::vector<std::uint32_t>{1, 0, 1});  // x^2 + 1
    }
}

TEST_CASE("make_field rejects bad input") {
    CHECK_THROWS_AS(make_field(6, 1), Error);   // composite
    CHECK_THROWS_AS(make_field(1, 1), Error);
    CHECK_THROWS_AS(make_field(5, 0), Error);   // degree 0
    CHECK_THROWS_AS(make_field(2, 21), Error);  // over the 2^20 cap
}

TEST_CASE("make_field is deterministic") {
    Field a = make_field(7, 3);
    Field b = make_field(7, 3);
    CHECK(a.modulus() == b.modulus());
}

TEST_CASE("frobenius") {
    SECTION("conjugation in F_4: a^2 = a + 1 for a outside F_2") {
        Field F = make_field(2, 2);
        // indices 2 and 3 have a nonzero top coordinate
        for (std::uint32_t a : {2u, 3u}) {
            const std::uint32_t conj = F.frob(a, 1);
            CHECK(conj == F.add(a, 1));
            CHECK(conj != a);
        }
    }
    SECTION("k = 0 is the identity, k = n is the identity") {
        Field F = make_field(3, 3);
        for (std::uint32_t a = 0; a < F.cardinality(); ++a) {
            CHECK(F.frob(a, 0) == a);
            CHECK(F.frob(a, 3) == a);
        }
    }
    SECTION("frob computes a^(p^k)") {
        Field F = make_field(5, 2);
        for (std::uint32_t a = 0; a < F.cardinality(); ++a)
            CHECK(F.frob(a, 1) == F.pow(a, 5));
    }
}

TEST_CASE("frobenius is a field automorphism (exhaustive for p^n <= 256)") {
    for (auto [p, n] : {std::pair{2u, 8u}, {3u, 4u}, {5u, 2u}, {13u, 2u}, {251u, 1u}}) {
        Field F = make_field(p, n);
        for (std::uint32_t k = 1; k < F.degree(); ++k) {
            for (std::uint32_t a = 0; a < F.cardinality(); ++a)
                for (std::uint32_t b = 0; b < F.cardinality(); b += 7)  // stride keeps 2^8 case quick
                    if (b < F.cardinality()) {
                        CHECK(F.frob(F.mul(a, b), k) == F.mul(F.frob(a, k), F.frob(b, k)));
                        CHECK(F.frob(F.add(a, b), k) == F.add(F.frob(a, k), F.frob(b, k)));
                    }
        }
    }
}

TEST_CASE("field axioms spot checks") {
    Field F = make_field(3, 2);
    const std::uint64_t q = F.cardinality();
    for (std::uint32_t a = 0; a < q; ++a) {
        for (std::uint32_t b = 0; b < q; ++b) {
            CHECK(F.add(a, b) == F.add(b, a));
            CHECK(F.mul(a, b) == F.mul(b, a));
            if (a) CHECK(F.mul(a, F.inv(a)) == 1);
            for (std::uint32_t c = 0; c < q; ++c) {
                CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
                CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
            }
        }
    }
    CHECK_THROWS_AS(F.inv(0), Error);
}

TEST_CASE("subfield_elements") {
    SECTION("prime subfield of F_4") {
        Field F = make_field(2, 2);
        auto sub = subfield_elements(F, 1);
        REQUIRE(sub.size() == 2);
        CHECK(sub[0].idx == 0);
        CHECK(sub[1].idx == 1);
    }
    SECTION("d = n gives the whole field") {
        Field F = make_field(3, 2);
        CHECK(subfield_elements(F, 2).size() == 9);
    }
    SECTION("F_4 inside F_16: closed under + and *") {
        Field F = make_field(2, 4);
        auto sub = subfield_elements(F, 2);
        REQUIRE(sub.size() == 4);
        std::set<std::uint32_t> s;
        for (auto e : sub) s.insert(e.idx);
        for (auto a : s)
            for (auto b : s) {
                CHECK(s.count(F.add(a, b)) == 1);
                CHECK(s.count(F.mul(a, b)) == 1);
            }
    }
    SECTION("cardinality p^d and closure across small fields") {
        for (auto [p, n] : {std::pair{2u, 6u}, {3u, 4u}, {5u, 2u}}) {
            Field F = make_field(p, n);
            for (std::uint32_t d = 1; d <= n; ++d) {
                if (n % d != 0) {
                    CHECK_THROWS_AS(subfield_elements(F, d), Error);
                    continue;
                }
                auto sub = subfield_indices(F, d);
                CHECK(sub.size() == pow_u64(p, d));
                std::set<std::uint32_t> s(sub.begin(), sub.end());
                for (auto a : s)
                    for (auto b : s) {
                        CHECK(s.count(F.add(a, b)) == 1);
                        CHECK(s.count(F.mul(a, b)) == 1);
                    }
            }
        }
    }
}

TEST_CASE("element coordinates and formatting") {
    Field F = make_field(3, 2);
    CHECK(F.coords(5) == std::vector<std::uint32_t>{2, 1});  // 2 + 1*x
    CHECK(F.format(5) == "[2,1]");
    Field P = make_field(7, 1);
    CHECK(P.format(4) == "4");
    CHECK(P.from_integer(Integer(-1)) == 6);
    CHECK(P.from_integer(Integer(23)) == 2);
}
