#include <catch2/catch_amalgamated.hpp>

#include <signatlas/signatlas.hpp>

#include "support/gen.hpp"
#include "support/roots.hpp"

using namespace signatlas;

namespace {

MultiPoly x2_minus_x() {
    return MultiPoly::from_terms(1, {{{2}, Int(1)}, {{1}, Int(-1)}});
}

} // namespace

TEST_CASE("exact evaluation") {
    MultiPoly p = x2_minus_x();
    Point one{Rat(1)};
    CHECK(p.eval(one) == 0);
    Point half{make_rat(Int(1), Int(2))};
    CHECK(p.eval(half) == make_rat(Int(-1), Int(4)));

    MultiPoly zero(2);
    Point xy{Rat(1) / 3, Rat(7)};
    CHECK(zero.eval(xy) == 0);

    CHECK_THROWS_AS(p.eval(xy), DomainError);
}

TEST_CASE("sign evaluation") {
    MultiPoly scaled_half = MultiPoly::from_terms(1, {{{1}, Int(2)}, {{0}, Int(-1)}});
    Point quarter{make_rat(Int(1), Int(4))};
    CHECK(scaled_half.sign_at(quarter) == -1);

    Point zero{Rat(0)};
    CHECK(x2_minus_x().sign_at(zero) == 0);

    MultiPoly xp1 = MultiPoly::from_terms(1, {{{1}, Int(1)}, {{0}, Int(1)}});
    CHECK(xp1.sign_at(zero) == 1);
}

TEST_CASE("interval evaluation contains the range") {
    Box u1 = unit_box(1);
    MultiPoly x = MultiPoly::from_terms(1, {{{1}, Int(1)}});
    IVal ix = x.eval_interval(u1);
    CHECK(ix.lo == 0);
    CHECK(ix.hi == 1);

    MultiPoly five = MultiPoly::constant(3, Int(5));
    IVal i5 = five.eval_interval(unit_box(3));
    CHECK(i5.lo == 5);
    CHECK(i5.hi == 5);

    /* Term-wise evaluation of x^2 - x on [0,1] gives exactly [-1,1], which
     * contains the true range [-1/4, 0]. */
    IVal iq = x2_minus_x().eval_interval(u1);
    CHECK(iq.lo == -1);
    CHECK(iq.hi == 1);
    CHECK(iq.contains(make_rat(Int(-1), Int(4))));
    CHECK(iq.contains(Rat(0)));
}

TEST_CASE("total degree and log height") {
    MultiPoly p = MultiPoly::from_terms(2, {{{2, 1}, Int(3)}, {{0, 0}, Int(-2)}});
    CHECK(degree_and_height(p) == std::pair(3u, 2u));
    CHECK(degree_and_height(MultiPoly(2)) == std::pair(0u, 0u));
    CHECK(degree_and_height(x2_minus_x()) == std::pair(2u, 1u));
}

TEST_CASE("term map stays canonical") {
    MultiPoly p(1);
    p.add_term({1}, Int(2));
    p.add_term({1}, Int(-2));
    CHECK(p.is_zero());
    p.add_term({0}, Int(0));
    CHECK(p.term_count() == 0);

    MultiPoly q = x2_minus_x();
    auto before = q.terms();
    q.add_term({3}, Int(7));
    q.add_term({3}, Int(-7));
    CHECK(q.terms() == before);
    CHECK_THROWS_AS(q.add_term({1, 1}, Int(1)), DomainError);
}

TEST_CASE("family cardinality bound (log2 form)") {
    CHECK(family_cardinality_bound(2, 2, 1) == 9);
    CHECK(family_cardinality_bound(1, 1, 1) == 2);
    CHECK_THROWS_AS(family_cardinality_bound(1, 1, 0), DomainError);
    CHECK_THROWS_AS(family_cardinality_bound(0, 1, 1), DomainError);
}

TEST_CASE("root magnitude lower bound 1/(H+1)") {
    /* 2T^2 - 3T + 1 = (2T - 1)(T - 1), roots 1/2 and 1, H = 3. */
    MultiPoly p =
        MultiPoly::from_terms(1, {{{2}, Int(2)}, {{1}, Int(-3)}, {{0}, Int(1)}});
    Rat b = cauchy_lower_bound(p);
    CHECK(b == make_rat(Int(1), Int(4)));
    CHECK(make_rat(Int(1), Int(2)) > b);
    CHECK(Rat(1) > b);

    MultiPoly lin = MultiPoly::from_terms(1, {{{1}, Int(1)}, {{0}, Int(-1)}});
    CHECK(cauchy_lower_bound(lin) == make_rat(Int(1), Int(2)));

    CHECK_THROWS_AS(cauchy_lower_bound(x2_minus_x()), ZeroRootPresent);
    CHECK_THROWS_AS(cauchy_lower_bound(MultiPoly(1)), DomainError);
    MultiPoly bivar = MultiPoly::from_terms(2, {{{1, 1}, Int(1)}, {{0, 0}, Int(1)}});
    CHECK_THROWS_AS(cauchy_lower_bound(bivar), DomainError);
}

TEST_CASE("isolated roots respect the bound (fuzzed)") {
    testgen::Rng rng(7151);
    for (int iter = 0; iter < 60; ++iter) {
        MultiPoly p(1);
        unsigned deg = unsigned(testgen::rint(rng, 1, 5));
        for (unsigned e = 0; e <= deg; ++e)
            p.add_term({e}, testgen::rcoeff(rng, 100, false));
        if (p.is_zero() || p.terms().find(Exponents{0}) == p.terms().end())
            p.add_term({0}, Int(1));
        if (p.terms().find(Exponents{0}) == p.terms().end())
            continue;
        auto scan = testgen::scan_roots_clear_of(p, cauchy_lower_bound(p));
        REQUIRE(scan.all_clear);
    }
}

TEST_CASE("exact value lies inside the interval image (fuzzed)") {
    testgen::Rng rng(99017);
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t n = std::size_t(testgen::rint(rng, 1, 2));
        MultiPoly p = testgen::rpoly(rng, n, 3, 4, 8, false);
        Box b = testgen::rbox(rng, n);
        Point x = testgen::rpoint_in(rng, b, 60);
        Rat v = p.eval(x);
        REQUIRE(p.eval_interval(b).contains(v));
        REQUIRE(p.sign_at(x) == v.sign());
    }
}

TEST_CASE("polynomial JSON round trip") {
    MultiPoly p = MultiPoly::from_terms(2, {{{2, 1}, Int(3)}, {{0, 0}, Int(-2)}});
    Json j = poly_to_json(p);
    CHECK(j.at("n") == 2);
    REQUIRE(j.at("terms").size() == 2);
    CHECK(j.at("terms")[0].at("e") == Json::array({0, 0}));
    CHECK(j.at("terms")[0].at("c") == "-2");
    CHECK(j.at("terms")[1].at("e") == Json::array({2, 1}));
    CHECK(j.at("terms")[1].at("c") == "3");
    CHECK(poly_from_json(j) == p);

    Json big = Json::parse(R"({"n":1,"terms":[{"e":[1],"c":"123456789012345678901234567890"}]})");
    MultiPoly bp = poly_from_json(big);
    CHECK(bp.max_abs_coeff() == Int("123456789012345678901234567890"));
    CHECK(poly_to_json(bp) == big);

    CHECK_THROWS_AS(poly_from_json(Json::parse(R"({"n":1})")), SchemaError);
}
