#include <catch2/catch_amalgamated.hpp>

#include <signatlas/signatlas.hpp>

#include "support/gen.hpp"

using namespace signatlas;

TEST_CASE("rationals are canonical: lowest terms, positive denominator") {
    Rat r = make_rat(Int(6), Int(-4));
    CHECK(numerator(r) == -3);
    CHECK(denominator(r) == 2);
    CHECK(make_rat(Int(0), Int(7)) == 0);
    CHECK(denominator(make_rat(Int(0), Int(7))) == 1);
    CHECK_THROWS_AS(make_rat(Int(1), Int(0)), DomainError);
}

TEST_CASE("rational text form is p/q or p") {
    CHECK(to_string(make_rat(Int(3), Int(4))) == "3/4");
    CHECK(to_string(Rat(5)) == "5");
    CHECK(to_string(make_rat(Int(-7), Int(2))) == "-7/2");
    CHECK(to_string(Rat(0)) == "0");

    CHECK(parse_rat("3/4") == make_rat(Int(3), Int(4)));
    CHECK(parse_rat("-7/2") == make_rat(Int(-7), Int(2)));
    CHECK(parse_rat("5") == 5);
    CHECK(parse_rat("6/4") == make_rat(Int(3), Int(2)));
    CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rat("1.5"), ParseError);
    CHECK_THROWS_AS(parse_rat(""), ParseError);
    CHECK_THROWS_AS(parse_rat("-"), ParseError);
    CHECK_THROWS_AS(parse_rat("a/b"), ParseError);

    auto x = parse_point("1/3,2/5");
    REQUIRE(x.size() == 2);
    CHECK(x[0] == make_rat(Int(1), Int(3)));
    CHECK(x[1] == make_rat(Int(2), Int(5)));
    CHECK(to_string(x) == "1/3,2/5");
    CHECK_THROWS_AS(parse_point("1/3,,2"), ParseError);
}

TEST_CASE("integer log height is the bit length, 0 maps to 0") {
    CHECK(log_height(Int(0)) == 0);
    CHECK(log_height(Int(1)) == 1);
    CHECK(log_height(Int(5)) == 3);
    CHECK(log_height(Int(-5)) == 3);
    CHECK(log_height(Int(8)) == 4);
}

TEST_CASE("rational log height is the max over numerator and denominator") {
    CHECK(log_height(make_rat(Int(3), Int(4))) == 3);
    CHECK(log_height(Rat(1)) == 1);
    CHECK(log_height(make_rat(Int(-7), Int(2))) == 3);
    CHECK(log_height(Rat(0)) == 1);
}

TEST_CASE("interval arithmetic takes endpoint extremes") {
    IVal a(Rat(0), Rat(1)), b(Rat(-1), Rat(2));
    IVal prod = a * b;
    CHECK(prod.lo == -1);
    CHECK(prod.hi == 2);

    IVal s = IVal(1) + IVal(2);
    CHECK(s.lo == 3);
    CHECK(s.hi == 3);

    IVal sym(Rat(-1), Rat(1));
    IVal sq = sym * sym;
    CHECK(sq.lo == -1);
    CHECK(sq.hi == 1);

    CHECK_THROWS_AS(IVal(Rat(1), Rat(0)), DomainError);
}

TEST_CASE("exact interval powers split even exponents at zero") {
    IVal sym(Rat(-1), Rat(1));
    IVal sq = ival_pow(sym, 2);
    CHECK(sq.lo == 0);
    CHECK(sq.hi == 1);

    IVal w(Rat(-2), Rat(1));
    IVal cu = ival_pow(w, 3);
    CHECK(cu.lo == -8);
    CHECK(cu.hi == 1);
    IVal ev = ival_pow(w, 2);
    CHECK(ev.lo == 0);
    CHECK(ev.hi == 4);

    CHECK(ival_pow(w, 0).lo == 1);
    CHECK(ival_pow(w, 0).hi == 1);
}

TEST_CASE("interval certified sign") {
    CHECK(IVal(Rat(1), Rat(2)).certified_sign() == 1);
    CHECK(IVal(Rat(-2), Rat(-1)).certified_sign() == -1);
    CHECK(IVal(Rat(0), Rat(0)).certified_sign() == 0);
    CHECK(IVal(Rat(-1), Rat(1)).certified_sign() == 2);
    CHECK(IVal(Rat(0), Rat(1)).certified_sign() == 2);
}

TEST_CASE("interval containment under +, -, * (fuzzed)") {
    testgen::Rng rng(20240817);
    auto rrat = [&](long lo, long hi) {
        long q = testgen::rint(rng, 1, 40);
        long p = testgen::rint(rng, lo * q, hi * q);
        return make_rat(Int(p), Int(q));
    };
    for (int iter = 0; iter < 10000; ++iter) {
        Rat a1 = rrat(-2, 2), a2 = rrat(-2, 2);
        if (a2 < a1)
            std::swap(a1, a2);
        Rat b1 = rrat(-2, 2), b2 = rrat(-2, 2);
        if (b2 < b1)
            std::swap(b1, b2);
        IVal a(a1, a2), b(b1, b2);
        Rat t = testgen::runit(rng, 50), s = testgen::runit(rng, 50);
        Rat x = a.lo + t * (a.hi - a.lo);
        Rat y = b.lo + s * (b.hi - b.lo);
        REQUIRE((a + b).contains(x + y));
        REQUIRE((a - b).contains(x - y));
        REQUIRE((a * b).contains(x * y));
    }
}

TEST_CASE("interval power containment (fuzzed)") {
    testgen::Rng rng(424242);
    for (int iter = 0; iter < 2000; ++iter) {
        long q = testgen::rint(rng, 1, 20);
        Rat lo = make_rat(Int(testgen::rint(rng, -3 * q, 3 * q)), Int(q));
        Rat hi = lo + testgen::runit(rng, 20) * 2;
        IVal a(lo, hi);
        unsigned e = unsigned(testgen::rint(rng, 0, 5));
        Rat t = testgen::runit(rng, 50);
        Rat x = a.lo + t * (a.hi - a.lo);
        REQUIRE(ival_pow(a, e).contains(rat_pow(x, e)));
    }
}

TEST_CASE("checked integer powers respect the bit budget") {
    CHECK(checked_pow(Int(2), 10, 64) == 1024);
    CHECK(checked_pow(Int(3), 0, 64) == 1);
    CHECK(checked_pow(Int(1), 1000000, 64) == 1);
    CHECK_THROWS_AS(checked_pow(Int(2), 10000, 64), BoundTooLarge);
    CHECK_THROWS_AS(checked_pow(Int(9), 729, 851), BoundTooLarge);
}

TEST_CASE("rational powers are exact") {
    Rat x = make_rat(Int(-3), Int(2));
    CHECK(rat_pow(x, 3) == make_rat(Int(-27), Int(8)));
    CHECK(rat_pow(x, 0) == 1);
    CHECK(rat_abs(x) == make_rat(Int(3), Int(2)));
}
