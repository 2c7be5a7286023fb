#include <catch2/catch_amalgamated.hpp>

#include <signatlas/signatlas.hpp>

#include "support/gen.hpp"

using namespace signatlas;

namespace {

/* Value type with arithmetic but no numeric content: exercises evaluation
 * genericity and the op meter alone. */
struct Unit {
    Unit() = default;
    explicit Unit(int) {}
    Unit operator+(Unit) const { return {}; }
    Unit operator-(Unit) const { return {}; }
    Unit operator*(Unit) const { return {}; }
};

Rat powsum_direct(std::span<const Rat> u, std::uint64_t j) {
    Rat acc(0);
    for (const Rat& uk : u)
        acc += rat_pow(uk, unsigned(j));
    return acc;
}

} // namespace

TEST_CASE("evaluation follows the program, op count is the length") {
    /* x^4 by two squarings. */
    Slp sq4(1, {{OpKind::Input, 0}, {OpKind::Mul, 0, 0}, {OpKind::Mul, 1, 1}}, {2});
    std::vector<Rat> three{Rat(3)};
    auto r = slp_eval<Rat>(sq4, three);
    CHECK(r.outputs[0] == 81);
    CHECK(r.op_count == 2);
    CHECK(sq4.length() == 2);

    Slp id(1, {{OpKind::Input, 0}}, {0});
    std::vector<Rat> x{make_rat(Int(7), Int(2))};
    auto ri = slp_eval<Rat>(id, x);
    CHECK(ri.outputs[0] == make_rat(Int(7), Int(2)));
    CHECK(ri.op_count == 0);

    std::vector<Unit> ux{Unit{}};
    CHECK(slp_eval<Unit>(sq4, ux).op_count == 2);

    std::vector<IVal> ix{IVal(Rat(-1), Rat(1))};
    IVal iv = slp_eval<IVal>(sq4, ix).outputs[0];
    CHECK(iv.contains(Rat(0)));
    CHECK(iv.contains(Rat(1)));

    CHECK_THROWS_AS(slp_eval<Rat>(sq4, std::vector<Rat>{}), DomainError);
}

TEST_CASE("programs validate operand and output indices") {
    CHECK_THROWS_AS(Slp(1, {{OpKind::Add, 0, 0}}, {0}), SchemaError);
    CHECK_THROWS_AS(Slp(1, {{OpKind::Input, 1}}, {0}), SchemaError);
    CHECK_THROWS_AS(Slp(1, {{OpKind::Input, 0}}, {1}), SchemaError);
    CHECK_THROWS_AS(Slp(1, {{OpKind::Input, 0}, {OpKind::Mul, 0, 1}}, {1}), SchemaError);
}

TEST_CASE("constant synthesis by double-and-add") {
    CHECK(synth_const(Int(1)).length() == 0);
    CHECK(synth_const(Int(0)).length() == 0);
    CHECK(synth_const(Int(5)).length() <= 4);
    CHECK(synth_const(Int(-3)).length() <= 4);
    for (long c = -40; c <= 40; ++c) {
        Slp prog = synth_const(Int(c));
        auto r = slp_eval<Rat>(prog, std::vector<Rat>{});
        REQUIRE(r.outputs[0] == c);
        REQUIRE(prog.length() <= 2 * (log_height(Int(c)) + 1));
    }
}

TEST_CASE("polynomial compilation matches direct evaluation") {
    MultiPoly p = MultiPoly::from_terms(1, {{{2}, Int(1)}, {{1}, Int(-1)}});
    Slp prog = slp_from_poly(p);
    CHECK(prog.length() <= 4);
    testgen::Rng rng(5150);
    for (int i = 0; i < 100; ++i) {
        Point x = testgen::rpoint(rng, 1);
        REQUIRE(slp_eval<Rat>(prog, x).outputs[0] == p.eval(x));
    }

    Slp z = slp_from_poly(MultiPoly(1));
    CHECK(z.length() == 0);
    std::vector<Rat> pt{Rat(5)};
    CHECK(slp_eval<Rat>(z, pt).outputs[0] == 0);

    MultiPoly sum = MultiPoly::from_terms(2, {{{1, 0}, Int(1)}, {{0, 1}, Int(1)}});
    CHECK(slp_from_poly(sum).length() == 1);
}

TEST_CASE("compiled length stays within the per-term budget (fuzzed)") {
    testgen::Rng rng(6021023);
    for (int iter = 0; iter < 200; ++iter) {
        std::size_t n = std::size_t(testgen::rint(rng, 1, 3));
        MultiPoly p = testgen::rpoly(rng, n, 4, 5, 60, false);
        Slp prog = slp_from_poly(p);
        std::size_t bits = 0;
        for (const auto& [e, c] : p.terms())
            bits = std::max<std::size_t>(bits, log_height(c));
        std::size_t budget = p.term_count() * (2 + p.total_degree() + 2 * bits);
        REQUIRE(prog.length() <= std::max<std::size_t>(budget, 1));
        Point x = testgen::rpoint(rng, n, 40);
        REQUIRE(slp_eval<Rat>(prog, x).outputs[0] == p.eval(x));
    }
}

TEST_CASE("specialization replaces trailing inputs by constants") {
    testgen::Rng rng(90125);
    for (int iter = 0; iter < 100; ++iter) {
        std::size_t m = std::size_t(testgen::rint(rng, 1, 2));
        std::size_t nx = std::size_t(testgen::rint(rng, 1, 2));
        MultiPoly p = testgen::rpoly(rng, m + nx, 3, 4, 9, false);
        Slp prog = slp_from_poly(p);
        std::vector<Int> xi;
        for (std::size_t i = 0; i < nx; ++i)
            xi.push_back(testgen::rcoeff(rng, 5, false));
        Slp spec = slp_specialize(prog, xi);
        REQUIRE(spec.num_inputs() == m);
        Point u = testgen::rpoint(rng, m, 60);
        Point full = u;
        for (const Int& v : xi)
            full.emplace_back(v);
        REQUIRE(slp_eval<Rat>(spec, u).outputs[0] ==
                slp_eval<Rat>(prog, full).outputs[0]);
    }

    Slp id2(2, {{OpKind::Input, 0}, {OpKind::Input, 1}, {OpKind::Add, 0, 1}}, {2});
    Slp s0 = slp_specialize(id2, std::vector<Int>{Int(0)});
    std::vector<Rat> u{Rat(7)};
    CHECK(slp_eval<Rat>(s0, u).outputs[0] == 7);
    CHECK_THROWS_AS(slp_specialize(id2, std::vector<Int>(3, Int(0))), DomainError);
}

TEST_CASE("power-sum program: hand cases") {
    /* m = n = 1: H = 1 + (U1 - 1) X1. */
    Slp h11 = build_powersum_slp(1, 1);
    std::vector<Rat> u1x1{make_rat(Int(2), Int(3)), Rat(1)};
    CHECK(slp_eval<Rat>(h11, u1x1).outputs[0] == make_rat(Int(2), Int(3)));
    std::vector<Rat> u1x0{make_rat(Int(2), Int(3)), Rat(0)};
    CHECK(slp_eval<Rat>(h11, u1x0).outputs[0] == 1);

    Slp h22 = build_powersum_slp(2, 2);
    std::vector<Rat> in{Rat(2), Rat(3), Rat(1), Rat(1)};
    CHECK(slp_eval<Rat>(h22, in).outputs[0] == 35);

    CHECK_THROWS_AS(build_powersum_slp(0, 1), DomainError);
}

TEST_CASE("power-sum identity over all bit patterns") {
    testgen::Rng rng(777001);
    for (std::size_t m = 1; m <= 4; ++m)
        for (std::size_t n = 1; n <= 4; ++n) {
            Slp h = build_powersum_slp(m, n);
            REQUIRE(h.num_inputs() == m + n);
            for (std::uint64_t j = 0; j < (std::uint64_t(1) << n); ++j) {
                std::vector<Rat> bits = bit_point(j, n);
                for (int rep = 0; rep < 20; ++rep) {
                    Point u = testgen::rpoint(rng, m, 30);
                    Point in = u;
                    in.insert(in.end(), bits.begin(), bits.end());
                    REQUIRE(slp_eval<Rat>(h, in).outputs[0] == powsum_direct(u, j));
                }
            }
        }
}

TEST_CASE("power-sum program length is at most 5mn") {
    for (std::size_t m = 1; m <= 8; ++m)
        for (std::size_t n = 1; n <= 8; ++n) {
            Slp h = build_powersum_slp(m, n);
            REQUIRE(h.length() <= 5 * m * n);
            REQUIRE(h.length() == 5 * m * n - m - 1);
        }
}

TEST_CASE("program JSON round trip") {
    Slp prog(2,
             {{OpKind::Input, 0},
              {OpKind::Input, 1},
              {OpKind::ConstOne},
              {OpKind::Mul, 0, 1},
              {OpKind::Sub, 3, 2},
              {OpKind::ConstZero},
              {OpKind::Add, 4, 5}},
             {6});
    Json j = slp_to_json(prog);
    CHECK(j.at("inputs") == 2);
    CHECK(j.at("code")[0] == Json::array({"in", 0}));
    CHECK(j.at("code")[3] == Json::array({"mul", 0, 1}));
    CHECK(j.at("out") == Json::array({6}));
    CHECK(slp_from_json(j) == prog);

    CHECK_THROWS_AS(slp_from_json(Json::parse(R"({"inputs":1,"code":[["div",0,0]],"out":[0]})")),
                    SchemaError);
    CHECK_THROWS_AS(slp_from_json(Json::parse(R"({"inputs":1,"code":[["in"]],"out":[0]})")),
                    SchemaError);
    CHECK_THROWS_AS(slp_from_json(Json::parse(R"({"inputs":1})")), SchemaError);
}
