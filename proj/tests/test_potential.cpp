#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fd_oracle.hpp"
#include "mcf/potential.hpp"

using namespace mcf;

TEST_CASE("parse shapes from the grammar")
{
    const auto id = parse_potential("S");
    CHECK(id.root().kind == NodeKind::VarS);

    // S + 0.5*S^2  ->  Add(Var, Mul(Num(0.5), Pow(Var, Num(2))))
    const auto e = parse_potential("S + 0.5*S^2");
    REQUIRE(e.root().kind == NodeKind::Add);
    CHECK(e.root().lhs->kind == NodeKind::VarS);
    REQUIRE(e.root().rhs->kind == NodeKind::Mul);
    CHECK(e.root().rhs->lhs->kind == NodeKind::Number);
    CHECK(e.root().rhs->lhs->number == 0.5);
    REQUIRE(e.root().rhs->rhs->kind == NodeKind::Pow);
    CHECK(e.root().rhs->rhs->lhs->kind == NodeKind::VarS);
    CHECK(e.root().rhs->rhs->rhs->number == 2.0);
}

TEST_CASE("operator binding")
{
    // ^ is right-associative: 2^3^2 = 2^(3^2)
    CHECK(eval_value(parse_potential("2^3^2"), 1.0) == 512.0);
    // unary minus binds tighter than ^ in this grammar: -S^2 = (-S)^2
    CHECK(eval_value(parse_potential("-S^2"), 3.0) == 9.0);
    CHECK(eval_value(parse_potential("-(S^2)"), 3.0) == -9.0);
    CHECK(eval_value(parse_potential("2*S^2"), 3.0) == 18.0);
    CHECK(eval_value(parse_potential("S^-1"), 4.0) == 0.25);
    CHECK(eval_value(parse_potential("1 - 2 - 3"), 0.0) == -4.0);
    CHECK(eval_value(parse_potential("12/4/3"), 0.0) == 1.0);
    CHECK(eval_value(parse_potential("pi"), 0.0) == doctest::Approx(M_PI));
    CHECK(eval_value(parse_potential("e"), 0.0) == doctest::Approx(std::exp(1.0)));
    CHECK(eval_value(parse_potential("1.5e2"), 0.0) == 150.0);
}

TEST_CASE("syntax and identifier errors")
{
    CHECK_THROWS_AS(parse_potential("S + "), SyntaxError);
    CHECK_THROWS_AS(parse_potential(""), SyntaxError);
    CHECK_THROWS_AS(parse_potential("(S"), SyntaxError);
    CHECK_THROWS_AS(parse_potential("S )"), SyntaxError);
    CHECK_THROWS_AS(parse_potential("1..2"), SyntaxError);
    CHECK_THROWS_AS(parse_potential("S @ 2"), SyntaxError);
    CHECK_THROWS_AS(parse_potential("x + 1"), UnknownIdentifierError);
    CHECK_THROWS_AS(parse_potential("tan(S)"), UnknownIdentifierError);
    CHECK_THROWS_AS(parse_potential("sin S"), SyntaxError); // missing '('
    try {
        parse_potential("S + ");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position() == 4); // end of input
    }
}

TEST_CASE("serialization round-trips structurally")
{
    const std::vector<std::string> corpus = {
        "S",
        "S + 0.5*S^2",
        "-S^2",
        "-(S^2)",
        "exp(-S)*sin(3*S) + sqrt(S + 1)",
        "log(1 + S) + S",
        "1/(1 + S)^2",
        "S^2^3",
        "(S^2)^3",
        "2*(S - 1)*(S + 1)",
        "-(2*S)",
        "pi*S + e",
        "S - log(S + 0.25)",
        "cos(S)/(2 - sin(S))",
        "S^-2",
        "S^(1 + S)",
    };
    for (const auto& text : corpus) {
        const auto ast = parse_potential(text);
        const auto printed = to_string(ast);
        const auto reparsed = parse_potential(printed);
        CHECK_MESSAGE(ast == reparsed, text, " -> ", printed);
        CHECK(to_string(reparsed) == printed);
    }
}

TEST_CASE("parsing is deterministic")
{
    const std::string text = "S + 0.1*sin(3*S) - exp(-S)/2";
    CHECK(parse_potential(text) == parse_potential(text));
}

TEST_CASE("g-jet examples")
{
    const auto lin = eval_g_jet(parse_potential("S"), 2.0);
    CHECK(lin.v0 == 2.0);
    CHECK(lin.v1 == 1.0);
    CHECK(lin.v2 == 0.0);
    CHECK(lin.v3 == 0.0);

    const auto sq = eval_g_jet(parse_potential("S^2"), 1.5);
    CHECK(sq.v0 == doctest::Approx(2.25));
    CHECK(sq.v1 == doctest::Approx(3.0));
    CHECK(sq.v2 == doctest::Approx(2.0));
    CHECK(sq.v3 == 0.0);

    const auto ex = eval_g_jet(parse_potential("exp(S)"), 0.0);
    CHECK(ex.v0 == 1.0);
    CHECK(ex.v1 == 1.0);
    CHECK(ex.v2 == 1.0);
    CHECK(ex.v3 == 1.0);
}

TEST_CASE("f-jet examples")
{
    const auto f1 = eval_f_jet(parse_potential("S"), 1.0);
    CHECK(f1.v0 == doctest::Approx(1.0));
    CHECK(f1.v1 == doctest::Approx(2.0));
    CHECK(f1.v2 == doctest::Approx(-1.0));
    CHECK(f1.v3 == doctest::Approx(2.0));

    const auto f0 = eval_f_jet(parse_potential("0"), 4.0);
    CHECK(f0.v0 == doctest::Approx(std::log(4.0)));
    CHECK(f0.v1 == doctest::Approx(0.25));
    CHECK(f0.v2 == doctest::Approx(-0.0625));
    CHECK(f0.v3 == doctest::Approx(0.03125));

    const auto fq = eval_f_jet(parse_potential("S"), 0.25);
    CHECK(fq.v0 == doctest::Approx(std::log(0.25) + 0.25));
    CHECK(fq.v1 == doctest::Approx(5.0));
    CHECK(fq.v2 == doctest::Approx(-16.0));
    CHECK(fq.v3 == doctest::Approx(128.0));
}

TEST_CASE("f-jet first derivative is bit-identical to 1/S + g_S")
{
    const auto exprs = {"S", "S + 0.1*S^2", "exp(-S)*cos(S)", "log(1 + S) + S"};
    for (const auto* text : exprs) {
        const auto g = parse_potential(text);
        for (double S : {0.25, 0.5, 1.0, 3.0, 7.7}) {
            CHECK(eval_f_jet(g, S).v1 == 1.0 / S + eval_g_jet(g, S).v1);
        }
    }
}

TEST_CASE("evaluation domains")
{
    const auto g = parse_potential("S");
    CHECK_NOTHROW(eval_g_jet(g, 0.0));
    CHECK_THROWS_AS(eval_g_jet(g, -1.0), DomainError);
    CHECK_THROWS_AS(eval_f_jet(g, 0.0), DomainError); // log S singular
    CHECK_THROWS_AS(eval_f_jet(g, -1.0), DomainError);
    CHECK_THROWS_AS(eval_g_jet(parse_potential("log(S)"), 0.0), DomainError);
    CHECK_THROWS_AS(eval_g_jet(parse_potential("log(S - 5)"), 1.0), DomainError);
    CHECK_THROWS_AS(eval_g_jet(parse_potential("1/(S - 1)"), 1.0), DomainError);
    CHECK_THROWS_AS(eval_g_jet(parse_potential("(-1)^0.5"), 1.0), DomainError);
    CHECK_THROWS_AS(eval_value(parse_potential("exp(exp(S))"), 10.0), OverflowError);
}

TEST_CASE("jets agree with finite differences of plain evaluation")
{
    const std::vector<std::string> corpus = {
        "exp(S)", "log(S)",  "sqrt(S)",          "sin(S)",
        "cos(S)", "S^2.5",   "S + 0.1*sin(3*S)", "exp(-S)/(1 + S)",
        "S^3",    "log(1 + S)*cos(S)",
    };
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dist(0.05, 10.0);
    for (const auto& text : corpus) {
        const auto g = parse_potential(text);
        const auto f = [&](double x) { return eval_value(g, x); };
        for (int i = 0; i < 12; ++i) {
            const double S = dist(rng);
            // relative step near 0 (log/sqrt derivatives blow up), capped by
            // the O(1) oscillation scale of the corpus at large S
            const double h = 4e-3 * std::min(S, 2.0);
            const Jet3 j = eval_g_jet(g, S);
            CHECK(j.v0 == doctest::Approx(f(S)).epsilon(1e-12));
            CHECK(j.v1 == doctest::Approx(fd::d1(f, S, h)).epsilon(1e-6));
            CHECK(j.v2 == doctest::Approx(fd::d2(f, S, h)).epsilon(1e-6));
            CHECK(j.v3 == doctest::Approx(fd::d3(f, S, h)).epsilon(1e-6));
        }
    }
}
