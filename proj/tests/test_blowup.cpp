#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "mcf/blowup.hpp"

using namespace mcf;
using cplx = std::complex<double>;

namespace {

void check_entrywise(const HermitianMatrix2& a, const HermitianMatrix2& b,
                     double tol)
{
    CHECK(std::abs(a.a11 - b.a11) < tol);
    CHECK(std::abs(a.a22 - b.a22) < tol);
    CHECK(std::abs(a.a12 - b.a12) < tol);
}

} // namespace

TEST_CASE("validity: Burns passes everything")
{
    const auto rep = check_validity(parse_potential("S"));
    CHECK(rep.g_S_at_0 == 1.0);
    CHECK(rep.cond_extension);
    CHECK(rep.cond_positive_1);
    CHECK(rep.cond_positive_2);
    CHECK(!rep.first_violation_S);
    CHECK(rep.all_ok());
}

TEST_CASE("validity: S^2 fails only the extension condition")
{
    const auto rep = check_validity(parse_potential("S^2"));
    CHECK(rep.g_S_at_0 == 0.0);
    CHECK(!rep.cond_extension);
    CHECK(rep.cond_positive_1);
    CHECK(rep.cond_positive_2);
    CHECK(!rep.all_ok());
}

TEST_CASE("validity: -log(1+S) violates positivity everywhere")
{
    // g_S + S g_SS = -1/(1+S)^2 < 0 at every sampled S
    const auto rep = check_validity(parse_potential("-log(1 + S)"));
    CHECK(!rep.cond_positive_2);
    CHECK(rep.cond_positive_1); // 1/S - 1/(1+S) = 1/(S(1+S)) > 0
    REQUIRE(rep.first_violation_S.has_value());
    // first violating sample is the smallest grid point
    CHECK(*rep.first_violation_S < 1e-9 * rep.S_max);
    CHECK(!rep.all_ok());
}

TEST_CASE("validity: accepted family")
{
    CHECK(check_validity(parse_potential("S + 0.1*S^2")).all_ok());
    CHECK(check_validity(parse_potential("log(1 + S) + S")).all_ok());
    CHECK(!check_validity(parse_potential("0")).all_ok());
    CHECK_THROWS_AS(check_validity(parse_potential("S"), 100.0, 1), OutOfRangeError);
}

TEST_CASE("closed pullback on the divisor")
{
    const auto burns = parse_potential("S");
    const auto m1 = pullback_matrix_closed(burns, {Chart::U1, 0.0, cplx(1.0, 0.0)});
    CHECK(m1.a11 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m1.a22 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(m1.a12) == 0.0);
    CHECK(m1.positive_definite());

    const auto m0 = pullback_matrix_closed(burns, {Chart::U1, 0.0, 0.0});
    CHECK(m0.a11 == 1.0);
    CHECK(m0.a22 == 1.0);
    CHECK(m0.positive_definite());

    // pure log S: degenerate along the divisor normal
    const auto deg = pullback_matrix_closed(parse_potential("0"),
                                            {Chart::U1, 0.0, cplx(1.0, 0.0)});
    CHECK(deg.a11 == 0.0);
    CHECK(deg.a22 == doctest::Approx(0.5));
    CHECK(!deg.positive_definite());

    // U2 swaps the fiber/base roles
    const auto u2 = pullback_matrix_closed(burns, {Chart::U2, 0.0, cplx(1.0, 0.0)});
    CHECK(u2.a11 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(u2.a22 == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("divisor restriction is positive-definite iff g_S(0) > 0")
{
    for (const auto* text : {"S", "2*S", "S^2", "0", "S + 0.5*S^2"}) {
        const auto g = parse_potential(text);
        const double gS0 = eval_g_jet(g, 0.0).v1;
        const auto M = pullback_matrix_closed(g, {Chart::U1, 0.0, cplx(0.7, -0.2)});
        CHECK(M.positive_definite() == (gS0 > 0.0));
    }
}

TEST_CASE("numeric pullback agrees with the closed form at hand-picked points")
{
    const auto burns = parse_potential("S");
    const ChartPoint p{Chart::U1, cplx(0.5, 0.0), cplx(0.3, 0.0)};
    check_entrywise(pullback_matrix_numeric(burns, p, 1e-4),
                    pullback_matrix_closed(burns, p), 1e-6);

    // pure log potential: off-diagonal factor g_S + S g_SS = 0
    const auto logonly = parse_potential("0");
    const ChartPoint q{Chart::U1, cplx(1.0, 0.0), cplx(0.0, 0.0)};
    CHECK(std::abs(pullback_matrix_numeric(logonly, q, 1e-4).a12) < 1e-7);

    // a11 = (1+|v|^2)(g_S + S g_SS) = 1 at (1, 0) for Burns
    CHECK(pullback_matrix_numeric(burns, q, 1e-4).a11 == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(pullback_matrix_numeric(burns, {Chart::U1, 0.0, 0.3}, 1e-4),
                    DomainError);
}

TEST_CASE("numeric pullback: 100 random points, positive-definite, 1e-6 match")
{
    // Over 0.1 <= |z_fiber| <= 2 the h = 1e-4 stencil's O(h^2) truncation on
    // the log-part exceeds 1e-6 near the small-fiber corner (fourth
    // derivatives grow like 1/|z_fiber|^4), so this range is checked with
    // h = 1e-5, where 1e-6 is attainable across the whole box.
    const auto burns = parse_potential("S");
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> mag(0.1, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    std::uniform_real_distribution<double> base(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double r = mag(rng), th = ang(rng);
        const ChartPoint p{Chart::U1, std::polar(r, th),
                           cplx(base(rng) * 0.5, base(rng) * 0.5)};
        const auto closed = pullback_matrix_closed(burns, p);
        const auto numeric = pullback_matrix_numeric(burns, p, 1e-5);
        check_entrywise(numeric, closed, 1e-6);
        CHECK(numeric.positive_definite());
        CHECK(closed.positive_definite());
    }
}

TEST_CASE("numeric pullback on the U2 chart")
{
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (const auto* text : {"S", "S + 0.2*S^2"}) {
        const auto g = parse_potential(text);
        for (int i = 0; i < 20; ++i) {
            cplx fiber(d(rng), d(rng));
            if (std::abs(fiber) < 0.4)
                fiber += cplx(0.7, -0.4);
            const ChartPoint p{Chart::U2, fiber, cplx(d(rng), d(rng))};
            check_entrywise(pullback_matrix_numeric(g, p, 1e-4),
                            pullback_matrix_closed(g, p), 1e-6);
        }
    }
}

TEST_CASE("chart consistency on the overlap")
{
    // U1 coords (u, v) with v != 0 correspond to U2 coords (fiber, base) =
    // (u v, 1/v); the pullbacks are congruent, so positive-definiteness and
    // determinant signs agree.
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    for (const auto* text : {"S", "0", "S^2", "2*S"}) {
        const auto g = parse_potential(text);
        for (int i = 0; i < 40; ++i) {
            const cplx u(d(rng), d(rng));
            cplx v(d(rng), d(rng));
            if (std::abs(u) < 0.05 || std::abs(v) < 0.2)
                continue;
            const auto m1 = pullback_matrix_closed(g, {Chart::U1, u, v});
            const auto m2 = pullback_matrix_closed(g, {Chart::U2, u * v, 1.0 / v});
            CHECK(m1.positive_definite() == m2.positive_definite());
            CHECK((m1.det() > 0) == (m2.det() > 0));
        }
    }
}

TEST_CASE("Fubini-Study coefficient")
{
    CHECK(fubini_study_check(0.0) == 1.0);
    CHECK(fubini_study_check(cplx(1.0, 0.0)) == doctest::Approx(0.25));
    CHECK(fubini_study_check(cplx(3.0, 0.0)) == doctest::Approx(0.01));
    CHECK(fubini_study_check(cplx(0.0, 3.0)) == doctest::Approx(0.01));
}
