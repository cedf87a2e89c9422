#include "common.hpp"

using namespace ithum;
using namespace ithum::test;

namespace {

const TwoComponentDomain& square()
{
    static const auto d = build_domain(2, {{0.0, 0.0}, {1.0, 1.0}}, {{0.25, 0.25}, {0.75, 0.75}}, 16);
    return d;
}

} // namespace

TEST_CASE("identity coefficients and unit h")
{
    const auto m = validate_material(square(), CoefficientField::identity_scaled(1.0),
                                     InterfaceCoefficient::constant(1.0));
    CHECK(m.alpha == 1.0);
    CHECK(m.beta == 1.0);
    CHECK(m.M == 0.0);
    CHECK(m.h0 == 1.0);
}

TEST_CASE("affine scalar coefficient (1 + 0.1 x1) I")
{
    const auto m = validate_material(square(), CoefficientField::affine_scalar(1.0, {0.1, 0.0}),
                                     InterfaceCoefficient::constant(1.0));
    CHECK(m.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.beta == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(std::abs(m.M - 0.1) <= 1e-10);
}

TEST_CASE("a negative eigenvalue is not elliptic")
{
    // a_11 = 1 - 1.5 x1 reaches -0.5 at x1 = 1
    std::array<std::array<Point, 2>, 2> g{};
    g[0][0] = {-1.5, 0.0};
    const auto A = CoefficientField::affine({{{1.0, 0.0}, {0.0, 1.0}}}, g);
    CHECK(error_code_of([&] { validate_material(square(), A, InterfaceCoefficient::constant(1.0)); }) ==
          ErrorCode::NotElliptic);
}

TEST_CASE("nonpositive h and asymmetric A are rejected")
{
    CHECK(error_code_of([] {
              validate_material(square(), CoefficientField::identity_scaled(1.0), InterfaceCoefficient::constant(0.0));
          }) == ErrorCode::NonPositiveH);
    const auto A = CoefficientField::affine({{{1.0, 0.2}, {0.0, 1.0}}}, {});
    CHECK(error_code_of([&] { validate_material(square(), A, InterfaceCoefficient::constant(1.0)); }) ==
          ErrorCode::NotSymmetric);
}

TEST_CASE("geometric condition R < alpha / (n M)")
{
    auto m = validate_material(square(), CoefficientField::identity_scaled(1.0), InterfaceCoefficient::constant(1.0));
    CHECK(geometric_condition(m, 1e6, 2));
    m.M = 0.1;
    CHECK(geometric_condition(m, 0.5, 2));
    CHECK_FALSE(geometric_condition(m, 6.0, 2));
}

TEST_CASE("constant fields have M = 0 and alpha, beta at the closed-form eigenvalues")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = 1.0 + u(rng), b = 1.5 + u(rng), c = u(rng);
        const auto A = CoefficientField::affine({{{a, c}, {c, b}}}, {});
        const auto m = validate_material(square(), A, InterfaceCoefficient::constant(2.0));
        const double mean = 0.5 * (a + b), r = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
        CHECK(m.M == 0.0);
        CHECK(m.alpha == doctest::Approx(mean - r).epsilon(1e-14));
        CHECK(m.beta == doctest::Approx(mean + r).epsilon(1e-14));
        const auto ev = symmetric_eigenvalues({{{a, c}, {c, b}}});
        CHECK(ev[0] == doctest::Approx(mean - r).epsilon(1e-14));
        CHECK(ev[1] == doctest::Approx(mean + r).epsilon(1e-14));
    }
}

TEST_CASE("checkerboard coefficients and affine h")
{
    const auto m = validate_material(square(), CoefficientField::checkerboard(2.0, 0.5),
                                     InterfaceCoefficient::affine(1.0, {0.5, 0.0}));
    CHECK(m.alpha == 0.5);
    CHECK(m.beta == 2.0);
    CHECK(m.M == 0.0);
    CHECK(m.h0 == doctest::Approx(1.0 + 0.5 * 0.25));
}

TEST_CASE("validation is deterministic")
{
    const auto A = CoefficientField::affine_scalar(1.0, {0.1, -0.05});
    const auto m1 = validate_material(square(), A, InterfaceCoefficient::constant(1.0));
    const auto m2 = validate_material(square(), A, InterfaceCoefficient::constant(1.0));
    CHECK(m1.alpha == m2.alpha);
    CHECK(m1.beta == m2.beta);
    CHECK(m1.M == m2.M);
    CHECK(m1.h_facet == m2.h_facet);
}
