#pragma once

#include <array>
#include <vector>

#include "ithum/geometry.hpp"

namespace ithum {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Coefficient matrix field A(x). Three families are supported:
///   IdentityScaled  A = c I
///   Affine          a_ij(x) = c0_ij + g_ij . x
///   Checkerboard    A = c1 I on Omega1, c2 I on Omega2
struct CoefficientField {
    enum class Family { IdentityScaled, Affine, Checkerboard };

    Family family = Family::IdentityScaled;
    double c = 1.0;
    Mat2 c0{{{1.0, 0.0}, {0.0, 1.0}}};
    std::array<std::array<Point, 2>, 2> g{};   ///< g[i][j] = gradient of a_ij
    double c1 = 1.0;
    double c2 = 1.0;

    static CoefficientField identity_scaled(double c);
    static CoefficientField affine(const Mat2& c0, const std::array<std::array<Point, 2>, 2>& g);
    /// (c0 + g.x) I
    static CoefficientField affine_scalar(double c0, const Point& g);
    static CoefficientField checkerboard(double c1, double c2);

    /// Value at x, seen from component 1 or 2.
    Mat2 at(const Point& x, int component) const;
    /// Exact partial derivative d a_ij / d x_k.
    double derivative(int i, int j, int k) const;

    bool operator==(const CoefficientField&) const = default;
};

/// Interface coefficient h(x) on Gamma: constant or affine.
struct InterfaceCoefficient {
    enum class Family { Constant, Affine };

    Family family = Family::Constant;
    double value = 1.0;
    Point g{0.0, 0.0};

    static InterfaceCoefficient constant(double h) { return {Family::Constant, h, {0.0, 0.0}}; }
    static InterfaceCoefficient affine(double h0, const Point& g) { return {Family::Affine, h0, g}; }

    double at(const Point& x) const { return family == Family::Constant ? value : value + dot(g, x); }

    bool operator==(const InterfaceCoefficient&) const = default;
};

struct MaterialData {
    CoefficientField A;
    InterfaceCoefficient h;
    std::vector<double> h_facet;   ///< h sampled at each interface facet centroid
    double alpha = 0.0;
    double beta = 0.0;
    double M = 0.0;
    double h0 = 0.0;
};

/// Checks symmetry, ellipticity and positivity of h on the grid and extracts
/// alpha, beta, M and h0. Eigenvalues are exact (closed form for 2x2); M
/// comes from grid differences of each entry inside each component.
MaterialData validate_material(const TwoComponentDomain& domain, const CoefficientField& A,
                               const InterfaceCoefficient& h);

/// R < alpha / (n M), vacuous when M = 0.
bool geometric_condition(const MaterialData& material, double R, int n);

/// Eigenvalues of a symmetric 2x2 matrix in ascending order.
std::array<double, 2> symmetric_eigenvalues(const Mat2& a);

} // namespace ithum
