#pragma once

#include <cmath>
#include <random>

#include "doctest.h"

#include "ithum/errors.hpp"
#include "ithum/oracle.hpp"

namespace ithum::test {

/// Unit interval / unit square with the inner box (0.25, 0.75), observer at
/// the centre, both thicknesses 0.125, T = 1.2 T_min, cfl 0.5.
inline Scenario reference(int dim, int resolution)
{
    Scenario s;
    s.dim = dim;
    s.resolution = resolution;
    s.outer = {{0.0, 0.0}, {1.0, dim == 2 ? 1.0 : 0.0}};
    s.inner = {{0.25, dim == 2 ? 0.25 : 0.0}, {0.75, dim == 2 ? 0.75 : 0.0}};
    s.observer = {0.5, dim == 2 ? 0.5 : 0.0};
    s.bump_center = s.observer;
    return s;
}

inline PairField random_field(const DiscreteOperators& ops, std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    PairField u = ops.zeros();
    for (double& x : u)
        x = n(rng);
    return u;
}

inline double rel(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline double max_abs_diff(const PairField& a, const PairField& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const PairField& a)
{
    double m = 0.0;
    for (double x : a)
        m = std::max(m, std::abs(x));
    return m;
}

template <class F>
ErrorCode error_code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ithum::Error");
    return ErrorCode::InvalidArgument;
}

} // namespace ithum::test
