#include "ithum/oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>

#include "ithum/errors.hpp"

namespace ithum {

OracleReport refine_study(const std::string& quantity, const Extractor& f, int base_resolution, int levels,
                          double budget_seconds)
{
    if (levels < 3)
        throw Error(ErrorCode::InvalidArgument, "a refinement study needs at least three levels");
    if (base_resolution < 1)
        throw Error(ErrorCode::InvalidArgument, "base resolution must be positive");

    OracleReport r;
    r.quantity = quantity;
    for (int l = 0; l < levels; ++l)
        r.resolutions.push_back(base_resolution << l);
    r.values.assign(levels, 0.0);

    const auto start = std::chrono::steady_clock::now();
    std::exception_ptr failure;
    #pragma omp parallel for schedule(dynamic)
    for (int l = 0; l < levels; ++l) {
        try {
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (elapsed > budget_seconds)
                throw Error(ErrorCode::BudgetExceeded, "refinement study of " + quantity + " exceeded " +
                                                           std::to_string(budget_seconds) + " s before level " +
                                                           std::to_string(l));
            r.values[l] = f(r.resolutions[l]);
        } catch (...) {
            #pragma omp critical
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);

    r.coarse = r.values.front();
    r.fine = r.values.back();
    r.monotone = true;
    for (int l = 2; l < levels; ++l)
        if ((r.values[l] - r.values[l - 1]) * (r.values[l - 1] - r.values[l - 2]) <= 0.0)
            r.monotone = false;
    if (levels >= 2 && r.values[1] == r.values[0])
        r.monotone = false;

    const double q1 = r.values[levels - 3], q2 = r.values[levels - 2], q3 = r.values[levels - 1];
    const double d1 = q1 - q2, d2 = q2 - q3;
    r.applicable = d1 != 0.0 && d2 != 0.0 && (d1 > 0.0) == (d2 > 0.0) && std::abs(d2) < std::abs(d1);
    if (r.applicable) {
        r.observed_order = std::log2(d1 / d2);
        r.extrapolated = q3 - d2 / (std::exp2(r.observed_order) - 1.0);
    } else {
        r.observed_order = std::numeric_limits<double>::quiet_NaN();
        r.extrapolated = q3;
    }
    return r;
}

double extract_quantity(const Scenario& s, const std::string& quantity, int resolution)
{
    const Setup st = prepare(s, resolution);
    const auto data = initial_data(s, st);
    const auto& ops = st.ops;

    if (quantity == "energy_drift" || quantity == "compatible_drift") {
        const Trajectory tr = solve_homogeneous(ops, data[0].z0, data[0].z1, st.grid);
        const ConservationReport rep = conservation_report(ops, tr);
        return quantity == "energy_drift" ? rep.max_drift : rep.compatible_drift;
    }
    if (quantity == "multiplier_residual") {
        FieldParams fp;
        fp.T = st.grid.T;
        fp.dt = st.grid.dt;
        const VectorField q = build_field(field_kind(s.field), st.domain, st.partition, st.regions, s.observer, fp);
        const Trajectory tr = solve_homogeneous(ops, data[0].z0, data[0].z1, st.grid);
        return multiplier_identity(tr, q, ops).residual;
    }
    if (quantity == "e_ratio") {
        HumOptions o;
        o.tol = s.tol;
        o.max_iter = s.max_iter;
        o.lowpass_modes = effective_lowpass(s);
        o.method = s.method;
        const HumResult res = solve_hum(ops, st.regions, data[0].z0, data[0].z1, st.grid, o, st.budget.T_min);
        return verify_null(res, ops).e_ratio;
    }
    if (quantity == "transposition_residual") {
        // smooth control on omega and smooth test source everywhere
        const auto mask = control_dof_mask(ops, st.regions);
        const int np = st.grid.points();
        ControlVector f{st.grid, Source(np)};
        Source g(np);
        for (int k = 0; k < np; ++k) {
            const double t = st.grid.time(k);
            f.values[k] = sample(ops, [&](const Point& x, int) { return std::sin(3.0 * t) * std::cos(x[0] + x[1]); });
            for (int d = 0; d < ops.size(); ++d)
                if (!mask[d])
                    f.values[k][d] = 0.0;
            g[k] = sample(ops, [&](const Point& x, int c) { return std::cos(2.0 * t + c) * std::sin(x[0] - x[1]); });
        }
        const Trajectory u = solve_controlled(ops, data[0].z0, data[0].z1, f, st.grid);
        return transposition_residual(ops, u, data[0].z0, data[0].z1, f, g).residual;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown quantity '" + quantity + "'");
}

OracleReport refine_study(const Scenario& s, const std::string& quantity, int levels)
{
    return refine_study(
        quantity, [&](int res) { return extract_quantity(s, quantity, res); }, s.resolution, levels,
        s.budget_seconds);
}

double standing_wave_reference(const Point& x, double t, int mode, int dim, double c, double length)
{
    const double k = mode * std::acos(-1.0) / length;
    double v = std::sin(k * x[0]);
    if (dim == 2)
        v *= std::sin(k * x[1]);
    return v * std::cos(k * c * std::sqrt(static_cast<double>(dim)) * t);
}

PairField standing_wave_field(const DiscreteOperators& ops, double t, int mode, double c)
{
    const Box& outer = ops.domain.outer();
    const int dim = ops.domain.dim();
    const double L = outer.hi[0] - outer.lo[0];
    return sample(ops, [&](const Point& x, int) {
        return standing_wave_reference({x[0] - outer.lo[0], x[1] - outer.lo[1]}, t, mode, dim, c, L);
    });
}

void write_oracle_csv(std::ostream& os, const OracleReport& r)
{
    os << "level,resolution,value\n";
    char buf[320];
    for (std::size_t l = 0; l < r.values.size(); ++l) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g\n", l, r.resolutions[l], r.values[l]);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "# summary quantity=%s coarse=%.17g fine=%.17g extrapolated=%.17g order=%.6g "
                  "applicable=%d monotone=%d\n",
                  r.quantity.c_str(), r.coarse, r.fine, r.extrapolated, r.observed_order, r.applicable ? 1 : 0,
                  r.monotone ? 1 : 0);
    os << buf;
}

} // namespace ithum
