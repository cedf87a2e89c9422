#include "ithum/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ithum/errors.hpp"

namespace ithum {

namespace {

double drift(const std::vector<double>& e)
{
    if (e.empty())
        return 0.0;
    const double e0 = e.front();
    double d = 0.0;
    for (double x : e)
        d = std::max(d, std::abs(x - e0));
    return d / std::max(e0, 1e-300);
}

} // namespace

EnergyReport energy_at(const DiscreteOperators& ops, const PairField& state, const PairField& velocity, double time)
{
    if (static_cast<int>(state.size()) != ops.size() || static_cast<int>(velocity.size()) != ops.size())
        throw Error(ErrorCode::ShapeMismatch, "state or velocity has the wrong number of entries");
    const int n1 = ops.dofs.n1;
    const std::span<const double> m(ops.mass);
    const std::span<const double> v(velocity);
    EnergyReport r;
    r.time = time;
    r.kinetic1 = kernels::serial::weighted_dot(m.first(n1), v.first(n1), v.first(n1));
    r.kinetic2 = kernels::serial::weighted_dot(m.subspan(n1), v.subspan(n1), v.subspan(n1));
    const FormParts p = bilinear_parts(ops, state, state);
    r.elastic1 = p.omega1;
    r.elastic2 = p.omega2;
    r.interface = p.gamma;
    r.total = 0.5 * (r.kinetic1 + r.kinetic2 + r.elastic1 + r.elastic2 + r.interface);
    return r;
}

std::vector<EnergyReport> energy_series(const DiscreteOperators& ops, const Trajectory& traj)
{
    std::vector<EnergyReport> out;
    out.reserve(traj.states.size());
    for (int k = 0; k < traj.grid.points(); ++k)
        out.push_back(energy_at(ops, traj.states[k], traj.velocities[k], traj.grid.time(k)));
    return out;
}

std::vector<double> compatible_energy_series(const DiscreteOperators& ops, const Trajectory& traj)
{
    std::vector<double> out;
    const double dt = traj.grid.dt;
    PairField d(ops.size());
    for (int k = 0; k < traj.grid.steps; ++k) {
        const auto& a = traj.states[k];
        const auto& b = traj.states[k + 1];
        for (int i = 0; i < ops.size(); ++i)
            d[i] = (b[i] - a[i]) / dt;
        out.push_back(0.5 * mass_product(ops, d, d) + 0.5 * bilinear_form(ops, b, a));
    }
    return out;
}

ConservationReport conservation_report(const DiscreteOperators& ops, const Trajectory& traj)
{
    ConservationReport r;
    r.series = energy_series(ops, traj);
    r.compatible = compatible_energy_series(ops, traj);
    std::vector<double> totals;
    totals.reserve(r.series.size());
    for (const auto& e : r.series)
        totals.push_back(e.total);
    r.max_drift = drift(totals);
    r.compatible_drift = drift(r.compatible);
    r.conservative = !traj.forced;
    return r;
}

void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& series)
{
    os << "t,kinetic1,kinetic2,elastic1,elastic2,interface,total\n";
    char buf[256];
    for (const auto& e : series) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.time, e.kinetic1,
                      e.kinetic2, e.elastic1, e.elastic2, e.interface, e.total);
        os << buf;
    }
}

} // namespace ithum
