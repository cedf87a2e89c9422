#pragma once

#include <iosfwd>
#include <vector>

#include "ithum/wave_solver.hpp"

namespace ithum {

/// Parts are the integrals without the 1/2; total = (sum of parts) / 2.
struct EnergyReport {
    double time = 0.0;
    double kinetic1 = 0.0;
    double kinetic2 = 0.0;
    double elastic1 = 0.0;
    double elastic2 = 0.0;
    double interface = 0.0;
    double total = 0.0;
};

EnergyReport energy_at(const DiscreteOperators& ops, const PairField& state, const PairField& velocity,
                       double time = 0.0);

/// Continuum-form energy at every time point, using the trajectory velocities.
std::vector<EnergyReport> energy_series(const DiscreteOperators& ops, const Trajectory& traj);

/// Leapfrog-compatible energy at the half steps k + 1/2, k = 0..N-1:
///   1/2 d^T M d + 1/2 u_{k+1}^T K u_k,  d = (u_{k+1} - u_k) / dt,
/// conserved to rounding by the homogeneous scheme.
std::vector<double> compatible_energy_series(const DiscreteOperators& ops, const Trajectory& traj);

struct ConservationReport {
    double max_drift = 0.0;              ///< continuum form
    double compatible_drift = 0.0;
    std::vector<EnergyReport> series;
    std::vector<double> compatible;
    bool conservative = true;            ///< false for forced trajectories
};

ConservationReport conservation_report(const DiscreteOperators& ops, const Trajectory& traj);

/// CSV "t,kinetic1,kinetic2,elastic1,elastic2,interface,total".
void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& series);

} // namespace ithum
