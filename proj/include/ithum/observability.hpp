#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "ithum/energy.hpp"

namespace ithum {

struct TimeBudget {
    double T0 = 0.0;
    double condition_ratio = 0.0;   ///< n R M / alpha
    double T_min = 0.0;             ///< +inf when infeasible
    bool feasible = true;
};

/// T0 = 2 max(R/sqrt(a), (n-1) sqrt(a) / (2 h0)) + 2 max(1, R, R/a, R^2/a);
/// feasible iff M = 0 or R < a / (n M); T_min = T0 / (1 - n R M / a).
TimeBudget time_budget(double alpha, double M, double R, int n, double h0);
TimeBudget time_budget(const MaterialData& material, double R, int n);

struct ObservabilitySample {
    int id = 0;
    double E0 = 0.0;
    double omega_norm = 0.0;
    double ratio = 0.0;   ///< E0 / omega_norm, 0 when both vanish
};

struct ObservabilityReport {
    double E0 = 0.0;
    double omega_norm = 0.0;
    double ratio = 0.0;
    bool short_time = false;        ///< T below T_min: ratios may blow up
    std::vector<ObservabilitySample> ensemble;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
};

/// sum_k c_k sum_{omega dofs} m (|z'|^2 + |z|^2) with trapezoid weights c_k.
double omega_norm(const DiscreteOperators& ops, const std::vector<char>& mask, const Trajectory& traj);

ObservabilityReport observability_ratio(const Trajectory& traj, const ControlRegions& regions,
                                        const DiscreteOperators& ops, double T_min = 0.0);

struct InitialData {
    PairField z0;
    PairField z1;
};

/// Random combinations of the given modes: z0 = sum a_j phi_j,
/// z1 = sum b_j sqrt(lambda_j) phi_j, a, b standard normal.
std::vector<InitialData> random_mode_ensemble(const Modes& modes, int count, std::uint64_t seed);

/// Runs every sample to the given grid and collects the ratios
/// (samples run concurrently; aggregation is in sample order).
ObservabilityReport run_ensemble(const DiscreteOperators& ops, const ControlRegions& regions, const TimeGrid& grid,
                                 const std::vector<InitialData>& samples, double T_min = 0.0);

/// (min, max) of omega_norm / E0 over the samples with E0 > 0.
std::pair<double, double> norm_equivalence(const std::vector<ObservabilitySample>& samples);

/// CSV "sample,E0,omega_norm,ratio" plus a trailing "# summary" line.
void write_observability_csv(std::ostream& os, const ObservabilityReport& report);

} // namespace ithum
