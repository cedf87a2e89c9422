#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ithum/scenario.hpp"

namespace ithum {

struct OracleReport {
    std::string quantity;
    std::vector<int> resolutions;   ///< r, 2r, 4r, ...
    std::vector<double> values;
    double coarse = 0.0;
    double fine = 0.0;
    double extrapolated = 0.0;      ///< Richardson value from the last three levels
    double observed_order = 0.0;    ///< log2((q1 - q2) / (q2 - q3)); NaN if not applicable
    bool applicable = false;        ///< last three differences share a sign and contract
    bool monotone = false;          ///< values strictly monotone over all levels
};

using Extractor = std::function<double(int resolution)>;

/// Evaluates `f` at base, 2 base, ... (levels >= 3; levels run concurrently)
/// and fits the observed order. A level that would start after
/// `budget_seconds` have elapsed raises BudgetExceeded.
OracleReport refine_study(const std::string& quantity, const Extractor& f, int base_resolution, int levels,
                          double budget_seconds = 600.0);

/// Named scalar of a scenario pipeline at a given resolution:
/// energy_drift, compatible_drift, multiplier_residual, e_ratio,
/// transposition_residual.
double extract_quantity(const Scenario& s, const std::string& quantity, int resolution);

/// refine_study of `quantity` starting at the scenario resolution.
OracleReport refine_study(const Scenario& s, const std::string& quantity, int levels);

/// h used for the glued (perfect-interface) limit. The jump scales like
/// flux / h, so the comparison error carries an O(1/h) term.
inline constexpr double kLargeH = 1e6;

/// Closed-form standing wave of u'' = c^2 Lap u on (0, L)^dim with
/// homogeneous Dirichlet data: prod_i sin(k pi x_i / L) cos(k pi c sqrt(dim) t / L).
double standing_wave_reference(const Point& x, double t, int mode, int dim = 1, double c = 1.0, double length = 1.0);

/// The standing wave sampled on every dof of both components.
PairField standing_wave_field(const DiscreteOperators& ops, double t, int mode, double c = 1.0);

/// CSV "level,resolution,value" plus a "# summary" line.
void write_oracle_csv(std::ostream& os, const OracleReport& report);

} // namespace ithum
