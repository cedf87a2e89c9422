#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ithum/hum.hpp"
#include "ithum/multiplier.hpp"

namespace ithum {

/// One experiment, as read from a JSON config (schema_version 1):
///
///   { "schema_version": 1,
///     "domain":  { "dim": 1, "outer": {"lo": [0,0], "hi": [1,1]},
///                  "inner": {"lo": [0.25,0.25], "hi": [0.75,0.75]}, "resolution": 200 },
///     "material": { "A": {"family": "identity", "c": 1},
///                   "h": {"family": "constant", "value": 1} },
///     "observer": [0.5, 0.5],
///     "regions":  { "thickness1": 0.125, "thickness2": 0.125 },
///     "time":     { "T": "auto", "factor": 1.2, "dt": "cfl:0.5" },
///     "initial_data": { "family": "modes", "modes": 8, "samples": 32, "seed": 12345 },
///     "run":      { ... pipeline knobs, all optional ... },
///     "threads":  1 }
///
/// Every key except schema_version, domain.inner and observer has a default.
struct Scenario {
    int dim = 1;
    Box outer{{0.0, 0.0}, {1.0, 1.0}};
    Box inner{{0.25, 0.25}, {0.75, 0.75}};
    int resolution = 200;

    CoefficientField A = CoefficientField::identity_scaled(1.0);
    InterfaceCoefficient h = InterfaceCoefficient::constant(1.0);

    Point observer{0.5, 0.5};
    double thickness1 = 0.125;
    double thickness2 = 0.125;

    bool T_auto = true;
    double T = 0.0;            ///< used when T_auto is false
    double T_factor = 1.2;     ///< T = factor * T_min when T_auto
    bool dt_cfl = true;
    double cfl = 0.5;          ///< dt_max = cfl * stable_dt
    double dt = 0.0;           ///< used when dt_cfl is false

    /// "modes": random low-mode combinations; "sine": sin(k pi x) [sin(k pi y)]
    /// at rest; "bump": smooth compact bump at rest; "zero".
    std::string data_family = "modes";
    int data_modes = 8;
    int data_samples = 32;
    std::uint64_t seed = 12345;
    int sine_mode = 1;
    Point bump_center{0.5, 0.5};
    double bump_radius = 0.2;
    double amplitude = 1.0;

    double tol = 1e-8;
    int max_iter = 200;
    int lowpass_modes = -1;           ///< -1: 0 in 1D, 32 in 2D
    std::string method = "cr";
    std::string field = "radial";     ///< radial | tau | w | cutoff
    int levels = 3;
    std::string quantity = "energy_drift";
    double budget_seconds = 600.0;
    int stride = 1;                   ///< trajectory CSV time stride, 0 disables

    int threads = 1;

    bool operator==(const Scenario&) const = default;
};

/// Parses a config; throws Error(ConfigError) naming the offending field,
/// or the line and column of a syntax error.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);

int effective_lowpass(const Scenario& s);
VectorField::Kind field_kind(const std::string& name);

/// Everything derived from a scenario that the pipelines share.
struct Setup {
    TwoComponentDomain domain;
    MaterialData material;
    DiscreteOperators ops;
    BoundaryPartition partition;
    ControlRegions regions;
    Radii radii;
    TimeBudget budget;
    TimeGrid grid;
};

/// Builds the setup at the scenario resolution, or at `resolution` if > 0.
/// Throws InfeasibleTime when T is "auto" and T_min is infinite.
Setup prepare(const Scenario& s, int resolution = 0);

/// Initial data of the scenario family (at least one sample).
std::vector<InitialData> initial_data(const Scenario& s, const Setup& setup);

} // namespace ithum
