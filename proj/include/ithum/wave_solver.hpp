#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ithum/discretization.hpp"

namespace ithum {

/// Uniform time grid t_k = k dt, k = 0..steps, dt = T / steps.
struct TimeGrid {
    double T = 0.0;
    double dt = 0.0;
    int steps = 0;

    double time(int k) const { return k * dt; }
    int points() const { return steps + 1; }
    /// Trapezoid weights dt * (1/2, 1, ..., 1, 1/2).
    std::vector<double> trapezoid() const;
};

/// Smallest number of steps (at least 4) with dt <= dt_max.
TimeGrid make_time_grid(double T, double dt_max);

/// Leapfrog trajectory. Two ghost states on each side continue the scheme past
/// 0 and T (using the endpoint source), so every velocity is the same
/// fourth-order centered difference
///   v_k = (u_{k-2} - 8 u_{k-1} + 8 u_{k+1} - u_{k+2}) / (12 dt).
struct Trajectory {
    TimeGrid grid;
    std::vector<PairField> states;        ///< k = 0..steps
    std::vector<PairField> velocities;
    std::array<PairField, 2> before;      ///< u_{-1}, u_{-2}
    std::array<PairField, 2> after;       ///< u_{N+1}, u_{N+2}
    std::string scheme = "leapfrog";
    bool forced = false;                  ///< solved with a nonzero source

    /// u_k for k in [-2, N+2].
    const PairField& state(int k) const;
    /// Second-order centered difference (u_{k+1} - u_{k-1}) / 2dt.
    PairField centered_velocity(int k) const;
};

/// Right-hand side of M u'' + K u = M f, sampled on the time grid (f in
/// acceleration units). Empty means homogeneous.
using Source = std::vector<PairField>;

/// Time-indexed forcing supported on the control regions. One PairField per
/// time point carries both zeta_1 (component-1 dofs) and zeta_2.
struct ControlVector {
    TimeGrid grid;
    std::vector<PairField> values;
};

/// Per-dof mask of omega1 (component-1 dofs) and omega2 (component-2 dofs).
std::vector<char> control_dof_mask(const DiscreteOperators& ops, const ControlRegions& regions);

/// Throws CflViolation when dt > 0.9 * stable_dt(ops).
void check_cfl(const DiscreteOperators& ops, const TimeGrid& grid);

Trajectory solve_forward(const DiscreteOperators& ops, const PairField& u0, const PairField& v0, const Source& f,
                         const TimeGrid& grid);

Trajectory solve_homogeneous(const DiscreteOperators& ops, const PairField& z0, const PairField& z1,
                             const TimeGrid& grid);

/// psi with psi(T) = psi'(T) = 0 and M psi'' + K psi = M g, via the forward
/// solve of the time-reflected problem.
Trajectory solve_backward(const DiscreteOperators& ops, const Source& g, const TimeGrid& grid);

Trajectory solve_controlled(const DiscreteOperators& ops, const PairField& U0, const PairField& U1,
                            const ControlVector& control, const TimeGrid& grid);

struct TranspositionTerms {
    double lhs = 0.0;        ///< sum_k c_k <u_k, M g_k>
    double initial_velocity = 0.0;   ///< -(U0, M psi'(0))
    double initial_state = 0.0;      ///< (U1, M psi(0))
    double control = 0.0;            ///< sum_k c_k <M zeta_k, psi_k>
    double residual = 0.0;
};

/// Residual of the transposition identity for the given u and test source g,
/// normalized by the largest term.
TranspositionTerms transposition_residual(const DiscreteOperators& ops, const Trajectory& u, const PairField& U0,
                                          const PairField& U1, const ControlVector& control, const Source& g);

/// Space-time product sum_k c_k <a_k, M b_k>.
double spacetime_product(const DiscreteOperators& ops, const TimeGrid& grid, const std::vector<PairField>& a,
                         const std::vector<PairField>& b);

/// CSV "t,node,comp,value" for every state (every `stride`-th time point).
void write_trajectory_csv(std::ostream& os, const DiscreteOperators& ops, const Trajectory& traj, int stride = 1);

/// Binary dump: "HUMW", u32 version = 1, u32 dim, u32 resolution, u32 dofs,
/// u32 time points, f64 dt, then the dof -> node table (u32 node, u32 comp)
/// and states time-major; all little-endian.
void write_trajectory_binary(std::ostream& os, const DiscreteOperators& ops, const Trajectory& traj);

} // namespace ithum
