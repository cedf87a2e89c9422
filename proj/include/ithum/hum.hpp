#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ithum/observability.hpp"

namespace ithum {

/// Time derivative used by the control map: centered in the interior,
/// (-3z0 + 4z1 - z2)/2dt and its mirror at the ends.
std::vector<PairField> time_derivative(const std::vector<PairField>& z, double dt);

/// Q(a) = sum_k c_k [ (Dz)_k^T M_w (Dz)_k + z_k^T M_w z_k ] for the
/// homogeneous trajectory z, M_w the mass restricted to the control dofs.
double control_region_norm(const DiscreteOperators& ops, const std::vector<char>& mask, const Trajectory& z);

/// The control zeta = (-z'' + z) chi_w in acceleration form: the unique
/// space-time field with sum_k c_k <M zeta_k, y_k> = Q(z, y) for every
/// sequence y (the -z'' part is D^T applied to c M_w Dz).
ControlVector control_from_trajectory(const DiscreteOperators& ops, const std::vector<char>& mask,
                                      const Trajectory& z);

struct DataPair {
    PairField first;    ///< z0, or theta'(0)
    PairField second;   ///< z1, or -theta(0)
};

/// Lambda(z0, z1) = (theta'(0), -theta(0)), theta the backward solution driven
/// by the control of z = solve_homogeneous(z0, z1).
DataPair apply_lambda(const DiscreteOperators& ops, const std::vector<char>& mask, const DataPair& a,
                      const TimeGrid& grid);

/// Pairing under which Lambda is symmetric and nonnegative:
/// <(p, q), (x, y)> = -(p^T M x + q^T M y), so <Lambda a, a> = Q(a).
double hum_pairing(const DiscreteOperators& ops, const DataPair& lambda_a, const DataPair& b);

struct HumOptions {
    double tol = 1e-8;
    int max_iter = 200;
    int lowpass_modes = 0;          ///< 0 disables the low-pass projection
    std::string method = "cr";      ///< "cr" (conjugate residual) or "cg"
    bool riesz = true;              ///< precondition the first block by K^{-1} M
};

struct CgRecord {
    int iteration = 0;
    double residual = 0.0;          ///< relative, in the preconditioned (dual) norm
    double quadratic_form = 0.0;    ///< <Lambda a_k, a_k> from the recurrence
};

struct HumResult {
    DataPair z_init;
    ControlVector control;
    Trajectory controlled;
    std::vector<CgRecord> cg_history;
    double initial_energy = 0.0;
    double final_state_energy = 0.0;
    bool converged = false;
    int iterations = 0;
    double T = 0.0;
    double T_min = 0.0;
    bool short_time = false;
};

/// Solves Lambda a = (U1, -U0), i.e. (-Lambda) a = (-U1, U0) with -Lambda
/// symmetric positive semidefinite in the mass product, then runs the
/// controlled problem. Never throws NotConverged; check `converged`.
HumResult solve_hum(const DiscreteOperators& ops, const ControlRegions& regions, const PairField& U0,
                    const PairField& U1, const TimeGrid& grid, const HumOptions& options = {}, double T_min = 0.0);

struct NullCheck {
    double e_ratio = 0.0;
    double u_T_norm = 0.0;   ///< sqrt(u^T M u) at T
    double v_T_norm = 0.0;   ///< centered velocity at T, same norm
};

NullCheck verify_null(const HumResult& result, const DiscreteOperators& ops);

/// Nonzero control entries as CSV "t,node,comp,value".
void write_control_csv(std::ostream& os, const DiscreteOperators& ops, const ControlVector& control);
void write_cg_history_csv(std::ostream& os, const std::vector<CgRecord>& history);
/// JSON object with keys converged, iterations, e_ratio, u_T_norm, v_T_norm, T, T_min.
void write_hum_summary(std::ostream& os, const HumResult& result, const NullCheck& check);

} // namespace ithum
