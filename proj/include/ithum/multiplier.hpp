#pragma once

#include <iosfwd>
#include <vector>

#include "ithum/wave_solver.hpp"

namespace ithum {

/// Nodal vector field with exact divergence and Jacobian
/// (jacobian[node][a][b] = d q_a / d x_b). CutoffP is the scalar
/// p(x,t) = eta(t) rho(x): rho sits in values[node][0] and grad rho in
/// jacobian[node][0].
struct VectorField {
    enum class Kind { RadialM, BoundaryTau, InterfaceMW, CutoffP };

    Kind kind = Kind::RadialM;
    std::vector<Point> values;
    std::vector<double> divergence;
    std::vector<Mat2> jacobian;
    double eps = 0.0;   ///< CutoffP time ramp length
    double T = 0.0;

    /// CutoffP time profile: 0 at 0 and T, 1 on [eps, T - eps].
    double eta(double t) const;
};

struct FieldParams {
    double delta1 = 0.0;   ///< tau ramp width; 0 means the omega1 thickness
    double delta2 = 0.0;   ///< w ramp width; 0 means the omega2 thickness
    double T = 0.0;        ///< CutoffP only
    double dt = 0.0;       ///< CutoffP only
};

/// Quintic smoothstep 6s^5 - 15s^4 + 10s^3 on [0,1], clamped outside.
double smoothstep5(double s);

VectorField build_field(VectorField::Kind kind, const TwoComponentDomain& domain, const BoundaryPartition& partition,
                        const ControlRegions& regions, const Point& x0, const FieldParams& params = {});

/// Both sides of the multiplier identity, term by term. Left side: surface
/// groups on Sigma and Gamma; right side: endpoint and volume groups.
struct MultiplierTerms {
    double sigma_normal = 0.0;               ///< 1/2 int_Sigma A n n (dz1/dn)^2 q.n
    double gamma_normal = 0.0;               ///< 1/2 sum_i int_Gamma A n_i n_i (dz_i/dn_i)^2 q.n_i
    double gamma_jump_tangential = 0.0;      ///< -int_Gamma h (z1-z2) q.grad_sigma(z1-z2)
    double gamma_velocity_tangential = 0.0;  ///< 1/2 sum_i int_Gamma (|z_i'|^2 - A grad_sigma grad_sigma) q.n_i
    double endpoint = 0.0;                   ///< sum_i (z_i', q.grad z_i) |_0^T
    double divergence = 0.0;                 ///< 1/2 int (|z'|^2 - A grad z grad z) div q
    double gradient_q = 0.0;                 ///< int A grad z . grad q_k dz/dx_k
    double coefficient_derivative = 0.0;     ///< -1/2 int q_k da_lj/dx_k dz/dx_l dz/dx_j
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;

    double gamma_terms() const { return gamma_normal + gamma_jump_tangential + gamma_velocity_tangential; }
};

MultiplierTerms multiplier_identity(const Trajectory& traj, const VectorField& q, const DiscreteOperators& ops);

struct SValues {
    double S = 0.0;
    double S_gamma = 0.0;
};

/// S and S_Gamma_T with q = m = x - x0.
SValues compute_S(const Trajectory& traj, const Point& x0, const DiscreteOperators& ops);

/// CSV "term,value", one row per named term followed by lhs, rhs, residual.
void write_multiplier_csv(std::ostream& os, const MultiplierTerms& t);

} // namespace ithum
