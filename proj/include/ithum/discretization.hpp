#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "ithum/geometry.hpp"
#include "ithum/kernels.hpp"
#include "ithum/material.hpp"

namespace ithum {

/// A two-component nodal field, stored as one flat vector: component 1
/// (Omega1 and Gamma nodes) occupies [0, n1), component 2 (Omega2 and Gamma
/// nodes) occupies [n1, n1 + n2). Gamma nodes appear once per side; exterior
/// boundary nodes are eliminated (u1 = 0 there).
using PairField = std::vector<double>;

struct DofMap {
    int n1 = 0;
    int n2 = 0;
    std::vector<int> node_of;      ///< dof -> node
    std::vector<int> dof1;         ///< node -> comp-1 dof or -1
    std::vector<int> dof2;         ///< node -> comp-2 dof or -1

    int size() const { return n1 + n2; }
    int dof(int comp, int node) const { return comp == 1 ? dof1[node] : dof2[node]; }
    int component_of(int dof) const { return dof < n1 ? 1 : 2; }
};

/// One Gamma node with both of its dofs and its lumped interface weight
/// sum over adjacent facets of h * |facet| / 2 (h in 1D).
struct GammaNode {
    int node;
    int dof1;
    int dof2;
    double weight;
};

struct DiscreteOperators {
    TwoComponentDomain domain;
    MaterialData material;
    DofMap dofs;
    CsrMatrix K1;          ///< elastic part on Omega1
    CsrMatrix K2;          ///< elastic part on Omega2
    CsrMatrix Kgamma;      ///< interface coupling
    CsrMatrix K;           ///< K1 + K2 + Kgamma
    std::vector<double> mass;
    std::vector<double> inv_mass;
    std::vector<GammaNode> gamma;
    std::vector<char> dirichlet_mask;   ///< per node: eliminated exterior boundary node

    int size() const { return dofs.size(); }
    PairField zeros() const { return PairField(static_cast<std::size_t>(size()), 0.0); }
};

DiscreteOperators assemble(const TwoComponentDomain& domain, const MaterialData& material);

/// <K u, v>.
double bilinear_form(const DiscreteOperators& ops, const PairField& u, const PairField& v);

struct FormParts {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double gamma = 0.0;
    double total() const { return omega1 + omega2 + gamma; }
};

/// <K1 u,v>, <K2 u,v>, <Kgamma u,v> separately.
FormParts bilinear_parts(const DiscreteOperators& ops, const PairField& u, const PairField& v);

/// <M u, v>.
double mass_product(const DiscreteOperators& ops, const PairField& u, const PairField& v);

/// Nodal value of one component; exterior boundary nodes read as zero.
double nodal_value(const DiscreteOperators& ops, const PairField& u, int comp, int node);

/// d u_comp / d(dir) at a node, dir = sign * e_axis, by the second-order
/// one-sided difference (3u_b - 4u_{b-1} + u_{b-2}) / 2h that looks back
/// against dir (i.e. into the component when dir is its outward normal).
double one_sided_derivative(const DiscreteOperators& ops, const PairField& u, int comp, int node, int axis,
                            int sign);

struct InterfaceRecord {
    Point position{};
    Point normal{};                 ///< n1
    double measure = 0.0;
    double h = 0.0;
    double jump = 0.0;              ///< u1 - u2 at the facet midpoint
    double normal1 = 0.0;           ///< d u1 / d n1, one-sided from Omega1
    double normal2 = 0.0;           ///< d u2 / d n2, one-sided from Omega2
    double conormal1 = 0.0;         ///< A grad u1 . n1
    double conormal2 = 0.0;         ///< A grad u2 . n2
    Point tangential1{};            ///< grad_sigma u1 (zero in 1D)
    Point tangential2{};
    double flux1 = 0.0;             ///< shared discrete flux seen from side 1: -h jump
    double flux2 = 0.0;             ///< seen from side 2: +h jump
};

std::vector<InterfaceRecord> interface_quantities(const DiscreteOperators& ops, const PairField& u);

struct BoundaryRecord {
    Point position{};
    Point normal{};
    double measure = 0.0;
    double normal1 = 0.0;           ///< d u1 / d n, one-sided
    double conormal1 = 0.0;
};

std::vector<BoundaryRecord> boundary_quantities(const DiscreteOperators& ops, const PairField& u);

/// Largest dt for which leapfrog is stable, from the Gershgorin bound on
/// M^-1 K: 2 / sqrt(max_i sum_j |K_ij| / m_i).
double stable_dt(const DiscreteOperators& ops);

struct Modes {
    std::vector<double> eigenvalues;       ///< ascending
    std::vector<PairField> vectors;        ///< M-orthonormal
};

/// Lowest generalized eigenpairs of K phi = lambda M phi.
Modes lowest_modes(const DiscreteOperators& ops, int count);

/// Sparse Cholesky factorization of K, for the Riesz map K^{-1} M.
class StiffnessSolver {
public:
    explicit StiffnessSolver(const DiscreteOperators& ops);
    ~StiffnessSolver();
    StiffnessSolver(StiffnessSolver&&) noexcept;
    StiffnessSolver& operator=(StiffnessSolver&&) noexcept;

    /// x with K x = rhs.
    PairField solve(const PairField& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Samples a function on every dof: f(x, comp).
template <class F>
PairField sample(const DiscreteOperators& ops, F&& f)
{
    PairField u = ops.zeros();
    for (int d = 0; d < ops.size(); ++d)
        u[d] = f(ops.domain.position(ops.dofs.node_of[d]), ops.dofs.component_of(d));
    return u;
}

/// Sparse triplets "row col value" with %.17g values, one per line.
void write_triplets(std::ostream& os, const CsrMatrix& m);

} // namespace ithum
