#include "ithum/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ithum/errors.hpp"

namespace ithum {

namespace {

DofMap build_dofs(const TwoComponentDomain& domain)
{
    DofMap m;
    const int nn = domain.node_count();
    m.dof1.assign(nn, -1);
    m.dof2.assign(nn, -1);
    for (int node = 0; node < nn; ++node) {
        const auto l = domain.label(node);
        if (l == NodeLabel::Omega1 || l == NodeLabel::InterfaceGamma) {
            m.dof1[node] = m.n1++;
            m.node_of.push_back(node);
        }
    }
    for (int node = 0; node < nn; ++node) {
        const auto l = domain.label(node);
        if (l == NodeLabel::Omega2 || l == NodeLabel::InterfaceGamma) {
            m.dof2[node] = m.n1 + m.n2++;
            m.node_of.push_back(node);
        }
    }
    return m;
}

// Corner-gradient element matrix: E = (|C|/4) sum_corners g_c^T A g_c with g_c
// built from the two cell edges meeting at corner c. Diagonal A gives the
// 5-point stencil.
void cell_matrix_2d(const Mat2& a, double hx, double hy, double vol, double ke[4][4])
{
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            ke[r][c] = 0.0;
    // corners 0:(0,0) 1:(1,0) 2:(0,1) 3:(1,1)
    for (int ca = 0; ca < 2; ++ca) {
        for (int cb = 0; cb < 2; ++cb) {
            double gx[4] = {0, 0, 0, 0};
            double gy[4] = {0, 0, 0, 0};
            gx[0 + 2 * cb] = -1.0 / hx;
            gx[1 + 2 * cb] = 1.0 / hx;
            gy[ca + 0] = -1.0 / hy;
            gy[ca + 2] = 1.0 / hy;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    ke[r][c] += 0.25 * vol *
                                (a[0][0] * gx[r] * gx[c] + a[0][1] * gx[r] * gy[c] + a[1][0] * gy[r] * gx[c] +
                                 a[1][1] * gy[r] * gy[c]);
        }
    }
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, const CsrMatrix& c)
{
    std::vector<Triplet> t;
    t.reserve(a.val.size() + b.val.size() + c.val.size());
    for (const CsrMatrix* m : {&a, &b, &c})
        for (int r = 0; r < m->rows; ++r)
            for (int p = m->row_ptr[r]; p < m->row_ptr[r + 1]; ++p)
                t.push_back({r, m->col[p], m->val[p]});
    return CsrMatrix::from_triplets(a.rows, a.cols, std::move(t));
}

void check_size(const DiscreteOperators& ops, const PairField& u)
{
    if (static_cast<int>(u.size()) != ops.size())
        throw Error(ErrorCode::ShapeMismatch,
                    "field has " + std::to_string(u.size()) + " entries, expected " + std::to_string(ops.size()));
}

double quad_form(const CsrMatrix& m, const PairField& u, const PairField& v)
{
    double s = 0.0;
    for (int r = 0; r < m.rows; ++r) {
        double row = 0.0;
        for (int p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p)
            row += m.val[p] * v[m.col[p]];
        s += u[r] * row;
    }
    return s;
}

Point mat_vec(const Mat2& a, const Point& x) { return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]}; }

double facet_average(const DiscreteOperators& ops, const Facet& f, const PairField& u, int comp)
{
    double s = 0.0;
    for (int k = 0; k < f.node_count; ++k)
        s += nodal_value(ops, u, comp, f.nodes[k]);
    return s / f.node_count;
}

} // namespace

DiscreteOperators assemble(const TwoComponentDomain& domain, const MaterialData& material)
{
    DiscreteOperators ops;
    ops.domain = domain;
    ops.material = material;
    ops.dofs = build_dofs(domain);
    const int n = ops.dofs.size();
    const int dim = domain.dim();

    ops.dirichlet_mask.assign(domain.node_count(), 0);
    for (int node = 0; node < domain.node_count(); ++node)
        ops.dirichlet_mask[node] = domain.label(node) == NodeLabel::ExteriorBoundary;

    std::vector<Triplet> t1, t2, tg;
    ops.mass.assign(n, 0.0);
    const double vol = domain.cell_volume();
    const double corner_mass = vol / (dim == 2 ? 4.0 : 2.0);

    for (int cell = 0; cell < domain.cell_count(); ++cell) {
        const int comp = domain.cell_component(cell);
        const auto corners = domain.cell_corners(cell);
        const int nc = domain.cell_corner_count();
        const Mat2 a = material.A.at(domain.cell_center(cell), comp);
        int dof[4] = {-1, -1, -1, -1};
        for (int k = 0; k < nc; ++k)
            dof[k] = ops.dofs.dof(comp, corners[k]);

        double ke[4][4];
        if (dim == 1) {
            const double c = a[0][0] / domain.spacing(0);
            ke[0][0] = ke[1][1] = c;
            ke[0][1] = ke[1][0] = -c;
        } else {
            cell_matrix_2d(a, domain.spacing(0), domain.spacing(1), vol, ke);
        }
        auto& t = comp == 1 ? t1 : t2;
        for (int r = 0; r < nc; ++r) {
            if (dof[r] < 0)
                continue;
            ops.mass[dof[r]] += corner_mass;
            for (int c = 0; c < nc; ++c)
                if (dof[c] >= 0 && ke[r][c] != 0.0)
                    t.push_back({dof[r], dof[c], ke[r][c]});
        }
    }

    // lumped interface coupling: w_g (u1 - u2)^2 per Gamma node
    std::vector<double> weight(domain.node_count(), 0.0);
    const auto& facets = domain.interface_facets();
    for (std::size_t f = 0; f < facets.size(); ++f) {
        const double share = material.h_facet[f] * facets[f].measure / facets[f].node_count;
        for (int k = 0; k < facets[f].node_count; ++k)
            weight[facets[f].nodes[k]] += share;
    }
    for (int node = 0; node < domain.node_count(); ++node) {
        if (domain.label(node) != NodeLabel::InterfaceGamma)
            continue;
        const GammaNode g{node, ops.dofs.dof1[node], ops.dofs.dof2[node], weight[node]};
        ops.gamma.push_back(g);
        tg.push_back({g.dof1, g.dof1, g.weight});
        tg.push_back({g.dof2, g.dof2, g.weight});
        tg.push_back({g.dof1, g.dof2, -g.weight});
        tg.push_back({g.dof2, g.dof1, -g.weight});
    }

    ops.K1 = CsrMatrix::from_triplets(n, n, std::move(t1));
    ops.K2 = CsrMatrix::from_triplets(n, n, std::move(t2));
    ops.Kgamma = CsrMatrix::from_triplets(n, n, std::move(tg));
    ops.K = add(ops.K1, ops.K2, ops.Kgamma);
    ops.inv_mass.resize(n);
    for (int d = 0; d < n; ++d)
        ops.inv_mass[d] = 1.0 / ops.mass[d];
    return ops;
}

double bilinear_form(const DiscreteOperators& ops, const PairField& u, const PairField& v)
{
    check_size(ops, u);
    check_size(ops, v);
    return quad_form(ops.K, u, v);
}

FormParts bilinear_parts(const DiscreteOperators& ops, const PairField& u, const PairField& v)
{
    check_size(ops, u);
    check_size(ops, v);
    return {quad_form(ops.K1, u, v), quad_form(ops.K2, u, v), quad_form(ops.Kgamma, u, v)};
}

double mass_product(const DiscreteOperators& ops, const PairField& u, const PairField& v)
{
    check_size(ops, u);
    check_size(ops, v);
    return kernels::serial::weighted_dot(ops.mass, u, v);
}

double nodal_value(const DiscreteOperators& ops, const PairField& u, int comp, int node)
{
    const int d = ops.dofs.dof(comp, node);
    if (d >= 0)
        return u[d];
    if (ops.dirichlet_mask[node])
        return 0.0;
    throw Error(ErrorCode::InvalidArgument, "node " + std::to_string(node) + " carries no component-" +
                                                std::to_string(comp) + " value");
}

double one_sided_derivative(const DiscreteOperators& ops, const PairField& u, int comp, int node, int axis,
                            int sign)
{
    const auto& dom = ops.domain;
    auto ij = dom.node_ij(node);
    auto at = [&](int steps) {
        auto p = ij;
        p[axis] -= sign * steps;
        return nodal_value(ops, u, comp, dom.node_index(p[0], p[1]));
    };
    return (3.0 * at(0) - 4.0 * at(1) + at(2)) / (2.0 * dom.spacing(axis));
}

std::vector<InterfaceRecord> interface_quantities(const DiscreteOperators& ops, const PairField& u)
{
    check_size(ops, u);
    const auto& dom = ops.domain;
    const auto& facets = dom.interface_facets();
    std::vector<InterfaceRecord> out;
    out.reserve(facets.size());
    for (std::size_t fi = 0; fi < facets.size(); ++fi) {
        const Facet& f = facets[fi];
        InterfaceRecord r;
        r.position = f.position;
        r.normal = f.normal;
        r.measure = f.measure;
        r.h = ops.material.h_facet[fi];
        const int axis = f.normal_axis;
        const int sign = f.normal[axis] > 0 ? 1 : -1;
        for (int k = 0; k < f.node_count; ++k) {
            const int node = f.nodes[k];
            r.normal1 += one_sided_derivative(ops, u, 1, node, axis, sign);
            r.normal2 += one_sided_derivative(ops, u, 2, node, axis, -sign);
        }
        r.normal1 /= f.node_count;
        r.normal2 /= f.node_count;
        r.jump = facet_average(ops, f, u, 1) - facet_average(ops, f, u, 2);
        if (dom.dim() == 2) {
            const int along = 1 - axis;
            const double ht = dom.spacing(along);
            r.tangential1[along] =
                (nodal_value(ops, u, 1, f.nodes[1]) - nodal_value(ops, u, 1, f.nodes[0])) / ht;
            r.tangential2[along] =
                (nodal_value(ops, u, 2, f.nodes[1]) - nodal_value(ops, u, 2, f.nodes[0])) / ht;
        }
        const Point n1 = f.normal;
        const Point n2 = {-n1[0], -n1[1]};
        const Point g1 = {r.normal1 * n1[0] + r.tangential1[0], r.normal1 * n1[1] + r.tangential1[1]};
        const Point g2 = {r.normal2 * n2[0] + r.tangential2[0], r.normal2 * n2[1] + r.tangential2[1]};
        r.conormal1 = dot(mat_vec(ops.material.A.at(f.position, 1), g1), n1);
        r.conormal2 = dot(mat_vec(ops.material.A.at(f.position, 2), g2), n2);
        r.flux1 = -r.h * r.jump;
        r.flux2 = r.h * r.jump;
        out.push_back(r);
    }
    return out;
}

std::vector<BoundaryRecord> boundary_quantities(const DiscreteOperators& ops, const PairField& u)
{
    check_size(ops, u);
    const auto& facets = ops.domain.boundary_facets();
    std::vector<BoundaryRecord> out;
    out.reserve(facets.size());
    for (const Facet& f : facets) {
        BoundaryRecord r;
        r.position = f.position;
        r.normal = f.normal;
        r.measure = f.measure;
        const int axis = f.normal_axis;
        const int sign = f.normal[axis] > 0 ? 1 : -1;
        for (int k = 0; k < f.node_count; ++k)
            r.normal1 += one_sided_derivative(ops, u, 1, f.nodes[k], axis, sign);
        r.normal1 /= f.node_count;
        // u1 = 0 on the boundary, so grad u1 = (du/dn) n there
        const Point g = {r.normal1 * f.normal[0], r.normal1 * f.normal[1]};
        r.conormal1 = dot(mat_vec(ops.material.A.at(f.position, 1), g), f.normal);
        out.push_back(r);
    }
    return out;
}

double stable_dt(const DiscreteOperators& ops)
{
    double lam = 0.0;
    for (int r = 0; r < ops.K.rows; ++r) {
        double s = 0.0;
        for (int p = ops.K.row_ptr[r]; p < ops.K.row_ptr[r + 1]; ++p)
            s += std::abs(ops.K.val[p]);
        lam = std::max(lam, s * ops.inv_mass[r]);
    }
    return 2.0 / std::sqrt(lam);
}

Modes lowest_modes(const DiscreteOperators& ops, int count)
{
    const int n = ops.size();
    if (count <= 0)
        return {};
    count = std::min(count, n);

    // symmetric form B = M^-1/2 K M^-1/2
    Eigen::VectorXd scale(n);
    for (int i = 0; i < n; ++i)
        scale[i] = 1.0 / std::sqrt(ops.mass[i]);

    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;

    if (n <= 1200) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
        for (int r = 0; r < n; ++r)
            for (int p = ops.K.row_ptr[r]; p < ops.K.row_ptr[r + 1]; ++p)
                B(r, ops.K.col[p]) = ops.K.val[p] * scale[r] * scale[ops.K.col[p]];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        vals = es.eigenvalues().head(count);
        vecs = es.eigenvectors().leftCols(count);
    } else {
        // shift-invert subspace iteration with Rayleigh-Ritz
        std::vector<Eigen::Triplet<double>> trip;
        for (int r = 0; r < n; ++r)
            for (int p = ops.K.row_ptr[r]; p < ops.K.row_ptr[r + 1]; ++p)
                trip.emplace_back(r, ops.K.col[p], ops.K.val[p] * scale[r] * scale[ops.K.col[p]]);
        Eigen::SparseMatrix<double> B(n, n);
        B.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(B);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorCode::NotConverged, "factorization of the stiffness matrix failed");

        const int p = std::min(n, count + std::max(8, count / 2));
        std::mt19937_64 rng(0x5eed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Eigen::MatrixXd X(n, p);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < n; ++i)
                X(i, j) = uni(rng);
        Eigen::VectorXd prev = Eigen::VectorXd::Constant(count, 0.0);
        for (int it = 0; it < 500; ++it) {
            Eigen::MatrixXd Y = solver.solve(X);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
            Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
            Eigen::MatrixXd H = Q.transpose() * (B * Q);
            H = 0.5 * (H + H.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
            X = Q * es.eigenvectors();
            vals = es.eigenvalues().head(count);
            const double change = ((vals - prev).cwiseAbs().array() / vals.cwiseAbs().array()).maxCoeff();
            prev = vals;
            if (it > 2 && change < 1e-13)
                break;
        }
        vecs = X.leftCols(count);
    }

    Modes m;
    for (int j = 0; j < count; ++j) {
        PairField v(n);
        double pivot = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = vecs(i, j) * scale[i];
            if (pivot == 0.0 && std::abs(vecs(i, j)) > 1e-6)
                pivot = v[i];
        }
        const double norm = std::sqrt(mass_product(ops, v, v));
        const double s = (pivot < 0 ? -1.0 : 1.0) / norm;
        for (double& x : v)
            x *= s;
        m.eigenvalues.push_back(vals[j]);
        m.vectors.push_back(std::move(v));
    }
    return m;
}

void write_triplets(std::ostream& os, const CsrMatrix& m)
{
    char buf[96];
    for (int r = 0; r < m.rows; ++r)
        for (int p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, m.col[p], m.val[p]);
            os << buf;
        }
}

struct StiffnessSolver::Impl {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

StiffnessSolver::StiffnessSolver(const DiscreteOperators& ops) : impl_(std::make_unique<Impl>())
{
    const int n = ops.size();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(ops.K.nonzeros());
    for (int r = 0; r < n; ++r)
        for (int p = ops.K.row_ptr[r]; p < ops.K.row_ptr[r + 1]; ++p)
            trip.emplace_back(r, ops.K.col[p], ops.K.val[p]);
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trip.begin(), trip.end());
    impl_->ldlt.compute(K);
    if (impl_->ldlt.info() != Eigen::Success)
        throw Error(ErrorCode::NotConverged, "factorization of the stiffness matrix failed");
}

StiffnessSolver::~StiffnessSolver() = default;
StiffnessSolver::StiffnessSolver(StiffnessSolver&&) noexcept = default;
StiffnessSolver& StiffnessSolver::operator=(StiffnessSolver&&) noexcept = default;

PairField StiffnessSolver::solve(const PairField& rhs) const
{
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXd x = impl_->ldlt.solve(b);
    return PairField(x.data(), x.data() + x.size());
}

} // namespace ithum
