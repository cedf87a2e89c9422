#include "ithum/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <utility>

#include "ithum/errors.hpp"

namespace ithum {

double smoothstep5(double s)
{
    if (s <= 0.0)
        return 0.0;
    if (s >= 1.0)
        return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

namespace {

double smoothstep5_prime(double s)
{
    if (s <= 0.0 || s >= 1.0)
        return 0.0;
    return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

// ramp 1 -> 0 over s in [0,1]
double ramp(double s) { return 1.0 - smoothstep5(s); }
double ramp_prime(double s) { return -smoothstep5_prime(s); }

// Distance to the boundary of an axis-aligned box and its gradient.
std::pair<double, Point> box_distance(const Box& b, const Point& x, int dim)
{
    bool inside = true;
    for (int k = 0; k < dim; ++k)
        inside = inside && x[k] >= b.lo[k] && x[k] <= b.hi[k];
    Point grad{0.0, 0.0};
    if (inside) {
        double d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < dim; ++k) {
            if (x[k] - b.lo[k] < d) {
                d = x[k] - b.lo[k];
                grad = {0.0, 0.0};
                grad[k] = 1.0;
            }
            if (b.hi[k] - x[k] < d) {
                d = b.hi[k] - x[k];
                grad = {0.0, 0.0};
                grad[k] = -1.0;
            }
        }
        return {d, grad};
    }
    Point diff{0.0, 0.0};
    for (int k = 0; k < dim; ++k)
        diff[k] = x[k] - std::clamp(x[k], b.lo[k], b.hi[k]);
    const double d = std::hypot(diff[0], diff[1]);
    return {d, {diff[0] / d, diff[1] / d}};
}

struct Face {
    int axis;
    int sign;
};

std::vector<Face> active_faces(const TwoComponentDomain& domain, const BoundaryPartition& partition)
{
    std::set<std::pair<int, int>> active, inactive;
    const auto& facets = domain.boundary_facets();
    auto key = [&](int f) {
        const int axis = facets[f].normal_axis;
        return std::make_pair(axis, facets[f].normal[axis] > 0 ? 1 : -1);
    };
    for (int f : partition.active)
        active.insert(key(f));
    for (int f : partition.inactive)
        inactive.insert(key(f));
    std::vector<Face> out;
    for (const auto& [axis, sign] : active) {
        if (inactive.count({axis, sign}))
            throw Error(ErrorCode::InvalidArgument,
                        "boundary face is only partly observed; the tau field needs whole faces");
        out.push_back({axis, sign});
    }
    return out;
}

void require_resolved(const TwoComponentDomain& domain, double delta, const char* what)
{
    if (delta < 2.0 * domain.cell_size())
        throw Error(ErrorCode::RegionTooThin,
                    std::string(what) + " ramp width " + std::to_string(delta) + " is below two cells");
}

Point mat_vec(const Mat2& a, const Point& x) { return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]}; }

double quad(const Mat2& a, const Point& x, const Point& y) { return dot(mat_vec(a, x), y); }

} // namespace

double VectorField::eta(double t) const
{
    if (kind != Kind::CutoffP)
        return 1.0;
    if (t <= 0.0 || t >= T)
        return 0.0;
    return smoothstep5(std::min(t, T - t) / eps);
}

VectorField build_field(VectorField::Kind kind, const TwoComponentDomain& domain, const BoundaryPartition& partition,
                        const ControlRegions& regions, const Point& x0, const FieldParams& params)
{
    const int dim = domain.dim();
    const int nn = domain.node_count();
    VectorField q;
    q.kind = kind;
    q.values.assign(nn, {0.0, 0.0});
    q.divergence.assign(nn, 0.0);
    q.jacobian.assign(nn, Mat2{});

    switch (kind) {
    case VectorField::Kind::RadialM:
        for (int node = 0; node < nn; ++node) {
            const Point x = domain.position(node);
            q.values[node] = {x[0] - x0[0], dim == 2 ? x[1] - x0[1] : 0.0};
            q.divergence[node] = dim;
            for (int a = 0; a < dim; ++a)
                q.jacobian[node][a][a] = 1.0;
        }
        break;

    case VectorField::Kind::BoundaryTau: {
        const double delta = params.delta1 > 0.0 ? params.delta1 : regions.thickness1;
        require_resolved(domain, delta, "tau");
        const auto faces = active_faces(domain, partition);
        for (int node = 0; node < nn; ++node) {
            const Point x = domain.position(node);
            for (const Face& f : faces) {
                const double plane = f.sign > 0 ? domain.outer().hi[f.axis] : domain.outer().lo[f.axis];
                const double s = std::abs(x[f.axis] - plane) / delta;
                if (s >= 1.0)
                    continue;
                // tau += n phi(d/delta), grad d = -n
                const double phi = ramp(s);
                const double dphi = ramp_prime(s) / delta;
                q.values[node][f.axis] += f.sign * phi;
                q.jacobian[node][f.axis][f.axis] += -dphi;
                q.divergence[node] += -dphi;
            }
            const bool nonzero = q.values[node][0] != 0.0 || q.values[node][1] != 0.0;
            const auto label = domain.label(node);
            if (nonzero && label != NodeLabel::ExteriorBoundary && !(label == NodeLabel::Omega1 && regions.omega1[node]))
                throw Error(ErrorCode::RegionTooThin, "tau does not fit inside omega1");
        }
        break;
    }

    case VectorField::Kind::InterfaceMW: {
        const double delta = params.delta2 > 0.0 ? params.delta2 : regions.thickness2;
        require_resolved(domain, delta, "w");
        for (int node = 0; node < nn; ++node) {
            const Point x = domain.position(node);
            const Point m{x[0] - x0[0], dim == 2 ? x[1] - x0[1] : 0.0};
            const auto [d, gd] = box_distance(domain.inner(), x, dim);
            const double s = d / delta;
            const double w = ramp(s);
            const double dw = ramp_prime(s) / delta;
            const Point gw{dw * gd[0], dw * gd[1]};
            q.values[node] = {m[0] * w, m[1] * w};
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    q.jacobian[node][a][b] = (a == b ? w : 0.0) + m[a] * gw[b];
            q.divergence[node] = dim * w + dot(m, gw);
            if (w > 0.0 && domain.label(node) == NodeLabel::Omega2 && !regions.omega2[node])
                throw Error(ErrorCode::RegionTooThin, "w does not fit inside omega2");
        }
        break;
    }

    case VectorField::Kind::CutoffP: {
        if (!(params.T > 0.0))
            throw Error(ErrorCode::InvalidArgument, "CutoffP needs T > 0");
        q.T = params.T;
        q.eps = std::max(2.0 * params.dt, params.T / 20.0);
        const double half1 = 0.5 * regions.thickness1;
        const double half2 = 0.5 * regions.thickness2;
        require_resolved(domain, half1, "rho (omega1)");
        require_resolved(domain, half2, "rho (omega2)");
        // rho = 1 on the half-thickness cores, 0 outside omega1 u omega2;
        // piecewise across Gamma, so each node is differentiated on its own side
        auto rho = [&](const Point& x, bool inner) {
            if (inner)
                return ramp((distance_to_interface(domain, x) - half2) / half2);
            return ramp((distance_to_active_boundary(domain, partition, x) - half1) / half1);
        };
        const double eps = 1e-7 * domain.cell_size();
        for (int node = 0; node < nn; ++node) {
            const Point x = domain.position(node);
            const bool inner = domain.in_closed_inner(x);
            q.values[node][0] = rho(x, inner);
            for (int k = 0; k < dim; ++k) {
                Point xp = x, xm = x;
                xp[k] += eps;
                xm[k] -= eps;
                q.jacobian[node][0][k] = (rho(xp, inner) - rho(xm, inner)) / (2.0 * eps);
            }
        }
        break;
    }
    }
    return q;
}

namespace {

struct SliceTerms {
    double sigma_normal = 0.0;
    double gamma_normal = 0.0;
    double gamma_jump_tangential = 0.0;
    double gamma_velocity_tangential = 0.0;
    double divergence = 0.0;
    double gradient_q = 0.0;
    double coefficient_derivative = 0.0;
    double endpoint = 0.0;   ///< (z', q.grad z) at this instant
};

Point facet_q(const VectorField& q, const Facet& f)
{
    Point s{0.0, 0.0};
    for (int k = 0; k < f.node_count; ++k) {
        s[0] += q.values[f.nodes[k]][0];
        s[1] += q.values[f.nodes[k]][1];
    }
    return {s[0] / f.node_count, s[1] / f.node_count};
}

double facet_value(const DiscreteOperators& ops, const PairField& u, int comp, const Facet& f)
{
    double s = 0.0;
    for (int k = 0; k < f.node_count; ++k)
        s += nodal_value(ops, u, comp, f.nodes[k]);
    return s / f.node_count;
}

SliceTerms evaluate_slice(const DiscreteOperators& ops, const VectorField& q, const PairField& z, const PairField& v)
{
    const auto& dom = ops.domain;
    const auto& A = ops.material.A;
    const int dim = dom.dim();
    SliceTerms s;

    // volume groups, corner-gradient quadrature (same rule as the stiffness)
    const int nc = dom.cell_corner_count();
    const double wq = dom.cell_volume() / nc;
    const bool varying = A.family == CoefficientField::Family::Affine;
    for (int cell = 0; cell < dom.cell_count(); ++cell) {
        const int comp = dom.cell_component(cell);
        const auto corners = dom.cell_corners(cell);
        const Mat2 a = A.at(dom.cell_center(cell), comp);
        double zc[4], vc[4];
        for (int c = 0; c < nc; ++c) {
            zc[c] = nodal_value(ops, z, comp, corners[c]);
            vc[c] = nodal_value(ops, v, comp, corners[c]);
        }
        for (int c = 0; c < nc; ++c) {
            Point g{0.0, 0.0};
            if (dim == 1) {
                g[0] = (zc[1] - zc[0]) / dom.spacing(0);
            } else {
                const int ca = c & 1;
                const int cb = c >> 1;
                g[0] = (zc[1 + 2 * cb] - zc[0 + 2 * cb]) / dom.spacing(0);
                g[1] = (zc[ca + 2] - zc[ca]) / dom.spacing(1);
            }
            const int node = corners[c];
            const Point& qc = q.values[node];
            const Mat2& J = q.jacobian[node];
            const Point ag = mat_vec(a, g);
            s.endpoint += wq * vc[c] * dot(qc, g);
            s.divergence += wq * 0.5 * (vc[c] * vc[c] - dot(ag, g)) * q.divergence[node];
            s.gradient_q += wq * dot(g, mat_vec(J, ag));
            if (varying) {
                double acc = 0.0;
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l)
                        for (int j = 0; j < dim; ++j)
                            acc += qc[k] * A.derivative(l, j, k) * g[l] * g[j];
                s.coefficient_derivative += -0.5 * wq * acc;
            }
        }
    }

    // exterior boundary
    const auto bq = boundary_quantities(ops, z);
    const auto& bf = dom.boundary_facets();
    for (std::size_t f = 0; f < bf.size(); ++f) {
        const Point n = bf[f].normal;
        const double ann = quad(A.at(bf[f].position, 1), n, n);
        s.sigma_normal += 0.5 * ann * bq[f].normal1 * bq[f].normal1 * dot(facet_q(q, bf[f]), n) * bf[f].measure;
    }

    // interface
    const auto iq = interface_quantities(ops, z);
    const auto& gf = dom.interface_facets();
    for (std::size_t f = 0; f < gf.size(); ++f) {
        const auto& r = iq[f];
        const Point qf = facet_q(q, gf[f]);
        const Point n1 = r.normal;
        const Point n2{-n1[0], -n1[1]};
        const Mat2 a1 = A.at(r.position, 1);
        const Mat2 a2 = A.at(r.position, 2);
        const double qn1 = dot(qf, n1);
        const double qn2 = dot(qf, n2);
        s.gamma_normal += 0.5 * r.measure *
                          (quad(a1, n1, n1) * r.normal1 * r.normal1 * qn1 + quad(a2, n2, n2) * r.normal2 * r.normal2 * qn2);
        const Point tj{r.tangential1[0] - r.tangential2[0], r.tangential1[1] - r.tangential2[1]};
        s.gamma_jump_tangential += -r.measure * r.h * r.jump * dot(qf, tj);
        const double v1 = facet_value(ops, v, 1, gf[f]);
        const double v2 = facet_value(ops, v, 2, gf[f]);
        s.gamma_velocity_tangential +=
            0.5 * r.measure *
            ((v1 * v1 - quad(a1, r.tangential1, r.tangential1)) * qn1 +
             (v2 * v2 - quad(a2, r.tangential2, r.tangential2)) * qn2);
    }
    return s;
}

} // namespace

MultiplierTerms multiplier_identity(const Trajectory& traj, const VectorField& q, const DiscreteOperators& ops)
{
    if (static_cast<int>(q.values.size()) != ops.domain.node_count())
        throw Error(ErrorCode::ShapeMismatch, "vector field does not match the grid");
    if (static_cast<int>(traj.states.size()) != traj.grid.points() ||
        static_cast<int>(traj.velocities.size()) != traj.grid.points())
        throw Error(ErrorCode::ShapeMismatch, "trajectory is incomplete");
    for (const auto& u : traj.states)
        if (static_cast<int>(u.size()) != ops.size())
            throw Error(ErrorCode::ShapeMismatch, "trajectory does not match the operators");

    const int np = traj.grid.points();
    std::vector<SliceTerms> slices(np);
    #pragma omp parallel for schedule(static)
    for (int k = 0; k < np; ++k)
        slices[k] = evaluate_slice(ops, q, traj.states[k], traj.velocities[k]);

    const auto c = traj.grid.trapezoid();
    MultiplierTerms t;
    for (int k = 0; k < np; ++k) {
        const SliceTerms& s = slices[k];
        t.sigma_normal += c[k] * s.sigma_normal;
        t.gamma_normal += c[k] * s.gamma_normal;
        t.gamma_jump_tangential += c[k] * s.gamma_jump_tangential;
        t.gamma_velocity_tangential += c[k] * s.gamma_velocity_tangential;
        t.divergence += c[k] * s.divergence;
        t.gradient_q += c[k] * s.gradient_q;
        t.coefficient_derivative += c[k] * s.coefficient_derivative;
    }
    t.endpoint = slices.back().endpoint - slices.front().endpoint;
    t.lhs = t.sigma_normal + t.gamma_terms();
    t.rhs = t.endpoint + t.divergence + t.gradient_q + t.coefficient_derivative;
    const double scale = std::abs(t.lhs) + std::abs(t.rhs);
    t.residual = scale > 1e-300 ? std::abs(t.lhs - t.rhs) / scale : 0.0;
    return t;
}

SValues compute_S(const Trajectory& traj, const Point& x0, const DiscreteOperators& ops)
{
    const BoundaryPartition partition = partition_boundary(ops.domain, x0);
    const VectorField m = build_field(VectorField::Kind::RadialM, ops.domain, partition, {}, x0);
    const MultiplierTerms t = multiplier_identity(traj, m, ops);
    return {t.lhs, t.gamma_terms()};
}

void write_multiplier_csv(std::ostream& os, const MultiplierTerms& t)
{
    const std::pair<const char*, double> rows[] = {
        {"sigma_normal", t.sigma_normal},
        {"gamma_normal", t.gamma_normal},
        {"gamma_jump_tangential", t.gamma_jump_tangential},
        {"gamma_velocity_tangential", t.gamma_velocity_tangential},
        {"endpoint", t.endpoint},
        {"divergence", t.divergence},
        {"gradient_q", t.gradient_q},
        {"coefficient_derivative", t.coefficient_derivative},
        {"lhs", t.lhs},
        {"rhs", t.rhs},
        {"residual", t.residual},
    };
    os << "term,value\n";
    char buf[96];
    for (const auto& [name, value] : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g\n", name, value);
        os << buf;
    }
}

} // namespace ithum
