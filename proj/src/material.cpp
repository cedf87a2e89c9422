#include "ithum/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ithum/errors.hpp"

namespace ithum {

CoefficientField CoefficientField::identity_scaled(double c)
{
    CoefficientField f;
    f.family = Family::IdentityScaled;
    f.c = c;
    return f;
}

CoefficientField CoefficientField::affine(const Mat2& c0, const std::array<std::array<Point, 2>, 2>& g)
{
    CoefficientField f;
    f.family = Family::Affine;
    f.c0 = c0;
    f.g = g;
    return f;
}

CoefficientField CoefficientField::affine_scalar(double c0, const Point& g)
{
    std::array<std::array<Point, 2>, 2> grad{};
    grad[0][0] = g;
    grad[1][1] = g;
    return affine({{{c0, 0.0}, {0.0, c0}}}, grad);
}

CoefficientField CoefficientField::checkerboard(double c1, double c2)
{
    CoefficientField f;
    f.family = Family::Checkerboard;
    f.c1 = c1;
    f.c2 = c2;
    return f;
}

Mat2 CoefficientField::at(const Point& x, int component) const
{
    switch (family) {
    case Family::IdentityScaled:
        return {{{c, 0.0}, {0.0, c}}};
    case Family::Checkerboard: {
        const double v = component == 1 ? c1 : c2;
        return {{{v, 0.0}, {0.0, v}}};
    }
    case Family::Affine:
        break;
    }
    Mat2 a{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            a[i][j] = c0[i][j] + dot(g[i][j], x);
    return a;
}

double CoefficientField::derivative(int i, int j, int k) const
{
    return family == Family::Affine ? g[i][j][k] : 0.0;
}

std::array<double, 2> symmetric_eigenvalues(const Mat2& a)
{
    const double mean = 0.5 * (a[0][0] + a[1][1]);
    const double diff = 0.5 * (a[0][0] - a[1][1]);
    const double rad = std::hypot(diff, a[0][1]);
    return {mean - rad, mean + rad};
}

namespace {

bool in_closure(NodeLabel label, int component)
{
    if (component == 1)
        return label != NodeLabel::Omega2;
    return label == NodeLabel::Omega2 || label == NodeLabel::InterfaceGamma;
}

} // namespace

MaterialData validate_material(const TwoComponentDomain& domain, const CoefficientField& A,
                               const InterfaceCoefficient& h)
{
    MaterialData m;
    m.A = A;
    m.h = h;
    const int dim = domain.dim();
    double alpha = std::numeric_limits<double>::infinity();
    double beta = 0.0;
    double M = 0.0;

    for (int comp = 1; comp <= 2; ++comp) {
        for (int node = 0; node < domain.node_count(); ++node) {
            if (!in_closure(domain.label(node), comp))
                continue;
            const Point x = domain.position(node);
            const Mat2 a = A.at(x, comp);
            if (dim == 2 && std::abs(a[0][1] - a[1][0]) > 1e-14 * (std::abs(a[0][1]) + std::abs(a[1][0]) + 1.0))
                throw Error(ErrorCode::NotSymmetric, "A is not symmetric at a grid node");
            double lo, hi;
            if (dim == 1) {
                lo = a[0][0];
                hi = std::abs(a[0][0]);
            } else {
                const auto ev = symmetric_eigenvalues(a);
                lo = ev[0];
                hi = std::max(std::abs(ev[0]), std::abs(ev[1]));
            }
            alpha = std::min(alpha, lo);
            beta = std::max(beta, hi);

            // grid derivative of each entry, one-sided at the closure edge
            const auto ij = domain.node_ij(node);
            for (int k = 0; k < dim; ++k) {
                int idx[2] = {ij[0], ij[1]};
                auto neighbour = [&](int step) {
                    int n2[2] = {idx[0], idx[1]};
                    n2[k] += step;
                    if (n2[k] < 0 || n2[k] > domain.resolution())
                        return -1;
                    const int nb = domain.node_index(n2[0], n2[1]);
                    return in_closure(domain.label(nb), comp) ? nb : -1;
                };
                const int plus = neighbour(+1);
                const int minus = neighbour(-1);
                if (plus < 0 && minus < 0)
                    continue;
                const int p = plus >= 0 ? plus : node;
                const int q = minus >= 0 ? minus : node;
                const double span = (p == node || q == node ? 1.0 : 2.0) * domain.spacing(k);
                const Mat2 ap = A.at(domain.position(p), comp);
                const Mat2 aq = A.at(domain.position(q), comp);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j)
                        M = std::max(M, std::abs(ap[i][j] - aq[i][j]) / span);
            }
        }
    }
    if (!(alpha > 0.0))
        throw Error(ErrorCode::NotElliptic, "smallest eigenvalue of A is " + std::to_string(alpha));

    m.alpha = alpha;
    m.beta = beta;
    m.M = M;

    m.h0 = std::numeric_limits<double>::infinity();
    for (const auto& f : domain.interface_facets()) {
        const double v = h.at(f.position);
        if (!(v > 0.0))
            throw Error(ErrorCode::NonPositiveH, "h = " + std::to_string(v) + " on an interface facet");
        m.h_facet.push_back(v);
        m.h0 = std::min(m.h0, v);
    }
    return m;
}

bool geometric_condition(const MaterialData& material, double R, int n)
{
    if (material.M == 0.0)
        return true;
    return R < material.alpha / (n * material.M);
}

} // namespace ithum
