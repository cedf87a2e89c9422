#include "ithum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ithum/errors.hpp"

namespace ithum {

namespace {

int aligned_index(double coord, double origin, double h, const char* what)
{
    const double s = (coord - origin) / h;
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)))
        throw Error(ErrorCode::MisalignedInterface,
                    std::string(what) + " face at " + std::to_string(coord) + " is not on a grid line");
    return static_cast<int>(r);
}

double norm(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1]); }

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }

} // namespace

double TwoComponentDomain::cell_size() const
{
    return dim_ == 2 ? std::max(spacing_[0], spacing_[1]) : spacing_[0];
}

double TwoComponentDomain::cell_volume() const
{
    return dim_ == 2 ? spacing_[0] * spacing_[1] : spacing_[0];
}

Point TwoComponentDomain::position(int node) const
{
    const auto ij = node_ij(node);
    Point p{outer_.lo[0] + ij[0] * spacing_[0], 0.0};
    if (dim_ == 2)
        p[1] = outer_.lo[1] + ij[1] * spacing_[1];
    return p;
}

int TwoComponentDomain::cell_count() const
{
    return dim_ == 2 ? resolution_ * resolution_ : resolution_;
}

std::array<int, 4> TwoComponentDomain::cell_corners(int cell) const
{
    if (dim_ == 1)
        return {cell, cell + 1, -1, -1};
    const int ci = cell % resolution_;
    const int cj = cell / resolution_;
    return {node_index(ci, cj), node_index(ci + 1, cj), node_index(ci, cj + 1), node_index(ci + 1, cj + 1)};
}

Point TwoComponentDomain::cell_center(int cell) const
{
    if (dim_ == 1)
        return {outer_.lo[0] + (cell + 0.5) * spacing_[0], 0.0};
    const int ci = cell % resolution_;
    const int cj = cell / resolution_;
    return {outer_.lo[0] + (ci + 0.5) * spacing_[0], outer_.lo[1] + (cj + 0.5) * spacing_[1]};
}

int TwoComponentDomain::cell_component(int cell) const
{
    const int ci = dim_ == 2 ? cell % resolution_ : cell;
    bool inside = ci >= inner_lo_idx_[0] && ci < inner_hi_idx_[0];
    if (dim_ == 2) {
        const int cj = cell / resolution_;
        inside = inside && cj >= inner_lo_idx_[1] && cj < inner_hi_idx_[1];
    }
    return inside ? 2 : 1;
}

bool TwoComponentDomain::in_closed_inner(const Point& x) const
{
    for (int k = 0; k < dim_; ++k)
        if (x[k] < inner_.lo[k] || x[k] > inner_.hi[k])
            return false;
    return true;
}

bool TwoComponentDomain::in_open_inner(const Point& x) const
{
    for (int k = 0; k < dim_; ++k)
        if (x[k] <= inner_.lo[k] || x[k] >= inner_.hi[k])
            return false;
    return true;
}

std::string TwoComponentDomain::summary() const
{
    int counts[4] = {0, 0, 0, 0};
    for (auto l : labels_)
        ++counts[static_cast<int>(l)];
    double gamma_measure = 0.0;
    for (const auto& f : interface_facets_)
        gamma_measure += f.measure;
    double boundary_measure = 0.0;
    for (const auto& f : boundary_facets_)
        boundary_measure += f.measure;

    std::ostringstream os;
    os.precision(17);
    os << "dim " << dim_ << "\n"
       << "resolution " << resolution_ << "\n"
       << "cell_size " << cell_size() << "\n"
       << "nodes " << node_count() << "\n"
       << "nodes_omega1 " << counts[0] << "\n"
       << "nodes_omega2 " << counts[1] << "\n"
       << "nodes_exterior_boundary " << counts[2] << "\n"
       << "nodes_interface " << counts[3] << "\n"
       << "interface_facets " << interface_facets_.size() << "\n"
       << "interface_measure " << gamma_measure << "\n"
       << "boundary_facets " << boundary_facets_.size() << "\n"
       << "boundary_measure " << boundary_measure << "\n";
    return os.str();
}

TwoComponentDomain build_domain(int dim, const Box& outer, const Box& inner, int resolution)
{
    if (dim != 1 && dim != 2)
        throw Error(ErrorCode::InvalidArgument, "dim must be 1 or 2");
    if (resolution < 3)
        throw Error(ErrorCode::InvalidArgument, "resolution must be at least 3");

    TwoComponentDomain d;
    d.dim_ = dim;
    d.outer_ = outer;
    d.inner_ = inner;
    d.resolution_ = resolution;
    if (dim == 1) {
        d.outer_.lo[1] = d.outer_.hi[1] = 0.0;
        d.inner_.lo[1] = d.inner_.hi[1] = 0.0;
    }

    for (int k = 0; k < dim; ++k) {
        if (!(outer.hi[k] > outer.lo[k]))
            throw Error(ErrorCode::DegenerateDomain, "outer box has non-positive extent");
        if (!(inner.lo[k] > outer.lo[k] && inner.hi[k] < outer.hi[k] && inner.lo[k] < inner.hi[k]))
            throw Error(ErrorCode::DegenerateDomain, "inner box must lie strictly inside the outer box");
        d.spacing_[k] = (outer.hi[k] - outer.lo[k]) / resolution;
        d.inner_lo_idx_[k] = aligned_index(inner.lo[k], outer.lo[k], d.spacing_[k], "inner lower");
        d.inner_hi_idx_[k] = aligned_index(inner.hi[k], outer.lo[k], d.spacing_[k], "inner upper");
        // One-sided second-order stencils need two cells on each side of Gamma.
        if (d.inner_lo_idx_[k] < 2 || resolution - d.inner_hi_idx_[k] < 2 ||
            d.inner_hi_idx_[k] - d.inner_lo_idx_[k] < 2)
            throw Error(ErrorCode::DegenerateDomain,
                        "need at least two cells between the boxes and across the inner box");
    }

    const int np = resolution + 1;
    const int total = dim == 2 ? np * np : np;
    d.labels_.resize(total);
    for (int node = 0; node < total; ++node) {
        const auto ij = d.node_ij(node);
        bool exterior = ij[0] == 0 || ij[0] == resolution;
        bool inside = ij[0] >= d.inner_lo_idx_[0] && ij[0] <= d.inner_hi_idx_[0];
        bool on_face = ij[0] == d.inner_lo_idx_[0] || ij[0] == d.inner_hi_idx_[0];
        if (dim == 2) {
            exterior = exterior || ij[1] == 0 || ij[1] == resolution;
            inside = inside && ij[1] >= d.inner_lo_idx_[1] && ij[1] <= d.inner_hi_idx_[1];
            on_face = on_face || ij[1] == d.inner_lo_idx_[1] || ij[1] == d.inner_hi_idx_[1];
        }
        if (exterior)
            d.labels_[node] = NodeLabel::ExteriorBoundary;
        else if (inside)
            d.labels_[node] = on_face ? NodeLabel::InterfaceGamma : NodeLabel::Omega2;
        else
            d.labels_[node] = NodeLabel::Omega1;
    }

    auto point_facet = [&](int node, double normal) {
        Facet f;
        f.position = d.position(node);
        f.normal = {normal, 0.0};
        f.measure = 1.0;
        f.nodes = {node, -1};
        f.node_count = 1;
        f.normal_axis = 0;
        return f;
    };
    // edge from (i,j) along `axis`, normal along the other axis
    auto edge_facet = [&](int i, int j, int along, double normal_sign) {
        Facet f;
        const int a = d.node_index(i, j);
        const int b = along == 0 ? d.node_index(i + 1, j) : d.node_index(i, j + 1);
        const Point pa = d.position(a);
        const Point pb = d.position(b);
        f.position = {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
        f.normal_axis = 1 - along;
        f.normal = {0.0, 0.0};
        f.normal[f.normal_axis] = normal_sign;
        f.measure = d.spacing_[along];
        f.nodes = {a, b};
        f.node_count = 2;
        return f;
    };

    if (dim == 1) {
        d.interface_facets_.push_back(point_facet(d.inner_lo_idx_[0], +1.0));
        d.interface_facets_.push_back(point_facet(d.inner_hi_idx_[0], -1.0));
        d.boundary_facets_.push_back(point_facet(0, -1.0));
        d.boundary_facets_.push_back(point_facet(resolution, +1.0));
    } else {
        const int ilo = d.inner_lo_idx_[0], ihi = d.inner_hi_idx_[0];
        const int jlo = d.inner_lo_idx_[1], jhi = d.inner_hi_idx_[1];
        for (int i = ilo; i < ihi; ++i) {
            d.interface_facets_.push_back(edge_facet(i, jlo, 0, +1.0));
            d.interface_facets_.push_back(edge_facet(i, jhi, 0, -1.0));
        }
        for (int j = jlo; j < jhi; ++j) {
            d.interface_facets_.push_back(edge_facet(ilo, j, 1, +1.0));
            d.interface_facets_.push_back(edge_facet(ihi, j, 1, -1.0));
        }
        for (int i = 0; i < resolution; ++i) {
            d.boundary_facets_.push_back(edge_facet(i, 0, 0, -1.0));
            d.boundary_facets_.push_back(edge_facet(i, resolution, 0, +1.0));
        }
        for (int j = 0; j < resolution; ++j) {
            d.boundary_facets_.push_back(edge_facet(0, j, 1, -1.0));
            d.boundary_facets_.push_back(edge_facet(resolution, j, 1, +1.0));
        }
    }
    return d;
}

BoundaryPartition partition_boundary(const TwoComponentDomain& domain, const Point& x0)
{
    BoundaryPartition p;
    p.observer = x0;
    const auto& facets = domain.boundary_facets();
    for (int f = 0; f < static_cast<int>(facets.size()); ++f) {
        const double mn = dot(sub(facets[f].position, x0), facets[f].normal);
        (mn > 0.0 ? p.active : p.inactive).push_back(f);
    }
    return p;
}

Radii radii(const TwoComponentDomain& domain, const Point& x0)
{
    auto max_corner_distance = [&](const Box& b) {
        double r = 0.0;
        const int corners = domain.dim() == 2 ? 4 : 2;
        for (int c = 0; c < corners; ++c) {
            Point p{(c & 1) ? b.hi[0] : b.lo[0], 0.0};
            if (domain.dim() == 2)
                p[1] = (c & 2) ? b.hi[1] : b.lo[1];
            r = std::max(r, norm(sub(p, x0)));
        }
        return r;
    };
    Radii r;
    r.R = max_corner_distance(domain.outer());
    r.R2 = max_corner_distance(domain.inner());
    // |x - x0| is convex, so its maximum over the closure of Omega1 is taken
    // at an outer corner, all of which belong to that closure.
    r.R1 = r.R;
    return r;
}

bool check_star_shaped(const TwoComponentDomain& domain, const Point& x0)
{
    Point probe = x0;
    if (domain.dim() == 1)
        probe[1] = 0.0;
    if (!domain.in_open_inner(probe))
        throw Error(ErrorCode::ObserverOutsideInner, "observer must lie inside Omega2");
    for (const auto& f : domain.interface_facets())
        if (dot(sub(f.position, probe), f.normal) > 0.0)
            return false;
    return true;
}

int ControlRegions::count1() const
{
    return static_cast<int>(std::count(omega1.begin(), omega1.end(), 1));
}

int ControlRegions::count2() const
{
    return static_cast<int>(std::count(omega2.begin(), omega2.end(), 1));
}

double distance_to_facet(const TwoComponentDomain& domain, const Facet& facet, const Point& x)
{
    if (facet.node_count == 1 || domain.dim() == 1)
        return std::abs(x[0] - facet.position[0]);
    const Point a = domain.position(facet.nodes[0]);
    const Point b = domain.position(facet.nodes[1]);
    const Point ab = sub(b, a);
    const double t = std::clamp(dot(sub(x, a), ab) / dot(ab, ab), 0.0, 1.0);
    const Point closest{a[0] + t * ab[0], a[1] + t * ab[1]};
    return norm(sub(x, closest));
}

double distance_to_active_boundary(const TwoComponentDomain& domain, const BoundaryPartition& partition,
                                   const Point& x)
{
    double d = std::numeric_limits<double>::infinity();
    for (int f : partition.active)
        d = std::min(d, distance_to_facet(domain, domain.boundary_facets()[f], x));
    return d;
}

double distance_to_interface(const TwoComponentDomain& domain, const Point& x)
{
    const Box& b = domain.inner();
    if (domain.in_closed_inner(x)) {
        double d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < domain.dim(); ++k)
            d = std::min({d, x[k] - b.lo[k], b.hi[k] - x[k]});
        return d;
    }
    double s = 0.0;
    for (int k = 0; k < domain.dim(); ++k) {
        const double e = std::max({b.lo[k] - x[k], 0.0, x[k] - b.hi[k]});
        s += e * e;
    }
    return std::sqrt(s);
}

ControlRegions build_control_regions(const TwoComponentDomain& domain, const BoundaryPartition& partition,
                                     double thickness1, double thickness2)
{
    const double h = domain.cell_size();
    if (thickness1 < 2.0 * h * (1.0 - 1e-12) || thickness2 < 2.0 * h * (1.0 - 1e-12))
        throw Error(ErrorCode::InvalidArgument, "region thickness must be at least two cells");

    ControlRegions r;
    r.thickness1 = thickness1;
    r.thickness2 = thickness2;
    const int n = domain.node_count();
    r.omega1.assign(n, 0);
    r.omega2.assign(n, 0);
    const double tol = 1e-12 * h;
    for (int node = 0; node < n; ++node) {
        const Point x = domain.position(node);
        switch (domain.label(node)) {
        case NodeLabel::Omega1:
            if (!partition.active.empty() && distance_to_active_boundary(domain, partition, x) <= thickness1 + tol)
                r.omega1[node] = 1;
            break;
        case NodeLabel::Omega2:
            if (distance_to_interface(domain, x) <= thickness2 + tol)
                r.omega2[node] = 1;
            break;
        default:
            break;
        }
    }
    if (r.count1() == 0)
        throw Error(ErrorCode::EmptyControlRegion, "omega1 has no nodes");
    if (r.count2() == 0)
        throw Error(ErrorCode::EmptyControlRegion, "omega2 has no nodes");
    return r;
}

} // namespace ithum
