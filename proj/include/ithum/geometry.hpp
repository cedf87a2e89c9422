#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ithum {

/// Spatial point. In 1D only the first coordinate is meaningful and the
/// second one is kept at zero.
using Point = std::array<double, 2>;

struct Box {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};

    bool operator==(const Box&) const = default;
};

enum class NodeLabel : std::uint8_t { Omega1, Omega2, ExteriorBoundary, InterfaceGamma };

/// A piece of the exterior boundary or of the interface. In 1D a facet is a
/// single node with unit measure; in 2D it is one grid edge.
struct Facet {
    Point position{};           ///< centroid
    Point normal{};             ///< unit normal n1, pointing out of Omega1
    double measure = 0.0;
    std::array<int, 2> nodes{-1, -1};
    int node_count = 0;
    int normal_axis = 0;        ///< axis the normal is aligned with
};

/// Uniform tensor grid on an axis-aligned outer box with an inner box
/// (Omega2) whose faces lie on grid lines. Omega1 is the complement of the
/// closed inner box, Gamma its boundary.
class TwoComponentDomain {
public:
    TwoComponentDomain() = default;

    int dim() const { return dim_; }
    const Box& outer() const { return outer_; }
    const Box& inner() const { return inner_; }
    int resolution() const { return resolution_; }
    double spacing(int axis) const { return spacing_[axis]; }
    double cell_size() const;
    double cell_volume() const;

    int nodes_per_axis() const { return resolution_ + 1; }
    int node_count() const { return static_cast<int>(labels_.size()); }
    int node_index(int i, int j = 0) const { return i + j * nodes_per_axis(); }
    std::array<int, 2> node_ij(int node) const
    {
        return {node % nodes_per_axis(), dim_ == 2 ? node / nodes_per_axis() : 0};
    }
    Point position(int node) const;
    NodeLabel label(int node) const { return labels_[node]; }
    const std::vector<NodeLabel>& node_partition() const { return labels_; }

    /// Inner box in grid indices (inclusive on both ends).
    int inner_lo_index(int axis) const { return inner_lo_idx_[axis]; }
    int inner_hi_index(int axis) const { return inner_hi_idx_[axis]; }

    int cell_count() const;
    /// Corner nodes of a cell, ordered (0,0),(1,0),(0,1),(1,1); 1D uses the
    /// first two entries.
    std::array<int, 4> cell_corners(int cell) const;
    int cell_corner_count() const { return dim_ == 2 ? 4 : 2; }
    Point cell_center(int cell) const;
    /// 1 or 2 depending on which component contains the cell.
    int cell_component(int cell) const;

    const std::vector<Facet>& interface_facets() const { return interface_facets_; }
    const std::vector<Facet>& boundary_facets() const { return boundary_facets_; }

    bool in_closed_inner(const Point& x) const;
    bool in_open_inner(const Point& x) const;

    /// Human-readable node, facet and measure counts.
    std::string summary() const;

    friend TwoComponentDomain build_domain(int dim, const Box& outer, const Box& inner, int resolution);

private:
    int dim_ = 1;
    Box outer_{};
    Box inner_{};
    int resolution_ = 0;
    std::array<double, 2> spacing_{0.0, 0.0};
    std::array<int, 2> inner_lo_idx_{0, 0};
    std::array<int, 2> inner_hi_idx_{0, 0};
    std::vector<NodeLabel> labels_;
    std::vector<Facet> interface_facets_;
    std::vector<Facet> boundary_facets_;
};

TwoComponentDomain build_domain(int dim, const Box& outer, const Box& inner, int resolution);

struct BoundaryPartition {
    Point observer{};
    std::vector<int> active;     ///< facet ids of the observed boundary part
    std::vector<int> inactive;
};

BoundaryPartition partition_boundary(const TwoComponentDomain& domain, const Point& x0);

struct Radii {
    double R1 = 0.0;
    double R2 = 0.0;
    double R = 0.0;
};

Radii radii(const TwoComponentDomain& domain, const Point& x0);

/// Star-shapedness of Omega2 with respect to x0, via the facet test
/// m.n1 <= 0 on every interface facet.
bool check_star_shaped(const TwoComponentDomain& domain, const Point& x0);

struct ControlRegions {
    std::vector<char> omega1;   ///< node mask, Omega1 nodes only
    std::vector<char> omega2;   ///< node mask, Omega2 nodes only
    double thickness1 = 0.0;
    double thickness2 = 0.0;

    int count1() const;
    int count2() const;
};

ControlRegions build_control_regions(const TwoComponentDomain& domain, const BoundaryPartition& partition,
                                     double thickness1, double thickness2);

/// Euclidean distance from x to a facet (segment in 2D, point in 1D).
double distance_to_facet(const TwoComponentDomain& domain, const Facet& facet, const Point& x);

double distance_to_active_boundary(const TwoComponentDomain& domain, const BoundaryPartition& partition,
                                   const Point& x);
double distance_to_interface(const TwoComponentDomain& domain, const Point& x);

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }

} // namespace ithum
