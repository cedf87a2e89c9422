#include "common.hpp"

using namespace ithum;
using namespace ithum::test;

namespace {

const Box unit1{{0.0, 0.0}, {1.0, 0.0}};
const Box inner1{{0.25, 0.0}, {0.75, 0.0}};
const Box unit2{{0.0, 0.0}, {1.0, 1.0}};
const Box inner2{{0.25, 0.25}, {0.75, 0.75}};

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

} // namespace

TEST_CASE("1D interface nodes sit at the ends of the inner interval")
{
    const auto d = build_domain(1, unit1, inner1, 8);
    std::vector<double> gamma;
    for (int i = 0; i < d.node_count(); ++i)
        if (d.label(i) == NodeLabel::InterfaceGamma)
            gamma.push_back(d.position(i)[0]);
    REQUIRE(gamma.size() == 2);
    CHECK(gamma[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(gamma[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(d.label(0) == NodeLabel::ExteriorBoundary);
    CHECK(d.label(8) == NodeLabel::ExteriorBoundary);
    CHECK(d.label(4) == NodeLabel::Omega2);
    CHECK(d.label(1) == NodeLabel::Omega1);
}

TEST_CASE("2D interface facet measures add up to the inner perimeter")
{
    const auto d = build_domain(2, unit2, inner2, 16);
    double total = 0.0;
    for (const auto& f : d.interface_facets())
        total += f.measure;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
    double boundary = 0.0;
    for (const auto& f : d.boundary_facets())
        boundary += f.measure;
    CHECK(boundary == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("interface off the grid lines is rejected")
{
    CHECK(error_code_of([] { build_domain(1, unit1, {{0.3, 0.0}, {0.7, 0.0}}, 7); }) ==
          ErrorCode::MisalignedInterface);
}

TEST_CASE("interface normals point out of Omega1 and are unit")
{
    const auto d = build_domain(2, unit2, inner2, 16);
    const Point c{0.5, 0.5};
    for (const auto& f : d.interface_facets()) {
        CHECK(std::hypot(f.normal[0], f.normal[1]) == doctest::Approx(1.0));
        // out of Omega1 means into the inner box
        CHECK(dot(f.normal, {c[0] - f.position[0], c[1] - f.position[1]}) > 0.0);
    }
}

TEST_CASE("an interior observer sees the whole boundary of the square")
{
    const auto d = build_domain(2, unit2, inner2, 16);
    for (Point x0 : {Point{0.5, 0.5}, Point{0.3, 0.7}, Point{0.26, 0.74}}) {
        const auto p = partition_boundary(d, x0);
        CHECK(p.active.size() == d.boundary_facets().size());
        CHECK(p.inactive.empty());
    }
}

TEST_CASE("1D observer at the centre activates both endpoints")
{
    const auto d = build_domain(1, unit1, inner1, 8);
    const auto p = partition_boundary(d, {0.5, 0.0});
    CHECK(p.active.size() == 2);
    for (int id : p.active) {
        const auto& f = d.boundary_facets()[id];
        CHECK(dot({f.position[0] - 0.5, 0.0}, f.normal) == doctest::Approx(0.5));
    }
}

TEST_CASE("a far-left observer deactivates the left face only")
{
    const auto d = build_domain(2, unit2, inner2, 16);
    const auto p = partition_boundary(d, {-10.0, 0.5});
    for (int id : p.active)
        CHECK(d.boundary_facets()[id].position[0] > 0.0);
    bool left_inactive = true, right_active = true;
    for (int id = 0; id < static_cast<int>(d.boundary_facets().size()); ++id) {
        const auto& f = d.boundary_facets()[id];
        const bool active = std::find(p.active.begin(), p.active.end(), id) != p.active.end();
        if (f.position[0] == 0.0 && f.normal[0] < 0.0)
            left_inactive = left_inactive && !active;
        if (f.position[0] == 1.0 && f.normal[0] > 0.0)
            right_active = right_active && active;
    }
    CHECK(left_inactive);
    CHECK(right_active);
}

TEST_CASE("partition is exhaustive and disjoint for arbitrary observers")
{
    const auto d = build_domain(2, unit2, inner2, 16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Point x0{u(rng), u(rng)};
        const auto p = partition_boundary(d, x0);
        std::vector<int> seen(d.boundary_facets().size(), 0);
        for (int id : p.active)
            ++seen[id];
        for (int id : p.inactive)
            ++seen[id];
        for (int c : seen)
            CHECK(c == 1);
        for (int id : p.active) {
            const auto& f = d.boundary_facets()[id];
            CHECK(dot({f.position[0] - x0[0], f.position[1] - x0[1]}, f.normal) > 0.0);
        }
    }
}

TEST_CASE("radii of the reference configurations")
{
    const auto d1 = build_domain(1, unit1, inner1, 8);
    const auto r1 = radii(d1, {0.5, 0.0});
    CHECK(r1.R1 == doctest::Approx(0.5));
    CHECK(r1.R2 == doctest::Approx(0.25));
    CHECK(r1.R == doctest::Approx(0.5));

    const auto d2 = build_domain(2, unit2, inner2, 16);
    CHECK(radii(d2, {0.5, 0.5}).R == doctest::Approx(std::sqrt(0.5)));
    CHECK(radii(d2, {0.25, 0.25}).R2 == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("for observers in the inner box R = R1 > R2")
{
    const auto d = build_domain(2, unit2, inner2, 16);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.26, 0.74);
    for (int trial = 0; trial < 50; ++trial) {
        const Point x0{u(rng), u(rng)};
        const auto r = radii(d, x0);
        CHECK(r.R == doctest::Approx(std::max(r.R1, r.R2)));
        CHECK(r.R == doctest::Approx(r.R1));
        CHECK(r.R1 > r.R2);
        double far = 0.0;
        for (Point c : {Point{0, 0}, Point{1, 0}, Point{0, 1}, Point{1, 1}})
            far = std::max(far, dist(c, x0));
        CHECK(r.R1 == doctest::Approx(far));
    }
}

TEST_CASE("inner box is star-shaped with respect to its interior points")
{
    const auto d = build_domain(2, unit2, inner2, 16);
    CHECK(check_star_shaped(d, {0.5, 0.5}));
    CHECK(check_star_shaped(d, {0.26, 0.26}));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.26, 0.74);
    for (int trial = 0; trial < 50; ++trial) {
        const Point x0{u(rng), u(rng)};
        CHECK(check_star_shaped(d, x0));
        for (const auto& f : d.interface_facets())
            CHECK(dot({f.position[0] - x0[0], f.position[1] - x0[1]}, f.normal) <= 0.0);
    }
    CHECK(error_code_of([&] { check_star_shaped(d, {0.9, 0.9}); }) == ErrorCode::ObserverOutsideInner);
}

TEST_CASE("control regions are the metric neighbourhoods")
{
    const auto d1 = build_domain(1, unit1, inner1, 40);
    const auto p1 = partition_boundary(d1, {0.5, 0.0});
    const auto c1 = build_control_regions(d1, p1, 0.1, 0.1);
    for (int i = 0; i < d1.node_count(); ++i) {
        const double x = d1.position(i)[0];
        const bool expect = d1.label(i) == NodeLabel::Omega1 && std::min(x, 1.0 - x) <= 0.1 + 1e-12;
        CHECK(static_cast<bool>(c1.omega1[i]) == expect);
    }

    const auto d2 = build_domain(2, unit2, inner2, 40);
    const auto p2 = partition_boundary(d2, {0.5, 0.5});
    const auto c2 = build_control_regions(d2, p2, 0.1, 0.1);
    for (int i = 0; i < d2.node_count(); ++i) {
        const Point x = d2.position(i);
        const double to_gamma = std::min({x[0] - 0.25, 0.75 - x[0], x[1] - 0.25, 0.75 - x[1]});
        const bool expect = d2.label(i) == NodeLabel::Omega2 && to_gamma <= 0.1 + 1e-12;
        CHECK(static_cast<bool>(c2.omega2[i]) == expect);
    }
}

TEST_CASE("every interface facet touches an omega2 node")
{
    const auto d = build_domain(2, unit2, inner2, 32);
    const auto c = build_control_regions(d, partition_boundary(d, {0.5, 0.5}), 0.125, 0.125);
    const double h = d.cell_size();
    for (const auto& f : d.interface_facets()) {
        bool touched = false;
        for (int i = 0; i < d.node_count() && !touched; ++i)
            touched = c.omega2[i] && dist(d.position(i), f.position) <= 1.5 * h;
        CHECK(touched);
    }
}

TEST_CASE("thicker omega1 contains the thinner one")
{
    const auto d = build_domain(2, unit2, inner2, 32);
    const auto p = partition_boundary(d, {0.5, 0.5});
    const auto thin = build_control_regions(d, p, 0.1, 0.1);
    const auto thick = build_control_regions(d, p, 0.2, 0.1);
    for (int i = 0; i < d.node_count(); ++i)
        if (thin.omega1[i])
            CHECK(thick.omega1[i]);
    CHECK(thick.count1() > thin.count1());
}

TEST_CASE("a sub-cell thickness is refused")
{
    const auto d = build_domain(1, unit1, inner1, 8);
    const auto p = partition_boundary(d, {0.5, 0.0});
    const auto code = error_code_of([&] { build_control_regions(d, p, 0.5 * d.cell_size(), 0.125); });
    CHECK((code == ErrorCode::EmptyControlRegion || code == ErrorCode::InvalidArgument));
}
