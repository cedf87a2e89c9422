#include <sstream>

#include "common.hpp"

using namespace ithum;
using namespace ithum::test;

namespace {

struct Reference {
    Scenario s;
    Setup st;
    std::vector<char> mask;
    InitialData data;

    explicit Reference(int res = 200, int dim = 1) : s(reference(dim, res)), st(prepare(s))
    {
        s.data_samples = 1;
        mask = control_dof_mask(st.ops, st.regions);
        data = initial_data(s, st)[0];
    }
};

DataPair random_pair(const DiscreteOperators& ops, std::mt19937_64& rng)
{
    return {random_field(ops, rng), random_field(ops, rng)};
}

// relative deviation of the symmetric pairing <Lambda a, b> vs <Lambda b, a>
double asymmetry(const Reference& r, const DataPair& a, const DataPair& b)
{
    const auto la = apply_lambda(r.st.ops, r.mask, a, r.st.grid);
    const auto lb = apply_lambda(r.st.ops, r.mask, b, r.st.grid);
    const double ab = hum_pairing(r.st.ops, la, b), ba = hum_pairing(r.st.ops, lb, a);
    const double aa = hum_pairing(r.st.ops, la, a), bb = hum_pairing(r.st.ops, lb, b);
    return std::abs(ab - ba) / (std::abs(aa) + std::abs(bb));
}

} // namespace

TEST_CASE("Lambda of zero is zero")
{
    Reference r(100);
    const auto l = apply_lambda(r.st.ops, r.mask, {r.st.ops.zeros(), r.st.ops.zeros()}, r.st.grid);
    CHECK(max_abs(l.first) == 0.0);
    CHECK(max_abs(l.second) == 0.0);
}

TEST_CASE("Lambda is linear")
{
    Reference r(100);
    std::mt19937_64 rng(1);
    const auto a = random_pair(r.st.ops, rng), b = random_pair(r.st.ops, rng);
    DataPair c = a;
    for (int i = 0; i < r.st.ops.size(); ++i) {
        c.first[i] = 3.0 * a.first[i] - b.first[i];
        c.second[i] = 3.0 * a.second[i] - b.second[i];
    }
    const auto la = apply_lambda(r.st.ops, r.mask, a, r.st.grid);
    const auto lb = apply_lambda(r.st.ops, r.mask, b, r.st.grid);
    const auto lc = apply_lambda(r.st.ops, r.mask, c, r.st.grid);
    PairField f(r.st.ops.size()), s(r.st.ops.size());
    for (int i = 0; i < r.st.ops.size(); ++i) {
        f[i] = 3.0 * la.first[i] - lb.first[i];
        s[i] = 3.0 * la.second[i] - lb.second[i];
    }
    CHECK(max_abs_diff(f, lc.first) <= 1e-10 * max_abs(f));
    CHECK(max_abs_diff(s, lc.second) <= 1e-10 * max_abs(s));
}

TEST_CASE("Lambda is symmetric and its quadratic form is the control-region norm")
{
    for (int dim : {1, 2}) {
        Reference r(dim == 1 ? 100 : 16, dim);
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 4; ++trial) {
            const auto a = random_pair(r.st.ops, rng), b = random_pair(r.st.ops, rng);
            CHECK(asymmetry(r, a, b) <= 1e-8);
            const double q = hum_pairing(r.st.ops, apply_lambda(r.st.ops, r.mask, a, r.st.grid), a);
            const double w =
                control_region_norm(r.st.ops, r.mask, solve_homogeneous(r.st.ops, a.first, a.second, r.st.grid));
            CHECK(q > 0.0);
            CHECK(rel(q, w) <= 1e-6);
        }
    }
}

TEST_CASE("zero target needs no iterations")
{
    Reference r(100);
    const auto res = solve_hum(r.st.ops, r.st.regions, r.st.ops.zeros(), r.st.ops.zeros(), r.st.grid);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(max_abs(res.z_init.first) == 0.0);
    CHECK(max_abs(res.z_init.second) == 0.0);
    for (const auto& v : res.control.values)
        CHECK(max_abs(v) == 0.0);
    CHECK(res.final_state_energy == 0.0);
    const auto chk = verify_null(res, r.st.ops);
    CHECK(chk.e_ratio == 0.0);
    CHECK(chk.u_T_norm == 0.0);
    CHECK(chk.v_T_norm == 0.0);
}

TEST_CASE("reference problem is driven to rest")
{
    Reference r;
    HumOptions o;
    const auto res = solve_hum(r.st.ops, r.st.regions, r.data.z0, r.data.z1, r.st.grid, o, r.st.budget.T_min);
    const auto chk = verify_null(res, r.st.ops);
    MESSAGE("iterations " << res.iterations << " e_ratio " << chk.e_ratio);
    CHECK(res.converged);
    CHECK(res.iterations <= 200);
    CHECK_FALSE(res.short_time);
    CHECK(chk.e_ratio <= 1e-4);
    CHECK(res.initial_energy > 0.0);

    // residuals of the conjugate-residual iteration never increase
    for (std::size_t k = 4; k < res.cg_history.size(); ++k)
        CHECK(res.cg_history[k].residual <= res.cg_history[k - 1].residual * (1.0 + 1e-12));

    // control lives on the control regions only
    for (const auto& v : res.control.values)
        for (int d = 0; d < r.st.ops.size(); ++d)
            if (!r.mask[d])
                CHECK(v[d] == 0.0);

    std::ostringstream os;
    write_hum_summary(os, res, chk);
    CHECK(os.str().find("\"converged\": true") != std::string::npos);
    std::ostringstream hist;
    write_cg_history_csv(hist, res.cg_history);
    const std::string h = hist.str();
    CHECK(std::count(h.begin(), h.end(), '\n') ==
          1 + static_cast<long>(res.cg_history.size()));
}

TEST_CASE("recorded quadratic form matches the control-region norm of every iterate")
{
    Reference r(100);
    HumOptions o;
    for (int k = 1; k <= 6; ++k) {
        o.max_iter = k;
        const auto res = solve_hum(r.st.ops, r.st.regions, r.data.z0, r.data.z1, r.st.grid, o);
        REQUIRE(res.cg_history.size() == static_cast<std::size_t>(k + 1));
        const auto z = solve_homogeneous(r.st.ops, res.z_init.first, res.z_init.second, r.st.grid);
        CHECK(rel(res.cg_history[k].quadratic_form, control_region_norm(r.st.ops, r.mask, z)) <= 1e-6);
    }
}

TEST_CASE("stopping early is reported, not thrown")
{
    Reference r(100);
    HumOptions o;
    o.max_iter = 2;
    const auto res = solve_hum(r.st.ops, r.st.regions, r.data.z0, r.data.z1, r.st.grid, o);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 2);
    const auto chk = verify_null(res, r.st.ops);
    CHECK(std::isfinite(chk.e_ratio));
    CHECK(chk.e_ratio > 0.0);
}

TEST_CASE("plain conjugate gradient reaches the same control")
{
    Reference r(100);
    HumOptions cr, cg;
    cg.method = "cg";
    const auto a = solve_hum(r.st.ops, r.st.regions, r.data.z0, r.data.z1, r.st.grid, cr);
    const auto b = solve_hum(r.st.ops, r.st.regions, r.data.z0, r.data.z1, r.st.grid, cg);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(max_abs_diff(a.z_init.first, b.z_init.first) <= 1e-5 * max_abs(a.z_init.first));
    HumOptions bad;
    bad.method = "gmres";
    CHECK(error_code_of([&] { solve_hum(r.st.ops, r.st.regions, r.data.z0, r.data.z1, r.st.grid, bad); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("without the interface control region the problem is not controlled")
{
    Reference r;
    ControlRegions cut = r.st.regions;
    std::fill(cut.omega2.begin(), cut.omega2.end(), 0);
    const auto res = solve_hum(r.st.ops, cut, r.data.z0, r.data.z1, r.st.grid);
    const auto chk = verify_null(res, r.st.ops);
    MESSAGE("converged " << res.converged << " e_ratio " << chk.e_ratio << " residual "
                         << res.cg_history.back().residual);
    CHECK((!res.converged || chk.e_ratio >= 1e-2));
}

TEST_CASE("controls superpose")
{
    Reference r(100);
    Scenario s = r.s;
    s.data_samples = 2;
    const auto d = initial_data(s, r.st);
    const auto h1 = solve_hum(r.st.ops, r.st.regions, d[0].z0, d[0].z1, r.st.grid);
    const auto h2 = solve_hum(r.st.ops, r.st.regions, d[1].z0, d[1].z1, r.st.grid);
    REQUIRE(h1.converged);
    REQUIRE(h2.converged);
    PairField U0 = d[0].z0, U1 = d[0].z1;
    ControlVector f = h1.control;
    for (int i = 0; i < r.st.ops.size(); ++i) {
        U0[i] += d[1].z0[i];
        U1[i] += d[1].z1[i];
    }
    for (std::size_t k = 0; k < f.values.size(); ++k)
        for (int i = 0; i < r.st.ops.size(); ++i)
            f.values[k][i] += h2.control.values[k][i];
    const auto u = solve_controlled(r.st.ops, U0, U1, f, r.st.grid);
    const int N = r.st.grid.steps;
    const double ratio = energy_at(r.st.ops, u.states[N], u.centered_velocity(N)).total /
                         energy_at(r.st.ops, U0, U1).total;
    CHECK(ratio <= 1e-4);
}

TEST_CASE("two-dimensional reference with low-pass filtering")
{
    Scenario s = reference(2, 32);
    s.data_samples = 1;
    const auto st = prepare(s);
    const auto d = initial_data(s, st)[0];
    HumOptions o;
    o.max_iter = 400;
    o.lowpass_modes = effective_lowpass(s);
    CHECK(o.lowpass_modes == 32);
    const auto res = solve_hum(st.ops, st.regions, d.z0, d.z1, st.grid, o, st.budget.T_min);
    const auto chk = verify_null(res, st.ops);
    MESSAGE("2D iterations " << res.iterations << " e_ratio " << chk.e_ratio);
    CHECK(res.converged);
    CHECK(chk.e_ratio <= 1e-2);
}
