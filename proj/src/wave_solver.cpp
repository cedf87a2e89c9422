#include "ithum/wave_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <type_traits>

#include "ithum/errors.hpp"

namespace ithum {

std::vector<double> TimeGrid::trapezoid() const
{
    std::vector<double> c(points(), dt);
    c.front() *= 0.5;
    c.back() *= 0.5;
    return c;
}

TimeGrid make_time_grid(double T, double dt_max)
{
    if (!(T > 0.0) || !(dt_max > 0.0))
        throw Error(ErrorCode::InvalidArgument, "T and dt must be positive");
    TimeGrid g;
    g.T = T;
    g.steps = std::max(4, static_cast<int>(std::ceil(T / dt_max - 1e-9)));
    g.dt = T / g.steps;
    return g;
}

const PairField& Trajectory::state(int k) const
{
    const int n = grid.steps;
    if (k >= 0 && k <= n)
        return states[k];
    if (k == -1 || k == -2)
        return before[-k - 1];
    if (k == n + 1 || k == n + 2)
        return after[k - n - 1];
    throw Error(ErrorCode::InvalidArgument, "time index " + std::to_string(k) + " outside trajectory");
}

PairField Trajectory::centered_velocity(int k) const
{
    const PairField& a = state(k + 1);
    const PairField& b = state(k - 1);
    PairField v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        v[i] = (a[i] - b[i]) / (2.0 * grid.dt);
    return v;
}

std::vector<char> control_dof_mask(const DiscreteOperators& ops, const ControlRegions& regions)
{
    std::vector<char> mask(ops.size(), 0);
    for (int node = 0; node < ops.domain.node_count(); ++node) {
        if (regions.omega1[node] && ops.dofs.dof1[node] >= 0)
            mask[ops.dofs.dof1[node]] = 1;
        if (regions.omega2[node] && ops.dofs.dof2[node] >= 0)
            mask[ops.dofs.dof2[node]] = 1;
    }
    return mask;
}

void check_cfl(const DiscreteOperators& ops, const TimeGrid& grid)
{
    const double limit = 0.9 * stable_dt(ops);
    if (grid.dt > limit)
        throw Error(ErrorCode::CflViolation,
                    "dt = " + std::to_string(grid.dt) + " exceeds 0.9 * stable step = " + std::to_string(limit));
}

namespace {

void step(const DiscreteOperators& ops, double dt2, const PairField& prev, const PairField& cur, const PairField* f,
          PairField& next, int k)
{
    next.resize(cur.size());
    const std::span<const double> src = f ? std::span<const double>(*f) : std::span<const double>();
    if (!kernels::parallel::leapfrog_step(ops.K, ops.inv_mass, dt2, prev, cur, src, next))
        throw Error(ErrorCode::NonFiniteState, "non-finite state at time index " + std::to_string(k));
}

void check_field(const DiscreteOperators& ops, const PairField& u, const char* what)
{
    if (static_cast<int>(u.size()) != ops.size())
        throw Error(ErrorCode::ShapeMismatch, std::string(what) + " has the wrong number of entries");
}

} // namespace

Trajectory solve_forward(const DiscreteOperators& ops, const PairField& u0, const PairField& v0, const Source& f,
                         const TimeGrid& grid)
{
    check_field(ops, u0, "initial state");
    check_field(ops, v0, "initial velocity");
    if (!f.empty()) {
        if (static_cast<int>(f.size()) != grid.points())
            throw Error(ErrorCode::ShapeMismatch, "source does not match the time grid");
        for (const auto& fk : f)
            check_field(ops, fk, "source");
    }
    check_cfl(ops, grid);

    const int n = ops.size();
    const int N = grid.steps;
    const double dt = grid.dt;
    const double dt2 = dt * dt;
    auto src = [&](int k) -> const PairField* { return f.empty() ? nullptr : &f[std::clamp(k, 0, N)]; };

    Trajectory tr;
    tr.grid = grid;
    tr.forced = !f.empty();
    tr.states.resize(N + 1);
    tr.states[0] = u0;

    // Taylor start u1 = u0 + dt v0 + dt^2/2 (f0 - M^-1 K u0)
    PairField ku(n);
    kernels::parallel::spmv(ops.K, u0, ku);
    tr.states[1].resize(n);
    for (int i = 0; i < n; ++i) {
        const double acc = (f.empty() ? 0.0 : f[0][i]) - ops.inv_mass[i] * ku[i];
        tr.states[1][i] = u0[i] + dt * v0[i] + 0.5 * dt2 * acc;
    }
    for (int k = 1; k < N; ++k)
        step(ops, dt2, tr.states[k - 1], tr.states[k], src(k), tr.states[k + 1], k + 1);

    // ghosts: continue the scheme with the endpoint source
    step(ops, dt2, tr.states[1], tr.states[0], src(0), tr.before[0], -1);
    step(ops, dt2, tr.states[0], tr.before[0], src(0), tr.before[1], -2);
    step(ops, dt2, tr.states[N - 1], tr.states[N], src(N), tr.after[0], N + 1);
    step(ops, dt2, tr.states[N], tr.after[0], src(N), tr.after[1], N + 2);

    tr.velocities.resize(N + 1);
    const double inv = 1.0 / (12.0 * dt);
    for (int k = 0; k <= N; ++k) {
        const PairField& m2 = tr.state(k - 2);
        const PairField& m1 = tr.state(k - 1);
        const PairField& p1 = tr.state(k + 1);
        const PairField& p2 = tr.state(k + 2);
        PairField& v = tr.velocities[k];
        v.resize(n);
        for (int i = 0; i < n; ++i)
            v[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) * inv;
    }
    return tr;
}

Trajectory solve_homogeneous(const DiscreteOperators& ops, const PairField& z0, const PairField& z1,
                             const TimeGrid& grid)
{
    return solve_forward(ops, z0, z1, {}, grid);
}

Trajectory solve_backward(const DiscreteOperators& ops, const Source& g, const TimeGrid& grid)
{
    Source reflected;
    if (!g.empty()) {
        if (static_cast<int>(g.size()) != grid.points())
            throw Error(ErrorCode::ShapeMismatch, "source does not match the time grid");
        reflected.assign(g.rbegin(), g.rend());
    }
    const PairField zero = ops.zeros();
    Trajectory phi = solve_forward(ops, zero, zero, reflected, grid);

    Trajectory psi;
    psi.grid = grid;
    psi.scheme = "leapfrog-reflected";
    psi.forced = phi.forced;
    psi.states.assign(std::make_move_iterator(phi.states.rbegin()), std::make_move_iterator(phi.states.rend()));
    psi.velocities.assign(std::make_move_iterator(phi.velocities.rbegin()),
                          std::make_move_iterator(phi.velocities.rend()));
    for (auto& v : psi.velocities)
        for (double& x : v)
            x = -x;
    psi.before = std::move(phi.after);
    psi.after = std::move(phi.before);
    return psi;
}

Trajectory solve_controlled(const DiscreteOperators& ops, const PairField& U0, const PairField& U1,
                            const ControlVector& control, const TimeGrid& grid)
{
    if (!control.values.empty() && static_cast<int>(control.values.size()) != grid.points())
        throw Error(ErrorCode::ShapeMismatch, "control does not match the time grid");
    return solve_forward(ops, U0, U1, control.values, grid);
}

double spacetime_product(const DiscreteOperators& ops, const TimeGrid& grid, const std::vector<PairField>& a,
                         const std::vector<PairField>& b)
{
    if (a.size() != b.size() || static_cast<int>(a.size()) != grid.points())
        throw Error(ErrorCode::ShapeMismatch, "space-time fields do not match the time grid");
    const auto c = grid.trapezoid();
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += c[k] * kernels::parallel::weighted_dot(ops.mass, a[k], b[k]);
    return s;
}

TranspositionTerms transposition_residual(const DiscreteOperators& ops, const Trajectory& u, const PairField& U0,
                                          const PairField& U1, const ControlVector& control, const Source& g)
{
    check_field(ops, U0, "U0");
    check_field(ops, U1, "U1");
    if (static_cast<int>(u.states.size()) != u.grid.points())
        throw Error(ErrorCode::ShapeMismatch, "trajectory is incomplete");
    const Trajectory psi = solve_backward(ops, g, u.grid);

    TranspositionTerms t;
    t.lhs = spacetime_product(ops, u.grid, u.states, g);
    const PairField dpsi = psi.centered_velocity(0);
    t.initial_velocity = -mass_product(ops, U0, dpsi);
    t.initial_state = mass_product(ops, U1, psi.states[0]);
    if (!control.values.empty())
        t.control = spacetime_product(ops, u.grid, control.values, psi.states);
    const double rhs = t.initial_velocity + t.initial_state + t.control;
    const double scale = std::max({std::abs(t.lhs), std::abs(t.initial_velocity), std::abs(t.initial_state),
                                   std::abs(t.control)});
    t.residual = scale > 0.0 ? std::abs(t.lhs - rhs) / scale : 0.0;
    return t;
}

void write_trajectory_csv(std::ostream& os, const DiscreteOperators& ops, const Trajectory& traj, int stride)
{
    stride = std::max(1, stride);
    os << "t,node,comp,value\n";
    char buf[128];
    for (int k = 0; k < traj.grid.points(); k += stride) {
        const auto& u = traj.states[k];
        for (int d = 0; d < ops.size(); ++d) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g\n", traj.grid.time(k), ops.dofs.node_of[d],
                          ops.dofs.component_of(d), u[d]);
            os << buf;
        }
    }
}

namespace {

template <class T>
void put_le(std::ostream& os, T value)
{
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(bytes, sizeof(T));
}

} // namespace

void write_trajectory_binary(std::ostream& os, const DiscreteOperators& ops, const Trajectory& traj)
{
    os.write("HUMW", 4);
    put_le<std::uint32_t>(os, 1);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ops.domain.dim()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ops.domain.resolution()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ops.size()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(traj.grid.points()));
    put_le<double>(os, traj.grid.dt);
    for (int d = 0; d < ops.size(); ++d) {
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ops.dofs.node_of[d]));
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ops.dofs.component_of(d)));
    }
    for (const auto& u : traj.states)
        for (double x : u)
            put_le<double>(os, x);
}

} // namespace ithum
