#include "ithum/hum.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <cstdio>
#include <ostream>

#include "json.hpp"

#include "ithum/errors.hpp"

namespace ithum {

std::vector<PairField> time_derivative(const std::vector<PairField>& z, double dt)
{
    const int np = static_cast<int>(z.size());
    if (np < 3)
        throw Error(ErrorCode::ShapeMismatch, "time derivative needs at least three time points");
    const std::size_t n = z[0].size();
    const double s = 1.0 / (2.0 * dt);
    std::vector<PairField> d(np, PairField(n));
    for (std::size_t i = 0; i < n; ++i) {
        d[0][i] = (-3.0 * z[0][i] + 4.0 * z[1][i] - z[2][i]) * s;
        d[np - 1][i] = (3.0 * z[np - 1][i] - 4.0 * z[np - 2][i] + z[np - 3][i]) * s;
    }
    for (int k = 1; k < np - 1; ++k)
        for (std::size_t i = 0; i < n; ++i)
            d[k][i] = (z[k + 1][i] - z[k - 1][i]) * s;
    return d;
}

double control_region_norm(const DiscreteOperators& ops, const std::vector<char>& mask, const Trajectory& z)
{
    const auto dz = time_derivative(z.states, z.grid.dt);
    const auto c = z.grid.trapezoid();
    double total = 0.0;
    for (int k = 0; k < z.grid.points(); ++k) {
        double s = 0.0;
        for (int d = 0; d < ops.size(); ++d)
            if (mask[d])
                s += ops.mass[d] * (dz[k][d] * dz[k][d] + z.states[k][d] * z.states[k][d]);
        total += c[k] * s;
    }
    return total;
}

ControlVector control_from_trajectory(const DiscreteOperators& ops, const std::vector<char>& mask,
                                      const Trajectory& z)
{
    const int np = z.grid.points();
    const int n = ops.size();
    const double s = 1.0 / (2.0 * z.grid.dt);
    const auto c = z.grid.trapezoid();
    const auto dz = time_derivative(z.states, z.grid.dt);

    // acc_j = sum_k D_kj w_k with w_k = c_k M_w (Dz)_k
    std::vector<PairField> acc(np, PairField(n, 0.0));
    auto scatter = [&](int j, double coeff, int k) {
        for (int d = 0; d < n; ++d)
            if (mask[d])
                acc[j][d] += coeff * c[k] * ops.mass[d] * dz[k][d];
    };
    scatter(0, -3.0 * s, 0);
    scatter(1, 4.0 * s, 0);
    scatter(2, -1.0 * s, 0);
    for (int k = 1; k < np - 1; ++k) {
        scatter(k - 1, -s, k);
        scatter(k + 1, s, k);
    }
    scatter(np - 1, 3.0 * s, np - 1);
    scatter(np - 2, -4.0 * s, np - 1);
    scatter(np - 3, 1.0 * s, np - 1);

    ControlVector f;
    f.grid = z.grid;
    f.values.assign(np, PairField(n, 0.0));
    for (int j = 0; j < np; ++j)
        for (int d = 0; d < n; ++d)
            if (mask[d])
                f.values[j][d] = acc[j][d] * ops.inv_mass[d] / c[j] + z.states[j][d];
    return f;
}

DataPair apply_lambda(const DiscreteOperators& ops, const std::vector<char>& mask, const DataPair& a,
                      const TimeGrid& grid)
{
    const Trajectory z = solve_homogeneous(ops, a.first, a.second, grid);
    const ControlVector f = control_from_trajectory(ops, mask, z);
    const Trajectory theta = solve_backward(ops, f.values, grid);
    DataPair out{theta.centered_velocity(0), theta.states[0]};
    for (double& x : out.second)
        x = -x;
    return out;
}

double hum_pairing(const DiscreteOperators& ops, const DataPair& lambda_a, const DataPair& b)
{
    return -(mass_product(ops, lambda_a.first, b.first) + mass_product(ops, lambda_a.second, b.second));
}

namespace {

double inner(const DiscreteOperators& ops, const DataPair& a, const DataPair& b)
{
    return kernels::parallel::weighted_dot(ops.mass, a.first, b.first) +
           kernels::parallel::weighted_dot(ops.mass, a.second, b.second);
}

void axpy(double alpha, const DataPair& x, DataPair& y)
{
    kernels::parallel::axpy(alpha, x.first, y.first);
    kernels::parallel::axpy(alpha, x.second, y.second);
}

// y = x + beta y
void xpby(const DataPair& x, double beta, DataPair& y)
{
    for (std::size_t i = 0; i < x.first.size(); ++i) {
        y.first[i] = x.first[i] + beta * y.first[i];
        y.second[i] = x.second[i] + beta * y.second[i];
    }
}

struct Projector {
    const DiscreteOperators* ops;
    const Modes* modes;   // null: identity

    void apply(PairField& x) const
    {
        if (!modes)
            return;
        PairField out(x.size(), 0.0);
        for (const auto& phi : modes->vectors)
            kernels::parallel::axpy(mass_product(*ops, phi, x), phi, out);
        x = std::move(out);
    }
    void apply(DataPair& a) const
    {
        apply(a.first);
        apply(a.second);
    }
};

} // namespace

HumResult solve_hum(const DiscreteOperators& ops, const ControlRegions& regions, const PairField& U0,
                    const PairField& U1, const TimeGrid& grid, const HumOptions& options, double T_min)
{
    if (!(options.tol > 0.0) || options.max_iter < 0)
        throw Error(ErrorCode::InvalidArgument, "tol must be positive and max_iter nonnegative");
    if (options.method != "cg" && options.method != "cr")
        throw Error(ErrorCode::InvalidArgument, "unknown iteration method '" + options.method + "'");
    if (static_cast<int>(U0.size()) != ops.size() || static_cast<int>(U1.size()) != ops.size())
        throw Error(ErrorCode::ShapeMismatch, "target data have the wrong number of entries");

    const auto mask = control_dof_mask(ops, regions);
    Modes modes;
    if (options.lowpass_modes > 0)
        modes = lowest_modes(ops, options.lowpass_modes);
    const Projector P{&ops, options.lowpass_modes > 0 ? &modes : nullptr};

    // L = -Lambda (projected), SPD in the mass product
    auto L = [&](DataPair a) {
        P.apply(a);
        DataPair la = apply_lambda(ops, mask, a, grid);
        for (double& x : la.first)
            x = -x;
        for (double& x : la.second)
            x = -x;
        P.apply(la);
        return la;
    };

    HumResult res;
    res.T = grid.T;
    res.T_min = T_min;
    res.short_time = grid.T < T_min;

    DataPair b{U1, U0};
    for (double& x : b.first)
        x = -x;
    P.apply(b);

    // Riesz map of H_Gamma x L2: K^{-1} M on the first block
    std::unique_ptr<StiffnessSolver> riesz;
    if (options.riesz)
        riesz = std::make_unique<StiffnessSolver>(ops);
    auto B = [&](const DataPair& r) {
        if (!riesz)
            return r;
        PairField mr(r.first.size());
        for (std::size_t i = 0; i < mr.size(); ++i)
            mr[i] = ops.mass[i] * r.first[i];
        DataPair z{riesz->solve(mr), r.second};
        P.apply(z.first);
        return z;
    };

    DataPair x{ops.zeros(), ops.zeros()};
    DataPair r = b;
    DataPair z = B(r);
    const double bnorm = std::sqrt(inner(ops, r, z));
    auto record = [&](int it, double rnorm) {
        DataPair br = b;
        axpy(-1.0, r, br);
        res.cg_history.push_back({it, rnorm / bnorm, inner(ops, br, x)});
        res.iterations = it;
        return rnorm <= options.tol * bnorm;
    };

    res.cg_history.push_back({0, bnorm > 0.0 ? 1.0 : 0.0, 0.0});
    if (bnorm == 0.0) {
        res.converged = true;
    } else if (options.method == "cg") {
        DataPair p = z;
        double rz = inner(ops, r, z);
        for (int it = 1; it <= options.max_iter; ++it) {
            const DataPair ap = L(p);
            const double alpha = rz / inner(ops, p, ap);
            axpy(alpha, p, x);
            axpy(-alpha, ap, r);
            z = B(r);
            const double rz_new = inner(ops, r, z);
            if (record(it, std::sqrt(rz_new))) {
                res.converged = true;
                break;
            }
            xpby(z, rz_new / rz, p);
            rz = rz_new;
        }
    } else {
        // conjugate residual: minimizes <r, B r> over the Krylov space
        DataPair az = L(z);
        DataPair p = z;
        DataPair ap = az;
        double zaz = inner(ops, z, az);
        for (int it = 1; it <= options.max_iter; ++it) {
            const DataPair bap = B(ap);
            const double alpha = zaz / inner(ops, ap, bap);
            axpy(alpha, p, x);
            axpy(-alpha, ap, r);
            axpy(-alpha, bap, z);
            if (record(it, std::sqrt(std::max(inner(ops, r, z), 0.0)))) {
                res.converged = true;
                break;
            }
            az = L(z);
            const double zaz_new = inner(ops, z, az);
            const double beta = zaz_new / zaz;
            zaz = zaz_new;
            xpby(z, beta, p);
            xpby(az, beta, ap);
        }
    }

    P.apply(x);
    res.z_init = x;
    const Trajectory zt = solve_homogeneous(ops, x.first, x.second, grid);
    res.control = control_from_trajectory(ops, mask, zt);
    res.controlled = solve_controlled(ops, U0, U1, res.control, grid);
    res.initial_energy = energy_at(ops, U0, U1).total;
    const int N = grid.steps;
    res.final_state_energy =
        energy_at(ops, res.controlled.states[N], res.controlled.centered_velocity(N), grid.T).total;
    return res;
}

NullCheck verify_null(const HumResult& result, const DiscreteOperators& ops)
{
    NullCheck c;
    if (result.controlled.states.empty())
        return c;
    const int N = result.controlled.grid.steps;
    const PairField& u = result.controlled.states[N];
    const PairField v = result.controlled.centered_velocity(N);
    c.u_T_norm = std::sqrt(mass_product(ops, u, u));
    c.v_T_norm = std::sqrt(mass_product(ops, v, v));
    c.e_ratio = result.initial_energy > 0.0 ? result.final_state_energy / result.initial_energy : 0.0;
    return c;
}

void write_control_csv(std::ostream& os, const DiscreteOperators& ops, const ControlVector& control)
{
    os << "t,node,comp,value\n";
    char buf[128];
    for (int k = 0; k < static_cast<int>(control.values.size()); ++k)
        for (int d = 0; d < ops.size(); ++d) {
            const double v = control.values[k][d];
            if (v == 0.0)
                continue;
            std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g\n", control.grid.time(k), ops.dofs.node_of[d],
                          ops.dofs.component_of(d), v);
            os << buf;
        }
}

void write_cg_history_csv(std::ostream& os, const std::vector<CgRecord>& history)
{
    os << "iteration,residual,quadratic_form\n";
    char buf[96];
    for (const auto& h : history) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", h.iteration, h.residual, h.quadratic_form);
        os << buf;
    }
}

void write_hum_summary(std::ostream& os, const HumResult& result, const NullCheck& check)
{
    nlohmann::ordered_json j;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["e_ratio"] = check.e_ratio;
    j["u_T_norm"] = check.u_T_norm;
    j["v_T_norm"] = check.v_T_norm;
    j["T"] = result.T;
    j["T_min"] = result.T_min;
    os << j.dump(2) << "\n";
}

} // namespace ithum
