#include "ithum/observability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <random>

#include "ithum/errors.hpp"

namespace ithum {

TimeBudget time_budget(double alpha, double M, double R, int n, double h0)
{
    if (!(alpha > 0.0) || !(R > 0.0) || !(h0 > 0.0) || n < 1 || M < 0.0)
        throw Error(ErrorCode::InvalidArgument, "time budget needs alpha, R, h0 > 0, n >= 1, M >= 0");
    TimeBudget b;
    const double sa = std::sqrt(alpha);
    b.T0 = 2.0 * std::max(R / sa, (n - 1) * sa / (2.0 * h0)) + 2.0 * std::max({1.0, R, R / alpha, R * R / alpha});
    b.condition_ratio = n * R * M / alpha;
    b.feasible = M == 0.0 || R < alpha / (n * M);
    if (M == 0.0)
        b.T_min = b.T0;
    else if (b.feasible)
        b.T_min = b.T0 / (1.0 - b.condition_ratio);
    else
        b.T_min = std::numeric_limits<double>::infinity();
    return b;
}

TimeBudget time_budget(const MaterialData& material, double R, int n)
{
    return time_budget(material.alpha, material.M, R, n, material.h0);
}

double omega_norm(const DiscreteOperators& ops, const std::vector<char>& mask, const Trajectory& traj)
{
    const auto c = traj.grid.trapezoid();
    double total = 0.0;
    for (int k = 0; k < traj.grid.points(); ++k) {
        const auto& u = traj.states[k];
        const auto& v = traj.velocities[k];
        double s = 0.0;
        for (int d = 0; d < ops.size(); ++d)
            if (mask[d])
                s += ops.mass[d] * (v[d] * v[d] + u[d] * u[d]);
        total += c[k] * s;
    }
    return total;
}

ObservabilityReport observability_ratio(const Trajectory& traj, const ControlRegions& regions,
                                        const DiscreteOperators& ops, double T_min)
{
    ObservabilityReport r;
    r.E0 = energy_at(ops, traj.states[0], traj.velocities[0]).total;
    r.omega_norm = omega_norm(ops, control_dof_mask(ops, regions), traj);
    r.ratio = r.omega_norm > 0.0 ? r.E0 / r.omega_norm : 0.0;
    r.short_time = traj.grid.T < T_min;
    r.max_ratio = r.median_ratio = r.ratio;
    return r;
}

std::vector<InitialData> random_mode_ensemble(const Modes& modes, int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<InitialData> out;
    const int nm = static_cast<int>(modes.vectors.size());
    if (nm == 0)
        throw Error(ErrorCode::EmptyEnsemble, "no modes to combine");
    const std::size_t n = modes.vectors[0].size();
    for (int s = 0; s < count; ++s) {
        InitialData d{PairField(n, 0.0), PairField(n, 0.0)};
        for (int j = 0; j < nm; ++j) {
            const double a = normal(rng);
            const double b = normal(rng) * std::sqrt(modes.eigenvalues[j]);
            for (std::size_t i = 0; i < n; ++i) {
                d.z0[i] += a * modes.vectors[j][i];
                d.z1[i] += b * modes.vectors[j][i];
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

ObservabilityReport run_ensemble(const DiscreteOperators& ops, const ControlRegions& regions, const TimeGrid& grid,
                                 const std::vector<InitialData>& samples, double T_min)
{
    if (samples.empty())
        throw Error(ErrorCode::EmptyEnsemble, "ensemble has no samples");
    const auto mask = control_dof_mask(ops, regions);
    const int count = static_cast<int>(samples.size());
    std::vector<ObservabilitySample> rec(count);
    std::exception_ptr failure;
    #pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < count; ++s) {
        try {
            const Trajectory tr = solve_homogeneous(ops, samples[s].z0, samples[s].z1, grid);
            rec[s].id = s;
            rec[s].E0 = energy_at(ops, tr.states[0], tr.velocities[0]).total;
            rec[s].omega_norm = omega_norm(ops, mask, tr);
            rec[s].ratio = rec[s].omega_norm > 0.0 ? rec[s].E0 / rec[s].omega_norm : 0.0;
        } catch (...) {
            #pragma omp critical
            failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);

    ObservabilityReport r;
    r.ensemble = rec;
    r.short_time = grid.T < T_min;
    std::vector<double> ratios;
    for (const auto& s : rec) {
        r.E0 += s.E0;
        r.omega_norm += s.omega_norm;
        ratios.push_back(s.ratio);
    }
    r.ratio = r.omega_norm > 0.0 ? r.E0 / r.omega_norm : 0.0;
    std::sort(ratios.begin(), ratios.end());
    r.max_ratio = ratios.back();
    const std::size_t m = ratios.size();
    r.median_ratio = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
    return r;
}

std::pair<double, double> norm_equivalence(const std::vector<ObservabilitySample>& samples)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool any = false;
    for (const auto& s : samples) {
        if (!(s.E0 > 0.0))
            continue;
        const double c = s.omega_norm / s.E0;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        any = true;
    }
    if (!any)
        throw Error(ErrorCode::EmptyEnsemble, "no sample with nonzero energy");
    return {lo, hi};
}

void write_observability_csv(std::ostream& os, const ObservabilityReport& report)
{
    os << "sample,E0,omega_norm,ratio\n";
    char buf[160];
    for (const auto& s : report.ensemble) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", s.id, s.E0, s.omega_norm, s.ratio);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "# summary max_ratio=%.17g median_ratio=%.17g short_time=%d\n", report.max_ratio,
                  report.median_ratio, report.short_time ? 1 : 0);
    os << buf;
}

} // namespace ithum
