// ithum: scenario-driven front end. Every subcommand reads one JSON config,
// writes its artifacts under --out and a manifest.json describing the run.
//
// Exit status: 0 ok, 1 other failure, 2 config, 3 infeasible time,
// 4 not converged, 5 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "ithum/errors.hpp"
#include "ithum/oracle.hpp"

using namespace ithum;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool quiet = false;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// SHA-1 of "blob <size>\0<content>", as `git hash-object` prints it.
std::string git_blob_sha1(const std::string& content)
{
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
    EVP_DigestUpdate(ctx, header.data(), header.size());
    EVP_DigestUpdate(ctx, content.data(), content.size());
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

class Run {
public:
    Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt)
    {
        text_ = read_file(opt.config);
        scenario_ = parse_scenario(text_);
        if (opt.seed_set)
            scenario_.seed = opt.seed;
        if (opt.threads > 0)
            scenario_.threads = opt.threads;
        kernels::set_threads(scenario_.threads);
        fs::create_directories(opt.out);
    }

    const Scenario& scenario() const { return scenario_; }

    std::ofstream open(const std::string& name)
    {
        outputs_.push_back(name);
        std::ofstream os(fs::path(opt_.out) / name, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot write " + (fs::path(opt_.out) / name).string());
        return os;
    }

    void say(const std::string& line) const
    {
        if (!opt_.quiet)
            std::cout << line << "\n";
    }
    void warn(const std::string& line) const
    {
        if (!opt_.quiet)
            std::cerr << "warning: " << line << "\n";
    }

    void finish(int status)
    {
        nlohmann::ordered_json m;
        m["command"] = command_;
        m["config"] = opt_.config;
        m["config_hash"] = git_blob_sha1(text_);
        m["seed"] = scenario_.seed;
        m["threads"] = scenario_.threads;
        m["exit_status"] = status;
        m["outputs"] = outputs_;
        const std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m["timestamp"] = stamp;
        std::ofstream os(fs::path(opt_.out) / "manifest.json");
        os << m.dump(2) << "\n";
    }

private:
    std::string command_;
    Options opt_;
    std::string text_;
    Scenario scenario_;
    std::vector<std::string> outputs_;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int cmd_time_budget(Run& run)
{
    const Scenario& s = run.scenario();
    const auto domain = build_domain(s.dim, s.outer, s.inner, s.resolution);
    const auto material = validate_material(domain, s.A, s.h);
    const auto rr = radii(domain, s.observer);
    const auto b = time_budget(material, rr.R, s.dim);
    auto os = run.open("time_budget.csv");
    os << "R,alpha,M,h0,n,T0,condition_ratio,feasible,T_min\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%d,%.17g\n", rr.R, material.alpha,
                  material.M, material.h0, s.dim, b.T0, b.condition_ratio, b.feasible ? 1 : 0, b.T_min);
    os << buf;
    run.say("R=" + fmt("%.6g", rr.R) + " alpha=" + fmt("%.6g", material.alpha) + " M=" + fmt("%.6g", material.M) +
            " h0=" + fmt("%.6g", material.h0) + " n=" + std::to_string(s.dim));
    run.say("T0=" + fmt("%.6g", b.T0) + " condition_ratio=" + fmt("%.6g", b.condition_ratio) +
            " feasible=" + (b.feasible ? "true" : "false") + " T_min=" + fmt("%.6g", b.T_min));
    return b.feasible ? 0 : 3;
}

int cmd_simulate(Run& run)
{
    const Scenario& s = run.scenario();
    const Setup st = prepare(s);
    const auto data = initial_data(s, st);
    const Trajectory tr = solve_homogeneous(st.ops, data[0].z0, data[0].z1, st.grid);
    const auto rep = conservation_report(st.ops, tr);
    {
        auto os = run.open("energy.csv");
        write_energy_csv(os, rep.series);
    }
    if (s.stride > 0) {
        auto os = run.open("trajectory.csv");
        write_trajectory_csv(os, st.ops, tr, s.stride);
        auto bin = run.open("trajectory.bin");
        write_trajectory_binary(bin, st.ops, tr);
    }
    run.say("steps=" + std::to_string(st.grid.steps) + " dt=" + fmt("%.6g", st.grid.dt) +
            " energy_drift=" + fmt("%.3e", rep.max_drift) + " compatible_drift=" + fmt("%.3e", rep.compatible_drift));
    return 0;
}

int cmd_multiplier(Run& run)
{
    const Scenario& s = run.scenario();
    const Setup st = prepare(s);
    const auto data = initial_data(s, st);
    FieldParams fp;
    fp.T = st.grid.T;
    fp.dt = st.grid.dt;
    const VectorField q = build_field(field_kind(s.field), st.domain, st.partition, st.regions, s.observer, fp);
    const Trajectory tr = solve_homogeneous(st.ops, data[0].z0, data[0].z1, st.grid);
    const MultiplierTerms t = multiplier_identity(tr, q, st.ops);
    auto os = run.open("multiplier.csv");
    write_multiplier_csv(os, t);
    run.say("field=" + s.field + " lhs=" + fmt("%.10g", t.lhs) + " rhs=" + fmt("%.10g", t.rhs) +
            " residual=" + fmt("%.3e", t.residual));
    return 0;
}

int cmd_observability(Run& run)
{
    const Scenario& s = run.scenario();
    const Setup st = prepare(s);
    if (st.grid.T < st.budget.T_min)
        run.warn("T = " + fmt("%.6g", st.grid.T) + " is below T_min = " + fmt("%.6g", st.budget.T_min));
    const auto data = initial_data(s, st);
    const auto rep = run_ensemble(st.ops, st.regions, st.grid, data, st.budget.T_min);
    auto os = run.open("observability.csv");
    write_observability_csv(os, rep);
    run.say("samples=" + std::to_string(rep.ensemble.size()) + " max_ratio=" + fmt("%.6g", rep.max_ratio) +
            " median_ratio=" + fmt("%.6g", rep.median_ratio) + " short_time=" + (rep.short_time ? "true" : "false"));
    return 0;
}

int cmd_hum(Run& run)
{
    const Scenario& s = run.scenario();
    const Setup st = prepare(s);
    if (st.grid.T < st.budget.T_min)
        run.warn("InfeasibleTime: T = " + fmt("%.6g", st.grid.T) + " is below T_min = " +
                 fmt("%.6g", st.budget.T_min));
    const auto data = initial_data(s, st);
    HumOptions o;
    o.tol = s.tol;
    o.max_iter = s.max_iter;
    o.lowpass_modes = effective_lowpass(s);
    o.method = s.method;
    const HumResult res = solve_hum(st.ops, st.regions, data[0].z0, data[0].z1, st.grid, o, st.budget.T_min);
    const NullCheck c = verify_null(res, st.ops);
    {
        auto os = run.open("control.csv");
        write_control_csv(os, st.ops, res.control);
    }
    {
        auto os = run.open("cg_history.csv");
        write_cg_history_csv(os, res.cg_history);
    }
    {
        auto os = run.open("summary.json");
        write_hum_summary(os, res, c);
    }
    run.say("converged=" + std::string(res.converged ? "true" : "false") + " iterations=" +
            std::to_string(res.iterations) + " e_ratio=" + fmt("%.3e", c.e_ratio));
    return res.converged ? 0 : 4;
}

int cmd_oracle(Run& run)
{
    const Scenario& s = run.scenario();
    const OracleReport r = refine_study(s, s.quantity, s.levels);
    auto os = run.open("oracle.csv");
    write_oracle_csv(os, r);
    run.say("quantity=" + s.quantity + " fine=" + fmt("%.6e", r.fine) + " order=" + fmt("%.4g", r.observed_order) +
            " monotone=" + (r.monotone ? "true" : "false"));
    return 0;
}

int exit_code(ErrorCode c)
{
    switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::MisalignedInterface:
    case ErrorCode::DegenerateDomain:
    case ErrorCode::ObserverOutsideInner:
    case ErrorCode::EmptyControlRegion:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotSymmetric:
    case ErrorCode::NotElliptic:
    case ErrorCode::NonPositiveH:
    case ErrorCode::RegionTooThin:
    case ErrorCode::EmptyEnsemble:
        return 2;
    case ErrorCode::InfeasibleTime:
        return 3;
    case ErrorCode::NotConverged:
        return 4;
    case ErrorCode::ShapeMismatch:
    case ErrorCode::CflViolation:
    case ErrorCode::NonFiniteState:
        return 5;
    case ErrorCode::BudgetExceeded:
        return 1;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-component wave equation with an imperfect interface: simulation, multiplier "
                 "identity, observability and HUM control synthesis."};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config, "scenario JSON file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "output directory")->capture_default_str();
    auto* seed = app.add_option("--seed", opt.seed, "overrides initial_data.seed");
    app.add_option("--threads", opt.threads, "overrides the threads key")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", opt.quiet, "no console output");

    using Handler = int (*)(Run&);
    const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
        {"simulate", "homogeneous run: energy CSV and trajectory dumps", cmd_simulate},
        {"multiplier-check", "multiplier identity breakdown", cmd_multiplier},
        {"observability", "observability ratios over the initial-data ensemble", cmd_observability},
        {"time-budget", "T0 and T_min of the scenario", cmd_time_budget},
        {"hum", "HUM control synthesis and null-state check", cmd_hum},
        {"oracle", "grid refinement study of run.quantity", cmd_oracle},
    };
    for (const auto& [name, help, fn] : commands)
        app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    opt.seed_set = seed->count() > 0;

    for (const auto& [name, help, fn] : commands) {
        if (!app.got_subcommand(name))
            continue;
        std::unique_ptr<Run> run;
        try {
            run = std::make_unique<Run>(name, opt);
            const int status = fn(*run);
            run->finish(status);
            return status;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            const int status = exit_code(e.code());
            if (run)
                run->finish(status);
            return status;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            if (run)
                run->finish(1);
            return 1;
        }
    }
    return 1;
}
