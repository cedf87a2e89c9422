#include "ithum/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ithum/errors.hpp"

namespace ithum {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw Error(ErrorCode::ConfigError, "field '" + path + "': " + msg);
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

/// Object view that remembers its path and rejects unknown keys.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!ok.count(it.key()))
                fail(join(path_, it.key()), "unknown field");
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const
    {
        if (!j_.contains(key))
            fail(join(path_, key), "missing");
        return j_.at(key);
    }
    Node child(const char* key) const { return Node(raw(key), join(path_, key)); }
    std::string path(const char* key) const { return join(path_, key); }

    double number(const char* key, double def, bool required = false) const
    {
        if (!j_.contains(key)) {
            if (required)
                fail(join(path_, key), "missing");
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_number())
            fail(join(path_, key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            fail(join(path_, key), "must be finite");
        return x;
    }
    double positive(const char* key, double def, bool required = false) const
    {
        const double x = number(key, def, required);
        if (!(x > 0.0))
            fail(join(path_, key), "must be positive");
        return x;
    }
    int integer(const char* key, int def, int lo) const
    {
        if (!j_.contains(key))
            return def;
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            fail(join(path_, key), "expected an integer");
        const long long x = v.get<long long>();
        if (x < lo || x > 1000000000LL)
            fail(join(path_, key), "must be at least " + std::to_string(lo));
        return static_cast<int>(x);
    }
    std::string string(const char* key, const std::string& def, std::initializer_list<const char*> choices) const
    {
        if (!j_.contains(key))
            return def;
        const json& v = j_.at(key);
        if (!v.is_string())
            fail(join(path_, key), "expected a string");
        const std::string s = v.get<std::string>();
        std::string list;
        for (const char* c : choices) {
            if (s == c)
                return s;
            list += list.empty() ? c : std::string(", ") + c;
        }
        fail(join(path_, key), "'" + s + "' is not one of: " + list);
    }
    Point point(const char* key, const Point& def, bool required = false) const
    {
        if (!j_.contains(key)) {
            if (required)
                fail(join(path_, key), "missing");
            return def;
        }
        return to_point(j_.at(key), join(path_, key));
    }

    static Point to_point(const json& v, const std::string& path)
    {
        if (!v.is_array() || v.empty() || v.size() > 2)
            fail(path, "expected an array of one or two numbers");
        Point p{0.0, 0.0};
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                fail(path + "[" + std::to_string(i) + "]", "expected a number");
            p[i] = v[i].get<double>();
        }
        return p;
    }

private:
    const json& j_;
    std::string path_;
};

Box read_box(const Node& n)
{
    n.allow({"lo", "hi"});
    return {n.point("lo", {}, true), n.point("hi", {}, true)};
}

Mat2 read_mat(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2)
        fail(path, "expected a 2x2 array");
    Mat2 m{};
    for (int i = 0; i < 2; ++i) {
        const Point row = Node::to_point(v[i], path + "[" + std::to_string(i) + "]");
        m[i] = row;
    }
    return m;
}

CoefficientField read_A(const Node& n)
{
    const std::string fam = n.string("family", "identity", {"identity", "affine", "affine_scalar", "checkerboard"});
    if (fam == "identity") {
        n.allow({"family", "c"});
        return CoefficientField::identity_scaled(n.positive("c", 1.0));
    }
    if (fam == "checkerboard") {
        n.allow({"family", "c1", "c2"});
        return CoefficientField::checkerboard(n.positive("c1", 1.0, true), n.positive("c2", 1.0, true));
    }
    if (fam == "affine_scalar") {
        n.allow({"family", "c0", "g"});
        return CoefficientField::affine_scalar(n.positive("c0", 1.0, true), n.point("g", {0.0, 0.0}));
    }
    n.allow({"family", "c0", "g"});
    const Mat2 c0 = read_mat(n.raw("c0"), n.path("c0"));
    std::array<std::array<Point, 2>, 2> g{};
    if (n.has("g")) {
        const json& v = n.raw("g");
        if (!v.is_array() || v.size() != 2)
            fail(n.path("g"), "expected a 2x2 array of gradients");
        for (int i = 0; i < 2; ++i) {
            const std::string p = n.path("g") + "[" + std::to_string(i) + "]";
            if (!v[i].is_array() || v[i].size() != 2)
                fail(p, "expected two gradients");
            for (int k = 0; k < 2; ++k)
                g[i][k] = Node::to_point(v[i][k], p + "[" + std::to_string(k) + "]");
        }
    }
    return CoefficientField::affine(c0, g);
}

InterfaceCoefficient read_h(const Node& n)
{
    const std::string fam = n.string("family", "constant", {"constant", "affine"});
    n.allow({"family", "value", "g"});
    const double v = n.positive("value", 1.0);
    if (fam == "constant")
        return InterfaceCoefficient::constant(v);
    return InterfaceCoefficient::affine(v, n.point("g", {0.0, 0.0}));
}

json point_json(const Point& p) { return json::array({p[0], p[1]}); }
json box_json(const Box& b) { return {{"lo", point_json(b.lo)}, {"hi", point_json(b.hi)}}; }

} // namespace

Scenario parse_scenario(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // locate the byte offset as line:column
        const std::size_t at = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::ConfigError,
                    "syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
    }

    const Node root(j, "");
    root.allow({"schema_version", "domain", "material", "observer", "regions", "time", "initial_data", "run",
                "threads"});
    if (!root.has("schema_version"))
        fail("schema_version", "missing");
    if (!root.raw("schema_version").is_number_integer() || root.raw("schema_version").get<long long>() != 1)
        fail("schema_version", "only version 1 is supported");

    Scenario s;
    {
        const Node d = root.child("domain");
        d.allow({"dim", "outer", "inner", "resolution"});
        s.dim = d.integer("dim", 1, 1);
        if (s.dim > 2)
            fail("domain.dim", "must be 1 or 2");
        if (d.has("outer"))
            s.outer = read_box(d.child("outer"));
        s.inner = read_box(d.child("inner"));
        s.resolution = d.integer("resolution", s.resolution, 4);
    }
    if (root.has("material")) {
        const Node m = root.child("material");
        m.allow({"A", "h"});
        if (m.has("A"))
            s.A = read_A(m.child("A"));
        if (m.has("h"))
            s.h = read_h(m.child("h"));
    }
    s.observer = root.point("observer", {}, true);
    if (root.has("regions")) {
        const Node r = root.child("regions");
        r.allow({"thickness1", "thickness2"});
        s.thickness1 = r.positive("thickness1", s.thickness1);
        s.thickness2 = r.positive("thickness2", s.thickness2);
    }
    if (root.has("time")) {
        const Node t = root.child("time");
        t.allow({"T", "factor", "dt"});
        if (t.has("T")) {
            const json& v = t.raw("T");
            if (v.is_string()) {
                if (v.get<std::string>() != "auto")
                    fail("time.T", "expected a number or \"auto\"");
            } else {
                s.T_auto = false;
                s.T = t.positive("T", 0.0);
            }
        }
        s.T_factor = t.positive("factor", s.T_factor);
        if (t.has("dt")) {
            const json& v = t.raw("dt");
            if (v.is_string()) {
                const std::string str = v.get<std::string>();
                double f = 0.0;
                std::size_t used = 0;
                bool ok = str.rfind("cfl:", 0) == 0;
                if (ok) {
                    try {
                        f = std::stod(str.substr(4), &used);
                    } catch (const std::exception&) {
                        ok = false;
                    }
                }
                if (!ok || used != str.size() - 4 || !(f > 0.0) || f > 1.0)
                    fail("time.dt", "expected a number or \"cfl:<factor in (0,1]>\"");
                s.cfl = f;
            } else {
                s.dt_cfl = false;
                s.dt = t.positive("dt", 0.0);
            }
        }
    }
    if (root.has("initial_data")) {
        const Node d = root.child("initial_data");
        d.allow({"family", "modes", "samples", "seed", "mode", "center", "radius", "amplitude"});
        s.data_family = d.string("family", s.data_family, {"modes", "sine", "bump", "zero"});
        s.data_modes = d.integer("modes", s.data_modes, 1);
        s.data_samples = d.integer("samples", s.data_samples, 1);
        if (d.has("seed")) {
            const json& v = d.raw("seed");
            if (!v.is_number_unsigned())
                fail("initial_data.seed", "expected a nonnegative integer");
            s.seed = v.get<std::uint64_t>();
        }
        s.sine_mode = d.integer("mode", s.sine_mode, 1);
        s.bump_center = d.point("center", s.bump_center);
        s.bump_radius = d.positive("radius", s.bump_radius);
        s.amplitude = d.number("amplitude", s.amplitude);
    }
    if (root.has("run")) {
        const Node r = root.child("run");
        r.allow({"tol", "max_iter", "lowpass_modes", "method", "field", "levels", "quantity", "budget_seconds",
                 "stride"});
        s.tol = r.positive("tol", s.tol);
        s.max_iter = r.integer("max_iter", s.max_iter, 0);
        s.lowpass_modes = r.integer("lowpass_modes", s.lowpass_modes, -1);
        s.method = r.string("method", s.method, {"cr", "cg"});
        s.field = r.string("field", s.field, {"radial", "tau", "w", "cutoff"});
        s.levels = r.integer("levels", s.levels, 3);
        s.quantity = r.string("quantity", s.quantity,
                              {"energy_drift", "compatible_drift", "multiplier_residual", "e_ratio",
                               "transposition_residual"});
        s.budget_seconds = r.positive("budget_seconds", s.budget_seconds);
        s.stride = r.integer("stride", s.stride, 0);
    }
    s.threads = root.integer("threads", s.threads, 1);
    if (s.dim == 1) {
        s.outer.lo[1] = s.outer.hi[1] = 0.0;
        s.inner.lo[1] = s.inner.hi[1] = 0.0;
        s.observer[1] = 0.0;
        s.bump_center[1] = 0.0;
    }
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s)
{
    json A;
    switch (s.A.family) {
    case CoefficientField::Family::IdentityScaled:
        A = {{"family", "identity"}, {"c", s.A.c}};
        break;
    case CoefficientField::Family::Checkerboard:
        A = {{"family", "checkerboard"}, {"c1", s.A.c1}, {"c2", s.A.c2}};
        break;
    case CoefficientField::Family::Affine: {
        json g = json::array();
        for (int i = 0; i < 2; ++i)
            g.push_back(json::array({point_json(s.A.g[i][0]), point_json(s.A.g[i][1])}));
        A = {{"family", "affine"},
             {"c0", json::array({point_json(s.A.c0[0]), point_json(s.A.c0[1])})},
             {"g", g}};
        break;
    }
    }
    json h = {{"family", s.h.family == InterfaceCoefficient::Family::Constant ? "constant" : "affine"},
              {"value", s.h.value}};
    if (s.h.family == InterfaceCoefficient::Family::Affine)
        h["g"] = point_json(s.h.g);

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["domain"] = {{"dim", s.dim}, {"outer", box_json(s.outer)}, {"inner", box_json(s.inner)},
                   {"resolution", s.resolution}};
    j["material"] = {{"A", A}, {"h", h}};
    j["observer"] = point_json(s.observer);
    j["regions"] = {{"thickness1", s.thickness1}, {"thickness2", s.thickness2}};
    j["time"] = {{"T", s.T_auto ? json("auto") : json(s.T)},
                 {"factor", s.T_factor},
                 {"dt", s.dt_cfl ? json("cfl:" + json(s.cfl).dump()) : json(s.dt)}};
    j["initial_data"] = {{"family", s.data_family}, {"modes", s.data_modes}, {"samples", s.data_samples},
                         {"seed", s.seed},           {"mode", s.sine_mode},   {"center", point_json(s.bump_center)},
                         {"radius", s.bump_radius},  {"amplitude", s.amplitude}};
    j["run"] = {{"tol", s.tol},
                {"max_iter", s.max_iter},
                {"lowpass_modes", s.lowpass_modes},
                {"method", s.method},
                {"field", s.field},
                {"levels", s.levels},
                {"quantity", s.quantity},
                {"budget_seconds", s.budget_seconds},
                {"stride", s.stride}};
    j["threads"] = s.threads;
    return j.dump(2) + "\n";
}

int effective_lowpass(const Scenario& s)
{
    if (s.lowpass_modes >= 0)
        return s.lowpass_modes;
    return s.dim == 2 ? 32 : 0;
}

VectorField::Kind field_kind(const std::string& name)
{
    if (name == "radial")
        return VectorField::Kind::RadialM;
    if (name == "tau")
        return VectorField::Kind::BoundaryTau;
    if (name == "w")
        return VectorField::Kind::InterfaceMW;
    if (name == "cutoff")
        return VectorField::Kind::CutoffP;
    throw Error(ErrorCode::InvalidArgument, "unknown vector field '" + name + "'");
}

Setup prepare(const Scenario& s, int resolution)
{
    Setup st;
    st.domain = build_domain(s.dim, s.outer, s.inner, resolution > 0 ? resolution : s.resolution);
    st.material = validate_material(st.domain, s.A, s.h);
    st.ops = assemble(st.domain, st.material);
    st.partition = partition_boundary(st.domain, s.observer);
    st.regions = build_control_regions(st.domain, st.partition, s.thickness1, s.thickness2);
    st.radii = radii(st.domain, s.observer);
    st.budget = time_budget(st.material, st.radii.R, s.dim);
    double T = s.T;
    if (s.T_auto) {
        if (!st.budget.feasible)
            throw Error(ErrorCode::InfeasibleTime, "n R M / alpha = " + std::to_string(st.budget.condition_ratio) +
                                                       " >= 1, so T_min is infinite and T cannot be \"auto\"");
        T = s.T_factor * st.budget.T_min;
    }
    st.grid = make_time_grid(T, s.dt_cfl ? s.cfl * stable_dt(st.ops) : s.dt);
    return st;
}

std::vector<InitialData> initial_data(const Scenario& s, const Setup& st)
{
    const auto& ops = st.ops;
    if (s.data_family == "modes") {
        auto data = random_mode_ensemble(lowest_modes(ops, s.data_modes), s.data_samples, s.seed);
        for (auto& d : data) {
            for (double& x : d.z0)
                x *= s.amplitude;
            for (double& x : d.z1)
                x *= s.amplitude;
        }
        return data;
    }
    InitialData d{ops.zeros(), ops.zeros()};
    const Box& box = s.outer;
    if (s.data_family == "sine") {
        const double k = s.sine_mode * std::acos(-1.0);
        d.z0 = sample(ops, [&](const Point& x, int) {
            double v = s.amplitude * std::sin(k * (x[0] - box.lo[0]) / (box.hi[0] - box.lo[0]));
            if (s.dim == 2)
                v *= std::sin(k * (x[1] - box.lo[1]) / (box.hi[1] - box.lo[1]));
            return v;
        });
    } else if (s.data_family == "bump") {
        d.z0 = sample(ops, [&](const Point& x, int) {
            const double dx = x[0] - s.bump_center[0];
            const double dy = s.dim == 2 ? x[1] - s.bump_center[1] : 0.0;
            const double r2 = (dx * dx + dy * dy) / (s.bump_radius * s.bump_radius);
            return r2 < 1.0 ? s.amplitude * std::pow(1.0 - r2, 4) : 0.0;
        });
    }
    return {d};
}

} // namespace ithum
