#include <string>

#include "common.hpp"

using namespace ithum;
using namespace ithum::test;

namespace {

std::string config_error(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        return e.what();
    }
    FAIL("config accepted: " << text);
    return {};
}

const std::string minimal =
    R"({"schema_version": 1, "domain": {"inner": {"lo": [0.25], "hi": [0.75]}}, "observer": [0.5]})";

} // namespace

TEST_CASE("shipped reference configs round-trip")
{
    for (const char* name : {"reference_1d.json", "reference_2d.json"}) {
        const Scenario a = load_scenario(std::string(ITHUM_SCENARIO_DIR) + "/" + name);
        const Scenario b = parse_scenario(serialize_scenario(a));
        CHECK(a == b);
        CHECK(serialize_scenario(b) == serialize_scenario(a));
    }
}

TEST_CASE("1D reference config matches the reference setup")
{
    const Scenario s = load_scenario(std::string(ITHUM_SCENARIO_DIR) + "/reference_1d.json");
    CHECK(s.dim == 1);
    CHECK(s.resolution == 200);
    CHECK(s.T_auto);
    CHECK(s.T_factor == 1.2);
    CHECK(s.cfl == 0.5);
    CHECK(effective_lowpass(s) == 0);
    const auto st = prepare(s);
    CHECK(st.budget.T0 == doctest::Approx(2.0 * 0.5 + 2.0 * 1.0));
    CHECK(st.grid.T == doctest::Approx(1.2 * st.budget.T_min));
    CHECK(st.grid.dt <= 0.5 * stable_dt(st.ops) * (1.0 + 1e-12));
    CHECK(initial_data(s, st).size() == 32);
}

TEST_CASE("defaults and variants round-trip")
{
    Scenario s = parse_scenario(minimal);
    CHECK(s.outer.hi[0] == 1.0);
    CHECK(s.inner.lo[0] == 0.25);
    CHECK(parse_scenario(serialize_scenario(s)) == s);

    const std::string rich = R"({
      "schema_version": 1,
      "domain": {"dim": 2, "outer": {"lo": [0, 0], "hi": [2, 1]}, "inner": {"lo": [0.5, 0.25], "hi": [1.5, 0.75]},
                 "resolution": 16},
      "material": {"A": {"family": "affine", "c0": [[2, 0.1], [0.1, 1.5]],
                         "g": [[[0.01, 0], [0, 0.02]], [[0, 0.02], [0.03, 0]]]},
                   "h": {"family": "affine", "value": 2, "g": [0.1, -0.1]}},
      "observer": [1.0, 0.5],
      "regions": {"thickness1": 0.25, "thickness2": 0.125},
      "time": {"T": 7.5, "dt": 0.001},
      "initial_data": {"family": "bump", "center": [1.0, 0.5], "radius": 0.2, "amplitude": 2},
      "run": {"tol": 1e-6, "max_iter": 50, "lowpass_modes": 0, "method": "cg", "field": "tau",
              "levels": 4, "quantity": "multiplier_residual", "budget_seconds": 30, "stride": 0},
      "threads": 2
    })";
    const Scenario r = parse_scenario(rich);
    CHECK_FALSE(r.T_auto);
    CHECK(r.T == 7.5);
    CHECK(r.dt == 0.001);
    CHECK(r.method == "cg");
    CHECK(r.threads == 2);
    CHECK(effective_lowpass(r) == 0);
    CHECK(parse_scenario(serialize_scenario(r)) == r);
    CHECK(field_kind("tau") == VectorField::Kind::BoundaryTau);
}

TEST_CASE("diagnostics name the offending field")
{
    CHECK(config_error(R"({"schema_version": 1, "domain": {"dim": 1}})").find("domain.inner") != std::string::npos);
    CHECK(config_error(R"({"schema_version": 2, "domain": {"inner": {"lo": [0.25], "hi": [0.75]}}})")
              .find("schema_version") != std::string::npos);
    CHECK(config_error(R"({"schema_version": 1, "domain": {"inner": {"lo": [0.25], "hi": [0.75]}, "dimm": 1}})")
              .find("domain.dimm") != std::string::npos);
    CHECK(config_error(R"({"schema_version": 1, "domain": {"inner": {"lo": [0.25], "hi": [0.75]}},
                           "observer": [0.5], "time": {"dt": "fast"}})")
              .find("time.dt") != std::string::npos);
    CHECK(config_error(R"({"schema_version": 1, "domain": {"inner": {"lo": [0.25], "hi": "x"}}})")
              .find("domain.inner.hi") != std::string::npos);
    const std::string syntax = config_error("{\n  \"schema_version\": 1,\n  \"domain\": {\n}");
    CHECK(syntax.find("line") != std::string::npos);
    CHECK(error_code_of([] { load_scenario("/nonexistent/config.json"); }) == ErrorCode::ConfigError);
}

TEST_CASE("infeasible automatic time")
{
    Scenario s = reference(1, 40);
    s.A = CoefficientField::affine_scalar(1.0, {5.0, 0.0});
    CHECK(error_code_of([&] { prepare(s); }) == ErrorCode::InfeasibleTime);
    s.T_auto = false;
    s.T = 2.0;
    CHECK_FALSE(prepare(s).budget.feasible);
}

TEST_CASE("initial data families")
{
    Scenario s = reference(1, 40);
    const auto st = prepare(s);
    s.data_family = "sine";
    s.sine_mode = 1;
    auto d = initial_data(s, st);
    REQUIRE(d.size() == 1);
    CHECK(max_abs_diff(d[0].z0, standing_wave_field(st.ops, 0.0, 1)) <= 1e-12);
    CHECK(max_abs(d[0].z1) == 0.0);
    s.data_family = "zero";
    d = initial_data(s, st);
    CHECK(max_abs(d[0].z0) == 0.0);
    s.data_family = "bump";
    d = initial_data(s, st);
    CHECK(max_abs(d[0].z0) == doctest::Approx(s.amplitude));
}
