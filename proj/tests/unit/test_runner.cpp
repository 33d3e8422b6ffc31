#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oppc/runner.hpp"

using namespace oppc;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
name: small
system:
  energies: [0.0, 2.0]
  dipole: [[0.0, 1.0], [1.0, 0.0]]
  couplings:
    - [[0.3, 1.0], [1.0, -0.3]]
  observable: {population: 1}
bath:
  spectral_density: {type: ohmic_exp, j0: 0.005, p: 1, omega_c: 1.0}
  beta: 10.0
  eps_mem: 1.0e-4
  t_max: 100.0
pulse:
  spectrum: {type: gaussian, omega0: 2.0, sigma: 0.5}
  z_over_c: 6.0
  field_scale: 0.01
  masks:
    - {name: flat, type: constant, phi0: 0.0}
    - {name: late, type: linear_delay, tau: 1.0}
engine:
  method: redfield_nonsecular
  dt: 0.01
  t_end: 20.0
initial: {kind: pure, level: 0}
oracle: {n_modes: 3, omega_max: 1.5, n_max: 4}
analysis:
  engines: [unitary, redfield_nonsecular]
  post_pulse: false
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("oppc_runner_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("exit codes by error class") {
    CHECK(exit_code(ErrorKind::ParseError) == 2);
    CHECK(exit_code(ErrorKind::ValidationError) == 2);
    CHECK(exit_code(ErrorKind::UnknownParameter) == 2);
    CHECK(exit_code(ErrorKind::DimensionGuard) == 4);
    CHECK(exit_code(ErrorKind::TruncationSuspect) == 4);
    CHECK(exit_code(ErrorKind::StepTooLarge) == 3);
    CHECK(exit_code(ErrorKind::KernelNotDecayed) == 3);
}

TEST_CASE("closed system with spectral masks shows no contrast") {
    const Scenario s = load_scenario(scenario_directory() / "closed_no_control.yaml");
    RunOptions o;
    o.write = false;
    const RunResult r = run_scenario(s, o);
    REQUIRE(r.engines.size() == 1);
    CHECK(r.engines[0].method == Method::Unitary);
    CHECK(r.engines[0].window.max_contrast() < 1e-9);
    CHECK(r.engines[0].full.final_contrast < 1e-9);
}

TEST_CASE("run writes data with sidecars and is reproducible") {
    const Scenario s = parse_scenario(kSmall);
    const auto a = scratch("a"), b = scratch("b");
    RunOptions o;
    o.out_dir = a;
    const RunResult ra = run_scenario(s, o);
    o.out_dir = b;
    o.jobs = 2;
    const RunResult rb = run_scenario(s, o);

    REQUIRE(ra.files.size() == rb.files.size());
    CHECK(ra.files.size() == 5); // csv + json per engine, report
    for (std::size_t k = 0; k < ra.files.size(); ++k) {
        INFO(ra.files[k].string());
        CHECK(fs::exists(ra.files[k]));
        auto meta = ra.files[k];
        meta += ".meta.json";
        CHECK(fs::exists(meta));
        CHECK(ra.files[k].filename() == rb.files[k].filename());
        CHECK(slurp(ra.files[k]) == slurp(rb.files[k]));
    }
    const Json meta = Json::parse(slurp(fs::path(ra.files[0]) += ".meta.json"));
    CHECK(meta.contains("code_version"));
    CHECK(meta.contains("parameters"));
    CHECK(meta.contains("tolerances"));

    CHECK(ra.engine(Method::RedfieldNonSecular).full.final_contrast > 10.0 * ra.engine(Method::Unitary).full.final_contrast);
    CHECK(ra.summary["engines"].size() == 2);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("sweep collects one point per value") {
    const Scenario s = parse_scenario(kSmall);
    RunOptions o;
    o.write = false;
    const SweepResult r = sweep(s, "field_scale", {0.01, 0.02}, o);
    REQUIRE(r.points.size() == 2);
    const double p1 = r.points[0].engine(Method::RedfieldNonSecular).peak;
    const double p2 = r.points[1].engine(Method::RedfieldNonSecular).peak;
    CHECK(p2 / p1 == doctest::Approx(4.0).epsilon(0.05));
    CHECK_THROWS_AS(sweep(s, "field_scale", {}, o), Error);
    CHECK_THROWS_AS(sweep(s, "volume", {1.0}, o), Error);
}

TEST_CASE("oracle comparison with vanishing coupling converges with the step") {
    Scenario s = parse_scenario(kSmall);
    set_parameter(s, "coupling_scale", 1e-8);
    s.method = Method::NonMarkovian;
    s.config.t_end = 8.0;
    RunOptions o;
    o.write = false;
    const OracleComparison coarse = oracle_compare(s, o);
    s.config.dt = 0.005;
    const OracleComparison fine = oracle_compare(s, o);
    CHECK(coarse.horizon > 0.0);
    CHECK(coarse.max_deviation < 1e-6);
    CHECK(coarse.max_deviation / fine.max_deviation == doctest::Approx(4.0).epsilon(0.15));
}
