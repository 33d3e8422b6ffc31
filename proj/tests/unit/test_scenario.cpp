#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oppc/scenario.hpp"

using namespace oppc;

namespace {

const char* kMinimal = R"(
name: minimal
system:
  energies: [0.0, 1.0]
  dipole: [[0.0, 1.0], [1.0, 0.0]]
  couplings:
    - [[0.2, [1.0, 0.5]], [[1.0, -0.5], -0.2]]
  observable: {population: 1}
bath:
  spectral_density: {type: drude, j0: 0.1, omega_d: 2.0}
  beta: 1.5
pulse:
  spectrum: {type: gaussian, omega0: 1.0, sigma: 0.1}
  field_scale: 0.01
  masks:
    - {name: flat, type: constant, phi0: 0.0}
    - {name: step, type: pi_step, omega_step: 1.0}
engine:
  method: redfield_nonsecular
  dt: 0.01
  t_end: 10.0
)";

Error parse_error(const std::string& text) {
    try {
        parse_scenario(text, "test.yaml");
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error");
    return Error(ErrorKind::InvalidArgument, "unreachable");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("yaml scenario parses into the model") {
    const Scenario s = parse_scenario(kMinimal);
    CHECK(s.name == "minimal");
    CHECK(s.system.dim() == 2);
    REQUIRE(s.system.couplings().size() == 1);
    CHECK(s.system.couplings()[0].op(0, 1) == cplx(1.0, 0.5));
    CHECK(s.system.observable()(1, 1) == cplx(1.0));
    REQUIRE(s.bath);
    CHECK(std::holds_alternative<spectral::Drude>(s.bath->density));
    CHECK(s.bath->beta == 1.5);
    CHECK(s.method == Method::RedfieldNonSecular);
    CHECK(s.config.t_end == 10.0);
    CHECK(s.masks.size() == 2);
    CHECK(s.spectrum.field_scale == 0.01);
    CHECK(s.initial.kind == StartKind::Thermal);
}

TEST_CASE("json and yaml forms are equivalent") {
    const std::string json = R"({
      "name": "minimal",
      "system": {"energies": [0, 1], "dipole": {"entries": [[0, 1, 1.0]]},
                 "couplings": [{"operator": [[0.2, [1.0, 0.5]], [[1.0, -0.5], -0.2]], "group": 0}],
                 "observable": {"population": 1}},
      "bath": {"spectral_density": {"type": "drude", "j0": 0.1, "omega_d": 2.0}, "beta": 1.5},
      "pulse": {"spectrum": {"type": "gaussian", "omega0": 1.0, "sigma": 0.1}, "field_scale": 0.01,
                "masks": [{"name": "flat", "type": "constant", "phi0": 0.0},
                          {"name": "step", "type": "pi_step", "omega_step": 1.0}]},
      "engine": {"method": "redfield_nonsecular", "dt": 0.01, "t_end": 10.0}
    })";
    const Scenario a = parse_scenario(kMinimal), b = parse_scenario(json);
    CHECK((a.system.dipole() - b.system.dipole()).norm() == 0.0);
    CHECK((a.system.couplings()[0].op - b.system.couplings()[0].op).norm() == 0.0);
    const PulseSpectrum sa = build_spectrum(a.spectrum), sb = build_spectrum(b.spectrum);
    CHECK((sa.amplitude - sb.amplitude).norm() == 0.0);
}

TEST_CASE("syntax errors carry line and column") {
    const Error e = parse_error("name: x\nsystem:\n  energies: [0.0, 1.0\n  dipole: 3\n");
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("test.yaml:") != std::string::npos);

    const Error j = parse_error("{\n  \"name\": \"x\",\n  \"system\": [1, 2,\n}");
    CHECK(j.kind() == ErrorKind::ParseError);
    CHECK(std::string(j.what()).find("test.yaml:4:") != std::string::npos);
}

TEST_CASE("validation errors name the field") {
    auto check = [](const std::string& text, const std::string& field) {
        const Error e = parse_error(text);
        CHECK(e.kind() == ErrorKind::ValidationError);
        INFO(e.what());
        CHECK(std::string(e.what()).find(field) != std::string::npos);
    };
    std::string no_bath = kMinimal;
    no_bath.erase(no_bath.find("bath:"), no_bath.find("pulse:") - no_bath.find("bath:"));
    check(no_bath, "bath");
    check(replace(kMinimal, "beta: 1.5", "beta: -1.0"), "bath.beta");
    check(replace(kMinimal, "t_end: 10.0", "t_end: 10.0\n  stepsize: 3"), "engine.stepsize");
    check(replace(kMinimal, "type: pi_step", "type: sawtooth"), "pulse.masks[1].type");
    check(replace(kMinimal, "method: redfield_nonsecular", "method: lindblad"), "engine.method");
    check(replace(kMinimal, "{population: 1}", "{population: 4}"), "system.observable.population");
    check(replace(kMinimal, "name: step", "name: flat"), "pulse.masks[1].name");
    check(replace(kMinimal, "dipole: [[0.0, 1.0], [1.0, 0.0]]", "dipole: [[0.0, 1.0], [2.0, 0.0]]"), "system");
    check(replace(kMinimal, "dt: 0.01", "dt: fast"), "engine.dt");
}

TEST_CASE("cross-block requirements") {
    const Error e = parse_error(replace(kMinimal, "engine:", "initial: {kind: correlated}\nengine:"));
    CHECK(std::string(e.what()).find("oracle") != std::string::npos);
    const Error s = parse_error(std::string(kMinimal) + "analysis:\n  sweep: {parameter: field_scale, values: []}\n");
    CHECK(std::string(s.what()).find("analysis.sweep.values") != std::string::npos);
}

TEST_CASE("sweepable parameters") {
    Scenario s = parse_scenario(kMinimal);
    set_parameter(s, "field_scale", 0.5);
    CHECK(s.spectrum.field_scale == 0.5);
    set_parameter(s, "coupling_scale", 0.25);
    CHECK(s.bath->coupling_scale == 0.25);
    set_parameter(s, "beta", 3.0);
    CHECK(s.bath->beta == 3.0);
    set_parameter(s, "mask.step.omega_step", 1.1);
    CHECK(std::get<mask::PiStep>(s.masks[1].mask).omega_step == 1.1);
    auto kind_of = [&](const std::string& name) {
        try {
            set_parameter(s, name, 1.0);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    CHECK(kind_of("omega_c") == ErrorKind::ValidationError); // drude bath has no omega_c
    CHECK(kind_of("temperature") == ErrorKind::UnknownParameter);
    CHECK_THROWS_AS(set_parameter(s, "mask.nope.phi0", 1.0), Error);
}

TEST_CASE("multi-line spectra and tabulated masks") {
    const std::string text = replace(
        replace(kMinimal, "spectrum: {type: gaussian, omega0: 1.0, sigma: 0.1}",
                "spectrum:\n    type: multi_gaussian\n    d_omega: 0.01\n    lines:\n      - {omega0: 1.0, sigma: 0.1}\n      - {omega0: 2.0, sigma: 0.1, area: 2.0}"),
        "{name: step, type: pi_step, omega_step: 1.0}", "{name: ramp, type: tabulated, omega: [1.0, 2.0], phase: [0.0, 1.0]}");
    const Scenario s = parse_scenario(text);
    const PulseSpectrum sp = build_spectrum(s.spectrum);
    CHECK(sp.d_omega() == doctest::Approx(0.01));
    const double norm = 1.0 / (0.1 * std::sqrt(2.0 * M_PI));
    CHECK(std::abs(spectral_value(sp, 1.0)) == doctest::Approx(norm).epsilon(1e-6));
    CHECK(std::abs(spectral_value(sp, 2.0)) == doctest::Approx(2.0 * norm).epsilon(1e-6));

    const RealVector phase = evaluate_mask(resolve_mask(s.masks[1], sp), sp.omega);
    for (Eigen::Index k = 0; k < sp.omega.size(); ++k) {
        const double w = sp.omega[k];
        const double expect = w <= 1.0 ? 0.0 : (w >= 2.0 ? 1.0 : w - 1.0);
        CHECK(phase[k] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("shipped scenarios all validate") {
    const auto files = shipped_scenarios();
    CHECK(files.size() >= 8);
    for (const auto& f : files) {
        INFO(f.string());
        CHECK_NOTHROW(load_scenario(f));
    }
}
