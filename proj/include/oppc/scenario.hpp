// scenario.hpp - Scenario configuration: grammar, parsing and validation
//
// Accepted forms: YAML (human-editable) and JSON (canonical). Both map onto
// the same tree; see README for the grammar.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oppc/bath.hpp"
#include "oppc/laser.hpp"
#include "oppc/trajectory.hpp"

namespace oppc {

struct MaskSpec {
    std::string name;
    PhaseMask mask;
    // tabulated masks: knots interpolated onto the spectrum grid by resolve_mask
    RealVector knot_omega;
    RealVector knot_phase;
};

struct BathSpec {
    SpectralDensity density;
    double beta{1.0};
    double coupling_scale{1.0};
    double eps_mem{1e-6};
    double t_max{200.0}; // correlation table span before truncation
};

struct OracleSpec {
    int n_modes{3};
    double omega_max{4.0};
    int n_max{4};
};

enum class StartKind { Thermal, Pure, Correlated };

struct InitialSpec {
    StartKind kind{StartKind::Thermal};
    int level{0};
};

struct SpectrumLine {
    double omega0{1.0};
    double sigma{0.1};
    double area{1.0};
};

struct SpectrumSpec {
    std::vector<SpectrumLine> lines; // gaussian / multi_gaussian
    RealVector omega;                // tabulated
    RealVector amplitude;
    RealVector phase;
    double d_omega{0.005};
    double span{8.0}; // grid reaches omega0 +- span * sigma
    double z_over_c{0.0};
    double field_scale{1.0};
};

struct AnalysisSpec {
    std::vector<Method> engines; // empty: the engine block's method
    bool onset{false};
    bool post_pulse{true};       // contrast metrics on t >= pulse_end
    bool scaling{false};
    std::string sweep_parameter;
    std::vector<double> sweep_values;
    double pulse_tail{1e-12};
};

struct OutputSpec {
    std::string dir{"out"};
    std::vector<std::string> formats{"csv", "json"};
};

struct Scenario {
    std::string name;
    std::filesystem::path source;
    SystemModel system;
    std::optional<BathSpec> bath;
    SpectrumSpec spectrum;
    std::vector<MaskSpec> masks;
    Method method{Method::Unitary};
    PropagatorConfig config;
    InitialSpec initial;
    std::optional<OracleSpec> oracle;
    AnalysisSpec analysis;
    OutputSpec output;
};

// Parses text in either form; `origin` names the source in error messages.
// ParseError carries line and column; ValidationError names the field.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

// Cross-block checks (masks present, bath for open engines, oracle for
// correlated starts). Called by the parsers.
void validate(const Scenario& scenario);

// Spectrum built from the pulse block, zero phase.
PulseSpectrum build_spectrum(const SpectrumSpec& spec);

// The mask on the grid of `spectrum` (tabulated knots interpolated linearly,
// held constant beyond the end knots).
PhaseMask resolve_mask(const MaskSpec& spec, const PulseSpectrum& spectrum);

// Applies a sweepable parameter: field_scale, coupling_scale, omega_c, beta,
// or mask.<name>.<field>. UnknownParameter otherwise.
void set_parameter(Scenario& scenario, const std::string& parameter, double value);

// Directory of shipped scenarios and the files in it.
std::filesystem::path scenario_directory();
std::vector<std::filesystem::path> shipped_scenarios();

} // namespace oppc
