// runner.hpp - Scenario execution: run, sweep and oracle comparison

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oppc/analysis.hpp"
#include "oppc/io.hpp"
#include "oppc/scenario.hpp"

namespace oppc {

struct RunOptions {
    std::filesystem::path out_dir; // empty: scenario output.dir
    int jobs{1};
    std::vector<std::string> formats; // empty: scenario output.formats
    bool write{true};
};

// Everything a propagation needs, derived once from a scenario.
struct Physics {
    SystemModel system; // coupling-scaled
    PulseSpectrum spectrum;
    std::vector<PulseSpectrum> spectra; // one per mask
    std::vector<std::string> labels;
    Matrix rho0;
    std::optional<Matrix> inhomogeneity;
    std::shared_ptr<const MemoryKernel> kernel;
    std::shared_ptr<const RateTensor> rates;
    double pulse_end{0.0};
};

// Builds bath tables only for the engines in `methods`.
Physics prepare(const Scenario& scenario, const std::vector<Method>& methods);

// Engines requested by the analysis block (or the engine block's method).
std::vector<Method> requested_engines(const Scenario& scenario);

Engine engine_for(const Physics& physics, Method method);

// One propagation with the scenario's config (perturbative cascade when requested).
Trajectory propagate_scenario(const Scenario& scenario, const Physics& physics, Method method,
                              const PulseSpectrum& spectrum, const Matrix& rho0, const Matrix* inhomogeneity);

ContrastReport scenario_contrast(const Scenario& scenario, const Physics& physics, Method method, int jobs,
                                 const Matrix* rho0 = nullptr, bool with_inhomogeneity = true);

struct EngineResult {
    Method method{Method::Unitary};
    ContrastReport full;
    ContrastReport window; // t >= pulse_end when post_pulse, else the full report
    double peak{0.0};
    double relaxation_time{0.0};
    std::optional<Mechanism> mechanism;
};

struct RunResult {
    std::string name;
    double pulse_end{0.0};
    double noise_floor{0.0};
    std::vector<EngineResult> engines;
    Json summary;
    std::vector<std::filesystem::path> files;

    const EngineResult& engine(Method m) const;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

struct SweepResult {
    std::string parameter;
    std::vector<double> values;
    std::vector<RunResult> points;
    std::optional<ExponentFit> fit;                 // of the engine block method's peak contrast
    std::vector<double> markov_deviation;           // when NonMarkovian and a Redfield engine both run
    Json summary;
    std::vector<std::filesystem::path> files;
};

SweepResult sweep(const Scenario& scenario, const std::string& parameter, const std::vector<double>& values,
                  const RunOptions& options = {});

struct OracleComparison {
    Method method{Method::NonMarkovian};
    double horizon{0.0};
    double max_deviation{0.0};
    Trajectory exact;
    Trajectory reduced;
    Json summary;
    std::vector<std::filesystem::path> files;
};

// Exact composite versus the scenario's reduced engine on the oracle's modes.
OracleComparison oracle_compare(const Scenario& scenario, const RunOptions& options = {});

// 0 success, 2 validation, 3 engine failure, 4 guard violation.
int exit_code(ErrorKind kind);

} // namespace oppc
