// analysis.hpp - Phase-contrast metrics, scaling fits and onset classification

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oppc/laser.hpp"
#include "oppc/propagators.hpp"

namespace oppc {

struct ContrastReport {
    std::vector<std::string> masks;
    RealVector t;
    std::vector<RealVector> observables; // <O>(t) per mask
    RealVector contrast;                 // max - min over masks, pointwise
    double final_contrast{0.0};
    double threshold{0.0};
    std::optional<double> onset_time;    // first t with contrast > threshold

    // Largest contrast over t >= t_from.
    double max_contrast(double t_from = -1e300) const;
};

// Pointwise max - min over series sharing the grid t.
ContrastReport contrast_from_series(const RealVector& t, const std::vector<RealVector>& series,
                                    std::vector<std::string> labels, double threshold);

void set_threshold(ContrastReport& report, double threshold);

// Report restricted to t >= t_from (the window where populations are field free).
ContrastReport restrict_to(const ContrastReport& report, double t_from);

inline constexpr double kIntegratorFloor = 1e-12;

// Unitary-engine contrast of a scenario, bounded below by the integrator floor.
double noise_floor(const ContrastReport& unitary_report);

// max(10 * floor, fraction * peak contrast of the report).
double onset_threshold(const ContrastReport& report, double floor, double fraction = 0.5);

using SpectrumRunner = std::function<Trajectory(const PulseSpectrum&)>;

// One propagation per spectrum (up to `jobs` at once); MaskAmplitudeMismatch
// unless all |eps(w)| agree.
ContrastReport phase_contrast(const std::vector<PulseSpectrum>& spectra, std::vector<std::string> labels,
                              const SpectrumRunner& run, double threshold = 0.0, int jobs = 1);

ContrastReport phase_contrast(const PulseSpectrum& base, const std::vector<PhaseMask>& masks,
                              const SpectrumRunner& run, double threshold = 0.0, int jobs = 1);

struct ExponentFit {
    double exponent{0.0};
    double intercept{0.0};
    double residual{0.0}; // rms of log-space residuals
};

// Least-squares slope of log(value) against log(parameter). Needs >= 4 points;
// ContrastBelowNoiseFloor if any value is below 10 * noise_floor.
ExponentFit scaling_exponent(const std::vector<double>& parameters, const std::vector<double>& values,
                             double noise_floor);

enum class Mechanism { LaserTimescale, BathTimescale, None };

std::string to_string(Mechanism m);

Mechanism onset_classifier(const ContrastReport& report, double pulse_end, double bath_relax);

// Time by which all but `tail` of the field energy int E^2 dt has arrived,
// sampled on [t0, t1] with step h.
double pulse_end(const PulseSpectrum& spectrum, double t0, double t1, double h, double tail = 1e-8);

// 1 / slowest decay rate among the non-oscillating modes of the field-free
// generator (population relaxation).
double relaxation_time(const SystemModel& system, const Engine& engine);

} // namespace oppc
