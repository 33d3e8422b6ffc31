// analysis.cpp - Phase-contrast metrics, scaling fits and onset classification

#include "oppc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <Eigen/Eigenvalues>

namespace oppc {

double ContrastReport::max_contrast(double t_from) const {
    double m = 0.0;
    for (Eigen::Index k = 0; k < t.size(); ++k)
        if (t[k] >= t_from - 1e-12) m = std::max(m, contrast[k]);
    return m;
}

void set_threshold(ContrastReport& report, double threshold) {
    report.threshold = threshold;
    report.onset_time.reset();
    for (Eigen::Index k = 0; k < report.t.size(); ++k)
        if (report.contrast[k] > threshold) {
            report.onset_time = report.t[k];
            break;
        }
}

ContrastReport restrict_to(const ContrastReport& report, double t_from) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < report.t.size(); ++k)
        if (report.t[k] >= t_from - 1e-12) keep.push_back(k);
    const auto n = static_cast<Eigen::Index>(keep.size());
    ContrastReport r;
    r.masks = report.masks;
    r.t = RealVector(n);
    r.contrast = RealVector(n);
    for (const auto& o : report.observables) {
        RealVector v(n);
        for (Eigen::Index k = 0; k < n; ++k) v[k] = o[keep[static_cast<std::size_t>(k)]];
        r.observables.push_back(v);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        r.t[k] = report.t[keep[static_cast<std::size_t>(k)]];
        r.contrast[k] = report.contrast[keep[static_cast<std::size_t>(k)]];
    }
    r.final_contrast = report.final_contrast;
    set_threshold(r, report.threshold);
    return r;
}

double noise_floor(const ContrastReport& unitary_report) {
    return std::max(unitary_report.max_contrast(), kIntegratorFloor);
}

double onset_threshold(const ContrastReport& report, double floor, double fraction) {
    return std::max(10.0 * floor, fraction * report.max_contrast());
}

ContrastReport contrast_from_series(const RealVector& t, const std::vector<RealVector>& series,
                                    std::vector<std::string> labels, double threshold) {
    require(!series.empty(), ErrorKind::InvalidArgument, "contrast needs at least one series");
    for (const auto& s : series)
        require(s.size() == t.size(), ErrorKind::DimensionMismatch, "series length differs from the time grid");
    ContrastReport r;
    r.masks = std::move(labels);
    r.t = t;
    r.observables = series;
    r.contrast = RealVector(t.size());
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        double lo = series[0][k], hi = series[0][k];
        for (const auto& s : series) {
            lo = std::min(lo, s[k]);
            hi = std::max(hi, s[k]);
        }
        r.contrast[k] = hi - lo;
    }
    r.final_contrast = t.size() ? r.contrast[t.size() - 1] : 0.0;
    set_threshold(r, threshold);
    return r;
}

ContrastReport phase_contrast(const std::vector<PulseSpectrum>& spectra, std::vector<std::string> labels,
                              const SpectrumRunner& run, double threshold, int jobs) {
    require(spectra.size() >= 2, ErrorKind::InvalidArgument, "phase contrast needs at least two masks");
    require(labels.size() == spectra.size(), ErrorKind::InvalidArgument, "one label per spectrum");
    const auto& ref = spectra.front();
    for (const auto& s : spectra) {
        bool same = s.omega.size() == ref.omega.size() && s.amplitude.size() == ref.amplitude.size();
        if (same) {
            const double scale = std::max(ref.amplitude.cwiseAbs().maxCoeff(), 1e-300);
            same = (s.omega - ref.omega).cwiseAbs().maxCoeff() <= 1e-12 * ref.omega.cwiseAbs().maxCoeff() &&
                   (s.amplitude - ref.amplitude).cwiseAbs().maxCoeff() <= 1e-12 * scale &&
                   s.field_scale == ref.field_scale && s.z_over_c == ref.z_over_c;
        }
        require(same, ErrorKind::MaskAmplitudeMismatch, "all masks must share one amplitude spectrum");
    }

    std::vector<Trajectory> results(spectra.size());
    std::vector<std::exception_ptr> errors(spectra.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < spectra.size(); i = next++) {
            try {
                results[i] = run(spectra[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto n_threads = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(spectra.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<RealVector> series;
    for (const auto& r : results) series.push_back(r.observable);
    return contrast_from_series(results.front().t, series, std::move(labels), threshold);
}

ContrastReport phase_contrast(const PulseSpectrum& base, const std::vector<PhaseMask>& masks,
                              const SpectrumRunner& run, double threshold, int jobs) {
    std::vector<PulseSpectrum> spectra;
    std::vector<std::string> labels;
    for (const auto& m : masks) {
        spectra.push_back(apply_mask(base, m));
        labels.push_back(describe(m));
    }
    return phase_contrast(spectra, std::move(labels), run, threshold, jobs);
}

ExponentFit scaling_exponent(const std::vector<double>& parameters, const std::vector<double>& values,
                             double noise_floor) {
    require(parameters.size() == values.size(), ErrorKind::InvalidArgument, "one value per ladder point");
    require(parameters.size() >= 4, ErrorKind::ValidationError, "scaling ladder needs at least 4 points");
    for (std::size_t k = 0; k < values.size(); ++k) {
        require(parameters[k] > 0.0, ErrorKind::ValidationError, "ladder parameters must be positive");
        require(values[k] >= 10.0 * noise_floor && values[k] > 0.0, ErrorKind::ContrastBelowNoiseFloor,
                "ladder point " + std::to_string(k) + " has contrast " + std::to_string(values[k]) +
                    " below 10x the noise floor");
    }
    const auto n = static_cast<double>(values.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double x = std::log(parameters[k]), y = std::log(values[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    require(denom > 0.0, ErrorKind::ValidationError, "ladder parameters must not all coincide");
    ExponentFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.exponent * sx) / n;
    double ss = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double r = std::log(values[k]) - fit.intercept - fit.exponent * std::log(parameters[k]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

std::string to_string(Mechanism m) {
    switch (m) {
        case Mechanism::LaserTimescale: return "LaserTimescale";
        case Mechanism::BathTimescale: return "BathTimescale";
        case Mechanism::None: return "None";
    }
    return "None";
}

Mechanism onset_classifier(const ContrastReport& report, double pulse_end, double bath_relax) {
    if (!report.onset_time) return Mechanism::None;
    const double t = *report.onset_time;
    if (t <= pulse_end) return Mechanism::LaserTimescale;
    if (t <= pulse_end + 5.0 * bath_relax) return Mechanism::BathTimescale;
    return Mechanism::None;
}

double pulse_end(const PulseSpectrum& spectrum, double t0, double t1, double h, double tail) {
    require(t1 > t0 && h > 0.0, ErrorKind::InvalidArgument, "need t1 > t0 and h > 0");
    const auto count = static_cast<Eigen::Index>(std::floor((t1 - t0) / h)) + 1;
    RealVector t(count);
    for (Eigen::Index k = 0; k < count; ++k) t[k] = t0 + h * static_cast<double>(k);
    const RealVector e = synthesize_time_field(spectrum, t);
    const RealVector energy = e.array().square();
    const double total = energy.sum();
    if (total == 0.0) return t0;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < count; ++k) {
        acc += energy[k];
        if (acc >= (1.0 - tail) * total) return t[k];
    }
    return t[count - 1];
}

double relaxation_time(const SystemModel& system, const Engine& engine) {
    const Matrix g = field_free_generator(system, engine);
    Eigen::ComplexEigenSolver<Matrix> eig(g, false);
    const auto& lam = eig.eigenvalues();
    const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1.0);
    double slowest = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        if (std::abs(lam[k].imag()) > 1e-9 * scale) continue;
        const double re = std::abs(lam[k].real());
        if (re > 1e-12 * scale) slowest = std::min(slowest, re);
    }
    return std::isinf(slowest) ? slowest : 1.0 / slowest;
}

} // namespace oppc
