// laser.cpp - Spectrum construction, phase masks and trapezoidal field synthesis

#include "oppc/laser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace oppc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_grid(const PulseSpectrum& s) {
    const auto n = s.omega.size();
    require(n >= 2, ErrorKind::InvalidArgument, "spectrum needs at least two frequency points");
    require(s.amplitude.size() == n && s.phase.size() == n, ErrorKind::DimensionMismatch,
            "amplitude/phase length differs from omega grid");
    require(s.omega[0] > 0.0, ErrorKind::InvalidArgument, "spectrum grid must be strictly positive");
    const double dw = s.omega[1] - s.omega[0];
    require(dw > 0.0, ErrorKind::InvalidArgument, "omega grid must be increasing");
    for (Eigen::Index k = 1; k < n; ++k)
        require(std::abs((s.omega[k] - s.omega[k - 1]) - dw) <= 1e-9 * std::max(1.0, std::abs(s.omega[k])),
                ErrorKind::InvalidArgument, "omega grid must be uniform");
    require((s.amplitude.array() >= 0.0).all(), ErrorKind::InvalidArgument, "amplitude must be non-negative");
    require(s.field_scale >= 0.0, ErrorKind::InvalidArgument, "field_scale must be >= 0");
}

} // namespace

double PulseSpectrum::d_omega() const { return omega[1] - omega[0]; }

double PulseSpectrum::power() const { return amplitude.squaredNorm(); }

RealVector uniform_grid(double lo, double hi, int points) {
    require(points >= 2 && hi > lo, ErrorKind::InvalidArgument, "uniform_grid needs hi > lo and >= 2 points");
    RealVector g(points);
    const double h = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) g[k] = lo + k * h;
    return g;
}

PulseSpectrum gaussian_spectrum(double omega0, double sigma, double area, const RealVector& omega,
                                double z_over_c, double field_scale) {
    require(sigma > 0.0, ErrorKind::InvalidArgument, "gaussian sigma must be positive");
    PulseSpectrum s;
    s.omega = omega;
    s.amplitude = RealVector(omega.size());
    const double norm = area / (sigma * std::sqrt(2.0 * kPi));
    for (Eigen::Index k = 0; k < omega.size(); ++k) {
        const double x = (omega[k] - omega0) / sigma;
        s.amplitude[k] = norm * std::exp(-0.5 * x * x);
    }
    s.phase = RealVector::Zero(omega.size());
    s.z_over_c = z_over_c;
    s.field_scale = field_scale;
    check_grid(s);
    return s;
}

PulseSpectrum tabulated_spectrum(RealVector omega, RealVector amplitude, RealVector phase,
                                 double z_over_c, double field_scale) {
    PulseSpectrum s{std::move(omega), std::move(amplitude), std::move(phase), z_over_c, field_scale};
    check_grid(s);
    return s;
}

std::string describe(const PhaseMask& m) {
    std::ostringstream os;
    os.precision(17);
    struct Visitor {
        std::ostringstream& os;
        void operator()(const mask::Constant& c) { os << "constant(" << c.phi0 << ")"; }
        void operator()(const mask::LinearDelay& d) { os << "linear_delay(" << d.tau << ")"; }
        void operator()(const mask::Chirp& c) { os << "chirp(" << c.phi2 << "," << c.omega_ref << ")"; }
        void operator()(const mask::PiStep& p) { os << "pi_step(" << p.omega_step << ")"; }
        void operator()(const mask::Tabulated& t) { os << "tabulated(" << t.values.size() << ")"; }
    };
    std::visit(Visitor{os}, m);
    return os.str();
}

RealVector evaluate_mask(const PhaseMask& m, const RealVector& omega) {
    RealVector phi(omega.size());
    struct Visitor {
        const RealVector& w;
        RealVector& phi;
        void operator()(const mask::Constant& c) { phi.setConstant(c.phi0); }
        void operator()(const mask::LinearDelay& d) { phi = w * d.tau; }
        void operator()(const mask::Chirp& c) {
            phi = 0.5 * c.phi2 * (w.array() - c.omega_ref).square();
        }
        void operator()(const mask::PiStep& p) {
            for (Eigen::Index k = 0; k < w.size(); ++k) phi[k] = (w[k] >= p.omega_step) ? kPi : 0.0;
        }
        void operator()(const mask::Tabulated& t) {
            require(t.values.size() == w.size(), ErrorKind::DimensionMismatch,
                    "tabulated mask length differs from omega grid");
            phi = t.values;
        }
    };
    std::visit(Visitor{omega, phi}, m);
    require(phi.allFinite(), ErrorKind::NonFinitePhase, "mask " + describe(m) + " is not finite on the grid");
    return phi;
}

PulseSpectrum apply_mask(const PulseSpectrum& spectrum, const PhaseMask& m) {
    PulseSpectrum out = spectrum;
    out.phase = evaluate_mask(m, spectrum.omega);
    return out;
}

cplx spectral_value(const PulseSpectrum& spectrum, double omega) {
    const double w = std::abs(omega);
    const double lo = spectrum.omega[0];
    const double hi = spectrum.omega[spectrum.omega.size() - 1];
    const double dw = spectrum.d_omega();
    require(w >= lo - 1e-12 * dw && w <= hi + 1e-12 * dw, ErrorKind::FrequencyOffGrid,
            "frequency " + std::to_string(omega) + " outside the spectrum grid");
    const double x = std::clamp((w - lo) / dw, 0.0, static_cast<double>(spectrum.omega.size() - 1));
    const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(x)), spectrum.omega.size() - 2);
    const double f = x - static_cast<double>(k);
    const cplx e0 = std::polar(spectrum.amplitude[k], spectrum.phase[k]);
    const cplx e1 = std::polar(spectrum.amplitude[k + 1], spectrum.phase[k + 1]);
    const cplx value = (f <= 1e-12) ? e0 : (f >= 1.0 - 1e-12) ? e1 : (1.0 - f) * e0 + f * e1;
    return omega < 0.0 ? std::conj(value) : value;
}

std::pair<double, double> synthesis_window(const PulseSpectrum& spectrum) {
    const double half = kPi / spectrum.d_omega();
    return {spectrum.z_over_c - half, spectrum.z_over_c + half};
}

RealVector synthesize_time_field(const PulseSpectrum& spectrum, const RealVector& t) {
    check_grid(spectrum);
    RealVector field = RealVector::Zero(t.size());
    if (t.size() == 0) return field;
    const double dw = spectrum.d_omega();
    const double span = t.maxCoeff() - t.minCoeff();
    require(2.0 * kPi / dw >= span * (1.0 - 1e-12), ErrorKind::GridTooCoarse,
            "2 pi / d_omega is shorter than the requested time span");

    const auto nw = spectrum.omega.size();
    Vector weighted(nw);
    for (Eigen::Index k = 0; k < nw; ++k) {
        const double w = (k == 0 || k == nw - 1) ? 0.5 * dw : dw;
        weighted[k] = w * std::polar(spectrum.amplitude[k], spectrum.phase[k]);
    }

    const bool uniform = [&] {
        if (t.size() < 3) return false;
        const double h = t[1] - t[0];
        for (Eigen::Index j = 2; j < t.size(); ++j)
            if (std::abs((t[j] - t[j - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) return false;
        return true;
    }();

    // Phasor recurrence on uniform grids, resynchronized every block.
    constexpr Eigen::Index kBlock = 64;
    for (Eigen::Index k = 0; k < nw; ++k) {
        const double w = spectrum.omega[k];
        if (weighted[k] == cplx(0.0)) continue;
        if (uniform) {
            const cplx step = std::polar(1.0, -w * (t[1] - t[0]));
            cplx z;
            for (Eigen::Index j = 0; j < t.size(); ++j) {
                if (j % kBlock == 0) z = std::polar(1.0, -w * (t[j] - spectrum.z_over_c));
                field[j] += 2.0 * (weighted[k] * z).real();
                z *= step;
            }
        } else {
            for (Eigen::Index j = 0; j < t.size(); ++j)
                field[j] += 2.0 * (weighted[k] * std::polar(1.0, -w * (t[j] - spectrum.z_over_c))).real();
        }
    }
    return field;
}

double field_at(const PulseSpectrum& spectrum, double t) {
    const auto [lo, hi] = synthesis_window(spectrum);
    require(t >= lo && t <= hi, ErrorKind::OutOfWindow, "t = " + std::to_string(t) + " outside the synthesis window");
    RealVector one(1);
    one[0] = t;
    return synthesize_time_field(spectrum, one)[0];
}

RealVector scaled_field_samples(const PulseSpectrum& spectrum, double t0, double h, Eigen::Index count) {
    RealVector t(count);
    for (Eigen::Index k = 0; k < count; ++k) t[k] = t0 + h * static_cast<double>(k);
    if (count == 0) return t;
    const auto [lo, hi] = synthesis_window(spectrum);
    const double tol = 1e-9 * std::max(1.0, std::abs(hi));
    require(t[0] >= lo - tol && t[count - 1] <= hi + tol, ErrorKind::OutOfWindow,
            "propagation window leaves the field synthesis window");
    if (spectrum.field_scale == 0.0) return RealVector::Zero(count);
    return spectrum.field_scale * synthesize_time_field(spectrum, t);
}

Matrix interaction_matrix(const SystemModel& system, const PulseSpectrum& spectrum, double t) {
    if (spectrum.field_scale == 0.0) {
        const auto [lo, hi] = synthesis_window(spectrum);
        require(t >= lo && t <= hi, ErrorKind::OutOfWindow, "t outside the synthesis window");
        return Matrix::Zero(system.dim(), system.dim());
    }
    return (spectrum.field_scale * field_at(spectrum, t)) * system.dipole();
}

} // namespace oppc
