// laser.hpp - Shaped weak pulse: spectrum, phase masks, time-domain field and H^MR(t)

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "oppc/system.hpp"

namespace oppc {

// One-sided spectrum on a uniform grid of positive angular frequencies. The
// negative-frequency half is implied by eps(-w) = conj(eps(w)).
struct PulseSpectrum {
    RealVector omega;
    RealVector amplitude; // |eps(w)| >= 0
    RealVector phase;     // phi(w), radians
    double z_over_c{0.0};
    double field_scale{1.0};

    double d_omega() const;
    double power() const; // sum_k |eps_k|^2
};

RealVector uniform_grid(double lo, double hi, int points);

// |eps(w)| = area / (sigma sqrt(2 pi)) exp(-(w - w0)^2 / (2 sigma^2)), zero phase.
PulseSpectrum gaussian_spectrum(double omega0, double sigma, double area, const RealVector& omega,
                                double z_over_c = 0.0, double field_scale = 1.0);

PulseSpectrum tabulated_spectrum(RealVector omega, RealVector amplitude, RealVector phase,
                                 double z_over_c = 0.0, double field_scale = 1.0);

namespace mask {
struct Constant { double phi0{0.0}; };
struct LinearDelay { double tau{0.0}; };                      // phi = w tau
struct Chirp { double phi2{0.0}; double omega_ref{0.0}; };    // phi = phi2 (w - w_ref)^2 / 2
struct PiStep { double omega_step{0.0}; };                    // 0 below, pi at/above
struct Tabulated { RealVector values; };
} // namespace mask

using PhaseMask = std::variant<mask::Constant, mask::LinearDelay, mask::Chirp, mask::PiStep, mask::Tabulated>;

std::string describe(const PhaseMask& m);

// Mask evaluated on the grid; Tabulated must match the grid length.
RealVector evaluate_mask(const PhaseMask& m, const RealVector& omega);

// Replaces (does not add to) the spectral phase; amplitude is untouched.
PulseSpectrum apply_mask(const PulseSpectrum& spectrum, const PhaseMask& m);

// Complex eps(w) for any real w using the Hermitian extension; linear
// interpolation inside the grid, FrequencyOffGrid outside it.
cplx spectral_value(const PulseSpectrum& spectrum, double omega);

// [z/c - pi/dw, z/c + pi/dw]: one period of the quadrature-synthesized field.
std::pair<double, double> synthesis_window(const PulseSpectrum& spectrum);

// E(z,t) = int dw eps(w) exp(-i w (t - z/c)) by trapezoidal quadrature over the
// Hermitian-extended spectrum. Excludes field_scale.
RealVector synthesize_time_field(const PulseSpectrum& spectrum, const RealVector& t);

double field_at(const PulseSpectrum& spectrum, double t);

// field_scale * E(z, t0 + k h) for k = 0..count-1; zeros without touching the
// quadrature when field_scale = 0. OutOfWindow if the span leaves synthesis_window.
RealVector scaled_field_samples(const PulseSpectrum& spectrum, double t0, double h, Eigen::Index count);

// field_scale * d * E(z,t).
Matrix interaction_matrix(const SystemModel& system, const PulseSpectrum& spectrum, double t);

} // namespace oppc
