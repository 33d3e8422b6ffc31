#include <doctest.h>

#include "support.hpp"

using namespace oppc;

namespace {

PulseSpectrum line(double w0 = 5.0, double sigma = 0.4, double zc = 0.0, double dw = 0.01) {
    const int n = static_cast<int>(std::round(16.0 * sigma / dw)) + 1;
    return gaussian_spectrum(w0, sigma, 1.0, uniform_grid(w0 - 8.0 * sigma, w0 + 8.0 * sigma, n), zc);
}

RealVector grid(double t0, double h, int n) {
    RealVector t(n);
    for (int k = 0; k < n; ++k) t[k] = t0 + h * k;
    return t;
}

} // namespace

TEST_CASE("masks replace the phase and leave the amplitude untouched") {
    const PulseSpectrum s = line();
    const PulseSpectrum zero = apply_mask(s, mask::Constant{0.0});
    CHECK(zero.phase.cwiseAbs().maxCoeff() == 0.0);

    const PulseSpectrum d = apply_mask(apply_mask(s, mask::Constant{2.0}), mask::LinearDelay{1.5});
    for (Eigen::Index k = 0; k < s.omega.size(); ++k) CHECK(d.phase[k] == s.omega[k] * 1.5);

    const PulseSpectrum st = apply_mask(s, mask::PiStep{5.0});
    for (Eigen::Index k = 0; k < s.omega.size(); ++k) CHECK(st.phase[k] == (s.omega[k] >= 5.0 ? M_PI : 0.0));

    const PulseSpectrum ch = apply_mask(s, mask::Chirp{3.0, 5.0});
    for (Eigen::Index k = 0; k < s.omega.size(); ++k)
        CHECK(ch.phase[k] == doctest::Approx(1.5 * std::pow(s.omega[k] - 5.0, 2)));

    for (const PulseSpectrum* m : {&zero, &d, &st, &ch}) CHECK(m->power() == s.power());
}

TEST_CASE("non-finite and mis-sized masks are rejected") {
    const PulseSpectrum s = line();
    RealVector v = RealVector::Zero(s.omega.size());
    v[3] = std::nan("");
    try {
        apply_mask(s, mask::Tabulated{v});
        FAIL("expected NonFinitePhase");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::NonFinitePhase);
    }
    CHECK_THROWS_AS(apply_mask(s, mask::Tabulated{RealVector::Zero(3)}), Error);
}

TEST_CASE("gaussian spectrum synthesizes the analytic carrier pulse") {
    // E(t) = 2 A cos(w0 t) exp(-sigma^2 t^2 / 2) for a line far from zero frequency
    const double w0 = 5.0, sigma = 0.4, zc = 3.0;
    const PulseSpectrum s = line(w0, sigma, zc, 0.005);
    const RealVector t = grid(-10.0, 0.01, 2601);
    const RealVector e = synthesize_time_field(s, t);
    double err = 0.0;
    Eigen::Index peak = 0;
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        const double tau = t[k] - zc;
        err = std::max(err, std::abs(e[k] - 2.0 * std::cos(w0 * tau) * std::exp(-0.5 * sigma * sigma * tau * tau)));
        if (std::abs(e[k]) > std::abs(e[peak])) peak = k;
    }
    CHECK(err < 1e-6);
    CHECK(std::abs(t[peak] - zc) <= 0.01 + 1e-12);
}

TEST_CASE("field is real-valued and a constant phase preserves its energy") {
    const PulseSpectrum s = line(5.0, 0.4, 0.0, 0.01);
    const RealVector t = grid(-40.0, 0.01, 8001);
    const RealVector e0 = synthesize_time_field(s, t);
    const RealVector e1 = synthesize_time_field(apply_mask(s, mask::Constant{1.1}), t);
    CHECK(e0.allFinite());
    const double p0 = e0.squaredNorm(), p1 = e1.squaredNorm();
    CHECK(std::abs(p0 - p1) < 1e-10 * p0);
    CHECK((e0 - e1).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("linear delay shifts the envelope") {
    const PulseSpectrum s = line(5.0, 0.4, 2.0, 0.005);
    const RealVector t = grid(-20.0, 0.01, 4001);
    auto envelope_peak = [&](const PulseSpectrum& sp) {
        const RealVector e = synthesize_time_field(sp, t);
        // envelope via the local maximum of |E| over a carrier period
        double best = -1.0, at = 0.0;
        for (Eigen::Index k = 0; k < t.size(); ++k)
            if (std::abs(e[k]) > best) best = std::abs(e[k]), at = t[k];
        return at;
    };
    const double shift = envelope_peak(apply_mask(s, mask::LinearDelay{4.0})) - envelope_peak(s);
    CHECK(std::abs(shift - 4.0) <= 0.01 + 1e-9);
}

TEST_CASE("zero amplitude and zero scale give a zero interaction") {
    PulseSpectrum s = line();
    s.amplitude.setZero();
    CHECK(synthesize_time_field(s, grid(-1.0, 0.1, 21)).cwiseAbs().maxCoeff() == 0.0);

    const SystemModel sys = test::two_level();
    PulseSpectrum q = line();
    q.field_scale = 0.0;
    CHECK(interaction_matrix(sys, q, 0.3).norm() == 0.0);

    q.field_scale = 0.2;
    const double e = field_at(q, 0.3);
    const Matrix h = interaction_matrix(sys, q, 0.3);
    CHECK(std::abs(h(0, 1) - cplx(0.2 * e, 0.0)) < 1e-15);
    CHECK(hermiticity_error(h) == 0.0);
}

TEST_CASE("synthesis outside the quadrature window is refused") {
    const PulseSpectrum s = line(5.0, 0.4, 0.0, 0.1); // window half-width pi / 0.1
    const auto [lo, hi] = synthesis_window(s);
    CHECK(hi - lo == doctest::Approx(2.0 * M_PI / 0.1));
    try {
        interaction_matrix(test::two_level(), s, hi + 1.0);
        FAIL("expected OutOfWindow");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::OutOfWindow);
    }
    CHECK_THROWS_AS(synthesize_time_field(s, grid(0.0, 0.1, 1000)), Error);
}

TEST_CASE("spectral value honours the hermitian extension") {
    const PulseSpectrum s = apply_mask(line(), mask::Constant{0.7});
    const cplx plus = spectral_value(s, 5.1);
    const cplx minus = spectral_value(s, -5.1);
    CHECK(std::abs(minus - std::conj(plus)) < 1e-15);
    CHECK_THROWS_AS(spectral_value(s, 100.0), Error);
}
