#include <doctest.h>

#include "support.hpp"

using namespace oppc;

namespace {

// Independent Simpson quadrature of C(t) on [0, w_max].
cplx reference_correlation(const SpectralDensity& j, double beta, double t, double w_max, int panels) {
    auto re = [&](double w) {
        if (w == 0.0) return 2.0 * weighted_density_slope_at_zero(j) / beta;
        return std::cos(w * t) * weighted_density(j, w) / std::tanh(0.5 * beta * w);
    };
    auto im = [&](double w) { return -std::sin(w * t) * weighted_density(j, w); };
    return {test::simpson(re, 0.0, w_max, panels), test::simpson(im, 0.0, w_max, panels)};
}

} // namespace

TEST_CASE("spectral densities follow their defining formulas") {
    const SpectralDensity o = spectral::OhmicExp{0.3, 2.0, 1.5};
    CHECK(weighted_density(o, 0.8) == doctest::Approx(0.3 * 0.64 * std::exp(-0.8 / 1.5)));
    CHECK(weighted_density(o, -0.8) == 0.0);
    CHECK(weighted_density(o, 0.0) == 0.0);

    const SpectralDensity d = spectral::Drude{0.5, 2.0};
    CHECK(weighted_density(d, 3.0) == doctest::Approx(0.5 * 3.0 / (9.0 + 2.0)));

    const SpectralDensity p1 = spectral::OhmicExp{0.2, 1.0, 1.0};
    CHECK(weighted_density_slope_at_zero(p1) == doctest::Approx(0.2));
    CHECK(weighted_density_slope_at_zero(o) == 0.0);

    CHECK_THROWS_AS(validate(spectral::OhmicExp{-1.0, 1.0, 1.0}), Error);
    CHECK_THROWS_AS(validate(spectral::Drude{1.0, 0.0}), Error);
    RealVector w(2), v(2);
    w << 1.0, 0.5;
    v << 0.1, 0.2;
    CHECK_THROWS_AS(validate(spectral::Tabulated{w, v}), Error);
}

TEST_CASE("correlation function matches an independent quadrature") {
    const double beta = 0.8;
    SUBCASE("ohmic_exp p=3") {
        const SpectralDensity j = spectral::OhmicExp{0.05, 3.0, 1.0};
        const CorrelationTable c = correlation_function(j, beta, 0.05, 6.0);
        for (Eigen::Index k : {0, 7, 40, 120}) {
            const cplx ref = reference_correlation(j, beta, c.t[c.zero() + k], 60.0, 60000);
            CHECK(std::abs(c.at(k) - ref) < 1e-7 * std::abs(c.at(0)));
        }
    }
    SUBCASE("drude") {
        const SpectralDensity j = spectral::Drude{0.05, 1.0};
        const CorrelationTable c = correlation_function(j, beta, 0.05, 4.0);
        const double w_max = integration_cutoff(j, CorrelationOptions{}.cap_factor);
        for (Eigen::Index k : {0, 10, 80}) {
            const cplx ref = reference_correlation(j, beta, c.t[c.zero() + k], w_max, 400000);
            CHECK(std::abs(c.at(k) - ref) < 1e-6 * std::abs(c.at(0)));
        }
    }
}

TEST_CASE("correlation is hermitian in time and needs positive beta") {
    const SpectralDensity j = spectral::OhmicExp{0.05, 2.0, 2.0};
    const CorrelationTable c = correlation_function(j, 1.0, 0.02, 3.0);
    for (Eigen::Index k = 0; k <= c.max_steps(); ++k) CHECK(std::abs(c.at(-k) - std::conj(c.at(k))) < 1e-15);
    CHECK(std::abs(c.at(0).imag()) < 1e-15);
    try {
        correlation_function(j, 0.0, 0.02, 3.0);
        FAIL("expected NonPositiveBeta");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::NonPositiveBeta);
    }
}

TEST_CASE("memory truncation keeps every later sample below eps") {
    const SpectralDensity j = spectral::OhmicExp{0.05, 3.0, 1.0};
    const CorrelationTable c = correlation_function(j, 1.0, 0.02, 40.0);
    const double eps = 1e-5;
    const CorrelationTable t = truncate_memory(c, eps);
    CHECK(t.t_mem() < c.t_mem());
    CHECK(t.t_mem() == doctest::Approx(memory_time(c, eps)));
    for (Eigen::Index k = t.max_steps(); k <= c.max_steps(); ++k) CHECK(std::abs(c.at(k)) < eps * std::abs(c.at(0)));
    CHECK(std::abs(c.at(t.max_steps() - 1)) >= eps * std::abs(c.at(0)));
    CHECK(t.eps_mem == eps);
}

TEST_CASE("kernel symmetry holds for random hermitian-paired couplings") {
    std::mt19937 rng(2024);
    const CorrelationTable ohmic = truncate_memory(correlation_function(spectral::OhmicExp{0.05, 3.0, 1.0}, 1.0, 0.05, 20.0));
    const CorrelationTable drude = truncate_memory(correlation_function(spectral::Drude{0.05, 1.0}, 1.0, 0.05, 20.0), 1e-3);
    for (int trial = 0; trial < 6; ++trial) {
        RealVector e(3);
        e << 0.0, 0.6, 1.7;
        const SystemModel s = build_system(e, Matrix::Zero(3, 3), {test::random_matrix(3, rng)}, Matrix::Zero(3, 3));
        for (const CorrelationTable* c : {&ohmic, &drude}) {
            const MemoryKernel m = memory_kernel(s, std::vector<CorrelationTable>{*c});
            double err = 0.0;
            for (Eigen::Index k = 0; k <= m.steps(); k += 3)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        for (int cc = 0; cc < 3; ++cc)
                            for (int d = 0; d < 3; ++d)
                                err = std::max(err, std::abs(std::conj(m.at(+1, k, a, b, cc, d)) - m.at(-1, k, d, cc, b, a)));
            CHECK(err < 1e-10);
        }
    }
}

TEST_CASE("kernel of a single hermitian coupling is C(t) K_ab K_cd") {
    const CorrelationTable c = truncate_memory(correlation_function(spectral::OhmicExp{0.05, 3.0, 1.0}, 1.0, 0.05, 20.0));
    const Matrix k = test::sigma_x() + 0.3 * test::sigma_z();
    const MemoryKernel m = memory_kernel(test::two_level(1.0, {k}), std::vector<CorrelationTable>{c});
    CHECK(m.steps() == c.max_steps());
    CHECK(std::abs(m.at(1, 5, 0, 1, 1, 0) - c.at(5) * k(0, 1) * k(1, 0)) < 1e-15);
    CHECK(std::abs(m.at(-1, 5, 0, 0, 1, 1) - c.at(-5) * k(0, 0) * k(1, 1)) < 1e-15);

    const MemoryKernel zero = memory_kernel(test::two_level(1.0, {Matrix::Zero(2, 2)}), std::vector<CorrelationTable>{c});
    CHECK(zero.max_abs(0) == 0.0);
}

TEST_CASE("markov rates equal half the bath spectrum and obey detailed balance") {
    const double beta = 1.7;
    const SpectralDensity j = spectral::OhmicExp{0.05, 3.0, 1.0};
    const CorrelationTable c = truncate_memory(correlation_function(j, beta, 0.01, 100.0), 1e-6);
    const SystemModel s = test::two_level(1.3, {test::sigma_x()});
    const RateTensor g = markov_rates(memory_kernel(s, std::vector<CorrelationTable>{c}), transition_frequencies(s));
    for (double w : {1.3, -1.3}) {
        const double rate = g(0, 1, 1, 0, w);
        CHECK(rate == doctest::Approx(0.5 * test::bath_spectrum(j, beta, w)).epsilon(1e-4));
    }
    CHECK(g(0, 1, 1, 0, 1.3) / g(1, 0, 0, 1, -1.3) == doctest::Approx(std::exp(beta * 1.3)).epsilon(1e-4));
    CHECK_THROWS_AS(g(0, 1, 1, 0, 0.5), Error);
}

TEST_CASE("transition frequencies are distinct and sorted") {
    RealVector e(3);
    e << 0.0, 1.0, 2.0;
    const SystemModel s = build_system(e, Matrix::Zero(3, 3), {}, Matrix::Zero(3, 3));
    const std::vector<double> w = transition_frequencies(s);
    CHECK(w == std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});
}

TEST_CASE("rates refuse kernels that have not decayed") {
    const CorrelationTable c = correlation_function(spectral::OhmicExp{0.05, 3.0, 1.0}, 1.0, 0.05, 2.0);
    const SystemModel s = test::two_level(1.0, {test::sigma_x()});
    try {
        markov_rates(memory_kernel(s, std::vector<CorrelationTable>{c}), transition_frequencies(s));
        FAIL("expected KernelNotDecayed");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::KernelNotDecayed);
    }
}
