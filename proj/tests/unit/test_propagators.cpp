#include <doctest.h>

#include "support.hpp"

using namespace oppc;

namespace {

PulseSpectrum resonant(double w0, double sigma, double zc, double scale) {
    const double lo = std::max(w0 - 8.0 * sigma, 0.05);
    const int n = static_cast<int>(std::round((w0 + 8.0 * sigma - lo) / 0.005)) + 1;
    return gaussian_spectrum(w0, sigma, 1.0, uniform_grid(lo, w0 + 8.0 * sigma, n), zc, scale);
}

// Independent RK4 for rho_dot = -i[H_M - s E(t) d, rho] with a finer step.
Matrix reference_unitary(const SystemModel& sys, const PulseSpectrum& sp, Matrix rho, double t_end, double h) {
    const Matrix hm = sys.hamiltonian();
    auto rhs = [&](double t, const Matrix& r) {
        const Matrix h_t = hm - sp.field_scale * field_at(sp, t) * sys.dipole();
        return Matrix(cplx(0.0, -1.0) * (h_t * r - r * h_t));
    };
    const int steps = static_cast<int>(std::round(t_end / h));
    for (int k = 0; k < steps; ++k) {
        const double t = k * h;
        const Matrix k1 = rhs(t, rho);
        const Matrix k2 = rhs(t + 0.5 * h, rho + 0.5 * h * k1);
        const Matrix k3 = rhs(t + 0.5 * h, rho + 0.5 * h * k2);
        const Matrix k4 = rhs(t + h, rho + h * k3);
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

std::shared_ptr<RateTensor> rates_for(const SystemModel& s, const SpectralDensity& j, double beta, double dt) {
    const CorrelationTable c = truncate_memory(correlation_function(j, beta, dt, 60.0));
    const MemoryKernel k = memory_kernel(s, std::vector<CorrelationTable>{c});
    return std::make_shared<RateTensor>(markov_rates(k, transition_frequencies(s)));
}

Matrix pure(int n, int level) {
    Matrix r = Matrix::Zero(n, n);
    r(level, level) = 1.0;
    return r;
}

} // namespace

TEST_CASE("liouvillian acts as -i[H, rho] on row-major vec") {
    std::mt19937 rng(3);
    RealVector e(3);
    e << 0.0, 0.4, 1.9;
    const SystemModel s = build_system(e, Matrix::Zero(3, 3), {}, Matrix::Zero(3, 3));
    const Matrix r = test::random_hermitian(3, rng);
    const Matrix h = s.hamiltonian();
    const Vector expect = test::vec(cplx(0.0, -1.0) * (h * r - r * h));
    CHECK((liouvillian(s) * test::vec(r) - expect).norm() < 1e-14);
}

TEST_CASE("unitary engine matches an independent fine-step integration") {
    const SystemModel s = test::two_level(1.0);
    const PulseSpectrum sp = resonant(1.0, 0.3, 12.0, 0.05);
    PropagatorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 30.0;
    const Trajectory tr = propagate_unitary(s, sp, pure(2, 0), cfg);
    const Matrix ref = reference_unitary(s, sp, pure(2, 0), 30.0, 0.0025);
    const Matrix last = tr.total(tr.t.size() - 1);
    CHECK((last - ref).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(tr.t[tr.t.size() - 1] == doctest::Approx(30.0));
    CHECK(std::abs(last.trace() - 1.0) < 1e-12);
    CHECK(hermiticity_error(last) < 1e-12);
    CHECK(tr.min_eigenvalue.minCoeff() > -1e-10);
    CHECK(tr.observable[tr.t.size() - 1] == doctest::Approx(last(1, 1).real()).epsilon(1e-12));
}

TEST_CASE("open engines with zero rates and kernel reduce to the unitary engine") {
    const SystemModel s = test::two_level(1.0, {test::sigma_x()});
    const PulseSpectrum sp = resonant(1.0, 0.3, 12.0, 0.05);
    PropagatorConfig cfg;
    cfg.t_end = 25.0;
    const Trajectory u = propagate_unitary(s, sp, pure(2, 0), cfg);

    const SystemModel silent = s.with_coupling_scale(0.0);
    const CorrelationTable c = truncate_memory(correlation_function(spectral::OhmicExp{0.05, 3.0, 1.0}, 1.0, cfg.dt, 40.0));
    auto kernel = std::make_shared<MemoryKernel>(memory_kernel(silent, std::vector<CorrelationTable>{c}));
    auto rates = std::make_shared<RateTensor>(markov_rates(*kernel, transition_frequencies(silent)));
    for (Method m : {Method::NonMarkovian, Method::RedfieldNonSecular, Method::RedfieldSecular}) {
        const Trajectory o = propagate(silent, sp, Engine{m, kernel, rates}, pure(2, 0), cfg);
        double err = 0.0;
        for (Eigen::Index k = 0; k < u.t.size(); ++k) err = std::max(err, (o.total(k) - u.total(k)).cwiseAbs().maxCoeff());
        CHECK(err < 1e-10);
    }
}

TEST_CASE("secular dissipator keeps only frequency-matched blocks") {
    const SystemModel s = test::lambda_system();
    const auto rates = rates_for(s, spectral::OhmicExp{0.05, 3.0, 1.0}, 1.0, 0.01);
    const Matrix full = redfield_dissipator(s, *rates, false);
    const Matrix sec = redfield_dissipator(s, *rates, true);
    const int n = s.dim();
    bool mixed = false;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const auto i = a * n + b, j = c * n + d;
                    if (std::abs(s.omega(a, b) - s.omega(c, d)) > 1e-9) {
                        CHECK(sec(i, j) == cplx(0.0));
                        mixed = mixed || std::abs(full(i, j)) > 1e-8;
                    } else {
                        CHECK(sec(i, j) == full(i, j));
                    }
                }
    CHECK(mixed);
}

TEST_CASE("generators preserve trace and hermiticity") {
    std::mt19937 rng(11);
    const SystemModel s = test::lambda_system();
    const auto rates = rates_for(s, spectral::OhmicExp{0.05, 3.0, 1.0}, 1.0, 0.01);
    for (Method m : {Method::RedfieldNonSecular, Method::RedfieldSecular}) {
        const Matrix g = field_free_generator(s, Engine{m, nullptr, rates});
        Matrix r = test::random_hermitian(3, rng);
        const Matrix dr = test::rk4_unvec(g * test::vec(r), 3);
        CHECK(std::abs(dr.trace()) < 1e-12);
        CHECK(hermiticity_error(dr) < 1e-12);
    }
}

TEST_CASE("secular stationary state is canonical") {
    const double beta = 1.2;
    const SystemModel s = test::two_level(1.0, {test::sigma_x() + 0.2 * test::sigma_z()});
    const auto rates = rates_for(s, spectral::OhmicExp{0.05, 3.0, 1.0}, beta, 0.01);
    const Matrix st = stationary_state(s, Engine{Method::RedfieldSecular, nullptr, rates});
    const Matrix can = canonical_state(s, beta).matrix();
    CHECK((st - can).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("step guards") {
    const SystemModel s = test::two_level(20.0);
    PropagatorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    try {
        propagate_unitary(s, resonant(20.0, 0.5, 0.0, 0.01), pure(2, 0), cfg);
        FAIL("expected StepTooLarge");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::StepTooLarge);
    }
}

TEST_CASE("perturbative cascade: order zero is field free and order two is the first population order") {
    const SystemModel s = test::two_level(2.0);
    const PulseSpectrum sp = resonant(2.0, 0.2, 35.0, 1e-3);
    PropagatorConfig cfg;
    cfg.dt = 0.005;
    cfg.t_end = 70.0;
    const Trajectory c = perturbative_cascade(s, sp, Engine{}, pure(2, 0), 2, cfg);
    REQUIRE(c.orders.size() == 3);
    const Eigen::Index last = c.t.size() - 1;
    CHECK((c.orders[0][last] - pure(2, 0)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(c.orders[1][last](0, 0)) < 1e-14);
    CHECK(std::abs(c.orders[1][last](1, 1)) < 1e-14);
    CHECK(std::abs(c.orders[2][last].trace()) < 1e-12);

    const Matrix closed = closed_form_rho1(s, sp, PureStart{0}, c.t[last]);
    CHECK(std::abs(c.orders[2][last](1, 1) - closed(1, 1)) < 1e-6 * 1e-6);

    CHECK_THROWS_AS(perturbative_cascade(s, sp, Engine{}, pure(2, 0), 3, cfg), Error);
}

TEST_CASE("cascade refuses a start that is not a fixed point") {
    const SystemModel s = test::two_level(1.0, {test::sigma_x()});
    const auto rates = rates_for(s, spectral::OhmicExp{0.05, 3.0, 1.0}, 1.0, 0.01);
    PropagatorConfig cfg;
    cfg.t_end = 1.0;
    try {
        perturbative_cascade(s, resonant(1.0, 0.3, 0.0, 1e-3), Engine{Method::RedfieldNonSecular, nullptr, rates},
                             pure(2, 1), 2, cfg);
        FAIL("expected NotAFixedPoint");
    } catch (const Error& err) {
        INFO(err.what());
        CHECK(err.kind() == ErrorKind::NotAFixedPoint);
    }
}

TEST_CASE("closed form follows the pure-start amplitude formula") {
    const SystemModel s = test::two_level(1.0);
    const PulseSpectrum sp = apply_mask(resonant(1.0, 0.3, 2.0, 0.01), mask::Chirp{1.0, 1.0});
    const Matrix r = closed_form_rho1(s, sp, PureStart{0}, 5.0);
    const cplx e = spectral_value(sp, 1.0);
    CHECK(r(1, 1).real() == doctest::Approx(4.0 * M_PI * M_PI * 1e-4 * std::norm(e)).epsilon(1e-12));
    CHECK(std::abs(r(0, 0)) == 0.0);
    CHECK(std::abs(r(0, 1)) == 0.0);
}

TEST_CASE("non-markovian engine approaches redfield when memory is short") {
    const double beta = 1.0;
    const SystemModel s = test::two_level(1.0, {test::sigma_x()});
    const SpectralDensity j = spectral::OhmicExp{5e-4, 3.0, 3.0};
    PropagatorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 100.0;
    const CorrelationTable c = truncate_memory(correlation_function(j, beta, cfg.dt, 30.0));
    auto kernel = std::make_shared<MemoryKernel>(memory_kernel(s, std::vector<CorrelationTable>{c}));
    auto rates = std::make_shared<RateTensor>(markov_rates(*kernel, transition_frequencies(s)));
    PulseSpectrum sp = resonant(1.0, 0.3, 0.0, 0.0);
    const Trajectory nm = propagate(s, sp, Engine{Method::NonMarkovian, kernel, nullptr}, pure(2, 1), cfg);
    const Trajectory rf = propagate(s, sp, Engine{Method::RedfieldNonSecular, nullptr, rates}, pure(2, 1), cfg);
    const RealVector a = nm.population(1), b = rf.population(1);
    const double span = 1.0 - b[b.size() - 1];
    CHECK(span > 0.05);
    CHECK((a - b).cwiseAbs().maxCoeff() < 0.05 * span);
}
