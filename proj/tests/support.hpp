// support.hpp - Shared fixtures and independent reference computations for tests

#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "oppc/propagators.hpp"

namespace oppc::test {

inline SystemModel two_level(double omega = 1.0, const std::vector<Matrix>& couplings = {}) {
    RealVector e(2);
    e << 0.0, omega;
    Matrix d(2, 2);
    d << 0.0, 1.0, 1.0, 0.0;
    Matrix o = Matrix::Zero(2, 2);
    o(1, 1) = 1.0;
    return build_system(e, d, couplings, o);
}

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

// Lambda system: ground doublet (0, delta), upper level we; bath mixes the doublet.
inline SystemModel lambda_system(double delta = 2.5, double we = 10.0, double kappa = 0.5, double lam = 0.5) {
    RealVector e(3);
    e << 0.0, delta, we;
    Matrix d = Matrix::Zero(3, 3);
    d(0, 2) = d(2, 0) = 1.0;
    d(1, 2) = d(2, 1) = 1.0;
    Matrix k = Matrix::Zero(3, 3);
    k(0, 0) = kappa;
    k(1, 1) = -kappa;
    k(0, 1) = k(1, 0) = lam;
    Matrix o = Matrix::Zero(3, 3);
    o(1, 1) = 1.0;
    return build_system(e, d, {k}, o);
}

inline Matrix random_hermitian(int n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = cplx(g(rng), g(rng));
    return 0.5 * (m + m.adjoint());
}

inline Matrix random_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = cplx(g(rng), g(rng));
    return m;
}

// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * k);
    return s * h / 3.0;
}

// Full-line Fourier transform of the bath correlation function,
// S(w) = int dt e^{i w t} C(t) = 2 pi w^2 J(|w|) [n(|w|) + 1] for w > 0 and
// 2 pi w^2 J(|w|) n(|w|) for w < 0, with C(t) = int_0^inf dv w^2J [coth cos - i sin].
inline double bath_spectrum(const SpectralDensity& j, double beta, double w) {
    const double a = std::abs(w);
    if (a == 0.0) return 2.0 * M_PI * weighted_density_slope_at_zero(j) / beta;
    const double n = 1.0 / std::expm1(beta * a);
    return 2.0 * M_PI * weighted_density(j, a) * (w > 0 ? n + 1.0 : n);
}

// RK4 for rho_dot = G(t) rho on vec(rho); used as an independent integrator.
inline Matrix rk4_unvec(const Vector& v, int n) {
    Matrix m(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = v[a * n + b];
    return m;
}

inline Vector vec(const Matrix& m) {
    const auto n = m.rows();
    Vector v(n * n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) v[a * n + b] = m(a, b);
    return v;
}

} // namespace oppc::test
