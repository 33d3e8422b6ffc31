// oracle.cpp - System plus truncated oscillators, propagated without any bath approximation

#include "oppc/oracle.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "rk4.hpp"

namespace oppc {

long CompositeModel::env_dim() const {
    long d = 1;
    for (const auto& m : modes) d *= m.n_max + 1;
    return d;
}

CompositeModel make_composite(SystemModel system, std::vector<Mode> modes) {
    long env = 1;
    for (const auto& m : modes) {
        require(m.n_max >= 1, ErrorKind::InvalidArgument, "mode truncation n_max must be >= 1");
        require(m.omega > 0.0 && std::isfinite(m.gamma), ErrorKind::InvalidArgument, "mode needs omega > 0");
        require(m.group >= 0 && m.group < std::max(1, system.bath_groups()), ErrorKind::ValidationError,
                "mode attached to unknown bath group " + std::to_string(m.group));
        env *= m.n_max + 1;
        require(env * system.dim() <= kCompositeDimensionGuard, ErrorKind::DimensionGuard,
                "composite dimension exceeds " + std::to_string(kCompositeDimensionGuard));
    }
    return CompositeModel{std::move(system), std::move(modes)};
}

std::vector<Mode> discretize_spectral_density(const SpectralDensity& j, int n_modes, double omega_max, int n_max,
                                              int group) {
    require(n_modes >= 1 && omega_max > 0.0, ErrorKind::InvalidArgument, "need n_modes >= 1 and omega_max > 0");
    const double dw = omega_max / n_modes;
    std::vector<Mode> modes;
    for (int k = 0; k < n_modes; ++k) {
        const double w = (k + 0.5) * dw;
        const double jw = weighted_density(j, w) / (w * w);
        modes.push_back(Mode{w, std::sqrt(std::max(0.0, jw * dw)), n_max, group});
    }
    return modes;
}

CorrelationTable mode_correlation(const std::vector<Mode>& modes, double beta, double dt, double t_max) {
    require(beta > 0.0, ErrorKind::NonPositiveBeta, "beta must be positive");
    const auto steps = static_cast<Eigen::Index>(std::ceil(t_max / dt - 1e-9));
    Vector samples = Vector::Zero(steps + 1);
    for (const auto& m : modes) {
        const double weight = m.gamma * m.gamma * m.omega * m.omega;
        const double coth = 1.0 / std::tanh(0.5 * beta * m.omega);
        for (Eigen::Index k = 0; k <= steps; ++k) {
            const double x = m.omega * dt * static_cast<double>(k);
            samples[k] += weight * cplx(coth * std::cos(x), -std::sin(x));
        }
    }
    return correlation_from_samples(dt, samples, beta);
}

double recurrence_time(const std::vector<Mode>& modes) {
    require(modes.size() >= 2, ErrorKind::InvalidArgument, "recurrence needs at least two modes");
    const double dw = modes[1].omega - modes[0].omega;
    for (std::size_t k = 2; k < modes.size(); ++k)
        require(std::abs(modes[k].omega - modes[k - 1].omega - dw) <= 1e-9 * std::abs(dw), ErrorKind::InvalidArgument,
                "modes are not equally spaced");
    return 2.0 * M_PI / std::abs(dw);
}

namespace {

using Triplets = std::vector<Eigen::Triplet<cplx>>;

long stride_of(const CompositeModel& c, std::size_t mode) {
    long s = 1;
    for (std::size_t k = mode + 1; k < c.modes.size(); ++k) s *= c.modes[k].n_max + 1;
    return s;
}

int occupation(const CompositeModel& c, long env_index, std::size_t mode) {
    return static_cast<int>((env_index / stride_of(c, mode)) % (c.modes[mode].n_max + 1));
}

SparseMatrix from_triplets(long dim, const Triplets& t) {
    SparseMatrix m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

// Phi_g = sum_{modes in g} gamma omega (a + a^dagger) on the environment space.
SparseMatrix environment_field(const CompositeModel& c, int group) {
    const long ne = c.env_dim();
    Triplets t;
    for (std::size_t k = 0; k < c.modes.size(); ++k) {
        const Mode& m = c.modes[k];
        if (m.group != group || m.gamma == 0.0) continue;
        const long s = stride_of(c, k);
        for (long e = 0; e < ne; ++e) {
            const int n = occupation(c, e, k);
            if (n < m.n_max) {
                const double amp = m.gamma * m.omega * std::sqrt(static_cast<double>(n + 1));
                t.emplace_back(e + s, e, amp);
                t.emplace_back(e, e + s, amp);
            }
        }
    }
    return from_triplets(ne, t);
}

SparseMatrix kron_sparse(const Matrix& a, const SparseMatrix& b) {
    const long nb = b.rows();
    Triplets t;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) == cplx(0.0)) continue;
            for (int o = 0; o < b.outerSize(); ++o)
                for (SparseMatrix::InnerIterator it(b, o); it; ++it)
                    t.emplace_back(i * nb + it.row(), j * nb + it.col(), a(i, j) * it.value());
        }
    return from_triplets(a.rows() * nb, t);
}

SparseMatrix identity_env(long ne) {
    SparseMatrix id(ne, ne);
    id.setIdentity();
    return id;
}

} // namespace

SparseMatrix system_hamiltonian_part(const CompositeModel& c) {
    return kron_sparse(c.system.hamiltonian(), identity_env(c.env_dim()));
}

SparseMatrix bath_hamiltonian_part(const CompositeModel& c) {
    const long ne = c.env_dim();
    Triplets t;
    for (int s = 0; s < c.system_dim(); ++s)
        for (long e = 0; e < ne; ++e) {
            double energy = 0.0;
            for (std::size_t k = 0; k < c.modes.size(); ++k) energy += c.modes[k].omega * occupation(c, e, k);
            if (energy != 0.0) t.emplace_back(s * ne + e, s * ne + e, energy);
        }
    return from_triplets(c.dim(), t);
}

SparseMatrix interaction_part(const CompositeModel& c) {
    SparseMatrix h(c.dim(), c.dim());
    const auto& ks = c.system.couplings();
    for (int g = 0; g < c.system.bath_groups(); ++g) {
        const SparseMatrix phi = environment_field(c, g);
        if (phi.nonZeros() == 0) continue;
        Matrix k = Matrix::Zero(c.system_dim(), c.system_dim());
        for (const auto& coupling : ks)
            if (coupling.bath_group == g) k += coupling.op;
        h += kron_sparse(k, phi);
    }
    return h;
}

SparseMatrix dipole_part(const CompositeModel& c) {
    return kron_sparse(c.system.dipole(), identity_env(c.env_dim()));
}

SparseMatrix total_hamiltonian(const CompositeModel& c) {
    return system_hamiltonian_part(c) + bath_hamiltonian_part(c) + interaction_part(c);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix partial_trace_env(const Matrix& rho, int system_dim, long env_dim) {
    require(rho.rows() == system_dim * env_dim, ErrorKind::DimensionMismatch, "partial trace dimension mismatch");
    Matrix out(system_dim, system_dim);
    for (int a = 0; a < system_dim; ++a)
        for (int b = 0; b < system_dim; ++b)
            out(a, b) = rho.block(a * env_dim, b * env_dim, env_dim, env_dim).trace();
    return out;
}

Matrix partial_trace_system(const Matrix& rho, int system_dim, long env_dim) {
    require(rho.rows() == system_dim * env_dim, ErrorKind::DimensionMismatch, "partial trace dimension mismatch");
    Matrix out = Matrix::Zero(env_dim, env_dim);
    for (int a = 0; a < system_dim; ++a) out += rho.block(a * env_dim, a * env_dim, env_dim, env_dim);
    return out;
}

double top_level_population(const CompositeModel& c, const Matrix& rho) {
    const long ne = c.env_dim();
    const Matrix env = partial_trace_system(rho, c.system_dim(), ne);
    double worst = 0.0;
    for (std::size_t k = 0; k < c.modes.size(); ++k) {
        double p = 0.0;
        for (long e = 0; e < ne; ++e)
            if (occupation(c, e, k) == c.modes[k].n_max) p += env(e, e).real();
        worst = std::max(worst, p);
    }
    return worst;
}

Matrix thermal_composite_state(const CompositeModel& c, double beta, bool correlated) {
    require(beta > 0.0, ErrorKind::NonPositiveBeta, "beta must be positive");
    if (correlated) {
        const Matrix h = Matrix(total_hamiltonian(c));
        Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
        const RealVector e = eig.eigenvalues();
        RealVector w = (-beta * (e.array() - e.minCoeff())).exp();
        w /= w.sum();
        const Matrix& v = eig.eigenvectors();
        return v * w.cast<cplx>().asDiagonal() * v.adjoint();
    }
    Matrix env = Matrix::Ones(1, 1);
    for (const auto& m : c.modes) {
        RealVector p(m.n_max + 1);
        for (int n = 0; n <= m.n_max; ++n) p[n] = std::exp(-beta * m.omega * n);
        p /= p.sum();
        env = kron(env, Matrix(p.cast<cplx>().asDiagonal()));
    }
    return kron(canonical_state(c.system, beta).matrix(), env);
}

Trajectory propagate_exact(const CompositeModel& c, const PulseSpectrum& spectrum, const Matrix& rho0,
                           const PropagatorConfig& config) {
    require(rho0.rows() == c.dim() && rho0.cols() == c.dim(), ErrorKind::DimensionMismatch,
            "initial composite state has the wrong dimension");
    require(config.dt * c.system.max_transition() <= 0.1 * (1.0 + 1e-12), ErrorKind::StepTooLarge,
            "dt * max|w_ab| exceeds 0.1");
    require(top_level_population(c, rho0) <= kTruncationTol, ErrorKind::TruncationSuspect,
            "oscillator top level is populated beyond 1e-4");
    const Eigen::Index steps = config.steps();
    const SparseMatrix h0 = total_hamiltonian(c);
    const SparseMatrix d = dipole_part(c);
    const RealVector field = scaled_field_samples(spectrum, config.t0, 0.5 * config.dt, 2 * steps + 1);
    const int ns = c.system_dim();
    const long ne = c.env_dim();

    Trajectory traj;
    traj.t = RealVector(steps + 1);
    traj.orders.assign(1, std::vector<Matrix>(steps + 1));
    traj.observable = RealVector(steps + 1);
    traj.min_eigenvalue = RealVector(steps + 1);
    auto record = [&](Eigen::Index i, const Matrix& rho) {
        traj.t[i] = config.t0 + config.dt * static_cast<double>(i);
        Matrix reduced = partial_trace_env(rho, ns, ne);
        require(std::abs(reduced.trace().real() - 1.0) <= 1e-8, ErrorKind::TraceDrift,
                "composite trace drifted at t = " + std::to_string(traj.t[i]));
        reduced = 0.5 * (reduced + reduced.adjoint());
        traj.orders[0][i] = reduced;
        traj.observable[i] = expectation(c.system.observable(), reduced);
        traj.min_eigenvalue[i] = Eigen::SelfAdjointEigenSolver<Matrix>(reduced, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    };

    Matrix rho = rho0;
    record(0, rho);
    for (Eigen::Index i = 0; i < steps; ++i) {
        rho = detail::rk4_step(rho, config.dt, [&](int stage, const Matrix& x) -> Matrix {
            const double e = field[2 * i + stage];
            Matrix hx = h0 * x;
            if (e != 0.0) hx -= e * (d * x);
            return cplx(0.0, -1.0) * (hx - hx.adjoint());
        });
        record(i + 1, rho);
    }
    require(top_level_population(c, rho) <= kTruncationTol, ErrorKind::TruncationSuspect,
            "oscillator top level is populated beyond 1e-4 at the final time");
    return traj;
}

} // namespace oppc
