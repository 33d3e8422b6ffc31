// oracle.hpp - Brute-force reference: system x truncated harmonic modes
//
// Composite basis ordering is |s> (x) |n_1> (x) ... (x) |n_M>, system index
// slowest. Each mode couples through H^ME = K_g (x) gamma Z with
// Z = omega (a + a^dagger), so a mode set drawn from w^2 J(w) reproduces the
// continuum correlation function as a Riemann sum with gamma^2 = J(w) dw.

#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "oppc/bath.hpp"
#include "oppc/laser.hpp"
#include "oppc/trajectory.hpp"

namespace oppc {

inline constexpr long kCompositeDimensionGuard = 20000;
inline constexpr double kTruncationTol = 1e-4;

using SparseMatrix = Eigen::SparseMatrix<cplx>;

struct Mode {
    double omega{1.0};
    double gamma{0.0};
    int n_max{4};
    int group{0}; // bath group of the system coupling operators it attaches to
};

struct CompositeModel {
    SystemModel system;
    std::vector<Mode> modes;

    int system_dim() const { return system.dim(); }
    long env_dim() const;
    long dim() const { return system_dim() * env_dim(); }
};

// Throws DimensionGuard when N * prod(n_max + 1) exceeds the guard.
CompositeModel make_composite(SystemModel system, std::vector<Mode> modes);

// Midpoint grid on (0, omega_max]: w_k = (k - 1/2) dw, gamma_k^2 = J(w_k) dw.
std::vector<Mode> discretize_spectral_density(const SpectralDensity& j, int n_modes, double omega_max,
                                              int n_max = 4, int group = 0);

// C(t) of the discrete modes: sum_k gamma_k^2 w_k^2 [coth(beta w_k / 2) cos(w_k t) - i sin(w_k t)].
CorrelationTable mode_correlation(const std::vector<Mode>& modes, double beta, double dt, double t_max);

// 2 pi / dw for an equally spaced mode set.
double recurrence_time(const std::vector<Mode>& modes);

SparseMatrix system_hamiltonian_part(const CompositeModel& composite);   // H_M (x) 1
SparseMatrix bath_hamiltonian_part(const CompositeModel& composite);     // 1 (x) H_E
SparseMatrix interaction_part(const CompositeModel& composite);          // H^ME
SparseMatrix dipole_part(const CompositeModel& composite);               // d (x) 1
SparseMatrix total_hamiltonian(const CompositeModel& composite);         // field-free H

Matrix kron(const Matrix& a, const Matrix& b);
Matrix partial_trace_env(const Matrix& rho, int system_dim, long env_dim);
Matrix partial_trace_system(const Matrix& rho, int system_dim, long env_dim);

// Largest population of any mode's top level n_max.
double top_level_population(const CompositeModel& composite, const Matrix& rho);

// correlated: exp(-beta H)/Z by dense eigendecomposition;
// factorized: canonical_state(system) (x) prod thermal oscillators.
Matrix thermal_composite_state(const CompositeModel& composite, double beta, bool correlated);

// Composite unitary propagation with the field on d (x) 1; records tr_E rho(t).
Trajectory propagate_exact(const CompositeModel& composite, const PulseSpectrum& spectrum, const Matrix& rho0,
                           const PropagatorConfig& config);

} // namespace oppc
