// propagators.hpp - Unitary, non-Markovian, Redfield and secular engines plus the
// perturbative cascade in the field.
//
// Superoperators act on vec(rho) with row-major index a * N + b.

#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "oppc/bath.hpp"
#include "oppc/laser.hpp"
#include "oppc/oracle.hpp"
#include "oppc/trajectory.hpp"

namespace oppc {

inline constexpr double kMaxPhasePerStep = 0.1;

// The dissipative ingredients an engine needs; the method tag selects which.
struct Engine {
    Method method{Method::Unitary};
    std::shared_ptr<const MemoryKernel> kernel; // NonMarkovian
    std::shared_ptr<const RateTensor> rates;    // RedfieldNonSecular / RedfieldSecular
};

// -i[H_M, .] as an N^2 x N^2 matrix.
Matrix liouvillian(const SystemModel& system);

// Markovian dissipator D with rho_dot = ... - D vec(rho), built from real Gamma.
// secular = true keeps only (ab) <- (cd) elements with |w_ab - w_cd| <= 1e-9.
Matrix redfield_dissipator(const SystemModel& system, const RateTensor& rates, bool secular);

// Memory superoperator S(tau_k) such that the memory term is
// - int dtau S(tau) vec(rho(t - tau)); one matrix per kernel step.
std::vector<Matrix> memory_superoperators(const SystemModel& system, const MemoryKernel& kernel);

// Field-free time-local generator: Unitary and Redfield engines exactly, the
// non-Markovian engine in its long-time form L - int_0^T_mem S(tau) dtau.
Matrix field_free_generator(const SystemModel& system, const Engine& engine);

// Unit-trace solution of G rho + I = 0. When G has several zero modes (a level
// untouched by the bath), the solution closest to `reference` is returned.
Matrix stationary_state(const SystemModel& system, const Engine& engine, const Matrix* inhomogeneity = nullptr,
                        const Matrix* reference = nullptr);

// Checks dt against the fastest oscillation (and T_mem / 20 for NonMarkovian).
void check_step(const SystemModel& system, const Engine& engine, const PropagatorConfig& config);

Trajectory propagate_unitary(const SystemModel& system, const PulseSpectrum& spectrum, const Matrix& rho0,
                             const PropagatorConfig& config);

Trajectory propagate_nonmarkovian(const SystemModel& system, const PulseSpectrum& spectrum,
                                  const MemoryKernel& kernel, const Matrix& rho0, const PropagatorConfig& config,
                                  const Matrix* inhomogeneity = nullptr);

Trajectory propagate_redfield_nonsecular(const SystemModel& system, const PulseSpectrum& spectrum,
                                         const RateTensor& rates, const Matrix& rho0,
                                         const PropagatorConfig& config, const Matrix* inhomogeneity = nullptr);

Trajectory propagate_secular(const SystemModel& system, const PulseSpectrum& spectrum, const RateTensor& rates,
                             const Matrix& rho0, const PropagatorConfig& config,
                             const Matrix* inhomogeneity = nullptr);

// Dispatch on engine.method.
Trajectory propagate(const SystemModel& system, const PulseSpectrum& spectrum, const Engine& engine,
                     const Matrix& rho0, const PropagatorConfig& config, const Matrix* inhomogeneity = nullptr);

struct PureStart { int level{0}; };
struct ThermalStart { double beta{1.0}; };
using InitialCondition = std::variant<PureStart, ThermalStart>;

// Long-time first-order-amplitude density matrix for a pure or canonical start:
// rho_ab = (2 pi)^2 s^2 sum_n p_n d_an conj(d_bn) eps(w_an) conj(eps(w_bn))
//          exp(-i w_ab t) exp(i z/c (w_an - w_bn)),
// with s the field scale. Only the laser-excited block is returned; the
// initial populations themselves are not included.
Matrix closed_form_rho1(const SystemModel& system, const PulseSpectrum& spectrum, const InitialCondition& initial,
                        double t);

// rho^(0), rho^(1), rho^(2) with rho^(n) driven by the field acting on
// rho^(n-1). The inhomogeneity, when given, enters the field-free order only.
Trajectory perturbative_cascade(const SystemModel& system, const PulseSpectrum& spectrum, const Engine& engine,
                                const Matrix& rho_eq, int order, const PropagatorConfig& config,
                                const Matrix* inhomogeneity = nullptr);

// I_ab = -i <a| tr_E([H^ME, rho_ME] - [H^ME, rho_M (x) rho_E]) |b>.
Matrix initial_correlation_term(const CompositeModel& composite, const Matrix& rho_me);

// tr_E exp(-beta H_tot) / Z' for the composite.
DensityMatrix stationary_correlated_state(const CompositeModel& composite, double beta);

} // namespace oppc
