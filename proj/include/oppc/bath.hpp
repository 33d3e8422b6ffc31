// bath.hpp - Spectral densities, bath correlation functions, memory kernels and Markov rates

#pragma once

#include <variant>
#include <vector>

#include "oppc/system.hpp"

namespace oppc {

namespace spectral {
// w^2 J(w) = theta(w) j0 w^p exp(-w / w_c)
struct OhmicExp { double j0{1.0}; double p{1.0}; double omega_c{1.0}; };
// w^2 J(w) = theta(w) j0 w / (w^2 + w_D), denominator kept exactly as written
// in the model definition (w_D enters linearly).
struct Drude { double j0{1.0}; double omega_d{1.0}; };
// Samples of w^2 J(w) on increasing w_k > 0, linearly interpolated, zero outside.
struct Tabulated { RealVector omega; RealVector values; };
} // namespace spectral

using SpectralDensity = std::variant<spectral::OhmicExp, spectral::Drude, spectral::Tabulated>;

void validate(const SpectralDensity& j);

// w^2 J(w); zero for w <= 0.
double weighted_density(const SpectralDensity& j, double omega);
// lim w J(w) as w -> 0+, used for the coth(beta w / 2) w^2 J(w) -> (2 / beta) w J(w) limit.
double weighted_density_slope_at_zero(const SpectralDensity& j);
// Scale on which w^2 J(w) varies (w_c, sqrt(w_D), or the tabulated peak position).
double characteristic_frequency(const SpectralDensity& j);
// Frequency beyond which w^2 J(w) < 1e-12 * peak, capped at cap_factor * characteristic_frequency.
double integration_cutoff(const SpectralDensity& j, double cap_factor);

struct CorrelationOptions {
    double omega_max{0.0};        // 0 selects integration_cutoff
    double cap_factor{100.0};
    double tolerance{1e-8};       // successive-refinement agreement, relative to |C(0)|
    int max_refinements{5};
};

// C(t) tabulated on a uniform grid symmetric about t = 0 (index `zero()` holds t = 0).
struct CorrelationTable {
    RealVector t;
    Vector values;
    double beta{0.0};
    double eps_mem{1e-6};

    double dt() const { return t[1] - t[0]; }
    Eigen::Index zero() const { return (t.size() - 1) / 2; }
    Eigen::Index max_steps() const { return zero(); }
    double t_mem() const { return t[t.size() - 1]; }
    // C(k dt) for |k| <= max_steps().
    cplx at(Eigen::Index k) const { return values[zero() + k]; }
};

// C(t) = int_0^inf dw [cos(wt) coth(beta w / 2) - i sin(wt)] w^2 J(w) on a grid
// symmetric about zero.
CorrelationTable correlation_function(const SpectralDensity& j, double beta, const RealVector& t_grid,
                                      const CorrelationOptions& options = {});
// Convenience: grid k dt for |k| <= ceil(t_max / dt).
CorrelationTable correlation_function(const SpectralDensity& j, double beta, double dt, double t_max,
                                      const CorrelationOptions& options = {});

// Builds a symmetric table from already-centered samples C(k dt), k >= 0, using C(-t) = conj C(t).
CorrelationTable correlation_from_samples(double dt, const Vector& nonnegative, double beta,
                                          double eps_mem = 1e-6);

// Smallest grid-aligned T with |C(t)| < eps |C(0)| for every sampled t >= T.
double memory_time(const CorrelationTable& table, double eps);
// Table restricted to [-T_mem, T_mem] with T_mem = memory_time(table, eps); eps is stored.
CorrelationTable truncate_memory(const CorrelationTable& table, double eps = 1e-6);

// M_{ab,cd}(t) = sum_uv C_uv(t) K^u_ab K^v_cd at t = +-k dt, k = 0..steps.
class MemoryKernel {
public:
    MemoryKernel(int dim, double dt, Eigen::Index steps, double eps_mem);

    int dim() const noexcept { return dim_; }
    double dt() const noexcept { return dt_; }
    Eigen::Index steps() const noexcept { return steps_; }
    double t_mem() const noexcept { return dt_ * static_cast<double>(steps_); }
    double eps_mem() const noexcept { return eps_mem_; }

    // sign = +1 for M(+k dt), -1 for M(-k dt)
    cplx& at(int sign, Eigen::Index k, int a, int b, int c, int d) {
        return (sign > 0 ? plus_ : minus_)[index(k, a, b, c, d)];
    }
    cplx at(int sign, Eigen::Index k, int a, int b, int c, int d) const {
        return (sign > 0 ? plus_ : minus_)[index(k, a, b, c, d)];
    }
    double max_abs(Eigen::Index k) const;

private:
    std::size_t index(Eigen::Index k, int a, int b, int c, int d) const {
        return static_cast<std::size_t>(k) * block_ + static_cast<std::size_t>(((a * dim_ + b) * dim_ + c) * dim_ + d);
    }

    int dim_;
    double dt_;
    Eigen::Index steps_;
    double eps_mem_;
    std::size_t block_;
    std::vector<cplx> plus_;
    std::vector<cplx> minus_;
};

// General form: corr[u][v] holds C_uv for the system's coupling list.
MemoryKernel memory_kernel(const SystemModel& system, const std::vector<std::vector<CorrelationTable>>& corr);
// One centered correlation per bath group; C_uv = C_g when u and v share group g, else 0.
MemoryKernel memory_kernel(const SystemModel& system, const std::vector<CorrelationTable>& per_group);

// Distinct transition frequencies w_ab (grouped within kDegeneracyTol), ascending.
std::vector<double> transition_frequencies(const SystemModel& system);

// Gamma_{ab,cd}(w) = Re int_0^T_mem dtau exp(i w tau) M_{ab,cd}(tau), one block per frequency.
class RateTensor {
public:
    RateTensor(int dim, std::vector<double> frequencies);

    int dim() const noexcept { return dim_; }
    const std::vector<double>& frequencies() const noexcept { return freqs_; }
    int frequency_index(double omega) const; // FrequencyOffGrid when absent

    double& at(int f, int a, int b, int c, int d) { return values_[index(f, a, b, c, d)]; }
    double at(int f, int a, int b, int c, int d) const { return values_[index(f, a, b, c, d)]; }
    double operator()(int a, int b, int c, int d, double omega) const {
        return at(frequency_index(omega), a, b, c, d);
    }
    RateTensor scaled(double factor) const;

private:
    std::size_t index(int f, int a, int b, int c, int d) const {
        return static_cast<std::size_t>(f) * block_ + static_cast<std::size_t>(((a * dim_ + b) * dim_ + c) * dim_ + d);
    }

    int dim_;
    std::vector<double> freqs_;
    std::size_t block_;
    std::vector<double> values_;
};

RateTensor markov_rates(const MemoryKernel& kernel, const std::vector<double>& frequencies);

} // namespace oppc
