// bath.cpp - Correlation-function quadrature, memory kernel assembly and Markov rate constants

#include "oppc/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace oppc {

namespace {

struct Node {
    double omega;
    double weight;
};

// Composite Simpson nodes over geometric panels [0, w/4, w/2, w, 2w, ...] up to omega_max.
std::vector<Node> simpson_nodes(double w_char, double omega_max, double h_max, int refine) {
    std::vector<double> breaks{0.0};
    for (double b = 0.25 * w_char; b < omega_max; b *= 2.0) breaks.push_back(b);
    breaks.push_back(omega_max);

    std::vector<Node> nodes;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double lo = breaks[p], hi = breaks[p + 1];
        const double width = hi - lo;
        int m = std::max(16, static_cast<int>(std::ceil(width / h_max)));
        m += m % 2;
        m <<= refine;
        const double h = width / m;
        for (int i = 0; i <= m; ++i) {
            const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            // shared panel edges are merged by summing weights of the duplicate node
            if (i == 0 && !nodes.empty()) {
                nodes.back().weight += w * h / 3.0;
                continue;
            }
            nodes.push_back(Node{lo + i * h, w * h / 3.0});
        }
    }
    return nodes;
}

// Nonnegative half C(k dt), k = 0..steps, for one set of quadrature nodes.
Vector correlation_half(const SpectralDensity& j, double beta, double dt, Eigen::Index steps,
                        const std::vector<Node>& nodes) {
    Vector out = Vector::Zero(steps + 1);
    const double slope0 = weighted_density_slope_at_zero(j);
    constexpr Eigen::Index kBlock = 64;
    for (const auto& node : nodes) {
        const double w = node.omega;
        const double s = weighted_density(j, w);
        double a; // coth(beta w / 2) w^2 J(w)
        if (std::isinf(beta)) {
            a = s;
        } else if (w == 0.0) {
            a = 2.0 / beta * slope0;
        } else if (0.5 * beta * w < 1e-6) {
            a = 2.0 / beta * (s / w);
        } else {
            a = s / std::tanh(0.5 * beta * w);
        }
        if (a == 0.0 && s == 0.0) continue;
        const cplx step = std::polar(1.0, w * dt);
        cplx z;
        for (Eigen::Index k = 0; k <= steps; ++k) {
            if (k % kBlock == 0) z = std::polar(1.0, w * dt * static_cast<double>(k));
            out[k] += node.weight * cplx(a * z.real(), -s * z.imag());
            z *= step;
        }
    }
    out[0] = cplx(out[0].real(), 0.0); // sin(0) = 0 exactly
    return out;
}

} // namespace

void validate(const SpectralDensity& j) {
    struct Visitor {
        void operator()(const spectral::OhmicExp& o) {
            require(o.j0 > 0 && o.p > 0 && o.omega_c > 0, ErrorKind::InvalidArgument,
                    "ohmic_exp parameters must be strictly positive");
        }
        void operator()(const spectral::Drude& d) {
            require(d.j0 > 0 && d.omega_d > 0, ErrorKind::InvalidArgument, "drude parameters must be strictly positive");
        }
        void operator()(const spectral::Tabulated& t) {
            require(t.omega.size() >= 2 && t.omega.size() == t.values.size(), ErrorKind::DimensionMismatch,
                    "tabulated spectral density needs matching omega/value columns");
            require(t.omega[0] > 0.0, ErrorKind::InvalidArgument, "tabulated spectral density must start at w > 0");
            for (Eigen::Index k = 1; k < t.omega.size(); ++k)
                require(t.omega[k] > t.omega[k - 1], ErrorKind::InvalidArgument, "tabulated omega must increase");
            require((t.values.array() >= 0.0).all(), ErrorKind::InvalidArgument, "w^2 J(w) must be non-negative");
        }
    };
    std::visit(Visitor{}, j);
}

double weighted_density(const SpectralDensity& j, double omega) {
    if (!(omega > 0.0)) return 0.0;
    struct Visitor {
        double w;
        double operator()(const spectral::OhmicExp& o) const { return o.j0 * std::pow(w, o.p) * std::exp(-w / o.omega_c); }
        double operator()(const spectral::Drude& d) const { return d.j0 * w / (w * w + d.omega_d); }
        double operator()(const spectral::Tabulated& t) const {
            const auto n = t.omega.size();
            if (w < t.omega[0] || w > t.omega[n - 1]) {
                // linear ramp from the origin up to the first sample
                return w < t.omega[0] ? t.values[0] * w / t.omega[0] : 0.0;
            }
            const auto it = std::upper_bound(t.omega.data(), t.omega.data() + n, w);
            const auto k = std::clamp<Eigen::Index>(it - t.omega.data() - 1, 0, n - 2);
            const double f = (w - t.omega[k]) / (t.omega[k + 1] - t.omega[k]);
            return (1.0 - f) * t.values[k] + f * t.values[k + 1];
        }
    };
    return std::visit(Visitor{omega}, j);
}

double weighted_density_slope_at_zero(const SpectralDensity& j) {
    struct Visitor {
        double operator()(const spectral::OhmicExp& o) const {
            if (o.p > 1.0) return 0.0;
            if (o.p == 1.0) return o.j0;
            return 0.0; // integrable w^(p-1) singularity; node at w = 0 carries zero weight in the limit
        }
        double operator()(const spectral::Drude& d) const { return d.j0 / d.omega_d; }
        double operator()(const spectral::Tabulated& t) const { return t.values[0] / t.omega[0]; }
    };
    return std::visit(Visitor{}, j);
}

double characteristic_frequency(const SpectralDensity& j) {
    struct Visitor {
        double operator()(const spectral::OhmicExp& o) const { return o.omega_c; }
        double operator()(const spectral::Drude& d) const { return std::sqrt(d.omega_d); }
        double operator()(const spectral::Tabulated& t) const {
            Eigen::Index k;
            t.values.maxCoeff(&k);
            return t.omega[k];
        }
    };
    return std::visit(Visitor{}, j);
}

double integration_cutoff(const SpectralDensity& j, double cap_factor) {
    validate(j);
    const double wc = characteristic_frequency(j);
    const double cap = cap_factor * wc;
    if (const auto* t = std::get_if<spectral::Tabulated>(&j)) return std::min(cap, t->omega[t->omega.size() - 1]);
    double peak = 0.0;
    const double h = wc / 50.0;
    for (double w = h; w <= cap; w += h) peak = std::max(peak, weighted_density(j, w));
    double last_above = h;
    for (double w = h; w <= cap; w += h)
        if (weighted_density(j, w) >= 1e-12 * peak) last_above = w;
    return std::min(cap, last_above + h);
}

CorrelationTable correlation_function(const SpectralDensity& j, double beta, const RealVector& t_grid,
                                      const CorrelationOptions& options) {
    require(beta > 0.0, ErrorKind::NonPositiveBeta, "beta must be positive");
    validate(j);
    const auto n = t_grid.size();
    require(n >= 3 && n % 2 == 1, ErrorKind::InvalidArgument, "correlation grid must be odd-sized and symmetric");
    const Eigen::Index zero = (n - 1) / 2;
    const double dt = t_grid[1] - t_grid[0];
    require(dt > 0.0 && std::abs(t_grid[zero]) <= 1e-12 * dt, ErrorKind::InvalidArgument,
            "correlation grid must be uniform and centered on t = 0");
    for (Eigen::Index k = 0; k < n; ++k)
        require(std::abs(t_grid[k] - (k - zero) * dt) <= 1e-9 * dt * std::max<double>(1.0, std::abs(k - zero)),
                ErrorKind::InvalidArgument, "correlation grid must be uniform and symmetric");

    const double t_max = dt * static_cast<double>(zero);
    const double omega_max = options.omega_max > 0.0 ? options.omega_max : integration_cutoff(j, options.cap_factor);
    const double h_max = 2.0 * 3.141592653589793 / (12.0 * std::max(t_max, 1e-12));

    Vector half = correlation_half(j, beta, dt, zero, simpson_nodes(characteristic_frequency(j), omega_max, h_max, 0));
    bool converged = false;
    double disagreement = 0.0;
    for (int r = 1; r <= options.max_refinements; ++r) {
        Vector finer = correlation_half(j, beta, dt, zero, simpson_nodes(characteristic_frequency(j), omega_max, h_max, r));
        const double scale = std::max(std::abs(finer[0]), std::numeric_limits<double>::min());
        disagreement = (finer - half).cwiseAbs().maxCoeff() / scale;
        half = std::move(finer);
        if (disagreement <= options.tolerance) {
            converged = true;
            break;
        }
    }
    require(converged, ErrorKind::QuadratureNonConvergent,
            "successive refinements disagree by " + std::to_string(disagreement));

    CorrelationTable table;
    table.t = t_grid;
    table.beta = beta;
    table.values = Vector(n);
    for (Eigen::Index k = 0; k <= zero; ++k) {
        table.values[zero + k] = half[k];
        table.values[zero - k] = std::conj(half[k]);
    }
    return table;
}

CorrelationTable correlation_function(const SpectralDensity& j, double beta, double dt, double t_max,
                                      const CorrelationOptions& options) {
    require(dt > 0.0 && t_max > 0.0, ErrorKind::InvalidArgument, "dt and t_max must be positive");
    const auto steps = static_cast<Eigen::Index>(std::ceil(t_max / dt - 1e-9));
    RealVector t(2 * steps + 1);
    for (Eigen::Index k = -steps; k <= steps; ++k) t[k + steps] = dt * static_cast<double>(k);
    return correlation_function(j, beta, t, options);
}

CorrelationTable correlation_from_samples(double dt, const Vector& nonnegative, double beta, double eps_mem) {
    require(dt > 0.0 && nonnegative.size() >= 2, ErrorKind::InvalidArgument, "need dt > 0 and >= 2 samples");
    const Eigen::Index steps = nonnegative.size() - 1;
    CorrelationTable table;
    table.t = RealVector(2 * steps + 1);
    table.values = Vector(2 * steps + 1);
    for (Eigen::Index k = -steps; k <= steps; ++k) {
        table.t[k + steps] = dt * static_cast<double>(k);
        table.values[k + steps] = k >= 0 ? nonnegative[k] : std::conj(nonnegative[-k]);
    }
    table.values[steps] = cplx(nonnegative[0].real(), 0.0);
    table.beta = beta;
    table.eps_mem = eps_mem;
    return table;
}

double memory_time(const CorrelationTable& table, double eps) {
    const double c0 = std::abs(table.at(0));
    Eigen::Index last = 0;
    for (Eigen::Index k = table.max_steps(); k >= 1; --k) {
        if (std::abs(table.at(k)) >= eps * c0) {
            last = k;
            break;
        }
    }
    const Eigen::Index steps = std::min(table.max_steps(), last + 1);
    return table.dt() * static_cast<double>(steps);
}

CorrelationTable truncate_memory(const CorrelationTable& table, double eps) {
    const auto steps = static_cast<Eigen::Index>(std::llround(memory_time(table, eps) / table.dt()));
    CorrelationTable out;
    out.t = table.t.segment(table.zero() - steps, 2 * steps + 1);
    out.values = table.values.segment(table.zero() - steps, 2 * steps + 1);
    out.beta = table.beta;
    out.eps_mem = eps;
    return out;
}

MemoryKernel::MemoryKernel(int dim, double dt, Eigen::Index steps, double eps_mem)
    : dim_(dim), dt_(dt), steps_(steps), eps_mem_(eps_mem),
      block_(static_cast<std::size_t>(dim) * dim * dim * dim),
      plus_(block_ * static_cast<std::size_t>(steps + 1)),
      minus_(block_ * static_cast<std::size_t>(steps + 1)) {}

double MemoryKernel::max_abs(Eigen::Index k) const {
    double m = 0.0;
    for (std::size_t i = 0; i < block_; ++i) {
        m = std::max(m, std::abs(plus_[static_cast<std::size_t>(k) * block_ + i]));
        m = std::max(m, std::abs(minus_[static_cast<std::size_t>(k) * block_ + i]));
    }
    return m;
}

MemoryKernel memory_kernel(const SystemModel& system, const std::vector<std::vector<CorrelationTable>>& corr) {
    const auto& ks = system.couplings();
    const auto nu = ks.size();
    require(corr.size() == nu, ErrorKind::DimensionMismatch, "need one correlation row per coupling operator");
    const CorrelationTable* ref = nullptr;
    for (const auto& row : corr) {
        require(row.size() == nu, ErrorKind::DimensionMismatch, "need one correlation per coupling pair");
        for (const auto& c : row) {
            if (!ref) ref = &c;
            require(c.t.size() == ref->t.size() && std::abs(c.dt() - ref->dt()) <= 1e-12 * ref->dt(),
                    ErrorKind::GridMismatch, "correlation tables must share a time grid");
        }
    }
    const int n = system.dim();
    if (!ref) return MemoryKernel(n, 1.0, 1, 1e-6);

    MemoryKernel kernel(n, ref->dt(), ref->max_steps(), ref->eps_mem);
    for (Eigen::Index k = 0; k <= kernel.steps(); ++k) {
        for (std::size_t u = 0; u < nu; ++u) {
            for (std::size_t v = 0; v < nu; ++v) {
                const cplx cp = corr[u][v].at(k);
                const cplx cm = corr[u][v].at(-k);
                if (cp == cplx(0.0) && cm == cplx(0.0)) continue;
                const Matrix& ku = ks[u].op;
                const Matrix& kv = ks[v].op;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        if (ku(a, b) == cplx(0.0)) continue;
                        for (int c = 0; c < n; ++c)
                            for (int d = 0; d < n; ++d) {
                                const cplx kk = ku(a, b) * kv(c, d);
                                kernel.at(+1, k, a, b, c, d) += cp * kk;
                                kernel.at(-1, k, a, b, c, d) += cm * kk;
                            }
                    }
            }
        }
    }
    return kernel;
}

MemoryKernel memory_kernel(const SystemModel& system, const std::vector<CorrelationTable>& per_group) {
    const auto& ks = system.couplings();
    require(static_cast<int>(per_group.size()) >= system.bath_groups(), ErrorKind::DimensionMismatch,
            "one correlation table per bath group is required");
    if (ks.empty()) return MemoryKernel(system.dim(), per_group.empty() ? 1.0 : per_group[0].dt(), 1, 1e-6);
    CorrelationTable zero = per_group[ks[0].bath_group];
    zero.values.setZero();
    std::vector<std::vector<CorrelationTable>> corr(ks.size(), std::vector<CorrelationTable>(ks.size(), zero));
    for (std::size_t u = 0; u < ks.size(); ++u)
        for (std::size_t v = 0; v < ks.size(); ++v)
            if (ks[u].bath_group == ks[v].bath_group) corr[u][v] = per_group[ks[u].bath_group];
    return memory_kernel(system, corr);
}

std::vector<double> transition_frequencies(const SystemModel& system) {
    std::vector<double> all;
    for (int a = 0; a < system.dim(); ++a)
        for (int b = 0; b < system.dim(); ++b) all.push_back(system.omega(a, b));
    std::sort(all.begin(), all.end());
    std::vector<double> distinct;
    for (double w : all)
        if (distinct.empty() || w - distinct.back() > kDegeneracyTol) distinct.push_back(w);
    return distinct;
}

RateTensor::RateTensor(int dim, std::vector<double> frequencies)
    : dim_(dim), freqs_(std::move(frequencies)),
      block_(static_cast<std::size_t>(dim) * dim * dim * dim), values_(block_ * freqs_.size(), 0.0) {}

int RateTensor::frequency_index(double omega) const {
    for (std::size_t f = 0; f < freqs_.size(); ++f)
        if (std::abs(freqs_[f] - omega) <= kDegeneracyTol) return static_cast<int>(f);
    fail(ErrorKind::FrequencyOffGrid, "no rate block for w = " + std::to_string(omega));
}

RateTensor RateTensor::scaled(double factor) const {
    RateTensor out = *this;
    for (auto& v : out.values_) v *= factor;
    return out;
}

RateTensor markov_rates(const MemoryKernel& kernel, const std::vector<double>& frequencies) {
    const int n = kernel.dim();
    const Eigen::Index steps = kernel.steps();
    const double m0 = kernel.max_abs(0);
    require(kernel.max_abs(steps) <= kernel.eps_mem() * m0 * (1.0 + 1e-9), ErrorKind::KernelNotDecayed,
            "|M(T_mem)| exceeds eps_mem |M(0)|");

    RateTensor rates(n, frequencies);
    const double dt = kernel.dt();
    for (std::size_t f = 0; f < frequencies.size(); ++f) {
        Vector weights(steps + 1);
        for (Eigen::Index k = 0; k <= steps; ++k) {
            const double w = (k == 0 || k == steps) ? 0.5 * dt : dt;
            weights[k] = w * std::polar(1.0, frequencies[f] * dt * static_cast<double>(k));
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        cplx sum = 0.0;
                        for (Eigen::Index k = 0; k <= steps; ++k) sum += weights[k] * kernel.at(+1, k, a, b, c, d);
                        rates.at(static_cast<int>(f), a, b, c, d) = sum.real();
                    }
    }
    return rates;
}

} // namespace oppc
