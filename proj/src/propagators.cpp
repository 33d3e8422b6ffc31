// propagators.cpp - Time-local and memory engines, perturbative cascade, correlated initial states

#include "oppc/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "rk4.hpp"

namespace oppc {

std::string to_string(Method m) {
    switch (m) {
        case Method::Unitary: return "unitary";
        case Method::NonMarkovian: return "nonmarkovian";
        case Method::RedfieldNonSecular: return "redfield_nonsecular";
        case Method::RedfieldSecular: return "redfield_secular";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "unitary") return Method::Unitary;
    if (name == "nonmarkovian") return Method::NonMarkovian;
    if (name == "redfield_nonsecular") return Method::RedfieldNonSecular;
    if (name == "redfield_secular") return Method::RedfieldSecular;
    fail(ErrorKind::ValidationError, "unknown engine method '" + name + "'");
}

Eigen::Index PropagatorConfig::steps() const {
    require(dt > 0.0, ErrorKind::InvalidArgument, "dt must be positive");
    require(t_end >= t0, ErrorKind::InvalidArgument, "t_end must not precede t0");
    return static_cast<Eigen::Index>(std::llround((t_end - t0) / dt));
}

Matrix Trajectory::total(Eigen::Index step) const {
    Matrix sum = orders[0][step];
    for (std::size_t n = 1; n < orders.size(); ++n) sum += orders[n][step];
    return sum;
}

RealVector Trajectory::population(int a, int order) const {
    RealVector p(t.size());
    for (Eigen::Index k = 0; k < t.size(); ++k)
        p[k] = (order < 0 ? total(k) : orders[order][k])(a, a).real();
    return p;
}

RealVector Trajectory::order_observable(const Matrix& observable, int order) const {
    RealVector o(t.size());
    for (Eigen::Index k = 0; k < t.size(); ++k) o[k] = expectation(observable, orders[order][k]);
    return o;
}

namespace {

Vector vec(const Matrix& m) {
    const auto n = m.rows();
    Vector v(n * n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) v[a * n + b] = m(a, b);
    return v;
}

Matrix unvec(const Eigen::Ref<const Vector>& v, Eigen::Index n) {
    Matrix m(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) m(a, b) = v[a * n + b];
    return m;
}

double min_eigenvalue(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

// Shared machinery: a stack of components (one per perturbative order, or a
// single self-driven component) with a time-local generator, an optional
// memory term and the dipole drive.
class Dynamics {
public:
    Dynamics(const SystemModel& system, const Engine& engine, const PulseSpectrum& spectrum,
             const PropagatorConfig& config, int components, bool self_driven, const Matrix* inhomogeneity)
        : system_(system), n_(system.dim()), config_(config), components_(components), self_driven_(self_driven) {
        check_step(system, engine, config);
        steps_ = config.steps();
        field_ = scaled_field_samples(spectrum, config.t0, 0.5 * config.dt, 2 * steps_ + 1);
        switch (engine.method) {
            case Method::Unitary: local_ = liouvillian(system); break;
            case Method::RedfieldNonSecular:
            case Method::RedfieldSecular:
                require(engine.rates != nullptr, ErrorKind::InvalidArgument, "Redfield engines need a rate tensor");
                local_ = liouvillian(system) -
                         redfield_dissipator(system, *engine.rates, engine.method == Method::RedfieldSecular);
                break;
            case Method::NonMarkovian:
                require(engine.kernel != nullptr, ErrorKind::InvalidArgument, "non-Markovian engine needs a kernel");
                local_ = liouvillian(system);
                // an identically zero kernel leaves the closed dynamics and its integrator
                for (Eigen::Index k = 0; k <= engine.kernel->steps(); ++k)
                    if (engine.kernel->max_abs(k) > 0.0) {
                        memory_ = memory_superoperators(system, *engine.kernel);
                        break;
                    }
                break;
        }
        if (inhomogeneity) {
            require(inhomogeneity->rows() == n_ && inhomogeneity->cols() == n_, ErrorKind::DimensionMismatch,
                    "inhomogeneity must be N x N");
            inhomogeneity_ = vec(*inhomogeneity);
        }
    }

    Eigen::Index steps() const { return steps_; }
    Eigen::Index block() const { return n_ * n_; }
    bool has_memory() const { return !memory_.empty(); }

    // Time-local part plus drive at half-step index m.
    Vector local_rhs(Eigen::Index m, const Vector& y) const {
        const Eigen::Index nn = block();
        Vector dy(y.size());
        const double e = field_[m];
        for (int c = 0; c < components_; ++c) {
            auto out = dy.segment(c * nn, nn);
            out.noalias() = local_ * y.segment(c * nn, nn);
            if (c == 0 && inhomogeneity_.size()) out += inhomogeneity_;
            if (e != 0.0) {
                const int source = self_driven_ ? c : c - 1;
                if (source >= 0) out += drive(e, y.segment(source * nn, nn));
            }
        }
        return dy;
    }

    // - int_0^{min(t - t0, T_mem)} S(tau) y(t - tau) dtau with y(t) = current and
    // y(t - j dt) = history[i - j]; trapezoid on nodes every history_stride steps.
    Vector memory_rhs(Eigen::Index i, const Vector& current, const std::vector<Vector>& history) const {
        Vector acc = Vector::Zero(current.size());
        const auto kmax = static_cast<Eigen::Index>(memory_.size()) - 1;
        const Eigen::Index span = std::min(i, kmax);
        if (span == 0) return acc;
        const Eigen::Index s = std::max(1, config_.history_stride);
        const double dt = config_.dt;
        std::vector<std::pair<Eigen::Index, double>> nodes;
        Eigen::Index last = 0;
        nodes.emplace_back(0, 0.0);
        for (Eigen::Index j = s; j <= span; j += s) {
            nodes.back().second += 0.5 * s * dt;
            nodes.emplace_back(j, 0.5 * s * dt);
            last = j;
        }
        if (last < span) {
            const double h = static_cast<double>(span - last) * dt;
            nodes.back().second += 0.5 * h;
            nodes.emplace_back(span, 0.5 * h);
        }
        const Eigen::Index nn = block();
        for (const auto& [j, w] : nodes) {
            const Vector& y = (j == 0) ? current : history[static_cast<std::size_t>(i - j)];
            for (int c = 0; c < components_; ++c) acc.segment(c * nn, nn).noalias() -= w * (memory_[j] * y.segment(c * nn, nn));
        }
        return acc;
    }

private:
    Vector drive(double e, const Eigen::Ref<const Vector>& x) const {
        // i e [d, X]
        const Matrix xm = unvec(x, n_);
        const Matrix& d = system_.dipole();
        return vec(cplx(0.0, e) * (d * xm - xm * d));
    }

    const SystemModel& system_;
    Eigen::Index n_;
    PropagatorConfig config_;
    int components_;
    bool self_driven_;
    Eigen::Index steps_{0};
    RealVector field_;
    Matrix local_;
    std::vector<Matrix> memory_;
    Vector inhomogeneity_;
};

Trajectory run(const SystemModel& system, const PulseSpectrum& spectrum, const Engine& engine,
               const std::vector<Matrix>& initial, bool self_driven, const PropagatorConfig& config,
               const Matrix* inhomogeneity) {
    const int components = static_cast<int>(initial.size());
    Dynamics dyn(system, engine, spectrum, config, components, self_driven, inhomogeneity);
    const Eigen::Index n = system.dim();
    const Eigen::Index nn = n * n;
    const Eigen::Index steps = dyn.steps();
    const double dt = config.dt;
    const double trace_tol = engine.method == Method::NonMarkovian ? 1e-6 : 1e-8;
    if (inhomogeneity)
        require(std::abs(inhomogeneity->trace()) <= 1e-10, ErrorKind::InvalidArgument, "inhomogeneity must be traceless");

    Vector y(components * nn);
    for (int c = 0; c < components; ++c) y.segment(c * nn, nn) = vec(initial[c]);

    Trajectory traj;
    traj.t = RealVector(steps + 1);
    traj.orders.assign(components, std::vector<Matrix>(steps + 1));
    traj.observable = RealVector(steps + 1);
    traj.min_eigenvalue = RealVector(steps + 1);

    auto record = [&](Eigen::Index i, const Vector& state) {
        traj.t[i] = config.t0 + dt * static_cast<double>(i);
        Matrix sum = Matrix::Zero(n, n);
        for (int c = 0; c < components; ++c) {
            traj.orders[c][i] = unvec(state.segment(c * nn, nn), n);
            sum += traj.orders[c][i];
        }
        const double tr0 = traj.orders[0][i].trace().real();
        require(std::abs(tr0 - 1.0) <= trace_tol, ErrorKind::TraceDrift,
                "|tr rho - 1| = " + std::to_string(std::abs(tr0 - 1.0)) + " at t = " + std::to_string(traj.t[i]));
        for (int c = 1; c < components; ++c)
            require(std::abs(traj.orders[c][i].trace()) <= 1e-8, ErrorKind::TraceDrift,
                    "correction of order " + std::to_string(c) + " acquired a trace");
        traj.observable[i] = expectation(system.observable(), Matrix(0.5 * (sum + sum.adjoint())));
        traj.min_eigenvalue[i] = min_eigenvalue(sum);
    };

    record(0, y);
    if (!dyn.has_memory()) {
        for (Eigen::Index i = 0; i < steps; ++i) {
            y = detail::rk4_step(y, dt, [&](int stage, const Vector& x) { return dyn.local_rhs(2 * i + stage, x); });
            record(i + 1, y);
        }
        return traj;
    }

    // Heun predictor-corrector with trapezoidal history quadrature.
    std::vector<Vector> history;
    history.reserve(static_cast<std::size_t>(steps + 1));
    history.push_back(y);
    for (Eigen::Index i = 0; i < steps; ++i) {
        const Vector f0 = dyn.local_rhs(2 * i, y) + dyn.memory_rhs(i, y, history);
        const Vector predictor = y + dt * f0;
        history.push_back(predictor); // slot i + 1 is only read with j >= 1 from step i + 2 on
        const Vector f1 = dyn.local_rhs(2 * i + 2, predictor) + dyn.memory_rhs(i + 1, predictor, history);
        y = y + (0.5 * dt) * (f0 + f1);
        history.back() = y;
        record(i + 1, y);
    }
    return traj;
}

} // namespace

Matrix liouvillian(const SystemModel& system) {
    const int n = system.dim();
    Matrix l = Matrix::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) l(a * n + b, a * n + b) = cplx(0.0, -system.omega(a, b));
    return l;
}

Matrix redfield_dissipator(const SystemModel& system, const RateTensor& rates, bool secular) {
    const int n = system.dim();
    require(rates.dim() == n, ErrorKind::DimensionMismatch, "rate tensor dimension differs from system");
    Matrix r = Matrix::Zero(n * n, n * n);
    auto w = [&](int a, int b) { return system.omega(a, b); };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int row = a * n + b;
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    // Gamma_{bd,dc}(w_cd) rho_ac
                    r(row, a * n + c) += rates(b, d, d, c, w(c, d));
                    // Gamma_{ac,cd}(w_dc) rho_db
                    r(row, d * n + b) += rates(a, c, c, d, w(d, c));
                    // -[Gamma_{ca,bd}(w_db) + Gamma_{db,ac}(w_ca)] rho_cd
                    r(row, c * n + d) -= rates(c, a, b, d, w(d, b)) + rates(d, b, a, c, w(c, a));
                }
        }
    if (secular) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d)
                        if (std::abs(w(a, b) - w(c, d)) > kDegeneracyTol) r(a * n + b, c * n + d) = 0.0;
    }
    return r;
}

std::vector<Matrix> memory_superoperators(const SystemModel& system, const MemoryKernel& kernel) {
    const int n = system.dim();
    require(kernel.dim() == n, ErrorKind::DimensionMismatch, "kernel dimension differs from system");
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(kernel.steps() + 1));
    auto w = [&](int a, int b) { return system.omega(a, b); };
    for (Eigen::Index k = 0; k <= kernel.steps(); ++k) {
        const double tau = kernel.dt() * static_cast<double>(k);
        auto e = [&](int a, int b) { return std::polar(1.0, w(a, b) * tau); };
        Matrix s = Matrix::Zero(n * n, n * n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const int row = a * n + b;
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        // M_{cd,db}(-tau) e^{i w_da tau} rho_ac(t - tau)
                        s(row, a * n + c) += kernel.at(-1, k, c, d, d, b) * e(d, a);
                        // M_{ac,cd}(tau) e^{i w_bc tau} rho_db(t - tau)
                        s(row, d * n + b) += kernel.at(+1, k, a, c, c, d) * e(b, c);
                        // -[M_{db,ac}(-tau) e^{i w_bc tau} + M_{db,ac}(tau) e^{i w_da tau}] rho_cd(t - tau)
                        s(row, c * n + d) -= kernel.at(-1, k, d, b, a, c) * e(b, c) + kernel.at(+1, k, d, b, a, c) * e(d, a);
                    }
            }
        out.push_back(std::move(s));
    }
    return out;
}

Matrix field_free_generator(const SystemModel& system, const Engine& engine) {
    switch (engine.method) {
        case Method::Unitary: return liouvillian(system);
        case Method::RedfieldNonSecular:
        case Method::RedfieldSecular:
            require(engine.rates != nullptr, ErrorKind::InvalidArgument, "Redfield engines need a rate tensor");
            return liouvillian(system) -
                   redfield_dissipator(system, *engine.rates, engine.method == Method::RedfieldSecular);
        case Method::NonMarkovian: {
            require(engine.kernel != nullptr, ErrorKind::InvalidArgument, "non-Markovian engine needs a kernel");
            const auto s = memory_superoperators(system, *engine.kernel);
            Matrix g = liouvillian(system);
            const double dt = engine.kernel->dt();
            for (std::size_t k = 0; k < s.size(); ++k) {
                const double w = (k == 0 || k + 1 == s.size()) ? 0.5 * dt : dt;
                g -= w * s[k];
            }
            return g;
        }
    }
    return liouvillian(system);
}

Matrix stationary_state(const SystemModel& system, const Engine& engine, const Matrix* inhomogeneity,
                        const Matrix* reference) {
    const int n = system.dim();
    const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
    const Matrix g = field_free_generator(system, engine);

    // Conserved quantities are the left zero modes of G; the stationary state
    // inherits their values from the reference (or unit trace alone).
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU);
    const RealVector& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv[0]);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > cut) ++rank;
    Matrix constraints;
    Vector values;
    if (nn - rank <= 1 || reference == nullptr) {
        require(nn - rank <= 1, ErrorKind::InvalidArgument,
                "generator has several stationary states; a reference state is required");
        constraints = Matrix::Zero(1, nn);
        for (int k = 0; k < n; ++k) constraints(0, k * n + k) = 1.0;
        values = Vector::Constant(1, 1.0);
    } else {
        require(reference->rows() == n && reference->cols() == n, ErrorKind::DimensionMismatch,
                "reference state must be N x N");
        constraints = svd.matrixU().rightCols(nn - rank).adjoint();
        values = constraints * vec(*reference / reference->trace());
    }
    Matrix a(nn + constraints.rows(), nn);
    a.topRows(nn) = g;
    a.bottomRows(constraints.rows()) = constraints;
    Vector rhs = Vector::Zero(a.rows());
    if (inhomogeneity) rhs.head(nn) = -vec(*inhomogeneity);
    rhs.tail(values.size()) = values;
    Matrix rho = unvec(a.completeOrthogonalDecomposition().solve(rhs), n);
    rho = 0.5 * (rho + rho.adjoint());
    return rho / rho.trace().real();
}

void check_step(const SystemModel& system, const Engine& engine, const PropagatorConfig& config) {
    require(config.dt > 0.0, ErrorKind::StepTooLarge, "dt must be positive");
    require(config.dt * system.max_transition() <= kMaxPhasePerStep * (1.0 + 1e-12), ErrorKind::StepTooLarge,
            "dt * max|w_ab| exceeds 0.1");
    require(config.history_stride >= 1, ErrorKind::InvalidArgument, "history_stride must be >= 1");
    if (engine.method == Method::NonMarkovian && engine.kernel) {
        require(std::abs(engine.kernel->dt() - config.dt) <= 1e-9 * config.dt, ErrorKind::GridMismatch,
                "kernel time step must equal the propagation step");
        require(config.dt <= engine.kernel->t_mem() / 20.0 * (1.0 + 1e-12) || engine.kernel->max_abs(0) == 0.0,
                ErrorKind::StepTooLarge, "dt exceeds T_mem / 20");
    }
}

Trajectory propagate(const SystemModel& system, const PulseSpectrum& spectrum, const Engine& engine,
                     const Matrix& rho0, const PropagatorConfig& config, const Matrix* inhomogeneity) {
    const DensityMatrix start(rho0);
    return run(system, spectrum, engine, {start.matrix()}, true, config, inhomogeneity);
}

Trajectory propagate_unitary(const SystemModel& system, const PulseSpectrum& spectrum, const Matrix& rho0,
                             const PropagatorConfig& config) {
    return propagate(system, spectrum, Engine{Method::Unitary, nullptr, nullptr}, rho0, config);
}

Trajectory propagate_nonmarkovian(const SystemModel& system, const PulseSpectrum& spectrum,
                                  const MemoryKernel& kernel, const Matrix& rho0, const PropagatorConfig& config,
                                  const Matrix* inhomogeneity) {
    auto k = std::shared_ptr<const MemoryKernel>(&kernel, [](const MemoryKernel*) {});
    return propagate(system, spectrum, Engine{Method::NonMarkovian, k, nullptr}, rho0, config, inhomogeneity);
}

Trajectory propagate_redfield_nonsecular(const SystemModel& system, const PulseSpectrum& spectrum,
                                         const RateTensor& rates, const Matrix& rho0,
                                         const PropagatorConfig& config, const Matrix* inhomogeneity) {
    auto r = std::shared_ptr<const RateTensor>(&rates, [](const RateTensor*) {});
    return propagate(system, spectrum, Engine{Method::RedfieldNonSecular, nullptr, r}, rho0, config, inhomogeneity);
}

Trajectory propagate_secular(const SystemModel& system, const PulseSpectrum& spectrum, const RateTensor& rates,
                             const Matrix& rho0, const PropagatorConfig& config, const Matrix* inhomogeneity) {
    auto r = std::shared_ptr<const RateTensor>(&rates, [](const RateTensor*) {});
    return propagate(system, spectrum, Engine{Method::RedfieldSecular, nullptr, r}, rho0, config, inhomogeneity);
}

Matrix closed_form_rho1(const SystemModel& system, const PulseSpectrum& spectrum, const InitialCondition& initial,
                        double t) {
    const int n = system.dim();
    RealVector weights = RealVector::Zero(n);
    if (const auto* pure = std::get_if<PureStart>(&initial)) {
        require(pure->level >= 0 && pure->level < n, ErrorKind::InvalidArgument, "initial level out of range");
        weights[pure->level] = 1.0;
    } else {
        weights = canonical_state(system, std::get<ThermalStart>(initial).beta).matrix().diagonal().real();
    }
    const Matrix& d = system.dipole();
    const double s = spectrum.field_scale;
    const double prefactor = 4.0 * std::numbers::pi * std::numbers::pi * s * s;

    Matrix rho = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        if (weights[m] == 0.0) continue;
        // first-order amplitudes b_a = i d_am eps(w_am) exp(i w_am z/c), up to 2 pi s
        Vector amp = Vector::Zero(n);
        for (int a = 0; a < n; ++a) {
            if (d(a, m) == cplx(0.0) || a == m) continue;
            const double w = system.omega(a, m);
            amp[a] = d(a, m) * spectral_value(spectrum, w) * std::polar(1.0, w * spectrum.z_over_c);
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                rho(a, b) += weights[m] * prefactor * amp[a] * std::conj(amp[b]) * std::polar(1.0, -system.omega(a, b) * t);
    }
    return rho;
}

Trajectory perturbative_cascade(const SystemModel& system, const PulseSpectrum& spectrum, const Engine& engine,
                                const Matrix& rho_eq, int order, const PropagatorConfig& config,
                                const Matrix* inhomogeneity) {
    require(order >= 0, ErrorKind::InvalidArgument, "order must be >= 0");
    require(order <= 2, ErrorKind::OrderTooHigh, "perturbative orders above 2 are not supported");
    const DensityMatrix eq(rho_eq);
    const int n = system.dim();
    Vector residual = field_free_generator(system, engine) * vec(eq.matrix());
    if (inhomogeneity) residual += vec(*inhomogeneity);
    require(residual.cwiseAbs().maxCoeff() < 1e-6, ErrorKind::NotAFixedPoint,
            "generator applied to rho_eq leaves " + std::to_string(residual.cwiseAbs().maxCoeff()));
    std::vector<Matrix> initial{eq.matrix()};
    for (int k = 1; k <= order; ++k) initial.push_back(Matrix::Zero(n, n));
    return run(system, spectrum, engine, initial, false, config, inhomogeneity);
}

Matrix initial_correlation_term(const CompositeModel& composite, const Matrix& rho_me) {
    const int ns = composite.system_dim();
    const long ne = composite.env_dim();
    require(rho_me.rows() == composite.dim() && rho_me.cols() == composite.dim(), ErrorKind::DimensionMismatch,
            "composite state does not match the composite dimension");
    require(top_level_population(composite, rho_me) <= kTruncationTol, ErrorKind::TruncationSuspect,
            "oscillator top level is populated beyond 1e-4");
    const Matrix rho_m = partial_trace_env(rho_me, ns, ne);
    const Matrix rho_e = partial_trace_system(rho_me, ns, ne);
    const Matrix chi = rho_me - kron(rho_m, rho_e);
    const SparseMatrix hme = interaction_part(composite);
    const Matrix comm = hme * chi - (hme.adjoint() * chi.adjoint()).adjoint();
    return cplx(0.0, -1.0) * partial_trace_env(comm, ns, ne);
}

DensityMatrix stationary_correlated_state(const CompositeModel& composite, double beta) {
    const Matrix rho_me = thermal_composite_state(composite, beta, true);
    Matrix reduced = partial_trace_env(rho_me, composite.system_dim(), composite.env_dim());
    reduced = 0.5 * (reduced + reduced.adjoint());
    return DensityMatrix(reduced / reduced.trace().real());
}

} // namespace oppc
