// runner.cpp - Scenario execution: run, sweep and oracle comparison

#include "oppc/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "oppc/oracle.hpp"
#include "oppc/propagators.hpp"

namespace oppc {

namespace {

std::string density_key(const SpectralDensity& j) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, spectral::OhmicExp>) {
                os << "ohmic:" << d.j0 << ":" << d.p << ":" << d.omega_c;
            } else if constexpr (std::is_same_v<T, spectral::Drude>) {
                os << "drude:" << d.j0 << ":" << d.omega_d;
            } else {
                os << "tab";
                for (Eigen::Index k = 0; k < d.omega.size(); ++k) os << ":" << d.omega[k] << "," << d.values[k];
            }
        },
        j);
    return os.str();
}

// Correlation tables are the expensive part of bath setup and do not depend on
// the coupling scale or the field, so sweeps share them.
CorrelationTable cached_correlation(const BathSpec& bath, double dt) {
    static std::mutex mutex;
    static std::map<std::string, CorrelationTable> cache;
    std::ostringstream key;
    key.precision(17);
    key << density_key(bath.density) << "|" << bath.beta << "|" << dt << "|" << bath.t_max << "|" << bath.eps_mem;
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (auto it = cache.find(key.str()); it != cache.end()) return it->second;
    }
    CorrelationTable table =
        truncate_memory(correlation_function(bath.density, bath.beta, dt, bath.t_max), bath.eps_mem);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key.str(), table);
    return table;
}

std::shared_ptr<const MemoryKernel> kernel_from(const SystemModel& system, const CorrelationTable& table) {
    std::vector<CorrelationTable> per_group(static_cast<std::size_t>(std::max(system.bath_groups(), 1)), table);
    return std::make_shared<MemoryKernel>(memory_kernel(system, per_group));
}

bool is_open(Method m) { return m != Method::Unitary; }

Matrix diagonal_part(const Matrix& rho) {
    Matrix d = Matrix::Zero(rho.rows(), rho.cols());
    for (Eigen::Index a = 0; a < rho.rows(); ++a) d(a, a) = rho(a, a).real();
    return d;
}

std::vector<Mode> oracle_modes(const Scenario& s) {
    return discretize_spectral_density(s.bath->density, s.oracle->n_modes, s.oracle->omega_max, s.oracle->n_max);
}

std::filesystem::path out_dir(const Scenario& s, const RunOptions& o) {
    return o.out_dir.empty() ? std::filesystem::path(s.output.dir) : o.out_dir;
}

bool wants(const Scenario& s, const RunOptions& o, const std::string& fmt) {
    const auto& f = o.formats.empty() ? s.output.formats : o.formats;
    return std::find(f.begin(), f.end(), fmt) != f.end();
}

Json scenario_parameters(const Scenario& s) {
    Json p;
    p["scenario"] = s.name;
    p["source"] = s.source.string();
    p["method"] = to_string(s.method);
    p["dt"] = number(s.config.dt);
    p["t0"] = number(s.config.t0);
    p["t_end"] = number(s.config.t_end);
    p["perturbative"] = s.config.perturbative;
    p["order"] = s.config.max_order;
    p["history_stride"] = s.config.history_stride;
    p["field_scale"] = number(s.spectrum.field_scale);
    p["z_over_c"] = number(s.spectrum.z_over_c);
    Json masks = Json::array();
    for (const auto& m : s.masks) masks.push_back(Json{{"name", m.name}, {"mask", describe(m.mask)}});
    p["masks"] = masks;
    if (s.bath) {
        p["beta"] = number(s.bath->beta);
        p["coupling_scale"] = number(s.bath->coupling_scale);
        p["eps_mem"] = number(s.bath->eps_mem);
        p["bath_t_max"] = number(s.bath->t_max);
        p["spectral_density"] = density_key(s.bath->density);
    }
    if (s.oracle)
        p["oracle"] = Json{{"n_modes", s.oracle->n_modes},
                           {"omega_max", number(s.oracle->omega_max)},
                           {"n_max", s.oracle->n_max}};
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs f(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1))));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

std::vector<Method> requested_engines(const Scenario& s) {
    return s.analysis.engines.empty() ? std::vector<Method>{s.method} : s.analysis.engines;
}

Physics prepare(const Scenario& s, const std::vector<Method>& methods) {
    Physics p;
    p.system = s.bath ? s.system.with_coupling_scale(s.bath->coupling_scale) : s.system;
    p.spectrum = build_spectrum(s.spectrum);
    for (const auto& m : s.masks) {
        p.spectra.push_back(apply_mask(p.spectrum, resolve_mask(m, p.spectrum)));
        p.labels.push_back(m.name);
    }
    for (const auto& sp : p.spectra)
        p.pulse_end = std::max(p.pulse_end, pulse_end(sp, s.config.t0, s.config.t_end, s.config.dt, s.analysis.pulse_tail));

    const bool open = std::any_of(methods.begin(), methods.end(), is_open);
    if (open) {
        const CorrelationTable table = cached_correlation(*s.bath, s.config.dt);
        p.kernel = kernel_from(p.system, table);
        p.rates = std::make_shared<RateTensor>(markov_rates(*p.kernel, transition_frequencies(p.system)));
    }

    switch (s.initial.kind) {
        case StartKind::Pure:
            p.rho0 = Matrix::Zero(p.system.dim(), p.system.dim());
            p.rho0(s.initial.level, s.initial.level) = 1.0;
            break;
        case StartKind::Thermal:
            p.rho0 = canonical_state(p.system, s.bath->beta).matrix();
            break;
        case StartKind::Correlated: {
            const CompositeModel comp = make_composite(p.system, oracle_modes(s));
            const Matrix rme = thermal_composite_state(comp, s.bath->beta, true);
            p.inhomogeneity = initial_correlation_term(comp, rme);
            Matrix red = partial_trace_env(rme, comp.system_dim(), comp.env_dim());
            red = 0.5 * (red + red.adjoint());
            p.rho0 = red / red.trace().real();
            break;
        }
    }
    return p;
}

Engine engine_for(const Physics& p, Method m) {
    switch (m) {
        case Method::Unitary: return Engine{m, nullptr, nullptr};
        case Method::NonMarkovian: return Engine{m, p.kernel, nullptr};
        case Method::RedfieldNonSecular:
        case Method::RedfieldSecular: return Engine{m, nullptr, p.rates};
    }
    return Engine{};
}

Trajectory propagate_scenario(const Scenario& s, const Physics& p, Method m, const PulseSpectrum& spectrum,
                              const Matrix& rho0, const Matrix* inhomogeneity) {
    PropagatorConfig cfg = s.config;
    cfg.method = m;
    const Engine engine = engine_for(p, m);
    if (cfg.perturbative) return perturbative_cascade(p.system, spectrum, engine, rho0, cfg.max_order, cfg, inhomogeneity);
    return propagate(p.system, spectrum, engine, rho0, cfg, inhomogeneity);
}

ContrastReport scenario_contrast(const Scenario& s, const Physics& p, Method m, int jobs, const Matrix* rho0,
                                 bool with_inhomogeneity) {
    const Matrix& start = rho0 ? *rho0 : p.rho0;
    const Matrix* inh = with_inhomogeneity && p.inhomogeneity ? &*p.inhomogeneity : nullptr;
    return phase_contrast(
        p.spectra, p.labels,
        [&](const PulseSpectrum& sp) { return propagate_scenario(s, p, m, sp, start, inh); }, 0.0, jobs);
}

const EngineResult& RunResult::engine(Method m) const {
    for (const auto& e : engines)
        if (e.method == m) return e;
    fail(ErrorKind::InvalidArgument, "no result for engine " + to_string(m));
}

RunResult run_scenario(const Scenario& s, const RunOptions& o) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<Method> methods = requested_engines(s);
    const Physics p = prepare(s, methods);
    RunResult r;
    r.name = s.name;
    r.pulse_end = p.pulse_end;

    const double t_from = s.analysis.post_pulse ? p.pulse_end : s.config.t0;
    auto window_of = [&](const ContrastReport& full) {
        return s.analysis.post_pulse ? restrict_to(full, t_from) : full;
    };

    // Unitary reference from the diagonal part of the start: the closed-system floor.
    const bool need_floor = s.analysis.onset || std::any_of(methods.begin(), methods.end(), is_open);
    std::optional<ContrastReport> unitary_full;
    if (need_floor) {
        const Matrix ref = diagonal_part(p.rho0);
        unitary_full = scenario_contrast(s, p, Method::Unitary, o.jobs, &ref, false);
        r.noise_floor = noise_floor(window_of(*unitary_full));
    } else {
        r.noise_floor = kIntegratorFloor;
    }

    for (Method m : methods) {
        EngineResult e;
        e.method = m;
        const bool reuse = m == Method::Unitary && unitary_full && !p.inhomogeneity &&
                           (diagonal_part(p.rho0) - p.rho0).cwiseAbs().maxCoeff() == 0.0;
        e.full = reuse ? *unitary_full : scenario_contrast(s, p, m, o.jobs);
        e.window = window_of(e.full);
        e.peak = e.window.max_contrast();
        e.relaxation_time = relaxation_time(p.system, engine_for(p, m));
        if (s.analysis.onset) {
            set_threshold(e.window, onset_threshold(e.window, r.noise_floor));
            e.mechanism = onset_classifier(e.window, p.pulse_end, e.relaxation_time);
        } else {
            set_threshold(e.window, 10.0 * r.noise_floor);
        }
        e.full.threshold = e.window.threshold;
        r.engines.push_back(std::move(e));
    }

    Json summary;
    summary["scenario"] = s.name;
    summary["pulse_end"] = number(r.pulse_end);
    summary["noise_floor"] = number(r.noise_floor);
    summary["window_start"] = number(t_from);
    Json engines = Json::array();
    for (const auto& e : r.engines) {
        Json j = to_json(e.window, false);
        j["method"] = to_string(e.method);
        j["peak_contrast"] = number(e.peak);
        j["final_contrast"] = number(e.full.final_contrast);
        j["floor_ratio"] = number(e.peak / r.noise_floor);
        j["above_threshold"] = e.peak > 10.0 * r.noise_floor;
        j["relaxation_time"] = number(e.relaxation_time);
        if (e.mechanism) j["mechanism"] = to_string(*e.mechanism);
        engines.push_back(j);
    }
    summary["engines"] = engines;
    r.summary = summary;

    if (o.write) {
        const auto dir = out_dir(s, o);
        const Json params = scenario_parameters(s);
        for (const auto& e : r.engines) {
            const auto stem = s.name + "_" + to_string(e.method);
            if (wants(s, o, "csv")) {
                const auto f = dir / (stem + "_contrast.csv");
                write_contrast_csv(f, e.full);
                write_sidecar(f, params, seconds_since(start));
                r.files.push_back(f);
            }
            if (wants(s, o, "json")) {
                Json j = to_json(e.full, true);
                j["method"] = to_string(e.method);
                const auto f = dir / (stem + "_contrast.json");
                write_json(f, j);
                write_sidecar(f, params, seconds_since(start));
                r.files.push_back(f);
            }
        }
        const auto f = dir / (s.name + "_report.json");
        write_json(f, summary);
        write_sidecar(f, params, seconds_since(start));
        r.files.push_back(f);
    }
    return r;
}

SweepResult sweep(const Scenario& base, const std::string& parameter, const std::vector<double>& values,
                  const RunOptions& o) {
    const auto start = std::chrono::steady_clock::now();
    require(!values.empty(), ErrorKind::ValidationError, "sweep.values: must not be empty");
    std::vector<Scenario> points(values.size(), base);
    for (std::size_t k = 0; k < values.size(); ++k) set_parameter(points[k], parameter, values[k]);

    SweepResult r;
    r.parameter = parameter;
    r.values = values;
    r.points.resize(values.size());
    const auto dir = out_dir(base, o);
    std::mutex write_mutex;
    parallel_for(values.size(), o.jobs, [&](std::size_t k) {
        RunOptions po = o;
        po.jobs = 1;
        po.write = false;
        RunResult res = run_scenario(points[k], po);
        if (o.write) {
            std::lock_guard<std::mutex> lock(write_mutex);
            po.write = true;
            po.out_dir = dir / ("point_" + std::to_string(k));
            // point outputs are rewritten from the finished result to keep writes serialized
            const Json params = scenario_parameters(points[k]);
            for (const auto& e : res.engines) {
                const auto f = po.out_dir / (points[k].name + "_" + to_string(e.method) + "_contrast.csv");
                write_contrast_csv(f, e.full);
                write_sidecar(f, params, seconds_since(start));
                res.files.push_back(f);
            }
            const auto f = po.out_dir / (points[k].name + "_report.json");
            write_json(f, res.summary);
            write_sidecar(f, params, seconds_since(start));
            res.files.push_back(f);
        }
        r.points[k] = std::move(res);
    });

    const auto requested = requested_engines(base);
    const Method lead = std::find(requested.begin(), requested.end(), base.method) != requested.end()
                            ? base.method
                            : requested.front();
    std::vector<double> peaks;
    for (const auto& pt : r.points) peaks.push_back(pt.engine(lead).peak);
    if (base.analysis.scaling) {
        double floor = kIntegratorFloor;
        r.fit = scaling_exponent(values, peaks, floor);
    }

    const auto engines = requested_engines(base);
    const bool has_nm = std::find(engines.begin(), engines.end(), Method::NonMarkovian) != engines.end();
    const auto markov = std::find_if(engines.begin(), engines.end(), [](Method m) {
        return m == Method::RedfieldNonSecular || m == Method::RedfieldSecular;
    });
    if (has_nm && markov != engines.end()) {
        for (const auto& pt : r.points) {
            const RealVector& nm = pt.engine(Method::NonMarkovian).full.observables.front();
            const RealVector& mk = pt.engine(*markov).full.observables.front();
            const double span = (mk.array() - mk[0]).abs().maxCoeff();
            r.markov_deviation.push_back((nm - mk).cwiseAbs().maxCoeff() / std::max(span, 1e-300));
        }
    }

    Json summary;
    summary["scenario"] = base.name;
    summary["parameter"] = parameter;
    Json rows = Json::array();
    for (std::size_t k = 0; k < values.size(); ++k) {
        Json row;
        row["value"] = number(values[k]);
        row["peak_contrast"] = number(peaks[k]);
        row["final_contrast"] = number(r.points[k].engine(lead).full.final_contrast);
        if (k < r.markov_deviation.size()) row["markov_relative_deviation"] = number(r.markov_deviation[k]);
        rows.push_back(row);
    }
    summary["points"] = rows;
    if (r.fit) summary["scaling"] = to_json(*r.fit);
    if (!r.markov_deviation.empty()) {
        bool monotone = true;
        for (std::size_t k = 1; k < r.markov_deviation.size(); ++k)
            monotone = monotone && r.markov_deviation[k] < r.markov_deviation[k - 1];
        summary["markov_monotone_decreasing"] = monotone;
    }
    r.summary = summary;
    if (o.write) {
        Json params = scenario_parameters(base);
        params["sweep_parameter"] = parameter;
        Json vals = Json::array();
        for (double v : values) vals.push_back(number(v));
        params["sweep_values"] = vals;
        const auto f = dir / (base.name + "_sweep_" + parameter + ".json");
        write_json(f, summary);
        write_sidecar(f, params, seconds_since(start));
        r.files.push_back(f);
    }
    return r;
}

OracleComparison oracle_compare(const Scenario& s, const RunOptions& o) {
    const auto start = std::chrono::steady_clock::now();
    require(s.oracle.has_value(), ErrorKind::ValidationError, "oracle: block is required for oracle-compare");
    require(s.bath.has_value(), ErrorKind::ValidationError, "bath: block is required for oracle-compare");
    const SystemModel system = s.system.with_coupling_scale(s.bath->coupling_scale);
    const std::vector<Mode> modes = oracle_modes(s);
    const CompositeModel comp = make_composite(system, modes);
    const double beta = s.bath->beta;

    OracleComparison r;
    r.method = s.method;
    r.horizon = std::min(s.config.t_end, s.config.t0 + 0.5 * recurrence_time(modes));
    PropagatorConfig cfg = s.config;
    cfg.t_end = r.horizon;
    cfg.method = s.method;
    cfg.perturbative = false;

    const PulseSpectrum spectrum = apply_mask(build_spectrum(s.spectrum), resolve_mask(s.masks.front(), build_spectrum(s.spectrum)));

    Matrix rme, rho0;
    std::optional<Matrix> inh;
    if (s.initial.kind == StartKind::Correlated) {
        rme = thermal_composite_state(comp, beta, true);
        inh = initial_correlation_term(comp, rme);
    } else if (s.initial.kind == StartKind::Thermal) {
        rme = thermal_composite_state(comp, beta, false);
    } else {
        const Matrix env = partial_trace_system(thermal_composite_state(comp, beta, false), comp.system_dim(), comp.env_dim());
        Matrix rs = Matrix::Zero(system.dim(), system.dim());
        rs(s.initial.level, s.initial.level) = 1.0;
        rme = kron(rs, env);
    }
    rho0 = partial_trace_env(rme, comp.system_dim(), comp.env_dim());
    rho0 = 0.5 * (rho0 + rho0.adjoint());

    r.exact = propagate_exact(comp, spectrum, rme, cfg);

    Engine engine{s.method, nullptr, nullptr};
    if (s.method != Method::Unitary) {
        // discrete-mode correlation over the horizon: the same bath the oracle sees
        const double span = r.horizon - s.config.t0 + s.config.dt;
        const CorrelationTable table = mode_correlation(modes, beta, s.config.dt, span);
        engine.kernel = kernel_from(system, table);
        if (s.method != Method::NonMarkovian)
            engine.rates = std::make_shared<RateTensor>(markov_rates(*engine.kernel, transition_frequencies(system)));
    }
    r.reduced = propagate(system, spectrum, engine, rho0, cfg, inh ? &*inh : nullptr);

    const Eigen::Index n = std::min(r.exact.t.size(), r.reduced.t.size());
    for (int a = 0; a < system.dim(); ++a) {
        const RealVector pe = r.exact.population(a), pr = r.reduced.population(a);
        for (Eigen::Index k = 0; k < n; ++k) r.max_deviation = std::max(r.max_deviation, std::abs(pe[k] - pr[k]));
    }

    Json summary;
    summary["scenario"] = s.name;
    summary["method"] = to_string(s.method);
    summary["horizon"] = number(r.horizon);
    summary["recurrence_time"] = number(recurrence_time(modes));
    summary["composite_dim"] = comp.dim();
    summary["max_population_deviation"] = number(r.max_deviation);
    r.summary = summary;

    if (o.write) {
        const auto dir = out_dir(s, o);
        const Json params = scenario_parameters(s);
        if (wants(s, o, "csv")) {
            std::vector<std::string> header{"t"};
            std::vector<RealVector> cols{r.exact.t.head(n)};
            for (int a = 0; a < system.dim(); ++a) {
                header.push_back("P" + std::to_string(a) + "_exact");
                cols.push_back(r.exact.population(a).head(n));
                header.push_back("P" + std::to_string(a) + "_" + to_string(s.method));
                cols.push_back(r.reduced.population(a).head(n));
            }
            const auto f = dir / (s.name + "_oracle.csv");
            write_csv(f, header, cols);
            write_sidecar(f, params, seconds_since(start));
            r.files.push_back(f);
        }
        const auto f = dir / (s.name + "_oracle.json");
        write_json(f, summary);
        write_sidecar(f, params, seconds_since(start));
        r.files.push_back(f);
    }
    return r;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError:
        case ErrorKind::UnknownParameter: return 2;
        case ErrorKind::DimensionGuard:
        case ErrorKind::TruncationSuspect: return 4;
        default: return 3;
    }
}

} // namespace oppc
