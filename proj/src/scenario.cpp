// scenario.cpp - Scenario parsing (YAML or JSON) and validation

#include "oppc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#ifndef OPPC_SCENARIO_DIR
#define OPPC_SCENARIO_DIR "scenarios"
#endif

namespace oppc {

namespace {

using json = nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
    fail(ErrorKind::ValidationError, path + ": " + what);
}

std::string line_col(const std::string& origin, long line, long col) {
    return origin + ":" + std::to_string(line) + ":" + std::to_string(col);
}

// yaml-cpp tree to json; plain scalars become numbers/bools/null when they parse as such.
json to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined: return nullptr;
        case YAML::NodeType::Sequence: {
            json arr = json::array();
            for (const auto& item : node) arr.push_back(to_json(item));
            return arr;
        }
        case YAML::NodeType::Map: {
            json obj = json::object();
            for (const auto& kv : node) obj[kv.first.as<std::string>()] = to_json(kv.second);
            return obj;
        }
        case YAML::NodeType::Scalar: {
            const std::string s = node.Scalar();
            if (node.Tag() == "!") return s; // quoted
            if (s == "true" || s == "True") return true;
            if (s == "false" || s == "False") return false;
            if (s == "null" || s == "~") return nullptr;
            std::istringstream in(s);
            double v = 0.0;
            if (in >> v && in.eof()) {
                if (s.find_first_of(".eE") == std::string::npos && std::abs(v) < 9e15 && v == std::floor(v))
                    return static_cast<long long>(v);
                return v;
            }
            return s;
        }
    }
    return nullptr;
}

json parse_tree(const std::string& text, const std::string& origin) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            long line = 1, col = 1;
            for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
                if (text[k] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            fail(ErrorKind::ParseError, line_col(origin, line, col) + ": " + e.what());
        }
    }
    try {
        return to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        fail(ErrorKind::ParseError, line_col(origin, e.mark.line + 1, e.mark.column + 1) + ": " + e.msg);
    }
}

// Object view that records which keys were read so leftovers can be reported.
class Block {
public:
    Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) invalid(path_, "expected a mapping");
    }

    const std::string& path() const { return path_; }
    bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

    const json& get(const std::string& key) {
        used_.insert(key);
        if (!has(key)) invalid(child(key), "required field is missing");
        return node_.at(key);
    }
    const json* find(const std::string& key) {
        used_.insert(key);
        return has(key) ? &node_.at(key) : nullptr;
    }
    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key) { return as_number(get(key), child(key)); }
    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, child(key)) : fallback;
    }
    int integer(const std::string& key, int fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        const double d = as_number(*v, child(key));
        if (d != std::floor(d)) invalid(child(key), "expected an integer");
        return static_cast<int>(d);
    }
    std::string text(const std::string& key) {
        const json& v = get(key);
        if (!v.is_string()) invalid(child(key), "expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        if (has(key)) return text(key);
        used_.insert(key);
        return fallback;
    }
    bool flag(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) invalid(child(key), "expected true or false");
        return v->get<bool>();
    }
    Block sub(const std::string& key) { return Block(get(key), child(key)); }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!used_.count(it.key())) invalid(child(it.key()), "unknown field");
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) invalid(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) invalid(path, "expected a finite number");
        return d;
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

RealVector real_array(const json& v, const std::string& path) {
    if (!v.is_array()) invalid(path, "expected an array of numbers");
    RealVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = Block::as_number(v[k], path + "[" + std::to_string(k) + "]");
    return out;
}

cplx complex_entry(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2)
        return {Block::as_number(v[0], path), Block::as_number(v[1], path)};
    invalid(path, "expected a number or an (re, im) pair");
}

// Rows of entries; each entry a real number or [re, im].
Matrix complex_matrix(const json& v, const std::string& path, int dim) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        invalid(path, "expected " + std::to_string(dim) + " rows");
    Matrix m(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const json& row = v[static_cast<std::size_t>(a)];
        const std::string rp = path + "[" + std::to_string(a) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            invalid(rp, "expected " + std::to_string(dim) + " entries");
        for (int b = 0; b < dim; ++b)
            m(a, b) = complex_entry(row[static_cast<std::size_t>(b)], rp + "[" + std::to_string(b) + "]");
    }
    return m;
}

// A matrix given either as full rows or as {entries: [[a, b, re, im?], ...], hermitian: bool}.
Matrix matrix_field(const json& v, const std::string& path, int dim) {
    if (v.is_array()) return complex_matrix(v, path, dim);
    Block blk(v, path);
    Matrix m = Matrix::Zero(dim, dim);
    const bool herm = blk.flag("hermitian", true);
    const json& entries = blk.get("entries");
    if (!entries.is_array()) invalid(blk.child("entries"), "expected a list of [a, b, re, im]");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const std::string ep = blk.child("entries") + "[" + std::to_string(k) + "]";
        const RealVector e = real_array(entries[k], ep);
        if (e.size() < 3 || e.size() > 4) invalid(ep, "expected [a, b, re] or [a, b, re, im]");
        const int a = static_cast<int>(e[0]), b = static_cast<int>(e[1]);
        if (a < 0 || b < 0 || a >= dim || b >= dim || a != e[0] || b != e[1]) invalid(ep, "level index out of range");
        const cplx val(e[2], e.size() == 4 ? e[3] : 0.0);
        m(a, b) = val;
        if (herm && a != b) m(b, a) = std::conj(val);
    }
    blk.finish();
    return m;
}

SystemModel parse_system(Block blk) {
    const RealVector energies = real_array(blk.get("energies"), blk.child("energies"));
    if (energies.size() < 2) invalid(blk.child("energies"), "at least two levels are required");
    const int n = static_cast<int>(energies.size());
    const Matrix dipole = matrix_field(blk.get("dipole"), blk.child("dipole"), n);

    std::vector<Matrix> couplings;
    std::vector<int> groups;
    if (const json* cs = blk.find("couplings")) {
        if (!cs->is_array()) invalid(blk.child("couplings"), "expected a list");
        for (std::size_t k = 0; k < cs->size(); ++k) {
            const std::string cp = blk.child("couplings") + "[" + std::to_string(k) + "]";
            const json& c = (*cs)[k];
            if (c.is_object() && c.contains("operator")) {
                Block cb(c, cp);
                couplings.push_back(matrix_field(cb.get("operator"), cb.child("operator"), n));
                groups.push_back(cb.integer("group", 0));
                cb.finish();
            } else {
                couplings.push_back(matrix_field(c, cp, n));
                groups.push_back(0);
            }
        }
    }

    Matrix observable = Matrix::Zero(n, n);
    const json& obs = blk.get("observable");
    const std::string op = blk.child("observable");
    if (obs.is_object() && obs.contains("population")) {
        Block ob(obs, op);
        const int level = ob.integer("population", 0);
        if (level < 0 || level >= n) invalid(ob.child("population"), "level index out of range");
        observable(level, level) = 1.0;
        ob.finish();
    } else {
        observable = matrix_field(obs, op, n);
    }
    blk.finish();
    try {
        return build_system(energies, dipole, couplings, observable, groups);
    } catch (const Error& e) {
        invalid(blk.path(), e.what());
    }
}

SpectralDensity parse_density(Block blk) {
    const std::string type = blk.text("type");
    SpectralDensity j;
    if (type == "ohmic_exp") {
        j = spectral::OhmicExp{blk.number("j0"), blk.number("p"), blk.number("omega_c")};
    } else if (type == "drude") {
        j = spectral::Drude{blk.number("j0"), blk.number("omega_d")};
    } else if (type == "tabulated") {
        j = spectral::Tabulated{real_array(blk.get("omega"), blk.child("omega")),
                                real_array(blk.get("values"), blk.child("values"))};
    } else {
        invalid(blk.child("type"), "unknown spectral density '" + type + "' (ohmic_exp, drude, tabulated)");
    }
    blk.finish();
    try {
        validate(j);
    } catch (const Error& e) {
        invalid(blk.path(), e.what());
    }
    return j;
}

BathSpec parse_bath(Block blk) {
    BathSpec b;
    b.density = parse_density(blk.sub("spectral_density"));
    b.beta = blk.number("beta");
    if (!(b.beta > 0.0)) invalid(blk.child("beta"), "must be positive");
    b.coupling_scale = blk.number("coupling_scale", 1.0);
    b.eps_mem = blk.number("eps_mem", 1e-6);
    if (!(b.eps_mem > 0.0 && b.eps_mem < 1.0)) invalid(blk.child("eps_mem"), "must lie in (0, 1)");
    b.t_max = blk.number("t_max", 200.0);
    if (!(b.t_max > 0.0)) invalid(blk.child("t_max"), "must be positive");
    blk.finish();
    return b;
}

SpectrumLine parse_line(Block blk) {
    SpectrumLine l{blk.number("omega0"), blk.number("sigma"), blk.number("area", 1.0)};
    if (!(l.sigma > 0.0)) invalid(blk.child("sigma"), "must be positive");
    if (!(l.omega0 > 0.0)) invalid(blk.child("omega0"), "must be positive");
    blk.finish();
    return l;
}

MaskSpec parse_mask(Block blk) {
    MaskSpec m;
    m.name = blk.text("name");
    const std::string type = blk.text("type");
    if (type == "constant") {
        m.mask = mask::Constant{blk.number("phi0", 0.0)};
    } else if (type == "linear_delay") {
        m.mask = mask::LinearDelay{blk.number("tau")};
    } else if (type == "chirp") {
        m.mask = mask::Chirp{blk.number("phi2"), blk.number("omega_ref")};
    } else if (type == "pi_step") {
        m.mask = mask::PiStep{blk.number("omega_step")};
    } else if (type == "tabulated") {
        m.knot_omega = real_array(blk.get("omega"), blk.child("omega"));
        m.knot_phase = real_array(blk.get("phase"), blk.child("phase"));
        if (m.knot_omega.size() < 2 || m.knot_omega.size() != m.knot_phase.size())
            invalid(blk.child("phase"), "needs at least two knots, one phase per omega");
        for (Eigen::Index k = 1; k < m.knot_omega.size(); ++k)
            if (!(m.knot_omega[k] > m.knot_omega[k - 1])) invalid(blk.child("omega"), "must be increasing");
        m.mask = mask::Tabulated{};
    } else {
        invalid(blk.child("type"),
                "unknown mask type '" + type + "' (constant, linear_delay, chirp, pi_step, tabulated)");
    }
    blk.finish();
    return m;
}

void parse_pulse(Block blk, Scenario& s) {
    SpectrumSpec& sp = s.spectrum;
    Block spec = blk.sub("spectrum");
    const std::string type = spec.text("type");
    if (type == "gaussian") {
        sp.lines.push_back({spec.number("omega0"), spec.number("sigma"), spec.number("area", 1.0)});
        if (!(sp.lines.back().sigma > 0.0)) invalid(spec.child("sigma"), "must be positive");
    } else if (type == "multi_gaussian") {
        const json& lines = spec.get("lines");
        if (!lines.is_array() || lines.empty()) invalid(spec.child("lines"), "expected a non-empty list");
        for (std::size_t k = 0; k < lines.size(); ++k)
            sp.lines.push_back(parse_line(Block(lines[k], spec.child("lines") + "[" + std::to_string(k) + "]")));
    } else if (type == "tabulated") {
        sp.omega = real_array(spec.get("omega"), spec.child("omega"));
        sp.amplitude = real_array(spec.get("amplitude"), spec.child("amplitude"));
        const json* ph = spec.find("phase");
        sp.phase = ph ? real_array(*ph, spec.child("phase")) : RealVector::Zero(sp.omega.size());
    } else {
        invalid(spec.child("type"), "unknown spectrum family '" + type + "' (gaussian, multi_gaussian, tabulated)");
    }
    sp.d_omega = spec.number("d_omega", 0.005);
    sp.span = spec.number("span", 8.0);
    if (!(sp.d_omega > 0.0)) invalid(spec.child("d_omega"), "must be positive");
    spec.finish();

    sp.z_over_c = blk.number("z_over_c", 0.0);
    sp.field_scale = blk.number("field_scale", 1.0);
    const json& masks = blk.get("masks");
    if (!masks.is_array()) invalid(blk.child("masks"), "expected a list");
    std::set<std::string> names;
    for (std::size_t k = 0; k < masks.size(); ++k) {
        s.masks.push_back(parse_mask(Block(masks[k], blk.child("masks") + "[" + std::to_string(k) + "]")));
        if (!names.insert(s.masks.back().name).second)
            invalid(blk.child("masks") + "[" + std::to_string(k) + "].name", "duplicate mask name");
    }
    blk.finish();
}

void parse_engine(Block blk, Scenario& s) {
    try {
        s.method = parse_method(blk.text("method"));
    } catch (const Error& e) {
        invalid(blk.child("method"), e.what());
    }
    auto& c = s.config;
    c.method = s.method;
    c.dt = blk.number("dt");
    c.t0 = blk.number("t0", 0.0);
    c.t_end = blk.number("t_end");
    if (!(c.dt > 0.0)) invalid(blk.child("dt"), "must be positive");
    if (!(c.t_end > c.t0)) invalid(blk.child("t_end"), "must exceed t0");
    c.perturbative = blk.flag("perturbative", false);
    c.max_order = blk.integer("order", 2);
    if (c.max_order < 0) invalid(blk.child("order"), "must be non-negative");
    c.history_stride = blk.integer("history_stride", 1);
    if (c.history_stride < 1) invalid(blk.child("history_stride"), "must be at least 1");
    blk.finish();
}

void parse_initial(Block blk, Scenario& s) {
    const std::string kind = blk.text("kind", "thermal");
    if (kind == "thermal") {
        s.initial.kind = StartKind::Thermal;
    } else if (kind == "pure") {
        s.initial.kind = StartKind::Pure;
        s.initial.level = blk.integer("level", 0);
    } else if (kind == "correlated") {
        s.initial.kind = StartKind::Correlated;
    } else {
        invalid(blk.child("kind"), "unknown start '" + kind + "' (thermal, pure, correlated)");
    }
    blk.finish();
}

OracleSpec parse_oracle(Block blk) {
    OracleSpec o;
    o.n_modes = blk.integer("n_modes", 3);
    o.omega_max = blk.number("omega_max");
    o.n_max = blk.integer("n_max", 4);
    if (o.n_modes < 1) invalid(blk.child("n_modes"), "must be at least 1");
    if (o.n_max < 1) invalid(blk.child("n_max"), "must be at least 1");
    if (!(o.omega_max > 0.0)) invalid(blk.child("omega_max"), "must be positive");
    blk.finish();
    return o;
}

AnalysisSpec parse_analysis(Block blk) {
    AnalysisSpec a;
    if (const json* e = blk.find("engines")) {
        if (!e->is_array()) invalid(blk.child("engines"), "expected a list of engine names");
        for (std::size_t k = 0; k < e->size(); ++k) {
            const std::string ep = blk.child("engines") + "[" + std::to_string(k) + "]";
            if (!(*e)[k].is_string()) invalid(ep, "expected an engine name");
            try {
                a.engines.push_back(parse_method((*e)[k].get<std::string>()));
            } catch (const Error& err) {
                invalid(ep, err.what());
            }
        }
    }
    a.onset = blk.flag("onset", false);
    a.post_pulse = blk.flag("post_pulse", true);
    a.pulse_tail = blk.number("pulse_tail", 1e-12);
    if (const json* sw = blk.find("sweep")) {
        Block sb(*sw, blk.child("sweep"));
        a.sweep_parameter = sb.text("parameter");
        const RealVector v = real_array(sb.get("values"), sb.child("values"));
        a.sweep_values.assign(v.data(), v.data() + v.size());
        a.scaling = sb.flag("fit_exponent", false);
        sb.finish();
    }
    blk.finish();
    return a;
}

OutputSpec parse_output(Block blk) {
    OutputSpec o;
    o.dir = blk.text("dir", "out");
    if (const json* f = blk.find("formats")) {
        if (!f->is_array()) invalid(blk.child("formats"), "expected a list");
        o.formats.clear();
        for (const auto& item : *f) {
            if (!item.is_string() || (item != "csv" && item != "json"))
                invalid(blk.child("formats"), "formats are csv and json");
            o.formats.push_back(item.get<std::string>());
        }
    }
    blk.finish();
    return o;
}

} // namespace

void validate(const Scenario& s) {
    if (s.masks.size() < 2) invalid("pulse.masks", "at least two masks are required");
    std::vector<Method> engines = s.analysis.engines;
    engines.push_back(s.method);
    const bool open = std::any_of(engines.begin(), engines.end(), [](Method m) { return m != Method::Unitary; });
    if ((open || s.initial.kind == StartKind::Thermal || s.initial.kind == StartKind::Correlated) && !s.bath)
        invalid("bath", "block is required for engine " + to_string(s.method) +
                            (open ? "" : " with a thermal or correlated start"));
    if (open && s.system.couplings().empty()) invalid("system.couplings", "open engines need at least one coupling");
    if (s.initial.kind == StartKind::Correlated && !s.oracle)
        invalid("oracle", "block is required for a correlated start");
    if (s.initial.kind == StartKind::Pure && (s.initial.level < 0 || s.initial.level >= s.system.dim()))
        invalid("initial.level", "level index out of range");
    if (s.config.perturbative && s.config.max_order > 2) invalid("engine.order", "perturbative order is at most 2");
    if (s.spectrum.lines.empty() && s.spectrum.omega.size() < 2)
        invalid("pulse.spectrum", "needs at least one line or a tabulated grid");
    if (!s.analysis.sweep_values.empty() || !s.analysis.sweep_parameter.empty()) {
        if (s.analysis.sweep_values.empty()) invalid("analysis.sweep.values", "must not be empty");
    }
    if (s.analysis.scaling && s.analysis.sweep_values.size() < 4)
        invalid("analysis.sweep.values", "an exponent fit needs at least 4 points");
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    const json tree = parse_tree(text, origin);
    if (!tree.is_object()) invalid("", "scenario must be a mapping of blocks");
    Block root(tree, "");
    Scenario s;
    s.name = root.text("name", "scenario");
    s.system = parse_system(root.sub("system"));
    if (const json* b = root.find("bath")) s.bath = parse_bath(Block(*b, "bath"));
    parse_pulse(root.sub("pulse"), s);
    parse_engine(root.sub("engine"), s);
    if (const json* b = root.find("initial")) parse_initial(Block(*b, "initial"), s);
    if (const json* b = root.find("oracle")) s.oracle = parse_oracle(Block(*b, "oracle"));
    if (const json* b = root.find("analysis")) s.analysis = parse_analysis(Block(*b, "analysis"));
    if (const json* b = root.find("output")) s.output = parse_output(Block(*b, "output"));
    root.finish();
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, path.string() + ":0:0: cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    Scenario s = parse_scenario(buf.str(), path.string());
    s.source = path;
    return s;
}

PulseSpectrum build_spectrum(const SpectrumSpec& spec) {
    if (spec.lines.empty()) {
        RealVector phase = spec.phase.size() ? spec.phase : RealVector::Zero(spec.omega.size());
        return tabulated_spectrum(spec.omega, spec.amplitude, phase, spec.z_over_c, spec.field_scale);
    }
    double lo = 1e300, hi = -1e300;
    for (const auto& l : spec.lines) {
        lo = std::min(lo, l.omega0 - spec.span * l.sigma);
        hi = std::max(hi, l.omega0 + spec.span * l.sigma);
    }
    lo = std::max(lo, spec.d_omega);
    const int points = static_cast<int>(std::ceil((hi - lo) / spec.d_omega)) + 1;
    const RealVector omega = uniform_grid(lo, lo + spec.d_omega * (points - 1), points);
    RealVector amp = RealVector::Zero(points);
    for (const auto& l : spec.lines)
        for (int k = 0; k < points; ++k) {
            const double x = (omega[k] - l.omega0) / l.sigma;
            amp[k] += l.area / (l.sigma * std::sqrt(2.0 * M_PI)) * std::exp(-0.5 * x * x);
        }
    return tabulated_spectrum(omega, amp, RealVector::Zero(points), spec.z_over_c, spec.field_scale);
}

PhaseMask resolve_mask(const MaskSpec& spec, const PulseSpectrum& spectrum) {
    if (!std::holds_alternative<mask::Tabulated>(spec.mask) || spec.knot_omega.size() == 0) return spec.mask;
    const RealVector& xo = spec.knot_omega;
    const RealVector& yo = spec.knot_phase;
    RealVector v(spectrum.omega.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double w = spectrum.omega[k];
        if (w <= xo[0]) {
            v[k] = yo[0];
        } else if (w >= xo[xo.size() - 1]) {
            v[k] = yo[yo.size() - 1];
        } else {
            const auto it = std::upper_bound(xo.data(), xo.data() + xo.size(), w);
            const auto j = static_cast<Eigen::Index>(it - xo.data());
            const double f = (w - xo[j - 1]) / (xo[j] - xo[j - 1]);
            v[k] = (1.0 - f) * yo[j - 1] + f * yo[j];
        }
    }
    return mask::Tabulated{v};
}

void set_parameter(Scenario& s, const std::string& parameter, double value) {
    if (!std::isfinite(value)) invalid("sweep.values", "values must be finite");
    if (parameter == "field_scale") {
        s.spectrum.field_scale = value;
        return;
    }
    if (parameter == "coupling_scale" || parameter == "beta" || parameter == "omega_c") {
        if (!s.bath) invalid("bath", "block is required to sweep " + parameter);
        if (parameter == "coupling_scale") {
            s.bath->coupling_scale = value;
        } else if (parameter == "beta") {
            if (!(value > 0.0)) invalid("sweep.values", "beta must be positive");
            s.bath->beta = value;
        } else {
            auto* o = std::get_if<spectral::OhmicExp>(&s.bath->density);
            if (!o) invalid("bath.spectral_density", "omega_c applies to ohmic_exp only");
            if (!(value > 0.0)) invalid("sweep.values", "omega_c must be positive");
            o->omega_c = value;
        }
        return;
    }
    if (parameter.rfind("mask.", 0) == 0) {
        const auto dot = parameter.find('.', 5);
        if (dot != std::string::npos) {
            const std::string name = parameter.substr(5, dot - 5), field = parameter.substr(dot + 1);
            for (auto& m : s.masks) {
                if (m.name != name) continue;
                bool ok = true;
                std::visit(
                    [&](auto& mk) {
                        using T = std::decay_t<decltype(mk)>;
                        if constexpr (std::is_same_v<T, mask::Constant>) {
                            if (field == "phi0") mk.phi0 = value; else ok = false;
                        } else if constexpr (std::is_same_v<T, mask::LinearDelay>) {
                            if (field == "tau") mk.tau = value; else ok = false;
                        } else if constexpr (std::is_same_v<T, mask::Chirp>) {
                            if (field == "phi2") mk.phi2 = value;
                            else if (field == "omega_ref") mk.omega_ref = value;
                            else ok = false;
                        } else if constexpr (std::is_same_v<T, mask::PiStep>) {
                            if (field == "omega_step") mk.omega_step = value; else ok = false;
                        } else {
                            ok = false;
                        }
                    },
                    m.mask);
                if (ok) return;
            }
        }
    }
    fail(ErrorKind::UnknownParameter, "'" + parameter +
                                          "' is not sweepable (field_scale, coupling_scale, omega_c, beta, "
                                          "mask.<name>.<field>)");
}

std::filesystem::path scenario_directory() {
    if (const char* env = std::getenv("OPPC_SCENARIO_DIR")) return env;
    return OPPC_SCENARIO_DIR;
}

std::vector<std::filesystem::path> shipped_scenarios() {
    std::vector<std::filesystem::path> out;
    const auto dir = scenario_directory();
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".yaml" || ext == ".yml" || ext == ".json")) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace oppc
