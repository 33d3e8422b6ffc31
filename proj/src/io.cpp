// io.cpp - CSV / JSON emission and metadata sidecars

#include "oppc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oppc/propagators.hpp"

#ifndef OPPC_VERSION
#define OPPC_VERSION "0.0.0"
#endif

namespace oppc {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write " + path.string());
    return out;
}

} // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

Json number(double v) {
    if (!std::isfinite(v)) return format_number(v);
    return std::stod(format_number(v));
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<RealVector>& columns) {
    require(header.size() == columns.size(), ErrorKind::InvalidArgument, "one header per column");
    const Eigen::Index rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        require(c.size() == rows, ErrorKind::DimensionMismatch, "csv columns differ in length");
    auto out = open_out(path);
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_number(columns[j][i]);
        out << '\n';
    }
}

void write_json(const std::filesystem::path& path, const Json& value) {
    auto out = open_out(path);
    out << value.dump(2) << '\n';
}

void write_contrast_csv(const std::filesystem::path& path, const ContrastReport& report) {
    std::vector<std::string> header{"t"};
    std::vector<RealVector> cols{report.t};
    for (std::size_t k = 0; k < report.observables.size(); ++k) {
        header.push_back(k < report.masks.size() ? "O[" + report.masks[k] + "]" : "O" + std::to_string(k));
        cols.push_back(report.observables[k]);
    }
    header.push_back("contrast");
    cols.push_back(report.contrast);
    write_csv(path, header, cols);
}

Json to_json(const ContrastReport& report, bool with_series) {
    Json j;
    j["masks"] = report.masks;
    j["final_contrast"] = number(report.final_contrast);
    j["max_contrast"] = number(report.max_contrast());
    j["threshold"] = number(report.threshold);
    j["onset_time"] = report.onset_time ? number(*report.onset_time) : Json(nullptr);
    if (with_series) {
        Json t = Json::array(), c = Json::array();
        for (Eigen::Index k = 0; k < report.t.size(); ++k) {
            t.push_back(number(report.t[k]));
            c.push_back(number(report.contrast[k]));
        }
        j["t"] = t;
        j["contrast"] = c;
    }
    return j;
}

Json to_json(const ExponentFit& fit) {
    return Json{{"exponent", number(fit.exponent)}, {"intercept", number(fit.intercept)},
                {"residual", number(fit.residual)}};
}

std::string code_version() { return OPPC_VERSION; }

void write_sidecar(const std::filesystem::path& file, const Json& parameters, double wall_seconds) {
    Json meta;
    meta["file"] = file.filename().string();
    meta["code_version"] = code_version();
    meta["parameters"] = parameters;
    meta["tolerances"] = Json{{"hermitian", kHermitianTol},
                              {"trace", kTraceTol},
                              {"positivity", kPositivityTol},
                              {"degeneracy", kDegeneracyTol},
                              {"max_phase_per_step", kMaxPhasePerStep},
                              {"truncation", kTruncationTol},
                              {"integrator_floor", kIntegratorFloor}};
    meta["wall_seconds"] = wall_seconds;
    auto path = file;
    path += ".meta.json";
    write_json(path, meta);
}

} // namespace oppc
