// io.hpp - CSV / JSON emission and metadata sidecars

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "oppc/analysis.hpp"

namespace oppc {

using Json = nlohmann::ordered_json;

// Scientific notation with 17 significant digits.
std::string format_number(double v);

// Columns of equal length under a header row; numbers via format_number.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<RealVector>& columns);

void write_json(const std::filesystem::path& path, const Json& value);

// t, <O> per mask, contrast.
void write_contrast_csv(const std::filesystem::path& path, const ContrastReport& report);

Json to_json(const ContrastReport& report, bool with_series = true);
Json to_json(const ExponentFit& fit);

// Doubles survive a JSON round trip only through format_number; this keeps
// data files byte-stable across platforms.
Json number(double v);

std::string code_version();

// Writes <file>.meta.json next to `file`: the parameters, tolerances, code
// version and wall time that produced it.
void write_sidecar(const std::filesystem::path& file, const Json& parameters, double wall_seconds);

} // namespace oppc
