#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qslimit/bounds.hpp"
#include "qslimit/grid_function.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/montecarlo.hpp"
#include "qslimit/transform.hpp"

namespace qsl::io {

using json = nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// CSV with a leading "# kind=... tol_mass=... slack=..." line, then a header
/// row "x,value" (real) or "x,value,value_imag" (complex).
std::string grid_to_csv(const RealGrid& g);
std::string grid_to_csv(const ComplexGrid& g);
RealGrid real_grid_from_csv(std::string_view text);
ComplexGrid complex_grid_from_csv(std::string_view text);

/// {"domain": [lo, hi], "spacing", "kind", "tol_mass", "slack", "values"};
/// complex values are [re, im] pairs.
json grid_to_json(const RealGrid& g);
json grid_to_json(const ComplexGrid& g);
RealGrid real_grid_from_json(const json& j);
ComplexGrid complex_grid_from_json(const json& j);

json moments_to_json(const MomentVector& m);
MomentVector moments_from_json(const json& j);

/// Non-finite values are written as null and read back as +infinity.
json bound_to_json(const BoundReport& r);
BoundReport bound_from_json(const json& j);
json bounds_to_json(const std::vector<BoundReport>& rs);
std::vector<BoundReport> bounds_from_json(const json& j);

/// One value per row under a "value" header, plus a JSON sidecar.
std::string batch_to_csv(const SampleBatch& b);
json batch_sidecar(const SampleBatch& b);
SampleBatch batch_from_files(std::string_view csv, const json& sidecar);

json grid_spec_to_json(const GridSpec& s);
GridSpec grid_spec_from_json(const json& j);

/// density.csv, cf.csv, mgf.csv (those present) and meta.json.
void write_iteration_state(const std::filesystem::path& dir, const IterationState& state,
                           const IterationOptions& options);
IterationState read_iteration_state(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace qsl::io
