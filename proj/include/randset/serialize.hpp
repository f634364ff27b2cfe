#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "randset/approx.hpp"
#include "randset/filter.hpp"
#include "randset/geometry.hpp"
#include "randset/model.hpp"
#include "randset/scenario.hpp"

namespace randset {

using Json = nlohmann::json;

Json to_json(const Box& box);
Box box_from_json(const Json& j);

// NasSet as {center, shape (row-major), p} with p one of 1, 2, "inf".
Json to_json(const NasSet& set);
NasSet nas_from_json(const Json& j);

// PasSet as {box, degree, coefficients (graded-lexicographic), gram}.
Json to_json(const PasSet& set);
PasSet pas_from_json(const Json& j);

Json to_json(const ScenarioCertificate& cert);

Json to_json(const SolveReport& report);

Json to_json(const ApproximationResult& result);

// Model files: either {"builtin": "sysF" | "abrc08"} or
// {n, n_w, n_y, dynamics, measurement, X0, W, V}.
Model model_from_json(const Json& j);
Model load_model_file(const std::string& path);

// Filter run description: the FilterConfig fields plus the initial set, the
// horizon, and the simulation start point.
struct FilterRunSpec {
  FilterConfig config;
  NasSet initial;
  int horizon = 0;                       // used by --simulate
  std::optional<Eigen::VectorXd> x0;     // simulation start; default: center
};
FilterRunSpec filter_spec_from_json(const Json& j);
FilterRunSpec load_filter_spec_file(const std::string& path);

// Full-precision number formatting shared by every CSV writer (17 significant
// digits round-trips doubles exactly).
std::string format_full(double value);

void write_cloud_csv(const std::string& path,
                     const std::vector<Eigen::VectorXd>& cloud);
void write_trace_csv(const std::string& path, const FilterTrace& trace);
void write_truth_csv(const std::string& path, const TruthTrajectory& truth);

// FNV-1a 64-bit content digest, hex-encoded; manifest bookkeeping.
std::string file_digest(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace randset
