#include "randset/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "randset/errors.hpp"

namespace randset {

namespace {

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected a JSON array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json j = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) j.push_back(m(r, c));
  return j;
}

Eigen::MatrixXd matrix_from_json(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw ConfigError("matrix entry count does not match dimensions");
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[r * cols + c].get<double>();
  return m;
}

NormP norm_from_json(const Json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return NormP::linf;
    throw ConfigError("bad norm: " + s);
  }
  int p = j.get<int>();
  if (p == 1) return NormP::l1;
  if (p == 2) return NormP::l2;
  throw ConfigError("bad norm index (want 1, 2, or \"inf\")");
}

Json norm_to_json(NormP p) {
  switch (p) {
    case NormP::l1: return Json(1);
    case NormP::l2: return Json(2);
    case NormP::linf: return Json("inf");
  }
  throw ConfigError("bad norm");
}

}  // namespace

Json to_json(const Box& box) {
  return Json{{"lower", vector_to_json(box.lower())},
              {"upper", vector_to_json(box.upper())}};
}

Box box_from_json(const Json& j) {
  return Box(vector_from_json(j.at("lower")), vector_from_json(j.at("upper")));
}

Json to_json(const NasSet& set) {
  return Json{{"center", vector_to_json(set.center())},
              {"shape", matrix_to_json(set.shape())},
              {"p", norm_to_json(set.p())}};
}

NasSet nas_from_json(const Json& j) {
  Eigen::VectorXd center = vector_from_json(j.at("center"));
  const int n = static_cast<int>(center.size());
  Eigen::MatrixXd shape;
  if (j.contains("shape")) {
    shape = matrix_from_json(j.at("shape"), n, n);
  } else if (j.contains("radius")) {
    double r = j.at("radius").get<double>();
    if (!(r > 0)) throw ConfigError("radius must be positive");
    shape = Eigen::MatrixXd::Identity(n, n) / r;
  } else {
    throw ConfigError("NasSet JSON needs 'shape' or 'radius'");
  }
  NormP p = j.contains("p") ? norm_from_json(j.at("p")) : NormP::l2;
  return NasSet(center, shape, p);
}

Json to_json(const PasSet& set) {
  Json grams = Json::array();
  for (const auto& block : set.certificate()) {
    grams.push_back(Json{{"face", block.face},
                         {"basis_degree", block.basis_degree},
                         {"size", block.gram.rows()},
                         {"matrix", matrix_to_json(block.gram)}});
  }
  return Json{{"box", to_json(set.domain())},
              {"degree", set.sigma()},
              {"coefficients", vector_to_json(set.coefficients())},
              {"gram", grams}};
}

PasSet pas_from_json(const Json& j) {
  Box domain = box_from_json(j.at("box"));
  int sigma = j.at("degree").get<int>();
  Eigen::VectorXd coeff = vector_from_json(j.at("coefficients"));
  std::vector<PasSet::GramBlock> cert;
  for (const auto& g : j.at("gram")) {
    PasSet::GramBlock block;
    block.face = g.at("face").get<int>();
    block.basis_degree = g.at("basis_degree").get<int>();
    int size = g.at("size").get<int>();
    block.gram = matrix_from_json(g.at("matrix"), size, size);
    cert.push_back(std::move(block));
  }
  return PasSet(domain, sigma, coeff, std::move(cert));
}

Json to_json(const ScenarioCertificate& cert) {
  return Json{{"epsilon", cert.epsilon},
              {"delta", cert.delta},
              {"d", cert.dimension},
              {"N", cert.num_samples},
              {"method", cert.method == ScenarioCertificate::Method::explicit_bound
                             ? "explicit-bound"
                             : "tail-inversion"}};
}

Json to_json(const SolveReport& report) {
  return Json{{"status", to_string(report.status)},
              {"objective", report.objective},
              {"iterations", report.iterations},
              {"feasibility_residual", report.feasibility_residual},
              {"duality_gap", report.duality_gap}};
}

Json to_json(const ApproximationResult& result) {
  Json j{{"family", family_to_string(result.family)},
         {"certificate", to_json(result.certificate)},
         {"num_points", result.cloud.size()}};
  if (result.nas) {
    j["set"] = to_json(*result.nas);
    j["volume"] = result.nas->volume();
    j["log_volume"] = result.nas->log_volume();
  }
  if (result.pas) {
    j["set"] = to_json(*result.pas);
    // Gram feasibility audit: worst normalized eigenvalue over the blocks.
    double worst = 0.0;
    for (const auto& block : result.pas->certificate()) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.gram);
      worst = std::min(worst, es.eigenvalues().minCoeff() /
                                  (1.0 + block.gram.trace()));
    }
    j["gram_feasibility"] = Json{{"worst_normalized_min_eigenvalue", worst},
                                 {"floor", -1e-7}};
  }
  if (result.solver_report) j["solver"] = to_json(*result.solver_report);
  if (result.empirical_violation) {
    j["empirical_violation"] = *result.empirical_violation;
    j["violation_std_error"] = *result.violation_std_error;
  }
  return j;
}

Model model_from_json(const Json& j) {
  if (j.contains("builtin")) return builtin_model(j.at("builtin").get<std::string>());
  int n = j.at("n").get<int>();
  int n_w = j.value("n_w", 0);
  int n_y = j.value("n_y", 0);
  std::vector<Expression> dynamics;
  for (const auto& text : j.at("dynamics"))
    dynamics.push_back(parse_expression(text.get<std::string>()));
  std::vector<Expression> measurement;
  if (j.contains("measurement"))
    for (const auto& text : j.at("measurement"))
      measurement.push_back(parse_expression(text.get<std::string>()));
  Box empty(Eigen::VectorXd(0), Eigen::VectorXd(0));
  Box x0 = j.contains("X0") ? box_from_json(j.at("X0")) : empty;
  Box w = j.contains("W") ? box_from_json(j.at("W")) : empty;
  Box v = j.contains("V") ? box_from_json(j.at("V")) : empty;
  return Model(n, n_w, n_y, std::move(dynamics), std::move(measurement),
               std::move(x0), std::move(w), std::move(v),
               j.value("name", std::string{}));
}

Model load_model_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

FilterRunSpec filter_spec_from_json(const Json& j) {
  FilterRunSpec spec;
  FilterConfig& cfg = spec.config;
  if (j.contains("family"))
    cfg.family = family_from_string(j.at("family").get<std::string>());
  if (cfg.family == SetFamily::pas)
    throw ConfigError("filter: PAS state sets are not supported");
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.delta = j.value("delta", cfg.delta);
  if (j.contains("N")) cfg.fixed_num_samples = j.at("N").get<long long>();
  cfg.meas_tolerance = j.value("meas_tolerance", cfg.meas_tolerance);
  cfg.resample = j.value("resample", cfg.resample);
  cfg.reuse = j.value("reuse", cfg.reuse);
  cfg.max_resample_attempts =
      j.value("max_resample_attempts", cfg.max_resample_attempts);
  cfg.continue_on_inconsistent =
      j.value("continue_on_inconsistent", cfg.continue_on_inconsistent);
  if (j.contains("V_schedule"))
    for (const auto& box : j.at("V_schedule"))
      cfg.meas_noise_schedule.push_back(box_from_json(box));
  spec.initial = nas_from_json(j.at("initial_set"));
  spec.horizon = j.value("horizon", 0);
  if (j.contains("x0")) spec.x0 = vector_from_json(j.at("x0"));
  return spec;
}

FilterRunSpec load_filter_spec_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("filter config " + path + ": " + e.what());
  }
  return filter_spec_from_json(j);
}

std::string format_full(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_cloud_csv(const std::string& path,
                     const std::vector<Eigen::VectorXd>& cloud) {
  if (cloud.empty()) throw ConfigError("write_cloud_csv: empty cloud");
  std::ostringstream out;
  const int n = static_cast<int>(cloud.front().size());
  for (int j = 0; j < n; ++j) out << (j ? "," : "") << "x" << (j + 1);
  out << "\n";
  for (const auto& p : cloud) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << format_full(p[j]);
    out << "\n";
  }
  write_text_file(path, out.str());
}

void write_trace_csv(const std::string& path, const FilterTrace& trace) {
  std::ostringstream out;
  const int n = trace.initial.dim();
  out << "k";
  for (int j = 0; j < n; ++j) out << ",c" << (j + 1);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out << ",P" << (r + 1) << (c + 1);
  out << ",logvol";
  for (int j = 0; j < n; ++j)
    out << ",span" << (j + 1) << "_lo,span" << (j + 1) << "_hi";
  out << ",N_drawn,N_rejected,N_resampled,N_used,status\n";
  for (size_t k = 0; k < trace.steps.size(); ++k) {
    const StepRecord& rec = trace.steps[k];
    out << rec.step;
    const bool fitted = k < trace.sets.size() && rec.status == "ok";
    const NasSet& set = fitted ? trace.sets[k] : trace.initial;
    for (int j = 0; j < n; ++j)
      out << "," << (fitted ? format_full(set.center()[j]) : "");
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        out << "," << (fitted ? format_full(set.shape()(r, c)) : "");
    out << "," << (fitted ? format_full(rec.log_volume) : "");
    for (int j = 0; j < n; ++j) {
      out << "," << (fitted ? format_full(rec.span_low[j]) : "");
      out << "," << (fitted ? format_full(rec.span_high[j]) : "");
    }
    out << "," << rec.drawn << "," << rec.rejected << "," << rec.resampled
        << "," << rec.used << "," << rec.status << "\n";
  }
  write_text_file(path, out.str());
}

void write_truth_csv(const std::string& path, const TruthTrajectory& truth) {
  std::ostringstream out;
  const int n = static_cast<int>(truth.states.front().size());
  out << "k";
  for (int j = 0; j < n; ++j) out << ",x" << (j + 1);
  out << ",y\n";
  for (size_t k = 0; k < truth.states.size(); ++k) {
    out << k;
    for (int j = 0; j < n; ++j) out << "," << format_full(truth.states[k][j]);
    if (k >= 1) {
      const Eigen::VectorXd& y = truth.measurements[k - 1];
      out << ",";
      for (int j = 0; j < y.size(); ++j)
        out << (j ? ";" : "") << format_full(y[j]);
    } else {
      out << ",";
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file for digest: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[8192];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
    if (in.eof()) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace randset
