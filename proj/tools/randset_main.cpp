#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "randset/approx.hpp"
#include "randset/errors.hpp"
#include "randset/filter.hpp"
#include "randset/scenario.hpp"
#include "randset/serialize.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using randset::Json;

std::uint64_t default_seed() {
  const char* env = std::getenv("RANDSET_SEED");
  if (env == nullptr) return 0;
  return std::strtoull(env, nullptr, 10);
}

// "l1,u1;l2,u2" -> Box.
randset::Box parse_box_flag(const std::string& text) {
  std::vector<double> lo, hi;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ';')) {
    auto comma = part.find(',');
    if (comma == std::string::npos)
      throw randset::ConfigError("box flag: expected 'lo,hi' pairs separated by ';'");
    lo.push_back(std::stod(part.substr(0, comma)));
    hi.push_back(std::stod(part.substr(comma + 1)));
  }
  if (lo.empty()) throw randset::ConfigError("box flag: empty");
  Eigen::VectorXd l = Eigen::Map<Eigen::VectorXd>(lo.data(), lo.size());
  Eigen::VectorXd u = Eigen::Map<Eigen::VectorXd>(hi.data(), hi.size());
  return randset::Box(l, u);
}

void write_manifest(const std::string& path, const std::string& command,
                    const Json& config, std::uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double seconds) {
  Json digests = Json::object();
  for (const auto& in : inputs) digests[in] = randset::file_digest(in);
  Json manifest{{"tool", "randset"},
                {"version", kVersion},
                {"command", command},
                {"config", config},
                {"seed", seed},
                {"input_digests", digests},
                {"outputs", outputs},
                {"wall_clock_seconds", seconds}};
  randset::write_text_file(path, manifest.dump(2) + "\n");
}

int run_bounds(const Json& cfg) {
  using namespace randset;
  SetFamily family = family_from_string(cfg.at("family").get<std::string>());
  int n = cfg.at("n").get<int>();
  int sigma = cfg.value("sigma", -1);
  double eps = cfg.at("epsilon").get<double>();
  double delta = cfg.at("delta").get<double>();
  int d = design_dimension(family, n, sigma);
  long long n_exact = required_samples_exact(eps, delta, d);
  long long n_explicit = required_samples_explicit(eps, delta, d);
  Json out{{"epsilon", eps},
           {"delta", delta},
           {"family", family_to_string(family)},
           {"n", n},
           {"d", d},
           {"N_exact", n_exact},
           {"N_explicit", n_explicit}};
  if (sigma >= 0) out["sigma"] = sigma;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int run_approximate(const Json& cfg) {
  using namespace randset;
  auto t0 = std::chrono::steady_clock::now();
  Model model = load_model_file(cfg.at("model").get<std::string>());

  ApproxOptions options;
  options.family = family_from_string(cfg.at("family").get<std::string>());
  options.epsilon = cfg.value("epsilon", 0.1);
  options.delta = cfg.value("delta", 1e-3);
  options.sigma = cfg.value("sigma", 4);
  if (cfg.contains("N")) options.fixed_num_samples = cfg.at("N").get<long long>();
  options.seed = cfg.at("seed").get<std::uint64_t>();
  options.threads = cfg.value("threads", 1);
  if (cfg.contains("box") && cfg.at("box").get<std::string>() != "auto")
    options.pas_domain = parse_box_flag(cfg.at("box").get<std::string>());

  ApproximationResult result = approximate_image_set(model, options);
  long long validate = cfg.value("validate", 0LL);
  if (validate > 0) {
    auto violation = estimate_violation(result, model, validate, options.seed,
                                        /*epoch=*/1, options.threads);
    result.empirical_violation = violation.fraction;
    result.violation_std_error = violation.standard_error;
  }

  std::string out_path = cfg.at("out").get<std::string>();
  write_text_file(out_path, to_json(result).dump(2) + "\n");
  std::vector<std::string> outputs{out_path};
  if (cfg.contains("cloud")) {
    write_cloud_csv(cfg.at("cloud").get<std::string>(), result.cloud);
    outputs.push_back(cfg.at("cloud").get<std::string>());
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg.value("manifest", out_path + ".manifest.json"),
                 "approximate", cfg, options.seed,
                 {cfg.at("model").get<std::string>()}, outputs, seconds);
  return 0;
}

int run_filter_cmd(const Json& cfg) {
  using namespace randset;
  auto t0 = std::chrono::steady_clock::now();
  Model model = load_model_file(cfg.at("model").get<std::string>());
  FilterRunSpec spec = load_filter_spec_file(cfg.at("config").get<std::string>());
  std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  spec.config.threads = cfg.value("threads", 1);
  if (cfg.value("continue_on_inconsistent", false))
    spec.config.continue_on_inconsistent = true;

  std::optional<TruthTrajectory> truth;
  std::vector<Eigen::VectorXd> measurements;
  std::vector<std::string> outputs;
  if (cfg.value("simulate", false)) {
    int horizon = spec.horizon;
    if (cfg.contains("K")) horizon = cfg.at("K").get<int>();
    if (horizon < 1)
      throw ConfigError("filter --simulate: horizon must be >= 1 (config "
                        "'horizon' or --K)");
    Eigen::VectorXd x0 = spec.x0 ? *spec.x0 : spec.initial.center();
    truth = simulate_truth(model, x0, horizon, seed);
    measurements = truth->measurements;
  } else if (cfg.contains("measurements")) {
    // One row per step; components separated by commas.
    std::stringstream stream(read_text_file(cfg.at("measurements").get<std::string>()));
    std::string line;
    while (std::getline(stream, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
      std::vector<double> vals;
      std::stringstream row(line);
      std::string cell;
      while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
      measurements.push_back(
          Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size()));
    }
    if (measurements.empty())
      throw ConfigError("filter: measurement file has no rows");
  } else {
    throw ConfigError("filter: pass --simulate or --measurements FILE");
  }

  FilterTrace trace = run_filter(model, spec.initial, measurements, spec.config, seed);

  std::string trace_path = cfg.at("out").get<std::string>();
  write_trace_csv(trace_path, trace);
  outputs.push_back(trace_path);

  Json summary{{"num_steps", trace.num_steps()},
               {"completed", trace.completed},
               {"certificate", to_json(trace.certificate)}};
  if (!trace.sets.empty()) {
    summary["final_log_volume"] = trace.steps.back().log_volume;
    summary["final_set"] = to_json(trace.sets.back());
  }
  if (truth) {
    std::string truth_path = cfg.value(
        "truth", trace_path.substr(0, trace_path.find_last_of('.')) +
                     "_truth.csv");
    write_truth_csv(truth_path, *truth);
    outputs.push_back(truth_path);
    long long contained = 0;
    for (size_t k = 0; k < trace.sets.size(); ++k)
      if (trace.steps[k].status == "ok" &&
          trace.sets[k].contains(truth->states[k + 1], kMembershipTol))
        ++contained;
    summary["containment_frequency"] =
        trace.sets.empty() ? 0.0
                           : static_cast<double>(contained) /
                                 static_cast<double>(trace.sets.size());
  }
  std::string summary_path = cfg.value("summary", std::string{});
  if (!summary_path.empty()) {
    write_text_file(summary_path, summary.dump(2) + "\n");
    outputs.push_back(summary_path);
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg.value("manifest", trace_path + ".manifest.json"), "filter",
                 cfg, seed,
                 {cfg.at("model").get<std::string>(),
                  cfg.at("config").get<std::string>()},
                 outputs, seconds);
  if (!trace.completed && !spec.config.continue_on_inconsistent) {
    std::cerr << "filter: measurement inconsistent at step "
              << trace.num_steps() << "\n";
    return 3;
  }
  return 0;
}

int run_replay(const std::string& manifest_path) {
  using namespace randset;
  Json manifest = Json::parse(read_text_file(manifest_path));
  std::string command = manifest.at("command").get<std::string>();
  const Json& cfg = manifest.at("config");
  if (command == "approximate") return run_approximate(cfg);
  if (command == "filter") return run_filter_cmd(cfg);
  if (command == "bounds") return run_bounds(cfg);
  throw ConfigError("replay: unknown command in manifest: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized image-set approximation and filtering"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "sample-complexity bounds for a set family");
  double b_eps = 0.1, b_delta = 1e-3;
  std::string b_family = "ellipsoid";
  int b_n = 2, b_sigma = -1;
  bounds->add_option("--eps", b_eps, "risk level in (0,1)")->required();
  bounds->add_option("--delta", b_delta, "confidence level in (0,1)")->required();
  bounds->add_option("--family", b_family,
                     "ellipsoid|parallelotope|box|l1|pas");
  bounds->add_option("--n", b_n, "state dimension")->required();
  bounds->add_option("--degree", b_sigma, "PAS degree (required for pas)");

  // approximate
  auto* approx = app.add_subcommand(
      "approximate", "randomized image-set approximation");
  std::string a_model, a_family = "ellipsoid", a_out = "result.json";
  std::string a_cloud, a_box = "auto", a_manifest;
  double a_eps = 0.1, a_delta = 1e-3;
  int a_sigma = 4, a_threads = 1;
  long long a_n_override = -1, a_validate = 0;
  std::uint64_t a_seed = default_seed();
  approx->add_option("--model", a_model, "model JSON file")->required();
  approx->add_option("--family", a_family, "ellipsoid|parallelotope|box|l1|pas");
  approx->add_option("--eps", a_eps, "risk level");
  approx->add_option("--delta", a_delta, "confidence level");
  approx->add_option("--degree", a_sigma, "PAS degree");
  approx->add_option("--box", a_box, "PAS domain 'l1,u1;l2,u2' or 'auto'");
  approx->add_option("--N", a_n_override, "fixed sample count override");
  approx->add_option("--seed", a_seed, "random seed");
  approx->add_option("--out", a_out, "result JSON path");
  approx->add_option("--cloud", a_cloud, "construction cloud CSV path");
  approx->add_option("--validate", a_validate,
                     "fresh-sample count for empirical violation");
  approx->add_option("--threads", a_threads, "worker count");
  approx->add_option("--manifest", a_manifest, "manifest path");

  // filter
  auto* filter = app.add_subcommand("filter", "randomized prediction-correction filter");
  std::string f_model, f_config, f_out = "trace.csv", f_summary, f_truth,
              f_measurements, f_manifest;
  bool f_simulate = false, f_continue = false;
  int f_horizon = -1, f_threads = 1;
  std::uint64_t f_seed = default_seed();
  filter->add_option("--model", f_model, "model JSON file")->required();
  filter->add_option("--config", f_config, "filter config JSON file")->required();
  filter->add_option("--seed", f_seed, "random seed");
  filter->add_option("--out", f_out, "trace CSV path");
  filter->add_option("--summary", f_summary, "summary JSON path");
  filter->add_flag("--simulate", f_simulate,
                   "generate the truth trajectory and measurements");
  filter->add_option("--K", f_horizon, "horizon override for --simulate");
  filter->add_option("--truth", f_truth, "truth CSV path (with --simulate)");
  filter->add_option("--measurements", f_measurements,
                     "measurement CSV (one row per step)");
  filter->add_flag("--continue-on-inconsistent", f_continue,
                   "keep filtering after a fully rejected step");
  filter->add_option("--threads", f_threads, "worker count");
  filter->add_option("--manifest", f_manifest, "manifest path");

  // replay
  auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  std::string r_manifest;
  replay->add_option("--manifest", r_manifest, "manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (bounds->parsed()) {
      Json cfg{{"family", b_family}, {"n", b_n}, {"epsilon", b_eps},
               {"delta", b_delta}};
      if (b_sigma >= 0) cfg["sigma"] = b_sigma;
      return run_bounds(cfg);
    }
    if (approx->parsed()) {
      Json cfg{{"model", a_model}, {"family", a_family}, {"epsilon", a_eps},
               {"delta", a_delta}, {"sigma", a_sigma}, {"box", a_box},
               {"seed", a_seed},   {"out", a_out},      {"threads", a_threads}};
      if (a_n_override >= 0) cfg["N"] = a_n_override;
      if (a_validate > 0) cfg["validate"] = a_validate;
      if (!a_cloud.empty()) cfg["cloud"] = a_cloud;
      if (!a_manifest.empty()) cfg["manifest"] = a_manifest;
      return run_approximate(cfg);
    }
    if (filter->parsed()) {
      Json cfg{{"model", f_model}, {"config", f_config}, {"seed", f_seed},
               {"out", f_out},     {"threads", f_threads}};
      if (f_simulate) cfg["simulate"] = true;
      if (f_horizon > 0) cfg["K"] = f_horizon;
      if (!f_summary.empty()) cfg["summary"] = f_summary;
      if (!f_truth.empty()) cfg["truth"] = f_truth;
      if (!f_measurements.empty()) cfg["measurements"] = f_measurements;
      if (f_continue) cfg["continue_on_inconsistent"] = true;
      if (!f_manifest.empty()) cfg["manifest"] = f_manifest;
      return run_filter_cmd(cfg);
    }
    if (replay->parsed()) return run_replay(r_manifest);
  } catch (const randset::ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line << ", column "
              << e.column << "; expected " << e.expected << ")\n";
    return 2;
  } catch (const randset::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const randset::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
