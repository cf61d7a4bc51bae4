#include "smoothtest/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "smoothtest/besov.hpp"
#include "smoothtest/errors.hpp"
#include "smoothtest/ingest.hpp"
#include "smoothtest/lb_oracle.hpp"
#include "smoothtest/mc_harness.hpp"
#include "smoothtest/noise_model.hpp"
#include "smoothtest/rng.hpp"
#include "smoothtest/serialization.hpp"
#include "smoothtest/signal_gen.hpp"
#include "smoothtest/smooth_test.hpp"

namespace smoothtest {

namespace {

constexpr const char* kSeedEnv = "SMOOTHTEST_SEED";

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Seed precedence: --seed flag, then SMOOTHTEST_SEED, then the config value.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value,
                           std::uint64_t config_value) {
  if (flag != nullptr && flag->count() > 0) return flag_value;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long value = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return value;
    } catch (const std::exception&) {
      throw DomainError(fmt::format("{}='{}' is not an unsigned 64-bit integer", kSeedEnv, env));
    }
  }
  return config_value;
}

/// Everything needed to rerun an invocation.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;
  Json config = Json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  Json to_json() const {
    Json out{{"subcommand", subcommand},
             {"argv", argv},
             {"config", config},
             {"seed", seed ? Json(*seed) : Json(nullptr)},
             {"version", kVersion},
             {"inputs", inputs},
             {"outputs", outputs},
             {"timestamp", timestamp_utc()}};
    return out;
  }
};

void write_manifest(const RunManifest& manifest, const std::string& explicit_path,
                    const std::string& primary_output) {
  const std::string path =
      !explicit_path.empty() ? explicit_path : primary_output + ".manifest.json";
  write_text_file(path, manifest.to_json().dump(2) + "\n");
}


struct CommonOptions {
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;
  std::string manifest_path;
};

void add_common(CLI::App* sub, CommonOptions& common, bool with_seed) {
  if (with_seed) {
    common.seed_option =
        sub->add_option("--seed", common.seed, "Master seed (overrides SMOOTHTEST_SEED and config)");
  }
  sub->add_option("--manifest", common.manifest_path,
                  "Where to write the run manifest (default: <output>.manifest.json)");
}

// ---------------------------------------------------------------- gen
struct GenOptions {
  CommonOptions common;
  std::string spec_path;
  std::string out;
  std::optional<std::string> kind;
  std::optional<double> s, t, B, fill, upsilon, n, rho;
  std::optional<int> J0, z0, lmax;
};

int cmd_gen(const GenOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  SignalSpec spec;
  std::vector<std::string> inputs;
  if (!o.spec_path.empty()) {
    spec = signal_spec_from_json(read_json_file(o.spec_path));
    inputs.push_back(o.spec_path);
  }
  if (o.kind) spec.kind = signal_kind_from_string(*o.kind);
  if (o.s) spec.s = *o.s;
  if (o.t) spec.t = *o.t;
  if (o.B) spec.B = *o.B;
  if (o.fill) spec.fill = *o.fill;
  if (o.upsilon) spec.upsilon = *o.upsilon;
  if (o.n) spec.n = *o.n;
  if (o.rho) spec.rho = *o.rho;
  if (o.J0) spec.shape.base_level = *o.J0;
  if (o.z0) spec.shape.base_size = *o.z0;
  if (o.lmax) spec.shape.max_level = *o.lmax;
  spec.seed = resolve_seed(o.common.seed_option, o.common.seed, spec.seed);

  const CoefficientTree tree = generate(spec);
  write_text_file(o.out, tree_to_json(tree).dump() + "\n");

  RunManifest manifest{"gen", argv, signal_spec_to_json(spec), spec.seed, inputs, {o.out}};
  write_manifest(manifest, o.common.manifest_path, o.out);
  out << fmt::format("wrote {} (levels {}..{})\n", o.out, tree.base_level(), tree.max_level());
  return exit_code::kAccept;
}

// ---------------------------------------------------------------- observe
struct ObserveOptions {
  CommonOptions common;
  std::string tree_path;
  std::string profile_path;
  double n = 0.0;
  bool split = false;
  std::string out;
  std::string out2;
};

int cmd_observe(const ObserveOptions& o, const std::vector<std::string>& argv,
                std::ostream& out) {
  const CoefficientTree signal = tree_from_json(read_json_file(o.tree_path));
  const std::uint64_t seed = resolve_seed(o.common.seed_option, o.common.seed, 0);
  RunManifest manifest{"observe", argv, Json{{"n", o.n}, {"split", o.split}}, seed,
                       {o.tree_path}, {o.out}};
  if (o.split) {
    if (o.out2.empty()) throw DomainError("--split needs --out2 for the second half");
    const auto [first, second] = observe_split(signal, o.n, seed);
    write_text_file(o.out, observation_to_json(first).dump() + "\n");
    write_text_file(o.out2, observation_to_json(second).dump() + "\n");
    manifest.outputs.push_back(o.out2);
  } else if (!o.profile_path.empty()) {
    const CoefficientTree profile = tree_from_json(read_json_file(o.profile_path));
    manifest.inputs.push_back(o.profile_path);
    write_text_file(o.out, observation_to_json(observe_hetero(signal, o.n, profile, seed)).dump() +
                               "\n");
  } else {
    write_text_file(o.out, observation_to_json(observe(signal, o.n, seed)).dump() + "\n");
  }
  write_manifest(manifest, o.common.manifest_path, o.out);
  out << fmt::format("wrote {}\n", o.out);
  return exit_code::kAccept;
}

// ---------------------------------------------------------------- test
struct TestOptions {
  CommonOptions common;
  std::string input;
  std::string input2;
  std::optional<double> n, t, s, B, alpha;
  std::optional<int> J0, z0;
  std::string calibration = "analytic";
  std::size_t calibration_trials = 2000;
  std::string json_out;
  std::string csv_out;
};

int decision_code(const TestReport& report) {
  return report.decision == 1 ? exit_code::kReject : exit_code::kAccept;
}

int cmd_test(const TestOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const Json first_json = read_json_file(o.input);
  Observation first = is_observation(first_json)
                          ? observation_from_json(first_json)
                          : Observation{tree_from_json(first_json), 0.0, 0, 0};
  const bool split = !o.input2.empty();

  TestParams params;
  params.J0 = first.tree.base_level();
  params.z0 = first.tree.base_size();
  if (first.n > 0.0) params.n = split ? 2.0 * first.n : first.n;
  if (o.n) params.n = *o.n;
  if (!o.n && first.n <= 0.0) {
    throw DomainError("input is a bare tree; pass --n to set the noise level");
  }
  if (o.t) params.t = *o.t;
  if (o.s) params.s = *o.s;
  if (o.B) params.B = *o.B;
  if (o.alpha) params.alpha = *o.alpha;
  if (o.J0) params.J0 = *o.J0;
  if (o.z0) params.z0 = *o.z0;
  if (first.n <= 0.0) first.n = params.n;

  RunManifest manifest{"test", argv, params_to_json(params), std::nullopt, {o.input}, {}};
  TestReport report;
  if (split) {
    Observation second = observation_from_json(read_json_file(o.input2));
    manifest.inputs.push_back(o.input2);
    SplitCalibration calibration;
    if (o.calibration == "empirical") {
      calibration.kind = CalibrationKind::empirical;
      calibration.trials = o.calibration_trials;
      calibration.seed = resolve_seed(o.common.seed_option, o.common.seed, calibration.seed);
      manifest.seed = calibration.seed;
    } else if (o.calibration != "analytic") {
      throw DomainError("--calibration must be 'analytic' or 'empirical'");
    }
    manifest.config["calibration"] = o.calibration;
    report = run_split_test(first, second, params, calibration);
  } else {
    report = run_test(first, params);
  }

  Json report_json = report_to_json(report);
  if (!o.csv_out.empty()) {
    write_text_file(o.csv_out, report_csv_header() + "\n" + report_csv_row(report) + "\n");
    manifest.outputs.push_back(o.csv_out);
  }
  if (!o.json_out.empty()) {
    write_text_file(o.json_out, report_json.dump(2) + "\n");
    manifest.outputs.insert(manifest.outputs.begin(), o.json_out);
  }
  if (!manifest.outputs.empty() || !o.common.manifest_path.empty()) {
    write_manifest(manifest, o.common.manifest_path,
                   manifest.outputs.empty() ? std::string() : manifest.outputs.front());
  }
  if (o.json_out.empty()) {
    if (manifest.outputs.empty() && o.common.manifest_path.empty()) {
      report_json["manifest"] = manifest.to_json();
    }
    out << report_json.dump(2) << "\n";
  } else {
    out << (report.decision == 1 ? "reject" : "accept") << "\n";
  }
  return decision_code(report);
}

// ---------------------------------------------------------------- mc
struct McOptions {
  CommonOptions common;
  std::string config_path;
  std::string out;
  std::optional<std::size_t> trials;
  std::optional<std::string> mode;
  unsigned jobs = 1;
};

double amplitude_of(const SignalSpec& spec) {
  switch (spec.kind) {
    case SignalKind::rademacher_alt: return spec.upsilon;
    case SignalKind::separated_alt: return spec.rho;
    case SignalKind::null_random: return spec.fill;
    case SignalKind::null_worst_case: return 1.0;
    case SignalKind::explicit_tree: return 0.0;
  }
  return 0.0;
}

void set_amplitude(SignalSpec& spec, double value) {
  switch (spec.kind) {
    case SignalKind::rademacher_alt: spec.upsilon = value; break;
    case SignalKind::separated_alt: spec.rho = value; break;
    case SignalKind::null_random: spec.fill = value; break;
    default: throw DomainError("amplitude_grid needs a rademacher, separated or null_random signal");
  }
}

std::vector<double> double_list(const Json& json, const char* name) {
  if (!json.contains(name)) return {};
  if (!json.at(name).is_array()) throw StructuralError(fmt::format("field '{}' must be an array", name));
  std::vector<double> values;
  for (const auto& v : json.at(name)) {
    if (!v.is_number()) throw StructuralError(fmt::format("field '{}' holds a non-number", name));
    values.push_back(v.get<double>());
  }
  return values;
}

/// A manifest may be passed wherever a config is expected.
Json unwrap_config(const Json& json) {
  if (json.is_object() && json.contains("subcommand") && json.contains("config")) {
    return json.at("config");
  }
  return json;
}

int cmd_mc(const McOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const Json config = unwrap_config(read_json_file(o.config_path));
  if (!config.is_object()) throw StructuralError("mc config must be a JSON object");
  ExperimentSpec base;
  base.params = params_from_json(config.value("params", Json::object()));
  if (config.contains("signal")) base.signal = signal_spec_from_json(config.at("signal"));
  base.trials = config.value("trials", base.trials);
  base.master_seed = config.value("seed", base.master_seed);
  const std::string mode = o.mode.value_or(config.value("mode", std::string("level")));
  if (mode != "level" && mode != "power") throw DomainError("mode must be 'level' or 'power'");
  base.mode = mode == "level" ? ErrorMode::level : ErrorMode::power;
  base.split = config.value("split", false);
  if (config.contains("calibration")) {
    const Json& c = config.at("calibration");
    base.calibration.kind = c.value("kind", std::string("analytic")) == "empirical"
                                ? CalibrationKind::empirical
                                : CalibrationKind::analytic_default;
    base.calibration.trials = c.value("trials", base.calibration.trials);
    base.calibration.seed = c.value("seed", base.calibration.seed);
  }
  if (o.trials) base.trials = *o.trials;
  base.master_seed = resolve_seed(o.common.seed_option, o.common.seed, base.master_seed);
  base.jobs = o.jobs;

  std::vector<double> n_grid = double_list(config, "n_grid");
  if (n_grid.empty()) n_grid.push_back(base.params.n);
  std::vector<double> amplitudes = double_list(config, "amplitude_grid");
  const bool amplitude_sweep = !amplitudes.empty();
  if (!amplitude_sweep) amplitudes.push_back(amplitude_of(base.signal));

  std::ostringstream csv;
  csv << "n,amplitude,trials,rejections,rate,ci_lo,ci_hi\n";
  std::size_t row = 0;
  for (double n : n_grid) {
    for (double amplitude : amplitudes) {
      ExperimentSpec spec = base;
      spec.params.n = n;
      spec.master_seed = derive_seed(base.master_seed, {row++});
      if (amplitude_sweep) set_amplitude(spec.signal, amplitude);
      if (spec.signal.kind == SignalKind::rademacher_alt) spec.signal.n = n;
      spec.signal.shape.base_level = spec.params.J0;
      spec.signal.shape.base_size = spec.params.z0;
      const int j = spec.params.cutoff();
      if (spec.signal.kind != SignalKind::explicit_tree && spec.signal.shape.max_level < j) {
        spec.signal.shape.max_level = j + 4;
      }
      const MCResult result = estimate_error(spec);
      csv << fmt::format("{},{},{},{},{},{},{}\n", format_double(n), format_double(amplitude),
                         result.trials, result.rejections, format_double(result.rate),
                         format_double(result.ci_lo), format_double(result.ci_hi));
    }
  }
  write_text_file(o.out, csv.str());

  Json resolved = config;
  resolved["seed"] = base.master_seed;
  resolved["trials"] = base.trials;
  resolved["mode"] = mode;
  RunManifest manifest{"mc", argv, resolved, base.master_seed, {o.config_path}, {o.out}};
  write_manifest(manifest, o.common.manifest_path, o.out);
  out << fmt::format("wrote {} ({} rows)\n", o.out, row);
  return exit_code::kAccept;
}

// ---------------------------------------------------------------- sweep
struct SweepOptions {
  CommonOptions common;
  std::string config_path;
  std::string out;
  std::optional<std::size_t> trials;
  unsigned jobs = 1;
};

int cmd_sweep(const SweepOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const Json config = unwrap_config(read_json_file(o.config_path));
  if (!config.is_object()) throw StructuralError("sweep config must be a JSON object");
  SweepSpec spec;
  spec.params = params_from_json(config.value("params", Json::object()));
  spec.n_grid = double_list(config, "n_grid");
  spec.trials_per_probe = config.value("trials_per_probe", spec.trials_per_probe);
  spec.max_steps = config.value("max_steps", spec.max_steps);
  spec.target_power = config.value("target_power", spec.target_power);
  spec.bracket_ratio = config.value("bracket_ratio", spec.bracket_ratio);
  spec.master_seed = config.value("seed", spec.master_seed);
  if (o.trials) spec.trials_per_probe = *o.trials;
  spec.master_seed = resolve_seed(o.common.seed_option, o.common.seed, spec.master_seed);
  spec.jobs = o.jobs;

  const SweepResult result = rate_sweep(spec);
  std::ostringstream csv;
  csv << "n,j,boundary,ci_lo,ci_hi,lower_reference,upper_reference,residual\n";
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const SweepPoint& p = result.points[i];
    csv << fmt::format("{},{},{},{},{},{},{},{}\n", format_double(p.n), p.j,
                       format_double(p.boundary), format_double(p.ci_lo),
                       format_double(p.ci_hi), format_double(p.lower_reference),
                       format_double(p.upper_reference), format_double(result.residuals[i]));
  }
  csv << fmt::format("slope,{},intercept,{},expected_slope,{},,\n", format_double(result.slope),
                     format_double(result.intercept), format_double(result.expected_slope));
  write_text_file(o.out, csv.str());

  Json resolved = config;
  resolved["seed"] = spec.master_seed;
  resolved["trials_per_probe"] = spec.trials_per_probe;
  RunManifest manifest{"sweep", argv, resolved, spec.master_seed, {o.config_path}, {o.out}};
  write_manifest(manifest, o.common.manifest_path, o.out);
  out << fmt::format("wrote {}; fitted slope {:.4f} (expected {:.4f})\n", o.out, result.slope,
                     result.expected_slope);
  return exit_code::kAccept;
}

// ---------------------------------------------------------------- lb-check
struct LbOptions {
  CommonOptions common;
  std::string config_path;
  std::string out;
  std::optional<std::size_t> trials;
};

int cmd_lb_check(const LbOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  Json config = Json::object();
  std::vector<std::string> inputs;
  if (!o.config_path.empty()) {
    config = unwrap_config(read_json_file(o.config_path));
    inputs.push_back(o.config_path);
  }
  std::vector<double> upsilons = double_list(config, "upsilons");
  if (upsilons.empty()) {
    for (int i = 1; i <= 10; ++i) upsilons.push_back(0.1 * i);
  }
  std::vector<int> levels;
  if (config.contains("levels")) {
    levels = config.at("levels").get<std::vector<int>>();
  } else {
    levels = {1, 2, 3};
  }
  const double n = config.value("n", 1e6);
  std::size_t trials = config.value("trials", std::size_t{10000});
  if (o.trials) trials = *o.trials;
  const std::uint64_t seed =
      resolve_seed(o.common.seed_option, o.common.seed, config.value("seed", std::uint64_t{1}));

  std::ostringstream csv;
  csv << "upsilon,j,closed_form,enumeration,mc_estimate,mc_se,bound_2v4\n";
  std::uint64_t row = 0;
  for (int j : levels) {
    for (double upsilon : upsilons) {
      const auto inst = LowerBoundInstance::at_level(upsilon, j, n);
      const double closed = chi2_closed_form(inst);
      const double enumerated = chi2_enumeration(inst);
      const Chi2Estimate mc = chi2_monte_carlo(inst, trials, derive_seed(seed, {row++}));
      const double u2 = upsilon * upsilon;
      csv << fmt::format("{},{},{},{},{},{},{}\n", format_double(upsilon), j,
                         format_double(closed), format_double(enumerated),
                         format_double(mc.estimate), format_double(mc.standard_error),
                         format_double(2.0 * u2 * u2));
    }
  }
  write_text_file(o.out, csv.str());

  Json resolved{{"upsilons", upsilons}, {"levels", levels}, {"n", n}, {"trials", trials},
                {"seed", seed}};
  RunManifest manifest{"lb-check", argv, resolved, seed, inputs, {o.out}};
  write_manifest(manifest, o.common.manifest_path, o.out);
  out << fmt::format("wrote {} ({} rows)\n", o.out, row);
  return exit_code::kAccept;
}

// ---------------------------------------------------------------- check
struct CheckOptions {
  CommonOptions common;
  std::string tree_path;
  double s = 2.0;
  double t = 1.0;
  double B = 1.0;
  std::string out;
};

int cmd_check(const CheckOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  const CoefficientTree tree = tree_from_json(read_json_file(o.tree_path));
  const BesovBall s_ball{o.s, o.B};
  const BesovBall t_ball{o.t, o.B};
  Json level_norms = Json::array();
  for (int l = tree.base_level(); l <= tree.max_level(); ++l) {
    level_norms.push_back(Json{{"level", l},
                               {"norm", level_norm(tree, l)},
                               {"s_bound", s_ball.level_bound(l)},
                               {"t_bound", t_ball.level_bound(l)}});
  }
  const double s_norm = besov_norm(tree, o.s);
  const double t_norm = besov_norm(tree, o.t);
  Json report{{"l2_norm", l2_norm(tree)},
              {"besov_norm_s", s_norm},
              {"besov_norm_t", t_norm},
              {"distance_to_s_ball", distance_to_ball(tree, s_ball)},
              {"in_s_ball", s_norm <= o.B},
              {"in_t_ball", t_norm <= o.B},
              {"levels", std::move(level_norms)}};
  RunManifest manifest{"check", argv, Json{{"s", o.s}, {"t", o.t}, {"B", o.B}}, std::nullopt,
                       {o.tree_path}, {}};
  if (!o.out.empty()) {
    write_text_file(o.out, report.dump(2) + "\n");
    manifest.outputs.push_back(o.out);
    write_manifest(manifest, o.common.manifest_path, o.out);
  } else {
    if (!o.common.manifest_path.empty()) {
      write_manifest(manifest, o.common.manifest_path, "");
    } else {
      report["manifest"] = manifest.to_json();
    }
    out << report.dump(2) << "\n";
  }
  return exit_code::kAccept;
}

// ---------------------------------------------------------------- ingest
struct IngestOptions {
  CommonOptions common;
  std::string csv_path;
  std::string kind = "regression";
  std::string mode = "plugin";
  double t = 0.5;
  double s = 0.9;
  double B = 1.0;
  double alpha = 0.1;
  std::optional<int> lmax;
  std::string tree_out;
  std::string json_out;
};

int cmd_ingest(const IngestOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.kind != "regression" && o.kind != "density") {
    throw DomainError("--kind must be 'regression' or 'density'");
  }
  if (o.mode != "plugin" && o.mode != "split") {
    throw DomainError("--mode must be 'plugin' or 'split'");
  }
  const SampleKind kind = o.kind == "regression" ? SampleKind::regression : SampleKind::density;
  const SampleSet samples = read_samples_csv(o.csv_path, kind);
  const TestParams params{static_cast<double>(samples.size()), o.t, o.s, o.B, o.alpha, 0, 2};
  const TestReport report = test_from_samples(
      samples, params, o.mode == "plugin" ? IngestMode::plugin : IngestMode::split);

  RunManifest manifest{"ingest", argv, params_to_json(report.params), std::nullopt,
                       {o.csv_path}, {}};
  manifest.config["kind"] = o.kind;
  manifest.config["mode"] = o.mode;
  if (!o.tree_out.empty()) {
    const CoefficientEstimate estimate =
        estimate_coefficients(samples, o.lmax.value_or(report.j));
    Json tree_json = tree_to_json(estimate.tree);
    tree_json["effective_n"] = estimate.effective_n;
    write_text_file(o.tree_out, tree_json.dump() + "\n");
    manifest.outputs.push_back(o.tree_out);
  }
  Json report_json = report_to_json(report);
  if (!o.json_out.empty()) {
    write_text_file(o.json_out, report_json.dump(2) + "\n");
    manifest.outputs.insert(manifest.outputs.begin(), o.json_out);
    out << (report.decision == 1 ? "reject" : "accept") << "\n";
  } else {
    out << report_json.dump(2) << "\n";
  }
  if (!manifest.outputs.empty() || !o.common.manifest_path.empty()) {
    write_manifest(manifest, o.common.manifest_path,
                   manifest.outputs.empty() ? std::string() : manifest.outputs.front());
  }
  return decision_code(report);
}

int map_error(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const CoverageError*>(&e)) return exit_code::kCoverage;
  if (dynamic_cast<const StructuralError*>(&e)) return exit_code::kStructural;
  if (dynamic_cast<const FeasibilityError*>(&e)) return exit_code::kFeasibility;
  if (dynamic_cast<const ConvergenceError*>(&e)) return exit_code::kConvergence;
  if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const RangeError*>(&e) ||
      dynamic_cast<const ConfigurationError*>(&e) || dynamic_cast<const CostError*>(&e) ||
      dynamic_cast<const DesignError*>(&e) || dynamic_cast<const ResolutionError*>(&e)) {
    return exit_code::kDomain;
  }
  return exit_code::kOther;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax smoothness test in the Gaussian wavelet sequence model", "smoothtest"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // Replaying re-enters run_cli with the recorded arguments.
  std::string replay_manifest;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Rerun an invocation from its manifest");
  replay->add_option("manifest", replay_manifest, "Manifest written by an earlier run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("-o,--out", replay_out, "Replace the primary output path");

  GenOptions gen_o;
  auto* gen = app.add_subcommand("gen", "Generate a coefficient tree from a signal spec");
  add_common(gen, gen_o.common, true);
  gen->add_option("--spec", gen_o.spec_path, "SignalSpec JSON file")->check(CLI::ExistingFile);
  gen->add_option("-o,--out", gen_o.out, "Output tree JSON")->required();
  gen->add_option("--kind", gen_o.kind,
                  "null_worst_case | null_random | rademacher_alt | separated_alt");
  gen->add_option("--s", gen_o.s);
  gen->add_option("--t", gen_o.t);
  gen->add_option("--B", gen_o.B);
  gen->add_option("--fill", gen_o.fill);
  gen->add_option("--upsilon", gen_o.upsilon);
  gen->add_option("--n", gen_o.n);
  gen->add_option("--rho", gen_o.rho);
  gen->add_option("--J0", gen_o.J0);
  gen->add_option("--z0", gen_o.z0);
  gen->add_option("--lmax", gen_o.lmax, "Finest stored level");

  ObserveOptions obs_o;
  auto* obs = app.add_subcommand("observe", "Add Gaussian sequence-model noise to a tree");
  add_common(obs, obs_o.common, true);
  obs->add_option("--tree", obs_o.tree_path)->required()->check(CLI::ExistingFile);
  obs->add_option("--n", obs_o.n, "Noise parameter (variance 1/n)")->required();
  obs->add_option("--profile", obs_o.profile_path, "Per-coefficient variance profile (tree JSON)")
      ->check(CLI::ExistingFile);
  obs->add_flag("--split", obs_o.split, "Write two independent half-sample observations");
  obs->add_option("-o,--out", obs_o.out)->required();
  obs->add_option("--out2", obs_o.out2, "Second half when --split is given");

  TestOptions test_o;
  auto* test = app.add_subcommand("test", "Run the smoothness test (exit 0 accept, 3 reject)");
  add_common(test, test_o.common, true);
  test->add_option("--input", test_o.input, "Observation or tree JSON")
      ->required()
      ->check(CLI::ExistingFile);
  test->add_option("--input2", test_o.input2, "Second half: switches to the split statistic")
      ->check(CLI::ExistingFile);
  test->add_option("--n", test_o.n);
  test->add_option("--t", test_o.t);
  test->add_option("--s", test_o.s);
  test->add_option("--B", test_o.B);
  test->add_option("--alpha", test_o.alpha);
  test->add_option("--J0", test_o.J0);
  test->add_option("--z0", test_o.z0);
  test->add_option("--calibration", test_o.calibration, "analytic | empirical (split only)");
  test->add_option("--calibration-trials", test_o.calibration_trials);
  test->add_option("--json", test_o.json_out, "Report JSON path");
  test->add_option("--csv", test_o.csv_out, "One-line CSV report path");

  McOptions mc_o;
  auto* mc = app.add_subcommand("mc", "Monte Carlo type-I / type-II error estimation");
  add_common(mc, mc_o.common, true);
  mc->add_option("--config", mc_o.config_path)->required()->check(CLI::ExistingFile);
  mc->add_option("-o,--out", mc_o.out)->required();
  mc->add_option("--trials", mc_o.trials);
  mc->add_option("--mode", mc_o.mode, "level | power");
  mc->add_option("--jobs", mc_o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  SweepOptions sweep_o;
  auto* sweep = app.add_subcommand("sweep", "Detection-boundary sweep over n");
  add_common(sweep, sweep_o.common, true);
  sweep->add_option("--config", sweep_o.config_path)->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", sweep_o.out)->required();
  sweep->add_option("--trials", sweep_o.trials, "Trials per bisection probe");
  sweep->add_option("--jobs", sweep_o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  LbOptions lb_o;
  auto* lb = app.add_subcommand("lb-check", "Chi-square lower-bound oracle table");
  add_common(lb, lb_o.common, true);
  lb->add_option("--config", lb_o.config_path)->check(CLI::ExistingFile);
  lb->add_option("-o,--out", lb_o.out)->required();
  lb->add_option("--trials", lb_o.trials);

  CheckOptions check_o;
  auto* check = app.add_subcommand("check", "Norms and distances of a tree file");
  add_common(check, check_o.common, false);
  check->add_option("--tree", check_o.tree_path)->required()->check(CLI::ExistingFile);
  check->add_option("--s", check_o.s);
  check->add_option("--t", check_o.t);
  check->add_option("--B", check_o.B);
  check->add_option("-o,--out", check_o.out);

  IngestOptions ingest_o;
  auto* ingest = app.add_subcommand("ingest", "Estimate Haar coefficients from samples and test");
  add_common(ingest, ingest_o.common, false);
  ingest->add_option("--csv", ingest_o.csv_path, "CSV with columns x[,y]")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--kind", ingest_o.kind, "regression | density");
  ingest->add_option("--mode", ingest_o.mode, "plugin | split");
  ingest->add_option("--t", ingest_o.t);
  ingest->add_option("--s", ingest_o.s);
  ingest->add_option("--B", ingest_o.B);
  ingest->add_option("--alpha", ingest_o.alpha);
  ingest->add_option("--lmax", ingest_o.lmax, "Depth of the written tree (default: cutoff j)");
  ingest->add_option("--tree-out", ingest_o.tree_out);
  ingest->add_option("--json", ingest_o.json_out);

  std::ostringstream parse_out, parse_err;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, parse_out, parse_err);
    out << parse_out.str();
    err << parse_err.str();
    return code;
  }

  try {
    if (replay->parsed()) {
      const Json manifest = read_json_file(replay_manifest);
      auto argv = manifest.at("argv").get<std::vector<std::string>>();
      if (!replay_out.empty()) {
        bool replaced = false;
        for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
          if (argv[i] == "-o" || argv[i] == "--out" || argv[i] == "--json") {
            argv[i + 1] = replay_out;
            replaced = true;
            break;
          }
        }
        if (!replaced) throw DomainError("recorded invocation has no output path to replace");
      }
      if (manifest.contains("seed") && !manifest.at("seed").is_null()) {
        for (auto it = argv.begin(); it != argv.end();) {
          if (*it == "--seed" && it + 1 != argv.end()) {
            it = argv.erase(it, it + 2);
          } else if (it->rfind("--seed=", 0) == 0) {
            it = argv.erase(it);
          } else {
            ++it;
          }
        }
        argv.push_back("--seed");
        argv.push_back(std::to_string(manifest.at("seed").get<std::uint64_t>()));
      }
      return run_cli(argv, out, err);
    }
    if (gen->parsed()) return cmd_gen(gen_o, args, out);
    if (obs->parsed()) return cmd_observe(obs_o, args, out);
    if (test->parsed()) return cmd_test(test_o, args, out);
    if (mc->parsed()) return cmd_mc(mc_o, args, out);
    if (sweep->parsed()) return cmd_sweep(sweep_o, args, out);
    if (lb->parsed()) return cmd_lb_check(lb_o, args, out);
    if (check->parsed()) return cmd_check(check_o, args, out);
    if (ingest->parsed()) return cmd_ingest(ingest_o, args, out);
  } catch (const std::exception& e) {
    return map_error(err, e);
  }
  return exit_code::kOther;
}

}  // namespace smoothtest
