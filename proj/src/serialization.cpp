#include "smoothtest/serialization.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "smoothtest/errors.hpp"

namespace smoothtest {

namespace {

template <typename T>
T field(const Json& json, const char* name) {
  if (!json.contains(name)) throw StructuralError(fmt::format("missing field '{}'", name));
  try {
    return json.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(fmt::format("field '{}': {}", name, e.what()));
  }
}

template <typename T>
T field_or(const Json& json, const char* name, T fallback) {
  return json.contains(name) ? field<T>(json, name) : fallback;
}

}  // namespace

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

Json tree_to_json(const CoefficientTree& tree) {
  Json out;
  out["J0"] = tree.base_level();
  out["z0"] = tree.base_size();
  Json levels = Json::array();
  for (int l = tree.base_level(); l <= tree.max_level(); ++l) {
    const auto coeffs = tree.level(l);
    levels.push_back(std::vector<double>(coeffs.begin(), coeffs.end()));
  }
  out["levels"] = std::move(levels);
  return out;
}

CoefficientTree tree_from_json(const Json& json) {
  if (!json.is_object()) throw StructuralError("coefficient tree must be a JSON object");
  const int base_level = field<int>(json, "J0");
  const int base_size = field<int>(json, "z0");
  if (!json.contains("levels") || !json.at("levels").is_array()) {
    throw StructuralError("field 'levels' must be an array of arrays");
  }
  std::vector<std::vector<double>> levels;
  std::size_t index = 0;
  for (const auto& level : json.at("levels")) {
    if (!level.is_array()) {
      throw StructuralError(fmt::format("levels[{}] is not an array", index));
    }
    std::vector<double> coeffs;
    coeffs.reserve(level.size());
    for (const auto& value : level) {
      if (!value.is_number()) {
        throw StructuralError(fmt::format("levels[{}] holds a non-numeric value", index));
      }
      coeffs.push_back(value.get<double>());
    }
    levels.push_back(std::move(coeffs));
    ++index;
  }
  return CoefficientTree(base_level, base_size, levels);
}

Json observation_to_json(const Observation& obs) {
  Json out = tree_to_json(obs.tree);
  out["n"] = obs.n;
  out["seed"] = obs.seed;
  out["split"] = obs.split;
  return out;
}

bool is_observation(const Json& json) { return json.is_object() && json.contains("n"); }

Observation observation_from_json(const Json& json) {
  Observation obs{tree_from_json(json), field<double>(json, "n"),
                  field_or<std::uint64_t>(json, "seed", 0), field_or<int>(json, "split", 0)};
  if (!(obs.n > 0.0)) throw DomainError("observation n must be positive");
  if (obs.split < 0 || obs.split > 2) throw StructuralError("split tag must be 0, 1 or 2");
  return obs;
}

Json params_to_json(const TestParams& params) {
  return Json{{"n", params.n},   {"t", params.t},         {"s", params.s},
              {"B", params.B},   {"alpha", params.alpha}, {"J0", params.J0},
              {"z0", params.z0}};
}

TestParams params_from_json(const Json& json, TestParams defaults) {
  if (!json.is_object()) throw StructuralError("test parameters must be a JSON object");
  TestParams p = defaults;
  p.n = field_or(json, "n", p.n);
  p.t = field_or(json, "t", p.t);
  p.s = field_or(json, "s", p.s);
  p.B = field_or(json, "B", p.B);
  p.alpha = field_or(json, "alpha", p.alpha);
  p.J0 = field_or(json, "J0", p.J0);
  p.z0 = field_or(json, "z0", p.z0);
  return p;
}

Json signal_spec_to_json(const SignalSpec& spec) {
  Json out{{"kind", to_string(spec.kind)},
           {"s", spec.s},
           {"t", spec.t},
           {"B", spec.B},
           {"fill", spec.fill},
           {"upsilon", spec.upsilon},
           {"n", spec.n},
           {"rho", spec.rho},
           {"J0", spec.shape.base_level},
           {"z0", spec.shape.base_size},
           {"L_max", spec.shape.max_level},
           {"seed", spec.seed}};
  if (spec.tree) out["tree"] = tree_to_json(*spec.tree);
  return out;
}

SignalSpec signal_spec_from_json(const Json& json) {
  if (!json.is_object()) throw StructuralError("signal spec must be a JSON object");
  SignalSpec spec;
  spec.kind = signal_kind_from_string(field_or<std::string>(json, "kind", "null_worst_case"));
  spec.s = field_or(json, "s", spec.s);
  spec.t = field_or(json, "t", spec.t);
  spec.B = field_or(json, "B", spec.B);
  spec.fill = field_or(json, "fill", spec.fill);
  spec.upsilon = field_or(json, "upsilon", spec.upsilon);
  spec.n = field_or(json, "n", spec.n);
  spec.rho = field_or(json, "rho", spec.rho);
  spec.shape.base_level = field_or(json, "J0", spec.shape.base_level);
  spec.shape.base_size = field_or(json, "z0", spec.shape.base_size);
  spec.shape.max_level = field_or(json, "L_max", spec.shape.max_level);
  spec.seed = field_or(json, "seed", spec.seed);
  if (json.contains("tree")) spec.tree = tree_from_json(json.at("tree"));
  return spec;
}

Json report_to_json(const TestReport& report) {
  Json levels = Json::array();
  for (const auto& st : report.stats) {
    levels.push_back(Json{{"level", st.level},
                          {"T", st.statistic},
                          {"tau", st.tau},
                          {"threshold_sq", st.threshold_sq},
                          {"exceeded", st.exceeded}});
  }
  return Json{{"decision", report.decision},
              {"j", report.j},
              {"rho_n", report.rho_n},
              {"L_max", report.max_level},
              {"statistic", report.statistic_kind},
              {"approximate_calibration", report.approximate_calibration},
              {"argmax_level", report.argmax_level()},
              {"max_margin", report.max_margin()},
              {"params", params_to_json(report.params)},
              {"levels", std::move(levels)}};
}

std::string report_csv_header() {
  return "n,t,s,B,alpha,j,decision,argmax_level,max_margin";
}

std::string report_csv_row(const TestReport& report) {
  const TestParams& p = report.params;
  return fmt::format("{},{},{},{},{},{},{},{},{}", format_double(p.n), format_double(p.t),
                     format_double(p.s), format_double(p.B), format_double(p.alpha),
                     report.j, report.decision, report.argmax_level(),
                     format_double(report.max_margin()));
}

Json mc_result_to_json(const MCResult& result) {
  return Json{{"trials", result.trials}, {"rejections", result.rejections},
              {"rate", result.rate},     {"ci_lo", result.ci_lo},
              {"ci_hi", result.ci_hi},   {"seed", result.seed},
              {"wall_time", result.wall_time}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(fmt::format("{}: {}", path, e.what()));
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace smoothtest
