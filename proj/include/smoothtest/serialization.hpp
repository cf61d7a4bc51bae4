#pragma once

#include <string>

#include "json.hpp"
#include "smoothtest/coefficient_tree.hpp"
#include "smoothtest/mc_harness.hpp"
#include "smoothtest/noise_model.hpp"
#include "smoothtest/signal_gen.hpp"
#include "smoothtest/smooth_test.hpp"

namespace smoothtest {

using Json = nlohmann::ordered_json;

/// 17 significant digits (printf %.17g); round-trips every double.
std::string format_double(double value);

/// {"J0": int, "z0": int, "levels": [[...], ...]}, levels from J0 upward.
Json tree_to_json(const CoefficientTree& tree);
CoefficientTree tree_from_json(const Json& json);

/// Tree fields plus {"n": real, "seed": uint64, "split": 0|1|2}.
Json observation_to_json(const Observation& obs);
Observation observation_from_json(const Json& json);
bool is_observation(const Json& json);

Json params_to_json(const TestParams& params);
/// Fields missing from `json` keep the values in `defaults`.
TestParams params_from_json(const Json& json, TestParams defaults = {});

Json signal_spec_to_json(const SignalSpec& spec);
SignalSpec signal_spec_from_json(const Json& json);

Json report_to_json(const TestReport& report);
std::string report_csv_header();
/// n, t, s, B, alpha, j, decision, argmax level, max margin.
std::string report_csv_row(const TestReport& report);

Json mc_result_to_json(const MCResult& result);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace smoothtest
