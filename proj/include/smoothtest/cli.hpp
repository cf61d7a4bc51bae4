#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smoothtest {

/// Exit codes of the command-line tool. Test decisions map to kAccept /
/// kReject so shell scripts can branch without parsing the report.
namespace exit_code {
inline constexpr int kAccept = 0;
inline constexpr int kReject = 3;
inline constexpr int kCoverage = 4;
inline constexpr int kStructural = 5;
inline constexpr int kDomain = 6;
inline constexpr int kFeasibility = 7;
inline constexpr int kConvergence = 8;
inline constexpr int kOther = 9;
}  // namespace exit_code

inline constexpr const char* kVersion = "0.1.0";

/// Runs the tool with `args` (program name excluded).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smoothtest
