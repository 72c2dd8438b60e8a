#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "spec_file.hpp"

namespace hlcf::cli {

inline constexpr const char* kToolName = "hlcf";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode { kOk = 0, kVerificationFailed = 1, kParseFailure = 2, kRefused = 3 };

/// Command-line values that take precedence over task parameters.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> level;
    std::optional<int> samples;
    std::optional<int> ell;
};

struct TaskResult {
    nlohmann::json json;
    std::string line;
    bool ok = true;
};

/// Runs the tasks of one subcommand. Tasks come from the spec file unless
/// `positional` supplies them directly.
std::vector<TaskResult> run_tasks(const SpecFile& spec, const std::string& command,
                                  const std::vector<std::string>& positional, const Overrides& ov);

nlohmann::json field_json(const SpecFile& spec);
nlohmann::json report_json(const SpecFile& spec, const std::string& command, const std::vector<TaskResult>& results);

/// Full command line (without the program name). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hlcf::cli
