#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swformer/config.hpp"
#include "swformer/grad_check.hpp"
#include "swformer/network.hpp"

namespace swformer::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,   // bad key, bad value, usage
  kExitIo = 3,       // missing or unreadable files
  kExitNumeric = 4,  // NaN/Inf during training
  kExitOther = 5,    // dimension errors and anything unexpected
  kExitGradCheck = 6,
};

struct RunOptions {
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;  // "key=value"
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;  // s, m or l
  int workers = 1;
};

// Keys accepted by `command`.
std::vector<std::string> allowed_keys(const std::string& command);

// Defaults for the command, then the config file, then --set overrides,
// then --seed / --variant. Unknown keys raise ConfigError.
FlatConfig effective_config(const RunOptions& opt);

// Runs one command, mapping exceptions to exit codes. Diagnostics go to
// `err` as a single JSON line; progress goes to `out`.
int run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct BlockGradCheck {
  std::string name;
  GradCheckReport report;
};

// Finite-difference checks of one SWFormer block on a 1 x width x 8 x 8
// input and of the whole network on 1 x 3 x size x size, grouped per
// top-level module.
std::vector<BlockGradCheck> network_grad_check(const ModelConfig& cfg, std::int64_t size, double tol,
                                               std::int64_t max_entries, std::uint64_t seed);

// CLI11 front end used by main().
int main_entry(int argc, char** argv);

}  // namespace swformer::cli
