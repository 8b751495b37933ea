#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ouedge::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kDegenerate = 3,
  kStrictFailure = 4,
};

enum class Format { Csv, Json, Table };

struct CliOptions {
  std::string subcommand;  // cumulants, density, expect, simulate, validate, theta-hat, converge
  std::string config_path;
  std::vector<std::string> overrides;  // dot.path=value
  std::string out_dir = ".";
  Format format = Format::Csv;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  bool strict = false;
};

// Runs one subcommand. Tables go to `out`, diagnostics to `err`; files are
// written under opts.out_dir. Returns an ExitCode.
int run(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace ouedge::cli
