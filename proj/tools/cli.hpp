#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qstar::cli {

enum class Format { plain, json, csv };

struct CliConfig {
  double precision = 1e-10;
  Format output_format = Format::plain;
  std::string output_path;
  long long seed = 42;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitFailures = 2;

/// args excludes the program name. Results go to out (or --out), diagnostics
/// to err. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

}  // namespace qstar::cli
