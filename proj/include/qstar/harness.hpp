#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qstar/bounds.hpp"

namespace qstar {

struct SuiteReport {
  std::string suite_id;
  std::uint64_t seed = 0;
  int n_cases = 0;
  std::vector<BoundCertificate> certificates;
  int failures = 0;
  double wall_time_ms = 0.0;
};

/// One verification suite: which claims it certifies and the tolerances it
/// applies. Tolerances live here rather than in call arguments so that
/// certificates from different runs compare directly.
struct SuiteSpec {
  std::string id;
  std::vector<TheoremId> covers;
  std::string description;
  std::map<std::string, double> tolerances;
};

const std::vector<SuiteSpec>& suite_registry();

/// Suite ids: sigma, bieberbach, fs, hankel, lemmas, limits, containment, all.
/// Cases run concurrently; certificates are ordered by case index. Throws
/// ParameterError for an unknown id or n_cases < 1.
SuiteReport run_suite(const std::string& suite_id, std::uint64_t seed, int n_cases);

/// JSON with keys suite_id, seed, n_cases, certificates, failures,
/// wall_time_ms; each certificate has theorem_id, params, lhs, rhs, margin,
/// verdict ("pass" / "fail").
std::string to_json(const SuiteReport& report, bool include_wall_time = true, int indent = 2);
SuiteReport report_from_json(const std::string& text);

}  // namespace qstar
