#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcurv/report.hpp"

namespace rcurv {

/// Knobs shared by every verification suite. Unset fields take the suite default.
struct SuiteOptions {
  std::vector<std::string> manifolds;
  std::optional<double> tol;
  std::uint64_t seed = 42;
  std::optional<int> samples;
  /// Dimension filter (`--n` / `--dim`).
  std::optional<int> dim;
  std::optional<int> nodes_per_axis;
  /// Highest metric jet order the run may request.
  std::optional<int> jet_order;
};

struct SuiteInfo {
  std::string name;
  std::string summary;
  double default_tol = 0.0;
  /// Metric jet order the suite needs on its default models.
  int jet_order = 0;
};

const std::vector<SuiteInfo>& suite_catalog();
const SuiteInfo& suite_info(const std::string& name);

/// Throws std::invalid_argument for an unknown suite, an unknown or unsuitable
/// manifold, a dimension the suite cannot use, or a jet-order cap below its need.
void validate_suite(const std::string& name, const SuiteOptions& opts);

/// Runs validate_suite first; checks come back in a fixed order.
std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& opts = {});

}  // namespace rcurv
