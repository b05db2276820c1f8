#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levypot/dirichlet.hpp"

namespace levypot {

struct SuiteSettings {
  std::uint64_t seed = 20261016;
  double samples_scale = 1.0;
  double confidence = confidence_for_sigma(3.0);

  [[nodiscard]] std::int64_t samples(std::int64_t base) const;
  [[nodiscard]] EstimatorOptions options(std::string_view experiment, std::int64_t base) const;
};

/// One checked quantity. `params` carries the inputs a reader needs to recompute
/// `target` independently.
struct SuiteRow {
  std::string label;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  double target = 0.0;
  std::string verdict;
  std::vector<double> params;
};

struct SuiteResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  std::vector<SuiteRow> rows;
};

SuiteResult suite_variance_identity(const SuiteSettings& s);
SuiteResult suite_gaussian_lyapunov(const SuiteSettings& s);
SuiteResult suite_levy_sandwich(const SuiteSettings& s);
SuiteResult suite_moment_formulas(const SuiteSettings& s);
SuiteResult suite_projection_consistency(const SuiteSettings& s);
SuiteResult suite_reduced_projection(const SuiteSettings& s);
SuiteResult suite_dirichlet_oracles(const SuiteSettings& s);
SuiteResult suite_controlled_convergence(const SuiteSettings& s);
SuiteResult suite_capacity_balayage(const SuiteSettings& s);
SuiteResult suite_projection_tail(const SuiteSettings& s);

struct SuiteEntry {
  std::string op;
  std::function<SuiteResult(const SuiteSettings&)> run;
};

/// Registry of the battery in criterion order, ops named "suite.<name>".
const std::vector<SuiteEntry>& suite_entries();

}  // namespace levypot
