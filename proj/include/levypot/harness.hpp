#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "levypot/suite.hpp"

namespace levypot {

inline constexpr std::string_view kLibraryVersion = "1.0.0";
inline constexpr std::string_view kCsvHeader = "experiment,op,param_hash,mean,stderr,n,target,verdict,seconds";

struct ExperimentSpec {
  std::string name;
  std::string op;
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
  double confidence = kDefaultConfidence;
  std::string params;   // canonical JSON text
  std::string triplet;  // canonical JSON text of the effective triplet
  std::string hash;
};

struct RunConfig {
  std::uint64_t seed = 20261016;
  double confidence = kDefaultConfidence;
  std::string space;    // canonical JSON text
  std::string triplet;  // canonical JSON text
  std::vector<ExperimentSpec> experiments;
};

/// Parses and validates a config. Throws ConfigError naming the line or field.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Registered operation names, elementary and suite.
std::vector<std::string> registered_ops();

struct RunOptions {
  std::optional<std::uint64_t> seed;
  double samples_scale = 1.0;
  std::filesystem::path out;  // empty: no files written
  std::string filter = "*";
  int threads = 0;  // 0 keeps the current setting
  bool timing = false;
};

struct ResultRow {
  std::string experiment;
  std::string op;
  std::string param_hash;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  double target = 0.0;
  std::string verdict;
  double seconds = 0.0;
  bool counted = true;  // rows that decide the exit status
};

struct ExperimentRecord {
  std::string name;
  std::string op;
  std::string hash;
  std::string verdict;
  std::string summary;
  double seconds = 0.0;
};

struct RunRecord {
  std::vector<ResultRow> rows;
  std::vector<ExperimentRecord> experiments;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t inconclusive = 0;

  [[nodiscard]] int exit_code() const { return failed > 0 ? 1 : 0; }
};

RunRecord run(const RunConfig& config, const RunOptions& options);
RunRecord run(const std::filesystem::path& config_path, const RunOptions& options);

std::string to_csv(const RunRecord& record, bool timing);
std::string to_json(const RunRecord& record, const RunConfig& config, const RunOptions& options);
void write_outputs(const RunRecord& record, const RunConfig& config, const RunOptions& options);

struct VerdictTable {
  std::vector<Verdict> verdicts;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t inconclusive = 0;
};

/// Row-wise verdicts of estimates against targets with absolute tolerances.
VerdictTable verdict_aggregate(const std::vector<McEstimate>& estimates, const std::vector<double>& targets,
                               const std::vector<double>& tolerances);

bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace levypot
