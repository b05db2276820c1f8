#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "levypot/rng.hpp"

namespace levypot {

enum class Verdict { pass, fail, inconclusive };

std::string_view to_string(Verdict v);

/// Two-sided normal quantile z with P(|N(0,1)| <= z) = confidence.
double z_for_confidence(double confidence);

/// Confidence level whose two-sided band is `sigmas` standard errors wide.
double confidence_for_sigma(double sigmas);

inline constexpr double kDefaultConfidence = 0.999;
inline constexpr double kDefaultAtol = 1e-9;

/// Result of every stochastic operation.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  double confidence = kDefaultConfidence;

  [[nodiscard]] double z() const { return z_for_confidence(confidence); }

  /// pass if |mean - target| <= z*se + atol, fail beyond 3*z*se + atol.
  [[nodiscard]] Verdict verdict(double target, double atol = kDefaultAtol) const;
  /// One-sided: claim mean <= bound.
  [[nodiscard]] Verdict verdict_at_most(double bound, double atol = kDefaultAtol) const;
  /// One-sided: claim mean >= bound.
  [[nodiscard]] Verdict verdict_at_least(double bound, double atol = kDefaultAtol) const;

  [[nodiscard]] McEstimate scaled(double factor) const;
};

/// Independent estimates combined: a*x + b*y, standard errors added in quadrature.
McEstimate combine(const McEstimate& x, double a, const McEstimate& y, double b);

/// Streaming mean/variance (Welford), mergeable with Chan's pairwise formula.
class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const Accumulator& other);

  [[nodiscard]] std::int64_t count() const { return n_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double variance() const;
  [[nodiscard]] McEstimate estimate(double confidence) const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Number of worker threads used by sharded estimators (default 1).
void set_num_threads(int threads);
int num_threads();

/// Samples per shard. Shard boundaries are fixed, so merged results do not
/// depend on the number of threads.
inline constexpr std::int64_t kShardSize = 1024;

/// Runs task(shard) for shard in [0, count) on the configured worker threads.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& task);

struct EstimatorOptions {
  std::int64_t samples = 10000;
  StreamKey key{};
  double confidence = kDefaultConfidence;

  [[nodiscard]] EstimatorOptions with_key(StreamKey k) const {
    auto copy = *this;
    copy.key = k;
    return copy;
  }
  [[nodiscard]] EstimatorOptions with_samples(std::int64_t n) const {
    auto copy = *this;
    copy.samples = n;
    return copy;
  }
};

/// Per-shard accumulators for `width` jointly sampled quantities. Sample i draws
/// from RngStream(opts.key, i) and writes `width` values; all quantities of a
/// sample share its random numbers (common random numbers).
std::vector<std::vector<Accumulator>> run_sharded(
    int width, const EstimatorOptions& opts,
    const std::function<void(RngStream&, std::int64_t, std::span<double>)>& draw);

std::vector<McEstimate> merge_shards(const std::vector<std::vector<Accumulator>>& shards,
                                     double confidence, std::size_t first = 0,
                                     std::size_t last = static_cast<std::size_t>(-1));

/// Joint estimate of `width` quantities sharing each sample's random stream.
template <class Draw>
std::vector<McEstimate> estimate_joint(int width, const EstimatorOptions& opts, Draw&& draw) {
  auto shards = run_sharded(width, opts, [&](RngStream& rng, std::int64_t, std::span<double> out) {
    draw(rng, out);
  });
  return merge_shards(shards, opts.confidence);
}

template <class Draw>
McEstimate estimate(const EstimatorOptions& opts, Draw&& draw) {
  auto shards = run_sharded(1, opts, [&](RngStream& rng, std::int64_t, std::span<double> out) {
    out[0] = draw(rng);
  });
  return merge_shards(shards, opts.confidence).front();
}

}  // namespace levypot
