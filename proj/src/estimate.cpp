#include "levypot/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "levypot/errors.hpp"

namespace levypot {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double z_for_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ArgumentError("confidence must lie in (0, 1)");
  }
  // Newton on erf(z / sqrt 2) = confidence.
  double z = 2.0;
  for (int i = 0; i < 60; ++i) {
    const double f = std::erf(z / std::numbers::sqrt2) - confidence;
    const double df = std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z);
    const double step = f / df;
    z -= step;
    if (z <= 0.0) z = 1e-6;
    if (std::abs(step) < 1e-14) break;
  }
  return z;
}

double confidence_for_sigma(double sigmas) { return std::erf(sigmas / std::numbers::sqrt2); }

Verdict McEstimate::verdict(double target, double atol) const {
  const double gap = std::abs(mean - target);
  const double band = z() * std_error;
  if (gap <= band + atol) return Verdict::pass;
  if (gap > 3.0 * band + atol) return Verdict::fail;
  return Verdict::inconclusive;
}

Verdict McEstimate::verdict_at_most(double bound, double atol) const {
  const double excess = mean - bound;
  const double band = z() * std_error;
  if (excess <= band + atol) return Verdict::pass;
  if (excess > 3.0 * band + atol) return Verdict::fail;
  return Verdict::inconclusive;
}

Verdict McEstimate::verdict_at_least(double bound, double atol) const {
  const double deficit = bound - mean;
  const double band = z() * std_error;
  if (deficit <= band + atol) return Verdict::pass;
  if (deficit > 3.0 * band + atol) return Verdict::fail;
  return Verdict::inconclusive;
}

McEstimate McEstimate::scaled(double factor) const {
  McEstimate out = *this;
  out.mean *= factor;
  out.std_error *= std::abs(factor);
  return out;
}

McEstimate combine(const McEstimate& x, double a, const McEstimate& y, double b) {
  McEstimate out;
  out.mean = a * x.mean + b * y.mean;
  out.std_error = std::hypot(a * x.std_error, b * y.std_error);
  out.n = std::min(x.n, y.n);
  out.confidence = x.confidence;
  return out;
}

void Accumulator::merge(const Accumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(n_);
  const auto nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double d = other.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  n_ += other.n_;
}

double Accumulator::variance() const {
  if (n_ < 2) return 0.0;
  return std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

McEstimate Accumulator::estimate(double confidence) const {
  McEstimate e;
  e.mean = mean_;
  e.n = n_;
  e.confidence = confidence;
  e.std_error = n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  return e;
}

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int threads) { g_threads = std::max(1, threads); }
int num_threads() { return g_threads; }

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& task) {
  const auto workers = static_cast<std::int64_t>(std::min<std::int64_t>(g_threads, count));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::vector<Accumulator>> run_sharded(
    int width, const EstimatorOptions& opts,
    const std::function<void(RngStream&, std::int64_t, std::span<double>)>& draw) {
  if (opts.samples < 1) throw ArgumentError("sample count must be positive");
  const std::int64_t shards = (opts.samples + kShardSize - 1) / kShardSize;
  std::vector<std::vector<Accumulator>> result(static_cast<std::size_t>(shards),
                                               std::vector<Accumulator>(width));
  parallel_for(shards, [&](std::int64_t s) {
    std::vector<double> values(width);
    auto& acc = result[static_cast<std::size_t>(s)];
    const std::int64_t begin = s * kShardSize;
    const std::int64_t end = std::min(opts.samples, begin + kShardSize);
    for (std::int64_t i = begin; i < end; ++i) {
      RngStream rng(opts.key, static_cast<std::uint64_t>(i));
      draw(rng, i, values);
      for (int k = 0; k < width; ++k) acc[k].add(values[k]);
    }
  });
  return result;
}

std::vector<McEstimate> merge_shards(const std::vector<std::vector<Accumulator>>& shards,
                                     double confidence, std::size_t first, std::size_t last) {
  last = std::min(last, shards.size());
  const std::size_t width = shards.empty() ? 0 : shards.front().size();
  std::vector<Accumulator> total(width);
  for (std::size_t s = first; s < last; ++s) {
    for (std::size_t k = 0; k < width; ++k) total[k].merge(shards[s][k]);
  }
  std::vector<McEstimate> out;
  out.reserve(width);
  for (const auto& acc : total) out.push_back(acc.estimate(confidence));
  return out;
}

}  // namespace levypot
