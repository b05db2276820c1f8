#include "levypot/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levypot {

namespace {

bool subsequence_certified(const SpaceModel& model, Index n, Index m) {
  if (m + 1 > model.dim()) return false;
  return std::sqrt(model.weight(m + 1)) <= std::ldexp(1.0, -static_cast<int>(n)) &&
         model.tail_sum(m) <= std::pow(8.0, -static_cast<double>(n));
}

}  // namespace

std::vector<Index> select_subsequence(const SpaceModel& model, Index depth) {
  if (depth < 0) throw ArgumentError("subsequence depth must be nonnegative");
  std::vector<Index> m;
  const bool closed_form = model.generator() == SpaceModel::Generator::geometric &&
                           model.ratio() == 0.25;
  for (Index n = 1;; ++n) {
    if (depth > 0 && n > depth) break;
    Index next;
    if (closed_form) {
      next = std::max<Index>(n - 1, static_cast<Index>(std::ceil(1.5 * static_cast<double>(n))) + 1);
      if (next > model.dim()) next = -1;
    } else {
      next = m.empty() ? 1 : m.back() + 1;
      while (next <= model.dim() && !subsequence_certified(model, n, next)) ++next;
      if (next > model.dim()) next = -1;
    }
    if (next < 0) {
      if (depth > 0) {
        std::ostringstream os;
        os << "truncation N=" << model.dim() << " admits only " << m.size()
           << " subsequence levels, " << depth << " requested";
        throw RangeError(os.str());
      }
      break;
    }
    m.push_back(next);
  }
  if (m.empty()) throw RangeError("truncation too small for the first subsequence level");
  return m;
}

std::string_view to_string(LyapunovKind kind) {
  return kind == LyapunovKind::gaussian ? "gaussian" : "levy";
}

LyapunovNorm::LyapunovNorm(LyapunovKind kind, Vector weights, Vector alpha,
                           std::vector<Index> subsequence, CarmonaDatum<double> carmona)
    : kind_(kind),
      weights_(std::move(weights)),
      alpha_(std::move(alpha)),
      subsequence_(std::move(subsequence)),
      carmona_(std::move(carmona)) {
  if (carmona_.x.size() != weights_.size())
    throw ArgumentError("off-H datum does not match the model dimension");
  pairing_weights_.resize(carmona_.size());
  for (Index n = 1; n <= carmona_.size(); ++n)
    pairing_weights_(n - 1) = std::pow(2.0, -static_cast<double>(n) / 2);
}

LyapunovNorm LyapunovNorm::gaussian(const SpaceModel& model, CarmonaDatum<double> carmona,
                                    Index depth) {
  auto m = select_subsequence(model, depth);
  Vector w(model.dim());
  std::size_t segment = 0;
  for (Index k = 1; k <= model.dim(); ++k) {
    while (segment < m.size() && k > m[segment]) ++segment;
    w(k - 1) = std::ldexp(model.weight(k), static_cast<int>(segment));
  }
  return {LyapunovKind::gaussian, std::move(w), Vector(), std::move(m), std::move(carmona)};
}

LyapunovNorm LyapunovNorm::levy(const SpaceModel& model, CarmonaDatum<double> carmona,
                                Vector alpha) {
  const bool default_alpha = alpha.size() == 0;
  if (default_alpha) {
    alpha.resize(model.dim());
    for (Index n = 1; n <= model.dim(); ++n) alpha(n - 1) = std::ldexp(1.0, static_cast<int>(n));
    const bool summable =
        model.generator() == SpaceModel::Generator::geometric && 2.0 * model.ratio() < 1.0;
    if (!summable && model.generator() != SpaceModel::Generator::explicit_weights)
      throw ArgumentError("default α_n = 2^n is not summable against " + model.describe());
  }
  if (alpha.size() != model.dim()) throw ArgumentError("α must have one entry per coordinate");
  for (Index n = 0; n < alpha.size(); ++n) {
    if (!(alpha(n) > 0.0)) throw ArgumentError("α must be positive");
    if (n > 0 && alpha(n) < alpha(n - 1)) throw ArgumentError("α must be nondecreasing");
  }
  Vector w = alpha.cwiseProduct(model.weights());
  if (!std::isfinite(w.sum())) throw ArgumentError("Σ α_n λ_n is not finite");
  return {LyapunovKind::levy, std::move(w), std::move(alpha), {}, std::move(carmona)};
}

Vector LyapunovNorm::coordinate_box(double c) const {
  return (c / weights_.array().sqrt()).matrix();
}

CarmonaDatum<double> canonical_carmona(const SpaceModel& model) {
  return build_carmona_basis(model, canonical_point(model),
                             canonical_offh_threshold<double>(model.dim()));
}

McEstimate v0_estimate(const LyapunovNorm& norm, const LevyTriplet& triplet, const Vector& z,
                       const EstimatorOptions& opts) {
  auto shards = run_sharded(1, opts, [&](RngStream& rng, std::int64_t, std::span<double> out) {
    Vector y = z;
    add_increment(triplet, rng.exponential(1.0), rng, y);
    out[0] = norm.squared(y);
  });
  const auto full = merge_shards(shards, opts.confidence).front();
  if (!std::isfinite(full.mean)) throw IntegrabilityError("q_x² is not integrable along ν_T");
  if (shards.size() >= 4) {
    const auto half = merge_shards(shards, opts.confidence, 0, shards.size() / 2).front();
    if (half.std_error > 0.0 && full.std_error > 0.95 * half.std_error)
      throw IntegrabilityError(
          "v_0 estimate does not settle as samples double; check the second-moment "
          "hypothesis on the triplet");
  }
  return full;
}

McEstimate vz_estimate(const LyapunovNorm& norm, const LevyTriplet& triplet, const Vector& w,
                       const Vector& z, const EstimatorOptions& opts) {
  return v0_estimate(norm, triplet, z - w, opts);
}

McEstimate qx_moment(const LyapunovNorm& norm, const LevyTriplet& triplet, double t,
                     const EstimatorOptions& opts) {
  return estimate(opts, [&](RngStream& rng) {
    Vector y = Vector::Zero(triplet.dim());
    add_increment(triplet, t, rng, y);
    return norm.squared(y);
  });
}

MomentBound qx_moment_bound(const LyapunovNorm& norm, const LevyTriplet& triplet,
                            const std::vector<double>& t_grid, const EstimatorOptions& opts) {
  if (t_grid.empty()) throw ArgumentError("moment bound needs a time grid");
  MomentBound out;
  out.t_grid = t_grid;
  out.moments = estimate_joint(static_cast<int>(t_grid.size()), opts,
                               [&](RngStream& rng, std::span<double> values) {
                                 Vector y(triplet.dim());
                                 for (std::size_t i = 0; i < t_grid.size(); ++i) {
                                   y.setZero();
                                   add_increment(triplet, t_grid[i], rng, y);
                                   values[i] = norm.squared(y);
                                 }
                               });
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    out.c_tilde = std::max(out.c_tilde, out.moments[i].mean / (1.0 + t_grid[i] * t_grid[i]));
  return out;
}

std::vector<SupermedianRow> supermedian_check(const LyapunovNorm& norm, const LevyTriplet& triplet,
                                              double t, const std::vector<Vector>& z_set,
                                              const EstimatorOptions& opts) {
  if (!triplet.unit_gaussian())
    throw PreconditionError(
        "P_t q_x² >= q_x² is established only for the driftless unit Gaussian triplet");
  if (!(t > 0.0)) throw ArgumentError("time must be positive");
  std::vector<SupermedianRow> rows;
  for (std::size_t i = 0; i < z_set.size(); ++i) {
    const Vector& z = z_set[i];
    const double q2 = norm.squared(z);
    auto est = estimate(opts.with_key(opts.key.derive(i)), [&](RngStream& rng) {
      Vector y = z;
      add_continuous_increment(triplet, t, rng, y);
      return norm.squared(y) - q2;
    });
    rows.push_back({z, q2, est, est.verdict_at_least(0.0)});
  }
  return rows;
}

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::inside:
      return "in E_x";
    case Membership::outside:
      return "not in E_x";
    case Membership::inconclusive:
      break;
  }
  return "inconclusive";
}

MembershipReport membership_Ex(const std::function<LyapunovNorm(Index)>& norm_at,
                               const std::function<Vector(Index)>& z_at,
                               const std::vector<Index>& dims, double flat_tol) {
  if (dims.size() < 2) throw ArgumentError("membership needs at least two truncations");
  MembershipReport report;
  report.dims = dims;
  for (Index n : dims) report.values.push_back(norm_at(n)(z_at(n)));
  const double prev = report.values[report.values.size() - 2];
  const double last = report.values.back();
  const double doublings =
      std::log2(static_cast<double>(dims.back()) / static_cast<double>(dims[dims.size() - 2]));
  if (last == 0.0 && prev == 0.0) {
    report.verdict = Membership::inside;
  } else if (prev > 0.0 && last / prev >= std::pow(1.5, doublings)) {
    report.verdict = Membership::outside;
  } else if (std::abs(last - prev) <= flat_tol * std::max(std::abs(last), 1e-300)) {
    report.verdict = Membership::inside;
  } else {
    report.verdict = Membership::inconclusive;
  }
  return report;
}

}  // namespace levypot
