#include "levypot/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace levypot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* label, double r) {
  std::ostringstream os;
  os << label << "(" << r << ")";
  return os.str();
}

}  // namespace

void PathConfig::validate() const {
  if (!(dt > 0.0) || !(horizon > 0.0) || dt > horizon)
    throw ArgumentError("path config needs 0 < dt <= horizon");
}

TargetSet TargetSet::everything() {
  TargetSet s;
  s.kind_ = Kind::everything;
  s.name_ = "everything";
  return s;
}

TargetSet TargetSet::empty() {
  TargetSet s;
  s.kind_ = Kind::empty;
  s.name_ = "empty";
  return s;
}

TargetSet TargetSet::e_ball(const SpaceModel& model, Vector center, double r) {
  if (center.size() != model.dim()) throw ArgumentError("ball center does not match the model");
  if (!(r > 0.0)) throw ArgumentError("radius must be positive");
  TargetSet s;
  s.kind_ = Kind::e_ball;
  s.name_ = fmt("e_ball", r);
  s.center_ = std::move(center);
  s.weights_ = model.weights();
  s.level_ = r;
  return s;
}

TargetSet TargetSet::e_ball_complement(const SpaceModel& model, Vector center, double r) {
  TargetSet s = e_ball(model, std::move(center), r);
  s.kind_ = Kind::e_ball_complement;
  s.name_ = fmt("e_ball_complement", r);
  return s;
}

TargetSet TargetSet::h_ball(Vector center, double r) {
  if (!(r > 0.0)) throw ArgumentError("radius must be positive");
  TargetSet s;
  s.kind_ = Kind::h_ball;
  s.name_ = fmt("h_ball", r);
  s.center_ = std::move(center);
  s.level_ = r;
  return s;
}

TargetSet TargetSet::halfspace(Vector xi, double c) {
  if (xi.isZero(0.0)) throw ArgumentError("halfspace normal must be nonzero");
  TargetSet s;
  s.kind_ = Kind::halfspace;
  s.name_ = fmt("halfspace", c);
  s.center_ = std::move(xi);
  s.level_ = c;
  return s;
}

TargetSet TargetSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw ArgumentError("box bounds must match");
  TargetSet s;
  s.kind_ = Kind::box;
  s.name_ = "box";
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

TargetSet TargetSet::qx_level(std::shared_ptr<const LyapunovNorm> norm, double c) {
  TargetSet s;
  s.kind_ = Kind::qx_level;
  s.name_ = fmt("qx_level", c);
  s.norm_ = std::move(norm);
  s.level_ = c;
  return s;
}

TargetSet TargetSet::qx_exceeds(std::shared_ptr<const LyapunovNorm> norm, double c) {
  TargetSet s = qx_level(std::move(norm), c);
  s.kind_ = Kind::qx_exceeds;
  s.name_ = fmt("qx_exceeds", c);
  return s;
}

TargetSet TargetSet::set_union(std::vector<TargetSet> parts) {
  TargetSet s;
  s.kind_ = Kind::set_union;
  s.name_ = "union(";
  for (std::size_t i = 0; i < parts.size(); ++i) s.name_ += (i ? "," : "") + parts[i].name_;
  s.name_ += ")";
  s.parts_ = std::move(parts);
  return s;
}

TargetSet TargetSet::cylinder(TargetSet inner, Index n) {
  if (n < 1) throw ArgumentError("cylinder rank must be positive");
  TargetSet s;
  s.kind_ = Kind::cylinder;
  s.name_ = "cyl" + std::to_string(n) + "(" + inner.name_ + ")";
  s.rank_ = n;
  s.parts_.push_back(std::move(inner));
  return s;
}

bool TargetSet::contains(const Vector& z) const {
  switch (kind_) {
    case Kind::everything:
      return true;
    case Kind::empty:
      return false;
    case Kind::e_ball:
    case Kind::e_ball_complement: {
      const Index n = std::min(z.size(), center_.size());
      const double d2 = (weights_.head(n).array() * (z.head(n) - center_.head(n)).array().square()).sum();
      return kind_ == Kind::e_ball ? d2 < level_ * level_ : d2 > level_ * level_;
    }
    case Kind::h_ball: {
      const Index n = std::min(z.size(), center_.size());
      return (z.head(n) - center_.head(n)).squaredNorm() < level_ * level_;
    }
    case Kind::halfspace: {
      const Index n = std::min(z.size(), center_.size());
      return center_.head(n).dot(z.head(n)) > level_;
    }
    case Kind::box: {
      const Index n = std::min(z.size(), lo_.size());
      for (Index k = 0; k < n; ++k)
        if (!(z(k) > lo_(k) && z(k) < hi_(k))) return false;
      return true;
    }
    case Kind::qx_level:
      return norm_->squared(z) <= level_ * level_;
    case Kind::qx_exceeds:
      return norm_->squared(z) > level_ * level_;
    case Kind::set_union:
      return std::any_of(parts_.begin(), parts_.end(), [&](const TargetSet& p) { return p.contains(z); });
    case Kind::cylinder:
      return parts_.front().contains(z.head(std::min(rank_, z.size())));
  }
  return false;
}

TargetSet TargetSet::projected(Index n) const {
  if (n < 1) throw ArgumentError("projection rank must be positive");
  TargetSet s = *this;
  switch (kind_) {
    case Kind::everything:
    case Kind::empty:
      return s;
    case Kind::e_ball:
    case Kind::h_ball:
      if (center_.size() > n) {
        s.center_ = center_.head(n);
        if (weights_.size() > 0) s.weights_ = weights_.head(n);
      }
      return s;
    case Kind::e_ball_complement:
      return everything();
    case Kind::halfspace:
      if (center_.size() > n) {
        if (!center_.tail(center_.size() - n).isZero(0.0)) return everything();
        s.center_ = center_.head(n);
      }
      return s;
    case Kind::box:
      for (Index k = 0; k < lo_.size(); ++k)
        if (!(lo_(k) < hi_(k))) return empty();
      if (lo_.size() > n) {
        s.lo_ = lo_.head(n);
        s.hi_ = hi_.head(n);
      }
      return s;
    case Kind::qx_level:
    case Kind::qx_exceeds:
      throw ArgumentError("projection of q_x level sets is not supported");
    case Kind::set_union: {
      std::vector<TargetSet> parts;
      for (const auto& p : parts_) parts.push_back(p.projected(n));
      return set_union(std::move(parts));
    }
    case Kind::cylinder:
      if (rank_ <= n) return s;
      return parts_.front().projected(n);
  }
  return s;
}

PathOutcome simulate_targets(const LevyTriplet& triplet, const Vector& start,
                             const std::vector<const TargetSet*>& targets, const PathConfig& cfg,
                             double stop, RngStream& rng, bool run_to_stop) {
  PathOutcome out;
  out.stop = stop;
  out.hits.resize(targets.size());
  Vector z = start;
  std::size_t remaining = targets.size();
  auto check = [&](double t) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (!out.hits[i].hit && targets[i]->contains(z)) {
        out.hits[i] = {true, t, z};
        --remaining;
      }
    }
  };
  check(0.0);

  const bool jumps = !triplet.jump_free();
  const double rate = triplet.jumps.intensity();
  double next_jump = jumps ? rng.exponential(rate) : kInf;
  const bool bridge = cfg.refine && triplet.gaussian_rank() > 0;
  Vector prev(z.size());
  Vector mid(z.size());
  std::vector<std::size_t> fresh;
  double t = 0.0;
  while ((remaining > 0 || run_to_stop) && t < stop) {
    double step = std::min(cfg.dt, stop - t);
    bool jump_now = false;
    if (next_jump - t <= step) {
      step = next_jump - t;
      jump_now = true;
    }
    prev = z;
    add_continuous_increment(triplet, step, rng, z);
    t = jump_now ? next_jump : (step == stop - t ? stop : t + step);

    fresh.clear();
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (!out.hits[i].hit && targets[i]->contains(z)) fresh.push_back(i);
    if (!fresh.empty()) {
      bool have_mid = false;
      if (bridge && step > 0.0) {
        const double s = std::sqrt(step / 4.0);
        for (Index k = 0; k < z.size(); ++k) {
          const double r = triplet.gaussian(k);
          mid(k) = 0.5 * (prev(k) + z(k)) + (r > 0.0 ? s * std::sqrt(r) * rng.normal() : 0.0);
        }
        have_mid = true;
      }
      for (std::size_t i : fresh) {
        if (have_mid && targets[i]->contains(mid))
          out.hits[i] = {true, t - step / 2, mid};
        else
          out.hits[i] = {true, t, z};
        --remaining;
      }
    }
    if (jump_now) {
      triplet.jumps.add_jump(rng, z);
      check(t);
      next_jump = t + rng.exponential(rate);
    }
  }
  if (run_to_stop) out.end = z;
  return out;
}

HitRecord simulate_to_hit(const LevyTriplet& triplet, const Vector& start,
                          const TargetSet& target, const PathConfig& cfg, RngStream& rng) {
  cfg.validate();
  return simulate_targets(triplet, start, {&target}, cfg, cfg.horizon, rng).hits.front();
}

double horizon_bias(const TestFunction& v, double beta, const PathConfig& cfg) {
  return v.bound * std::exp(-beta * cfg.horizon);
}

double killing_time(double beta, const PathConfig& cfg, RngStream& rng) {
  if (beta <= 0.0) return cfg.horizon;
  return std::min(rng.exponential(beta), cfg.horizon);
}

std::vector<McEstimate> reduced_function_multi(const LevyTriplet& triplet, const TestFunction& v,
                                               const std::vector<TargetSet>& targets, double beta,
                                               const Vector& z, const EstimatorOptions& opts,
                                               const PathConfig& cfg) {
  cfg.validate();
  if (!v.bounded()) throw ArgumentError("reduced function needs a bounded v");
  if (!(beta > 0.0)) throw PreconditionError("β = 0 needs a transience certificate");
  std::vector<const TargetSet*> ptrs;
  for (const auto& s : targets) ptrs.push_back(&s);
  return estimate_joint(static_cast<int>(targets.size()), opts,
                        [&](RngStream& rng, std::span<double> out) {
                          const double zeta = killing_time(beta, cfg, rng);
                          auto path = simulate_targets(triplet, z, ptrs, cfg, zeta, rng);
                          for (std::size_t i = 0; i < targets.size(); ++i)
                            out[i] = path.hits[i].hit ? v(path.hits[i].location) : 0.0;
                        });
}

McEstimate reduced_function(const LevyTriplet& triplet, const TestFunction& v, const TargetSet& M,
                            double beta, const Vector& z, const EstimatorOptions& opts,
                            const PathConfig& cfg, bool transient_certificate) {
  cfg.validate();
  if (!v.bounded()) throw ArgumentError("reduced function needs a bounded v");
  if (beta < 0.0) throw ArgumentError("β must be nonnegative");
  if (beta == 0.0 && !transient_certificate)
    throw PreconditionError("β = 0 needs a transience certificate");
  return estimate(opts, [&](RngStream& rng) {
    const double zeta = killing_time(beta, cfg, rng);
    auto path = simulate_targets(triplet, z, {&M}, cfg, zeta, rng);
    return path.hits[0].hit ? v(path.hits[0].location) : 0.0;
  });
}

ProjectionInequality projection_inequality(const LevyTriplet& triplet, const TestFunction& v,
                                           const TargetSet& M, Index n, double beta,
                                           const Vector& z, const EstimatorOptions& opts,
                                           const PathConfig& cfg) {
  cfg.validate();
  if (!v.bounded()) throw ArgumentError("reduced function needs a bounded v");
  if (!(beta > 0.0)) throw PreconditionError("β = 0 needs a transience certificate");
  if (n < 1 || n > triplet.dim()) throw ArgumentError("projection rank out of range");
  const TargetSet image = TargetSet::cylinder(M.projected(n), n);
  auto est = estimate_joint(3, opts, [&](RngStream& rng, std::span<double> out) {
    const double zeta = killing_time(beta, cfg, rng);
    auto path = simulate_targets(triplet, z, {&M, &image}, cfg, zeta, rng);
    const double a = path.hits[0].hit ? v(Vector(path.hits[0].location.head(n))) : 0.0;
    const double b = path.hits[1].hit ? v(Vector(path.hits[1].location.head(n))) : 0.0;
    out[0] = a;
    out[1] = b;
    out[2] = a - b;
  });
  return {est[0], est[1], est[2], est[2].verdict_at_most(0.0)};
}

PointPolarityReport polarity_diagnostic_point(const SpaceModel& model, const LevyTriplet& triplet,
                                              const Vector& y, const std::vector<double>& radii,
                                              const std::vector<Vector>& starts, double beta,
                                              const EstimatorOptions& opts, const PathConfig& cfg,
                                              bool enforce_hypothesis, double slope_threshold) {
  cfg.validate();
  if (radii.size() < 2) throw ArgumentError("need at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw ArgumentError("radii must decrease");
  if (enforce_hypothesis && triplet.gaussian_rank() < 2)
    throw HypothesisError(
        "point polarity needs a Gaussian part nondegenerate in at least two coordinates");
  std::vector<TargetSet> balls;
  for (double r : radii) balls.push_back(TargetSet::e_ball(model, y, r));
  const TestFunction one = TestFunction::constant(1.0);

  PointPolarityReport report;
  report.radii = radii;
  report.consistent = true;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    auto probs = reduced_function_multi(triplet, one, balls, beta, starts[s],
                                        opts.with_key(opts.key.derive(s)), cfg);
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (probs[i].mean > probs[i - 1].mean) report.monotone = false;
    const std::size_t k = probs.size() - 1;
    double slope;
    if (probs[k].mean <= 0.0)
      slope = kInf;
    else
      slope = std::log(probs[k - 1].mean / probs[k].mean) / std::log(radii[k - 1] / radii[k]);
    report.slopes.push_back(slope);
    if (!(slope >= slope_threshold)) report.consistent = false;
    report.hit_probability.push_back(std::move(probs));
  }
  report.consistent = report.consistent && report.monotone;
  return report;
}

HPolarityReport polarity_diagnostic_H(const LevyTriplet& triplet, const std::vector<double>& radii,
                                      const std::vector<Vector>& starts, double beta, double t,
                                      const EstimatorOptions& opts, const PathConfig& cfg) {
  cfg.validate();
  if (starts.empty()) throw ArgumentError("need at least one start");
  std::vector<TargetSet> balls;
  for (double r : radii) balls.push_back(TargetSet::h_ball(Vector::Zero(triplet.dim()), r));
  const TestFunction one = TestFunction::constant(1.0);
  HPolarityReport report;
  report.radii = radii;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    auto probs = reduced_function_multi(triplet, one, balls, beta, starts[s],
                                        opts.with_key(opts.key.derive(s)), cfg);
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (radii[i] < radii[i - 1] && probs[i].mean > probs[i - 1].mean) report.shrinking = false;
    report.hit_probability.push_back(std::move(probs));
  }
  const Vector& z = starts.front();
  report.h_norm_square = estimate(opts.with_key(opts.key.derive("h_norm")), [&](RngStream& rng) {
    Vector y = z;
    add_increment(triplet, t, rng, y);
    return y.squaredNorm();
  });
  if (triplet.jump_free() && triplet.driftless()) {
    report.h_norm_target = z.squaredNorm() + t * triplet.gaussian.sum();
    report.h_norm_verdict =
        report.h_norm_square.verdict(report.h_norm_target, 1e-12 * report.h_norm_target);
  } else {
    report.h_norm_target = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

McEstimate invariant_set_check(const LevyTriplet& triplet, const LyapunovNorm& norm, double level,
                               const Vector& z, double t, const EstimatorOptions& opts) {
  return apply_Pt(triplet,
                  {"qx_level_indicator",
                   [&](const Vector& y) { return norm.squared(y) <= level * level ? 1.0 : 0.0; },
                   1.0, 0},
                  t, z, opts);
}

double PointCloud::total() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

PointCloud PointCloud::scaled(double factor) const {
  PointCloud c = *this;
  for (double& m : c.masses) m *= factor;
  return c;
}

std::size_t PointCloud::draw(RngStream& rng) const {
  const double u = rng.uniform() * total();
  double acc = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    acc += masses[i];
    if (u < acc) return i;
  }
  return masses.size() - 1;
}

namespace {

void check_cloud(const PointCloud& c) {
  if (c.points.size() != c.masses.size()) throw ArgumentError("cloud points and masses differ in length");
  for (double m : c.masses)
    if (!(m >= 0.0) || !std::isfinite(m)) throw ArgumentError("cloud masses must be nonnegative");
}

/// Σ_i m_i x_i over independent per-atom estimates.
std::vector<McEstimate> weighted_sum(const PointCloud& cloud,
                                     const std::vector<std::vector<McEstimate>>& per_atom) {
  std::vector<McEstimate> out(per_atom.front().size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    McEstimate acc{0.0, 0.0, 0, per_atom.front()[j].confidence};
    for (std::size_t i = 0; i < per_atom.size(); ++i)
      acc = combine(acc, 1.0, per_atom[i][j], cloud.masses[i]);
    out[j] = acc;
  }
  return out;
}

}  // namespace

std::vector<McEstimate> capacity(const LevyTriplet& triplet, const PointCloud& lambda,
                                 const std::vector<TargetSet>& targets, double beta,
                                 const EstimatorOptions& opts, const PathConfig& cfg,
                                 const TestFunction& f0) {
  cfg.validate();
  check_cloud(lambda);
  if (!(beta > 0.0)) throw PreconditionError("β = 0 needs a transience certificate");
  if (!f0.bounded() || f0.bound > 1.0) throw ArgumentError("capacity needs 0 < f0 <= 1");
  if (lambda.size() == 0 || targets.empty())
    return std::vector<McEstimate>(targets.size(), McEstimate{0.0, 0.0, 0, opts.confidence});
  const bool unit = f0.name == "constant" && f0.bound == 1.0;
  std::vector<const TargetSet*> ptrs;
  for (const auto& s : targets) ptrs.push_back(&s);
  std::vector<std::vector<McEstimate>> per_atom;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    per_atom.push_back(estimate_joint(
        static_cast<int>(targets.size()), opts.with_key(opts.key.derive(i)),
        [&](RngStream& rng, std::span<double> out) {
          const double zeta = killing_time(beta, cfg, rng);
          auto path = simulate_targets(triplet, lambda.points[i], ptrs, cfg, zeta, rng);
          for (std::size_t j = 0; j < targets.size(); ++j) {
            if (!path.hits[j].hit) {
              out[j] = 0.0;
            } else if (unit) {
              out[j] = 1.0 / beta;
            } else {
              Vector y = path.hits[j].location;
              add_increment(triplet, rng.exponential(beta), rng, y);
              out[j] = f0(y) / beta;
            }
          }
        }));
  }
  return weighted_sum(lambda, per_atom);
}

BalayageReport balayage_check(const LevyTriplet& triplet, const PointCloud& nu, const TargetSet& M,
                              double beta, const std::vector<TargetSet>& inside,
                              const std::vector<TargetSet>& outside,
                              const EstimatorOptions& opts, const PathConfig& cfg) {
  cfg.validate();
  check_cloud(nu);
  if (!(beta > 0.0)) throw PreconditionError("β = 0 needs a transience certificate");
  std::vector<const TargetSet*> sets;
  for (const auto& s : inside) sets.push_back(&s);
  for (const auto& s : outside) sets.push_back(&s);
  const std::size_t nf = sets.size();
  // per set: swept, original, difference, violation; then hit, carrier failure
  const int width = static_cast<int>(4 * nf + 2);
  std::vector<std::vector<McEstimate>> per_atom;
  for (std::size_t a = 0; a < nu.size(); ++a) {
    per_atom.push_back(estimate_joint(
        width, opts.with_key(opts.key.derive(a)), [&](RngStream& rng, std::span<double> out) {
          const double zeta = killing_time(beta, cfg, rng);
          auto path = simulate_targets(triplet, nu.points[a], {&M}, cfg, zeta, rng, true);
          const bool hit = path.hits[0].hit;
          for (std::size_t j = 0; j < nf; ++j) {
            const double in_f = sets[j]->contains(path.end) ? 1.0 / beta : 0.0;
            const double swept = hit ? in_f : 0.0;
            out[4 * j] = swept;
            out[4 * j + 1] = in_f;
            out[4 * j + 2] = swept - in_f;
            const bool ok = j < inside.size() ? swept == in_f : swept <= in_f;
            out[4 * j + 3] = ok ? 0.0 : 1.0;
          }
          out[4 * nf] = hit ? 1.0 : 0.0;
          out[4 * nf + 1] = hit && !M.contains(path.hits[0].location) ? 1.0 : 0.0;
        }));
  }
  const auto total = weighted_sum(nu, per_atom);
  BalayageReport report;
  const double mass = nu.total();
  report.hit_fraction = mass > 0.0 ? total[4 * nf].mean / mass : 0.0;
  report.carrier = total[4 * nf + 1].mean == 0.0;
  report.vacuous = report.hit_fraction == 0.0;
  for (std::size_t j = 0; j < nf; ++j) {
    BalayageRow row;
    row.set = sets[j]->name();
    row.inside_M = j < inside.size();
    row.swept = total[4 * j];
    row.original = total[4 * j + 1];
    row.difference = total[4 * j + 2];
    row.per_sample = total[4 * j + 3].mean == 0.0;
    row.verdict = row.inside_M ? row.difference.verdict(0.0) : row.difference.verdict_at_most(0.0);
    if (!row.per_sample) row.verdict = Verdict::fail;
    report.rows.push_back(std::move(row));
  }
  return report;
}

PointCloud balayage_cloud(const LevyTriplet& triplet, const PointCloud& nu, const TargetSet& M,
                          double beta, std::int64_t samples_per_atom, const StreamKey& key,
                          const PathConfig& cfg) {
  cfg.validate();
  check_cloud(nu);
  if (!(beta > 0.0)) throw PreconditionError("β must be positive");
  if (samples_per_atom < 1) throw ArgumentError("need at least one sample per atom");
  PointCloud cloud;
  for (std::size_t a = 0; a < nu.size(); ++a) {
    const StreamKey atom_key = key.derive(a);
    const std::int64_t shards = (samples_per_atom + kShardSize - 1) / kShardSize;
    std::vector<std::vector<Vector>> found(static_cast<std::size_t>(shards));
    parallel_for(shards, [&](std::int64_t s) {
      const std::int64_t lo = s * kShardSize;
      const std::int64_t hi = std::min(samples_per_atom, lo + kShardSize);
      for (std::int64_t i = lo; i < hi; ++i) {
        RngStream rng(atom_key, static_cast<std::uint64_t>(i));
        const double zeta = killing_time(beta, cfg, rng);
        auto path = simulate_targets(triplet, nu.points[a], {&M}, cfg, zeta, rng);
        if (path.hits[0].hit && path.hits[0].time < zeta)
          found[static_cast<std::size_t>(s)].push_back(std::move(path.hits[0].location));
      }
    });
    const double w = nu.masses[a] / static_cast<double>(samples_per_atom);
    for (auto& shard : found)
      for (auto& p : shard) {
        cloud.points.push_back(std::move(p));
        cloud.masses.push_back(w);
      }
  }
  return cloud;
}

std::vector<McEstimate> cloud_potential(const LevyTriplet& triplet, const PointCloud& kappa,
                                        const std::vector<TargetSet>& probes, double beta,
                                        const EstimatorOptions& opts) {
  check_cloud(kappa);
  if (!(beta > 0.0)) throw ArgumentError("β must be positive");
  const double mass = kappa.total();
  if (kappa.size() == 0 || mass == 0.0)
    return std::vector<McEstimate>(probes.size(), McEstimate{0.0, 0.0, 0, opts.confidence});
  return estimate_joint(static_cast<int>(probes.size()), opts,
                        [&](RngStream& rng, std::span<double> out) {
                          Vector y = kappa.points[kappa.draw(rng)];
                          add_increment(triplet, rng.exponential(beta), rng, y);
                          for (std::size_t j = 0; j < probes.size(); ++j)
                            out[j] = probes[j].contains(y) ? mass / beta : 0.0;
                        });
}

DominationReport domination_check(const LevyTriplet& triplet, const PointCloud& mu,
                                  const PointCloud& nu, const TargetSet& G, double beta,
                                  const std::vector<TargetSet>& probes_in,
                                  const std::vector<TargetSet>& probes_out,
                                  const EstimatorOptions& opts) {
  for (const auto& p : mu.points)
    if (!G.contains(p)) throw ArgumentError("μ must be supported in G");
  DominationReport report;
  auto compare = [&](const std::vector<TargetSet>& probes, const char* label,
                     std::vector<DominationRow>& rows) {
    if (probes.empty()) return true;
    const auto a = cloud_potential(triplet, mu, probes, beta,
                                   opts.with_key(opts.key.derive(std::string("mu/") + label)));
    const auto b = cloud_potential(triplet, nu, probes, beta,
                                   opts.with_key(opts.key.derive(std::string("nu/") + label)));
    bool ok = true;
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const auto v = combine(a[j], 1.0, b[j], -1.0).verdict_at_most(0.0);
      if (v != Verdict::pass) ok = false;
      rows.push_back({probes[j].name(), a[j], b[j], v});
    }
    return ok;
  };
  report.hypothesis = compare(probes_in, "in", report.inside);
  if (!report.hypothesis) {
    report.status = "hypothesis not satisfied";
    return report;
  }
  report.conclusion = compare(probes_out, "out", report.outside);
  report.status = report.conclusion ? "domination holds" : "conclusion violated";
  return report;
}

ProjectionConvergence projection_convergence(const SpaceModel& model, const LevyTriplet& triplet,
                                             double t, const std::vector<Index>& ranks,
                                             const EstimatorOptions& opts) {
  if (!(t > 0.0)) throw ArgumentError("time must be positive");
  for (Index n : ranks)
    if (n < 1 || n > model.dim()) throw ArgumentError("projection rank out of range [1, N]");
  ProjectionConvergence out;
  out.ranks = ranks;
  out.tails = estimate_joint(static_cast<int>(ranks.size()), opts,
                             [&](RngStream& rng, std::span<double> values) {
                               Vector z = Vector::Zero(triplet.dim());
                               add_increment(triplet, t, rng, z);
                               const Vector terms = model.weights().cwiseProduct(z.cwiseAbs2());
                               for (std::size_t i = 0; i < ranks.size(); ++i)
                                 values[i] = terms.tail(model.dim() - ranks[i]).sum();
                             });
  const bool gaussian = triplet.jump_free() && triplet.driftless();
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    double target = std::numeric_limits<double>::quiet_NaN();
    Verdict v = Verdict::inconclusive;
    if (gaussian) {
      const Index n = ranks[i];
      target = t * model.weights().tail(model.dim() - n).dot(triplet.gaussian.tail(model.dim() - n));
      v = out.tails[i].verdict(target, 1e-12 * std::max(target, 1e-300));
    }
    out.targets.push_back(target);
    out.verdicts.push_back(v);
    if (i > 0 && !(out.tails[i].mean < out.tails[i - 1].mean) &&
        !(ranks[i] <= ranks[i - 1]))
      out.strictly_decreasing = false;
  }
  return out;
}

}  // namespace levypot
