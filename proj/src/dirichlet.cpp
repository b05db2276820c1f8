#include "levypot/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace levypot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxWalkSteps = 1'000'000;

}  // namespace

Domain Domain::e_ball(const SpaceModel& model, Vector center, double r) {
  if (center.size() != model.dim()) throw ArgumentError("ball center does not match the model");
  if (!(r > 0.0)) throw ArgumentError("radius must be positive");
  Domain d;
  d.kind_ = Kind::e_ball;
  d.weights_ = model.weights();
  d.center_ = std::move(center);
  d.radius_ = r;
  return d;
}

Domain Domain::slab(const SpaceModel& model, Index k, double a, double b) {
  if (k < 1 || k > model.dim()) throw ArgumentError("slab coordinate out of range");
  if (!(a < b)) throw ArgumentError("slab needs a < b");
  Domain d;
  d.kind_ = Kind::slab;
  d.weights_ = model.weights();
  d.coord_ = k - 1;
  d.a_ = a;
  d.b_ = b;
  return d;
}

Domain Domain::halfspaces(const SpaceModel& model, std::vector<Vector> normals,
                          std::vector<double> levels) {
  if (normals.empty() || normals.size() != levels.size())
    throw ArgumentError("halfspace domain needs matching normals and levels");
  for (const auto& n : normals)
    if (n.size() != model.dim() || n.isZero(0.0)) throw ArgumentError("bad halfspace normal");
  Domain d;
  d.kind_ = Kind::halfspaces;
  d.weights_ = model.weights();
  d.normals_ = std::move(normals);
  d.levels_ = std::move(levels);
  return d;
}

Domain Domain::box(const SpaceModel& model, Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() > model.dim()) throw ArgumentError("bad box bounds");
  for (Index k = 0; k < lo.size(); ++k)
    if (!(lo(k) < hi(k))) throw ArgumentError("box needs lo < hi");
  Domain d;
  d.kind_ = Kind::box;
  d.weights_ = model.weights();
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  return d;
}

bool Domain::contains(const Vector& z) const { return boundary_distance(z) > 0.0; }

double Domain::boundary_distance(const Vector& z) const {
  switch (kind_) {
    case Kind::e_ball: {
      const double e = std::sqrt((weights_.array() * (z - center_).array().square()).sum());
      return (radius_ - e) / std::sqrt(weights_(0));
    }
    case Kind::slab:
      return std::min(z(coord_) - a_, b_ - z(coord_));
    case Kind::halfspaces: {
      double d = kInf;
      for (std::size_t i = 0; i < normals_.size(); ++i)
        d = std::min(d, (levels_[i] - normals_[i].dot(z)) / normals_[i].norm());
      return d;
    }
    case Kind::box: {
      double d = kInf;
      for (Index k = 0; k < lo_.size(); ++k) d = std::min({d, z(k) - lo_(k), hi_(k) - z(k)});
      return d;
    }
  }
  return 0.0;
}

Vector Domain::project_to_boundary(const Vector& z) const {
  Vector y = z;
  switch (kind_) {
    case Kind::e_ball: {
      const Vector d = z - center_;
      const double e = std::sqrt((weights_.array() * d.array().square()).sum());
      if (e > 0.0) y = center_ + d * (radius_ / e);
      return y;
    }
    case Kind::slab:
      y(coord_) = (z(coord_) - a_ < b_ - z(coord_)) ? a_ : b_;
      return y;
    case Kind::halfspaces: {
      std::size_t best = 0;
      double dist = kInf;
      for (std::size_t i = 0; i < normals_.size(); ++i) {
        const double d = (levels_[i] - normals_[i].dot(z)) / normals_[i].norm();
        if (d < dist) {
          dist = d;
          best = i;
        }
      }
      const Vector& n = normals_[best];
      return z + n * ((levels_[best] - n.dot(z)) / n.squaredNorm());
    }
    case Kind::box: {
      Index best = 0;
      double dist = kInf;
      bool low = true;
      for (Index k = 0; k < lo_.size(); ++k) {
        if (z(k) - lo_(k) < dist) {
          dist = z(k) - lo_(k);
          best = k;
          low = true;
        }
        if (hi_(k) - z(k) < dist) {
          dist = hi_(k) - z(k);
          best = k;
          low = false;
        }
      }
      y(best) = low ? lo_(best) : hi_(best);
      return y;
    }
  }
  return y;
}

bool Domain::contains_e_ball(const Vector& x, double r) const {
  if (!(r > 0.0)) return false;
  switch (kind_) {
    case Kind::e_ball: {
      const double e = std::sqrt((weights_.array() * (x - center_).array().square()).sum());
      return e + r < radius_;
    }
    case Kind::slab: {
      const double reach = r / std::sqrt(weights_(coord_));
      return x(coord_) - reach > a_ && x(coord_) + reach < b_;
    }
    case Kind::halfspaces:
      for (std::size_t i = 0; i < normals_.size(); ++i) {
        const double dual = std::sqrt((normals_[i].array().square() / weights_.array()).sum());
        if (!(normals_[i].dot(x) + r * dual < levels_[i])) return false;
      }
      return true;
    case Kind::box:
      for (Index k = 0; k < lo_.size(); ++k) {
        const double reach = r / std::sqrt(weights_(k));
        if (!(x(k) - reach > lo_(k) && x(k) + reach < hi_(k))) return false;
      }
      return true;
  }
  return false;
}

std::string Domain::regularity_note() const {
  switch (kind_) {
    case Kind::e_ball:
      return "E-ball: convex, so every boundary point has an exterior cone";
    case Kind::slab:
      return "slab: complement contains a halfspace at every boundary point";
    case Kind::halfspaces:
      return "finite intersection of halfspaces: convex, exterior cone at every boundary point";
    case Kind::box:
      return "box: convex, exterior cone at every boundary point";
  }
  return {};
}

std::string Domain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::e_ball:
      os << "e_ball(r=" << radius_ << ")";
      break;
    case Kind::slab:
      os << "slab(k=" << coord_ + 1 << ", " << a_ << ", " << b_ << ")";
      break;
    case Kind::halfspaces:
      os << "halfspaces(" << normals_.size() << ")";
      break;
    case Kind::box:
      os << "box";
      break;
  }
  return os.str();
}

BoundaryData BoundaryData::constant(double c) {
  return {"constant", [c](const Vector&) { return c; }, std::abs(c),
          BoundaryClass::bounded_continuous};
}

BoundaryData BoundaryData::linear(Vector xi, double offset, double bound) {
  return {"linear", [xi = std::move(xi), offset](const Vector& z) { return xi.dot(z) + offset; },
          bound, BoundaryClass::bounded_continuous};
}

BoundaryData BoundaryData::indicator(Vector xi, double c) {
  return {"indicator", [xi = std::move(xi), c](const Vector& z) { return xi.dot(z) > c ? 1.0 : 0.0; },
          1.0, BoundaryClass::bounded_borel};
}

namespace {

bool use_walk_on_spheres(const LevyTriplet& triplet, const DirichletConfig& cfg) {
  switch (cfg.method) {
    case DirichletMethod::walk_on_spheres:
      if (!triplet.isotropic_gaussian())
        throw PreconditionError("walk on spheres needs an isotropic driftless Gaussian triplet");
      return true;
    case DirichletMethod::time_stepping:
      return false;
    case DirichletMethod::automatic:
      break;
  }
  return triplet.isotropic_gaussian();
}

/// Walkers advanced on a shared Gaussian stream; walker w uses sign[w]·G.
void walk_on_spheres(const Domain& V, const DirichletConfig& cfg, RngStream& rng,
                     std::vector<Vector>& z, const std::vector<double>& sign,
                     std::vector<ExitSample>& out) {
  const Index dim = z.front().size();
  Vector g(dim);
  std::vector<bool> active(z.size(), true);
  std::size_t remaining = z.size();
  for (std::size_t w = 0; w < z.size(); ++w) {
    if (V.boundary_distance(z[w]) <= 0.0) {
      out[w] = {true, z[w], 0.0};
      active[w] = false;
      --remaining;
    }
  }
  for (std::int64_t step = 0; remaining > 0 && step < kMaxWalkSteps; ++step) {
    for (Index k = 0; k < dim; ++k) g(k) = rng.normal();
    g /= g.norm();
    for (std::size_t w = 0; w < z.size(); ++w) {
      if (!active[w]) continue;
      const double d = V.boundary_distance(z[w]);
      if (d < cfg.shell) {
        out[w] = {true, V.project_to_boundary(z[w]), 0.0};
        active[w] = false;
        --remaining;
        continue;
      }
      z[w].noalias() += (sign[w] * d) * g;
    }
  }
}

Vector crossing(const Domain& V, const Vector& inside, const Vector& outside) {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double s = 0.5 * (lo + hi);
    if (V.contains(inside + s * (outside - inside)))
      lo = s;
    else
      hi = s;
  }
  return inside + hi * (outside - inside);
}

ExitSample time_step_exit(const LevyTriplet& triplet, const Domain& V, const Vector& start,
                          const DirichletConfig& cfg, RngStream& rng) {
  Vector z = start;
  if (!V.contains(z)) return {true, z, 0.0};
  const PathConfig& pc = cfg.path;
  const bool jumps = !triplet.jump_free();
  const double rate = triplet.jumps.intensity();
  double next_jump = jumps ? rng.exponential(rate) : kInf;
  const double rmax = triplet.gaussian.maxCoeff();
  const bool bridge = pc.refine && rmax > 0.0;
  Vector prev(z.size());
  Vector mid(z.size());
  double t = 0.0;
  while (t < pc.horizon) {
    double step = std::min(pc.dt, pc.horizon - t);
    bool jump_now = false;
    if (next_jump - t <= step) {
      step = next_jump - t;
      jump_now = true;
    }
    prev = z;
    add_continuous_increment(triplet, step, rng, z);
    t = jump_now ? next_jump : t + step;
    if (!V.contains(z)) return {true, crossing(V, prev, z), t};
    if (bridge && V.boundary_distance(z) < 3.0 * std::sqrt(step * rmax)) {
      const double s = std::sqrt(step / 4.0);
      for (Index k = 0; k < z.size(); ++k) {
        const double r = triplet.gaussian(k);
        mid(k) = 0.5 * (prev(k) + z(k)) + (r > 0.0 ? s * std::sqrt(r) * rng.normal() : 0.0);
      }
      if (!V.contains(mid)) return {true, crossing(V, prev, mid), t - step / 2};
    }
    if (jump_now) {
      triplet.jumps.add_jump(rng, z);
      if (!V.contains(z)) return {true, z, t};
      next_jump = t + rng.exponential(rate);
    }
  }
  return {false, z, pc.horizon};
}

}  // namespace

ExitSample sample_exit(const LevyTriplet& triplet, const Domain& V, const Vector& z,
                       const DirichletConfig& cfg, RngStream& rng) {
  if (use_walk_on_spheres(triplet, cfg)) {
    std::vector<Vector> walkers{z};
    std::vector<ExitSample> out(1);
    walk_on_spheres(V, cfg, rng, walkers, {1.0}, out);
    return out.front();
  }
  return time_step_exit(triplet, V, z, cfg, rng);
}

SolveResult solve(const LevyTriplet& triplet, const Domain& V, const BoundaryData& f,
                  const Vector& z, const EstimatorOptions& opts, const DirichletConfig& cfg) {
  cfg.path.validate();
  if (!V.contains(z)) throw ArgumentError("start point is not in V");
  if (!f.bounded()) throw ArgumentError("solve needs bounded boundary data; use solve_l1");
  const bool wos = use_walk_on_spheres(triplet, cfg);
  const bool pair = wos && cfg.antithetic;
  auto est = estimate_joint(2, opts, [&](RngStream& rng, std::span<double> out) {
    if (pair) {
      std::vector<Vector> walkers{z, z};
      std::vector<ExitSample> exits(2);
      walk_on_spheres(V, cfg, rng, walkers, {1.0, -1.0}, exits);
      double value = 0.0;
      double lost = 0.0;
      for (const auto& e : exits) {
        if (e.exited)
          value += f(e.location);
        else
          lost += 1.0;
      }
      out[0] = 0.5 * value;
      out[1] = 0.5 * lost;
    } else {
      const auto e = sample_exit(triplet, V, z, cfg, rng);
      out[0] = e.exited ? f(e.location) : 0.0;
      out[1] = e.exited ? 0.0 : 1.0;
    }
  });
  SolveResult result;
  result.value = est[0];
  result.non_exit_fraction = est[1].mean;
  result.flagged = result.non_exit_fraction > cfg.max_non_exit;
  result.method = wos ? (pair ? "walk_on_spheres/antithetic" : "walk_on_spheres") : "time_stepping";
  return result;
}

std::vector<Vector> geometric_ray(const Vector& y, const Vector& x0, int count) {
  std::vector<Vector> pts;
  for (int k = 1; k <= count; ++k) pts.push_back(y + std::ldexp(1.0, -k) * (x0 - y));
  return pts;
}

ContinuityReport boundary_continuity_check(const LevyTriplet& triplet, const Domain& V,
                                           const BoundaryData& f, const Vector& y,
                                           const Vector& x0, const EstimatorOptions& opts,
                                           const DirichletConfig& cfg, int count,
                                           double allowance) {
  if (count < 4) throw ArgumentError("need at least four approach points");
  ContinuityReport report;
  report.points = geometric_ray(y, x0, count);
  report.target = f(y);
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    auto r = solve(triplet, V, f, report.points[i], opts.with_key(opts.key.derive(i)), cfg);
    report.gaps.push_back(std::abs(r.value.mean - report.target));
    report.values.push_back(r.value);
  }
  const auto& last = report.values.back();
  report.final_close = report.gaps.back() <= last.z() * last.std_error + allowance + kDefaultAtol;
  const std::size_t w = 3;
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    head += report.gaps[i];
    tail += report.gaps[report.gaps.size() - 1 - i];
  }
  report.decreasing = tail <= head + 3.0 * last.z() * last.std_error * w + kDefaultAtol;
  report.pass = report.final_close && report.decreasing;
  return report;
}

std::vector<HarmonicityRow> harmonicity_check(const LevyTriplet& triplet, const SpaceModel& model,
                                              const Domain& V, const BoundaryData& f,
                                              const Vector& x, const std::vector<double>& radii,
                                              const EstimatorOptions& opts,
                                              const DirichletConfig& cfg) {
  if (!f.bounded()) throw ArgumentError("harmonicity check needs bounded data");
  std::vector<HarmonicityRow> rows;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (!V.contains_e_ball(x, r)) throw ArgumentError("ball B_r(x) is not contained in V");
    const Domain ball = Domain::e_ball(model, x, r);
    const auto two = estimate(opts.with_key(opts.key.derive(2 * i)), [&](RngStream& rng) {
      const auto first = sample_exit(triplet, ball, x, cfg, rng);
      if (!first.exited) return 0.0;
      const auto second = sample_exit(triplet, V, first.location, cfg, rng);
      return second.exited ? f(second.location) : 0.0;
    });
    const auto direct = estimate(opts.with_key(opts.key.derive(2 * i + 1)), [&](RngStream& rng) {
      const auto e = sample_exit(triplet, V, x, cfg, rng);
      return e.exited ? f(e.location) : 0.0;
    });
    rows.push_back({r, two, direct, combine(two, 1.0, direct, -1.0).verdict(0.0)});
  }
  return rows;
}

L1Result solve_l1(const LevyTriplet& triplet, const Domain& V, const BoundaryData& f,
                  const std::vector<BoundaryData>& ladder, const PointCloud& lambda,
                  const EstimatorOptions& opts, const DirichletConfig& cfg) {
  if (ladder.empty()) throw ArgumentError("ladder must be nonempty");
  for (const auto& fm : ladder)
    if (!fm.bounded()) throw ArgumentError("ladder levels must be bounded");
  if (lambda.points.empty()) throw ArgumentError("λ cloud must be nonempty");
  const int width = static_cast<int>(ladder.size() + 1);
  L1Result result;
  std::vector<std::vector<McEstimate>> per_point;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!V.contains(lambda.points[i])) throw ArgumentError("λ cloud must lie in V");
    per_point.push_back(estimate_joint(width, opts.with_key(opts.key.derive(i)),
                                       [&](RngStream& rng, std::span<double> out) {
                                         const auto e = sample_exit(triplet, V, lambda.points[i], cfg, rng);
                                         if (!e.exited) {
                                           std::fill(out.begin(), out.end(), 0.0);
                                           return;
                                         }
                                         out[0] = f(e.location);
                                         for (std::size_t m = 0; m < ladder.size(); ++m)
                                           out[m + 1] = ladder[m](e.location);
                                       }));
    result.h.push_back(per_point.back()[0]);
  }
  double lam_h = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) lam_h += lambda.masses[i] * per_point[i][0].mean;
  if (!std::isfinite(lam_h)) throw IntegrabilityError("λ(H^V f) is not finite");
  for (std::size_t m = 0; m < ladder.size(); ++m) {
    double lam_m = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) lam_m += lambda.masses[i] * per_point[i][m + 1].mean;
    result.gaps.push_back(std::max(0.0, lam_h - lam_m));
  }
  const double g0 = result.gaps.front();
  const double scale = std::max(1.0, std::abs(lam_h));
  if (g0 > 1e-12 * scale) {
    std::size_t from = 0;
    for (int j = 1;; ++j) {
      const double level = std::ldexp(g0, -j);
      std::size_t m = from;
      while (m < ladder.size() && result.gaps[m] > level) ++m;
      if (m >= ladder.size()) break;
      result.chosen.push_back(m);
      from = m + 1;
      if (from >= ladder.size()) break;
    }
    if (result.gaps.back() > 0.5 * g0)
      throw IntegrabilityError("λ(H^V f_m) does not approach λ(H^V f) up the ladder");
  }
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (result.chosen.empty())
      result.k.push_back({0.0, 0.0, per_point[i][0].n, opts.confidence});
    else
      result.k.push_back(l1_control(triplet, V, f, ladder, result.chosen, lambda.points[i],
                                    opts.with_key(opts.key.derive(i)), cfg));
  }
  return result;
}

McEstimate l1_control(const LevyTriplet& triplet, const Domain& V, const BoundaryData& f,
                      const std::vector<BoundaryData>& ladder,
                      const std::vector<std::size_t>& chosen, const Vector& x,
                      const EstimatorOptions& opts, const DirichletConfig& cfg) {
  for (std::size_t m : chosen)
    if (m >= ladder.size()) throw ArgumentError("chosen level outside the ladder");
  if (chosen.empty()) return {0.0, 0.0, opts.samples, opts.confidence};
  return estimate(opts, [&](RngStream& rng) {
    const auto e = sample_exit(triplet, V, x, cfg, rng);
    if (!e.exited) return 0.0;
    const double fx = f(e.location);
    double s = 0.0;
    for (std::size_t m : chosen) s += fx - ladder[m](e.location);
    return s;
  });
}

double tail_limsup(const std::vector<double>& k, std::size_t tail, double cap) {
  if (k.empty()) throw ArgumentError("empty control sequence");
  const std::size_t w = std::min(tail, k.size());
  const auto first = k.end() - static_cast<std::ptrdiff_t>(w);
  double top = 0.0;
  bool increasing = w >= 2;
  for (auto it = first; it != k.end(); ++it) {
    if (!(*it < cap)) return kInf;
    top = std::max(top, *it);
    if (it != first && !(*it > *(it - 1))) increasing = false;
  }
  if (increasing && *first > 0.0 && k.back() / *first >= 2.0) return kInf;
  return top;
}

bool ControlReport::all_pass() const {
  return std::all_of(records.begin(), records.end(), [](const ControlRecord& r) { return r.pass; });
}

ControlReport controlled_convergence_check(const std::function<McEstimate(const Vector&)>& h,
                                           const std::function<double(const Vector&)>& f,
                                           const std::function<double(const Vector&)>& k,
                                           const Domain& V,
                                           const std::function<bool(const Vector&)>& V0,
                                           const std::vector<ApproachSequence>& sequences,
                                           const ControlOptions& options) {
  ControlReport report;
  for (const auto& seq : sequences) {
    if (seq.points.size() < options.tail) throw ArgumentError("approach sequence shorter than the tail window");
    if (std::abs(V.boundary_distance(seq.y)) > options.boundary_tol)
      throw ArgumentError("sequence " + seq.id + " does not converge to a boundary point");
    double previous = kInf;
    for (const auto& p : seq.points) {
      if (!V0(p)) throw ArgumentError("sequence " + seq.id + " leaves V0");
      const double d = (p - seq.y).norm();
      if (!(d < previous)) throw ArgumentError("sequence " + seq.id + " does not approach its boundary point");
      previous = d;
    }
    ControlRecord rec;
    rec.id = seq.id;
    rec.y = seq.y;
    for (const auto& p : seq.points) {
      rec.h.push_back(h(p));
      const double kv = k(p);
      if (kv < 0.0) throw ArgumentError("control must be nonnegative");
      rec.k.push_back(kv);
      if (!(kv < options.cap)) report.high_k.push_back(p);
    }
    rec.limsup_k = tail_limsup(rec.k, options.tail, options.cap);
    if (std::isfinite(rec.limsup_k)) {
      rec.branch = "c1";
      const auto& last = rec.h.back();
      rec.pass = std::abs(last.mean - f(seq.y)) <= last.z() * last.std_error + options.tol;
    } else {
      rec.branch = "c2";
      double worst = 0.0;
      for (std::size_t i = rec.h.size() - options.tail; i < rec.h.size(); ++i)
        worst = std::max(worst, std::abs(rec.h[i].mean) / (1.0 + rec.k[i]));
      rec.pass = worst <= options.ratio_tol;
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

}  // namespace levypot
