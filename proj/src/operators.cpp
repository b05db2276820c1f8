#include "levypot/operators.hpp"

#include <cmath>

namespace levypot {

TestFunction TestFunction::constant(double c) {
  return {"constant", [c](const Vector&) { return c; }, std::abs(c), 0};
}

TestFunction TestFunction::indicator_ball(const SpaceModel& model, Vector center, double r) {
  return {"indicator_ball",
          [model, center = std::move(center), r](const Vector& z) {
            return e_norm(model, z - center) < r ? 1.0 : 0.0;
          },
          1.0, 0};
}

TestFunction TestFunction::coordinate_square(Vector xi) {
  return {"coordinate_square",
          [xi = std::move(xi)](const Vector& z) {
            const double p = xi.dot(z.head(xi.size()));
            return p * p;
          },
          std::numeric_limits<double>::infinity(), 0};
}

TestFunction TestFunction::cylinder(Index n, std::function<double(const Vector&)> phi, double bound,
                                    std::string name) {
  if (n < 1) throw ArgumentError("cylinder rank must be positive");
  return {std::move(name), [n, phi = std::move(phi)](const Vector& z) { return phi(z.head(n)); },
          bound, n};
}

TestFunction TestFunction::newton_truncated(Vector center) {
  if (center.size() != 3) throw ArgumentError("Newton kernel lives on three coordinates");
  return cylinder(
      3,
      [center = std::move(center)](const Vector& y) {
        const double r = (y - center).norm();
        return r <= 1.0 ? 1.0 : 1.0 / r;
      },
      1.0, "newton_truncated");
}

TestFunction TestFunction::capped_square(Index n, double cap) {
  if (!(cap > 0.0)) throw ArgumentError("cap must be positive");
  return cylinder(
      n, [cap](const Vector& y) { return std::min(y.squaredNorm(), cap); }, cap, "capped_square");
}

TestFunction TestFunction::qx_squared(const LyapunovNorm& norm) {
  return {"qx_squared", [norm](const Vector& z) { return norm.squared(z); },
          std::numeric_limits<double>::infinity(), 0};
}

TestFunction TestFunction::translated(const Vector& w) const {
  TestFunction g = *this;
  g.name = name + "_translated";
  g.eval = [f = eval, w](const Vector& z) { return f(z + w.head(z.size())); };
  g.rank = 0;
  return g;
}

TestFunction TestFunction::restricted(Index dim) const {
  if (rank < 1 || dim < rank) throw ArgumentError("restriction needs a cylinder function of rank <= dim");
  TestFunction g = *this;
  g.name = name + "_restricted";
  g.eval = [f = eval, r = rank](const Vector& y) {
    Vector padded = Vector::Zero(std::max<Index>(y.size(), r));
    padded.head(y.size()) = y;
    return f(padded);
  };
  return g;
}

McEstimate apply_Pt(const LevyTriplet& triplet, const TestFunction& f, double t, const Vector& z,
                    const EstimatorOptions& opts) {
  if (!(t > 0.0)) throw ArgumentError("time must be positive");
  return estimate(opts, [&](RngStream& rng) {
    Vector y = z;
    add_increment(triplet, t, rng, y);
    return f(y);
  });
}

McEstimate apply_Ualpha(const LevyTriplet& triplet, const TestFunction& f, double alpha,
                        const Vector& z, const EstimatorOptions& opts) {
  if (!(alpha > 0.0)) throw ArgumentError("resolvent parameter must be positive");
  return estimate(opts, [&](RngStream& rng) {
    Vector y = z;
    add_increment(triplet, rng.exponential(alpha), rng, y);
    return f(y) / alpha;
  });
}

McEstimate apply_UbetaUalpha(const LevyTriplet& triplet, const TestFunction& f, double beta,
                             double alpha, const Vector& z, const EstimatorOptions& opts) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ArgumentError("resolvent parameters must be positive");
  return estimate(opts, [&](RngStream& rng) {
    Vector y = z;
    add_increment(triplet, rng.exponential(beta), rng, y);
    add_increment(triplet, rng.exponential(alpha), rng, y);
    return f(y) / (alpha * beta);
  });
}

TransferReport supermedian_transfer_check(const LevyTriplet& triplet, const TestFunction& v,
                                          Index n, double beta,
                                          const std::vector<double>& alpha_grid,
                                          const std::vector<Vector>& z_set,
                                          const EstimatorOptions& opts) {
  if (!v.bounded()) throw ArgumentError("supermedian check needs a bounded (capped) function");
  if (!(beta > 0.0)) throw ArgumentError("β must be positive");
  if (n < 1 || n > triplet.dim()) throw ArgumentError("projection rank out of range");
  const LevyTriplet projected = project(triplet, n);
  TransferReport report;
  for (std::size_t i = 0; i < z_set.size(); ++i) {
    const Vector zn = z_set[i].head(n);
    const double value = v(zn);
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
      const double alpha = alpha_grid[a];
      if (!(alpha > 0.0)) throw ArgumentError("α must be positive");
      const double rate = beta + alpha;
      auto est = estimate(opts.with_key(opts.key.derive(i * alpha_grid.size() + a)),
                          [&](RngStream& rng) {
                            Vector y = zn;
                            add_increment(projected, rng.exponential(rate), rng, y);
                            return alpha / rate * v(y) - value;
                          });
      report.rows.push_back({alpha, z_set[i], value, est, est.verdict_at_most(0.0)});
      if (est.mean + est.z() * est.std_error < previous) report.monotone_in_alpha = false;
      previous = std::max(previous, est.mean - est.z() * est.std_error);
    }
  }
  return report;
}

}  // namespace levypot
