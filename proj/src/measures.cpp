#include "levypot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace levypot {

JumpMeasure JumpMeasure::point_masses(std::vector<Vector> atoms, std::vector<double> masses) {
  if (atoms.empty() || atoms.size() != masses.size())
    throw ArgumentError("point-mass jump measure needs matching nonempty atoms and masses");
  JumpMeasure m;
  m.kind_ = Kind::point_masses;
  const Index dim = atoms.front().size();
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != dim) throw ArgumentError("jump atoms must share one dimension");
    if (atoms[i].isZero(0.0)) throw ArgumentError("jump measure must not charge the origin");
    if (!(masses[i] > 0.0) || !std::isfinite(masses[i]))
      throw ArgumentError("jump masses must be positive and finite");
    total += masses[i];
    m.cumulative_.push_back(total);
  }
  m.intensity_ = total;
  m.atoms_ = std::move(atoms);
  m.masses_ = std::move(masses);
  return m;
}

JumpMeasure JumpMeasure::poisson01(double intensity) {
  if (!(intensity > 0.0)) throw ArgumentError("jump intensity must be positive");
  JumpMeasure m;
  m.kind_ = Kind::poisson01;
  m.intensity_ = intensity;
  return m;
}

Vector embed_dirac(double u, Index dim) {
  Vector c(dim);
  for (Index n = 1; n <= dim; ++n)
    c(n - 1) = std::numbers::sqrt2 * std::sin(static_cast<double>(n) * std::numbers::pi * u);
  return c;
}

void JumpMeasure::add_jump(RngStream& rng, Vector& z) const {
  switch (kind_) {
    case Kind::none:
      return;
    case Kind::point_masses: {
      const double u = rng.uniform() * intensity_;
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto i = std::min<std::size_t>(it - cumulative_.begin(), atoms_.size() - 1);
      z += atoms_[i];
      return;
    }
    case Kind::poisson01: {
      const double u = rng.uniform();
      for (Index n = 1; n <= z.size(); ++n)
        z(n - 1) += std::numbers::sqrt2 * std::sin(static_cast<double>(n) * std::numbers::pi * u);
      return;
    }
  }
}

double JumpMeasure::integrate(const std::function<double(const Vector&)>& g, Index dim) const {
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::point_masses: {
      double s = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) s += masses_[i] * g(atoms_[i]);
      return s;
    }
    case Kind::poisson01: {
      // composite 3-point Gauss-Legendre
      constexpr int panels = 2048;
      const double h = 1.0 / panels;
      const double off = std::sqrt(0.6) * h / 2;
      double s = 0.0;
      for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        s += (5.0 * g(embed_dirac(mid - off, dim)) + 8.0 * g(embed_dirac(mid, dim)) +
              5.0 * g(embed_dirac(mid + off, dim))) / 18.0 * h;
      }
      return intensity_ * s;
    }
  }
  return 0.0;
}

JumpMeasure JumpMeasure::projected(Index n) const {
  switch (kind_) {
    case Kind::none:
    case Kind::poisson01:
      return *this;
    case Kind::point_masses: {
      std::vector<Vector> atoms;
      std::vector<double> masses;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        Vector a = atoms_[i].head(n);
        if (a.isZero(0.0)) continue;  // jumps invisible after projection
        atoms.push_back(std::move(a));
        masses.push_back(masses_[i]);
      }
      if (atoms.empty()) return none();
      return point_masses(std::move(atoms), std::move(masses));
    }
  }
  return *this;
}

std::string JumpMeasure::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::none:
      os << "none";
      break;
    case Kind::point_masses:
      os << "pointmass(" << atoms_.size() << " atoms, intensity " << intensity_ << ")";
      break;
    case Kind::poisson01:
      os << "poisson01(intensity " << intensity_ << ")";
      break;
  }
  return os.str();
}

bool LevyTriplet::unit_gaussian() const {
  return jump_free() && driftless() && (gaussian.array() == 1.0).all();
}

bool LevyTriplet::isotropic_gaussian() const {
  return jump_free() && driftless() && gaussian.size() > 0 && gaussian(0) > 0.0 &&
         (gaussian.array() == gaussian(0)).all();
}

Index LevyTriplet::gaussian_rank() const { return (gaussian.array() > 0.0).count(); }

LevyTriplet LevyTriplet::unit_gaussian(Index dim) {
  return {Vector::Zero(dim), Vector::Ones(dim), JumpMeasure::none()};
}

LevyTriplet LevyTriplet::pure_drift(Vector b) {
  const Index dim = b.size();
  return {std::move(b), Vector::Zero(dim), JumpMeasure::none()};
}

LevyTriplet LevyTriplet::poisson_example(Index dim, double intensity) {
  return {Vector::Zero(dim), Vector::Zero(dim), JumpMeasure::poisson01(intensity)};
}

void LevyTriplet::validate() const {
  if (drift.size() < 1 || gaussian.size() != drift.size())
    throw ArgumentError("triplet drift and Gaussian variances must share one positive dimension");
  if ((gaussian.array() < 0.0).any() || !gaussian.allFinite())
    throw ArgumentError("Gaussian variances must be nonnegative and finite");
  if (!drift.allFinite()) throw ArgumentError("drift must be finite");
  if (jumps.kind() == JumpMeasure::Kind::point_masses &&
      jumps.atoms().front().size() != drift.size())
    throw ArgumentError("jump atoms do not match the triplet dimension");
}

LevyTriplet project(const LevyTriplet& triplet, Index n) {
  if (n < 1 || n > triplet.dim()) throw ArgumentError("projection rank out of range [1, N]");
  return {triplet.drift.head(n), triplet.gaussian.head(n), triplet.jumps.projected(n)};
}

Vector lk_drift(const SpaceModel& model, const LevyTriplet& triplet) {
  Vector b = triplet.drift;
  for (Index k = 0; k < b.size(); ++k) {
    b(k) += triplet.jumps.integrate(
        [&](const Vector& z) {
          const double e2 = e_inner(model, z, z);
          return z(k) / (1.0 + e2);
        },
        b.size());
  }
  return b;
}

void add_continuous_increment(const LevyTriplet& triplet, double t, RngStream& rng, Vector& z) {
  const double st = std::sqrt(t);
  for (Index k = 0; k < z.size(); ++k) {
    const double r = triplet.gaussian(k);
    if (r > 0.0) z(k) += st * std::sqrt(r) * rng.normal();
  }
  if (!triplet.driftless()) z.noalias() += t * triplet.drift;
}

void add_increment(const LevyTriplet& triplet, double t, RngStream& rng, Vector& z) {
  add_continuous_increment(triplet, t, rng, z);
  if (triplet.jump_free()) return;
  const long count = rng.poisson(t * triplet.jumps.intensity());
  for (long i = 0; i < count; ++i) triplet.jumps.add_jump(rng, z);
}

Vector sample_increment(const LevyTriplet& triplet, double t, RngStream& rng) {
  if (!(t > 0.0)) throw ArgumentError("increment time must be positive");
  Vector z = Vector::Zero(triplet.dim());
  add_increment(triplet, t, rng, z);
  return z;
}

double pairing_second_moment_formula(const SpaceModel& model, const LevyTriplet& triplet,
                                     const Vector& xi, double t) {
  const Index dim = triplet.dim();
  const Vector b = lk_drift(model, triplet);
  const double compensated = triplet.jumps.integrate(
      [&](const Vector& z) {
        const double e2 = e_inner(model, z, z);
        return xi.dot(z) * e2 / (1.0 + e2);
      },
      dim);
  const double mean = xi.dot(b) + compensated;
  const double gauss = (xi.array().square() * triplet.gaussian.array()).sum();
  const double jump2 =
      triplet.jumps.integrate([&](const Vector& z) { return std::pow(xi.dot(z), 2); }, dim);
  return t * t * mean * mean + t * (gauss + jump2);
}

McEstimate pairing_second_moment(const LevyTriplet& triplet, const Vector& xi, double t,
                                 const EstimatorOptions& opts) {
  if (!(t > 0.0)) throw ArgumentError("time must be positive");
  return estimate(opts, [&](RngStream& rng) {
    Vector z = Vector::Zero(triplet.dim());
    add_increment(triplet, t, rng, z);
    const double p = xi.dot(z);
    return p * p;
  });
}

HypothesisReport check_hypothesis_H(const LevyTriplet& triplet, const std::vector<double>& t_grid,
                                    const std::vector<Vector>& xi_set,
                                    const EstimatorOptions& opts) {
  if (t_grid.empty() || xi_set.empty()) throw ArgumentError("hypothesis check needs nonempty grids");
  for (const auto& xi : xi_set)
    if (xi.isZero(0.0)) throw ArgumentError("test functionals must be nonzero");
  const int width = static_cast<int>(t_grid.size() * xi_set.size());
  auto shards = run_sharded(width, opts, [&](RngStream& rng, std::int64_t, std::span<double> out) {
    Vector z(triplet.dim());
    for (std::size_t a = 0; a < t_grid.size(); ++a) {
      z.setZero();
      add_increment(triplet, t_grid[a], rng, z);
      for (std::size_t b = 0; b < xi_set.size(); ++b) {
        const double p = xi_set[b].dot(z);
        out[a * xi_set.size() + b] = p * p;
      }
    }
  });
  const auto full = merge_shards(shards, opts.confidence);
  const auto half = merge_shards(shards, opts.confidence, 0, std::max<std::size_t>(1, shards.size() / 2));

  HypothesisReport report;
  for (std::size_t a = 0; a < t_grid.size(); ++a) {
    const double t = t_grid[a];
    for (std::size_t b = 0; b < xi_set.size(); ++b) {
      const auto idx = a * xi_set.size() + b;
      const double norm = (1.0 + t * t) * xi_set[b].squaredNorm();
      const double ratio = full[idx].mean / norm;
      if (!std::isfinite(ratio)) throw InstabilityError("moment estimate is not finite");
      if (shards.size() >= 4 && half[idx].std_error > 0.0 &&
          full[idx].std_error > 0.95 * half[idx].std_error) {
        std::ostringstream os;
        os << "second moment at t=" << t << " does not settle: standard error "
           << full[idx].std_error << " with all samples vs " << half[idx].std_error
           << " with half";
        throw InstabilityError(os.str());
      }
      report.cells.push_back({t, static_cast<Index>(b), full[idx], ratio});
      report.c_hat = std::max(report.c_hat, ratio);
      report.c_hat_half = std::max(report.c_hat_half, half[idx].mean / norm);
    }
  }
  report.stable = std::abs(report.c_hat - report.c_hat_half) <= 0.2 * report.c_hat;
  return report;
}

}  // namespace levypot
