#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levypot/estimate.hpp"
#include "levypot/space_model.hpp"

namespace levypot {

/// Finite-intensity jump measure M = Λ · law(J).
class JumpMeasure {
 public:
  enum class Kind { none, point_masses, poisson01 };

  JumpMeasure() = default;

  static JumpMeasure none() { return {}; }
  /// M = Σ_i m_i δ_{a_i}. Atoms are pairing-coordinate vectors; zero atoms are rejected.
  static JumpMeasure point_masses(std::vector<Vector> atoms, std::vector<double> masses);
  /// Poisson functional on S = (0,1) with intensity Λ·Lebesgue: each jump is the
  /// embedding of δ_U, U uniform, with coordinates √2 sin(nπU).
  static JumpMeasure poisson01(double intensity = 1.0);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double intensity() const { return intensity_; }
  [[nodiscard]] const std::vector<Vector>& atoms() const { return atoms_; }
  [[nodiscard]] const std::vector<double>& masses() const { return masses_; }

  /// Adds one jump J ~ M/Λ to z.
  void add_jump(RngStream& rng, Vector& z) const;

  /// ∫ g dM. Exact for point masses; Gauss-Legendre in u for poisson01.
  [[nodiscard]] double integrate(const std::function<double(const Vector&)>& g, Index dim) const;

  /// Restriction of every jump to its first n coordinates.
  [[nodiscard]] JumpMeasure projected(Index n) const;

  [[nodiscard]] std::string describe() const;

 private:
  Kind kind_ = Kind::none;
  double intensity_ = 0.0;
  std::vector<Vector> atoms_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

/// Coordinates of the embedded Dirac mass δ_u in the sine basis of H¹₀(0,1).
Vector embed_dirac(double u, Index dim);

/// Lévy triplet of a finite-intensity process: effective drift, diagonal Gaussian
/// variance per pairing coordinate, jump measure.
struct LevyTriplet {
  Vector drift;
  Vector gaussian;
  JumpMeasure jumps;

  [[nodiscard]] Index dim() const { return drift.size(); }
  [[nodiscard]] bool jump_free() const { return jumps.kind() == JumpMeasure::Kind::none; }
  [[nodiscard]] bool driftless() const { return drift.isZero(0.0); }
  /// Zero drift, no jumps, all coordinate variances equal to one.
  [[nodiscard]] bool unit_gaussian() const;
  /// Zero drift, no jumps, all coordinate variances equal and positive.
  [[nodiscard]] bool isotropic_gaussian() const;
  [[nodiscard]] Index gaussian_rank() const;

  static LevyTriplet unit_gaussian(Index dim);
  static LevyTriplet pure_drift(Vector b);
  static LevyTriplet poisson_example(Index dim, double intensity = 1.0);

  void validate() const;
};

/// Triplet of the image process P̃_n X on the first n coordinates.
LevyTriplet project(const LevyTriplet& triplet, Index n);

/// Drift b of the Lévy-Khintchine exponent with the compensator z/(1+‖z‖²):
/// b = effective drift + ∫ z/(1+‖z‖²) M(dz).
Vector lk_drift(const SpaceModel& model, const LevyTriplet& triplet);

/// Z ~ ν_t: t·drift + √t·G + Σ_{i≤Poisson(tΛ)} J_i.
Vector sample_increment(const LevyTriplet& triplet, double t, RngStream& rng);
/// z += t·drift + √t·G (continuous part only).
void add_continuous_increment(const LevyTriplet& triplet, double t, RngStream& rng, Vector& z);
/// z += Z_t for the full law ν_t.
void add_increment(const LevyTriplet& triplet, double t, RngStream& rng, Vector& z);

/// Closed form of ∫<ξ,z>² ν_t(dz):
/// t²(<ξ,b> + ∫<ξ,z>‖z‖²/(1+‖z‖²) M)² + t(<ξ,Rξ> + ∫<ξ,z>² M).
double pairing_second_moment_formula(const SpaceModel& model, const LevyTriplet& triplet,
                                     const Vector& xi, double t);

McEstimate pairing_second_moment(const LevyTriplet& triplet, const Vector& xi, double t,
                                 const EstimatorOptions& opts);

struct HypothesisCell {
  double t;
  Index xi_index;
  McEstimate moment;
  double ratio;
};

struct HypothesisReport {
  double c_hat = 0.0;
  /// Same statistic from the first half of the samples.
  double c_hat_half = 0.0;
  bool stable = false;
  std::vector<HypothesisCell> cells;
};

/// C_hat = max over (t, ξ) of Ê∫<ξ,z>²ν_t / ((1+t²)|ξ|²).
HypothesisReport check_hypothesis_H(const LevyTriplet& triplet, const std::vector<double>& t_grid,
                                    const std::vector<Vector>& xi_set,
                                    const EstimatorOptions& opts);

}  // namespace levypot
