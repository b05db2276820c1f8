#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "levypot/lyapunov.hpp"

namespace levypot {

/// f on E, or f = φ ∘ P̃_n when `rank` > 0.
struct TestFunction {
  std::string name;
  std::function<double(const Vector&)> eval;
  /// sup |f|; infinite for functions admitted through an envelope.
  double bound = std::numeric_limits<double>::infinity();
  Index rank = 0;

  double operator()(const Vector& z) const {
    const double v = eval(z);
    if (std::abs(v) > bound * (1.0 + 1e-12)) throw ArgumentError(name + " exceeds its declared bound");
    return v;
  }
  [[nodiscard]] bool bounded() const { return std::isfinite(bound); }

  static TestFunction constant(double c);
  /// 1 on the open E-ball ‖z − center‖_E < r.
  static TestFunction indicator_ball(const SpaceModel& model, Vector center, double r);
  /// <ξ, z>²; unbounded.
  static TestFunction coordinate_square(Vector xi);
  /// φ(P̃_n z) for φ on ℝⁿ with sup bound.
  static TestFunction cylinder(Index n, std::function<double(const Vector&)> phi, double bound,
                               std::string name = "cylinder");
  /// min(1, 1/|y|) on the first three coordinates (y = P̃_3 z − center).
  static TestFunction newton_truncated(Vector center = Vector::Zero(3));
  /// min(|P̃_n z|², cap), subharmonic below the cap.
  static TestFunction capped_square(Index n, double cap);
  static TestFunction qx_squared(const LyapunovNorm& norm);

  /// f ∘ T_w.
  [[nodiscard]] TestFunction translated(const Vector& w) const;
  /// φ itself when f = φ ∘ P̃_n: evaluates f on the zero-padded argument.
  [[nodiscard]] TestFunction restricted(Index dim) const;
};

/// Ê f(z + Z_t).
McEstimate apply_Pt(const LevyTriplet& triplet, const TestFunction& f, double t, const Vector& z,
                    const EstimatorOptions& opts);

/// (1/α) Ê f(z + Z_T), T ~ Exp(α).
McEstimate apply_Ualpha(const LevyTriplet& triplet, const TestFunction& f, double alpha,
                        const Vector& z, const EstimatorOptions& opts);

/// (1/(αβ)) Ê f(z + Z_S + Z'_T), S ~ Exp(β), T ~ Exp(α): U_β U_α f(z).
McEstimate apply_UbetaUalpha(const LevyTriplet& triplet, const TestFunction& f, double beta,
                             double alpha, const Vector& z, const EstimatorOptions& opts);

struct TransferRow {
  double alpha;
  Vector z;
  double value;
  /// α Û_{β+α}(v ∘ P̃_n)(z) − v(P̃_n z), paired.
  McEstimate excess;
  Verdict verdict;
};

struct TransferReport {
  std::vector<TransferRow> rows;
  /// α Û_{β+α} v nondecreasing in α at every start.
  bool monotone_in_alpha = true;
};

/// α U_{β+α}(v ∘ P̃_n) <= v ∘ P̃_n on a grid of α and starts.
TransferReport supermedian_transfer_check(const LevyTriplet& triplet, const TestFunction& v,
                                          Index n, double beta,
                                          const std::vector<double>& alpha_grid,
                                          const std::vector<Vector>& z_set,
                                          const EstimatorOptions& opts);

}  // namespace levypot
