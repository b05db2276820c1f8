#pragma once

#include <memory>
#include <string>
#include <vector>

#include "levypot/operators.hpp"

namespace levypot {

struct PathConfig {
  double dt = 0.01;
  double horizon = 50.0;
  /// One Gaussian-bridge midpoint at each crossing step.
  bool refine = true;

  void validate() const;
};

/// Target set M with total, pure membership.
class TargetSet {
 public:
  enum class Kind {
    everything,
    empty,
    e_ball,
    e_ball_complement,
    h_ball,
    halfspace,
    box,
    qx_level,
    qx_exceeds,
    set_union,
    cylinder
  };

  static TargetSet everything();
  static TargetSet empty();
  /// ‖z − center‖_E < r.
  static TargetSet e_ball(const SpaceModel& model, Vector center, double r);
  /// ‖z − center‖_E > r.
  static TargetSet e_ball_complement(const SpaceModel& model, Vector center, double r);
  /// |z − center|_H < r on the truncated coordinates.
  static TargetSet h_ball(Vector center, double r);
  /// <ξ, z> > c.
  static TargetSet halfspace(Vector xi, double c);
  /// lo < c_k < hi coordinatewise; infinite bounds allowed.
  static TargetSet box(Vector lo, Vector hi);
  /// q_x(z) <= c.
  static TargetSet qx_level(std::shared_ptr<const LyapunovNorm> norm, double c);
  /// q_x(z) > c.
  static TargetSet qx_exceeds(std::shared_ptr<const LyapunovNorm> norm, double c);
  static TargetSet set_union(std::vector<TargetSet> parts);
  /// {z : P̃_n z ∈ inner}, inner living on ℝⁿ.
  static TargetSet cylinder(TargetSet inner, Index n);

  [[nodiscard]] bool contains(const Vector& z) const;
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  /// P̃_n(M) as a subset of ℝⁿ.
  [[nodiscard]] TargetSet projected(Index n) const;

 private:
  Kind kind_ = Kind::empty;
  std::string name_;
  Vector center_;
  Vector weights_;
  Vector lo_;
  Vector hi_;
  double level_ = 0.0;
  Index rank_ = 0;
  std::shared_ptr<const LyapunovNorm> norm_;
  std::vector<TargetSet> parts_;
};

struct HitRecord {
  bool hit = false;
  double time = 0.0;
  Vector location;
};

struct PathOutcome {
  std::vector<HitRecord> hits;
  double stop = 0.0;
  /// State at the stop time (only when run to the stop).
  Vector end;
};

/// Simulates from `start` until every target is hit or time `stop` is reached.
/// Membership is checked at time 0 (first entry time D_M), after each step,
/// right before and right after each jump, and at `stop`.
PathOutcome simulate_targets(const LevyTriplet& triplet, const Vector& start,
                             const std::vector<const TargetSet*>& targets, const PathConfig& cfg,
                             double stop, RngStream& rng, bool run_to_stop = false);

/// Single target, stop at the horizon.
HitRecord simulate_to_hit(const LevyTriplet& triplet, const Vector& start,
                          const TargetSet& target, const PathConfig& cfg, RngStream& rng);

/// Upper bound ‖v‖ e^{-β·horizon} on the horizon truncation error.
double horizon_bias(const TestFunction& v, double beta, const PathConfig& cfg);

/// Killing time ζ ~ Exp(β) capped at the horizon; β = 0 stops at the horizon.
double killing_time(double beta, const PathConfig& cfg, RngStream& rng);

/// R̂_β^M v(z) = Ê[v(X_T) ; T_M <= ζ], ζ ~ Exp(β) independent.
McEstimate reduced_function(const LevyTriplet& triplet, const TestFunction& v, const TargetSet& M,
                            double beta, const Vector& z, const EstimatorOptions& opts,
                            const PathConfig& cfg, bool transient_certificate = false);

/// Reduced functions of v for several targets on common paths.
std::vector<McEstimate> reduced_function_multi(const LevyTriplet& triplet, const TestFunction& v,
                                               const std::vector<TargetSet>& targets, double beta,
                                               const Vector& z, const EstimatorOptions& opts,
                                               const PathConfig& cfg);

struct ProjectionInequality {
  McEstimate full;
  McEstimate projected;
  /// full − projected, paired on one path.
  McEstimate difference;
  Verdict verdict = Verdict::inconclusive;
};

/// R̂_β^M(v ∘ P̃_n)(z) <= (R̂_β^{P̃_n(M)} v)(P̃_n z), both on the same path.
ProjectionInequality projection_inequality(const LevyTriplet& triplet, const TestFunction& v,
                                           const TargetSet& M, Index n, double beta,
                                           const Vector& z, const EstimatorOptions& opts,
                                           const PathConfig& cfg);

struct PointPolarityReport {
  std::vector<double> radii;
  /// per start, per radius
  std::vector<std::vector<McEstimate>> hit_probability;
  /// d log(1/P) / d log(1/r) over the two finest radii, per start.
  std::vector<double> slopes;
  bool monotone = true;
  bool consistent = false;
};

/// Hit probabilities of shrinking E-balls around y under killing at rate β.
/// Diagnostic only.
PointPolarityReport polarity_diagnostic_point(const SpaceModel& model, const LevyTriplet& triplet,
                                              const Vector& y, const std::vector<double>& radii,
                                              const std::vector<Vector>& starts, double beta,
                                              const EstimatorOptions& opts, const PathConfig& cfg,
                                              bool enforce_hypothesis = true,
                                              double slope_threshold = 0.15);

struct HPolarityReport {
  std::vector<double> radii;
  std::vector<std::vector<McEstimate>> hit_probability;
  bool shrinking = true;
  /// E|P̃_N X_t|_H² from the first start, with its closed form for Gaussian triplets.
  McEstimate h_norm_square;
  double h_norm_target = 0.0;
  Verdict h_norm_verdict = Verdict::inconclusive;
};

HPolarityReport polarity_diagnostic_H(const LevyTriplet& triplet, const std::vector<double>& radii,
                                      const std::vector<Vector>& starts, double beta, double t,
                                      const EstimatorOptions& opts, const PathConfig& cfg);

/// P_t 1_{q_x <= level}(z), expected to equal 1_{q_x <= level}(z).
McEstimate invariant_set_check(const LevyTriplet& triplet, const LyapunovNorm& norm, double level,
                               const Vector& z, double t, const EstimatorOptions& opts);

struct PointCloud {
  std::vector<Vector> points;
  std::vector<double> masses;

  [[nodiscard]] double total() const;
  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] PointCloud scaled(double factor) const;
  /// Index drawn with probability mass/total.
  [[nodiscard]] std::size_t draw(RngStream& rng) const;
};

/// c_λ(M) = λ(R̂_β^M p) with p = U_β f0, for each target on common paths.
/// f0 ≡ 1 gives p ≡ 1/β.
std::vector<McEstimate> capacity(const LevyTriplet& triplet, const PointCloud& lambda,
                                 const std::vector<TargetSet>& targets, double beta,
                                 const EstimatorOptions& opts, const PathConfig& cfg,
                                 const TestFunction& f0 = TestFunction::constant(1.0));

struct BalayageRow {
  std::string set;
  bool inside_M = false;
  McEstimate swept;
  McEstimate original;
  /// swept − original, paired.
  McEstimate difference;
  /// swept <= original on every sample; equality on every sample when inside_M.
  bool per_sample = true;
  Verdict verdict = Verdict::inconclusive;
};

struct BalayageReport {
  std::vector<BalayageRow> rows;
  /// Fraction of paths reaching M before ζ.
  double hit_fraction = 0.0;
  /// Every recorded hit location lies in M.
  bool carrier = true;
  bool vacuous = false;
};

/// ν_M U_β(1_F) against ν U_β(1_F): equality for F ⊆ M, ≤ otherwise. Pathwise
/// (1/β) 1{T_M <= ζ} 1_F(X_ζ) against (1/β) 1_F(X_ζ).
BalayageReport balayage_check(const LevyTriplet& triplet, const PointCloud& nu, const TargetSet& M,
                              double beta, const std::vector<TargetSet>& inside,
                              const std::vector<TargetSet>& outside,
                              const EstimatorOptions& opts, const PathConfig& cfg);

/// Empirical ν_M: hit locations before ζ, each carrying mass/samples.
PointCloud balayage_cloud(const LevyTriplet& triplet, const PointCloud& nu, const TargetSet& M,
                          double beta, std::int64_t samples_per_atom, const StreamKey& key,
                          const PathConfig& cfg);

/// κ U_β(1_B) for each probe, sampling cloud points by mass.
std::vector<McEstimate> cloud_potential(const LevyTriplet& triplet, const PointCloud& kappa,
                                        const std::vector<TargetSet>& probes, double beta,
                                        const EstimatorOptions& opts);

struct DominationRow {
  std::string probe;
  McEstimate mu;
  McEstimate nu;
  Verdict verdict = Verdict::inconclusive;
};

struct DominationReport {
  bool hypothesis = false;
  bool conclusion = false;
  std::vector<DominationRow> inside;
  std::vector<DominationRow> outside;
  std::string status;
};

/// μ U_β <= ν U_β on probes in G (hypothesis) implies the same on probes off G.
DominationReport domination_check(const LevyTriplet& triplet, const PointCloud& mu,
                                  const PointCloud& nu, const TargetSet& G, double beta,
                                  const std::vector<TargetSet>& probes_in,
                                  const std::vector<TargetSet>& probes_out,
                                  const EstimatorOptions& opts);

struct ProjectionConvergence {
  std::vector<Index> ranks;
  std::vector<McEstimate> tails;
  /// t Σ_{k>n} λ_k r_k for jump-free driftless triplets, NaN otherwise.
  std::vector<double> targets;
  std::vector<Verdict> verdicts;
  bool strictly_decreasing = true;
};

/// Ê‖Z_t − P̃_n Z_t‖_E² across ranks, on common samples.
ProjectionConvergence projection_convergence(const SpaceModel& model, const LevyTriplet& triplet,
                                             double t, const std::vector<Index>& ranks,
                                             const EstimatorOptions& opts);

}  // namespace levypot
