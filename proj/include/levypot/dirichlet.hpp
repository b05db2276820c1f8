#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levypot/potential.hpp"

namespace levypot {

/// Open domain V with an inscribed-ball radius measured in H.
class Domain {
 public:
  enum class Kind { e_ball, slab, halfspaces, box };

  /// ‖z − center‖_E < r.
  static Domain e_ball(const SpaceModel& model, Vector center, double r);
  /// a < c_k < b on coordinate k (1-based).
  static Domain slab(const SpaceModel& model, Index k, double a, double b);
  /// <ξ_i, z> < c_i for all i.
  static Domain halfspaces(const SpaceModel& model, std::vector<Vector> normals,
                           std::vector<double> levels);
  /// lo_k < c_k < hi_k; infinite bounds allowed.
  static Domain box(const SpaceModel& model, Vector lo, Vector hi);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool contains(const Vector& z) const;
  /// Radius of an H-ball around z inside V; <= 0 outside.
  [[nodiscard]] double boundary_distance(const Vector& z) const;
  /// Nearest boundary point along the active constraint.
  [[nodiscard]] Vector project_to_boundary(const Vector& z) const;
  /// Closure of the E-ball B_r(x) lies in V.
  [[nodiscard]] bool contains_e_ball(const Vector& x, double r) const;
  [[nodiscard]] std::string regularity_note() const;
  [[nodiscard]] std::string describe() const;

 private:
  Kind kind_ = Kind::e_ball;
  Vector weights_;
  Vector center_;
  double radius_ = 0.0;
  Index coord_ = 0;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<Vector> normals_;
  std::vector<double> levels_;
  Vector lo_;
  Vector hi_;
};

enum class BoundaryClass { bounded_continuous, bounded_borel, l1_positive };

/// f on ∂V, tolerant of points in a collar and, for jump exits, outside V.
struct BoundaryData {
  std::string name;
  std::function<double(const Vector&)> f;
  double bound = std::numeric_limits<double>::infinity();
  BoundaryClass cls = BoundaryClass::bounded_continuous;

  double operator()(const Vector& z) const { return f(z); }
  [[nodiscard]] bool bounded() const { return std::isfinite(bound); }

  static BoundaryData constant(double c);
  /// <ξ, z> + offset, bounded by `bound` on the domain of interest.
  static BoundaryData linear(Vector xi, double offset, double bound);
  /// 1 where <ξ, z> > c.
  static BoundaryData indicator(Vector xi, double c);
};

enum class DirichletMethod { automatic, walk_on_spheres, time_stepping };

struct DirichletConfig {
  PathConfig path{0.01, 50.0, true};
  /// Walk-on-spheres stops within this H-distance of ∂V.
  double shell = 1e-4;
  bool antithetic = true;
  double max_non_exit = 0.01;
  DirichletMethod method = DirichletMethod::automatic;
};

struct ExitSample {
  bool exited = false;
  Vector location;
  double time = 0.0;
};

/// One exit location from V started at z. Walk-on-spheres for isotropic
/// driftless jump-free triplets, time stepping otherwise.
ExitSample sample_exit(const LevyTriplet& triplet, const Domain& V, const Vector& z,
                       const DirichletConfig& cfg, RngStream& rng);

struct SolveResult {
  McEstimate value;
  double non_exit_fraction = 0.0;
  bool flagged = false;
  std::string method;
};

/// H^V f(z) = E[f(X_{T_{E∖V}}) ; T < ∞].
SolveResult solve(const LevyTriplet& triplet, const Domain& V, const BoundaryData& f,
                  const Vector& z, const EstimatorOptions& opts, const DirichletConfig& cfg);

/// x_k = y + 2^{-k}(x0 − y), k = 1..count.
std::vector<Vector> geometric_ray(const Vector& y, const Vector& x0, int count = 8);

struct ContinuityReport {
  std::vector<Vector> points;
  std::vector<McEstimate> values;
  std::vector<double> gaps;
  double target = 0.0;
  bool decreasing = false;
  bool final_close = false;
  bool pass = false;
};

/// H^V f(x_k) → f(y) along a geometric ray from x0 to y ∈ ∂V.
ContinuityReport boundary_continuity_check(const LevyTriplet& triplet, const Domain& V,
                                           const BoundaryData& f, const Vector& y,
                                           const Vector& x0, const EstimatorOptions& opts,
                                           const DirichletConfig& cfg, int count = 8,
                                           double allowance = 0.0);

struct HarmonicityRow {
  double radius;
  McEstimate two_stage;
  McEstimate direct;
  Verdict verdict;
};

/// H^{B_r(x)} H^V f(x) against H^V f(x) for each radius.
std::vector<HarmonicityRow> harmonicity_check(const LevyTriplet& triplet, const SpaceModel& model,
                                              const Domain& V, const BoundaryData& f,
                                              const Vector& x, const std::vector<double>& radii,
                                              const EstimatorOptions& opts,
                                              const DirichletConfig& cfg);

struct L1Result {
  /// H^V f at the cloud points.
  std::vector<McEstimate> h;
  /// λ(H^V f) − λ(H^V f_m) per ladder level.
  std::vector<double> gaps;
  /// Ladder levels m_j with gap <= 2^{-j} · first gap.
  std::vector<std::size_t> chosen;
  /// k = Σ_j H^V(f − f_{m_j}) at the cloud points.
  std::vector<McEstimate> k;
};

/// Control for f = sup_m f_m in L¹₊(λ): evaluates the ladder on common exits.
L1Result solve_l1(const LevyTriplet& triplet, const Domain& V, const BoundaryData& f,
                  const std::vector<BoundaryData>& ladder, const PointCloud& lambda,
                  const EstimatorOptions& opts, const DirichletConfig& cfg);

/// k(x) = Σ_j H^V(f − f_{m_j})(x) for a chosen subsequence.
McEstimate l1_control(const LevyTriplet& triplet, const Domain& V, const BoundaryData& f,
                      const std::vector<BoundaryData>& ladder,
                      const std::vector<std::size_t>& chosen, const Vector& x,
                      const EstimatorOptions& opts, const DirichletConfig& cfg);

struct ApproachSequence {
  std::string id;
  Vector y;
  std::vector<Vector> points;
};

struct ControlOptions {
  std::size_t tail = 3;
  double tol = 0.05;
  double ratio_tol = 0.05;
  double cap = 1e12;
  double boundary_tol = 1e-9;
};

struct ControlRecord {
  std::string id;
  Vector y;
  std::vector<McEstimate> h;
  std::vector<double> k;
  double limsup_k = 0.0;
  std::string branch;
  bool pass = false;
};

struct ControlReport {
  std::vector<ControlRecord> records;
  /// Points where k exceeds the cap: the empirical high-k region.
  std::vector<Vector> high_k;
  [[nodiscard]] bool all_pass() const;
};

/// Tail-window limsup of k: infinite when the window increases with last/first >= 2
/// or any value reaches the cap.
double tail_limsup(const std::vector<double>& k, std::size_t tail, double cap);

/// Branch c1 (finite limsup k): h → f(y). Branch c2: h/(1+k) → 0.
ControlReport controlled_convergence_check(const std::function<McEstimate(const Vector&)>& h,
                                           const std::function<double(const Vector&)>& f,
                                           const std::function<double(const Vector&)>& k,
                                           const Domain& V,
                                           const std::function<bool(const Vector&)>& V0,
                                           const std::vector<ApproachSequence>& sequences,
                                           const ControlOptions& options = {});

}  // namespace levypot
