#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levypot/measures.hpp"

namespace levypot {

/// m_1 < ... < m_J with sqrt(λ_{m_n+1}) <= 2^{-n} and Σ_{k>m_n} λ_k <= 8^{-n}.
/// `depth` = 0 asks for the longest sequence the truncation permits.
std::vector<Index> select_subsequence(const SpaceModel& model, Index depth = 0);

enum class LyapunovKind { gaussian, levy };

std::string_view to_string(LyapunovKind kind);

/// q_x(z)² = Σ_k w_k c_k² + (Σ_{n≤K} 2^{-n/2} |<e^x_n, z>|)².
///
/// Levy kind: w_k = α_k λ_k. Gaussian kind: w_k = 2^j λ_k on the j-th segment
/// (m_j, m_{j+1}] of the subsequence (m_0 = 0, last segment ends at N), which is
/// Σ_j 2^j ‖Q̃_{j+1}z − Q̃_j z‖² with Q̃_j = P̃_{m_j}.
class LyapunovNorm {
 public:
  static LyapunovNorm gaussian(const SpaceModel& model, CarmonaDatum<double> carmona,
                               Index depth = 0);
  /// Default α_n = 2^n when `alpha` is empty.
  static LyapunovNorm levy(const SpaceModel& model, CarmonaDatum<double> carmona,
                           Vector alpha = {});

  [[nodiscard]] LyapunovKind kind() const { return kind_; }
  [[nodiscard]] Index dim() const { return weights_.size(); }
  [[nodiscard]] const Vector& weights() const { return weights_; }
  [[nodiscard]] const Vector& alpha() const { return alpha_; }
  [[nodiscard]] const std::vector<Index>& subsequence() const { return subsequence_; }
  [[nodiscard]] const CarmonaDatum<double>& carmona() const { return carmona_; }
  /// 2^{-n/2}, n = 1..K.
  [[nodiscard]] const Vector& pairing_weights() const { return pairing_weights_; }

  template <typename Derived>
  typename Derived::Scalar squared(const Eigen::MatrixBase<Derived>& z) const {
    using Scalar = typename Derived::Scalar;
    const Scalar quad = (weights_.template cast<Scalar>().array() * z.array().square()).sum();
    const Scalar g = (pairing_weights_.template cast<Scalar>().array() *
                      (carmona_.basis.template cast<Scalar>().transpose() * z).array().abs())
                         .sum();
    return quad + g * g;
  }

  template <typename Derived>
  typename Derived::Scalar operator()(const Eigen::MatrixBase<Derived>& z) const {
    using std::sqrt;
    return sqrt(squared(z));
  }

  /// Largest |c_n| inside {q_x <= c}: c / sqrt(w_n).
  [[nodiscard]] Vector coordinate_box(double c) const;

 private:
  LyapunovNorm(LyapunovKind kind, Vector weights, Vector alpha, std::vector<Index> subsequence,
               CarmonaDatum<double> carmona);

  LyapunovKind kind_;
  Vector weights_;
  Vector alpha_;
  std::vector<Index> subsequence_;
  CarmonaDatum<double> carmona_;
  Vector pairing_weights_;
};

/// Canonical datum for the model: x_n = 2^{n/2} with its block basis.
CarmonaDatum<double> canonical_carmona(const SpaceModel& model);

/// v_0^x(z) = U_1 q_x²(z) = E q_x²(z + Z_T), T ~ Exp(1).
McEstimate v0_estimate(const LyapunovNorm& norm, const LevyTriplet& triplet, const Vector& z,
                       const EstimatorOptions& opts);

/// v_w^x(z) = v_0^x(z − w), by the same estimator.
McEstimate vz_estimate(const LyapunovNorm& norm, const LevyTriplet& triplet, const Vector& w,
                       const Vector& z, const EstimatorOptions& opts);

/// M = ∫ q_x² dν_t.
McEstimate qx_moment(const LyapunovNorm& norm, const LevyTriplet& triplet, double t,
                     const EstimatorOptions& opts);

struct MomentBound {
  double c_tilde = 0.0;
  std::vector<double> t_grid;
  std::vector<McEstimate> moments;
};

/// C̃ = max over t of Ê∫q_x² dν_t / (1 + t²).
MomentBound qx_moment_bound(const LyapunovNorm& norm, const LevyTriplet& triplet,
                            const std::vector<double>& t_grid, const EstimatorOptions& opts);

struct SupermedianRow {
  Vector z;
  double q2 = 0.0;
  /// Ê[q_x²(z + Z_t)] − q_x²(z), paired.
  McEstimate excess;
  Verdict verdict = Verdict::inconclusive;
};

/// P_t q_x² >= q_x², checked per start. Only for the unit Gaussian triplet.
std::vector<SupermedianRow> supermedian_check(const LyapunovNorm& norm, const LevyTriplet& triplet,
                                              double t, const std::vector<Vector>& z_set,
                                              const EstimatorOptions& opts);

enum class Membership { inside, outside, inconclusive };

std::string_view to_string(Membership m);

struct MembershipReport {
  std::vector<Index> dims;
  std::vector<double> values;
  Membership verdict = Membership::inconclusive;
};

/// Growth of q_x(z) over truncations. Growth by a factor >= 1.5 per doubling of N
/// means outside E_x; relative growth below `flat_tol` means inside.
MembershipReport membership_Ex(const std::function<LyapunovNorm(Index)>& norm_at,
                               const std::function<Vector(Index)>& z_at,
                               const std::vector<Index>& dims, double flat_tol = 1e-3);

}  // namespace levypot
