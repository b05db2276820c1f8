#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "levypot/errors.hpp"

namespace levypot {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Truncated Hilbert-Schmidt triple E' ⊂ H ⊂ E.
///
/// Points are stored by their pairing coordinates c_n = <e_n, z> against the
/// H-orthonormal basis e_n ⊂ E'. With weights λ_n the three geometries are
///   |z|_H^2 = Σ c_n^2,   ‖z‖_E^2 = Σ λ_n c_n^2,   <ξ, z> = Σ ξ_n c_n,
/// where an element ξ of E' is given by its H-coordinates.
template <typename Scalar>
class BasicSpaceModel {
 public:
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  enum class Generator { geometric, sobolev, explicit_weights };

  /// λ_n = ratio^n, n = 1..dim. The default ratio 1/4 gives λ_n = 4^{-n}.
  static BasicSpaceModel geometric(Index dim, Scalar ratio = Scalar(0.25)) {
    if (!(ratio > 0 && ratio < 1)) throw ArgumentError("geometric weight ratio must lie in (0,1)");
    VectorType w(check_dim(dim));
    Scalar v = 1;
    for (Index n = 0; n < dim; ++n) {
      v *= ratio;
      w(n) = v;
    }
    return BasicSpaceModel(std::move(w), Generator::geometric, ratio);
  }

  /// λ_n = 1/(1 + n²π²): E = H^{-1}(0,1), H = L^2(0,1), e_n(u) = √2 sin(nπu).
  static BasicSpaceModel sobolev(Index dim) {
    VectorType w(check_dim(dim));
    for (Index n = 1; n <= dim; ++n) {
      const Scalar npi = Scalar(n) * std::numbers::pi_v<Scalar>;
      w(n - 1) = Scalar(1) / (Scalar(1) + npi * npi);
    }
    return BasicSpaceModel(std::move(w), Generator::sobolev, Scalar(0));
  }

  static BasicSpaceModel from_weights(VectorType weights) {
    check_dim(weights.size());
    for (Index n = 0; n < weights.size(); ++n) {
      if (!(weights(n) > 0)) throw ArgumentError("weights must be strictly positive");
      if (n > 0 && weights(n) > weights(n - 1)) throw ArgumentError("weights must be nonincreasing");
    }
    return BasicSpaceModel(std::move(weights), Generator::explicit_weights, Scalar(0));
  }

  [[nodiscard]] Index dim() const { return weights_.size(); }
  [[nodiscard]] const VectorType& weights() const { return weights_; }
  /// λ_n for 1-based n.
  [[nodiscard]] Scalar weight(Index n) const { return weights_(n - 1); }
  [[nodiscard]] Generator generator() const { return generator_; }
  [[nodiscard]] Scalar ratio() const { return ratio_; }

  /// Σ_{k>m} λ_k over the generating sequence (not only the truncation) when the
  /// generator is known; an upper bound for the Sobolev sequence.
  [[nodiscard]] Scalar tail_sum(Index m) const {
    switch (generator_) {
      case Generator::geometric:
        return std::pow(ratio_, Scalar(m + 1)) / (Scalar(1) - ratio_);
      case Generator::sobolev: {
        Scalar s = 0;
        for (Index k = m + 1; k <= dim(); ++k) s += weight(k);
        const Scalar pi2 = std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
        return s + Scalar(1) / (pi2 * Scalar(std::max<Index>(dim(), m)));
      }
      case Generator::explicit_weights:
        break;
    }
    Scalar s = 0;
    for (Index k = m + 1; k <= dim(); ++k) s += weight(k);
    return s;
  }

  /// The first n coordinates as a model of their own (the image of P̃_n).
  [[nodiscard]] BasicSpaceModel truncated(Index n) const {
    if (n < 1 || n > dim()) throw ArgumentError("projection rank out of range");
    return BasicSpaceModel(weights_.head(n), generator_, ratio_);
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    switch (generator_) {
      case Generator::geometric:
        os << "geometric(" << ratio_ << ")";
        break;
      case Generator::sobolev:
        os << "sobolev";
        break;
      case Generator::explicit_weights:
        os << "explicit";
        break;
    }
    os << " dim=" << dim();
    return os.str();
  }

 private:
  BasicSpaceModel(VectorType w, Generator g, Scalar ratio)
      : weights_(std::move(w)), generator_(g), ratio_(ratio) {}

  static Index check_dim(Index dim) {
    if (dim < 1) throw ArgumentError("truncation dimension must be positive");
    return dim;
  }

  VectorType weights_;
  Generator generator_;
  Scalar ratio_;
};

using SpaceModel = BasicSpaceModel<double>;

/// P̃_n z: zero all coordinates beyond n.
template <typename Scalar, typename Derived>
auto project(const BasicSpaceModel<Scalar>& model, Index n, const Eigen::MatrixBase<Derived>& z) {
  if (n < 1 || n > model.dim()) throw ArgumentError("projection rank out of range [1, N]");
  typename BasicSpaceModel<Scalar>::VectorType out = z;
  out.tail(model.dim() - n).setZero();
  return out;
}

template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar e_inner(const BasicSpaceModel<Scalar>& model, const Eigen::MatrixBase<DerivedA>& a,
               const Eigen::MatrixBase<DerivedB>& b) {
  return (model.weights().array() * a.array() * b.array()).sum();
}

template <typename Scalar, typename Derived>
Scalar e_norm(const BasicSpaceModel<Scalar>& model, const Eigen::MatrixBase<Derived>& z) {
  return std::sqrt(e_inner(model, z, z));
}

template <typename Derived>
typename Derived::Scalar h_norm(const Eigen::MatrixBase<Derived>& z) {
  return z.norm();
}

/// <ξ, z> for ξ ∈ E' given in H-coordinates.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pairing(const Eigen::MatrixBase<DerivedA>& xi,
                                  const Eigen::MatrixBase<DerivedB>& z) {
  return xi.dot(z);
}

template <typename Scalar>
struct Norms {
  Scalar e;
  Scalar h;
};

template <typename Scalar, typename Derived>
Norms<Scalar> norms(const BasicSpaceModel<Scalar>& model, const Eigen::MatrixBase<Derived>& z) {
  return {e_norm(model, z), h_norm(z)};
}

/// Canonical point off H: c_n = 2^{n/2}. Lies in E whenever Σ λ_n 2^n < ∞.
template <typename Scalar>
typename BasicSpaceModel<Scalar>::VectorType canonical_point(const BasicSpaceModel<Scalar>& model) {
  typename BasicSpaceModel<Scalar>::VectorType x(model.dim());
  for (Index n = 1; n <= model.dim(); ++n) x(n - 1) = std::pow(Scalar(2), Scalar(n) / 2);
  return x;
}

/// Threshold on |P̃_N x|_H^2 certifying "off H" for the canonical point.
template <typename Scalar>
Scalar canonical_offh_threshold(Index dim) {
  return std::pow(Scalar(2), Scalar(dim)) / 2;
}

/// Threshold used for user-supplied points.
inline constexpr double kUserOffHThreshold = 100.0;

/// Distinguished point x ∉ H with an orthonormal family e^x_1..e^x_K satisfying
/// <e^x_n, x> >= 2^{n/2}. Columns of `basis` are H-coordinates of e^x_n.
template <typename Scalar>
struct CarmonaDatum {
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  VectorType x;
  MatrixType basis;
  VectorType growth;

  [[nodiscard]] Index size() const { return basis.cols(); }
};

/// Block construction of the off-H basis. Coordinates are consumed left to
/// right; block n is the shortest run whose H-mass of x reaches 2^{n/2}, and
/// e^x_n is the normalized restriction of x to that block, so
/// <e^x_n, x> = |x restricted to block n|_H. Blocks are disjoint, hence the
/// family is H-orthonormal. Stops at the largest K with a complete block.
template <typename Scalar, typename Derived>
CarmonaDatum<Scalar> build_carmona_basis(const BasicSpaceModel<Scalar>& model,
                                         const Eigen::MatrixBase<Derived>& x,
                                         Scalar threshold = Scalar(kUserOffHThreshold)) {
  const Index dim = model.dim();
  if (x.size() != dim) throw ArgumentError("point dimension does not match the model");
  const Scalar h2 = x.squaredNorm();
  if (h2 < threshold) {
    std::ostringstream os;
    os << "x is not certified off H at truncation " << dim << ": |P_N x|_H^2 = " << h2
       << " < " << threshold;
    throw ConstructionError(os.str());
  }
  std::vector<std::pair<Index, Index>> blocks;
  std::vector<Scalar> growth;
  Index start = 0;
  while (start < dim) {
    const Scalar required = std::pow(Scalar(2), Scalar(blocks.size() + 1) / 2);
    Scalar mass = 0;
    Index end = start;
    while (end < dim && std::sqrt(mass) < required) {
      mass += x(end) * x(end);
      ++end;
    }
    if (std::sqrt(mass) < required) break;
    blocks.emplace_back(start, end);
    growth.push_back(std::sqrt(mass));
    start = end;
  }
  if (blocks.empty()) {
    std::ostringstream os;
    os << "no off-H basis: the first growth bound <e_1^x, x> >= 2^(1/2) is unreachable, "
          "|x|_H = "
       << std::sqrt(h2);
    throw ConstructionError(os.str());
  }
  CarmonaDatum<Scalar> datum;
  datum.x = x;
  datum.basis = CarmonaDatum<Scalar>::MatrixType::Zero(dim, static_cast<Index>(blocks.size()));
  datum.growth.resize(static_cast<Index>(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto [b, e] = blocks[k];
    const auto col = static_cast<Index>(k);
    datum.basis.col(col).segment(b, e - b) = x.segment(b, e - b) / growth[k];
    datum.growth(col) = growth[k];
  }
  return datum;
}

}  // namespace levypot
