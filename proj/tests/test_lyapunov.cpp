#include <doctest.h>

#include <cmath>

#include "levypot/lyapunov.hpp"

using namespace levypot;

namespace {

EstimatorOptions opts(std::string_view label, std::int64_t n) {
  EstimatorOptions o;
  o.samples = n;
  o.key = StreamKey{20261016, 0}.derive(label);
  o.confidence = confidence_for_sigma(3.0);
  return o;
}

Vector random_vector(RngStream& rng, Index dim, double scale) {
  Vector z(dim);
  for (Index k = 0; k < dim; ++k) z(k) = scale * rng.normal();
  return z;
}

}  // namespace

TEST_CASE("subsequence for 4^-n") {
  const auto m = SpaceModel::geometric(32);
  const auto seq = select_subsequence(m);
  REQUIRE(seq.size() >= 2);
  CHECK(seq[0] == 3);
  CHECK(seq[1] == 4);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const double n = static_cast<double>(j + 1);
    CHECK(std::sqrt(m.weight(seq[j] + 1)) <= std::pow(2.0, -n) + 1e-15);
    CHECK(m.tail_sum(seq[j]) <= std::pow(8.0, -n) + 1e-15);
  }
  CHECK_THROWS_AS(select_subsequence(m, 1000), RangeError);
}

TEST_CASE("q_x values") {
  const auto m = SpaceModel::geometric(32);
  const auto levy = LyapunovNorm::levy(m, canonical_carmona(m));
  const auto gauss = LyapunovNorm::gaussian(m, canonical_carmona(m));
  CHECK(levy(Vector::Zero(32)) == 0.0);
  Vector e1 = Vector::Zero(32);
  e1(0) = 1.0;
  CHECK(levy.squared(e1) == doctest::Approx(1.0));
  RngStream rng(StreamKey{5, 5}, 0);
  for (int i = 0; i < 100; ++i) {
    const Vector h = random_vector(rng, 32, 1.0);
    CHECK(gauss(h) <= std::sqrt(3.0) * h.norm() + 1e-12);
    const Vector z = random_vector(rng, 32, 3.0);
    CHECK(e_norm(m, z) <= std::sqrt(2.0) * gauss(z) + 1e-12);
    CHECK(e_norm(m, z) <= levy(z) + 1e-12);
  }
}

TEST_CASE("gaussian lyapunov bounds at a few points") {
  const auto m = SpaceModel::geometric(16);
  const auto norm = LyapunovNorm::gaussian(m, canonical_carmona(m));
  const auto tr = LevyTriplet::unit_gaussian(16);
  const auto M = qx_moment(norm, tr, 1.0, opts("M", 20000));
  RngStream rng(StreamKey{9, 9}, 0);
  for (int i = 0; i < 3; ++i) {
    const Vector z = random_vector(rng, 16, 1.0);
    const double q2 = norm.squared(z);
    const auto v = v0_estimate(norm, tr, z, opts("v0/" + std::to_string(i), 20000));
    CHECK(v.verdict_at_least(q2) == Verdict::pass);
    CHECK(combine(v, 1.0, M, -2.0).verdict_at_most(2.0 * q2) == Verdict::pass);
  }
}

TEST_CASE("translation covariance is an identity of call paths") {
  const auto m = SpaceModel::geometric(8);
  const auto norm = LyapunovNorm::gaussian(m, canonical_carmona(m));
  const auto tr = LevyTriplet::unit_gaussian(8);
  const Vector w = Vector::Constant(8, 0.3);
  const Vector z = Vector::Constant(8, -0.2);
  const auto a = vz_estimate(norm, tr, w, z, opts("tc", 2000));
  const auto b = v0_estimate(norm, tr, z - w, opts("tc", 2000));
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("supermedian check") {
  const auto m = SpaceModel::geometric(8);
  const auto norm = LyapunovNorm::gaussian(m, canonical_carmona(m));
  const auto tr = LevyTriplet::unit_gaussian(8);
  RngStream rng(StreamKey{3, 3}, 0);
  std::vector<Vector> zs{Vector::Zero(8), random_vector(rng, 8, 1.0)};
  for (double t : {0.1, 1.0, 5.0})
    for (const auto& row : supermedian_check(norm, tr, t, zs, opts("sm", 5000))) CHECK(row.verdict == Verdict::pass);
  const auto jumpy = LevyTriplet::poisson_example(8);
  CHECK_THROWS_AS(supermedian_check(norm, jumpy, 1.0, zs, opts("sm", 500)), PreconditionError);
}

TEST_CASE("membership of E_x") {
  auto norm_at = [](Index n) {
    const auto m = SpaceModel::geometric(n);
    return LyapunovNorm::levy(m, canonical_carmona(m));
  };
  const std::vector<Index> dims{8, 16, 32};
  auto in_h = [](Index n) {
    Vector z(n);
    for (Index k = 0; k < n; ++k) z(k) = std::pow(0.5, static_cast<double>(k));
    return z;
  };
  CHECK(membership_Ex(norm_at, in_h, dims).verdict == Membership::inside);
  CHECK(membership_Ex(norm_at, [](Index n) { return Vector(Vector::Zero(n)); }, dims).verdict == Membership::inside);
  auto x_at = [](Index n) { return canonical_point(SpaceModel::geometric(n)); };
  const auto out = membership_Ex(norm_at, x_at, dims);
  CHECK(out.verdict == Membership::outside);
  CHECK(to_string(out.verdict) == "not in E_x");
}

TEST_CASE("levy weights require summability") {
  const auto m = SpaceModel::geometric(8);
  Vector alpha = Vector::Ones(8);
  alpha(3) = 0.5;
  CHECK_THROWS_AS(LyapunovNorm::levy(m, canonical_carmona(m), alpha), ArgumentError);
}
