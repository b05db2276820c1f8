#include <doctest.h>

#include <cmath>

#include "levypot/estimate.hpp"
#include "levypot/space_model.hpp"

using namespace levypot;

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::encrypt(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::encrypt(C{~0u, ~0u, ~0u, ~0u}, K{~0u, ~0u}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::encrypt(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  const StreamKey key{42, 0};
  RngStream a(key, 3), b(key, 3), c(key, 4), d(key.derive("other"), 3);
  const double xa = a.uniform();
  CHECK(xa == b.uniform());
  CHECK(xa != c.uniform());
  CHECK(xa != d.uniform());
  RngStream e(key, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = e.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("verdict bands") {
  const McEstimate e{1.0, 0.1, 1000, confidence_for_sigma(3.0)};
  CHECK(e.z() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(e.verdict(1.0) == Verdict::pass);
  CHECK(e.verdict(1.25) == Verdict::pass);
  CHECK(e.verdict(1.5) == Verdict::inconclusive);
  CHECK(e.verdict(2.0) == Verdict::fail);
  CHECK(e.verdict_at_most(0.8) == Verdict::pass);
  CHECK(e.verdict_at_most(-0.5) == Verdict::fail);
  CHECK(e.verdict_at_least(1.2) == Verdict::pass);
  CHECK(e.verdict_at_least(2.5) == Verdict::fail);
  CHECK(z_for_confidence(0.95) == doctest::Approx(1.959964).epsilon(1e-5));
}

TEST_CASE("estimates do not depend on thread count") {
  EstimatorOptions opts;
  opts.samples = 5000;
  opts.key = StreamKey{7, 1};
  auto draw = [](RngStream& rng) { return rng.normal() + rng.exponential(2.0); };
  set_num_threads(1);
  const auto one = estimate(opts, draw);
  set_num_threads(3);
  const auto three = estimate(opts, draw);
  set_num_threads(1);
  CHECK(one.mean == three.mean);
  CHECK(one.std_error == three.std_error);
  CHECK(one.mean == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("accumulator merge matches sequential") {
  Accumulator all, left, right;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i) * 3 + i * 0.01;
    all.add(x);
    (i < 37 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.count() == all.count());
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("projection") {
  const auto m = SpaceModel::geometric(3);
  const Vector z = (Vector(3) << 3, 5, 7).finished();
  CHECK(project(m, 3, z) == z);
  CHECK(project(m, 1, z) == (Vector(3) << 3, 0, 0).finished());
  for (Index a = 1; a <= 3; ++a)
    for (Index b = a; b <= 3; ++b) CHECK(project(m, b, project(m, a, z)) == project(m, a, z));
  CHECK_THROWS_AS(project(m, 4, z), ArgumentError);
}

TEST_CASE("norms") {
  const auto m = SpaceModel::geometric(32);
  const auto zero = norms(m, Vector::Zero(32));
  CHECK(zero.e == 0.0);
  CHECK(zero.h == 0.0);
  Vector e1 = Vector::Zero(32);
  e1(0) = 1;
  const auto n1 = norms(m, e1);
  CHECK(n1.e == doctest::Approx(0.5));
  CHECK(n1.h == doctest::Approx(1.0));
  const Vector x = canonical_point(m);
  // Σ_{n≤32} 2^{-n} and Σ 2^n
  CHECK(std::pow(e_norm(m, x), 2) == doctest::Approx(1.0 - std::ldexp(1.0, -32)));
  CHECK(std::pow(h_norm(x), 2) == doctest::Approx(std::ldexp(1.0, 33) - 2.0));
}

TEST_CASE("scalar templating") {
  const auto mf = BasicSpaceModel<float>::geometric(4);
  Eigen::VectorXf z = Eigen::VectorXf::Ones(4);
  CHECK(e_norm(mf, z) == doctest::Approx(std::sqrt((1.0 - std::pow(0.25, 4)) / 3.0)).epsilon(1e-6));
}

TEST_CASE("model tails") {
  const auto g = SpaceModel::geometric(32);
  CHECK(g.tail_sum(4) == doctest::Approx(std::pow(0.25, 5) / 0.75));
  const auto s = SpaceModel::sobolev(32);
  CHECK(s.weight(1) == doctest::Approx(1.0 / (1.0 + M_PI * M_PI)));
  CHECK_THROWS_AS(SpaceModel::from_weights((Vector(2) << 1.0, 2.0).finished()), ArgumentError);
  CHECK_THROWS_AS(SpaceModel::from_weights((Vector(2) << 1.0, -1.0).finished()), ArgumentError);
}

TEST_CASE("carmona basis") {
  const auto m = SpaceModel::geometric(32);
  const auto d = build_carmona_basis(m, canonical_point(m));
  CHECK(d.size() >= 1);
  for (Index k = 0; k < d.basis.cols(); ++k) {
    CHECK(d.basis.col(k).norm() == doctest::Approx(1.0));
    CHECK(d.basis.col(k).dot(canonical_point(m)) >= std::pow(2.0, (k + 1) / 2.0) - 1e-9);
  }
  Vector small = Vector::Zero(32);
  small(0) = 0.9;
  CHECK_THROWS_AS(build_carmona_basis(m, small), ConstructionError);
  Index prev = 0;
  for (Index n : {8, 16, 32}) {
    const auto mn = SpaceModel::geometric(n);
    const auto dn = build_carmona_basis(mn, canonical_point(mn), canonical_offh_threshold<double>(n));
    CHECK(dn.size() >= prev);
    prev = dn.size();
  }
}
