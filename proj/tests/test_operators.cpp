#include <doctest.h>

#include <cmath>

#include "levypot/operators.hpp"

using namespace levypot;

namespace {

EstimatorOptions opts(std::string_view label, std::int64_t n) {
  EstimatorOptions o;
  o.samples = n;
  o.key = StreamKey{20261016, 0}.derive(label);
  o.confidence = confidence_for_sigma(3.0);
  return o;
}

}  // namespace

TEST_CASE("constants are preserved exactly") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  const Vector z = Vector::Constant(8, 0.4);
  const auto p = apply_Pt(tr, TestFunction::constant(1.0), 2.0, z, opts("pt1", 1000));
  CHECK(p.mean == 1.0);
  CHECK(p.std_error == 0.0);
  const auto u = apply_Ualpha(tr, TestFunction::constant(3.0), 2.0, z, opts("u1", 1000));
  CHECK(u.mean == doctest::Approx(1.5));
  CHECK(u.std_error == 0.0);
}

TEST_CASE("semigroup on a squared pairing") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  Vector e1 = Vector::Zero(8);
  e1(0) = 1.0;
  const Vector z = Vector::Constant(8, 0.7);
  const auto p = apply_Pt(tr, TestFunction::coordinate_square(e1), 1.5, z, opts("pt2", 20000));
  CHECK(p.verdict(1.5 + 0.49) == Verdict::pass);
}

TEST_CASE("translations commute with the semigroup") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  const auto f = TestFunction::indicator_ball(SpaceModel::geometric(8), Vector::Zero(8), 0.5);
  const Vector w = Vector::Constant(8, 0.1);
  const Vector z = Vector::Constant(8, -0.3);
  const auto a = apply_Pt(tr, f.translated(w), 1.0, z, opts("tr", 3000));
  const auto b = apply_Pt(tr, f, 1.0, z + w, opts("tr", 3000));
  CHECK(a.mean == b.mean);
}

TEST_CASE("resolvent equation") {
  const auto tr = LevyTriplet::unit_gaussian(3);
  const auto f = TestFunction::cylinder(
      2, [](const Vector& y) { return 1.0 / (1.0 + y.squaredNorm()); }, 1.0);
  const Vector z = Vector::Zero(3);
  const double a = 1.0;
  const double b = 2.0;
  const auto ua = apply_Ualpha(tr, f, a, z, opts("ra", 200000));
  const auto ub = apply_Ualpha(tr, f, b, z, opts("rb", 200000));
  const auto nested = apply_UbetaUalpha(tr, f, b, a, z, opts("rab", 200000));
  // U_a f − U_b f = (b − a) U_b U_a f
  const auto lhs = combine(ua, 1.0, ub, -1.0);
  CHECK(combine(lhs, 1.0, nested, -(b - a)).verdict(0.0) == Verdict::pass);
}

TEST_CASE("cylinder functions reduce to n dimensions") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  const auto f = TestFunction::cylinder(
      2, [](const Vector& y) { return std::exp(-y.squaredNorm()); }, 1.0);
  const Vector z = Vector::Constant(8, 0.25);
  const auto full = apply_Ualpha(tr, f, 1.0, z, opts("cf", 20000));
  const auto small = apply_Ualpha(project(tr, 2), f, 1.0, Vector(z.head(2)), opts("cs", 20000));
  CHECK(combine(full, 1.0, small, -1.0).verdict(0.0) == Verdict::pass);
}

TEST_CASE("supermedian transfer") {
  const auto tr = LevyTriplet::unit_gaussian(6);
  const std::vector<Vector> zs{Vector::Constant(6, 0.2), Vector::Zero(6)};
  const auto one = supermedian_transfer_check(tr, TestFunction::constant(1.0), 3, 1.0, {0.5, 1.0, 4.0}, zs,
                                              opts("st1", 1000));
  for (const auto& r : one.rows) CHECK(r.verdict == Verdict::pass);
  CHECK(one.monotone_in_alpha);
  const auto newton = supermedian_transfer_check(tr, TestFunction::newton_truncated(), 3, 1.0, {0.5, 2.0}, zs,
                                                 opts("st2", 20000));
  for (const auto& r : newton.rows) CHECK(r.verdict == Verdict::pass);
  const auto sub = supermedian_transfer_check(tr, TestFunction::capped_square(3, 100.0), 3, 0.1, {1.0}, zs,
                                              opts("st3", 20000));
  bool some_fail = false;
  for (const auto& r : sub.rows) some_fail = some_fail || r.verdict == Verdict::fail;
  CHECK(some_fail);
  CHECK_THROWS_AS(supermedian_transfer_check(tr, TestFunction::coordinate_square(Vector::Ones(6)), 3, 1.0, {1.0},
                                             zs, opts("st4", 100)),
                  ArgumentError);
}

TEST_CASE("bounded test functions reject out-of-bound values") {
  const auto f = TestFunction::cylinder(1, [](const Vector& y) { return y(0); }, 1.0);
  CHECK_THROWS(f(Vector::Constant(2, 5.0)));
}
