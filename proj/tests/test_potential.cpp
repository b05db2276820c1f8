#include <doctest.h>

#include <cmath>
#include <memory>

#include "levypot/potential.hpp"

using namespace levypot;

namespace {

EstimatorOptions opts(std::string_view label, std::int64_t n) {
  EstimatorOptions o;
  o.samples = n;
  o.key = StreamKey{20261016, 0}.derive(label);
  o.confidence = confidence_for_sigma(3.0);
  return o;
}

Vector e(Index k, Index dim) {
  Vector v = Vector::Zero(dim);
  v(k - 1) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("trivial hits") {
  const auto tr = LevyTriplet::unit_gaussian(4);
  const PathConfig cfg;
  RngStream rng(StreamKey{1, 1}, 0);
  const auto all = simulate_to_hit(tr, Vector::Zero(4), TargetSet::everything(), cfg, rng);
  CHECK(all.hit);
  CHECK(all.time == 0.0);
  const auto inside = simulate_to_hit(tr, Vector::Zero(4), TargetSet::h_ball(Vector::Zero(4), 1.0), cfg, rng);
  CHECK(inside.hit);
  CHECK(inside.time == 0.0);
}

TEST_CASE("gambler's ruin exit side") {
  const auto tr = LevyTriplet::unit_gaussian(1);
  const PathConfig cfg{0.001, 50.0, true};
  const double a = -1.0, b = 2.0, x = 0.5;
  const auto outside = TargetSet::set_union({TargetSet::halfspace(e(1, 1), b), TargetSet::halfspace(-e(1, 1), -a)});
  const auto p = estimate(opts("gr", 4000), [&](RngStream& rng) {
    const auto hit = simulate_to_hit(tr, Vector::Constant(1, x), outside, cfg, rng);
    return hit.hit && hit.location(0) > x ? 1.0 : 0.0;
  });
  CHECK(p.verdict((x - a) / (b - a)) == Verdict::pass);
}

TEST_CASE("reduced function conventions") {
  const auto tr = LevyTriplet::unit_gaussian(4);
  const PathConfig cfg;
  const auto all = reduced_function(tr, TestFunction::constant(1.0), TargetSet::everything(), 1.0, Vector::Zero(4),
                                    opts("rf", 500), cfg);
  CHECK(all.mean == 1.0);
  const auto drift_away = LevyTriplet{(Vector(4) << -5.0, 0, 0, 0).finished(), Vector::Zero(4), JumpMeasure::none()};
  const auto far = reduced_function(drift_away, TestFunction::constant(1.0), TargetSet::halfspace(e(1, 4), 3.0),
                                    1.0, Vector::Zero(4), opts("rf2", 500), cfg);
  CHECK(far.verdict_at_most(horizon_bias(TestFunction::constant(1.0), 1.0, cfg)) == Verdict::pass);
  CHECK_THROWS_AS(reduced_function(tr, TestFunction::constant(1.0), TargetSet::everything(), 0.0, Vector::Zero(4),
                                   opts("rf3", 500), cfg),
                  PreconditionError);
}

TEST_CASE("projection inequality on a halfspace") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  const auto r = projection_inequality(tr, TestFunction::newton_truncated(), TargetSet::halfspace(e(1, 8), 1.0), 3,
                                       1.0, Vector::Zero(8), opts("pi", 3000), PathConfig{});
  CHECK(r.verdict == Verdict::pass);
}

TEST_CASE("point polarity diagnostics") {
  const auto iso = SpaceModel::from_weights(Vector::Ones(2));
  const PathConfig cfg{1e-4, 20.0, true};
  const Vector y = (Vector(2) << 0.3, 0.0).finished();
  const std::vector<Vector> starts{Vector::Zero(2)};
  const auto two = polarity_diagnostic_point(iso, LevyTriplet::unit_gaussian(2), y, {0.1, 0.05, 0.025}, starts, 1.0,
                                             opts("pp2", 2000), cfg);
  CHECK(two.monotone);
  CHECK(two.consistent);
  const auto iso1 = SpaceModel::from_weights(Vector::Ones(1));
  const auto one = polarity_diagnostic_point(iso1, LevyTriplet::unit_gaussian(1), Vector::Constant(1, 0.3),
                                             {0.1, 0.05, 0.025}, {Vector::Zero(1)}, 1.0, opts("pp1", 2000), cfg,
                                             false);
  CHECK_FALSE(one.consistent);
  CHECK_THROWS_AS(polarity_diagnostic_point(iso1, LevyTriplet::unit_gaussian(1), Vector::Constant(1, 0.3), {0.1, 0.05},
                                            {Vector::Zero(1)}, 1.0, opts("pp1", 200), cfg),
                  HypothesisError);
}

TEST_CASE("H-norm growth of the truncated process") {
  const auto tr = LevyTriplet::unit_gaussian(16);
  const auto rep = polarity_diagnostic_H(tr, {1e6, 1.0}, {Vector::Zero(16)}, 1.0, 2.0, opts("ph", 20000),
                                         PathConfig{});
  CHECK(rep.h_norm_target == doctest::Approx(32.0));
  CHECK(rep.h_norm_verdict == Verdict::pass);
  CHECK(rep.hit_probability[0][0].mean == 1.0);
}

TEST_CASE("invariant level sets") {
  const auto m = SpaceModel::geometric(16);
  const auto norm = LyapunovNorm::gaussian(m, canonical_carmona(m));
  const auto tr = LevyTriplet::unit_gaussian(16);
  const auto deep = invariant_set_check(tr, norm, 1e6, Vector::Zero(16), 1.0, opts("inv", 2000));
  CHECK(deep.mean == 1.0);
  const auto out = invariant_set_check(tr, norm, 1.0, canonical_point(m) * 1e3, 1.0, opts("inv2", 2000));
  CHECK(out.mean == 0.0);
}

TEST_CASE("capacity trivial values and monotonicity") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  const PointCloud lambda{{Vector::Zero(8), Vector::Constant(8, 0.1)}, {0.25, 0.5}};
  const auto c = capacity(tr, lambda,
                          {TargetSet::empty(), TargetSet::everything(), TargetSet::halfspace(e(1, 8), 0.5),
                           TargetSet::halfspace(e(1, 8), 1.0)},
                          2.0, opts("cap", 3000), PathConfig{});
  CHECK(c[0].mean == 0.0);
  CHECK(c[1].mean == doctest::Approx(0.375));
  CHECK(c[1].std_error == 0.0);
  CHECK(c[2].mean >= c[3].mean);
}

TEST_CASE("balayage") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  const PathConfig cfg;
  const PointCloud nu{{Vector::Zero(8)}, {1.0}};
  const auto whole = balayage_check(tr, nu, TargetSet::everything(), 1.0, {TargetSet::halfspace(e(1, 8), 0.0)}, {},
                                    opts("b0", 1000), cfg);
  CHECK(whole.rows[0].difference.mean == 0.0);
  const PointCloud inside{{Vector::Constant(8, 2.0)}, {1.0}};
  const auto in = balayage_check(tr, inside, TargetSet::halfspace(e(1, 8), 1.0), 1.0,
                                 {TargetSet::halfspace(e(1, 8), 1.5)}, {TargetSet::halfspace(-e(1, 8), 0.0)},
                                 opts("b1", 1000), cfg);
  for (const auto& r : in.rows) CHECK(r.difference.mean == 0.0);
  const auto out = balayage_check(tr, nu, TargetSet::halfspace(e(1, 8), 1.0), 1.0,
                                  {TargetSet::halfspace(e(1, 8), 1.5)}, {TargetSet::halfspace(-e(1, 8), 0.0)},
                                  opts("b2", 3000), cfg);
  CHECK(out.carrier);
  for (const auto& r : out.rows) {
    CHECK(r.per_sample);
    CHECK(r.verdict == Verdict::pass);
  }
  CHECK(out.rows[1].difference.mean < 0.0);
}

TEST_CASE("domination gates") {
  const auto tr = LevyTriplet::unit_gaussian(8);
  const PointCloud nu{{Vector::Zero(8)}, {1.0}};
  const std::vector<TargetSet> in{TargetSet::halfspace(e(1, 8), 0.0)};
  const std::vector<TargetSet> out{TargetSet::halfspace(-e(1, 8), 0.0)};
  const auto same = domination_check(tr, nu, nu, TargetSet::everything(), 1.0, in, out, opts("d0", 3000));
  CHECK(same.hypothesis);
  CHECK(same.conclusion);
  const auto twice = domination_check(tr, nu.scaled(2.0), nu, TargetSet::everything(), 1.0, in, out,
                                      opts("d1", 3000));
  CHECK_FALSE(twice.hypothesis);
  CHECK(twice.status == "hypothesis not satisfied");
  CHECK_THROWS_AS(domination_check(tr, nu, nu, TargetSet::halfspace(e(1, 8), 1.0), 1.0, in, out, opts("d2", 100)),
                  ArgumentError);
}

TEST_CASE("projection tails") {
  const auto m = SpaceModel::geometric(16);
  const auto rep = projection_convergence(m, LevyTriplet::unit_gaussian(16), 1.0, {2, 4, 16}, opts("pc", 20000));
  CHECK(rep.targets[0] == doctest::Approx(std::pow(0.25, 3) * (1.0 - std::pow(0.25, 14)) / 0.75));
  CHECK(rep.tails[2].mean == 0.0);
  for (auto v : rep.verdicts) CHECK(v == Verdict::pass);
  CHECK(rep.strictly_decreasing);
}

TEST_CASE("target set projections") {
  const auto m = SpaceModel::geometric(4);
  CHECK(TargetSet::e_ball_complement(m, Vector::Zero(4), 1.0).projected(2).kind() == TargetSet::Kind::everything);
  CHECK(TargetSet::halfspace(e(4, 4), 1.0).projected(2).kind() == TargetSet::Kind::everything);
  const auto norm = std::make_shared<const LyapunovNorm>(LyapunovNorm::gaussian(m, canonical_carmona(m)));
  CHECK_THROWS_AS(static_cast<void>(TargetSet::qx_level(norm, 1.0).projected(2)), ArgumentError);
}
