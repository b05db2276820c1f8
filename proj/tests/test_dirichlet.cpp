#include <doctest.h>

#include <cmath>

#include "levypot/dirichlet.hpp"

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

double ruin(double x, double a, double b, double fa, double fb) {
  return fa * (b - x) / (b - a) + fb * (x - a) / (b - a);
}

}  // namespace

TEST_CASE("constant data") {
  const auto m = SpaceModel::geometric(8);
  const auto tr = LevyTriplet::unit_gaussian(8);
  const auto r = solve(tr, Domain::slab(m, 1, -1.0, 1.0), BoundaryData::constant(1.0), Vector::Zero(8),
                       opts("c", 500), DirichletConfig{});
  CHECK(r.value.mean == 1.0);
  CHECK_FALSE(r.flagged);
}

TEST_CASE("slab gambler's ruin, both methods") {
  const auto m = SpaceModel::geometric(8);
  const auto tr = LevyTriplet::unit_gaussian(8);
  const Domain V = Domain::slab(m, 2, -1.0, 2.0);
  const BoundaryData f{"faces", [](const Vector& z) { return z(1) > 0.5 ? 4.0 : 1.0; }, 4.0,
                       BoundaryClass::bounded_continuous};
  Vector z = Vector::Zero(8);
  z(1) = 0.2;
  const double target = ruin(0.2, -1.0, 2.0, 1.0, 4.0);
  DirichletConfig wos;
  wos.method = DirichletMethod::walk_on_spheres;
  CHECK(solve(tr, V, f, z, opts("w", 3000), wos).value.verdict(target) == Verdict::pass);
  DirichletConfig ts;
  ts.method = DirichletMethod::time_stepping;
  CHECK(solve(tr, V, f, z, opts("t", 3000), ts).value.verdict(target) == Verdict::pass);
}

TEST_CASE("ball center symmetry") {
  const auto m = SpaceModel::geometric(8);
  const auto tr = LevyTriplet::unit_gaussian(8);
  const Vector c = 0.1 * Vector::Ones(8);
  const Vector xi = e(1, 8) - 0.5 * e(3, 8);
  const auto r = solve(tr, Domain::e_ball(m, c, 1.0), BoundaryData::linear(xi, 0.0, 10.0), c, opts("b", 500),
                       DirichletConfig{});
  CHECK(r.value.mean == doctest::Approx(xi.dot(c)).epsilon(1e-9));
}

TEST_CASE("domain geometry") {
  const auto m = SpaceModel::geometric(4);
  const Domain ball = Domain::e_ball(m, Vector::Zero(4), 1.0);
  CHECK(ball.contains(Vector::Zero(4)));
  CHECK_FALSE(ball.contains(3.0 * e(1, 4)));
  CHECK(ball.contains_e_ball(Vector::Zero(4), 0.5));
  CHECK_FALSE(ball.contains_e_ball(Vector::Zero(4), 1.5));
  const Domain box = Domain::box(m, -Vector::Ones(2), Vector::Ones(2));
  CHECK(box.boundary_distance(0.5 * e(1, 4)) == doctest::Approx(0.5));
  const Domain half = Domain::halfspaces(m, {e(1, 4)}, {1.0});
  CHECK(half.boundary_distance(Vector::Zero(4)) == doctest::Approx(1.0));
  CHECK_FALSE(half.contains(2.0 * e(1, 4)));
  CHECK_THROWS_AS(solve(LevyTriplet::unit_gaussian(4), half, BoundaryData::constant(1.0), 2.0 * e(1, 4),
                        opts("x", 100), DirichletConfig{}),
                  ArgumentError);
}

TEST_CASE("harmonicity on the slab") {
  const auto m = SpaceModel::geometric(6);
  const auto tr = LevyTriplet::unit_gaussian(6);
  const Domain V = Domain::slab(m, 1, -1.0, 1.0);
  const auto rows = harmonicity_check(tr, m, V, BoundaryData::constant(1.0), Vector::Zero(6), {0.2}, opts("h1", 300),
                                      DirichletConfig{});
  CHECK(rows[0].two_stage.mean == 1.0);
  CHECK(rows[0].direct.mean == 1.0);
  const BoundaryData step{"faces", [](const Vector& z) { return z(0) > 0.0 ? 1.0 : 0.0; }, 1.0,
                          BoundaryClass::bounded_continuous};
  Vector x = Vector::Zero(6);
  x(0) = 0.3;
  for (const auto& r : harmonicity_check(tr, m, V, step, x, {0.1, 0.2}, opts("h2", 3000), DirichletConfig{})) {
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.two_stage.verdict(ruin(0.3, -1.0, 1.0, 0.0, 1.0)) == Verdict::pass);
  }
}

TEST_CASE("boundary continuity and its negative control") {
  const auto m = SpaceModel::geometric(6);
  const auto tr = LevyTriplet::unit_gaussian(6);
  const Domain V = Domain::slab(m, 1, -1.0, 1.0);
  const auto ok = boundary_continuity_check(tr, V, BoundaryData::constant(2.0), e(1, 6), Vector::Zero(6),
                                            opts("k1", 200), DirichletConfig{});
  CHECK(ok.pass);
  for (const auto& v : ok.values) CHECK(v.mean == 2.0);
  const auto bad = boundary_continuity_check(tr, V, BoundaryData::indicator(e(2, 6), 0.0), e(1, 6), Vector::Zero(6),
                                             opts("k2", 1500), DirichletConfig{});
  CHECK_FALSE(bad.pass);
}

TEST_CASE("tail limsup") {
  CHECK(tail_limsup({0.0, 0.0, 0.0}, 3, 1e12) == 0.0);
  CHECK(tail_limsup({1.0, 5.0, 2.0, 3.0, 2.5}, 3, 1e12) == 3.0);
  CHECK(std::isinf(tail_limsup({1.0, 2.0, 4.0, 8.0}, 3, 1e12)));
  CHECK(std::isinf(tail_limsup({1.0, 2e12}, 3, 1e12)));
  CHECK_THROWS_AS(tail_limsup({}, 3, 1e12), ArgumentError);
}

TEST_CASE("controlled convergence branches and majorants") {
  const auto m = SpaceModel::geometric(4);
  const Domain V = Domain::slab(m, 1, -1.0, 1.0);
  const Vector y = e(1, 4);
  const auto pts = geometric_ray(y, Vector::Zero(4));
  auto dist = [&](const Vector& p) { return (p - y).norm(); };
  auto inside = [&](const Vector& p) { return V.contains(p); };
  const ApproachSequence seq{"s", y, pts};
  auto h_conv = [&](const Vector& p) { return McEstimate{3.0 + dist(p) * 0.01, 0.001, 1000, 0.9973}; };
  auto f = [](const Vector&) { return 3.0; };
  const auto c1 = controlled_convergence_check(h_conv, f, [](const Vector&) { return 0.0; }, V, inside, {seq});
  CHECK(c1.records[0].branch == "c1");
  CHECK(c1.all_pass());
  auto h_grow = [&](const Vector& p) { return McEstimate{1.0 / dist(p), 0.001, 1000, 0.9973}; };
  auto k_big = [&](double s) {
    return [&, s](const Vector& p) { return s / std::pow(dist(p), 2.0); };
  };
  const auto c2 = controlled_convergence_check(h_grow, f, k_big(1.0), V, inside, {seq});
  CHECK(c2.records[0].branch == "c2");
  CHECK(c2.all_pass());
  CHECK(controlled_convergence_check(h_grow, f, k_big(2.0), V, inside, {seq}).all_pass());
  const auto no_k = controlled_convergence_check(h_grow, f, [](const Vector&) { return 0.0; }, V, inside, {seq});
  CHECK_FALSE(no_k.all_pass());
  const ApproachSequence off{"off", Vector::Zero(4), pts};
  CHECK_THROWS_AS(controlled_convergence_check(h_conv, f, [](const Vector&) { return 0.0; }, V, inside, {off}),
                  ArgumentError);
}

TEST_CASE("l1 ladder for bounded data is trivial") {
  const auto m = SpaceModel::geometric(4);
  const auto tr = LevyTriplet::unit_gaussian(4);
  const Domain V = Domain::slab(m, 1, -1.0, 1.0);
  const auto f = BoundaryData::indicator(e(2, 4), 0.0);
  const PointCloud lambda{{Vector::Zero(4)}, {1.0}};
  const auto r = solve_l1(tr, V, f, {f}, lambda, opts("l1", 500), DirichletConfig{});
  CHECK(r.chosen.empty());
  for (const auto& k : r.k) CHECK(k.mean == 0.0);
}
