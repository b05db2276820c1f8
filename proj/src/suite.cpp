#include "levypot/suite.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace levypot {

std::int64_t SuiteSettings::samples(std::int64_t base) const {
  return std::max<std::int64_t>(100, std::llround(static_cast<double>(base) * samples_scale));
}

EstimatorOptions SuiteSettings::options(std::string_view experiment, std::int64_t base) const {
  EstimatorOptions o;
  o.samples = samples(base);
  o.key = StreamKey{seed, 0}.derive(experiment);
  o.confidence = confidence;
  return o;
}

namespace {

constexpr Index kDim = 32;

Vector unit(Index k, Index dim = kDim) {
  Vector e = Vector::Zero(dim);
  e(k - 1) = 1.0;
  return e;
}

Vector coords(std::initializer_list<double> head, Index dim = kDim) {
  Vector v = Vector::Zero(dim);
  Index i = 0;
  for (double x : head) v(i++) = x;
  return v;
}

std::vector<double> head_params(const Vector& v, Index n) {
  return {v.data(), v.data() + std::min(n, v.size())};
}

SuiteRow make_row(std::string label, const McEstimate& e, double target, Verdict v,
                  std::vector<double> params = {}) {
  return {std::move(label), e.mean, e.std_error, e.n, target, std::string(to_string(v)),
          std::move(params)};
}

SuiteRow flag_row(std::string label, bool ok, double value = 0.0, std::vector<double> params = {}) {
  return {std::move(label), value, 0.0, 0, value, ok ? "pass" : "fail", std::move(params)};
}

/// Deterministic auxiliary draws (start points, fixtures).
std::vector<Vector> random_points(const SuiteSettings& s, std::string_view label, std::size_t count,
                                  Index dim, double scale) {
  RngStream rng(StreamKey{s.seed, 0}.derive(label), 0);
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < count; ++i) {
    Vector z(dim);
    for (Index k = 0; k < dim; ++k) z(k) = scale * rng.normal();
    pts.push_back(std::move(z));
  }
  return pts;
}

std::size_t count_pass(const std::vector<SuiteRow>& rows) {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.verdict == "pass"; }));
}

std::string ratio_text(std::size_t a, std::size_t b, const char* what) {
  std::ostringstream os;
  os << a << "/" << b << " " << what;
  return os.str();
}

LevyTriplet jump_triplet(Vector drift, std::vector<Vector> atoms, std::vector<double> masses) {
  LevyTriplet tr{std::move(drift), Vector::Ones(kDim),
                 JumpMeasure::point_masses(std::move(atoms), std::move(masses))};
  tr.validate();
  return tr;
}

}  // namespace

SuiteResult suite_variance_identity(const SuiteSettings& s) {
  SuiteResult out{1, "variance_identity", false, {}, {}};
  const LevyTriplet tr = LevyTriplet::unit_gaussian(kDim);
  const std::vector<Vector> ls{unit(1), unit(3), unit(1) + unit(2)};
  const std::vector<double> ts{0.1, 1.0, 5.0};
  const std::vector<Vector> zs{Vector::Zero(kDim), random_points(s, "variance/z", 1, kDim, 1.0)[0]};
  for (std::size_t zi = 0; zi < zs.size(); ++zi) {
    for (double t : ts) {
      std::ostringstream key;
      key << "variance/" << zi << "/" << t;
      const Vector& z = zs[zi];
      auto est = estimate_joint(3, s.options(key.str(), 100000), [&](RngStream& rng, std::span<double> v) {
        Vector y = z;
        add_increment(tr, t, rng, y);
        for (std::size_t i = 0; i < ls.size(); ++i) v[i] = std::pow(ls[i].dot(y), 2);
      });
      for (std::size_t i = 0; i < ls.size(); ++i) {
        const double target = t * ls[i].squaredNorm() + std::pow(ls[i].dot(z), 2);
        std::vector<double> params{t, ls[i].dot(z)};
        auto lp = head_params(ls[i], 3);
        params.insert(params.end(), lp.begin(), lp.end());
        std::ostringstream label;
        label << "l" << i << "_t" << t << "_z" << zi;
        out.rows.push_back(make_row(label.str(), est[i], target, est[i].verdict(target), params));
      }
    }
  }
  const std::size_t passed = count_pass(out.rows);
  out.pass = 9 * passed >= 8 * out.rows.size();
  out.summary = ratio_text(passed, out.rows.size(), "cells within 3 sigma");
  return out;
}

SuiteResult suite_gaussian_lyapunov(const SuiteSettings& s) {
  SuiteResult out{2, "gaussian_lyapunov", false, {}, {}};
  const auto model = SpaceModel::geometric(kDim);
  const auto norm = LyapunovNorm::gaussian(model, canonical_carmona(model));
  const LevyTriplet tr = LevyTriplet::unit_gaussian(kDim);
  const McEstimate M = qx_moment(norm, tr, 1.0, s.options("glyap/M", 100000));
  out.rows.push_back(make_row("M", M, M.mean, Verdict::pass));
  std::size_t lower = 0;
  std::size_t upper = 0;
  const auto zs = random_points(s, "glyap/z", 20, kDim, 1.0);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double q2 = norm.squared(zs[i]);
    const auto v = v0_estimate(norm, tr, zs[i], s.options("glyap/v0/" + std::to_string(i), 100000));
    const auto lo = v.verdict_at_least(q2);
    const auto hi = combine(v, 1.0, M, -2.0).verdict_at_most(2.0 * q2);
    lower += lo == Verdict::pass;
    upper += hi == Verdict::pass;
    out.rows.push_back(make_row("lower_" + std::to_string(i), v, q2, lo, {q2}));
    out.rows.push_back(make_row("upper_" + std::to_string(i), v, 2.0 * q2 + 2.0 * M.mean, hi, {q2, M.mean}));
  }
  out.pass = lower == zs.size() && upper == zs.size();
  out.summary = ratio_text(lower, zs.size(), "lower bounds, ") + ratio_text(upper, zs.size(), "upper bounds");
  return out;
}

SuiteResult suite_levy_sandwich(const SuiteSettings& s) {
  SuiteResult out{3, "levy_sandwich", false, {}, {}};
  const auto model = SpaceModel::geometric(kDim);
  const auto norm = LyapunovNorm::levy(model, canonical_carmona(model));
  const LevyTriplet tr =
      jump_triplet(coords({0.0, 0.1}), {coords({1.5, -0.5}), coords({-1.0, 0.0, 1.0})}, {0.7, 0.3});
  const auto bound = qx_moment_bound(norm, tr, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0},
                                     s.options("levy/ctilde", 100000));
  const double C = bound.c_tilde;
  out.rows.push_back(flag_row("c_tilde", std::isfinite(C), C));
  std::size_t ok = 0;
  const auto zs = random_points(s, "levy/z", 20, kDim, 1.0);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double q2 = norm.squared(zs[i]);
    const auto v = v0_estimate(norm, tr, zs[i], s.options("levy/v0/" + std::to_string(i), 100000));
    const auto lo = v.verdict_at_least(0.5 * q2 - 3.0 * C);
    const auto hi = v.verdict_at_most(2.0 * q2 + 6.0 * C);
    ok += lo == Verdict::pass && hi == Verdict::pass;
    out.rows.push_back(make_row("lower_" + std::to_string(i), v, 0.5 * q2 - 3.0 * C, lo, {q2, C}));
    out.rows.push_back(make_row("upper_" + std::to_string(i), v, 2.0 * q2 + 6.0 * C, hi, {q2, C}));
  }
  out.pass = ok == zs.size() && std::isfinite(C);
  std::ostringstream os;
  os << ok << "/" << zs.size() << " sandwiches hold, C~=" << C;
  out.summary = os.str();
  return out;
}

SuiteResult suite_moment_formulas(const SuiteSettings& s) {
  SuiteResult out{4, "moment_formulas", false, {}, {}};
  {
    const auto model = SpaceModel::geometric(kDim);
    const LevyTriplet tr = jump_triplet(coords({0.3, -0.2}),
                                        {coords({0.8, 0.4}), coords({-0.5, 0.0, 1.0})}, {0.6, 0.4});
    const std::vector<Vector> xis{unit(1), unit(1) + unit(2), coords({0.5, 0.0, -1.0})};
    const std::vector<double> ts{0.5, 1.0, 3.0};
    for (std::size_t a = 0; a < xis.size(); ++a) {
      for (std::size_t b = 0; b < ts.size(); ++b) {
        const double target = pairing_second_moment_formula(model, tr, xis[a], ts[b]);
        const auto est = pairing_second_moment(
            tr, xis[a], ts[b], s.options("moments/lk/" + std::to_string(a) + "/" + std::to_string(b), 100000));
        auto params = head_params(xis[a], 3);
        params.insert(params.begin(), ts[b]);
        out.rows.push_back(make_row("lk_xi" + std::to_string(a) + "_t" + std::to_string(b), est, target,
                                    est.verdict(target), params));
      }
    }
  }
  {
    const auto model = SpaceModel::sobolev(kDim);
    const LevyTriplet tr = LevyTriplet::poisson_example(kDim, 1.0);
    const std::vector<Vector> xis{unit(1), unit(1) + unit(2), coords({0.0, 1.0, -0.5, 0.0, 0.25})};
    const double t = 1.5;
    for (std::size_t a = 0; a < xis.size(); ++a) {
      const double target = pairing_second_moment_formula(model, tr, xis[a], t);
      const auto est = pairing_second_moment(tr, xis[a], t,
                                             s.options("moments/poisson/" + std::to_string(a), 100000));
      auto params = head_params(xis[a], 5);
      params.insert(params.begin(), t);
      out.rows.push_back(make_row("poisson_xi" + std::to_string(a), est, target, est.verdict(target), params));
    }
  }
  const std::size_t passed = count_pass(out.rows);
  out.pass = passed == out.rows.size();
  out.summary = ratio_text(passed, out.rows.size(), "moment cells within 3 sigma");
  return out;
}

SuiteResult suite_projection_consistency(const SuiteSettings& s) {
  SuiteResult out{5, "projection_consistency", false, {}, {}};
  const LevyTriplet tr = jump_triplet(coords({0.1}), {coords({1.0, 0.0, 0.0, -1.0}), coords({0.0, 0.7, 0.3})},
                                      {0.5, 0.5});
  const Vector z = random_points(s, "projection/z", 1, kDim, 0.5)[0];
  const Vector c = coords({0.5, -0.3, 0.2}, 3);
  for (Index n = 1; n <= 3; ++n) {
    const Vector cn = c.head(n);
    const auto f = TestFunction::cylinder(
        n, [cn](const Vector& y) { return 1.0 / (1.0 + (y - cn).squaredNorm()); }, 1.0);
    const LevyTriplet projected = project(tr, n);
    for (double alpha : {0.5, 1.0, 2.0}) {
      std::ostringstream key;
      key << "projection/" << n << "/" << alpha;
      const auto full = apply_Ualpha(tr, f, alpha, z, s.options(key.str() + "/full", 100000));
      const auto small = apply_Ualpha(projected, f, alpha, Vector(z.head(n)),
                                      s.options(key.str() + "/proj", 100000));
      const auto d = combine(full, 1.0, small, -1.0);
      std::ostringstream label;
      label << "n" << n << "_alpha" << alpha;
      out.rows.push_back(make_row(label.str(), d, 0.0, d.verdict(0.0), {full.mean, small.mean}));
    }
  }
  const std::size_t passed = count_pass(out.rows);
  out.pass = passed == out.rows.size();
  out.summary = ratio_text(passed, out.rows.size(), "(n, alpha) pairs agree within 3 sigma");
  return out;
}

SuiteResult suite_reduced_projection(const SuiteSettings& s) {
  SuiteResult out{6, "reduced_projection", false, {}, {}};
  const auto model = SpaceModel::geometric(kDim);
  const LevyTriplet tr = LevyTriplet::unit_gaussian(kDim);
  const TestFunction v = TestFunction::newton_truncated(coords({0.3, 0.0, 0.0}, 3));
  const PathConfig cfg{0.01, 50.0, true};
  const Index n = 3;
  Vector box_lo = Vector::Constant(5, -std::numeric_limits<double>::infinity());
  Vector box_hi = Vector::Constant(5, std::numeric_limits<double>::infinity());
  box_lo.head(3) << 0.5, -1.0, -1.0;
  box_hi.head(3) << 1.5, 1.0, 1.0;
  box_lo(4) = -0.5;
  box_hi(4) = 0.5;
  const std::vector<TargetSet> sets{
      TargetSet::e_ball(model, coords({1.0, 0.5}), 0.3),
      TargetSet::halfspace(unit(1), 1.0),
      TargetSet::box(box_lo, box_hi),
      TargetSet::h_ball(coords({1.0, 1.0}), 0.7),
      TargetSet::set_union({TargetSet::e_ball(model, coords({-1.0}), 0.25),
                            TargetSet::halfspace(unit(2), 1.2)}),
  };
  const Vector z = Vector::Zero(kDim);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto r = projection_inequality(tr, v, sets[i], n, 1.0, z,
                                         s.options("reduced/" + std::to_string(i), 20000), cfg);
    out.rows.push_back(make_row(sets[i].name(), r.difference, 0.0, r.verdict,
                                {r.full.mean, r.projected.mean}));
  }
  const std::size_t passed = count_pass(out.rows);
  out.pass = passed == out.rows.size();
  out.summary = ratio_text(passed, out.rows.size(), "target sets satisfy the projection inequality");
  return out;
}

SuiteResult suite_dirichlet_oracles(const SuiteSettings& s) {
  SuiteResult out{7, "dirichlet_oracles", false, {}, {}};
  const auto model = SpaceModel::geometric(kDim);
  const LevyTriplet tr = LevyTriplet::unit_gaussian(kDim);
  const DirichletConfig cfg;
  const double a = -1.0;
  const double b = 1.0;
  const double fa = -1.0;
  const double fb = 3.0;
  const Domain slab = Domain::slab(model, 1, a, b);
  const BoundaryData step{"two_level", [](const Vector& z) { return z(0) > 0.0 ? 3.0 : -1.0; }, 3.0,
                          BoundaryClass::bounded_continuous};
  bool ok = true;
  const auto others = random_points(s, "dirichlet/slab", 5, kDim, 0.5);
  const std::vector<double> xs{-0.8, -0.4, 0.0, 0.3, 0.7};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Vector z = others[i];
    z(0) = xs[i];
    const auto r = solve(tr, slab, step, z, s.options("dirichlet/slab/" + std::to_string(i), 6000), cfg);
    const double target = fa * (b - xs[i]) / (b - a) + fb * (xs[i] - a) / (b - a);
    const auto v = r.value.verdict(target);
    ok = ok && v == Verdict::pass && !r.flagged;
    out.rows.push_back(make_row("slab_x" + std::to_string(i), r.value, target, v, {xs[i], a, b, fa, fb}));
  }
  {
    const Vector center = coords({0.2, -0.1, 0.3});
    const Vector xi = coords({1.0, 2.0, 0.5});
    const Domain ball = Domain::e_ball(model, center, 1.0);
    const auto r = solve(tr, ball, BoundaryData::linear(xi, 0.0, 10.0), center,
                         s.options("dirichlet/ball", 1000), cfg);
    const double target = xi.dot(center);
    const auto v = r.value.verdict(target);
    ok = ok && v == Verdict::pass;
    auto params = head_params(xi, 3);
    auto cp = head_params(center, 3);
    params.insert(params.end(), cp.begin(), cp.end());
    out.rows.push_back(make_row("ball_center_linear", r.value, target, v, params));
  }
  {
    Vector x = Vector::Zero(kDim);
    x(0) = 0.1;
    const auto rows = harmonicity_check(tr, model, slab, step, x, {0.1, 0.2, 0.3},
                                        s.options("dirichlet/harmonic", 5000), cfg);
    const double target = fa * (b - x(0)) / (b - a) + fb * (x(0) - a) / (b - a);
    for (const auto& h : rows) {
      const auto d = combine(h.two_stage, 1.0, h.direct, -1.0);
      ok = ok && h.verdict == Verdict::pass;
      std::ostringstream label;
      label << "harmonic_r" << h.radius;
      out.rows.push_back(make_row(label.str(), d, 0.0, h.verdict, {h.radius, h.two_stage.mean, h.direct.mean}));
      const auto vt = h.two_stage.verdict(target);
      ok = ok && vt == Verdict::pass;
      out.rows.push_back(make_row(label.str() + "_oracle", h.two_stage, target, vt, {x(0), a, b, fa, fb}));
    }
  }
  {
    const Domain ball = Domain::e_ball(model, Vector::Zero(kDim), 1.0);
    const Vector xi = coords({1.0, 2.0, 0.5});
    const auto cont = boundary_continuity_check(tr, ball, BoundaryData::linear(xi, 0.0, 10.0),
                                                coords({2.0}), Vector::Zero(kDim),
                                                s.options("dirichlet/continuity", 3000), cfg);
    ok = ok && cont.pass;
    out.rows.push_back(make_row("continuity_linear", cont.values.back(), cont.target,
                                cont.pass ? Verdict::pass : Verdict::fail, {cont.gaps.front(), cont.gaps.back()}));
    const auto disc = boundary_continuity_check(tr, slab, BoundaryData::indicator(unit(2), 0.0), coords({1.0}),
                                                Vector::Zero(kDim), s.options("dirichlet/discontinuous", 3000),
                                                cfg);
    ok = ok && !disc.pass;
    out.rows.push_back(flag_row("continuity_negative_control_fails", !disc.pass, disc.values.back().mean,
                                {disc.gaps.front(), disc.gaps.back()}));
  }
  out.pass = ok;
  out.summary = ratio_text(count_pass(out.rows), out.rows.size(), "Dirichlet checks pass");
  return out;
}

namespace {

/// Synthetic control fixture: values along a ray, looked up by distance to y.
struct Fixture {
  Vector y;
  std::vector<Vector> points;
  std::vector<McEstimate> h;
  std::vector<double> k;
  double fy;
};

std::size_t nearest(const std::vector<Vector>& pts, const Vector& p) {
  std::size_t best = 0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = (pts[i] - p).norm();
    if (e < d) {
      d = e;
      best = i;
    }
  }
  return best;
}

bool fixture_pass(const Fixture& fx, const Domain& V, double k_scale) {
  ApproachSequence seq{"fixture", fx.y, fx.points};
  auto report = controlled_convergence_check(
      [&](const Vector& p) { return fx.h[nearest(fx.points, p)]; },
      [&](const Vector&) { return fx.fy; },
      [&](const Vector& p) { return k_scale * fx.k[nearest(fx.points, p)]; }, V,
      [&](const Vector& p) { return V.contains(p); }, {seq});
  return report.all_pass();
}

}  // namespace

SuiteResult suite_controlled_convergence(const SuiteSettings& s) {
  SuiteResult out{8, "controlled_convergence", false, {}, {}};
  const auto model = SpaceModel::geometric(kDim);
  const LevyTriplet tr = LevyTriplet::unit_gaussian(kDim);
  const DirichletConfig cfg;
  bool ok = true;
  {
    const Domain ball = Domain::e_ball(model, Vector::Zero(kDim), 1.0);
    const auto f = BoundaryData::linear(coords({1.0, 2.0, 0.5}), 0.0, 10.0);
    const Vector y = coords({2.0});
    ApproachSequence seq{"classical", y, geometric_ray(y, Vector::Zero(kDim))};
    std::size_t calls = 0;
    auto report = controlled_convergence_check(
        [&](const Vector& p) {
          return solve(tr, ball, f, p, s.options("control/classical/" + std::to_string(calls++), 2000), cfg).value;
        },
        [&](const Vector& p) { return f(p); }, [](const Vector&) { return 0.0; }, ball,
        [&](const Vector& p) { return ball.contains(p); }, {seq});
    const auto& rec = report.records.front();
    ok = ok && rec.pass && rec.branch == "c1";
    out.rows.push_back(make_row("classical_" + rec.branch, rec.h.back(), f(y), rec.pass ? Verdict::pass : Verdict::fail));
  }
  const Domain slab = Domain::slab(model, 1, -1.0, 1.0);
  {
    const BoundaryData cap{"cap", [](const Vector& z) { return z(0) > 0.0 && z(1) > 0.0 ? 1.0 : 0.0; }, 1.0,
                           BoundaryClass::bounded_borel};
    PointCloud lambda{{coords({0.0, 0.5}), coords({0.3, -0.5}), coords({-0.4, 0.1})}, {0.5, 0.3, 0.2}};
    const auto l1 = solve_l1(tr, slab, cap, {cap}, lambda, s.options("control/cap/l1", 4000), cfg);
    const std::vector<std::pair<Vector, Vector>> ends{{coords({1.0, 0.8}), coords({0.0, 0.8})},
                                                      {coords({1.0, -0.8}), coords({0.0, -0.8})},
                                                      {coords({-1.0, 0.3}), coords({0.0, 0.3})}};
    std::vector<ApproachSequence> seqs;
    for (std::size_t i = 0; i < ends.size(); ++i)
      seqs.push_back({"cap" + std::to_string(i), ends[i].first, geometric_ray(ends[i].first, ends[i].second)});
    std::size_t calls = 0;
    auto report = controlled_convergence_check(
        [&](const Vector& p) {
          return solve(tr, slab, cap, p, s.options("control/cap/h/" + std::to_string(calls++), 2000), cfg).value;
        },
        [&](const Vector& p) { return cap(p); },
        [&](const Vector& p) {
          return l1_control(tr, slab, cap, {cap}, l1.chosen, p, s.options("control/cap/k", 1000), cfg).mean;
        },
        slab, [&](const Vector& p) { return slab.contains(p); }, seqs);
    for (const auto& rec : report.records) {
      ok = ok && rec.pass && rec.branch == "c1";
      out.rows.push_back(make_row(rec.id + "_" + rec.branch, rec.h.back(), cap(rec.y),
                                  rec.pass ? Verdict::pass : Verdict::fail, {rec.limsup_k}));
    }
  }
  {
    // unbounded L1 data |z_2|^{-1/4} on the face z_1 = 1
    auto f_of = [](const Vector& z) { return z(0) > 0.0 ? std::pow(std::abs(z(1)), -0.25) : 0.0; };
    const BoundaryData f{"root_singularity", f_of, std::numeric_limits<double>::infinity(),
                         BoundaryClass::l1_positive};
    std::vector<BoundaryData> ladder;
    for (int m = 1; m <= 10; ++m) {
      const double cap = std::ldexp(1.0, m) / 2.0;
      ladder.push_back({"min_f_" + std::to_string(m), [f_of, cap](const Vector& z) { return std::min(f_of(z), cap); },
                        cap, BoundaryClass::bounded_continuous});
    }
    PointCloud lambda{{coords({0.0, 0.5}), coords({0.3, -0.5}), coords({-0.4, 0.1})}, {0.5, 0.3, 0.2}};
    const auto l1 = solve_l1(tr, slab, f, ladder, lambda, s.options("control/l1", 4000), cfg);
    double kmax = 0.0;
    for (const auto& k : l1.k) kmax = std::max(kmax, k.mean);
    out.rows.push_back(flag_row("l1_control_nonzero", kmax > 0.0, kmax,
                                {static_cast<double>(l1.chosen.size()), l1.gaps.front(), l1.gaps.back()}));
    ok = ok && kmax > 0.0;
    const std::vector<std::pair<Vector, Vector>> ends{{coords({1.0, 0.8}), coords({0.0, 0.8})},
                                                      {coords({-1.0, 0.3}), coords({0.0, 0.3})}};
    std::vector<ApproachSequence> seqs;
    for (std::size_t i = 0; i < ends.size(); ++i)
      seqs.push_back({"l1_" + std::to_string(i), ends[i].first, geometric_ray(ends[i].first, ends[i].second)});
    std::size_t calls = 0;
    auto report = controlled_convergence_check(
        [&](const Vector& p) {
          return estimate(s.options("control/l1/h/" + std::to_string(calls++), 2000), [&](RngStream& rng) {
            const auto e = sample_exit(tr, slab, p, cfg, rng);
            return e.exited ? f(e.location) : 0.0;
          });
        },
        [&](const Vector& p) { return f(p); },
        [&](const Vector& p) {
          return l1_control(tr, slab, f, ladder, l1.chosen, p, s.options("control/l1/k", 1000), cfg).mean;
        },
        slab, [&](const Vector& p) { return slab.contains(p); }, seqs);
    for (const auto& rec : report.records) {
      ok = ok && rec.pass && rec.branch == "c1";
      out.rows.push_back(make_row(rec.id + "_" + rec.branch, rec.h.back(), f(rec.y),
                                  rec.pass ? Verdict::pass : Verdict::fail, {rec.limsup_k}));
    }
  }
  {
    RngStream rng(StreamKey{s.seed, 0}.derive("control/fixtures"), 0);
    std::size_t stable = 0;
    std::size_t passing = 0;
    for (int i = 0; i < 10; ++i) {
      Fixture fx;
      fx.y = coords({1.0, rng.normal()});
      fx.points = geometric_ray(fx.y, coords({0.0, fx.y(1) + rng.normal()}));
      fx.fy = rng.normal();
      const int pattern = i % 3;
      const double base = 0.5 + rng.uniform();
      for (std::size_t j = 0; j < fx.points.size(); ++j) {
        const double jj = static_cast<double>(j + 1);
        double kv = 0.0;
        double hv = 0.0;
        switch (pattern) {
          case 0:  // k = 0, h converges
            hv = fx.fy + std::ldexp(rng.normal(), -static_cast<int>(j));
            break;
          case 1:  // bounded k, h converges
            kv = base * (1.0 + 0.1 * rng.uniform());
            hv = fx.fy + std::ldexp(0.1 * rng.normal(), -static_cast<int>(j));
            break;
          default:  // exploding k, h grows slower
            kv = std::pow(4.0, jj) * base;
            hv = std::pow(2.0, jj) * (1.0 + rng.uniform());
            break;
        }
        fx.h.push_back({hv, 0.01, 1000, s.confidence});
        fx.k.push_back(kv);
      }
      const bool before = fixture_pass(fx, slab, 1.0);
      const bool after = fixture_pass(fx, slab, 2.0);
      passing += before;
      stable += !before || after;
    }
    ok = ok && stable == 10 && passing > 0;
    out.rows.push_back(flag_row("majorant_2k_stable", stable == 10, static_cast<double>(stable),
                                {static_cast<double>(passing)}));
  }
  out.pass = ok;
  out.summary = ratio_text(count_pass(out.rows), out.rows.size(), "controlled-convergence checks pass");
  return out;
}

SuiteResult suite_capacity_balayage(const SuiteSettings& s) {
  SuiteResult out{9, "capacity_balayage", false, {}, {}};
  const auto model = SpaceModel::geometric(kDim);
  const LevyTriplet tr = LevyTriplet::unit_gaussian(kDim);
  const PathConfig cfg{0.01, 50.0, true};
  const double beta = 1.0;
  bool ok = true;
  const PointCloud lambda{{Vector::Zero(kDim), coords({0.3, -0.2}), coords({-0.2, 0.1, 0.4})}, {0.5, 0.3, 0.2}};
  {
    const auto caps = capacity(tr, lambda, {TargetSet::empty(), TargetSet::everything()}, beta,
                               s.options("capacity/trivial", 1000), cfg);
    const bool empty_ok = caps[0].mean == 0.0 && caps[0].std_error == 0.0;
    const bool full_ok = caps[1].mean == lambda.total() / beta && caps[1].std_error == 0.0;
    ok = ok && empty_ok && full_ok;
    out.rows.push_back(make_row("capacity_empty", caps[0], 0.0, empty_ok ? Verdict::pass : Verdict::fail));
    out.rows.push_back(make_row("capacity_whole_space", caps[1], lambda.total() / beta,
                                full_ok ? Verdict::pass : Verdict::fail, {lambda.total(), beta}));
  }
  {
    auto norm = std::make_shared<const LyapunovNorm>(LyapunovNorm::gaussian(model, canonical_carmona(model)));
    std::vector<TargetSet> tails;
    for (int n = 1; n <= 5; ++n) tails.push_back(TargetSet::qx_exceeds(norm, n));
    const auto caps = capacity(tr, lambda, tails, beta, s.options("capacity/tightness", 20000), cfg);
    bool strict = true;
    for (std::size_t i = 0; i < caps.size(); ++i) {
      if (i > 0 && !(caps[i].mean < caps[i - 1].mean)) strict = false;
      out.rows.push_back(make_row("tightness_n" + std::to_string(i + 1), caps[i], 0.0, Verdict::pass,
                                  {static_cast<double>(i + 1)}));
    }
    for (std::size_t i = 1; i < caps.size(); ++i) out.rows[out.rows.size() - caps.size() + i].verdict =
        caps[i].mean < caps[i - 1].mean ? "pass" : "fail";
    ok = ok && strict;
    const auto pair = capacity(tr, lambda,
                               {TargetSet::halfspace(unit(1), 1.0), TargetSet::halfspace(unit(2), 1.0),
                                TargetSet::set_union({TargetSet::halfspace(unit(1), 1.0),
                                                      TargetSet::halfspace(unit(2), 1.0)})},
                               beta, s.options("capacity/subadditive", 20000), cfg);
    const bool sub = pair[2].mean <= pair[0].mean + pair[1].mean &&
                     pair[2].mean >= std::max(pair[0].mean, pair[1].mean);
    ok = ok && sub;
    out.rows.push_back(make_row("subadditive_monotone", pair[2], pair[0].mean + pair[1].mean,
                                sub ? Verdict::pass : Verdict::fail, {pair[0].mean, pair[1].mean}));
  }
  const TargetSet M = TargetSet::halfspace(unit(1), 1.0);
  const PointCloud nu{{Vector::Zero(kDim), coords({-0.5, 0.3})}, {1.0, 0.5}};
  {
    Vector lo = Vector::Constant(2, -std::numeric_limits<double>::infinity());
    Vector hi = Vector::Constant(2, std::numeric_limits<double>::infinity());
    lo << 1.2, 0.0;
    hi << 3.0, std::numeric_limits<double>::infinity();
    const auto rep = balayage_check(tr, nu, M, beta, {TargetSet::halfspace(unit(1), 1.5), TargetSet::box(lo, hi)},
                                    {TargetSet::halfspace(-unit(1), 0.0),
                                     TargetSet::set_union({TargetSet::halfspace(-unit(1), -0.8),
                                                           TargetSet::halfspace(unit(2), 0.5)})},
                                    s.options("balayage", 20000), cfg);
    ok = ok && rep.carrier && !rep.vacuous;
    for (const auto& row : rep.rows) {
      ok = ok && row.per_sample && row.verdict == Verdict::pass;
      out.rows.push_back(make_row(std::string(row.inside_M ? "balayage_on_M_" : "balayage_off_M_") + row.set,
                                  row.difference, 0.0, row.verdict, {row.swept.mean, row.original.mean}));
    }
    out.rows.push_back(flag_row("balayage_carrier", rep.carrier, rep.hit_fraction));
  }
  {
    const PointCloud swept = balayage_cloud(tr, nu, M, beta, s.samples(8000),
                                            StreamKey{s.seed, 0}.derive("domination/cloud"), cfg);
    const TargetSet G = TargetSet::halfspace(unit(1), 0.95);
    const std::vector<TargetSet> in{TargetSet::halfspace(unit(1), 1.5), TargetSet::halfspace(unit(1), 2.0),
                                    TargetSet::e_ball(model, coords({2.0}), 0.2)};
    const std::vector<TargetSet> off{TargetSet::halfspace(-unit(1), -0.5), TargetSet::halfspace(-unit(1), 0.0),
                                     TargetSet::halfspace(unit(2), 1.0)};
    const auto good = domination_check(tr, swept, nu, G, beta, in, off, s.options("domination/swept", 40000));
    ok = ok && good.hypothesis && good.conclusion;
    out.rows.push_back(flag_row("domination_swept_" + std::string(good.hypothesis ? "hypothesis" : "no_hypothesis"),
                                good.hypothesis && good.conclusion, swept.total()));
    const TargetSet all = TargetSet::everything();
    const auto same = domination_check(tr, nu, nu, all, beta, in, off, s.options("domination/same", 20000));
    ok = ok && same.hypothesis && same.conclusion;
    out.rows.push_back(flag_row("domination_mu_equals_nu", same.hypothesis && same.conclusion));
    const auto twice = domination_check(tr, nu.scaled(2.0), nu, all, beta,
                                        {TargetSet::halfspace(-unit(1), 0.0), TargetSet::halfspace(unit(1), 0.0)},
                                        off, s.options("domination/double", 20000));
    ok = ok && !twice.hypothesis;
    out.rows.push_back(flag_row("domination_negative_control_rejected", !twice.hypothesis));
  }
  out.pass = ok;
  out.summary = ratio_text(count_pass(out.rows), out.rows.size(), "capacity and balayage checks pass");
  return out;
}

SuiteResult suite_projection_tail(const SuiteSettings& s) {
  SuiteResult out{10, "projection_tail", false, {}, {}};
  bool ok = true;
  {
    const auto model = SpaceModel::geometric(kDim);
    const auto rep = projection_convergence(model, LevyTriplet::unit_gaussian(kDim), 1.0, {4, 8, 16},
                                            s.options("tail/gaussian", 100000));
    for (std::size_t i = 0; i < rep.ranks.size(); ++i) {
      ok = ok && rep.verdicts[i] == Verdict::pass;
      out.rows.push_back(make_row("gaussian_n" + std::to_string(rep.ranks[i]), rep.tails[i], rep.targets[i],
                                  rep.verdicts[i], {1.0, static_cast<double>(rep.ranks[i]), static_cast<double>(kDim)}));
    }
  }
  {
    const auto model = SpaceModel::sobolev(kDim);
    const auto rep = projection_convergence(model, LevyTriplet::poisson_example(kDim), 1.0, {1, 2, 4, 8, 16},
                                            s.options("tail/poisson", 100000));
    ok = ok && rep.strictly_decreasing;
    for (std::size_t i = 0; i < rep.ranks.size(); ++i)
      out.rows.push_back(make_row("poisson_n" + std::to_string(rep.ranks[i]), rep.tails[i],
                                  std::numeric_limits<double>::quiet_NaN(),
                                  (i == 0 || rep.tails[i].mean < rep.tails[i - 1].mean) ? Verdict::pass : Verdict::fail,
                                  {static_cast<double>(rep.ranks[i])}));
  }
  out.pass = ok;
  out.summary = ratio_text(count_pass(out.rows), out.rows.size(), "tail checks pass");
  return out;
}

const std::vector<SuiteEntry>& suite_entries() {
  static const std::vector<SuiteEntry> entries{
      {"suite.variance_identity", suite_variance_identity},
      {"suite.gaussian_lyapunov", suite_gaussian_lyapunov},
      {"suite.levy_sandwich", suite_levy_sandwich},
      {"suite.moment_formulas", suite_moment_formulas},
      {"suite.projection_consistency", suite_projection_consistency},
      {"suite.reduced_projection", suite_reduced_projection},
      {"suite.dirichlet_oracles", suite_dirichlet_oracles},
      {"suite.controlled_convergence", suite_controlled_convergence},
      {"suite.capacity_balayage", suite_capacity_balayage},
      {"suite.projection_tail", suite_projection_tail},
  };
  return entries;
}

}  // namespace levypot
