#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>

#include "levypot/harness.hpp"

using namespace levypot;

namespace {

constexpr double kZ = 3.0;
constexpr double kAtol = 1e-9;

bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// three-valued rule recomputed here, independent of the library's verdict code
std::string band(const SuiteRow& r, double target) {
  const double d = std::abs(r.mean - target);
  if (d <= kZ * r.std_error + kAtol) return "pass";
  if (d > 3.0 * kZ * r.std_error + kAtol) return "fail";
  return "inconclusive";
}

bool at_most(const SuiteRow& r, double bound) { return r.mean - bound <= kZ * r.std_error + kAtol; }
bool at_least(const SuiteRow& r, double bound) { return bound - r.mean <= kZ * r.std_error + kAtol; }

bool starts(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

struct Check {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) note = what;
    ok = ok && cond;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
  return s;
}

Check variance_oracle(const SuiteResult& r) {
  Check c;
  std::size_t pass = 0;
  for (const auto& row : r.rows) {
    const double t = row.params[0];
    const double lz = row.params[1];
    const std::vector<double> l(row.params.begin() + 2, row.params.end());
    const double target = t * dot(l, l) + lz * lz;
    c.require(close(target, row.target), row.label + " target");
    pass += band(row, target) == "pass";
  }
  c.require(r.rows.size() == 18, "cell count");
  c.require(9 * pass >= 8 * r.rows.size(), "fewer than 8/9 cells");
  return c;
}

Check gaussian_lyapunov_oracle(const SuiteResult& r) {
  Check c;
  std::size_t lower = 0, upper = 0;
  double M = 0.0, Mse = 0.0;
  for (const auto& row : r.rows)
    if (row.label == "M") {
      M = row.mean;
      Mse = row.std_error;
    }
  for (const auto& row : r.rows) {
    if (starts(row.label, "lower_")) {
      c.require(close(row.target, row.params[0]), row.label);
      lower += at_least(row, row.params[0]);
    } else if (starts(row.label, "upper_")) {
      const double bound = 2.0 * row.params[0] + 2.0 * M;
      c.require(close(row.target, bound), row.label);
      SuiteRow pooled = row;
      pooled.std_error = std::hypot(row.std_error, 2.0 * Mse);
      upper += at_most(pooled, bound);
    }
  }
  c.require(lower == 20, "lower bounds");
  c.require(upper == 20, "upper bounds");
  return c;
}

Check sandwich_oracle(const SuiteResult& r) {
  Check c;
  std::size_t ok = 0;
  for (const auto& row : r.rows) {
    if (starts(row.label, "lower_")) {
      const double b = 0.5 * row.params[0] - 3.0 * row.params[1];
      c.require(close(row.target, b), row.label);
      ok += at_least(row, b);
    } else if (starts(row.label, "upper_")) {
      const double b = 2.0 * row.params[0] + 6.0 * row.params[1];
      c.require(close(row.target, b), row.label);
      ok += at_most(row, b);
    }
  }
  c.require(ok == 40, "sandwich bounds");
  return c;
}

Check moment_oracle(const SuiteResult& r) {
  Check c;
  // fixture: drift (0.3, -0.2), unit gaussian, atoms (0.8, 0.4) w 0.6 and (-0.5, 0, 1) w 0.4
  const std::vector<double> drift{0.3, -0.2, 0.0};
  const std::vector<std::vector<double>> atoms{{0.8, 0.4, 0.0}, {-0.5, 0.0, 1.0}};
  const std::vector<double> masses{0.6, 0.4};
  std::size_t lk = 0, poisson = 0;
  for (const auto& row : r.rows) {
    const double t = row.params[0];
    const std::vector<double> xi(row.params.begin() + 1, row.params.end());
    double target = 0.0;
    if (starts(row.label, "lk_")) {
      double mean = dot(xi, drift);
      double second = dot(xi, xi);
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        mean += masses[i] * dot(xi, atoms[i]);
        second += masses[i] * std::pow(dot(xi, atoms[i]), 2);
      }
      target = t * second + t * t * mean * mean;
      ++lk;
    } else {
      // sine basis: ∫ξ dσ and ∫ξ² dσ over (0,1)
      double a = 0.0;
      for (std::size_t n = 1; n <= xi.size(); ++n)
        a += xi[n - 1] * std::sqrt(2.0) * (1.0 - std::pow(-1.0, static_cast<double>(n))) / (n * std::numbers::pi);
      target = t * dot(xi, xi) + t * t * a * a;
      ++poisson;
    }
    c.require(close(target, row.target, 1e-6), row.label + " oracle");
    c.require(band(row, target) == "pass", row.label);
  }
  c.require(lk == 9 && poisson == 3, "grid size");
  return c;
}

Check zero_difference_oracle(const SuiteResult& r, std::size_t expected, bool one_sided) {
  Check c;
  for (const auto& row : r.rows) {
    c.require(row.target == 0.0, row.label);
    c.require(one_sided ? at_most(row, 0.0) : band(row, 0.0) == "pass", row.label);
  }
  c.require(r.rows.size() == expected, "row count");
  return c;
}

Check dirichlet_oracle(const SuiteResult& r) {
  Check c;
  std::size_t slab = 0, harmonic = 0;
  for (const auto& row : r.rows) {
    if (starts(row.label, "slab_") || (starts(row.label, "harmonic_") && row.label.find("_oracle") != std::string::npos)) {
      const double x = row.params[0], a = row.params[1], b = row.params[2], fa = row.params[3], fb = row.params[4];
      const double target = fa * (b - x) / (b - a) + fb * (x - a) / (b - a);
      c.require(close(target, row.target), row.label + " oracle");
      c.require(band(row, target) == "pass", row.label);
      (starts(row.label, "slab_") ? slab : harmonic) += 1;
    } else if (row.label == "ball_center_linear") {
      const std::vector<double> xi(row.params.begin(), row.params.begin() + 3);
      const std::vector<double> ctr(row.params.begin() + 3, row.params.end());
      c.require(close(dot(xi, ctr), row.target), "ball oracle");
      c.require(band(row, dot(xi, ctr)) == "pass", row.label);
    } else if (starts(row.label, "harmonic_")) {
      c.require(band(row, 0.0) == "pass", row.label);
    } else {
      c.require(row.verdict == "pass", row.label);
    }
  }
  c.require(slab == 5 && harmonic == 3, "row count");
  return c;
}

Check flags_oracle(const SuiteResult& r) {
  Check c;
  for (const auto& row : r.rows) c.require(row.verdict == "pass", row.label);
  return c;
}

Check capacity_oracle(const SuiteResult& r) {
  Check c;
  double prev = std::numeric_limits<double>::infinity();
  std::size_t tight = 0;
  for (const auto& row : r.rows) {
    if (row.label == "capacity_empty") {
      c.require(row.mean == 0.0 && row.std_error == 0.0, "empty set");
    } else if (row.label == "capacity_whole_space") {
      c.require(row.mean == row.params[0] / row.params[1] && row.std_error == 0.0, "whole space");
    } else if (starts(row.label, "tightness_")) {
      c.require(row.mean < prev, row.label + " not decreasing");
      prev = row.mean;
      ++tight;
    } else {
      c.require(row.verdict == "pass", row.label);
    }
  }
  c.require(tight == 5, "tightness grid");
  return c;
}

Check tail_oracle(const SuiteResult& r) {
  Check c;
  double prev = std::numeric_limits<double>::infinity();
  std::size_t g = 0, p = 0;
  for (const auto& row : r.rows) {
    if (starts(row.label, "gaussian_")) {
      const double t = row.params[0];
      const int n = static_cast<int>(row.params[1]);
      const int N = static_cast<int>(row.params[2]);
      double target = 0.0;
      for (int k = n + 1; k <= N; ++k) target += t * std::pow(4.0, -k);
      c.require(close(target, row.target), row.label + " oracle");
      c.require(band(row, target) == "pass", row.label);
      ++g;
    } else {
      c.require(row.mean < prev, row.label + " not decreasing");
      prev = row.mean;
      ++p;
    }
  }
  c.require(g == 3 && p == 5, "rank grid");
  return c;
}

struct Criterion {
  const char* title;
  std::function<SuiteResult(const SuiteSettings&)> run;
  std::function<Check(const SuiteResult&)> oracle;
};

}  // namespace

int main() {
  set_num_threads(1);
  const SuiteSettings settings;
  const std::vector<Criterion> criteria{
      {"variance identity", suite_variance_identity, variance_oracle},
      {"gaussian Lyapunov inequalities", suite_gaussian_lyapunov, gaussian_lyapunov_oracle},
      {"Levy Lyapunov sandwich", suite_levy_sandwich, sandwich_oracle},
      {"moment formulas", suite_moment_formulas, moment_oracle},
      {"projection consistency", suite_projection_consistency,
       [](const SuiteResult& r) { return zero_difference_oracle(r, 9, false); }},
      {"reduced-function projection inequality", suite_reduced_projection,
       [](const SuiteResult& r) { return zero_difference_oracle(r, 5, true); }},
      {"Dirichlet oracles", suite_dirichlet_oracles, dirichlet_oracle},
      {"controlled convergence", suite_controlled_convergence, flags_oracle},
      {"capacity and balayage", suite_capacity_balayage, capacity_oracle},
      {"projection tail", suite_projection_tail, tail_oracle},
  };
  int failures = 0;
  int id = 0;
  for (const auto& crit : criteria) {
    ++id;
    std::string line;
    bool ok = false;
    try {
      const SuiteResult res = crit.run(settings);
      const Check check = crit.oracle(res);
      ok = res.pass && check.ok;
      line = res.summary + (check.ok ? "" : "; oracle mismatch at " + check.note);
    } catch (const std::exception& e) {
      line = std::string("error: ") + e.what();
    }
    failures += !ok;
    std::printf("%s criterion %2d  %s: %s\n", ok ? "PASS" : "FAIL", id, crit.title, line.c_str());
    std::fflush(stdout);
  }
  {
    ++id;
    bool ok = false;
    std::string line;
    try {
      const auto cfg = load_config(LEVYPOT_SOURCE_DIR "/configs/paper_suite.json");
      RunOptions opts;
      opts.samples_scale = 0.05;
      opts.threads = 1;
      const std::string a = to_csv(run(cfg, opts), false);
      const std::string b = to_csv(run(cfg, opts), false);
      opts.threads = 4;
      const std::string c = to_csv(run(cfg, opts), false);
      set_num_threads(1);
      ok = a == b && a == c && a.size() > std::string(kCsvHeader).size() + 1;
      line = std::string(a == b ? "repeat identical" : "repeat differs") + ", " +
             (a == c ? "1 vs 4 threads identical" : "1 vs 4 threads differ") + " (" + std::to_string(a.size()) +
             " CSV bytes)";
    } catch (const std::exception& e) {
      line = std::string("error: ") + e.what();
    }
    failures += !ok;
    std::printf("%s criterion %2d  %s: %s\n", ok ? "PASS" : "FAIL", id, "determinism", line.c_str());
  }
  return failures == 0 ? 0 : 1;
}
