#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "levypot/harness.hpp"

using namespace levypot;

namespace {

const char* kSmall = R"({
  "seed": 11,
  "space": {"dim": 8},
  "experiments": [
    {"name": "m1", "op": "measures.pairing_moment", "samples": 2000, "params": {"xi": [1.0, 1.0], "t": 0.5}},
    {"name": "s1", "op": "dirichlet.slab", "samples": 500,
     "params": {"a": -1, "b": 1, "fa": 0, "fb": 1, "z": [0.5]}}
  ]
})";

}  // namespace

TEST_CASE("empty experiment list") {
  const auto cfg = parse_config(R"({"experiments": []})");
  const auto rec = run(cfg, RunOptions{});
  CHECK(rec.rows.empty());
  CHECK(rec.exit_code() == 0);
  CHECK(to_csv(rec, false) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("config errors name the line or field") {
  try {
    parse_config("{\n  \"seed\": 1,\n  \"experiments\": [\n  }\n");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_config(R"({"sede": 1})"), doctest::Contains("config.sede"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiments": [{"name": "a", "op": "nope"}]})"),
                       doctest::Contains("experiments[0].op"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiments": [{"name": "a", "op": "lyapunov.v0", "samples": 50}]})"),
                       doctest::Contains("experiments[0].samples"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"experiments": [{"name": "a", "op": "lyapunov.v0", "confidence": 0.4}]})"),
      doctest::Contains("experiments[0].confidence"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"experiments": [{"name": "a", "op": "lyapunov.v0", "params": {"zz": [1]}}]})"),
      doctest::Contains("params.zz"), ConfigError);
}

TEST_CASE("runs are deterministic and thread independent") {
  const auto cfg = parse_config(kSmall);
  RunOptions one;
  one.threads = 1;
  RunOptions many;
  many.threads = 4;
  const auto a = to_csv(run(cfg, one), false);
  const auto b = to_csv(run(cfg, one), false);
  const auto c = to_csv(run(cfg, many), false);
  set_num_threads(1);
  CHECK(a == b);
  CHECK(a == c);
  RunOptions reseeded;
  reseeded.seed = 12;
  CHECK(to_csv(run(cfg, reseeded), false) != a);
}

TEST_CASE("filters and outputs") {
  const auto cfg = parse_config(kSmall);
  RunOptions opts;
  opts.filter = "s*";
  opts.out = std::filesystem::temp_directory_path() / "levypot_harness_test";
  const auto rec = run(cfg, opts);
  REQUIRE(rec.rows.size() == 1);
  CHECK(rec.rows[0].experiment == "s1");
  CHECK(rec.rows[0].target == doctest::Approx(0.75));
  write_outputs(rec, cfg, opts);
  std::ifstream csv(opts.out / "results.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == kCsvHeader);
  CHECK(std::filesystem::exists(opts.out / "results.json"));
}

TEST_CASE("runtime errors are recorded and fail the run") {
  const auto cfg = parse_config(R"({
    "triplet": {"jumps": {"kind": "poisson01"}},
    "experiments": [{"name": "bad", "op": "dirichlet.slab", "params": {"a": -1, "b": 1, "fa": 0, "fb": 1}}]
  })");
  const auto rec = run(cfg, RunOptions{});
  REQUIRE(rec.rows.size() == 1);
  CHECK(rec.rows[0].verdict == "error");
  CHECK(rec.exit_code() == 1);
}

TEST_CASE("verdict aggregation") {
  const McEstimate e{1.0, 0.1, 100, confidence_for_sigma(3.0)};
  const auto t = verdict_aggregate({e, e, e}, {1.0, 2.0, 1.5}, {0.0, 0.0, 0.0});
  CHECK(t.verdicts == std::vector<Verdict>{Verdict::pass, Verdict::fail, Verdict::inconclusive});
  CHECK(t.passed == 1);
  CHECK(t.failed == 1);
  CHECK(t.inconclusive == 1);
  CHECK_THROWS_AS(verdict_aggregate({e}, {1.0, 2.0}, {0.0}), ArgumentError);
}

TEST_CASE("glob") {
  CHECK(glob_match("*", "anything"));
  CHECK(glob_match("c0[1-3]*", "c02_x"));
  CHECK_FALSE(glob_match("c0[1-3]*", "c05_x"));
}
