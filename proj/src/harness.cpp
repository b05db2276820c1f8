#include "levypot/harness.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace levypot {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_fail(where, "expected an object");
  for (const auto& [k, _] : obj.items())
    if (!allowed.contains(k)) config_fail(where + "." + k, "unknown key");
}

double number_at(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) config_fail(where + "." + key, "missing");
  if (!obj.at(key).is_number()) config_fail(where + "." + key, "expected a number");
  return obj.at(key).get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number_at(obj, key, where) : fallback;
}

Vector vector_at(const json& v, Index dim, const std::string& where) {
  if (!v.is_array()) config_fail(where, "expected an array of numbers");
  if (static_cast<Index>(v.size()) > dim) config_fail(where, "longer than the space dimension");
  Vector out = Vector::Zero(dim);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) config_fail(where, "expected an array of numbers");
    out(static_cast<Index>(i)) = v[i].get<double>();
  }
  return out;
}

SpaceModel build_space(const json& s) {
  const Index dim = static_cast<Index>(number_or(s, "dim", 32, "space"));
  if (dim < 1) config_fail("space.dim", "must be positive");
  const json w = s.value("weights", json("4^-n"));
  try {
    if (w.is_string()) {
      if (w == "4^-n") return SpaceModel::geometric(dim);
      if (w == "sobolev") return SpaceModel::sobolev(dim);
      config_fail("space.weights", "expected \"4^-n\", \"sobolev\" or an array");
    }
    if (!w.is_array() || static_cast<Index>(w.size()) != dim)
      config_fail("space.weights", "array length must equal dim");
    return SpaceModel::from_weights(vector_at(w, dim, "space.weights"));
  } catch (const ArgumentError& e) {
    config_fail("space.weights", e.what());
  }
}

CarmonaDatum<double> build_carmona(const SpaceModel& model, const json& s) {
  const json x = s.value("x", json("canonical"));
  if (x.is_string()) {
    if (x != "canonical") config_fail("space.x", "expected \"canonical\" or an array");
    return canonical_carmona(model);
  }
  try {
    return build_carmona_basis(model, vector_at(x, model.dim(), "space.x"));
  } catch (const ConstructionError& e) {
    config_fail("space.x", e.what());
  }
}

LevyTriplet build_triplet(const json& t, Index dim, const std::string& where) {
  check_keys(t, where, {"drift", "gaussian", "jumps"});
  LevyTriplet tr{Vector::Zero(dim), Vector::Ones(dim), JumpMeasure::none()};
  if (t.contains("drift")) tr.drift = vector_at(t["drift"], dim, where + ".drift");
  if (t.contains("gaussian")) {
    const json& g = t["gaussian"];
    if (g.is_string()) {
      if (g == "none") tr.gaussian = Vector::Zero(dim);
      else if (g != "unitH") config_fail(where + ".gaussian", "expected \"unitH\", \"none\" or an array");
    } else {
      tr.gaussian = vector_at(g, dim, where + ".gaussian");
    }
  }
  if (t.contains("jumps")) {
    const json& j = t["jumps"];
    const std::string jw = where + ".jumps";
    check_keys(j, jw, {"kind", "intensity", "atoms", "masses"});
    const std::string kind = j.value("kind", std::string("none"));
    try {
      if (kind == "point_masses") {
        if (!j.contains("atoms") || !j["atoms"].is_array()) config_fail(jw + ".atoms", "expected an array");
        if (!j.contains("masses") || !j["masses"].is_array()) config_fail(jw + ".masses", "expected an array");
        std::vector<Vector> atoms;
        for (const auto& a : j["atoms"]) atoms.push_back(vector_at(a, dim, jw + ".atoms"));
        std::vector<double> masses;
        for (const auto& m : j["masses"]) {
          if (!m.is_number()) config_fail(jw + ".masses", "expected numbers");
          masses.push_back(m.get<double>());
        }
        tr.jumps = JumpMeasure::point_masses(std::move(atoms), std::move(masses));
      } else if (kind == "poisson01") {
        tr.jumps = JumpMeasure::poisson01(number_or(j, "intensity", 1.0, jw));
      } else if (kind != "none") {
        config_fail(jw + ".kind", "expected none, point_masses or poisson01");
      }
    } catch (const ArgumentError& e) {
      config_fail(jw, e.what());
    }
  }
  try {
    tr.validate();
  } catch (const Error& e) {
    config_fail(where, e.what());
  }
  return tr;
}

struct Context {
  const SpaceModel& model;
  const json& space;
  const LevyTriplet& triplet;
  const json& params;
  EstimatorOptions opts;
  SuiteSettings suite;
};

struct OpOutput {
  std::vector<ResultRow> rows;
  std::string verdict;
  std::string summary;
};

Vector param_vector(const Context& c, const std::string& key) {
  if (!c.params.contains(key)) return Vector::Zero(c.model.dim());
  return vector_at(c.params[key], c.model.dim(), "params." + key);
}

double param(const Context& c, const std::string& key, double fallback = kNaN) {
  if (!c.params.contains(key)) {
    if (std::isnan(fallback)) config_fail("params." + key, "missing");
    return fallback;
  }
  return number_at(c.params, key, "params");
}

OpOutput single(const McEstimate& e, double target, std::optional<Verdict> v) {
  ResultRow row;
  row.mean = e.mean;
  row.std_error = e.std_error;
  row.n = e.n;
  row.target = target;
  row.verdict = v ? std::string(to_string(*v)) : "n/a";
  return {{row}, row.verdict, {}};
}

LyapunovNorm norm_for(const Context& c) {
  const std::string kind = c.params.value("kind", std::string("gaussian"));
  const auto carmona = build_carmona(c.model, c.space);
  if (kind == "gaussian") return LyapunovNorm::gaussian(c.model, carmona);
  if (kind == "levy") return LyapunovNorm::levy(c.model, carmona);
  config_fail("params.kind", "expected gaussian or levy");
}

struct OpEntry {
  std::set<std::string> keys;
  std::function<OpOutput(const Context&)> run;
};

const std::map<std::string, OpEntry>& elementary_ops() {
  static const std::map<std::string, OpEntry> ops{
      {"measures.pairing_moment",
       {{"xi", "t"},
        [](const Context& c) {
          const Vector xi = param_vector(c, "xi");
          const double t = param(c, "t");
          const double target = pairing_second_moment_formula(c.model, c.triplet, xi, t);
          const auto e = pairing_second_moment(c.triplet, xi, t, c.opts);
          return single(e, target, e.verdict(target));
        }}},
      {"lyapunov.v0",
       {{"z", "kind"},
        [](const Context& c) {
          const auto norm = norm_for(c);
          const Vector z = param_vector(c, "z");
          const double q2 = norm.squared(z);
          const auto e = v0_estimate(norm, c.triplet, z, c.opts);
          return single(e, q2, e.verdict_at_least(q2));
        }}},
      {"lyapunov.qx_moment",
       {{"t", "kind"},
        [](const Context& c) { return single(qx_moment(norm_for(c), c.triplet, param(c, "t"), c.opts), kNaN, {}); }}},
      {"operators.resolvent",
       {{"alpha", "z", "center", "radius"},
        [](const Context& c) {
          const auto f = TestFunction::indicator_ball(c.model, param_vector(c, "center"), param(c, "radius"));
          return single(apply_Ualpha(c.triplet, f, param(c, "alpha"), param_vector(c, "z"), c.opts), kNaN, {});
        }}},
      {"operators.semigroup",
       {{"t", "z", "center", "radius"},
        [](const Context& c) {
          const auto f = TestFunction::indicator_ball(c.model, param_vector(c, "center"), param(c, "radius"));
          return single(apply_Pt(c.triplet, f, param(c, "t"), param_vector(c, "z"), c.opts), kNaN, {});
        }}},
      {"potential.reduced",
       {{"beta", "normal", "level", "z", "dt", "horizon"},
        [](const Context& c) {
          const PathConfig cfg{param(c, "dt", 0.01), param(c, "horizon", 50.0), true};
          const auto M = TargetSet::halfspace(param_vector(c, "normal"), param(c, "level"));
          const auto e = reduced_function(c.triplet, TestFunction::constant(1.0), M, param(c, "beta"),
                                          param_vector(c, "z"), c.opts, cfg);
          return single(e, kNaN, {});
        }}},
      {"dirichlet.slab",
       {{"k", "a", "b", "fa", "fb", "z"},
        [](const Context& c) {
          if (!c.triplet.jump_free() || !c.triplet.driftless())
            throw PreconditionError("dirichlet.slab needs a driftless jump-free triplet");
          const Index k = static_cast<Index>(param(c, "k", 1));
          const double a = param(c, "a");
          const double b = param(c, "b");
          const double fa = param(c, "fa");
          const double fb = param(c, "fb");
          const double mid = 0.5 * (a + b);
          const Domain V = Domain::slab(c.model, k, a, b);
          const BoundaryData f{"slab_faces", [=](const Vector& z) { return z(k - 1) > mid ? fb : fa; },
                               std::max(std::abs(fa), std::abs(fb)), BoundaryClass::bounded_continuous};
          const Vector z = param_vector(c, "z");
          const double x = z(k - 1);
          const double target = fa + (fb - fa) * (x - a) / (b - a);
          const auto r = solve(c.triplet, V, f, z, c.opts, DirichletConfig{});
          return single(r.value, target, r.value.verdict(target));
        }}},
  };
  return ops;
}

const SuiteEntry* suite_entry(const std::string& op) {
  for (const auto& e : suite_entries())
    if (e.op == op) return &e;
  return nullptr;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
  return fnmatch(std::string(pattern).c_str(), std::string(text).c_str(), 0) == 0;
}

std::vector<std::string> registered_ops() {
  std::vector<std::string> out;
  for (const auto& [name, _] : elementary_ops()) out.push_back(name);
  for (const auto& e : suite_entries()) out.push_back(e.op);
  return out;
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "line " << line_of(text, e.byte) << ": " << e.what();
    throw ConfigError(os.str());
  }
  check_keys(root, "config", {"seed", "confidence", "space", "triplet", "experiments"});
  RunConfig cfg;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) config_fail("config.seed", "expected a non-negative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  cfg.confidence = number_or(root, "confidence", kDefaultConfidence, "config");
  if (!(cfg.confidence > 0.5 && cfg.confidence < 1.0)) config_fail("config.confidence", "must lie in (0.5, 1)");

  json space = root.value("space", json::object());
  check_keys(space, "space", {"dim", "weights", "x"});
  const SpaceModel model = build_space(space);
  build_carmona(model, space);
  cfg.space = space.dump();

  json triplet = root.value("triplet", json::object());
  build_triplet(triplet, model.dim(), "triplet");
  cfg.triplet = triplet.dump();

  const json experiments = root.value("experiments", json::array());
  if (!experiments.is_array()) config_fail("config.experiments", "expected an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    const json& e = experiments[i];
    const std::string where = "experiments[" + std::to_string(i) + "]";
    check_keys(e, where, {"name", "op", "samples", "seed", "confidence", "params", "triplet"});
    ExperimentSpec spec;
    if (!e.contains("name") || !e["name"].is_string()) config_fail(where + ".name", "expected a string");
    spec.name = e["name"].get<std::string>();
    if (!names.insert(spec.name).second) config_fail(where + ".name", "duplicate name " + spec.name);
    if (!e.contains("op") || !e["op"].is_string()) config_fail(where + ".op", "expected a string");
    spec.op = e["op"].get<std::string>();
    const json params = e.value("params", json::object());
    if (elementary_ops().contains(spec.op)) {
      check_keys(params, where + ".params", elementary_ops().at(spec.op).keys);
    } else if (suite_entry(spec.op)) {
      check_keys(params, where + ".params", {"scale"});
      if (params.contains("scale") && !(number_at(params, "scale", where + ".params") > 0.0))
        config_fail(where + ".params.scale", "must be positive");
    } else {
      config_fail(where + ".op", "unknown operation " + spec.op);
    }
    spec.params = params.dump();
    const double samples = number_or(e, "samples", 10000, where);
    if (!(samples >= 100) || samples != std::floor(samples)) config_fail(where + ".samples", "must be an integer >= 100");
    spec.samples = static_cast<std::int64_t>(samples);
    if (e.contains("seed")) {
      if (!e["seed"].is_number_unsigned()) config_fail(where + ".seed", "expected a non-negative integer");
      spec.seed = e["seed"].get<std::uint64_t>();
    } else {
      spec.seed = cfg.seed;
    }
    spec.confidence = number_or(e, "confidence", cfg.confidence, where);
    if (!(spec.confidence > 0.5 && spec.confidence < 1.0)) config_fail(where + ".confidence", "must lie in (0.5, 1)");
    const json t = e.value("triplet", triplet);
    build_triplet(t, model.dim(), where + ".triplet");
    spec.triplet = t.dump();
    const json canon{{"op", spec.op},         {"params", params},   {"samples", spec.samples},
                     {"confidence", spec.confidence}, {"triplet", t}, {"space", space}};
    spec.hash = hex64(fnv1a(canon.dump()));
    cfg.experiments.push_back(std::move(spec));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunRecord run(const RunConfig& config, const RunOptions& options) {
  if (options.threads > 0) set_num_threads(options.threads);
  if (!(options.samples_scale > 0.0)) throw ConfigError("samples-scale: must be positive");
  const json space = json::parse(config.space);
  const SpaceModel model = build_space(space);
  RunRecord record;
  for (const auto& spec : config.experiments) {
    if (!glob_match(options.filter, spec.name)) continue;
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = options.seed ? *options.seed : spec.seed;
    ExperimentRecord exp{spec.name, spec.op, spec.hash, "error", {}, 0.0};
    std::vector<ResultRow> rows;
    try {
      const json params = json::parse(spec.params);
      const LevyTriplet triplet = build_triplet(json::parse(spec.triplet), model.dim(), spec.name + ".triplet");
      if (const SuiteEntry* entry = suite_entry(spec.op)) {
        SuiteSettings settings;
        settings.seed = seed;
        settings.confidence = spec.confidence;
        settings.samples_scale = options.samples_scale * params.value("scale", 1.0);
        const SuiteResult res = entry->run(settings);
        exp.verdict = res.pass ? "pass" : "fail";
        exp.summary = res.summary;
        ResultRow head{spec.name, spec.op, spec.hash, static_cast<double>(res.pass), 0.0,
                       static_cast<std::int64_t>(res.rows.size()), 1.0, exp.verdict, 0.0, true};
        rows.push_back(head);
        for (const auto& r : res.rows) {
          std::string key = spec.hash + "/" + r.label;
          for (double p : r.params) key += "," + fmt(p);
          rows.push_back({spec.name + "/" + r.label, spec.op, hex64(fnv1a(key)), r.mean, r.std_error, r.n, r.target,
                          r.verdict, 0.0, false});
        }
      } else {
        EstimatorOptions opts;
        opts.samples = std::max<std::int64_t>(
            100, std::llround(static_cast<double>(spec.samples) * options.samples_scale));
        opts.key = StreamKey{seed, 0}.derive(spec.name);
        opts.confidence = spec.confidence;
        Context ctx{model, space, triplet, params, opts, {}};
        OpOutput res = elementary_ops().at(spec.op).run(ctx);
        exp.verdict = res.verdict;
        exp.summary = res.summary;
        for (auto& r : res.rows) {
          r.experiment = spec.name;
          r.op = spec.op;
          r.param_hash = spec.hash;
          rows.push_back(std::move(r));
        }
      }
    } catch (const std::exception& e) {
      exp.verdict = "error";
      exp.summary = e.what();
      rows.clear();
      rows.push_back({spec.name, spec.op, spec.hash, kNaN, kNaN, 0, kNaN, "error", 0.0, true});
    }
    exp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : rows) {
      if (r.counted) r.seconds = exp.seconds;
      record.rows.push_back(r);
    }
    if (exp.verdict == "pass") ++record.passed;
    else if (exp.verdict == "fail" || exp.verdict == "error") ++record.failed;
    else if (exp.verdict == "inconclusive") ++record.inconclusive;
    record.experiments.push_back(std::move(exp));
  }
  return record;
}

RunRecord run(const std::filesystem::path& config_path, const RunOptions& options) {
  const RunConfig cfg = load_config(config_path);
  RunRecord rec = run(cfg, options);
  write_outputs(rec, cfg, options);
  return rec;
}

std::string to_csv(const RunRecord& record, bool timing) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : record.rows) {
    out += csv_field(r.experiment) + "," + csv_field(r.op) + "," + r.param_hash + "," + fmt(r.mean) + "," +
           fmt(r.std_error) + "," + std::to_string(r.n) + "," + fmt(r.target) + "," + r.verdict + ",";
    if (timing && r.counted) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
      out += buf;
    } else {
      out += "-";
    }
    out += '\n';
  }
  return out;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string to_json(const RunRecord& record, const RunConfig& config, const RunOptions& options) {
  json doc;
  doc["version"] = kLibraryVersion;
  doc["rng"] = kRngAlgorithm;
  doc["seed"] = options.seed ? *options.seed : config.seed;
  doc["samples_scale"] = options.samples_scale;
  doc["threads"] = num_threads();
  doc["counts"] = {{"pass", record.passed}, {"fail", record.failed}, {"inconclusive", record.inconclusive}};
  json exps = json::array();
  for (const auto& e : record.experiments) {
    json rows = json::array();
    for (const auto& r : record.rows) {
      if (r.experiment != e.name && r.experiment.rfind(e.name + "/", 0) != 0) continue;
      rows.push_back({{"experiment", r.experiment},
                      {"param_hash", r.param_hash},
                      {"mean", finite_or_null(r.mean)},
                      {"stderr", finite_or_null(r.std_error)},
                      {"n", r.n},
                      {"target", finite_or_null(r.target)},
                      {"verdict", r.verdict}});
    }
    exps.push_back({{"name", e.name},
                    {"op", e.op},
                    {"spec_hash", e.hash},
                    {"verdict", e.verdict},
                    {"summary", e.summary},
                    {"wall_seconds", e.seconds},
                    {"rows", rows}});
  }
  doc["experiments"] = exps;
  return doc.dump(2);
}

void write_outputs(const RunRecord& record, const RunConfig& config, const RunOptions& options) {
  if (options.out.empty()) return;
  std::filesystem::create_directories(options.out);
  std::ofstream(options.out / "results.csv", std::ios::binary) << to_csv(record, options.timing);
  std::ofstream(options.out / "results.json", std::ios::binary) << to_json(record, config, options) << '\n';
}

VerdictTable verdict_aggregate(const std::vector<McEstimate>& estimates, const std::vector<double>& targets,
                               const std::vector<double>& tolerances) {
  if (estimates.size() != targets.size() || estimates.size() != tolerances.size())
    throw ArgumentError("verdict_aggregate: inputs must have equal lengths");
  VerdictTable t;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const Verdict v = estimates[i].verdict(targets[i], tolerances[i]);
    t.verdicts.push_back(v);
    if (v == Verdict::pass) ++t.passed;
    else if (v == Verdict::fail) ++t.failed;
    else ++t.inconclusive;
  }
  return t;
}

}  // namespace levypot
