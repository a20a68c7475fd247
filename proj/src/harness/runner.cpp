#include "affgeom/harness/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace affgeom::harness {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double parse_num(const json& j, const std::string& what) {
  if (j.is_null()) return kNoParam;
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Inf") return kInf;
    if (s == "-inf") return -kInf;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(what + ": expected a number or \"inf\"");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "-";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <class T>
std::vector<T> list_of(const json& j, const std::string& key, const std::function<T(const json&)>& get) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto& x : j) out.push_back(get(x));
  } else {
    out.push_back(get(j));
  }
  if (out.empty()) throw ConfigError("config: \"" + key + "\" is empty");
  return out;
}

}  // namespace

// ---------------------------------------------------------------- config
Config Config::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> known = {"corpus", "ids",     "n",          "p",
                                              "lambda", "samples", "seed",       "target_rel_err",
                                              "max_doublings", "bodies"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("config: unknown key \"" + k + "\"");
  Config c;
  try {
    // An empty corpus list is allowed: config-defined bodies only.
    if (j.contains("corpus")) {
      c.corpus.clear();
      if (!(j["corpus"].is_array() && j["corpus"].empty()))
        c.corpus = list_of<std::string>(j["corpus"], "corpus", [](const json& x) { return x.get<std::string>(); });
    }
    // An empty id list means every registered id.
    if (j.contains("ids") && !(j["ids"].is_array() && j["ids"].empty())) {
      c.ids = list_of<std::string>(j["ids"], "ids", [](const json& x) { return x.get<std::string>(); });
      for (const auto& id : c.ids) lookup(id);
    }
    if (j.contains("n")) c.n = list_of<int>(j["n"], "n", [](const json& x) { return x.get<int>(); });
    if (j.contains("p")) c.p = list_of<double>(j["p"], "p", [](const json& x) { return parse_num(x, "p"); });
    if (j.contains("lambda"))
      c.lambda = list_of<double>(j["lambda"], "lambda", [](const json& x) { return parse_num(x, "lambda"); });
    if (j.contains("samples")) c.samples = static_cast<std::int64_t>(j["samples"].get<double>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("target_rel_err")) c.target_rel_err = j["target_rel_err"].get<double>();
    if (j.contains("max_doublings")) c.max_doublings = j["max_doublings"].get<int>();
    if (j.contains("bodies")) c.bodies = j["bodies"];
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (int n : c.n)
    if (n < 2 || n > 3) throw ConfigError("config: n must be 2 or 3");
  for (double p : c.p)
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("config: p must be finite and >= 1");
  for (double l : c.lambda)
    if (!(l > 0.0)) throw ConfigError("config: lambda must be positive");
  if (c.samples < 1000) throw ConfigError("config: samples must be at least 1000");
  if (!(c.target_rel_err > 0.0)) throw ConfigError("config: target_rel_err must be positive");
  if (c.max_doublings < 0 || c.max_doublings > 10) throw ConfigError("config: max_doublings must be in [0, 10]");
  if (!c.bodies.is_array()) throw ConfigError("config: \"bodies\" must be an array");
  return c;
}

json Config::to_json() const {
  json j;
  j["corpus"] = corpus;
  j["ids"] = ids;
  j["n"] = n;
  json ps = json::array(), ls = json::array();
  for (double x : p) ps.push_back(num(x));
  for (double x : lambda) ls.push_back(num(x));
  j["p"] = ps;
  j["lambda"] = ls;
  j["samples"] = samples;
  j["seed"] = seed;
  j["target_rel_err"] = target_rel_err;
  j["max_doublings"] = max_doublings;
  j["bodies"] = bodies;
  return j;
}

// --------------------------------------------------------------- verdicts
const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Report: return "report";
    case Verdict::Trivial: return "trivial";
    case Verdict::Flag: return "flag";
  }
  return "?";
}

int Report::count(Verdict v) const {
  return static_cast<int>(std::count_if(cases.begin(), cases.end(), [v](const CaseResult& c) { return c.verdict == v; }));
}

namespace {
constexpr double kDeterministicTol = 1e-6;
constexpr double kRoundoff = 1e-10;
}

Verdict judge(Relation relation, bool equality, const Estimate& ratio, bool trivial) {
  if (relation == Relation::Report) return Verdict::Report;
  if (trivial) return Verdict::Trivial;
  if (!std::isfinite(ratio.value)) return Verdict::Fail;
  // Monte-Carlo ratios whose sampled parts cancel exactly keep a round-off floor.
  const double slack = ratio.is_mc() ? std::max(3.0 * ratio.sigma, kRoundoff) : kDeterministicTol;
  if (equality || relation == Relation::Equal) return std::abs(ratio.value - 1.0) <= slack ? Verdict::Pass : Verdict::Fail;
  return ratio.value >= 1.0 - slack ? Verdict::Pass : Verdict::Fail;
}

CaseResult run_case(const Case& c, const Config& cfg) {
  CaseResult r;
  r.id = c.id;
  r.instance = c.instance;
  r.n = c.n;
  r.p = c.p;
  r.lambda = c.lambda;
  r.relation = c.relation;
  r.equality = c.equality;
  r.seed = mix_seed(cfg.seed, hash_tag(c.key().c_str()));

  Budget B;
  B.samples = cfg.samples;
  B.seed = r.seed;
  B.stream = 0;
  B.exec = Exec::Parallel;
  B.tolerance = cfg.target_rel_err;

  const auto t0 = std::chrono::steady_clock::now();
  bool trivial = false;
  try {
    for (;;) {
      const Sides s = c.compute(B);
      r.lhs = s.lhs;
      r.rhs = s.rhs;
      r.note = s.note;
      trivial = s.trivial || s.rhs.value == 0.0;
      r.ratio = trivial ? Estimate::exact(kInf) : s.lhs / s.rhs;
      r.samples = B.samples;
      const bool short_of_target = r.ratio.is_mc() && r.ratio.relative_error() > cfg.target_rel_err;
      if (!short_of_target || r.doublings >= cfg.max_doublings) break;
      B = B.with_samples(2 * B.samples);
      ++r.doublings;
    }
    r.verdict = judge(c.relation, c.equality, r.ratio, trivial);
    if (r.verdict == Verdict::Fail && r.ratio.is_mc() && r.ratio.relative_error() > cfg.target_rel_err) {
      r.verdict = Verdict::Flag;
      r.note += (r.note.empty() ? "" : "; ") + std::string("sample cap reached above target error");
    }
  } catch (const CapacityError& e) {
    r.verdict = Verdict::Flag;
    r.note = std::string("capacity: ") + e.what();
  } catch (const std::exception& e) {
    r.verdict = c.relation == Relation::Report ? Verdict::Report : Verdict::Fail;
    r.ratio = Estimate::exact(std::nan(""));
    r.note = std::string("error: ") + e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ------------------------------------------------------------------ run
int configure_threads() {
  if (const char* env = std::getenv("AFFGEOM_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) omp_set_num_threads(t);
  }
  return omp_get_max_threads();
}

namespace {

std::vector<NamedBody> collect_bodies(const Config& cfg, int n) {
  std::vector<NamedBody> out;
  std::set<std::string> seen;
  for (const auto& name : cfg.corpus) {
    if (name == "functions") continue;
    for (auto& b : body_corpus(name, n, cfg.seed))
      if (seen.insert(b.name).second) out.push_back(std::move(b));
  }
  for (const auto& node : cfg.bodies) {
    if (node.value("n", n) != n) continue;
    NamedBody b = body_from_json(node, n);
    if (b.body.dim() != n) continue;
    while (!seen.insert(b.name).second) b.name += "'";
    out.push_back(std::move(b));
  }
  return out;
}

bool wants_functions(const Config& cfg) {
  return std::find(cfg.corpus.begin(), cfg.corpus.end(), "functions") != cfg.corpus.end();
}

// Lambda used to build the function corpus for lambda-free statements.
constexpr double kCorpusLambda = 2.0;

}  // namespace

Report run(const Config& cfg, const Progress& progress) {
  Report rep;
  rep.config = cfg;
  rep.threads = omp_get_max_threads();

  std::vector<std::string> ids = cfg.ids;
  if (ids.empty())
    for (const auto& s : registry()) ids.push_back(s.id);
  // Registry order, whatever order the config used.
  std::vector<const InequalitySpec*> specs;
  for (const auto& s : registry())
    if (std::find(ids.begin(), ids.end(), s.id) != ids.end()) specs.push_back(&s);
  for (const auto& id : ids) lookup(id);

  Budget base;
  base.samples = cfg.samples;
  base.seed = cfg.seed;
  base.tolerance = cfg.target_rel_err;
  ConstantCatalog constants(base);

  std::map<int, std::vector<NamedBody>> bodies;
  std::map<std::tuple<int, std::string, std::string>, std::vector<NamedFunction>> functions;
  const bool use_functions = wants_functions(cfg);

  auto corpus_functions = [&](int n, double p, double lambda) -> const std::vector<NamedFunction>& {
    auto key = std::make_tuple(n, fmt(p), fmt(lambda));
    auto it = functions.find(key);
    if (it != functions.end()) return it->second;
    auto fs = use_functions ? function_corpus(n, p, lambda, cfg.seed) : std::vector<NamedFunction>{};
    CorpusSummary s;
    s.n = n;
    s.p = p;
    s.lambda = lambda;
    for (const auto& b : bodies[n]) s.bodies.push_back(b.name);
    for (const auto& f : fs) s.functions.push_back(f.name);
    s.worst_gradient_error = audit_gradients(fs);
    rep.corpora.push_back(std::move(s));
    return functions.emplace(key, std::move(fs)).first->second;
  };

  for (int n : cfg.n) bodies[n] = collect_bodies(cfg, n);

  for (const InequalitySpec* spec : specs) {
    if (spec->domain == Domain::Functions && !use_functions) continue;
    for (int n : cfg.n)
      for (double p : cfg.p) {
        std::vector<double> lambdas = spec->uses_lambda ? cfg.lambda : std::vector<double>{kNoParam};
        for (double lambda : lambdas) {
          CaseInputs in;
          in.n = n;
          in.p = p;
          in.lambda = lambda;
          in.bodies = &bodies[n];
          if (spec->domain == Domain::Functions)
            in.functions = &corpus_functions(n, p, spec->uses_lambda ? lambda : kCorpusLambda);
          for (const Case& c : build_cases(spec->id, in, constants)) {
            rep.cases.push_back(run_case(c, cfg));
            if (progress) progress(rep.cases.back());
          }
        }
      }
  }
  rep.constants = constants.records();
  return rep;
}

// ----------------------------------------------------------------- emit
namespace {

json estimate_json(const Estimate& e) {
  return json{{"value", num(e.value)},
              {"sigma", num(e.sigma)},
              {"samples", e.samples},
              {"method", to_string(e.method)},
              {"status", to_string(e.status)}};
}

}  // namespace

json to_json(const Report& r) {
  json j;
  j["format"] = "affgeom-report";
  j["version"] = 1;
  j["config"] = r.config.to_json();
  j["threads"] = r.threads;
  json cs = json::array();
  for (const auto& c : r.constants)
    cs.push_back({{"name", c.name},
                  {"n", c.n},
                  {"p", num(c.p)},
                  {"lambda", num(c.lambda)},
                  {"value", num(c.value)},
                  {"sigma", num(c.sigma)},
                  {"provenance", to_string(c.provenance)},
                  {"oracle", c.oracle},
                  {"samples", c.samples},
                  {"seed", c.seed},
                  {"status", to_string(c.status)}});
  j["constants"] = cs;
  json corp = json::array();
  for (const auto& s : r.corpora)
    corp.push_back({{"n", s.n},
                    {"p", num(s.p)},
                    {"lambda", num(s.lambda)},
                    {"bodies", s.bodies},
                    {"functions", s.functions},
                    {"worst_gradient_error", s.worst_gradient_error}});
  j["corpus"] = corp;
  json cases = json::array();
  for (const auto& c : r.cases)
    cases.push_back({{"id", c.id},
                     {"instance", c.instance},
                     {"n", c.n},
                     {"p", num(c.p)},
                     {"lambda", num(c.lambda)},
                     {"relation", to_string(c.relation)},
                     {"equality", c.equality},
                     {"lhs", estimate_json(c.lhs)},
                     {"rhs", estimate_json(c.rhs)},
                     {"ratio", estimate_json(c.ratio)},
                     {"status", to_string(c.verdict)},
                     {"seed", c.seed},
                     {"samples", c.samples},
                     {"doublings", c.doublings},
                     {"wall_seconds", c.wall_seconds},
                     {"note", c.note}});
  j["cases"] = cases;
  j["summary"] = {{"pass", r.count(Verdict::Pass)},
                  {"fail", r.count(Verdict::Fail)},
                  {"flag", r.count(Verdict::Flag)},
                  {"trivial", r.count(Verdict::Trivial)},
                  {"report", r.count(Verdict::Report)}};
  return j;
}

void write_json(const Report& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_json(r).dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_csv(const Report& r, std::ostream& os) {
  os << "id,n,p,lambda,ratio,stderr,status,seed,samples\n";
  for (const auto& c : r.cases)
    os << c.id << ',' << c.n << ',' << fmt(c.p) << ',' << fmt(c.lambda) << ',' << fmt(c.ratio.value) << ','
       << fmt(c.ratio.sigma) << ',' << to_string(c.verdict) << ',' << c.seed << ',' << c.samples << '\n';
}

void write_csv(const Report& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(r, os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> write_gnuplot(const Report& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::ostringstream> files;
  for (const auto& c : r.cases) {
    auto& os = files[c.id];
    if (os.tellp() == 0) os << "# " << c.id << ": n p lambda ratio stderr status instance\n";
    os << c.n << ' ' << fmt(c.p) << ' ' << (std::isnan(c.lambda) ? "nan" : fmt(c.lambda)) << ' '
       << fmt(c.ratio.value) << ' ' << fmt(c.ratio.sigma) << ' ' << to_string(c.verdict) << " \"" << c.instance
       << "\"\n";
  }
  std::vector<std::string> written;
  for (const auto& [id, os] : files) {
    const std::string path = (std::filesystem::path(dir) / (id + ".dat")).string();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << os.str();
    written.push_back(path);
  }
  return written;
}

// ------------------------------------------------------------- validate
namespace {

bool is_num_or_special(const json& j) {
  return j.is_number() || j.is_null() || (j.is_string() && (j == "inf" || j == "-inf"));
}

void check_estimate(const json& e, const std::string& where, std::vector<std::string>& errs) {
  if (!e.is_object()) {
    errs.push_back(where + ": not an object");
    return;
  }
  for (const char* k : {"value", "sigma"})
    if (!e.contains(k) || !is_num_or_special(e[k])) errs.push_back(where + "." + k + ": missing or not numeric");
  if (!e.contains("samples") || !e["samples"].is_number_integer()) errs.push_back(where + ".samples: not an integer");
  static const std::set<std::string> methods = {"monte-carlo", "quadrature", "closed-form"};
  if (!e.contains("method") || !e["method"].is_string() || !methods.count(e["method"].get<std::string>()))
    errs.push_back(where + ".method: invalid");
  if (!e.contains("status") || !e["status"].is_string()) errs.push_back(where + ".status: invalid");
}

}  // namespace

std::vector<std::string> validate_report(const json& j) {
  std::vector<std::string> errs;
  if (!j.is_object()) return {"report: not an object"};
  if (j.value("format", "") != "affgeom-report") errs.push_back("format: expected \"affgeom-report\"");
  if (!j.contains("version") || !j["version"].is_number_integer()) errs.push_back("version: missing");
  if (!j.contains("config") || !j["config"].is_object()) {
    errs.push_back("config: missing");
  } else {
    try {
      Config::from_json(j["config"]);
    } catch (const std::exception& e) {
      errs.push_back(std::string("config: ") + e.what());
    }
  }
  if (!j.contains("threads") || !j["threads"].is_number_integer()) errs.push_back("threads: missing");

  if (!j.contains("constants") || !j["constants"].is_array()) {
    errs.push_back("constants: missing");
  } else {
    for (std::size_t i = 0; i < j["constants"].size(); ++i) {
      const json& c = j["constants"][i];
      const std::string w = "constants[" + std::to_string(i) + "]";
      if (!c.contains("name") || !c["name"].is_string()) errs.push_back(w + ".name: missing");
      if (!c.contains("value") || !is_num_or_special(c["value"])) errs.push_back(w + ".value: missing");
      const std::string prov = c.value("provenance", "");
      if (prov != "closed-form" && prov != "derived-oracle") errs.push_back(w + ".provenance: invalid");
    }
  }

  static const std::set<std::string> relations = {">=", "=", "report"};
  static const std::set<std::string> statuses = {"pass", "fail", "report", "trivial", "flag"};
  if (!j.contains("cases") || !j["cases"].is_array()) {
    errs.push_back("cases: missing");
    return errs;
  }
  for (std::size_t i = 0; i < j["cases"].size(); ++i) {
    const json& c = j["cases"][i];
    const std::string w = "cases[" + std::to_string(i) + "]";
    if (!c.is_object()) {
      errs.push_back(w + ": not an object");
      continue;
    }
    if (!c.contains("id") || !c["id"].is_string()) {
      errs.push_back(w + ".id: missing");
    } else {
      try {
        const auto& spec = lookup(c["id"].get<std::string>());
        if (c.value("relation", "") != to_string(spec.relation)) errs.push_back(w + ".relation: does not match registry");
      } catch (const ConfigError&) {
        errs.push_back(w + ".id: not registered");
      }
    }
    if (!c.contains("instance") || !c["instance"].is_string()) errs.push_back(w + ".instance: missing");
    if (!c.contains("n") || !c["n"].is_number_integer()) errs.push_back(w + ".n: missing");
    for (const char* k : {"p", "lambda"})
      if (!c.contains(k) || !is_num_or_special(c[k])) errs.push_back(w + "." + k + ": missing");
    if (!relations.count(c.value("relation", ""))) errs.push_back(w + ".relation: invalid");
    if (!statuses.count(c.value("status", ""))) errs.push_back(w + ".status: invalid");
    if (!c.contains("equality") || !c["equality"].is_boolean()) errs.push_back(w + ".equality: missing");
    for (const char* k : {"lhs", "rhs", "ratio"})
      if (c.contains(k)) check_estimate(c[k], w + "." + k, errs);
      else errs.push_back(w + "." + k + ": missing");
    if (!c.contains("seed") || !c["seed"].is_number_unsigned()) errs.push_back(w + ".seed: missing");
    if (!c.contains("samples") || !c["samples"].is_number_integer()) errs.push_back(w + ".samples: missing");
    if (!c.contains("wall_seconds") || !c["wall_seconds"].is_number()) errs.push_back(w + ".wall_seconds: missing");
  }
  return errs;
}

}  // namespace affgeom::harness
