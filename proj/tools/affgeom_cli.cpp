#include "affgeom/constants/constants.hpp"
#include "affgeom/core/volume.hpp"
#include "affgeom/harness/corpus.hpp"
#include "affgeom/harness/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace affgeom;
using namespace affgeom::harness;
using nlohmann::json;

namespace {

double parse_lambda(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return kInf;
  return std::stod(s);
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

void print_case(const CaseResult& c) {
  std::fprintf(stderr, "%-18s n=%d p=%-4g lambda=%-4s %-40s ratio=%.6f +- %.2e  %s  (%.2fs)\n", c.id.c_str(), c.n,
               c.p, std::isnan(c.lambda) ? "-" : (std::isinf(c.lambda) ? "inf" : std::to_string(c.lambda).substr(0, 4)).c_str(),
               c.instance.substr(0, 40).c_str(), c.ratio.value, c.ratio.sigma, to_string(c.verdict), c.wall_seconds);
}

struct VerifyOpts {
  std::string config;
  std::vector<std::string> corpus, ids, lambdas;
  std::vector<int> n;
  std::vector<double> p;
  double samples = 0;
  std::uint64_t seed = 0;
  double target = 0;
  int doublings = -1;
  std::string out, csv, gnuplot;
  bool quiet = false;
};

int verify(const VerifyOpts& o) {
  json j = json::object();
  if (!o.corpus.empty()) j["corpus"] = o.corpus;
  if (!o.ids.empty()) j["ids"] = o.ids;
  if (!o.n.empty()) j["n"] = o.n;
  if (!o.p.empty()) j["p"] = o.p;
  if (!o.lambdas.empty()) j["lambda"] = o.lambdas;
  if (o.samples > 0) j["samples"] = o.samples;
  if (o.seed) j["seed"] = o.seed;
  if (o.target > 0) j["target_rel_err"] = o.target;
  if (o.doublings >= 0) j["max_doublings"] = o.doublings;
  // Values in the config file take precedence over flags.
  if (!o.config.empty()) j.update(read_json_file(o.config));
  const Config cfg = Config::from_json(j);

  const int threads = configure_threads();
  if (!o.quiet) std::fprintf(stderr, "threads: %d\n", threads);
  const Report rep = run(cfg, o.quiet ? Progress{} : Progress{print_case});
  if (!o.out.empty()) write_json(rep, o.out);
  if (!o.csv.empty()) write_csv(rep, o.csv);
  if (!o.gnuplot.empty()) write_gnuplot(rep, o.gnuplot);
  if (o.out.empty() && o.csv.empty()) write_csv(rep, std::cout);
  std::fprintf(stderr, "pass %d  fail %d  flag %d  trivial %d  report %d\n", rep.count(Verdict::Pass),
               rep.count(Verdict::Fail), rep.count(Verdict::Flag), rep.count(Verdict::Trivial),
               rep.count(Verdict::Report));
  return rep.ok() ? 0 : 1;
}

int constants_cmd(int n, double p, const std::string& lambda, double samples, std::uint64_t seed, bool dump,
                  const std::string& save) {
  configure_threads();
  Budget base;
  base.samples = static_cast<std::int64_t>(samples);
  base.seed = seed;
  const double lam = parse_lambda(lambda);
  std::vector<ConstantRecord> recs;
  const ConstantRecord b = b_np(n, p, constants_budget(base));
  recs.push_back(b);
  recs.push_back(c_np(n, p));
  if (lambda_admissible(n, p, lam)) {
    const ConstantRecord m = moment_constant(n, p, lam);
    recs.push_back(m);
    recs.push_back(levelset_constant_record(n, p, lam));
    std::optional<ConstantRecord> cnv;
    if (p < n) {
      cnv = cnv_np(n, p);
      recs.push_back(*cnv);
    }
    for (const auto& r : derived_constants(n, p, lam, b, m, cnv).all()) recs.push_back(r);
  } else {
    recs.push_back(petty_bound(n));
  }
  recs.push_back(rsid_f_constant_inf(n, p, b));
  if (dump || save.empty()) {
    std::printf("%-10s %2s %6s %7s %22s %12s  %-14s %s\n", "name", "n", "p", "lambda", "value", "sigma", "provenance",
                "oracle");
    for (const auto& r : recs) {
      auto f = [](double v) { return std::isnan(v) ? std::string("-") : (std::isinf(v) ? "inf" : std::to_string(v)); };
      std::printf("%-10s %2d %6s %7s %22.15g %12.3g  %-14s %s\n", r.name.c_str(), r.n, f(r.p).substr(0, 6).c_str(),
                  f(r.lambda).substr(0, 7).c_str(), r.value, r.sigma, to_string(r.provenance), r.oracle.c_str());
    }
  }
  if (!save.empty()) {
    ConstantCache cache;
    for (const auto& r : recs) cache.store(r);
    cache.save(save);
  }
  return 0;
}

int body_volume(const std::string& kind, int n, double half_side, double radius, double q, double samples,
                std::uint64_t seed, bool mc) {
  json node{{"kind", kind}, {"n", n}};
  if (kind == "cube") node["half_side"] = half_side;
  if (kind == "ball") node["radius"] = radius;
  if (kind == "lq_ball") node["q"] = q;
  if (kind == "random_polytope") node["seed"] = seed;
  const NamedBody nb = body_from_json(node, n);
  Budget b;
  b.samples = static_cast<std::int64_t>(samples);
  b.seed = seed;
  const Estimate v = volume(nb.body, b, mc ? VolumeBackend::RejectionMC : VolumeBackend::Auto);
  std::printf("%s volume %.12g +- %.3g (%s)\n", nb.body.describe().c_str(), v.value, v.sigma, to_string(v.method));
  return 0;
}

// Random search for small ratios of a probe statement. Exit code is 0 no
// matter what the ratios are: the statements are open.
int probe(const std::string& ineq, const std::string& search, int iters, int n, double p, double samples,
          std::uint64_t seed, const std::string& log_path) {
  configure_threads();
  const InequalitySpec& spec = lookup(ineq);
  Config cfg;
  cfg.samples = static_cast<std::int64_t>(samples);
  cfg.seed = seed;
  cfg.max_doublings = 0;
  Budget base;
  base.samples = cfg.samples;
  base.seed = seed;
  ConstantCatalog constants(base);

  std::ofstream log;
  if (!log_path.empty()) log.open(log_path);
  std::ostream& out = log_path.empty() ? std::cout : log;
  out << "iter,instance,ratio,stderr,status\n";

  double best = kInf;
  std::string best_name;
  Engine eng(splitmix64(seed));
  for (int it = 0; it < iters; ++it) {
    std::vector<NamedBody> bodies;
    std::vector<NamedFunction> functions;
    const std::uint64_t s = mix_seed(seed, it);
    if (spec.domain == Domain::Bodies) {
      if (search == "random-polytopes") {
        // Mixed tuples: n different random polytopes.
        for (int k = 0; k < n; ++k) {
          const int pts = 4 + static_cast<int>(uniform01(eng) * 10);
          bodies.push_back({"rp" + std::to_string(it) + "_" + std::to_string(k), random_polytope(n, pts, mix_seed(s, k)),
                            false, false, true, false});
        }
      } else if (search == "corpus") {
        bodies = body_corpus("standard", n, s);
      } else {
        throw ConfigError("probe: unknown search \"" + search + "\"");
      }
    } else {
      if (search != "random-bumps" && search != "corpus") throw ConfigError("probe: use --search random-bumps");
      if (search == "corpus") functions = function_corpus(n, p, 2.0, s);
      else functions.push_back({"bumps" + std::to_string(it), random_bumps(n, 2 + it % 4, s), "bump", false});
    }
    CaseInputs in;
    in.n = n;
    in.p = p;
    in.lambda = kNoParam;
    in.bodies = &bodies;
    in.functions = &functions;
    for (const Case& c : build_cases(ineq, in, constants)) {
      const CaseResult r = run_case(c, cfg);
      out << it << ",\"" << r.instance << "\"," << r.ratio.value << ',' << r.ratio.sigma << ','
          << to_string(r.verdict) << '\n';
      if (r.ratio.value < best) {
        best = r.ratio.value;
        best_name = r.instance;
      }
    }
    if (search == "corpus") break;
  }
  std::printf("%s: minimum ratio %.6f at %s\n", ineq.c_str(), best, best_name.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of affine isoperimetric and random-simplex inequalities"};
  app.require_subcommand(1);

  VerifyOpts vo;
  auto* v = app.add_subcommand("verify", "run the inequality registry over a corpus");
  v->add_option("--config", vo.config, "JSON config; its values override flags");
  v->add_option("--corpus", vo.corpus, "body/function corpora (standard, smooth, functions)");
  v->add_option("--ids", vo.ids, "registry ids to run (default all)");
  v->add_option("--n", vo.n, "dimensions");
  v->add_option("--p", vo.p, "exponents p");
  v->add_option("--lambda", vo.lambdas, "lambda / alpha values (inf allowed)");
  v->add_option("--samples", vo.samples, "Monte-Carlo samples per estimate");
  v->add_option("--seed", vo.seed, "master seed");
  v->add_option("--target", vo.target, "target relative standard error");
  v->add_option("--max-doublings", vo.doublings, "cap on budget doublings");
  v->add_option("--out", vo.out, "JSON report path");
  v->add_option("--csv", vo.csv, "CSV report path");
  v->add_option("--gnuplot", vo.gnuplot, "directory for per-id gnuplot data");
  v->add_flag("--quiet", vo.quiet, "no per-case progress");

  int cn = 2;
  double cp = 1.0, csamples = 1e5;
  std::string clambda = "2", csave;
  std::uint64_t cseed = 42;
  bool cdump = false;
  auto* c = app.add_subcommand("constants", "derive and print the sharp constants");
  c->add_option("--n", cn, "dimension");
  c->add_option("--p", cp, "exponent p");
  c->add_option("--lambda", clambda, "lambda (inf allowed)");
  c->add_option("--samples", csamples, "base budget (b uses max(4e6, 4x))");
  c->add_option("--seed", cseed, "seed");
  c->add_flag("--dump", cdump, "print the table");
  c->add_option("--save", csave, "write the records as a JSON cache file");

  auto* body = app.add_subcommand("body", "body utilities");
  body->require_subcommand(1);
  std::string kind = "cube";
  int bn = 2;
  double half = 1.0, radius = 1.0, q = 2.0, bsamples = 1e6;
  std::uint64_t bseed = 1;
  bool bmc = false;
  auto* bv = body->add_subcommand("volume", "volume of a body");
  bv->add_option("--kind", kind, "ball, cube, lq_ball, centered_simplex, random_polytope")->required();
  bv->add_option("--n", bn, "dimension");
  bv->add_option("--half-side", half, "cube half side");
  bv->add_option("--radius", radius, "ball radius");
  bv->add_option("--q", q, "lq exponent");
  bv->add_option("--samples", bsamples, "samples for Monte-Carlo volume");
  bv->add_option("--seed", bseed, "seed");
  bv->add_flag("--mc", bmc, "force rejection Monte-Carlo");

  std::string ineq, search = "random-polytopes", plog;
  int iters = 20, pn = 2;
  double pp = 1.0, psamples = 5e4;
  std::uint64_t pseed = 42;
  auto* pr = app.add_subcommand("probe", "search for small ratios of an open statement");
  pr->add_option("--ineq", ineq, "probe id")->required();
  pr->add_option("--search", search, "random-polytopes, random-bumps or corpus");
  pr->add_option("--iters", iters, "search iterations");
  pr->add_option("--n", pn, "dimension");
  pr->add_option("--p", pp, "exponent p");
  pr->add_option("--samples", psamples, "samples per estimate");
  pr->add_option("--seed", pseed, "seed");
  pr->add_option("--log", plog, "CSV search log path (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (v->parsed()) return verify(vo);
    if (c->parsed()) return constants_cmd(cn, cp, clambda, csamples, cseed, cdump, csave);
    if (bv->parsed()) return body_volume(kind, bn, half, radius, q, bsamples, bseed, bmc);
    if (pr->parsed()) return probe(ineq, search, iters, pn, pp, psamples, pseed, plog);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
