#include <doctest.h>

#include "affgeom/core/volume.hpp"
#include "affgeom/harness/corpus.hpp"
#include "affgeom/harness/registry.hpp"
#include "affgeom/harness/runner.hpp"
#include "oracles.hpp"

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace affgeom;
using namespace affgeom::harness;
using nlohmann::json;

namespace {

std::string csv_of(const Report& r) {
  std::ostringstream os;
  write_csv(r, os);
  return os.str();
}

Config small_config(const std::string& text) { return Config::from_json(json::parse(text)); }

CaseResult run_single(const std::string& id, CaseInputs in, std::int64_t samples, const std::string& instance = {}) {
  Budget base;
  base.samples = samples;
  ConstantCatalog constants(base);
  Config cfg;
  cfg.samples = samples;
  for (const Case& c : build_cases(id, in, constants))
    if (instance.empty() || c.instance == instance) return run_case(c, cfg);
  FAIL("no such instance");
  return {};
}

}  // namespace

TEST_CASE("registry lists every statement once") {
  const auto& specs = registry();
  CHECK(specs.size() == 21);
  std::set<std::string> ids, report;
  for (const auto& s : specs) {
    CHECK(ids.insert(s.id).second);
    CHECK_FALSE(s.display.empty());
    if (s.relation == Relation::Report) report.insert(s.id);
  }
  CHECK(report == std::set<std::string>{"petty_probe", "conj_5_1", "sobolevish_5_5", "stronger_5_8", "stronger_p_5_9"});
  CHECK(lookup("equivalence_id").relation == Relation::Equal);
  CHECK_THROWS_AS(lookup("no_such_id"), ConfigError);
}

TEST_CASE("corpora") {
  for (int n : {2, 3}) {
    const auto standard = body_corpus("standard", n, 1);
    CHECK(standard.size() >= 8);
    std::set<std::string> names;
    for (const auto& b : standard) {
      CHECK(b.body.dim() == n);
      CHECK(names.insert(b.name).second);
      CHECK(b.polytope == b.body.facets().has_value());
    }
    for (const auto& b : body_corpus("smooth", n, 1)) {
      CHECK(b.smooth);
      CHECK_FALSE(b.polytope);
      CHECK(b.body.is_smooth());
    }
    const auto fs = function_corpus(n, 1.0, 2.0, 3);
    CHECK(fs.size() >= 6);
    CHECK(audit_gradients(fs) < 1e-6);
  }
  CHECK_THROWS_AS(body_corpus("nonsense", 2, 1), ConfigError);
}

TEST_CASE("bodies from config nodes") {
  const auto cube = body_from_json(json{{"kind", "cube"}, {"half_side", 0.5}, {"n", 3}}, 2);
  CHECK(cube.body.dim() == 3);
  CHECK(*cube.body.exact_volume() == doctest::Approx(1.0));

  const auto sheared = body_from_json(
      json::parse(R"({"kind": "ball", "linear_map": [[2, 1], [0, 1]], "name": "skew"})"), 2);
  CHECK(sheared.name == "skew");
  CHECK(volume(sheared.body, Budget{}).value == doctest::Approx(2.0 * oracle::pi));

  const auto moved = body_from_json(json::parse(R"({"kind": "ball", "translate": [0.1, 0]})"), 2);
  CHECK_FALSE(moved.symmetric);
  CHECK_THROWS_AS(body_from_json(json{{"kind", "torus"}}, 2), ConfigError);
}

TEST_CASE("config parsing") {
  const Config d = Config::from_json(json::object());
  CHECK(d.samples == 100'000);
  CHECK(d.corpus.size() == 3);

  const Config c = small_config(R"({"n": 3, "p": [1, 1.5], "lambda": ["inf", 0.9], "samples": 1e5})");
  CHECK(c.n == std::vector<int>{3});
  CHECK(std::isinf(c.lambda[0]));
  CHECK(c.samples == 100000);
  // Round trip through JSON.
  const Config back = Config::from_json(c.to_json());
  CHECK(back.p == c.p);
  CHECK(std::isinf(back.lambda[0]));

  CHECK_THROWS_AS(small_config(R"({"sample": 10})"), ConfigError);
  CHECK_THROWS_AS(small_config(R"({"ids": ["rsi_x"]})"), ConfigError);
  CHECK_THROWS_AS(small_config(R"({"n": 7})"), ConfigError);
  CHECK_THROWS_AS(small_config(R"({"p": 0.5})"), ConfigError);
  CHECK_THROWS_AS(run(small_config(R"({"corpus": ["weird"], "ids": ["rsi_s"], "n": 2, "p": 1})")), ConfigError);
}

TEST_CASE("verdict thresholds") {
  const auto mc = [](double v, double s) { return Estimate::monte_carlo(v, s, 1000); };
  CHECK(judge(Relation::AtLeast, false, mc(0.97, 0.01), false) == Verdict::Pass);
  CHECK(judge(Relation::AtLeast, false, mc(0.96, 0.01), false) == Verdict::Fail);
  CHECK(judge(Relation::AtLeast, true, mc(1.05, 0.01), false) == Verdict::Fail);
  CHECK(judge(Relation::Equal, false, mc(1.02, 0.01), false) == Verdict::Pass);
  CHECK(judge(Relation::Equal, false, mc(0.95, 0.01), false) == Verdict::Fail);
  CHECK(judge(Relation::AtLeast, false, Estimate::quadrature(1.0 - 5e-7), false) == Verdict::Pass);
  CHECK(judge(Relation::AtLeast, false, Estimate::quadrature(1.0 - 5e-6), false) == Verdict::Fail);
  CHECK(judge(Relation::AtLeast, false, Estimate::exact(0.2), true) == Verdict::Trivial);
  CHECK(judge(Relation::Report, false, mc(0.1, 0.01), false) == Verdict::Report);
}

TEST_CASE("worked examples") {
  const auto balls = body_corpus("smooth", 2, 1);
  CaseInputs in;
  in.n = 2;
  in.p = 1.0;
  in.bodies = &balls;

  const CaseResult rsi = run_single("rsi_s", in, 200'000, "ball,ball");
  CHECK(rsi.verdict == Verdict::Pass);
  CHECK(rsi.equality);
  CHECK(std::abs(rsi.ratio.value - 1.0) <= 3.0 * rsi.ratio.sigma);

  const CaseResult petty = run_single("petty_probe", in, 10'000, "ball");
  CHECK(petty.verdict == Verdict::Report);
  CHECK(petty.rhs.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(petty.ratio.value == doctest::Approx(1.0).epsilon(1e-5));

  const std::vector<NamedFunction> bump = {
      {"radial_bump", CompactFunction::radial({ConvexBody::ball(2), bump_profile(3), 1.0, 1.0}), "radial_bump", true}};
  in.functions = &bump;
  const CaseResult z = run_single("zhang_5_7", in, 100'000);
  CHECK(z.verdict == Verdict::Pass);
  CHECK(z.ratio.value >= 1.0 - 3.0 * z.ratio.sigma);

  // A polytope makes the dual bound vanish: trivially satisfied, flagged as such.
  const auto standard = body_corpus("standard", 2, 1);
  in.bodies = &standard;
  const CaseResult triv = run_single("rsid_s", in, 10'000, "cube,cube");
  CHECK(triv.verdict == Verdict::Trivial);
}

TEST_CASE("sweeps, emission and validation") {
  const Config cfg = small_config(R"({
    "corpus": [], "ids": ["mv_ineq", "levelset"], "n": [2], "p": [1, 1.5, 2, 3],
    "lambda": [2], "samples": 20000, "seed": 9,
    "bodies": [{"kind": "cube", "name": "box"}]})");
  const Report r = run(cfg);
  int mv = 0;
  for (const auto& c : r.cases) mv += c.id == "mv_ineq";
  CHECK(mv == 4);  // one instance (box,box) per p
  CHECK(r.ok());

  const std::string csv = csv_of(r);
  CHECK(csv.rfind("id,n,p,lambda,ratio,stderr,status,seed,samples\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.cases.size()) + 1);

  const json j = to_json(r);
  CHECK(validate_report(j).empty());
  CHECK(validate_report(json::parse(j.dump())).empty());
  json bad = j;
  bad["cases"][0]["status"] = "maybe";
  bad["cases"][1].erase("seed");
  CHECK(validate_report(bad).size() == 2);
  CHECK_FALSE(validate_report(json::array()).empty());

  const auto dir = std::filesystem::temp_directory_path() / "affgeom_gnuplot_test";
  std::filesystem::remove_all(dir);
  const auto files = write_gnuplot(r, dir.string());
  CHECK(files.size() == 2);
  std::ifstream f(dir / "mv_ineq.dat");
  std::string header;
  std::getline(f, header);
  CHECK(header.rfind("# mv_ineq", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reports are reproducible") {
  const Config cfg = small_config(R"({
    "corpus": ["smooth"], "ids": ["rsi_s", "dmv_ineq"], "n": [2], "p": [1],
    "samples": 20000, "seed": 5})");
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string a = csv_of(run(cfg));
  omp_set_num_threads(std::max(2, threads));
  const std::string b = csv_of(run(cfg));
  omp_set_num_threads(threads);
  CHECK(a == b);
  Config other = cfg;
  other.seed = 6;
  CHECK(csv_of(run(other)) != a);
}
