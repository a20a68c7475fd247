#pragma once

#include "affgeom/harness/registry.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace affgeom::harness {

// Verification run configuration. JSON form (every key optional):
//   {"corpus": ["standard", "smooth", "functions"], "ids": ["rsi_s", ...],
//    "n": [2, 3], "p": [1, 2], "lambda": [2, "inf"], "samples": 100000,
//    "seed": 42, "target_rel_err": 0.01, "max_doublings": 2,
//    "bodies": [{"kind": "cube", ...}, ...]}
// "functions" in the corpus list enables the function statements; "bodies"
// adds config-defined bodies to the body corpus.
struct Config {
  std::vector<std::string> corpus = {"standard", "smooth", "functions"};
  std::vector<std::string> ids;  // empty: every registered id
  std::vector<int> n = {2, 3};
  std::vector<double> p = {1.0, 2.0};
  std::vector<double> lambda = {2.0, kInf};
  std::int64_t samples = 100'000;
  std::uint64_t seed = 42;
  double target_rel_err = 0.01;
  int max_doublings = 2;
  nlohmann::json bodies = nlohmann::json::array();

  static Config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class Verdict { Pass, Fail, Report, Trivial, Flag };
const char* to_string(Verdict v);

struct CaseResult {
  std::string id;
  std::string instance;
  int n = 2;
  double p = 1.0;
  double lambda = kNoParam;
  Relation relation = Relation::AtLeast;
  bool equality = false;
  Estimate lhs, rhs, ratio;
  Verdict verdict = Verdict::Pass;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;  // per-estimate budget of the final attempt
  int doublings = 0;
  double wall_seconds = 0.0;
  std::string note;
};

struct CorpusSummary {
  int n = 2;
  double p = 1.0;
  double lambda = kNoParam;
  std::vector<std::string> bodies;
  std::vector<std::string> functions;
  double worst_gradient_error = 0.0;
};

struct Report {
  Config config;
  int threads = 1;
  std::vector<CaseResult> cases;
  std::vector<ConstantRecord> constants;
  std::vector<CorpusSummary> corpora;

  int count(Verdict v) const;
  // No "=" or ">=" case failed.
  bool ok() const { return count(Verdict::Fail) == 0; }
};

// Ratio threshold logic: ">=" passes iff ratio >= 1 - 3 sigma, "=" iff
// |ratio - 1| <= 3 sigma; deterministic ratios use a 1e-6 tolerance instead.
Verdict judge(Relation relation, bool equality, const Estimate& ratio, bool trivial);

// Evaluate one case with budget doubling until the ratio meets the target
// relative error or the doubling cap is reached.
CaseResult run_case(const Case& c, const Config& cfg);

using Progress = std::function<void(const CaseResult&)>;
Report run(const Config& cfg, const Progress& progress = {});

// Thread count from AFFGEOM_THREADS (0 or unset: OpenMP default). Applies it.
int configure_threads();

nlohmann::json to_json(const Report& r);
void write_json(const Report& r, const std::string& path);
void write_csv(const Report& r, std::ostream& os);
void write_csv(const Report& r, const std::string& path);
// One "<id>.dat" per id: parameter columns then ratio and stderr, for
// ratio-vs-parameter plots. Returns the files written.
std::vector<std::string> write_gnuplot(const Report& r, const std::string& dir);

// Structural validation of an emitted report; empty when valid.
std::vector<std::string> validate_report(const nlohmann::json& j);

}  // namespace affgeom::harness
