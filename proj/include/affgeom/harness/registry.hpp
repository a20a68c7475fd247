#pragma once

#include "affgeom/constants/constants.hpp"
#include "affgeom/core/estimate.hpp"
#include "affgeom/core/montecarlo.hpp"
#include "affgeom/harness/corpus.hpp"

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace affgeom::harness {

// ">=" with 3-sigma slack, "=" within 3 sigma, or probe (ratio recorded only).
enum class Relation { AtLeast, Equal, Report };
const char* to_string(Relation r);

enum class Domain { Bodies, Functions, Profiles };

struct InequalitySpec {
  std::string id;
  Relation relation;
  Domain domain;
  bool uses_lambda;  // swept over lambda (or alpha); otherwise run once per (n, p)
  std::string display;
};

// Every registered id, in report order.
const std::vector<InequalitySpec>& registry();
// ConfigError for unknown ids.
const InequalitySpec& lookup(const std::string& id);

// Both sides of one instance. For "<=" statements lhs holds the bound and rhs
// the value, so every ratio lhs/rhs is expected to be at least 1.
struct Sides {
  Estimate lhs;
  Estimate rhs;
  bool trivial = false;  // rhs vanishes identically
  std::string note;
};

struct Case {
  std::string id;
  std::string instance;
  int n = 2;
  double p = 1.0;
  double lambda = kNoParam;
  Relation relation = Relation::AtLeast;
  bool equality = false;  // instance is an equality case: ratio must be 1
  std::function<Sides(const Budget&)> compute;

  std::string key() const;
};

// Constants used by the cases, derived once per (n, p, lambda) from a fixed
// base budget and logged for provenance.
class ConstantCatalog {
 public:
  explicit ConstantCatalog(Budget base) : base_(base) {}

  Estimate b(int n, double p);
  Estimate a(int n, double p);
  Estimate b_tilde(int n, double p);
  Estimate moment(int n, double p, double lambda);
  Estimate A(int n, double p, double lambda);
  Estimate B(int n, double p, double lambda);
  Estimate cnv(int n, double p);
  Estimate petty(int n);
  Estimate rsid_f(int n, double p, double alpha);

  std::vector<ConstantRecord> records() const;

 private:
  const ConstantRecord& remember(const ConstantRecord& r);
  const ConstantRecord& b_record(int n, double p);

  Budget base_;
  std::map<std::tuple<std::string, int, std::string, std::string>, ConstantRecord> log_;
};

struct CaseInputs {
  int n = 2;
  double p = 1.0;
  double lambda = kNoParam;
  const std::vector<NamedBody>* bodies = nullptr;
  const std::vector<NamedFunction>* functions = nullptr;
};

// Instances of one id at one parameter point. Ids whose hypotheses exclude
// the point (p >= n for the Sobolev family, inadmissible lambda) return none.
std::vector<Case> build_cases(const std::string& id, const CaseInputs& in, ConstantCatalog& constants);

}  // namespace affgeom::harness
