#pragma once

#include "affgeom/core/estimate.hpp"
#include "affgeom/core/montecarlo.hpp"
#include "affgeom/core/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace affgeom {

enum class Provenance { ClosedForm, DerivedOracle };
const char* to_string(Provenance p);

inline constexpr double kNoParam = std::numeric_limits<double>::quiet_NaN();

struct ConstantRecord {
  std::string name;
  int n = 0;
  double p = kNoParam;
  double lambda = kNoParam;  // lambda or alpha, when the constant has one
  double value = 0.0;
  double sigma = 0.0;
  Provenance provenance = Provenance::ClosedForm;
  std::string oracle;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  Status status = Status::Ok;

  Estimate estimate() const;
};

// Volume of the Euclidean unit ball in R^n.
double omega_n(int n);

// Hoelder conjugate lambda/(lambda-1); infinity maps to 1.
double holder_conjugate(double lambda);

// lambda in (n/(n+p), 1) or (1, inf].
bool lambda_admissible(int n, double p, double lambda);

// omega_n^{-1} int_B |x_1|^p dx, by 1-D quadrature.
ConstantRecord c_np(int n, double p);

// Equality constant of the random-simplex inequality on balls:
// I_p(B, ..., B) / omega_n^{n+p}, by Monte-Carlo. Records above the budget's
// tolerance carry Status::Warning and are never cached.
ConstantRecord b_np(int n, double p, const Budget& budget);

// Sharp constant of the moment (dual mixed volume) functional inequality,
// evaluated at its extremal on the ball by radial quadrature.
ConstantRecord moment_constant(int n, double p, double lambda, double tol = 1e-10);

// Sharp constant of the L_p Sobolev (mixed volume) functional inequality at
// its extremal on the ball. p = 1 is the weak-sense limit, equal to 1.
ConstantRecord cnv_np(int n, double p, double tol = 1e-10);

// Level-set constant L_{n,p,lambda} (closed form).
ConstantRecord levelset_constant_record(int n, double p, double lambda);

// (omega_{n-1}/omega_n)^n omega_n^2
ConstantRecord petty_bound(int n);

// Everything that is arithmetic on b, the moment constant and cnv:
// a_{n,p}, b~_{n,p}, A_{n,p,lambda}, B_{n,p,lambda}, S_{n,p} and the Petty bound.
struct DerivedConstants {
  ConstantRecord a, b_tilde, A, B, S, petty;
  std::vector<ConstantRecord> all() const { return {a, b_tilde, A, B, S, petty}; }
};

DerivedConstants derived_constants(int n, double p, double lambda, const ConstantRecord& b,
                                   const ConstantRecord& moment,
                                   const std::optional<ConstantRecord>& cnv);
DerivedConstants derived_constants(int n, double p, double lambda, const Budget& budget);

// Parameter map of the functional dual inequality: lambda = 1 + (alpha-1)(n+1)p/(n+p).
double rsid_lambda(int n, double p, double alpha);

// Constant of the functional dual random-simplex inequality for finite alpha,
// and its alpha = infinity form.
ConstantRecord rsid_f_constant(int n, double p, double alpha, const ConstantRecord& b);
ConstantRecord rsid_f_constant_inf(int n, double p, const ConstantRecord& b);

// Content-addressed cache of derived records keyed by
// (name, n, p, lambda, seed, samples). Guarded for exclusive write.
class ConstantCache {
 public:
  static ConstantCache& global();

  std::optional<ConstantRecord> find(const std::string& name, int n, double p, double lambda,
                                     std::uint64_t seed, std::int64_t samples) const;
  void store(const ConstantRecord& r);
  std::vector<ConstantRecord> records() const;
  void clear();

  void load(const std::string& path);
  void save(const std::string& path) const;

 private:
  using Key = std::tuple<std::string, int, std::string, std::string, std::uint64_t, std::int64_t>;
  static Key key(const std::string& name, int n, double p, double lambda, std::uint64_t seed,
                 std::int64_t samples);
  mutable std::shared_mutex mu_;
  std::map<Key, ConstantRecord> map_;
};

// Default budget for b_{n,p}: large and on its own stream.
Budget constants_budget(const Budget& base);

}  // namespace affgeom
