#include "affgeom/constants/constants.hpp"

#include "affgeom/core/body.hpp"
#include "affgeom/core/quadrature.hpp"
#include "affgeom/core/volume.hpp"
#include "affgeom/funcspace/levelset.hpp"
#include "affgeom/functionals/sources.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace affgeom {

const char* to_string(Provenance p) {
  return p == Provenance::ClosedForm ? "closed-form" : "derived-oracle";
}

Estimate ConstantRecord::estimate() const {
  if (sigma > 0.0) return Estimate::monte_carlo(value, sigma, samples);
  return provenance == Provenance::ClosedForm ? Estimate::exact(value) : Estimate::quadrature(value);
}

double omega_n(int n) { return ball_volume(n); }

double holder_conjugate(double lambda) {
  if (std::isinf(lambda)) return 1.0;
  return lambda / (lambda - 1.0);
}

bool lambda_admissible(int n, double p, double lambda) {
  if (std::isnan(lambda)) return false;
  if (std::isinf(lambda)) return lambda > 0;
  return (lambda > n / (n + p) && lambda < 1.0) || lambda > 1.0;
}

namespace {

ConstantRecord record(std::string name, int n, double p, double lambda, double value,
                      Provenance prov, std::string oracle) {
  ConstantRecord r;
  r.name = std::move(name);
  r.n = n;
  r.p = p;
  r.lambda = lambda;
  r.value = value;
  r.provenance = prov;
  r.oracle = std::move(oracle);
  return r;
}

ConstantRecord from_estimate(std::string name, int n, double p, double lambda, const Estimate& e,
                             std::string oracle, const ConstantRecord& dep) {
  ConstantRecord r = record(std::move(name), n, p, lambda, e.value,
                            dep.provenance == Provenance::ClosedForm && !e.is_mc()
                                ? Provenance::ClosedForm
                                : Provenance::DerivedOracle,
                            std::move(oracle));
  r.sigma = e.sigma;
  r.samples = dep.samples;
  r.seed = dep.seed;
  r.status = dep.status;
  return r;
}

}  // namespace

ConstantRecord c_np(int n, double p) {
  require(n >= 2 && p >= 1.0, "c_np: need n >= 2 and p >= 1");
  // int_B |x_1|^p = 2 omega_{n-1} int_0^1 t^p (1-t^2)^{(n-1)/2} dt
  const double s = quad::integrate_singular(
      [&](double t) { return std::pow(t, p) * std::pow(1.0 - t * t, (n - 1) / 2.0); }, 0.0, 1.0,
      1e-14);
  return record("c", n, p, kNoParam, 2.0 * omega_n(n - 1) * s / omega_n(n),
                Provenance::DerivedOracle, "1-D quadrature of int_B |x_1|^p");
}

Budget constants_budget(const Budget& base) {
  Budget b;
  b.samples = std::max<std::int64_t>(4'000'000, 4 * base.samples);
  b.seed = base.seed;
  b.stream = 0;
  b.exec = base.exec;
  b.tolerance = 2e-3;
  return b;
}

ConstantRecord b_np(int n, double p, const Budget& budget) {
  require(n >= 2 && n <= 3, "b_np: n must be 2 or 3");
  require(p >= 1.0, "b_np: p must be >= 1");
  auto& cache = ConstantCache::global();
  if (auto hit = cache.find("b", n, p, kNoParam, budget.seed, budget.samples)) return *hit;

  Budget own = budget;
  own.stream = 0;
  const ConvexBody ball = ConvexBody::ball(n);
  std::vector<PointSource> sources(n, uniform_source(ball));
  const Estimate m = det_moment(sources, p, own.fork("b_np"));
  const Estimate b = m / std::pow(omega_n(n), p);  // omega^n * E[D^p] / omega^{n+p}
  ConstantRecord r = record("b", n, p, kNoParam, b.value, Provenance::DerivedOracle,
                            "Monte-Carlo I_p(B..B)/omega_n^{n+p}");
  r.sigma = b.sigma;
  r.samples = b.samples;
  r.seed = budget.seed;
  if (b.relative_error() > budget.tolerance) {
    r.status = Status::Warning;
    return r;  // not cached
  }
  cache.store(r);
  return r;
}

namespace {

// Moment extremal profile on the ball with its radial integrals.
struct MomentIntegrals {
  double vtilde, l1, llam;
};

MomentIntegrals moment_integrals(int n, double p, double lambda, double tol) {
  const double e = 1.0 / (lambda - 1.0);
  auto integrate = [&](const std::function<double(double)>& f) {
    return lambda > 1.0 ? quad::integrate_singular(f, 0.0, 1.0, tol)
                        : quad::integrate_half_line(f, 0.0, tol);
  };
  auto g = [&](double t) {
    return lambda > 1.0 ? std::pow(std::max(0.0, 1.0 - std::pow(t, p)), e)
                        : std::pow(1.0 + std::pow(t, p), e);
  };
  // g(t)^c t^k; the heavy tail goes through logs so huge t gives 0, not 0 * inf.
  auto gt = [&](double c, double k) {
    return [&, c, k](double t) {
      if (lambda > 1.0 || t < 1.0) return std::pow(g(t), c) * std::pow(t, k);
      return std::exp(c * e * std::log1p(std::pow(t, p)) + k * std::log(t));
    };
  };
  const double w = omega_n(n);
  MomentIntegrals m;
  m.vtilde = (n + p) * w * integrate(gt(1.0, n + p - 1));
  m.l1 = n * w * integrate(gt(1.0, n - 1));
  m.llam = std::pow(n * w * integrate(gt(lambda, n - 1)), 1.0 / lambda);
  return m;
}

}  // namespace

ConstantRecord moment_constant(int n, double p, double lambda, double tol) {
  require(lambda_admissible(n, p, lambda), "moment_constant: inadmissible lambda");
  if (std::isinf(lambda))
    return record("moment", n, p, lambda, 1.0, Provenance::ClosedForm, "indicator case");
  const MomentIntegrals m = moment_integrals(n, p, lambda, tol);
  const double lp = holder_conjugate(lambda);
  const double value = m.vtilde * std::pow(m.l1, -(n + p * lp) / n) *
                       std::pow(m.llam, p * lp / n) * std::pow(omega_n(n), p / n);
  return record("moment", n, p, lambda, value, Provenance::DerivedOracle,
                "radial quadrature at the moment extremal on the ball");
}

ConstantRecord cnv_np(int n, double p, double tol) {
  require(p >= 1.0 && p < n, "cnv_np: need 1 <= p < n");
  if (p == 1.0)
    return record("cnv", n, p, kNoParam, 1.0, Provenance::ClosedForm,
                  "perimeter/volume of the ball (weak-sense extremal)");
  const double q = p / (p - 1.0);
  const double ps = n * p / (n - p);
  auto F = [&](double t) { return std::pow(1.0 + std::pow(t, q), 1.0 - n / p); };
  auto dF = [&](double t) {
    return (n / p - 1.0) * q * std::pow(t, q - 1.0) * std::pow(1.0 + std::pow(t, q), -n / p);
  };
  const double w = omega_n(n);
  const double grad = w * quad::integrate_half_line(
                              [&](double t) { return std::pow(dF(t), p) * std::pow(t, n - 1); }, 0.0, tol);
  const double norm = std::pow(
      n * w * quad::integrate_half_line([&](double t) { return std::pow(F(t), ps) * std::pow(t, n - 1); }, 0.0, tol),
      p / ps);
  return record("cnv", n, p, kNoParam, grad / (norm * std::pow(w, p / n)),
                Provenance::DerivedOracle, "radial quadrature at the Sobolev extremal on the ball");
}

ConstantRecord levelset_constant_record(int n, double p, double lambda) {
  return record("L", n, p, lambda, levelset_constant(n, p, lambda), Provenance::ClosedForm,
                "Gamma-function closed form");
}

ConstantRecord petty_bound(int n) {
  require(n >= 2, "petty_bound: n >= 2");
  const double v = std::pow(omega_n(n - 1), n) / std::pow(omega_n(n), n - 2);
  return record("petty", n, kNoParam, kNoParam, v, Provenance::ClosedForm,
                "(omega_{n-1}/omega_n)^n omega_n^2");
}

DerivedConstants derived_constants(int n, double p, double lambda, const ConstantRecord& b,
                                   const ConstantRecord& moment,
                                   const std::optional<ConstantRecord>& cnv) {
  if (b.name != "b" || b.n != n) throw DependencyError("derived_constants: b record mismatch");
  if (moment.name != "moment" || moment.n != n)
    throw DependencyError("derived_constants: moment record mismatch");
  const Estimate be = b.estimate();
  const Estimate ce = moment.estimate();
  const double np = n + p;
  DerivedConstants d;
  d.a = from_estimate("a", n, p, kNoParam, pow(np / n * be, -n / p), "((n+p)/n b)^{-n/p}", b);
  d.b_tilde = from_estimate("b_tilde", n, p, kNoParam, std::pow(np, n) / std::pow(n, np) * be,
                            "(n+p)^n b / n^{n+p}", b);
  d.A = from_estimate("A", n, p, lambda, d.a.estimate() * std::pow(ce.value, -n * (n - 1.0) / p),
                      "a * moment^{-n(n-1)/p}", b);
  d.B = from_estimate("B", n, p, lambda, std::pow(ce.value, n) * be, "moment^n * b", b);
  if (cnv) {
    if (cnv->name != "cnv") throw DependencyError("derived_constants: cnv record mismatch");
    const double s = std::pow(n * cnv->value * std::pow(omega_n(n), p / n), -1.0 / p);
    d.S = record("S", n, p, kNoParam, s, cnv->provenance, "(n cnv omega_n^{p/n})^{-1/p}");
  } else {
    d.S = record("S", n, p, kNoParam, kNoParam, Provenance::ClosedForm, "undefined for p >= n");
  }
  d.petty = petty_bound(n);
  return d;
}

DerivedConstants derived_constants(int n, double p, double lambda, const Budget& budget) {
  const ConstantRecord b = b_np(n, p, constants_budget(budget));
  const ConstantRecord c = moment_constant(n, p, lambda);
  std::optional<ConstantRecord> cnv;
  if (p < n) cnv = cnv_np(n, p);
  return derived_constants(n, p, lambda, b, c, cnv);
}

double rsid_lambda(int n, double p, double alpha) {
  if (std::isinf(alpha)) return alpha;
  return 1.0 + (alpha - 1.0) * (n + 1.0) * p / (n + p);
}

ConstantRecord rsid_f_constant(int n, double p, double alpha, const ConstantRecord& b) {
  require(alpha > n / (n + 1.0) && alpha != 1.0 && std::isfinite(alpha),
          "rsid_f_constant: alpha outside (n/(n+1),1) u (1,inf)");
  const double lam = rsid_lambda(n, p, alpha);
  const double L = levelset_constant(n, p, lam);
  const double np = n + p;
  const double k = std::pow(np, n) * std::pow(std::pow(alpha, p / (np * (alpha - 1.0))) * L / n, np);
  return from_estimate("C_rsid_f", n, p, alpha, k * b.estimate(),
                       "(n+p)^n b (alpha^{p/((n+p)(alpha-1))} L_{n,p,lambda(alpha)}/n)^{n+p}", b);
}

ConstantRecord rsid_f_constant_inf(int n, double p, const ConstantRecord& b) {
  const double np = n + p;
  return from_estimate("C_rsid_f", n, p, INFINITY, std::pow(np, n) / std::pow(n, np) * b.estimate(),
                       "b_tilde", b);
}

// ------------------------------------------------------------------ cache
ConstantCache& ConstantCache::global() {
  static ConstantCache c;
  return c;
}

namespace {
std::string param_key(double v) {
  if (std::isnan(v)) return "none";
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return "inf";
  return v;
}

double denum(const nlohmann::json& j) {
  if (j.is_null()) return kNoParam;
  if (j.is_string()) return INFINITY;
  return j.get<double>();
}
}  // namespace

ConstantCache::Key ConstantCache::key(const std::string& name, int n, double p, double lambda,
                                      std::uint64_t seed, std::int64_t samples) {
  return {name, n, param_key(p), param_key(lambda), seed, samples};
}

std::optional<ConstantRecord> ConstantCache::find(const std::string& name, int n, double p,
                                                  double lambda, std::uint64_t seed,
                                                  std::int64_t samples) const {
  std::shared_lock lock(mu_);
  auto it = map_.find(key(name, n, p, lambda, seed, samples));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void ConstantCache::store(const ConstantRecord& r) {
  std::unique_lock lock(mu_);
  map_[key(r.name, r.n, r.p, r.lambda, r.seed, r.samples)] = r;
}

std::vector<ConstantRecord> ConstantCache::records() const {
  std::shared_lock lock(mu_);
  std::vector<ConstantRecord> out;
  for (const auto& [k, v] : map_) out.push_back(v);
  return out;
}

void ConstantCache::clear() {
  std::unique_lock lock(mu_);
  map_.clear();
}

void ConstantCache::save(const std::string& path) const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records()) {
    arr.push_back({{"name", r.name},
                   {"n", r.n},
                   {"p", num(r.p)},
                   {"lambda", num(r.lambda)},
                   {"value", r.value},
                   {"stderr", r.sigma},
                   {"provenance", to_string(r.provenance)},
                   {"oracle", r.oracle},
                   {"samples", r.samples},
                   {"seed", r.seed}});
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("ConstantCache: cannot write " + path);
  f << arr.dump(2) << '\n';
}

void ConstantCache::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) return;  // no cache yet
  nlohmann::json arr = nlohmann::json::parse(f);
  for (const auto& j : arr) {
    ConstantRecord r;
    r.name = j.at("name").get<std::string>();
    r.n = j.at("n").get<int>();
    r.p = denum(j.at("p"));
    r.lambda = denum(j.at("lambda"));
    r.value = j.at("value").get<double>();
    r.sigma = j.at("stderr").get<double>();
    r.provenance = j.at("provenance").get<std::string>() == "closed-form" ? Provenance::ClosedForm
                                                                          : Provenance::DerivedOracle;
    r.oracle = j.at("oracle").get<std::string>();
    r.samples = j.at("samples").get<std::int64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    store(r);
  }
}

}  // namespace affgeom
