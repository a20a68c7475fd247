#include "affgeom/funcspace/levelset.hpp"

#include "affgeom/constants/constants.hpp"
#include "affgeom/core/quadrature.hpp"
#include "affgeom/core/types.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace affgeom {

using boost::math::tgamma;

double levelset_constant(int n, double p, double l) {
  require(lambda_admissible(n, p, l), "levelset_constant: inadmissible lambda");
  if (std::isinf(l)) return 1.0;
  const double np = n + p;
  const double e = p / ((l - 1.0) * np);
  if (l < 1.0) {
    const double gam = tgamma(1.0 / (1.0 - l)) / (tgamma(n / p + 2.0) * tgamma(l / (1.0 - l) - n / p));
    return (1.0 - l) * std::pow(p / np, e) *
           std::pow(l - n / np, (n - l * np) / ((l - 1.0) * np)) * std::pow(gam, p / np);
  }
  const double gam = tgamma(n / p + 1.0 / (l - 1.0) + 2.0) / (tgamma(l / (l - 1.0)) * tgamma(n / p + 2.0));
  return (l - 1.0) * std::pow(p / np, e) *
         std::pow(l + p / np - 1.0, (n - l * n - l * p) / ((l - 1.0) * np)) * std::pow(gam, p / np);
}

double levelset_constant_numeric(int n, double p, double l) {
  require(lambda_admissible(n, p, l), "levelset_constant_numeric: inadmissible lambda");
  if (std::isinf(l)) return 1.0;
  const double np = n + p;
  auto min_over_r = [](const std::function<double(double)>& f) {
    // Search in log r; the bound is smooth and unimodal there.
    return quad::minimize([&](double s) { return f(std::exp(s)); }, -40.0, 40.0).second;
  };
  if (l > 1.0) {
    const double A = std::pow(quad::integrate_singular(
                                  [&](double t) { return std::pow(1.0 - std::pow(t, l - 1.0), np / p); },
                                  0.0, 1.0, 1e-14),
                              p / np);
    const double a = p / np, b = l - 1.0;
    const double M = min_over_r([&](double r) { return A * std::pow(r, a) + std::pow(r, -b); });
    return std::pow(M, -(a + b) / b);
  }
  const double B = std::pow(quad::integrate_singular(
                                [&](double t) { return std::pow(std::pow(t, l - 1.0) - 1.0, np / p); },
                                0.0, 1.0, 1e-14),
                            p / np);
  const double u = 1.0 - l, v = l - n / np;
  const double M = min_over_r([&](double r) { return std::pow(r, -u) + std::pow(r, v); });
  return std::pow(M, -(u + v) / u) / B;
}

std::function<double(double)> levelset_extremal(double l, int n, double p) {
  require(lambda_admissible(n, p, l), "levelset_extremal: inadmissible lambda");
  const double e = n / p;
  if (std::isinf(l)) return [](double t) { return t >= 0.0 && t <= 1.0 ? 1.0 : 0.0; };
  if (l < 1.0)
    return [l, e](double t) { return t > 0.0 && t < 1.0 ? std::pow(std::pow(t, l - 1.0) - 1.0, e) : 0.0; };
  return [l, e](double t) { return t >= 0.0 && t < 1.0 ? std::pow(1.0 - std::pow(t, l - 1.0), e) : 0.0; };
}

Estimate levelset_check(const LevelsetInput& in, int n, double p, double l) {
  require(lambda_admissible(n, p, l), "levelset_check: inadmissible lambda");
  require(in.support_end > 0.0, "levelset_check: support end must be positive");
  const double np = n + p;
  std::vector<double> breaks;
  breaks.push_back(0.0);
  for (double b : in.breaks)
    if (b > 0.0 && b < in.support_end) breaks.push_back(b);
  breaks.push_back(in.support_end);
  auto integral = [&](const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
      s += quad::integrate_singular(f, breaks[i], breaks[i + 1], 1e-13);
    return s;
  };
  const double mass = integral(in.g);
  if (!(mass > 0.0)) throw DomainError("levelset_check: g vanishes identically");
  const double lhs =
      std::pow(integral([&](double t) { return std::pow(in.g(t), np / n); }), n / np);
  double rhs;
  if (std::isinf(l)) {
    rhs = std::pow(in.support_end, -p / np) * mass;
  } else {
    const double moment = integral([&](double t) { return in.g(t) * std::pow(t, l - 1.0); });
    const double lp = holder_conjugate(l);
    rhs = levelset_constant(n, p, l) * std::pow(moment, -p / (np * (l - 1.0))) *
          std::pow(mass, (n + p * lp) / np);
  }
  return Estimate::quadrature(lhs / rhs);
}

}  // namespace affgeom
