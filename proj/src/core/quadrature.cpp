#include "affgeom/core/quadrature.hpp"

#include "affgeom/core/types.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace affgeom::quad {

namespace bq = boost::math::quadrature;

double integrate(const Fn& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double v = bq::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14, &err, &l1);
  if (!std::isfinite(v)) throw NumericError("quadrature: non-finite result");
  if (err > std::max(tol, 1e-12 * l1)) {
    // Fall back to tanh-sinh, which copes with endpoint singularities.
    return integrate_singular(f, a, b, tol);
  }
  return v;
}

double integrate_singular(const Fn& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  static thread_local bq::tanh_sinh<double> ts(15);
  double err = 0.0, l1 = 0.0;
  const double v = ts.integrate(f, a, b, 1e-13, &err, &l1);
  if (!std::isfinite(v) || err > std::max(tol, 1e-9 * l1))
    throw NumericError("quadrature did not converge (err " + std::to_string(err) + ")");
  return v;
}

double integrate_half_line(const Fn& f, double a, double tol) {
  static thread_local bq::exp_sinh<double> es(12);
  double err = 0.0, l1 = 0.0;
  const double v = es.integrate([&](double t) { return f(t); }, a,
                                std::numeric_limits<double>::infinity(), 1e-13, &err, &l1);
  if (!std::isfinite(v) || err > std::max(tol, 1e-9 * l1))
    throw NumericError("half-line quadrature did not converge");
  return v;
}

double integrate_pieces(const Fn& f, std::vector<double> breaks, double tol) {
  std::sort(breaks.begin(), breaks.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    s += integrate(f, breaks[i], breaks[i + 1], tol / static_cast<double>(breaks.size()));
  return s;
}

std::pair<double, double> minimize(const Fn& f, double lo, double hi) {
  std::uintmax_t iters = 500;
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, 52, iters);
  return {r.first, r.second};
}

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(m);
  weights.resize(m);
  for (int i = 0; i < m; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v * v;
  }
  // Polish nodes with Newton steps on P_m for full double accuracy.
  for (int i = 0; i < m; ++i) {
    double x = nodes[i];
    double dp = 1.0;
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double bisect(const Fn& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace affgeom::quad
