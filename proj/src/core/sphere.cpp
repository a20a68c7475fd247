#include "affgeom/core/sphere.hpp"

#include "affgeom/core/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace affgeom {

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / boost::math::tgamma(n / 2.0);
}

Vec sample_sphere(Engine& eng, int n) {
  Vec v(n);
  for (;;) {
    for (int i = 0; i < n; ++i) v(i) = standard_normal(eng);
    const double r = v.norm();
    if (r > 1e-12) return v / r;
  }
}

SphereRule SphereRule::make(int n, int level) {
  require(n >= 2, "sphere_rule: dimension must be >= 2");
  require(n <= kMaxDim, "sphere_rule: dimension exceeds kMaxDim");
  require(level >= 4, "sphere_rule: level must be >= 4");
  SphereRule r;
  r.dim = n;
  const double pi = std::numbers::pi;
  if (n == 2) {
    r.layout = Layout::Circle;
    r.n_phi = level;
    for (int j = 0; j < level; ++j) {
      const double a = 2.0 * pi * j / level;
      r.nodes.push_back(make_vec({std::cos(a), std::sin(a)}));
      r.weights.push_back(2.0 * pi / level);
    }
  } else if (n == 3) {
    r.layout = Layout::LatLong;
    r.n_theta = std::max(2, level / 2);
    r.n_phi = level;
    std::vector<double> z, w;
    quad::gauss_legendre(r.n_theta, z, w);
    // Ascending theta means descending cos(theta).
    for (int i = r.n_theta - 1; i >= 0; --i) {
      const double th = std::acos(z[i]);
      r.theta.push_back(th);
      const double s = std::sin(th);
      for (int j = 0; j < r.n_phi; ++j) {
        const double ph = 2.0 * pi * j / r.n_phi;
        r.nodes.push_back(make_vec({s * std::cos(ph), s * std::sin(ph), z[i]}));
        r.weights.push_back(w[i] * 2.0 * pi / r.n_phi);
      }
    }
  } else {
    r.layout = Layout::Random;
    const int m = level * level;
    Budget b;
    b.seed = 0x5eed5eedULL;
    Engine eng = b.engine(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(level));
    const double wt = sphere_area(n) / m;
    for (int j = 0; j < m; ++j) {
      r.nodes.push_back(sample_sphere(eng, n));
      r.weights.push_back(wt);
    }
  }
  r.node_matrix.resize(n, r.size());
  for (int j = 0; j < r.size(); ++j) r.node_matrix.col(j) = r.nodes[j];
  return r;
}

double SphereRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

}  // namespace affgeom
