#pragma once

#include "affgeom/core/montecarlo.hpp"
#include "affgeom/core/types.hpp"

#include <vector>

namespace affgeom {

// Quadrature nodes on S^{n-1}.
//   n = 2: `level` equispaced angles, weight 2*pi/level each.
//   n = 3: level/2 Gauss-Legendre nodes in cos(theta) times `level` azimuths.
//   n >= 4: level^2 pseudo-random nodes with equal weights.
struct SphereRule {
  enum class Layout { Circle, LatLong, Random };

  int dim = 0;
  Layout layout = Layout::Circle;
  int n_theta = 0;  // LatLong rings
  int n_phi = 0;    // azimuths per ring (or angles on the circle)
  std::vector<double> theta;  // ring polar angles, ascending
  std::vector<Vec> nodes;
  std::vector<double> weights;
  Eigen::MatrixXd node_matrix;  // n x m, column j = nodes[j]

  static SphereRule make(int n, int level);

  int size() const { return static_cast<int>(nodes.size()); }
  double total_weight() const;

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (int j = 0; j < size(); ++j) s += weights[j] * f(nodes[j]);
    return s;
  }
};

Vec sample_sphere(Engine& eng, int n);

// Surface area of S^{n-1}.
double sphere_area(int n);

}  // namespace affgeom
