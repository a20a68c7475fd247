#include "affgeom/functionals/det.hpp"

#include <cmath>

namespace affgeom {

double det_volume(std::span<const Vec> v) {
  require(!v.empty(), "det_volume: no vectors");
  const int n = static_cast<int>(v[0].size());
  const int k = static_cast<int>(v.size());
  if (k > n) throw DomainError("det_volume: more vectors than dimensions");
  if (k == 1) return v[0].norm();
  if (k == n) {
    if (n == 2) return abs_det2(v[0], v[1]);
    if (n == 3) return abs_det3(v[0], v[1], v[2]);
    Mat M(n, n);
    for (int j = 0; j < n; ++j) M.col(j) = v[j];
    return std::abs(M.determinant());
  }
  Mat G(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = v[i].dot(v[j]);
  return std::sqrt(std::max(0.0, G.determinant()));
}

double det_volume(std::initializer_list<Vec> vectors) {
  return det_volume(std::span<const Vec>(vectors.begin(), vectors.size()));
}

Vec cofactor_vector(std::span<const Vec> v) {
  const int n = static_cast<int>(v.size()) + 1;
  Vec w(n);
  if (n == 2) {
    w << -v[0](1), v[0](0);
    return w;
  }
  if (n == 3) {
    w = Eigen::Vector3d(v[0]).cross(Eigen::Vector3d(v[1]));
    return w;
  }
  Mat M(n, n);
  for (int j = 0; j < n - 1; ++j) M.col(j) = v[j];
  for (int i = 0; i < n; ++i) {
    M.col(n - 1) = unit(n, i);
    w(i) = M.determinant();
  }
  return w;
}

double DetFunctional::operator()(std::span<const Vec> vectors) const {
  require(static_cast<int>(vectors.size()) == k, "DetFunctional: wrong number of vectors");
  return std::pow(det_volume(vectors), p);
}

}  // namespace affgeom
