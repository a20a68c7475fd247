#include "affgeom/core/bordered.hpp"

namespace affgeom {

BorderedMat bordered_matrix(const Vec& grad, const Mat& hess) {
  const int n = static_cast<int>(grad.size());
  BorderedMat K = BorderedMat::Zero(n + 1, n + 1);
  K.block(0, 1, 1, n) = grad.transpose();
  K.block(1, 0, n, 1) = grad;
  K.block(1, 1, n, n) = hess;
  return K;
}

double bordered_det(const Vec& grad, const Mat& hess) {
  const int n = static_cast<int>(grad.size());
  if (n == 2) {
    // -(g^T adj(H) g) for the 2x2 case, written out.
    const double gx = grad(0), gy = grad(1);
    return -(gx * gx * hess(1, 1) - 2.0 * gx * gy * hess(0, 1) + gy * gy * hess(0, 0));
  }
  return bordered_matrix(grad, hess).determinant();
}

}  // namespace affgeom
