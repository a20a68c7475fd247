#pragma once

#include "affgeom/core/types.hpp"

namespace affgeom {

// [[0, g^T], [g, H]]
BorderedMat bordered_matrix(const Vec& grad, const Mat& hess);

double bordered_det(const Vec& grad, const Mat& hess);

}  // namespace affgeom
