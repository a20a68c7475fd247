#pragma once

#include "affgeom/core/types.hpp"

#include <span>
#include <vector>

namespace affgeom {

// k-volume of the parallelepiped spanned by k vectors in R^n: |det| when
// k = n, sqrt(det Gram) when k < n.
double det_volume(std::span<const Vec> vectors);
double det_volume(std::initializer_list<Vec> vectors);

// w with |<w, xi>| = D_n(v_1, ..., v_{n-1}, xi) for every xi.
Vec cofactor_vector(std::span<const Vec> vectors);

struct DetFunctional {
  double p = 1.0;
  int k = 2;
  double operator()(std::span<const Vec> vectors) const;
};

inline double abs_det2(const Vec& a, const Vec& b) { return std::abs(a(0) * b(1) - a(1) * b(0)); }

inline double abs_det3(const Vec& a, const Vec& b, const Vec& c) {
  return std::abs(a(0) * (b(1) * c(2) - b(2) * c(1)) - a(1) * (b(0) * c(2) - b(2) * c(0)) +
                  a(2) * (b(0) * c(1) - b(1) * c(0)));
}

}  // namespace affgeom
