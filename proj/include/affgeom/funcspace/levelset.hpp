#pragma once

#include "affgeom/core/estimate.hpp"

#include <functional>
#include <vector>

namespace affgeom {

// One-dimensional level-set inequality
//   (int g^{(n+p)/n})^{n/(n+p)}
//     >= L * (int g t^{lambda-1})^{-p/((n+p)(lambda-1))} * (int g)^{(n+p lambda')/(n+p)}
// and its lambda = infinity form (S g)^{-p/(n+p)} int g, S g the support end.

// Closed form of L_{n,p,lambda}; lambda = infinity returns 1.
double levelset_constant(int n, double p, double lambda);

// The same constant by minimising the two-term bound over the scale r
// numerically (independent route, used as an oracle).
double levelset_constant_numeric(int n, double p, double lambda);

// Equality profile p_lambda on [0, 1].
std::function<double(double)> levelset_extremal(double lambda, int n, double p);

struct LevelsetInput {
  std::function<double(double)> g;
  double support_end = 1.0;     // g vanishes beyond this point
  std::vector<double> breaks;   // interior kinks for the quadrature
};

// LHS / RHS by adaptive quadrature (method Quadrature).
Estimate levelset_check(const LevelsetInput& in, int n, double p, double lambda);

}  // namespace affgeom
