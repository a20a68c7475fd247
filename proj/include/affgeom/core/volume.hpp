#pragma once

#include "affgeom/core/body.hpp"

namespace affgeom {

enum class VolumeBackend { Auto, Exact, RadialQuadrature, RejectionMC };

// Volume of the unit Euclidean ball in R^n.
double ball_volume(int n);

// Auto: closed form when known, radial quadrature for n in {2,3}, rejection
// Monte-Carlo otherwise. A Monte-Carlo result whose relative error exceeds
// budget.tolerance carries Status::Warning.
Estimate volume(const ConvexBody& body, const Budget& budget,
                VolumeBackend backend = VolumeBackend::Auto, int level = 0);

// (1/n) sum_j w_j r(xi_j)^n over a sphere rule.
double radial_quadrature_volume(const std::function<double(const Vec&)>& radial,
                                const SphereRule& rule);

// Hit-or-miss estimate of vol(region) in its bounding box.
Estimate rejection_volume(const Region& region, const Budget& budget);

// Uniform point in the region by rejection from its bounding box. Throws
// CapacityError when the acceptance rate is below 1e-6.
Vec sample_uniform(const Region& region, Engine& eng);
// Same, with the bounding box computed once by the caller.
Vec sample_uniform(const Region& region, const Box& box, Engine& eng);

// Default sphere-rule resolution for quadrature in dimension n.
int default_level(int n);

}  // namespace affgeom
