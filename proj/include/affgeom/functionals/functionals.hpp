#pragma once

#include "affgeom/core/body.hpp"
#include "affgeom/functionals/det.hpp"
#include "affgeom/functionals/sources.hpp"
#include "affgeom/functionals/surface_measure.hpp"

#include <memory>
#include <vector>

namespace affgeom {

// Random-simplex functional: int ... int D_n(x_1..x_n)^p dx_1 ... dx_n over
// L_1 x ... x L_n, by product sampling times the volumes.
Estimate I_p(const std::vector<const Region*>& bodies, double p, const Budget& budget);
Estimate I_p(const std::vector<ConvexBody>& bodies, double p, const Budget& budget);

// Body N_p(L_1..L_{n-1}) tabulated on the rule nodes.
ConvexBody N_p_body(const std::vector<ConvexBody>& bodies, double p,
                    std::shared_ptr<const SphereRule> rule, const Budget& budget);

// L_p centroid body, normalised so that the unit ball is fixed.
ConvexBody centroid_body(const ConvexBody& L, double p, std::shared_ptr<const SphereRule> rule,
                         const Budget& budget);

// Projection body from S_1(L, .). Atomic and density measures give an exact
// support callable; pushforward measures give a Monte-Carlo table.
ConvexBody projection_body(const ConvexBody& L, std::shared_ptr<const SphereRule> rule,
                           const Budget& budget);
ConvexBody projection_body(const ConvexBody& L);

// (1/n) sum_j w_j h_j^{-n}: volume of the polar of a tabulated body, on its
// own nodes.
Estimate polar_volume(const ConvexBody& tabulated);

// Volume of a tabulated body (circumscribed polytope of the node half-spaces)
// by radial quadrature, with jackknife error from the table replicas.
Estimate tabulated_volume(const ConvexBody& tabulated, int level = 0);

// vol(Pi L). Polytopes: Pi L is the zonotope generated by the facet vectors
// |F| u_F, whose volume sum |det| over n-subsets is exact. Otherwise the
// tabulated projection body's volume (circumscribed, biased up by O(h^2) in
// the node spacing h for smooth bodies).
Estimate projection_body_volume(const ConvexBody& L, const Budget& budget, int level = 0);

// (n+p)/n int_K ||x||_L^p dx
Estimate dual_mixed_volume(const Region& K, const ConvexBody& L, double p, const Budget& budget);

// (1/n) int h_L^p dS_p(K, .)
Estimate mixed_volume(const ConvexBody& K, const ConvexBody& L, double p, const Budget& budget);
Estimate mixed_volume(const SurfaceMeasure& S, const ConvexBody& L, double p,
                      const Budget& budget);

struct EquivalenceResult {
  Estimate lhs;    // I_p(L_1..L_n)
  Estimate rhs;    // n/(n+p) * dual mixed volume of L_n and the polar of N_p
  Estimate ratio;
};

// Both sides of I_p(L_1..L_n) = n/(n+p) V~_{-p}(L_n, N_p(L_1..L_{n-1})^o) on
// independent streams.
EquivalenceResult equivalence_check(const std::vector<ConvexBody>& bodies, double p,
                                    const Budget& budget, int level = 0);

}  // namespace affgeom
