#pragma once

#include "affgeom/core/body.hpp"
#include "affgeom/core/montecarlo.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace affgeom {

// One draw from a weighted point source: E[w * phi(x)] is the integral of phi
// against the measure the source represents.
struct WeightedPoint {
  Vec x;
  double w = 1.0;
};

using PointSource = std::function<WeightedPoint(Engine&)>;

// Uniform points of a region with unit weight (a probability measure). The
// region must outlive the source.
PointSource uniform_source(const Region& region);

// E[prod_i w_i * D_n(x_1, ..., x_n)^p] over independent draws.
Estimate det_moment(const std::vector<PointSource>& sources, double p, const Budget& budget);

// For every node xi_j of the rule:
//   E[prod_i w_i * D_n(x_1, ..., x_{n-1}, xi_j)^p]
// evaluated on common random numbers. Group sums are returned so callers can
// build jackknife replicas of any table functional.
GroupedSums det_moment_table(const std::vector<PointSource>& sources, double p,
                             const SphereRule& rule, const Budget& budget);

// Support table with h_j = (scale * mean_j)^(1/p) and leave-one-group-out
// replicas. Nodes whose relative error exceeds `tolerance` are flagged.
SupportTable support_table_from_sums(std::shared_ptr<const SphereRule> rule,
                                     const GroupedSums& sums, double scale, double p,
                                     double tolerance);

// Jackknife of a functional of the support values (any table with replicas);
// quadrature-tagged when the table is deterministic.
Estimate table_functional(const SupportTable& table,
                          const std::function<double(const std::vector<double>&)>& f);

// Default sphere-rule resolution for tabulated bodies.
int default_table_level(int n);
std::shared_ptr<const SphereRule> shared_rule(int n, int level = 0);

}  // namespace affgeom
