#pragma once

#include "affgeom/core/body.hpp"

#include <vector>

namespace affgeom {

// Counter-clockwise hull of planar points (Andrew's monotone chain).
std::vector<Vec> convex_hull_2d(std::vector<Vec> pts);

// Shoelace area of a simple polygon given in order.
double polygon_area(const std::vector<Vec>& poly);

// Facets of conv(points) for n in {2, 3}. Coplanar facet candidates are
// merged; 3-D facet areas come from the planar hull of the projected points.
std::vector<Facet> hull_facets(const std::vector<Vec>& pts);

// Extreme points of conv(points) for n in {2, 3}.
std::vector<Vec> hull_vertices(const std::vector<Vec>& pts);

// Exact volume of conv(points) via the facet decomposition sum c_F |F| / n.
double hull_volume(const std::vector<Vec>& pts);

}  // namespace affgeom
