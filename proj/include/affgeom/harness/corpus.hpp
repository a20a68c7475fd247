#pragma once

#include "affgeom/core/body.hpp"
#include "affgeom/funcspace/function.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace affgeom::harness {

struct NamedBody {
  std::string name;
  ConvexBody body;
  bool smooth = false;     // has a curvature density
  bool symmetric = false;  // origin-symmetric
  bool polytope = false;
  bool ellipsoid = false;  // equality case of the affine inequalities
};

struct NamedFunction {
  std::string name;
  CompactFunction f;
  std::string family;        // "moment", "sobolev", "bump", "mollified", "radial_bump"
  bool convex_levels = false;  // superlevel sets convex with positive curvature
};

// Body from a config node:
//   {"kind": "ball", "radius": 1}
//   {"kind": "ellipsoid", "matrix": [[...], ...]}
//   {"kind": "cube", "half_side": 1, "n": 3}
//   {"kind": "simplex", "vertices": [[...], ...]}  or {"kind": "centered_simplex", "n": 2}
//   {"kind": "lq_ball", "q": 4, "n": 2}
//   {"kind": "polytope", "vertices": [[...], ...]}
//   {"kind": "random_polytope", "n": 2, "points": 8, "seed": 3}
// plus optional "linear_map" (matrix), "translate" (vector), "name".
NamedBody body_from_json(const nlohmann::json& node, int default_n);

// Named corpora of bodies: "standard" and "smooth".
std::vector<NamedBody> body_corpus(const std::string& name, int n, std::uint64_t seed);

// Function corpus for given (n, p, lambda); entries whose family needs an
// admissible parameter are skipped otherwise.
std::vector<NamedFunction> function_corpus(int n, double p, double lambda, std::uint64_t seed);

// Finite-difference audit of every function with a gradient oracle; returns
// the worst relative error.
double audit_gradients(const std::vector<NamedFunction>& fs, int probes = 100);

ConvexBody random_polytope(int n, int points, std::uint64_t seed);

}  // namespace affgeom::harness
