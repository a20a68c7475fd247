#pragma once

#include "affgeom/core/body.hpp"
#include "affgeom/functionals/sources.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace affgeom {

// A finite Borel measure on S^{n-1}, held in one of three forms:
//   Atomic      finite sum of weighted unit normals
//   Density     f(xi) with respect to spherical Lebesgue measure
//   Pushforward a sampler (u, w) with E[w phi(u)] = int phi dS
class SurfaceMeasure {
 public:
  enum class Kind { Atomic, Density, Pushforward };
  using DensityFn = std::function<double(const Vec&)>;
  using Sampler = std::function<WeightedPoint(Engine&)>;

  static SurfaceMeasure atomic(int n, std::vector<WeightedPoint> atoms);
  static SurfaceMeasure density(int n, DensityFn f);
  static SurfaceMeasure pushforward(int n, Sampler s);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  const std::vector<WeightedPoint>& atoms() const { return *atoms_; }
  const DensityFn& density_fn() const { return density_; }

  // One weighted direction; works for every kind.
  WeightedPoint sample(Engine& eng) const;
  PointSource source() const;

  // int phi dS: exact sum for atoms, sphere-rule quadrature for densities
  // (level 0 = default), Monte-Carlo for pushforwards.
  Estimate integrate(const std::function<double(const Vec&)>& phi, const Budget& budget,
                     int level = 0) const;
  Estimate total_mass(const Budget& budget) const;

  // sum_i w_i u_i, zero for the S_1 measure of a closed polytope.
  Vec atom_moment() const;

 private:
  Kind kind_ = Kind::Atomic;
  int n_ = 0;
  std::shared_ptr<const std::vector<WeightedPoint>> atoms_;
  std::shared_ptr<const std::vector<double>> cumulative_;
  double atom_total_ = 0.0;
  DensityFn density_;
  Sampler sampler_;
};

enum class SurfaceBackend { Auto, Atomic, Density, Pushforward };

// L_p surface area measure S_p(L, .). Auto picks Atomic for polytopal bodies,
// Density for smooth ones and Pushforward otherwise.
SurfaceMeasure surface_measure(const ConvexBody& L, double p,
                               SurfaceBackend backend = SurfaceBackend::Auto);

// f_p(L, xi) for smooth bodies, nullopt otherwise. The ball uses its constant
// density; other smooth bodies go through the gauge's bordered Hessian at the
// boundary point with outer normal xi.
std::optional<SurfaceMeasure::DensityFn> curvature_density_fn(const ConvexBody& L, double p);

}  // namespace affgeom
