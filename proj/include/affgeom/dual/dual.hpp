#pragma once

#include "affgeom/core/body.hpp"
#include "affgeom/funcspace/function.hpp"
#include "affgeom/functionals/surface_measure.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace affgeom {

// Star body given by its radial function on the sphere.
class StarBody final : public Region {
 public:
  using Radial = std::function<double(const Vec&)>;

  // `level` sets the sphere rule used for the bounding box and the volume.
  StarBody(int n, Radial radial, std::string name = "star", int level = 0);

  int dim() const override { return n_; }
  bool contains(const Vec& x) const override;
  Box box() const override { return box_; }
  // (1/n) int r^n over the sphere, by quadrature.
  Estimate volume_estimate(const Budget& budget) const override;
  double radial(const Vec& u) const { return (*radial_)(u); }
  const std::string& name() const { return name_; }

 private:
  int n_;
  std::shared_ptr<const Radial> radial_;
  Box box_;
  double volume_ = 0.0;
  std::string name_;
};

// L_p curvature function f_p(L, .); DomainError for bodies without a density
// (polytopes, tabulated bodies).
SurfaceMeasure::DensityFn curvature_density(const ConvexBody& L, double p);

// L*_p with radial function f_p^{1/(n+p)}.
StarBody star_lp(const ConvexBody& L, double p);

// p-affine surface area int f_p^{n/(n+p)}; exactly 0 for polytopes.
Estimate omega_p(const ConvexBody& L, double p);

enum class TildeBackend { Auto, Sphere, Star };

// I~_p: D_n^p integrated against S_p(L_1) x ... x S_p(L_n). The sphere backend
// sums atoms exactly when every measure is atomic and samples otherwise; the
// star backend evaluates (n+p)^n I_p(L*_1, ..., L*_n). Auto uses the sphere
// backend.
Estimate I_tilde_p(const std::vector<ConvexBody>& bodies, double p, const Budget& budget,
                   TildeBackend backend = TildeBackend::Auto);

// N~_p: h(xi)^p = int D_n(xi_1, ..., xi_{n-1}, xi)^p dS_p(L_1) ... dS_p(L_{n-1}).
ConvexBody N_tilde_p_body(const std::vector<ConvexBody>& bodies, double p,
                          std::shared_ptr<const SphereRule> rule, const Budget& budget);

// [[0, grad^T], [grad, H]] at a point.
struct BorderedHessian {
  BorderedMat K;
  double det() const;
};
BorderedHessian bordered_hessian(const CompactFunction& l, const Vec& x);

// Omega_p(l) = int |det K l(x)|^{p/(n+p)} dx.
Estimate omega_p_function(const CompactFunction& l, double p, const Budget& budget);

enum class LevelsetBackend { Auto, Radial, Trace };

// Omega_p(l, t): the bordered-Hessian weight |det K l|^{p/(n+p)} |grad l|^{-1}
// integrated over the level set {l = t}. Radial functions use the closed form
// Omega_p(K) |F'(rho)|^{n(p-1)/(n+p)} rho^{n(n-1)/(n+p)} with F(rho) = t;
// planar functions trace the level curve in polar coordinates around
// l.center(). DomainError for t outside (0, sup l), and for level curves that
// are not star-shaped about the center or not convex.
Estimate omega_p_levelset(const CompactFunction& l, double p, double t,
                          LevelsetBackend backend = LevelsetBackend::Auto);

// I~_p(l_1, ..., l_n) = int D_n(grad l_1(x_1), ..., grad l_n(x_n))^p.
Estimate I_tilde_p_functions(const std::vector<CompactFunction>& ls, double p, const Budget& budget);

// I~_1 of bodies through C^2 mollified indicator representatives at several
// widths, with first-order Richardson extrapolation to width 0.
struct SmoothedTilde {
  std::vector<double> widths;
  std::vector<Estimate> values;
  Estimate extrapolated;
};
SmoothedTilde I_tilde_1_smoothed(const std::vector<ConvexBody>& bodies, const Budget& budget,
                                 std::vector<double> widths = {0.08, 0.04, 0.02});

}  // namespace affgeom
