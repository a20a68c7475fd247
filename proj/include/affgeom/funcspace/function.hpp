#pragma once

#include "affgeom/core/body.hpp"
#include "affgeom/functionals/sources.hpp"
#include "affgeom/functionals/surface_measure.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace affgeom {

enum class Smoothness { Indicator, C0, C1, C2 };

// One-dimensional profile G on [0, end) with up to two derivatives.
struct Profile {
  std::string name;
  std::function<double(double)> G, dG, d2G;
  double end = kInf;      // G vanishes on [end, inf)
  double sup = 1.0;       // max of G
  Smoothness smoothness = Smoothness::C2;
  std::vector<double> kinks;  // interior points where G is not smooth
};

// f(x) = a * G(b * ||x||_K)
struct RadialStructure {
  ConvexBody K;
  Profile G;
  double a = 1.0;
  double b = 1.0;
  double support_end() const { return G.end / b; }  // in ||x||_K
};

// Nonnegative function with compact (or numerically compact) support.
class CompactFunction {
 public:
  using Eval = std::function<double(const Vec&)>;
  using Grad = std::function<Vec(const Vec&)>;
  using Hess = std::function<Mat(const Vec&)>;

  CompactFunction() = default;
  CompactFunction(int n, Box box, Eval eval, Grad grad = {}, Hess hess = {},
                  Smoothness smooth = Smoothness::C2, std::string name = "function");

  // a G(b ||x||_K); gradient/Hessian whenever the gauge supplies them.
  static CompactFunction radial(RadialStructure r);

  int dim() const { return n_; }
  const Box& box() const { return box_; }
  const std::string& name() const { return name_; }
  Smoothness smoothness() const { return smooth_; }
  const std::optional<RadialStructure>& radial_structure() const { return radial_; }

  double operator()(const Vec& x) const { return eval_(x); }
  bool has_gradient() const { return static_cast<bool>(grad_); }
  bool has_hessian() const { return static_cast<bool>(hess_); }
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  // Known sup norm, if any.
  std::optional<double> sup_norm() const { return sup_; }
  CompactFunction& set_sup_norm(double s) {
    sup_ = s;
    return *this;
  }
  // A point inside every superlevel set (the maximiser for quasi-concave f).
  Vec center() const { return center_; }
  CompactFunction& set_center(Vec c) {
    center_ = std::move(c);
    return *this;
  }

  // Weighted points x with E[w phi(x)] = int phi dx over the support.
  // Radial functions draw ||x||_K from a piecewise-constant proposal shaped by
  // `profile(s)` (s = ||x||_K, include the s^{n-1} Jacobian) mixed with a
  // defensive uniform component; other functions sample the box uniformly.
  PointSource space_source(std::function<double(double)> profile = {}) const;

 private:
  int n_ = 0;
  Box box_;
  Eval eval_;
  Grad grad_;
  Hess hess_;
  Smoothness smooth_ = Smoothness::C2;
  std::string name_;
  std::optional<RadialStructure> radial_;
  std::optional<double> sup_;
  Vec center_;
};

// ---------------------------------------------------------------- profiles
// Moment extremal g_{p,lambda}.
Profile moment_profile(double p, double lambda);
// Sobolev extremal F_p for 1 < p < n.
Profile sobolev_profile(int n, double p);
// (1 - s^2)_+^k
Profile bump_profile(int k);
// (1 - s)_+
Profile cone_profile();
// C^2 mollified indicator of [0,1]: 1 - S((s - 1 + w/2)/w), S the quintic smoothstep.
Profile smoothed_indicator_profile(double w);
Profile indicator_profile();

// f^alpha, with the chain rule for gradient and Hessian.
CompactFunction power(const CompactFunction& f, double alpha);
// x -> f(A x); A invertible.
CompactFunction compose_linear(const CompactFunction& f, const Mat& A);
// Indicator of a body (no gradient).
CompactFunction indicator(const ConvexBody& K);
// Sum_k c_k (1 - |x - mu_k|^2 / s_k^2)_+^3
struct BumpTerm {
  Vec mu;
  double s = 1.0;
  double c = 1.0;
};
CompactFunction bump_sum(int n, std::vector<BumpTerm> terms);
CompactFunction random_bumps(int n, int terms, std::uint64_t seed);

// ----------------------------------------------------------- operations
double lambda_prime(double lambda);

// (int l^lambda)^{1/lambda}; lambda = inf gives the sup norm (known value, or
// the maximum over box samples).
Estimate lp_norm(const CompactFunction& l, double lambda, const Budget& budget);

// a g_{p,lambda}(||x||_K) with (n+p) int s^{n+p-1} a g ds = 1.
CompactFunction normalized_moment_extremal(const ConvexBody& K, double p, double lambda);
// a F_p(||x||_K) with a^p int s^{n-1} |F_p'|^p ds = 1; p = 1 uses the
// mollified indicator of width w.
CompactFunction normalized_sobolev_extremal(const ConvexBody& K, double p, double w = 0.04);

// (n+p)/n int f ||x||_L^p dx
Estimate dual_mixed_volume_f(const CompactFunction& f, const ConvexBody& L, double p,
                             const Budget& budget);
// (1/n) int h_K(-grad f)^p dx
Estimate mixed_volume_f(const CompactFunction& f, const ConvexBody& K, double p,
                        const Budget& budget);
// Pushforward of |grad f|^p dx under -grad f / |grad f|.
SurfaceMeasure surface_measure_f(const CompactFunction& f, double p);

// int ... int l_1(x_1) ... l_n(x_n) D_n(x_1..x_n)^p
Estimate I_p_functions(const std::vector<CompactFunction>& ls, double p, const Budget& budget);
ConvexBody N_p_function_body(const std::vector<CompactFunction>& ls, double p,
                             std::shared_ptr<const SphereRule> rule, const Budget& budget);

// Weighted point source drawing l-mass: E[w phi(x)] = int l phi.
PointSource mass_source(const CompactFunction& l);
// Gradient source: E[w phi(grad l(x))] = int phi(grad l) dx.
PointSource gradient_source(const CompactFunction& l, double p);

// Central-difference audit of the gradient oracle: worst relative error over
// `probes` interior points where |grad f| is not tiny.
double gradient_check(const CompactFunction& f, int probes, std::uint64_t seed);

}  // namespace affgeom
