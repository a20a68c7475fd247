#include "affgeom/dual/dual.hpp"

#include "affgeom/core/bordered.hpp"
#include "affgeom/core/quadrature.hpp"
#include "affgeom/core/volume.hpp"
#include "affgeom/functionals/det.hpp"
#include "affgeom/functionals/functionals.hpp"
#include "affgeom/functionals/sources.hpp"

#include <cmath>
#include <numbers>

namespace affgeom {

// ----------------------------------------------------------------- StarBody
StarBody::StarBody(int n, Radial radial, std::string name, int level)
    : n_(n), radial_(std::make_shared<const Radial>(std::move(radial))), name_(std::move(name)) {
  require(n >= 2 && n <= kMaxDim, "StarBody: unsupported dimension");
  const SphereRule rule = SphereRule::make(n, level > 0 ? level : default_level(n));
  double rmax = 0.0, s = 0.0;
  for (int j = 0; j < rule.size(); ++j) {
    const double r = (*radial_)(rule.nodes[j]);
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("StarBody: radial function must be positive");
    rmax = std::max(rmax, r);
    s += rule.weights[j] * std::pow(r, n);
  }
  volume_ = s / n;
  rmax *= 1.02;  // the maximum between nodes can exceed the node maximum
  box_ = Box{Vec::Constant(n, -rmax), Vec::Constant(n, rmax)};
}

bool StarBody::contains(const Vec& x) const {
  const double r = x.norm();
  if (r == 0.0) return true;
  return r <= (*radial_)(x / r);
}

Estimate StarBody::volume_estimate(const Budget&) const { return Estimate::quadrature(volume_); }

// ------------------------------------------------------------ curvature etc.
SurfaceMeasure::DensityFn curvature_density(const ConvexBody& L, double p) {
  auto f = curvature_density_fn(L, p);
  if (!f) throw DomainError("curvature_density: S_p(" + L.describe() + ") has no density");
  return *f;
}

StarBody star_lp(const ConvexBody& L, double p) {
  const int n = L.dim();
  const auto f = curvature_density(L, p);
  return StarBody(n, [f, n, p](const Vec& u) { return std::pow(f(u), 1.0 / (n + p)); },
                  "L*_p(" + L.describe() + ")");
}

Estimate omega_p(const ConvexBody& L, double p) {
  const int n = L.dim();
  if (L.facets()) return Estimate::exact(0.0);
  if (L.kind() == BodyKind::Ball) {
    const double r = L.bounding_radius();
    return Estimate::exact(n * ball_volume(n) * std::pow(r, n * (n - p) / (n + p)));
  }
  const auto f = curvature_density(L, p);
  auto at = [&](int level) {
    return SphereRule::make(n, level).integrate([&](const Vec& u) { return std::pow(f(u), n / (n + p)); });
  };
  // Elongated bodies have sharply peaked densities: refine the rule until
  // successive levels agree.
  int level = default_level(n);
  double prev = at(level);
  for (int k = 0; k < 3; ++k) {
    level *= 2;
    const double cur = at(level);
    if (std::abs(cur - prev) <= 1e-10 * std::abs(cur)) return Estimate::quadrature(cur);
    prev = cur;
  }
  return Estimate::quadrature(prev).with_status(Status::Warning);
}

// ------------------------------------------------------------------ I~_p, N~_p
namespace {

// Sum over all tuples of atoms of prod w * D_n(u_1, ..., [xi])^p.
double atomic_tuple_sum(const std::vector<SurfaceMeasure>& mus, double p, const Vec* extra) {
  const int m = static_cast<int>(mus.size());
  const int n = mus[0].dim();
  std::vector<Vec> v(n);
  if (extra) v[n - 1] = *extra;
  double total = 0.0;
  // Iterative odometer over atom indices.
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < m; ++i) {
      const auto& a = mus[i].atoms()[idx[i]];
      v[i] = a.x;
      w *= a.w;
    }
    total += w * fast_pow(det_volume(std::span<const Vec>(v.data(), n)), p);
    int i = 0;
    while (i < m && ++idx[i] == mus[i].atoms().size()) idx[i++] = 0;
    if (i == m) break;
  }
  return total;
}

bool all_atomic(const std::vector<SurfaceMeasure>& mus) {
  for (const auto& m : mus)
    if (m.kind() != SurfaceMeasure::Kind::Atomic) return false;
  return true;
}

}  // namespace

Estimate I_tilde_p(const std::vector<ConvexBody>& bodies, double p, const Budget& budget,
                   TildeBackend backend) {
  require(!bodies.empty(), "I_tilde_p: no bodies");
  const int n = bodies[0].dim();
  require(static_cast<int>(bodies.size()) == n, "I_tilde_p: need n bodies");
  for (const auto& b : bodies) require(b.dim() == n, "I_tilde_p: dimension mismatch");
  if (backend == TildeBackend::Star) {
    std::vector<StarBody> stars;
    for (const auto& b : bodies) stars.push_back(star_lp(b, p));
    std::vector<const Region*> ptrs;
    for (const auto& s : stars) ptrs.push_back(&s);
    return std::pow(n + p, n) * I_p(ptrs, p, budget.fork("I_tilde_star"));
  }
  std::vector<SurfaceMeasure> mus;
  for (const auto& b : bodies) mus.push_back(surface_measure(b, p));
  if (all_atomic(mus)) return Estimate::exact(atomic_tuple_sum(mus, p, nullptr));
  std::vector<PointSource> src;
  for (const auto& m : mus) src.push_back(m.source());
  Estimate e = det_moment(src, p, budget.fork("I_tilde_sphere"));
  return e;
}

ConvexBody N_tilde_p_body(const std::vector<ConvexBody>& bodies, double p,
                          std::shared_ptr<const SphereRule> rule, const Budget& budget) {
  require(!bodies.empty(), "N_tilde_p_body: no bodies");
  const int n = bodies[0].dim();
  require(static_cast<int>(bodies.size()) == n - 1, "N_tilde_p_body: need n-1 bodies");
  if (!rule) rule = shared_rule(n);
  require(rule->dim == n, "N_tilde_p_body: rule dimension mismatch");
  std::vector<SurfaceMeasure> mus;
  for (const auto& b : bodies) mus.push_back(surface_measure(b, p));
  if (all_atomic(mus)) {
    auto h = [mus, p](const Vec& xi) { return std::pow(atomic_tuple_sum(mus, p, &xi), 1.0 / p); };
    SupportTable t;
    t.rule = rule;
    t.method = Method::ClosedForm;
    t.symmetric = true;
    for (const auto& u : rule->nodes) t.values.push_back(h(u));
    t.node_sigma.assign(rule->size(), 0.0);
    t.exact = h;
    return ConvexBody::numeric_support(std::move(t));
  }
  std::vector<PointSource> src;
  for (const auto& m : mus) src.push_back(m.source());
  const GroupedSums sums = det_moment_table(src, p, *rule, budget.fork("N_tilde"));
  SupportTable t = support_table_from_sums(rule, sums, 1.0, p, budget.tolerance);
  t.symmetric = true;
  return ConvexBody::numeric_support(std::move(t));
}

// ------------------------------------------------------------ bordered Hessian
double BorderedHessian::det() const { return K.determinant(); }

BorderedHessian bordered_hessian(const CompactFunction& l, const Vec& x) {
  if (!l.has_hessian()) throw DomainError("bordered_hessian: no Hessian oracle for " + l.name());
  return BorderedHessian{bordered_matrix(l.gradient(x), l.hessian(x))};
}

Estimate omega_p_function(const CompactFunction& l, double p, const Budget& budget) {
  if (!l.has_hessian()) throw DomainError("omega_p_function: no Hessian oracle for " + l.name());
  const int n = l.dim();
  const double e = p / (n + p);
  std::function<double(double)> profile;
  if (const auto& r = l.radial_structure()) {
    const RadialStructure q = *r;
    const double k1 = p * (n + 1) / (n + p), k2 = n * (n - 1.0) / (n + p);
    profile = [q, k1, k2](double s) {
      if (q.b * s >= q.G.end) return 0.0;
      return std::pow(std::abs(q.a * q.b * q.G.dG(q.b * s)), k1) * std::pow(s, k2);
    };
  }
  const PointSource src = l.space_source(profile);
  auto sums = accumulate(budget.fork("omega_p_f"), 1, [&](Engine& eng, double* acc) {
    const WeightedPoint s = src(eng);
    if (!(l(s.x) > 0.0)) return;
    const double d = bordered_det(l.gradient(s.x), l.hessian(s.x));
    acc[0] += s.w * std::pow(std::abs(d), e);
  });
  Estimate out = sums.component(0);
  if (out.relative_error() > budget.tolerance) out.status = Status::Warning;
  return out;
}

// ------------------------------------------------------------------ level sets
namespace {

Estimate levelset_radial(const CompactFunction& l, double p, double t) {
  const RadialStructure& r = *l.radial_structure();
  const int n = l.dim();
  auto F = [&](double s) { return s * r.b >= r.G.end ? 0.0 : r.a * r.G.G(r.b * s); };
  double hi = std::isfinite(r.support_end()) ? r.support_end() : 1.0;
  while (F(hi) > t) {
    hi *= 2.0;
    if (hi > 1e12) throw DomainError("omega_p_levelset: level not reached");
  }
  const double rho = quad::bisect([&](double s) { return F(s) - t; }, 0.0, hi);
  const double dF = r.a * r.b * r.G.dG(r.b * rho);
  return omega_p(r.K, p) * (std::pow(std::abs(dF), n * (p - 1.0) / (n + p)) *
                            std::pow(rho, n * (n - 1.0) / (n + p)));
}

Estimate levelset_trace(const CompactFunction& l, double p, double t) {
  if (l.dim() != 2) throw DomainError("omega_p_levelset: tracing needs n = 2");
  if (!l.has_hessian()) throw DomainError("omega_p_levelset: Hessian oracle required");
  const Vec c = l.center();
  if (!(t < l(c))) throw DomainError("omega_p_levelset: level above the value at the center");
  const Box& box = l.box();
  const double R = (box.hi - box.lo).norm();
  const double e = p / (2.0 + p);
  constexpr int M = 1024;
  constexpr int kMarch = 512;
  double sum = 0.0;
  for (int k = 0; k < M; ++k) {
    const double th = 2.0 * std::numbers::pi * k / M;
    const Vec u = make_vec({std::cos(th), std::sin(th)});
    const Vec v = make_vec({-std::sin(th), std::cos(th)});
    auto h = [&](double s) { return l(Vec(c + s * u)) - t; };
    double lo = 0.0, hi = -1.0;
    for (int i = 1; i <= kMarch; ++i) {
      const double s = R * i / kMarch;
      if (h(s) < 0.0) {
        hi = s;
        break;
      }
      lo = s;
    }
    if (hi < 0.0) throw DomainError("omega_p_levelset: level curve leaves the box");
    const double r = quad::bisect(h, lo, hi);
    const Vec x = c + r * u;
    const Vec g = l.gradient(x);
    const double gu = g.dot(u);
    const double gn = g.norm();
    if (!(gu < -1e-9 * gn) || !(gn > 0.0))
      throw DomainError("omega_p_levelset: level curve not star-shaped about the center");
    const double d = bordered_det(g, l.hessian(x));
    if (d < -1e-8 * gn * gn * gn / R) throw DomainError("omega_p_levelset: superlevel set not convex");
    const double dr = -r * g.dot(v) / gu;
    sum += std::pow(std::abs(d), e) / gn * std::hypot(dr, r);
  }
  return Estimate::quadrature(sum * 2.0 * std::numbers::pi / M);
}

}  // namespace

Estimate omega_p_levelset(const CompactFunction& l, double p, double t, LevelsetBackend backend) {
  const double top = l.sup_norm() ? *l.sup_norm() : l(l.center());
  if (!(t > 0.0 && t < top)) throw DomainError("omega_p_levelset: t must lie in (0, sup l)");
  if (backend == LevelsetBackend::Auto)
    backend = l.radial_structure() ? LevelsetBackend::Radial : LevelsetBackend::Trace;
  if (backend == LevelsetBackend::Radial) {
    if (!l.radial_structure()) throw DomainError("omega_p_levelset: function is not radial");
    return levelset_radial(l, p, t);
  }
  return levelset_trace(l, p, t);
}

// ------------------------------------------------------------- functional I~_p
Estimate I_tilde_p_functions(const std::vector<CompactFunction>& ls, double p, const Budget& budget) {
  require(!ls.empty(), "I_tilde_p_functions: no functions");
  const int n = ls[0].dim();
  require(static_cast<int>(ls.size()) == n, "I_tilde_p_functions: need n functions");
  std::vector<PointSource> src;
  for (const auto& l : ls) src.push_back(gradient_source(l, p));
  return det_moment(src, p, budget.fork("I_tilde_f"));
}

SmoothedTilde I_tilde_1_smoothed(const std::vector<ConvexBody>& bodies, const Budget& budget,
                                 std::vector<double> widths) {
  require(widths.size() >= 2, "I_tilde_1_smoothed: need at least two widths");
  SmoothedTilde out;
  out.widths = widths;
  for (std::size_t k = 0; k < widths.size(); ++k) {
    std::vector<CompactFunction> fs;
    for (const auto& b : bodies) fs.push_back(normalized_sobolev_extremal(b, 1.0, widths[k]));
    out.values.push_back(I_tilde_p_functions(fs, 1.0, budget.fork(0x5700u + k)));
  }
  // Linear in the width through the two finest widths.
  const std::size_t m = widths.size();
  const double w1 = widths[m - 2], w2 = widths[m - 1];
  out.extrapolated = (w1 / (w1 - w2)) * out.values[m - 1] - (w2 / (w1 - w2)) * out.values[m - 2];
  return out;
}

}  // namespace affgeom
