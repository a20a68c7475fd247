#include "affgeom/functionals/surface_measure.hpp"

#include "affgeom/core/bordered.hpp"
#include "affgeom/core/volume.hpp"

#include <algorithm>
#include <cmath>

namespace affgeom {

SurfaceMeasure SurfaceMeasure::atomic(int n, std::vector<WeightedPoint> atoms) {
  require(!atoms.empty(), "SurfaceMeasure: no atoms");
  SurfaceMeasure s;
  s.kind_ = Kind::Atomic;
  s.n_ = n;
  auto cum = std::make_shared<std::vector<double>>();
  double total = 0.0;
  for (auto& a : atoms) {
    require(a.x.size() == n, "SurfaceMeasure: atom dimension mismatch");
    require(a.w >= 0.0 && std::isfinite(a.w), "SurfaceMeasure: atom weights must be nonnegative");
    const double len = a.x.norm();
    require(len > 0.0, "SurfaceMeasure: zero normal");
    a.x /= len;
    total += a.w;
    cum->push_back(total);
  }
  require(total > 0.0, "SurfaceMeasure: zero total mass");
  s.atom_total_ = total;
  s.cumulative_ = std::move(cum);
  s.atoms_ = std::make_shared<const std::vector<WeightedPoint>>(std::move(atoms));
  return s;
}

SurfaceMeasure SurfaceMeasure::density(int n, DensityFn f) {
  require(static_cast<bool>(f), "SurfaceMeasure: empty density");
  SurfaceMeasure s;
  s.kind_ = Kind::Density;
  s.n_ = n;
  s.density_ = std::move(f);
  return s;
}

SurfaceMeasure SurfaceMeasure::pushforward(int n, Sampler sampler) {
  require(static_cast<bool>(sampler), "SurfaceMeasure: empty sampler");
  SurfaceMeasure s;
  s.kind_ = Kind::Pushforward;
  s.n_ = n;
  s.sampler_ = std::move(sampler);
  return s;
}

WeightedPoint SurfaceMeasure::sample(Engine& eng) const {
  switch (kind_) {
    case Kind::Atomic: {
      const double r = uniform01(eng) * atom_total_;
      auto it = std::upper_bound(cumulative_->begin(), cumulative_->end(), r);
      const std::size_t i = std::min<std::size_t>(it - cumulative_->begin(), atoms_->size() - 1);
      return {(*atoms_)[i].x, atom_total_};
    }
    case Kind::Density: {
      Vec u = sample_sphere(eng, n_);
      const double w = sphere_area(n_) * density_(u);
      return {std::move(u), w};
    }
    case Kind::Pushforward:
    default: return sampler_(eng);
  }
}

PointSource SurfaceMeasure::source() const {
  SurfaceMeasure copy = *this;
  return [copy](Engine& eng) { return copy.sample(eng); };
}

Estimate SurfaceMeasure::integrate(const std::function<double(const Vec&)>& phi,
                                   const Budget& budget, int level) const {
  switch (kind_) {
    case Kind::Atomic: {
      double s = 0.0;
      for (const auto& a : *atoms_) s += a.w * phi(a.x);
      return Estimate::exact(s);
    }
    case Kind::Density: {
      const SphereRule rule = SphereRule::make(n_, level > 0 ? level : default_level(n_));
      return Estimate::quadrature(rule.integrate([&](const Vec& u) { return density_(u) * phi(u); }));
    }
    case Kind::Pushforward:
    default: {
      auto sums = accumulate(budget, 1, [&](Engine& eng, double* acc) {
        const WeightedPoint s = sampler_(eng);
        acc[0] += s.w * phi(s.x);
      });
      Estimate e = sums.component(0);
      if (e.relative_error() > budget.tolerance) e.status = Status::Warning;
      return e;
    }
  }
}

Estimate SurfaceMeasure::total_mass(const Budget& budget) const {
  return integrate([](const Vec&) { return 1.0; }, budget);
}

Vec SurfaceMeasure::atom_moment() const {
  require(kind_ == Kind::Atomic, "atom_moment: measure is not atomic");
  Vec m = Vec::Zero(n_);
  for (const auto& a : *atoms_) m += a.w * a.x;
  return m;
}

std::optional<SurfaceMeasure::DensityFn> curvature_density_fn(const ConvexBody& L, double p) {
  const int n = L.dim();
  if (L.kind() == BodyKind::Ball) {
    const double r = L.support(unit(n, 0));
    const double f = std::pow(r, n - p);
    return SurfaceMeasure::DensityFn([f](const Vec&) { return f; });
  }
  if (!L.is_smooth()) return std::nullopt;
  return SurfaceMeasure::DensityFn([L, p, n](const Vec& xi) {
    const Vec u = xi / xi.norm();
    const Vec x = *L.support_point(u);
    const Vec g = L.gauge_gradient(x);
    const Mat H = *L.gauge_hessian(x);
    const double f1 = std::pow(g.norm(), n + 1) / std::abs(bordered_det(g, H));
    return p == 1.0 ? f1 : std::pow(L.support(u), 1.0 - p) * f1;
  });
}

namespace {

SurfaceMeasure atomic_measure(const ConvexBody& L, double p) {
  auto facets = L.facets();
  if (!facets) throw DomainError("surface_measure: body has no facets");
  std::vector<WeightedPoint> atoms;
  atoms.reserve(facets->size());
  for (const Facet& f : *facets) {
    if (!(f.offset > 0.0)) throw DomainError("surface_measure: origin not interior");
    atoms.push_back({f.normal, std::pow(f.offset, 1.0 - p) * f.area});
  }
  return SurfaceMeasure::atomic(L.dim(), std::move(atoms));
}

// With g the gauge and y uniform in L, grad g(y) pushes the cone-volume
// measure forward to the sphere; weighting by n vol(L) |grad g|^p yields
// S_p(L, .).
SurfaceMeasure pushforward_measure(const ConvexBody& L, double p) {
  const int n = L.dim();
  const double vol = volume(L, Budget{}).value;
  const Box box = L.box();
  const auto facets = L.facets();
  if (facets) {
    std::vector<Vec> scaled;
    for (const Facet& f : *facets) scaled.push_back(f.normal / f.offset);
    return SurfaceMeasure::pushforward(n, [L, box, scaled, vol, p, n](Engine& eng) {
      const Vec y = sample_uniform(L, box, eng);
      std::size_t best = 0;
      double g = -INFINITY;
      for (std::size_t i = 0; i < scaled.size(); ++i) {
        const double v = scaled[i].dot(y);
        if (v > g) {
          g = v;
          best = i;
        }
      }
      const double len = scaled[best].norm();
      return WeightedPoint{scaled[best] / len, n * vol * fast_pow(len, p)};
    });
  }
  return SurfaceMeasure::pushforward(n, [L, box, vol, p, n](Engine& eng) {
    const Vec y = sample_uniform(L, box, eng);
    const Vec g = L.gauge_gradient(y);
    const double len = g.norm();
    return WeightedPoint{g / len, n * vol * fast_pow(len, p)};
  });
}

}  // namespace

SurfaceMeasure surface_measure(const ConvexBody& L, double p, SurfaceBackend backend) {
  require(p >= 1.0, "surface_measure: p must be >= 1");
  const int n = L.dim();
  const bool numeric = L.kind() == BodyKind::NumericSupport;
  if (numeric && backend != SurfaceBackend::Auto && backend != SurfaceBackend::Pushforward)
    throw DomainError("surface_measure: tabulated bodies only admit the pushforward backend");
  if (backend == SurfaceBackend::Auto) {
    if (numeric) backend = SurfaceBackend::Pushforward;
    else if (L.facets()) backend = SurfaceBackend::Atomic;
    else if (L.kind() == BodyKind::Ball || L.is_smooth()) backend = SurfaceBackend::Density;
    else backend = SurfaceBackend::Pushforward;
  }
  switch (backend) {
    case SurfaceBackend::Atomic: return atomic_measure(L, p);
    case SurfaceBackend::Density: {
      auto f = curvature_density_fn(L, p);
      if (!f) throw DomainError("surface_measure: body has no curvature density");
      return SurfaceMeasure::density(n, std::move(*f));
    }
    default: return pushforward_measure(L, p);
  }
}

}  // namespace affgeom
