#include "affgeom/core/volume.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace affgeom {

double ball_volume(int n) {
  require(n >= 1, "ball_volume: n must be >= 1");
  return std::pow(std::numbers::pi, n / 2.0) / boost::math::tgamma(n / 2.0 + 1.0);
}

int default_level(int n) { return n == 2 ? 2048 : 96; }

double radial_quadrature_volume(const std::function<double(const Vec&)>& radial,
                                const SphereRule& rule) {
  const int n = rule.dim;
  double s = 0.0;
  for (int j = 0; j < rule.size(); ++j) s += rule.weights[j] * std::pow(radial(rule.nodes[j]), n);
  return s / n;
}

Estimate rejection_volume(const Region& region, const Budget& budget) {
  const Box box = region.box();
  const double bv = box.volume();
  auto sums = accumulate(budget, 1, [&](Engine& eng, double* acc) {
    if (region.contains(box.sample(eng))) acc[0] += 1.0;
  });
  Estimate e = bv * sums.component(0);
  if (e.relative_error() > budget.tolerance) e.status = Status::Warning;
  return e;
}

Estimate volume(const ConvexBody& body, const Budget& budget, VolumeBackend backend, int level) {
  const int n = body.dim();
  if (backend == VolumeBackend::Auto) {
    if (body.exact_volume()) backend = VolumeBackend::Exact;
    else if ((n == 2 || n == 3) && body.origin_interior()) backend = VolumeBackend::RadialQuadrature;
    else backend = VolumeBackend::RejectionMC;
  }
  switch (backend) {
    case VolumeBackend::Exact: {
      auto v = body.exact_volume();
      if (!v) throw DomainError("volume: no closed form for " + body.describe());
      return Estimate::exact(*v);
    }
    case VolumeBackend::RadialQuadrature: {
      if (!body.origin_interior()) throw DomainError("volume: origin not interior");
      const SphereRule rule = SphereRule::make(n, level > 0 ? level : default_level(n));
      return Estimate::quadrature(
          radial_quadrature_volume([&](const Vec& u) { return body.radial(u); }, rule));
    }
    case VolumeBackend::RejectionMC:
    default: return rejection_volume(body, budget);
  }
}

Vec sample_uniform(const Region& region, Engine& eng) { return sample_uniform(region, region.box(), eng); }

Vec sample_uniform(const Region& region, const Box& box, Engine& eng) {
  constexpr long kMaxTries = 10'000'000;  // ~acceptance 1e-6 fails with prob e^-10
  for (long t = 0; t < kMaxTries; ++t) {
    Vec x = box.sample(eng);
    if (region.contains(x)) return x;
  }
  throw CapacityError("sample_uniform: acceptance rate below 1e-6");
}

}  // namespace affgeom
