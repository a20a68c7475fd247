#include "affgeom/functionals/functionals.hpp"

#include "affgeom/constants/constants.hpp"
#include "affgeom/core/quadrature.hpp"
#include "affgeom/core/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace affgeom {

namespace {

void check_dims(const std::vector<const Region*>& bodies, int expected, const char* who) {
  for (const Region* r : bodies) {
    require(r != nullptr, std::string(who) + ": null body");
    require(r->dim() == expected, std::string(who) + ": dimension mismatch");
  }
}

Estimate volume_product(const std::vector<const Region*>& bodies, const Budget& budget) {
  Estimate v = Estimate::exact(1.0);
  for (std::size_t i = 0; i < bodies.size(); ++i)
    v = v * bodies[i]->volume_estimate(budget.fork(0x766f6c00u + i));
  return v;
}

Estimate flag(Estimate e, double tol) {
  if (e.is_mc() && e.relative_error() > tol && e.status == Status::Ok) e.status = Status::Warning;
  return e;
}

}  // namespace

Estimate I_p(const std::vector<const Region*>& bodies, double p, const Budget& budget) {
  require(!bodies.empty(), "I_p: no bodies");
  const int n = bodies[0]->dim();
  require(static_cast<int>(bodies.size()) == n, "I_p: need n bodies in dimension n");
  check_dims(bodies, n, "I_p");
  std::vector<PointSource> sources;
  for (const Region* r : bodies) sources.push_back(uniform_source(*r));
  const Estimate m = det_moment(sources, p, budget.fork("I_p"));
  return flag(m * volume_product(bodies, budget), budget.tolerance);
}

Estimate I_p(const std::vector<ConvexBody>& bodies, double p, const Budget& budget) {
  std::vector<const Region*> ptrs;
  for (const auto& b : bodies) ptrs.push_back(&b);
  return I_p(ptrs, p, budget);
}

ConvexBody N_p_body(const std::vector<ConvexBody>& bodies, double p,
                    std::shared_ptr<const SphereRule> rule, const Budget& budget) {
  require(!bodies.empty(), "N_p_body: no bodies");
  const int n = bodies[0].dim() ;
  require(static_cast<int>(bodies.size()) == n - 1, "N_p_body: need n-1 bodies");
  if (!rule) rule = shared_rule(n);
  require(rule->dim == n, "N_p_body: rule dimension mismatch");
  std::vector<const Region*> ptrs;
  std::vector<PointSource> sources;
  for (const auto& b : bodies) {
    ptrs.push_back(&b);
    sources.push_back(uniform_source(b));
  }
  check_dims(ptrs, n, "N_p_body");
  const GroupedSums sums = det_moment_table(sources, p, *rule, budget.fork("N_p"));
  // Input volumes are exact or quadrature for every body the library builds
  // in n <= 3; their error does not enter the replicas.
  const double scale = volume_product(ptrs, budget).value;
  SupportTable t = support_table_from_sums(rule, sums, scale, p, budget.tolerance);
  t.symmetric = true;
  return ConvexBody::numeric_support(std::move(t));
}

ConvexBody centroid_body(const ConvexBody& L, double p, std::shared_ptr<const SphereRule> rule,
                         const Budget& budget) {
  require(p >= 1.0, "centroid_body: p must be >= 1");
  const int n = L.dim();
  if (!rule) rule = shared_rule(n);
  require(rule->dim == n, "centroid_body: rule dimension mismatch");
  const double c = c_np(n, p).value;
  const Box box = L.box();
  const SphereRule& r = *rule;
  const int m = r.size();
  auto sums = accumulate(budget.fork("centroid"), m, [&](Engine& eng, double* acc) {
    const Vec x = sample_uniform(L, box, eng);
    for (int j = 0; j < m; ++j) acc[j] += fast_pow(std::abs(r.nodes[j].dot(x)), p);
  });
  SupportTable t = support_table_from_sums(rule, sums, 1.0 / c, p, budget.tolerance);
  t.symmetric = true;
  return ConvexBody::numeric_support(std::move(t));
}

namespace {

// 1/2 int |<xi, eta>| f(eta) d eta for a density on S^1 or S^2.
std::function<double(const Vec&)> projection_support_density(int n, SurfaceMeasure::DensityFn f) {
  constexpr double pi = std::numbers::pi;
  if (n == 2) {
    return [f](const Vec& xi) {
      const double s = xi.norm();
      const double a0 = std::atan2(xi(1), xi(0)) + pi / 2;  // kink of |<xi, eta>|
      auto g = [&](double t) {
        const Vec eta = make_vec({std::cos(t), std::sin(t)});
        return std::abs(std::cos(t - a0 + pi / 2)) * f(eta);
      };
      return 0.5 * s * (quad::integrate(g, a0, a0 + pi, 1e-12) +
                        quad::integrate(g, a0 + pi, a0 + 2 * pi, 1e-12));
    };
  }
  require(n == 3, "projection_body: density route needs n in {2,3}");
  auto zn = std::make_shared<std::vector<double>>();
  auto zw = std::make_shared<std::vector<double>>();
  quad::gauss_legendre(40, *zn, *zw);
  const int nphi = 96;
  return [f, zn, zw, nphi](const Vec& xi) {
    const double s = xi.norm();
    const Eigen::Vector3d e3 = Eigen::Vector3d(xi) / s;
    const Eigen::Vector3d a = std::abs(e3(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = (a - a.dot(e3) * e3).normalized();
    const Eigen::Vector3d e2 = e3.cross(e1);
    double total = 0.0;
    // z in [0,1] and [-1,0], each mapped to GL nodes on [-1,1].
    for (int half = 0; half < 2; ++half) {
      for (std::size_t i = 0; i < zn->size(); ++i) {
        const double z = (half == 0 ? 0.5 : -0.5) * ((*zn)[i] + 1.0);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double ring = 0.0;
        for (int k = 0; k < nphi; ++k) {
          const double ph = 2.0 * pi * k / nphi;
          const Eigen::Vector3d eta = z * e3 + rho * (std::cos(ph) * e1 + std::sin(ph) * e2);
          ring += f(Vec(eta));
        }
        total += 0.5 * (*zw)[i] * std::abs(z) * ring * (2.0 * pi / nphi);
      }
    }
    return 0.5 * s * total;
  };
}

}  // namespace

ConvexBody projection_body(const ConvexBody& L, std::shared_ptr<const SphereRule> rule,
                           const Budget& budget) {
  const int n = L.dim();
  if (!rule) rule = shared_rule(n);
  require(rule->dim == n, "projection_body: rule dimension mismatch");
  const SurfaceMeasure S = surface_measure(L, 1.0);
  SupportTable t;
  t.rule = rule;
  t.symmetric = true;
  if (S.kind() == SurfaceMeasure::Kind::Atomic) {
    auto atoms = std::make_shared<std::vector<WeightedPoint>>(S.atoms());
    t.exact = [atoms](const Vec& xi) {
      double s = 0.0;
      for (const auto& a : *atoms) s += a.w * std::abs(a.x.dot(xi));
      return 0.5 * s;
    };
    t.method = Method::ClosedForm;
  } else if (S.kind() == SurfaceMeasure::Kind::Density && (n == 2 || n == 3)) {
    t.exact = projection_support_density(n, S.density_fn());
    t.method = Method::Quadrature;
  } else {
    const SphereRule& r = *rule;
    const int m = r.size();
    auto sums = accumulate(budget.fork("projection"), m, [&](Engine& eng, double* acc) {
      const WeightedPoint s = S.sample(eng);
      for (int j = 0; j < m; ++j) acc[j] += 0.5 * s.w * std::abs(r.nodes[j].dot(s.x));
    });
    t = support_table_from_sums(rule, sums, 1.0, 1.0, budget.tolerance);
    t.symmetric = true;
    return ConvexBody::numeric_support(std::move(t));
  }
  // Evaluate on a canonical half-sphere so that h(xi) = h(-xi) bit for bit.
  t.exact = [raw = std::move(t.exact)](const Vec& xi) {
    for (int i = 0; i < xi.size(); ++i) {
      if (xi(i) > 0.0) break;
      if (xi(i) < 0.0) return raw(Vec(-xi));
    }
    return raw(xi);
  };
  t.values.resize(rule->size());
  for (int j = 0; j < rule->size(); ++j) t.values[j] = t.exact(rule->nodes[j]);
  return ConvexBody::numeric_support(std::move(t));
}

ConvexBody projection_body(const ConvexBody& L) { return projection_body(L, nullptr, Budget{}); }

Estimate polar_volume(const ConvexBody& tabulated) {
  const SupportTable* t = tabulated.table();
  require(t != nullptr, "polar_volume: body is not tabulated");
  const SphereRule& r = *t->rule;
  const int n = r.dim;
  Estimate e = table_functional(*t, [&](const std::vector<double>& h) {
    double s = 0.0;
    for (int j = 0; j < r.size(); ++j) s += r.weights[j] * std::pow(h[j], -n);
    return s / n;
  });
  if (e.method == Method::ClosedForm) e.method = Method::Quadrature;
  return e;
}

Estimate tabulated_volume(const ConvexBody& tabulated, int level) {
  const SupportTable* t = tabulated.table();
  require(t != nullptr, "tabulated_volume: body is not tabulated");
  const int n = t->rule->dim;
  const SphereRule q = SphereRule::make(n, level > 0 ? level : default_level(n));
  // Row i: projections of quadrature direction i on every table node.
  const Eigen::MatrixXd P = q.node_matrix.transpose() * t->rule->node_matrix;
  const int m = t->rule->size();
  // Per-node range of h over the table and its replicas.
  std::vector<double> lo(t->values), hi(t->values);
  for (const auto& r : t->replicas)
    for (int j = 0; j < m; ++j) {
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
  // Nodes that can attain max_j P(i,j)/h_j for some replica: the best node of
  // the full table bounds the maximum from below in every replica.
  std::vector<std::vector<int>> cand(q.size());
  for (int i = 0; i < q.size(); ++i) {
    int best = 0;
    double g = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j)
      if (const double v = P(i, j) / t->values[j]; v > g) {
        g = v;
        best = j;
      }
    const double floor = P(i, best) / hi[best];
    for (int j = 0; j < m; ++j)
      if (P(i, j) / lo[j] >= floor) cand[i].push_back(j);
  }
  Estimate e = table_functional(*t, [&](const std::vector<double>& h) {
    double s = 0.0;
    for (int i = 0; i < q.size(); ++i) {
      double g = -std::numeric_limits<double>::infinity();
      for (int j : cand[i]) g = std::max(g, P(i, j) / h[j]);
      s += q.weights[i] * std::pow(g, -n);
    }
    return s / n;
  });
  if (e.method == Method::ClosedForm) e.method = Method::Quadrature;
  return e;
}

Estimate projection_body_volume(const ConvexBody& L, const Budget& budget, int level) {
  const int n = L.dim();
  const SurfaceMeasure S = surface_measure(L, 1.0);
  if (S.kind() != SurfaceMeasure::Kind::Atomic)
    return tabulated_volume(projection_body(L, shared_rule(n, level), budget));
  require(n == 2 || n == 3, "projection_body_volume: n must be 2 or 3");
  std::vector<Vec> g;
  for (const auto& a : S.atoms()) g.push_back(a.w * a.x);
  const int m = static_cast<int>(g.size());
  double vol = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      if (n == 2) {
        vol += abs_det2(g[i], g[j]);
        continue;
      }
      for (int k = j + 1; k < m; ++k) vol += abs_det3(g[i], g[j], g[k]);
    }
  return Estimate::exact(vol);
}

Estimate dual_mixed_volume(const Region& K, const ConvexBody& L, double p, const Budget& budget) {
  require(p >= 1.0, "dual_mixed_volume: p must be >= 1");
  const int n = K.dim();
  require(L.dim() == n, "dual_mixed_volume: dimension mismatch");
  const Box box = K.box();
  auto sums = accumulate(budget.fork("dmv"), 1, [&](Engine& eng, double* acc) {
    acc[0] += fast_pow(L.gauge(sample_uniform(K, box, eng)), p);
  });
  const Estimate vol = K.volume_estimate(budget.fork("dmv-vol"));
  return flag((n + p) / n * vol * sums.component(0), budget.tolerance);
}

Estimate mixed_volume(const SurfaceMeasure& S, const ConvexBody& L, double p,
                      const Budget& budget) {
  const int n = S.dim();
  require(L.dim() == n, "mixed_volume: dimension mismatch");
  const Estimate s =
      S.integrate([&](const Vec& u) { return fast_pow(L.support(u), p); }, budget.fork("mv"));
  return flag(s / static_cast<double>(n), budget.tolerance);
}

Estimate mixed_volume(const ConvexBody& K, const ConvexBody& L, double p, const Budget& budget) {
  return mixed_volume(surface_measure(K, p), L, p, budget);
}

EquivalenceResult equivalence_check(const std::vector<ConvexBody>& bodies, double p,
                                    const Budget& budget, int level) {
  require(!bodies.empty(), "equivalence_check: no bodies");
  const int n = bodies[0].dim();
  require(static_cast<int>(bodies.size()) == n, "equivalence_check: need n bodies");
  EquivalenceResult out;
  out.lhs = I_p(bodies, p, budget.fork("equivalence-lhs"));

  const std::vector<ConvexBody> first(bodies.begin(), bodies.end() - 1);
  const auto rule = shared_rule(n, level);
  const ConvexBody N = N_p_body(first, p, rule, budget.fork("equivalence-rhs"));
  // int_{L_n} ||x||_{N^o}^p dx = 1/(n+p) int_S h_N^p r_{L_n}^{n+p}. The radial
  // factor has kinks for polytopes, so integrate on a 4x finer rule with h_N
  // interpolated from the table.
  const SphereRule fine = SphereRule::make(n, 4 * (level > 0 ? level : default_table_level(n)));
  std::vector<double> radial(fine.size());
  for (int j = 0; j < fine.size(); ++j) radial[j] = std::pow(bodies.back().radial(fine.nodes[j]), n + p);
  out.rhs = table_functional(*N.table(), [&](const std::vector<double>& h) {
    SupportTable t;
    t.rule = rule;
    t.values = h;
    const ConvexBody Nh = ConvexBody::numeric_support(std::move(t));
    double s = 0.0;
    for (int j = 0; j < fine.size(); ++j) s += fine.weights[j] * fast_pow(Nh.support(fine.nodes[j]), p) * radial[j];
    return s / (n + p);
  });
  out.ratio = out.lhs / out.rhs;
  return out;
}

}  // namespace affgeom
