#include "affgeom/functionals/sources.hpp"

#include "affgeom/core/volume.hpp"
#include "affgeom/functionals/det.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace affgeom {

PointSource uniform_source(const Region& region) {
  const Region* r = &region;
  const Box box = region.box();
  return [r, box](Engine& eng) { return WeightedPoint{sample_uniform(*r, box, eng), 1.0}; };
}

Estimate det_moment(const std::vector<PointSource>& sources, double p, const Budget& budget) {
  const int k = static_cast<int>(sources.size());
  require(k >= 2 && k <= kMaxDim, "det_moment: need between 2 and kMaxDim sources");
  require(p >= 1.0, "det_moment: p must be >= 1");
  auto sums = accumulate(budget, 1, [&](Engine& eng, double* acc) {
    std::array<Vec, kMaxDim> xs;
    double w = 1.0;
    for (int i = 0; i < k; ++i) {
      WeightedPoint s = sources[i](eng);
      xs[i] = std::move(s.x);
      w *= s.w;
    }
    acc[0] += w * fast_pow(det_volume(std::span<const Vec>(xs.data(), k)), p);
  });
  Estimate e = sums.component(0);
  if (e.relative_error() > budget.tolerance) e.status = Status::Warning;
  return e;
}

GroupedSums det_moment_table(const std::vector<PointSource>& sources, double p,
                             const SphereRule& rule, const Budget& budget) {
  const int k = static_cast<int>(sources.size());
  require(k + 1 == rule.dim, "det_moment_table: need n-1 sources");
  require(p >= 1.0, "det_moment_table: p must be >= 1");
  const int m = rule.size();
  return accumulate(budget, m, [&](Engine& eng, double* acc) {
    std::array<Vec, kMaxDim> xs;
    double w = 1.0;
    for (int i = 0; i < k; ++i) {
      WeightedPoint s = sources[i](eng);
      xs[i] = std::move(s.x);
      w *= s.w;
    }
    const Vec c = cofactor_vector(std::span<const Vec>(xs.data(), k));
    for (int j = 0; j < m; ++j) acc[j] += w * fast_pow(std::abs(rule.nodes[j].dot(c)), p);
  });
}

SupportTable support_table_from_sums(std::shared_ptr<const SphereRule> rule,
                                     const GroupedSums& sums, double scale, double p,
                                     double tolerance) {
  const int m = rule->size();
  require(sums.width() == m, "support_table_from_sums: width mismatch");
  SupportTable t;
  t.rule = std::move(rule);
  t.method = Method::MonteCarlo;
  t.samples = sums.total();
  const double inv_p = 1.0 / p;
  const std::vector<double> mean = sums.mean();
  t.values.resize(m);
  for (int j = 0; j < m; ++j) t.values[j] = std::pow(scale * mean[j], inv_p);
  const int G = sums.groups();
  t.replicas.resize(G);
  for (int g = 0; g < G; ++g) {
    std::vector<double> lo = sums.leave_out_mean(g);
    for (double& v : lo) v = std::pow(scale * v, inv_p);
    t.replicas[g] = std::move(lo);
  }
  t.node_sigma.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    double avg = 0.0;
    for (int g = 0; g < G; ++g) avg += t.replicas[g][j];
    avg /= G;
    double ss = 0.0;
    for (int g = 0; g < G; ++g) ss += (t.replicas[g][j] - avg) * (t.replicas[g][j] - avg);
    t.node_sigma[j] = std::sqrt(ss * (G - 1.0) / G);
    const double rel = t.values[j] > 0 ? t.node_sigma[j] / t.values[j] : INFINITY;
    t.worst_rel_error = std::max(t.worst_rel_error, rel);
    if (rel > tolerance) t.flagged.push_back(j);
  }
  return t;
}

Estimate table_functional(const SupportTable& table,
                          const std::function<double(const std::vector<double>&)>& f) {
  const double full = f(table.values);
  if (table.replicas.empty()) {
    return table.method == Method::ClosedForm ? Estimate::exact(full) : Estimate::quadrature(full);
  }
  const int G = static_cast<int>(table.replicas.size());
  std::vector<double> reps(G);
  double avg = 0.0;
  for (int g = 0; g < G; ++g) {
    reps[g] = f(table.replicas[g]);
    avg += reps[g];
  }
  avg /= G;
  double ss = 0.0;
  for (double r : reps) ss += (r - avg) * (r - avg);
  return Estimate::monte_carlo(full, std::sqrt(ss * (G - 1.0) / G), table.samples);
}

int default_table_level(int n) {
  switch (n) {
    case 2: return 720;
    case 3: return 48;
    default: return 12;
  }
}

std::shared_ptr<const SphereRule> shared_rule(int n, int level) {
  if (level <= 0) level = default_table_level(n);
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const SphereRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, level}];
  if (!slot) slot = std::make_shared<const SphereRule>(SphereRule::make(n, level));
  return slot;
}

}  // namespace affgeom
