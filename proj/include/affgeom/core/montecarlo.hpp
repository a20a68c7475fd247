#pragma once

#include "affgeom/core/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace affgeom {

using Engine = std::mt19937_64;

enum class Exec { Serial, Parallel };

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_tag(const char* s);

// Sampling budget plus the random stream an estimate draws from.
// Distinct estimates that must be statistically independent use distinct
// forks of the same budget.
struct Budget {
  std::int64_t samples = 200000;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;
  Exec exec = Exec::Parallel;
  double tolerance = 0.01;  // target relative standard error

  Budget fork(std::uint64_t tag) const;
  Budget fork(const char* tag) const { return fork(hash_tag(tag)); }
  Budget with_samples(std::int64_t n) const;
  Budget scaled(double factor) const;
  Engine engine(std::uint64_t a = 0, std::uint64_t b = 0) const;
};

inline constexpr int kGroups = 64;
inline constexpr std::int64_t kChunk = 4096;

// Per-group running sums of a fixed-width vector of per-sample values.
// Group sums feed a delete-one-group jackknife for nonlinear functionals.
class GroupedSums {
 public:
  GroupedSums(int width, int groups);

  int width() const { return width_; }
  int groups() const { return groups_; }
  std::int64_t total() const;
  double* group(int g) { return sums_.data() + static_cast<std::size_t>(g) * width_; }
  const double* group(int g) const { return sums_.data() + static_cast<std::size_t>(g) * width_; }
  std::int64_t& count(int g) { return counts_[g]; }
  std::int64_t count(int g) const { return counts_[g]; }

  std::vector<double> mean() const;
  std::vector<double> leave_out_mean(int g) const;

  // Jackknife estimate of f(mean).
  template <class F>
  Estimate jackknife(F&& f) const {
    const std::vector<double> m = mean();
    const double full = f(std::span<const double>(m));
    std::vector<double> reps(groups_);
    double avg = 0.0;
    for (int g = 0; g < groups_; ++g) {
      const std::vector<double> lo = leave_out_mean(g);
      reps[g] = f(std::span<const double>(lo));
      avg += reps[g];
    }
    avg /= groups_;
    double ss = 0.0;
    for (double r : reps) ss += (r - avg) * (r - avg);
    const double var = ss * (groups_ - 1.0) / groups_;
    return Estimate::monte_carlo(full, std::sqrt(var), total());
  }

  // Linear case: mean of component k.
  Estimate component(int k) const;

 private:
  int width_;
  int groups_;
  std::vector<double> sums_;
  std::vector<std::int64_t> counts_;
};

int groups_for(std::int64_t samples);

// Runs `kernel(engine, acc)` once per sample; the kernel adds its per-sample
// vector into `acc` (length `width`). Work is split into fixed groups and
// chunks, each with its own engine, so serial and parallel execution produce
// bit-identical sums.
template <class Kernel>
GroupedSums accumulate(const Budget& budget, int width, Kernel&& kernel) {
  const std::int64_t n = budget.samples;
  const int G = groups_for(n);
  GroupedSums out(width, G);
  auto run_group = [&](int g) {
    const std::int64_t count = n / G + (g < n % G ? 1 : 0);
    double* acc = out.group(g);
    std::int64_t done = 0;
    for (std::uint64_t chunk = 0; done < count; ++chunk) {
      Engine eng = budget.engine(static_cast<std::uint64_t>(g), chunk);
      const std::int64_t m = std::min<std::int64_t>(kChunk, count - done);
      for (std::int64_t i = 0; i < m; ++i) kernel(eng, acc);
      done += m;
    }
    out.count(g) = count;
  };
  if (budget.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int g = 0; g < G; ++g) run_group(g);
  } else {
    for (int g = 0; g < G; ++g) run_group(g);
  }
  return out;
}

// Uniform double in [0,1) with 53 random bits; independent of the standard
// library's distribution implementation.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

double standard_normal(Engine& e);

// Integer powers dominate the hot loops; avoid std::pow for them.
inline double fast_pow(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  if (p == 3.0) return x * x * x;
  if (p == 4.0) {
    const double y = x * x;
    return y * y;
  }
  return std::pow(x, p);
}

}  // namespace affgeom
