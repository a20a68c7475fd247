#include "affgeom/core/montecarlo.hpp"

#include <cmath>

namespace affgeom {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

std::uint64_t hash_tag(const char* s) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (; *s; ++s) {
    h ^= static_cast<unsigned char>(*s);
    h *= 1099511628211ULL;
  }
  return h;
}

Budget Budget::fork(std::uint64_t tag) const {
  Budget b = *this;
  b.stream = mix_seed(stream + 0x51ed27ULL, tag);
  return b;
}

Budget Budget::with_samples(std::int64_t n) const {
  Budget b = *this;
  b.samples = n;
  return b;
}

Budget Budget::scaled(double factor) const {
  Budget b = *this;
  b.samples = std::max<std::int64_t>(256, static_cast<std::int64_t>(samples * factor));
  return b;
}

Engine Budget::engine(std::uint64_t a, std::uint64_t b) const {
  std::uint64_t s = mix_seed(seed, stream);
  s = mix_seed(s, a);
  s = mix_seed(s, b);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return Engine(seq);
}

int groups_for(std::int64_t samples) {
  if (samples >= 2 * kGroups) return kGroups;
  return static_cast<int>(std::max<std::int64_t>(2, samples / 2));
}

GroupedSums::GroupedSums(int width, int groups)
    : width_(width), groups_(groups), sums_(static_cast<std::size_t>(width) * groups, 0.0),
      counts_(groups, 0) {}

std::int64_t GroupedSums::total() const {
  std::int64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::vector<double> GroupedSums::mean() const {
  std::vector<double> m(width_, 0.0);
  for (int g = 0; g < groups_; ++g)
    for (int k = 0; k < width_; ++k) m[k] += group(g)[k];
  const double n = static_cast<double>(total());
  for (double& x : m) x /= n;
  return m;
}

std::vector<double> GroupedSums::leave_out_mean(int g0) const {
  std::vector<double> m(width_, 0.0);
  for (int g = 0; g < groups_; ++g) {
    if (g == g0) continue;
    for (int k = 0; k < width_; ++k) m[k] += group(g)[k];
  }
  const double n = static_cast<double>(total() - counts_[g0]);
  for (double& x : m) x /= n;
  return m;
}

Estimate GroupedSums::component(int k) const {
  return jackknife([k](std::span<const double> m) { return m[k]; });
}

double standard_normal(Engine& e) {
  // Marsaglia polar method; deterministic across standard libraries.
  for (;;) {
    const double u = 2.0 * uniform01(e) - 1.0;
    const double v = 2.0 * uniform01(e) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

}  // namespace affgeom
