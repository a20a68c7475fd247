#include <doctest.h>

#include "affgeom/constants/constants.hpp"
#include "affgeom/core/volume.hpp"
#include "affgeom/funcspace/function.hpp"
#include "affgeom/functionals/functionals.hpp"
#include "oracles.hpp"

#include <random>

using namespace affgeom;

namespace {

Budget budget(std::int64_t samples, std::uint64_t seed) {
  Budget b;
  b.samples = samples;
  b.seed = seed;
  return b;
}

// Integral of f(s) over [0, inf) by Simpson after s = t / (1 - t).
double half_line(const std::function<double(double)>& f) {
  return oracle::simpson(
      [&](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double s = t / (1.0 - t);
        return f(s) / ((1.0 - t) * (1.0 - t));
      },
      0.0, 1.0, 200000);
}

double fd_derivative(const std::function<double(double)>& f, double s, double h = 1e-6) {
  return (f(s + h) - f(s - h)) / (2.0 * h);
}

Mat ellipsoid_matrix() {
  Mat A(3, 3);
  A << 1.3, 0.2, 0.0, 0.1, 0.8, 0.3, 0.0, -0.2, 1.1;
  return A;
}

}  // namespace

TEST_CASE("profile derivatives match finite differences") {
  std::vector<Profile> ps = {moment_profile(2.0, 3.0), moment_profile(1.5, 0.8), sobolev_profile(3, 2.0),
                             sobolev_profile(4, 1.5), bump_profile(3), cone_profile(),
                             smoothed_indicator_profile(0.2)};
  for (const auto& P : ps) {
    CAPTURE(P.name);
    for (double s : {0.13, 0.37, 0.61, 0.93, 1.7}) {
      if (std::isfinite(P.end) && s + 1e-3 >= P.end) continue;
      const double d = fd_derivative(P.G, s);
      CHECK(P.dG(s) == doctest::Approx(d).epsilon(1e-6).scale(1.0));
      if (P.d2G) CHECK(P.d2G(s) == doctest::Approx(fd_derivative(P.dG, s)).epsilon(1e-5).scale(1.0));
    }
  }
  const Profile S = smoothed_indicator_profile(0.1);
  CHECK(S.G(0.94) == 1.0);
  CHECK(S.G(1.0) == doctest::Approx(0.5));
  CHECK(S.G(1.06) == 0.0);
}

TEST_CASE("gradient and Hessian oracles") {
  const auto sob = normalized_sobolev_extremal(ConvexBody::ellipsoid(ellipsoid_matrix()), 2.0);
  const auto bump = CompactFunction::radial({ConvexBody::ball(3), bump_profile(3), 2.0, 1.5});
  const auto bumps = random_bumps(2, 4, 11);
  Mat A(2, 2);
  A << 1.2, 0.4, -0.3, 0.9;
  std::vector<CompactFunction> fs = {sob, bump, bumps, power(bumps, 1.5), compose_linear(bumps, A),
                                     power(bump, 2.0), compose_linear(sob, ellipsoid_matrix())};
  for (const auto& f : fs) {
    CAPTURE(f.name());
    CHECK(gradient_check(f, 40, 3) < 1e-6);
    REQUIRE(f.has_hessian());
    std::mt19937_64 eng(5);
    int checked = 0;
    for (int t = 0; t < 2000 && checked < 20; ++t) {
      const Vec x = f.box().sample(eng);
      if (!(f(x) > 1e-3)) continue;
      const double h = 1e-5;
      const Mat H = f.hessian(x);
      for (int i = 0; i < f.dim(); ++i) {
        Vec a = x, b = x;
        a(i) += h;
        b(i) -= h;
        const Vec col = (f.gradient(a) - f.gradient(b)) / (2.0 * h);
        CHECK((col - H.col(i)).norm() <= 1e-5 * (1.0 + H.norm()));
      }
      ++checked;
    }
    CHECK(checked == 20);
  }
  CHECK_FALSE(indicator(ConvexBody::ball(2)).has_gradient());
  CHECK_THROWS_AS(indicator(ConvexBody::ball(2)).gradient(Vec::Zero(2)), DomainError);
}

TEST_CASE("radial evaluation and sup norm") {
  const auto K = ConvexBody::cube(2, 0.5);
  const auto f = CompactFunction::radial({K, bump_profile(2), 3.0, 2.0});
  CHECK(f(make_vec({0.0, 0.0})) == 3.0);
  // ||(0.2, 0.1)||_K = 0.4, b s = 0.8.
  CHECK(f(make_vec({0.2, 0.1})) == doctest::Approx(3.0 * std::pow(1.0 - 0.64, 2)));
  CHECK(f(make_vec({0.3, 0.0})) == 0.0);
  CHECK(*f.sup_norm() == 3.0);
  CHECK(*power(f, 2.0).sup_norm() == 9.0);
}

TEST_CASE("L^lambda norms") {
  const auto chi = indicator(ConvexBody::ball(2));
  const Estimate n2 = lp_norm(chi, 2.0, budget(200'000, 1));
  CHECK(n2.agrees_with(std::sqrt(oracle::pi), 3.0, 1e-12));
  CHECK(lp_norm(chi, kInf, budget(1000, 1)).value == 1.0);

  // Sobolev extremal in R^3, p = 2, is in L^6 but not L^1.
  const auto F = CompactFunction::radial({ConvexBody::ball(3), sobolev_profile(3, 2.0), 1.0, 1.0});
  const double ref = std::pow(4.0 * oracle::pi * half_line([](double s) {
                                return std::pow(1.0 + s * s, -3.0) * s * s;
                              }),
                              1.0 / 6.0);
  CHECK(lp_norm(F, 6.0, budget(400'000, 2)).agrees_with(ref));

  // Non-radial functions fall back to box sampling.
  const auto g = random_bumps(2, 3, 7);
  const Estimate m = lp_norm(g, kInf, budget(100'000, 3));
  CHECK(m.value > 0.5);
  CHECK(m.value <= 3.0 * 1.5);
}

TEST_CASE("space source integrates radial functions without bias") {
  for (const auto& K : {ConvexBody::ball(2), ConvexBody::cube(3), ConvexBody::ellipsoid(ellipsoid_matrix())}) {
    const int n = K.dim();
    const auto f = CompactFunction::radial({K, bump_profile(3), 1.7, 1.3});
    const double vk = *K.exact_volume();
    const double ref = n * vk * 1.7 *
                       oracle::simpson([&](double s) { return std::pow(1.0 - 1.69 * s * s, 3) * std::pow(s, n - 1); },
                                       0.0, 1.0 / 1.3);
    auto src = f.space_source();
    auto sums = accumulate(budget(200'000, 9), 1, [&](Engine& eng, double* acc) {
      const auto w = src(eng);
      acc[0] += w.w * f(w.x);
    });
    const Estimate e = sums.component(0);
    CAPTURE(K.describe());
    CHECK(e.agrees_with(ref));
    CHECK(e.relative_error() < 5e-3);
  }
}

TEST_CASE("normalized moment extremals have unit dual mixed volume ratio") {
  for (double lambda : {0.8, 2.0, 3.0, kInf})
    for (const auto& K : {ConvexBody::ball(2), ConvexBody::cube(2)}) {
      const double p = 1.0;
      const auto f = normalized_moment_extremal(K, p, lambda);
      const Estimate v = dual_mixed_volume_f(f, K, p, budget(200'000, 12));
      CAPTURE(lambda);
      CAPTURE(K.describe());
      CHECK(v.agrees_with(*K.exact_volume(), 3.5));
    }
  CHECK_THROWS_AS(normalized_moment_extremal(ConvexBody::ball(2), 1.0, 0.5), DomainError);
}

TEST_CASE("normalized Sobolev extremals") {
  const auto B = ConvexBody::ball(3);
  const auto f = normalized_sobolev_extremal(B, 2.0);
  const double w3 = oracle::ball_volume(3);
  CHECK(mixed_volume_f(f, B, 2.0, budget(200'000, 20)).agrees_with(w3));
  const SurfaceMeasure mu = surface_measure_f(f, 2.0);
  CHECK(mu.total_mass(budget(200'000, 21)).agrees_with(3.0 * w3));
  // p = 1 uses the mollified indicator; still exact up to MC error.
  const auto g = normalized_sobolev_extremal(ConvexBody::cube(3), 1.0, 0.04);
  CHECK(mixed_volume_f(g, ConvexBody::cube(3), 1.0, budget(200'000, 22)).agrees_with(8.0));
  CHECK_THROWS_AS(normalized_sobolev_extremal(B, 3.0), DomainError);
}

TEST_CASE("indicator functions reproduce the set functionals") {
  const auto chi = indicator(ConvexBody::ball(2));
  const Estimate e = I_p_functions({chi, chi}, 1.0, budget(200'000, 30));
  CHECK(e.agrees_with(oracle::ip_balls(2, 1.0)));

  const auto rule = shared_rule(2, 180);
  const ConvexBody N = N_p_function_body({chi}, 2.0, rule, budget(200'000, 31));
  const double c = std::sqrt(oracle::pi / 4.0);
  int inside = 0;
  for (int j = 0; j < rule->size(); ++j)
    inside += std::abs(N.table()->values[j] - c) <= 3.0 * N.table()->node_sigma[j];
  CHECK(inside >= 0.95 * rule->size());

  const ConvexBody K = ConvexBody::cube(2);
  const Estimate d = dual_mixed_volume_f(indicator(K), ConvexBody::ball(2), 1.0, budget(200'000, 32));
  CHECK(agree(d, dual_mixed_volume(K, ConvexBody::ball(2), 1.0, budget(200'000, 33))));
}

TEST_CASE("I_p of functions is SL(n) invariant") {
  const auto l = random_bumps(2, 3, 40);
  Mat A(2, 2);
  A << 1.5, 0.7, 0.2, 0.76;
  A /= std::sqrt(A.determinant());
  const Estimate a = I_p_functions({l, l}, 2.0, budget(200'000, 41));
  const Estimate b = I_p_functions({compose_linear(l, A), compose_linear(l, A)}, 2.0, budget(200'000, 42));
  CHECK(agree(a, b));
  // Radial inputs stay radial under composition.
  const auto f = compose_linear(normalized_moment_extremal(ConvexBody::ball(2), 2.0, 3.0), A);
  CHECK(f.radial_structure().has_value());
}

TEST_CASE("gradient sources") {
  const auto f = CompactFunction::radial({ConvexBody::ball(2), bump_profile(3), 1.0, 1.0});
  auto src = gradient_source(f, 2.0);
  auto sums = accumulate(budget(200'000, 50), 1, [&](Engine& eng, double* acc) {
    const auto w = src(eng);
    acc[0] += w.w * w.x.squaredNorm();
  });
  // int |grad f|^2 = 2 pi int_0^1 (6 s (1 - s^2)^2)^2 s ds
  const double ref =
      2.0 * oracle::pi * oracle::simpson([](double s) { return 36.0 * s * s * std::pow(1 - s * s, 4) * s; }, 0, 1);
  CHECK(sums.component(0).agrees_with(ref));
}
