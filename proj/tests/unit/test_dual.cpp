#include <doctest.h>

#include "affgeom/constants/constants.hpp"
#include "affgeom/core/bordered.hpp"
#include "affgeom/dual/dual.hpp"
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

Mat diag2(double a, double b) {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = a;
  A(1, 1) = b;
  return A;
}

// Trapezoid over the unit circle.
double circle_integral(const std::function<double(const Vec&)>& f, int m = 4000) {
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * oracle::pi * k / m;
    s += f(make_vec({std::cos(t), std::sin(t)}));
  }
  return s * 2.0 * oracle::pi / m;
}

// Radial bump a (1 - |x|^2)^3 on the Euclidean ball with a chosen so that
// int t^{n(n-1)/(n+p)} |F'(t)|^{p(n+1)/(n+p)} dt = 1.
CompactFunction normalized_bump(int n, double p) {
  const double k1 = p * (n + 1) / (n + p), k2 = n * (n - 1.0) / (n + p);
  const double m = oracle::simpson(
      [&](double t) { return std::pow(t, k2) * std::pow(6.0 * t * std::pow(1 - t * t, 2), k1); }, 0.0, 1.0);
  return CompactFunction::radial({ConvexBody::ball(n), bump_profile(3), std::pow(m, -1.0 / k1), 1.0});
}

}  // namespace

TEST_CASE("curvature densities") {
  const auto B = ConvexBody::ball(3);
  const auto f = curvature_density(B, 2.0);
  CHECK(f(make_vec({0.0, 0.6, 0.8})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(curvature_density(ConvexBody::cube(2), 1.0), DomainError);

  const auto E = ConvexBody::ellipsoid(diag2(2.0, 1.0));
  const auto f1 = curvature_density(E, 1.0);
  CHECK(circle_integral([&](const Vec& u) { return E.support(u) * f1(u); }) ==
        doctest::Approx(2.0 * 2.0 * oracle::pi).epsilon(1e-8));
  const auto f3 = curvature_density(E, 3.0);
  std::mt19937_64 eng(3);
  std::normal_distribution<double> N;
  for (int k = 0; k < 20; ++k) {
    Vec u = make_vec({N(eng), N(eng)});
    u.normalize();
    CHECK(f3(u) == doctest::Approx(std::pow(E.support(u), -2.0) * f1(u)).epsilon(1e-10));
  }
}

TEST_CASE("star bodies and p-affine surface area") {
  for (int n : {2, 3}) {
    const auto B = ConvexBody::ball(n);
    const StarBody S = star_lp(B, 1.5);
    CHECK(S.volume_estimate(Budget{}).value == doctest::Approx(oracle::ball_volume(n)).epsilon(1e-10));
    CHECK(S.contains(Vec::Constant(n, 0.5)));
    CHECK_FALSE(S.contains(Vec::Constant(n, 0.72)));
    CHECK(omega_p(B, 2.0).value == doctest::Approx(n * oracle::ball_volume(n)));
  }
  CHECK(omega_p(ConvexBody::cube(3), 1.0).value == 0.0);

  // Omega_1 of an ellipsoid: n w_n det(A)^{(n-1)/(n+1)}.
  Mat A(3, 3);
  A << 1.4, 0.3, 0.0, 0.0, 0.9, 0.2, 0.1, 0.0, 0.7;
  const double d = A.determinant();
  CHECK(omega_p(ConvexBody::ellipsoid(A), 1.0).value ==
        doctest::Approx(3.0 * oracle::ball_volume(3) * std::pow(d, 0.5)).epsilon(1e-6));
  // Star body route: Omega_p = n vol(L*_p).
  CHECK(star_lp(ConvexBody::ellipsoid(A), 1.0).volume_estimate(Budget{}).value * 3.0 ==
        doctest::Approx(omega_p(ConvexBody::ellipsoid(A), 1.0).value).epsilon(1e-8));
  // Centro-affine invariance under det-1 maps.
  const Mat S = A / std::cbrt(d);
  for (double p : {1.0, 2.0, 4.0})
    CHECK(omega_p(ConvexBody::ellipsoid(S), p).value == doctest::Approx(3.0 * oracle::ball_volume(3)).epsilon(1e-6));
  const Mat S2 = diag2(2.0, 0.5);
  CHECK(omega_p(ConvexBody::ellipsoid(S2), 3.0).value == doctest::Approx(2.0 * oracle::pi).epsilon(1e-9));
}

TEST_CASE("I~_p of bodies") {
  const auto B = ConvexBody::ball(2);
  const Estimate s = I_tilde_p({B, B}, 1.0, budget(200'000, 1), TildeBackend::Sphere);
  CHECK(s.agrees_with(8.0 * oracle::pi));
  const Estimate t = I_tilde_p({B, B}, 1.0, budget(200'000, 2), TildeBackend::Star);
  CHECK(t.agrees_with(8.0 * oracle::pi));

  // Atomic sum for the square: 2! vol(Pi Q) = 32.
  const auto Q = ConvexBody::cube(2);
  const Estimate q = I_tilde_p({Q, Q}, 1.0, budget(1000, 3));
  CHECK(q.method == Method::ClosedForm);
  CHECK(q.value == doctest::Approx(32.0).epsilon(1e-14));
  CHECK(q.value == doctest::Approx(2.0 * 16.0));

  // Equality on balls against b~ built from the independent b oracle.
  for (int n : {2, 3})
    for (double p : {1.0, 2.0}) {
      std::vector<ConvexBody> balls(n, ConvexBody::ball(n));
      const double bt = std::pow(n + p, n) * oracle::b_np(n, p) / std::pow(n, n + p);
      const double rhs = bt * std::pow(n * oracle::ball_volume(n), n + p);
      CAPTURE(n);
      CAPTURE(p);
      CHECK(I_tilde_p(balls, p, budget(200'000, 4)).agrees_with(rhs));
    }

  // The two backends agree on a smooth non-round body.
  const auto E = ConvexBody::ellipsoid(diag2(1.6, 0.7));
  const Estimate a = I_tilde_p({E, B}, 2.0, budget(300'000, 5), TildeBackend::Sphere);
  const Estimate b = I_tilde_p({E, B}, 2.0, budget(300'000, 6), TildeBackend::Star);
  CHECK(agree(a, b));
  // Dual random-simplex inequality direction on the ellipsoid pair.
  const double bt = 16.0 * oracle::b_np(2, 2.0) / 256.0;
  const double rhs = bt * std::pow(omega_p(E, 2.0).value * omega_p(B, 2.0).value, 2.0);
  CHECK(a.value >= rhs - 3.0 * a.sigma);
}

TEST_CASE("N~_p bodies") {
  const auto rule = shared_rule(2, 90);
  const ConvexBody N = N_tilde_p_body({ConvexBody::ball(2)}, 1.0, rule, budget(200'000, 10));
  int inside = 0;
  for (int j = 0; j < rule->size(); ++j) inside += std::abs(N.table()->values[j] - 4.0) <= 3.0 * N.table()->node_sigma[j];
  CHECK(inside >= 0.95 * rule->size());

  // Square: h(xi) = sum_atoms 2 |det(u, xi)| = 4 (|xi_1| + |xi_2|).
  const ConvexBody M = N_tilde_p_body({ConvexBody::cube(2)}, 1.0, rule, budget(1000, 11));
  for (int j = 0; j < rule->size(); j += 7) {
    const Vec& u = rule->nodes[j];
    CHECK(M.support(u) == doctest::Approx(4.0 * (std::abs(u(0)) + std::abs(u(1)))));
  }
}

TEST_CASE("bordered Hessian") {
  const auto l = random_bumps(3, 3, 2);
  const Vec x = make_vec({0.1, -0.2, 0.05});
  const BorderedHessian K = bordered_hessian(l, x);
  CHECK(K.K.rows() == 4);
  CHECK(K.K(0, 0) == 0.0);
  CHECK((K.K - K.K.transpose()).norm() == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(K.K(0, i + 1) == l.gradient(x)(i));
  CHECK(K.det() == doctest::Approx(bordered_det(l.gradient(x), l.hessian(x))));
  CHECK_THROWS_AS(bordered_hessian(indicator(ConvexBody::ball(3)), x), DomainError);
}

TEST_CASE("Omega_p of functions") {
  // Radial identity: normalized profile on the ball gives n w_n.
  for (auto [n, p] : {std::pair{2, 1.0}, std::pair{2, 2.0}, std::pair{3, 2.0}}) {
    const auto l = normalized_bump(n, p);
    CAPTURE(n);
    CAPTURE(p);
    CHECK(omega_p_function(l, p, budget(200'000, 20)).agrees_with(n * oracle::ball_volume(n)));
  }
  // Affine invariance under a det-1 map.
  const auto l = random_bumps(2, 1, 4);
  Mat A(2, 2);
  A << 1.3, 0.5, 0.1, 0.8;
  A /= std::sqrt(A.determinant());
  const Estimate a = omega_p_function(l, 1.0, budget(300'000, 21));
  const Estimate b = omega_p_function(compose_linear(l, A), 1.0, budget(300'000, 22));
  CHECK(agree(a, b));
}

TEST_CASE("Omega_p on level sets") {
  // Radial closed form against the Euclidean-ball formula.
  for (int n : {2, 3})
    for (double p : {1.0, 2.0}) {
      const auto l = CompactFunction::radial({ConvexBody::ball(n), bump_profile(3), 1.5, 1.0});
      for (double t : {0.1, 0.4, 0.7, 1.0, 1.3}) {
        const double rho = std::sqrt(1.0 - std::cbrt(t / 1.5));
        const double dF = 1.5 * 6.0 * rho * std::pow(1 - rho * rho, 2);
        const double ref = n * oracle::ball_volume(n) * std::pow(dF, n * (p - 1) / (n + p)) *
                           std::pow(rho, n * (n - 1.0) / (n + p));
        CHECK(omega_p_levelset(l, p, t).value == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  // Cone, n = 2, p = 1: affine perimeter of the circle of radius 1 - t.
  const auto cone = CompactFunction::radial({ConvexBody::ball(2), cone_profile(), 1.0, 1.0});
  for (double t : {0.2, 0.5, 0.8})
    CHECK(omega_p_levelset(cone, 1.0, t).value == doctest::Approx(2 * oracle::pi * std::pow(1 - t, 2.0 / 3.0)));

  // Traced level curves agree with the closed form on a radial ellipsoidal profile.
  Mat E(2, 2);
  E << 1.2, 0.3, -0.2, 0.7;
  const auto r = CompactFunction::radial({ConvexBody::ellipsoid(E), bump_profile(3), 1.0, 1.0});
  for (double p : {1.0, 2.0})
    for (double t : {0.1, 0.5, 0.9}) {
      const double rad = omega_p_levelset(r, p, t, LevelsetBackend::Radial).value;
      const double tr = omega_p_levelset(r, p, t, LevelsetBackend::Trace).value;
      CHECK(tr == doctest::Approx(rad).epsilon(1e-6));
    }

  // Power scaling: Omega_p(l^a, t^a) = Omega_p(l, t) (a t^{a-1})^{(p-1)n/(n+p)}.
  const auto bumps = random_bumps(2, 1, 8);
  const double alpha = 2.0, p = 3.0;
  const double top = bumps(bumps.center());
  for (double t : {0.2 * top, 0.5 * top}) {
    const double lhs = omega_p_levelset(power(bumps, alpha), p, std::pow(t, alpha)).value;
    const double rhs = omega_p_levelset(bumps, p, t).value * std::pow(alpha * std::pow(t, alpha - 1), (p - 1) * 2 / (2 + p));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }

  // Coarea: int Omega_p(l, t) dt = Omega_p(l).
  const double levels = oracle::simpson(
      [&](double t) { return t <= 0 || t >= top ? 0.0 : omega_p_levelset(bumps, 2.0, t).value; }, 0.0, top, 200);
  CHECK(omega_p_function(bumps, 2.0, budget(400'000, 30)).agrees_with(levels, 3.0, 1e-3 * levels));

  CHECK_THROWS_AS(omega_p_levelset(bumps, 1.0, 2.0 * top), DomainError);
  CHECK_THROWS_AS(omega_p_levelset(bumps, 1.0, 0.0), DomainError);
}

TEST_CASE("I~_p of functions") {
  // Two-term bumps in the plane: I~_2 from second moments of the gradients,
  // computed on a tensor grid with the gradients written out by hand.
  const std::vector<BumpTerm> t1 = {{make_vec({0.1, 0.0}), 0.8, 1.0}, {make_vec({-0.3, 0.2}), 0.5, 0.7}};
  const std::vector<BumpTerm> t2 = {{make_vec({0.0, 0.1}), 1.1, 0.6}};
  auto grad = [](const std::vector<BumpTerm>& T, double x, double y) {
    double gx = 0, gy = 0;
    for (const auto& t : T) {
      const double dx = x - t.mu(0), dy = y - t.mu(1);
      const double u = 1 - (dx * dx + dy * dy) / (t.s * t.s);
      if (u > 0) {
        gx += -6 * t.c * u * u * dx / (t.s * t.s);
        gy += -6 * t.c * u * u * dy / (t.s * t.s);
      }
    }
    return std::pair{gx, gy};
  };
  auto moments = [&](const std::vector<BumpTerm>& T) {
    std::array<double, 3> m{};
    const int k = 800;
    const double lo = -1.5, h = 3.0 / k;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const auto [gx, gy] = grad(T, lo + (i + 0.5) * h, lo + (j + 0.5) * h);
        m[0] += gx * gx * h * h;
        m[1] += gy * gy * h * h;
        m[2] += gx * gy * h * h;
      }
    return m;
  };
  const auto m1 = moments(t1), m2 = moments(t2);
  const double ref = m1[0] * m2[1] + m1[1] * m2[0] - 2 * m1[2] * m2[2];
  const Estimate e = I_tilde_p_functions({bump_sum(2, t1), bump_sum(2, t2)}, 2.0, budget(300'000, 40));
  CHECK(e.agrees_with(ref, 3.0, 1e-4 * ref));

  // Normalized Sobolev representatives reproduce the body functional.
  const auto B3 = ConvexBody::ball(3);
  const auto h = normalized_sobolev_extremal(B3, 2.0);
  const double ball_ref = std::pow(4 * oracle::pi, 3) * 2.0 / 9.0;
  CHECK(I_tilde_p_functions({h, h, h}, 2.0, budget(300'000, 41)).agrees_with(ball_ref));

  const SmoothedTilde s = I_tilde_1_smoothed({ConvexBody::ball(2), ConvexBody::ball(2)}, budget(200'000, 42));
  REQUIRE(s.values.size() == 3);
  for (const auto& v : s.values) CHECK(v.agrees_with(8.0 * oracle::pi));
  CHECK(s.extrapolated.agrees_with(8.0 * oracle::pi));
}
