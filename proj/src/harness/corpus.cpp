#include "affgeom/harness/corpus.hpp"

#include "affgeom/constants/constants.hpp"
#include "affgeom/core/montecarlo.hpp"

#include <cmath>

namespace affgeom::harness {

using nlohmann::json;

namespace {

Mat matrix_from_json(const json& j) {
  require(j.is_array() && !j.empty(), "config: matrix must be a non-empty array of rows");
  const int n = static_cast<int>(j.size());
  Mat A(n, n);
  for (int i = 0; i < n; ++i) {
    require(j[i].is_array() && static_cast<int>(j[i].size()) == n, "config: matrix must be square");
    for (int k = 0; k < n; ++k) A(i, k) = j[i][k].get<double>();
  }
  return A;
}

Vec vec_from_json(const json& j) {
  require(j.is_array() && !j.empty(), "config: vector must be a non-empty array");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

std::vector<Vec> points_from_json(const json& j) {
  std::vector<Vec> pts;
  for (const auto& r : j) pts.push_back(vec_from_json(r));
  return pts;
}

Mat normalized_diag(int n) {
  Mat A = Mat::Identity(n, n);
  A(0, 0) = 2.0;
  return A / std::pow(2.0, 1.0 / n);
}

}  // namespace

ConvexBody random_polytope(int n, int points, std::uint64_t seed) {
  Engine eng(splitmix64(seed));
  std::vector<Vec> v;
  for (int i = 0; i < n; ++i) {
    v.push_back(0.5 * unit(n, i));
    v.push_back(-0.5 * unit(n, i));
  }
  for (int k = 0; k < points; ++k) {
    Vec g(n);
    for (int i = 0; i < n; ++i) g(i) = standard_normal(eng);
    v.push_back(g.normalized() * (0.6 + 0.8 * uniform01(eng)));
  }
  return ConvexBody::polytope(v);
}

NamedBody body_from_json(const json& node, int default_n) {
  require(node.is_object() && node.contains("kind"), "config: body needs a \"kind\"");
  const std::string kind = node.at("kind").get<std::string>();
  const int n = node.value("n", default_n);
  NamedBody nb;
  nb.name = node.value("name", kind);
  if (kind == "ball") {
    nb.body = ConvexBody::ball(n, node.value("radius", 1.0));
    nb.smooth = nb.symmetric = nb.ellipsoid = true;
  } else if (kind == "ellipsoid") {
    nb.body = ConvexBody::ellipsoid(matrix_from_json(node.at("matrix")));
    nb.smooth = nb.symmetric = nb.ellipsoid = true;
  } else if (kind == "cube") {
    nb.body = ConvexBody::cube(n, node.value("half_side", 1.0));
    nb.symmetric = nb.polytope = true;
  } else if (kind == "simplex") {
    nb.body = ConvexBody::simplex(points_from_json(node.at("vertices")));
    nb.polytope = true;
  } else if (kind == "centered_simplex") {
    nb.body = ConvexBody::centered_simplex(n);
    nb.polytope = true;
  } else if (kind == "lq_ball") {
    nb.body = ConvexBody::lq_ball(n, node.at("q").get<double>());
    nb.symmetric = true;
  } else if (kind == "polytope") {
    nb.body = ConvexBody::polytope(points_from_json(node.at("vertices")));
    nb.polytope = true;
  } else if (kind == "random_polytope") {
    nb.body = random_polytope(n, node.value("points", 8), node.value("seed", 1));
    nb.polytope = true;
  } else {
    throw ConfigError("config: unknown body kind \"" + kind + "\"");
  }
  if (node.contains("linear_map")) nb.body = linear_image(nb.body, matrix_from_json(node.at("linear_map")));
  if (node.contains("translate")) {
    nb.body = translate(nb.body, vec_from_json(node.at("translate")));
    nb.symmetric = false;
    nb.smooth = false;
  }
  return nb;
}

std::vector<NamedBody> body_corpus(const std::string& name, int n, std::uint64_t seed) {
  std::vector<NamedBody> out;
  const Mat E = normalized_diag(n);
  auto add = [&](std::string nm, ConvexBody b, bool smooth, bool sym, bool poly, bool ell) {
    out.push_back(NamedBody{std::move(nm), std::move(b), smooth, sym, poly, ell});
  };
  if (name == "standard") {
    add("ball", ConvexBody::ball(n), true, true, false, true);
    add("ellipsoid", ConvexBody::ellipsoid(E), true, true, false, true);
    add("cube", ConvexBody::cube(n), false, true, true, false);
    add("simplex", ConvexBody::centered_simplex(n), false, false, true, false);
    add("lq1.5", ConvexBody::lq_ball(n, 1.5), false, true, false, false);
    add("lq4", ConvexBody::lq_ball(n, 4.0), false, true, false, false);
    for (int k = 0; k < 3; ++k)
      add("polytope" + std::to_string(k), random_polytope(n, 6 + 2 * k, mix_seed(seed, 100 + k)), false, false,
          true, false);
  } else if (name == "smooth") {
    add("ball", ConvexBody::ball(n), true, true, false, true);
    add("ellipsoid", ConvexBody::ellipsoid(E), true, true, false, true);
    Mat A = Mat::Identity(n, n);
    A(0, 1) = 0.6;
    A(n - 1, 0) = -0.3;
    A /= std::pow(std::abs(A.determinant()), 1.0 / n);
    add("sheared_ellipsoid", ConvexBody::ellipsoid(1.3 * A), true, true, false, true);
  } else {
    throw ConfigError("unknown body corpus \"" + name + "\"");
  }
  return out;
}

std::vector<NamedFunction> function_corpus(int n, double p, double lambda, std::uint64_t seed) {
  std::vector<NamedFunction> out;
  const ConvexBody B = ConvexBody::ball(n);
  const ConvexBody E = ConvexBody::ellipsoid(normalized_diag(n));
  if (lambda_admissible(n, p, lambda)) {
    out.push_back({"moment_ball", normalized_moment_extremal(B, p, lambda), "moment", false});
    out.push_back({"moment_ellipsoid", normalized_moment_extremal(E, p, lambda), "moment", false});
  }
  if (p < n) {
    out.push_back({"sobolev_ball", normalized_sobolev_extremal(B, p), "sobolev", p > 1.0});
    if (p == 1.0) out.push_back({"mollified_cube", normalized_sobolev_extremal(ConvexBody::cube(n), 1.0), "mollified", false});
  }
  for (int k = 0; k < 3; ++k)
    out.push_back({"bumps" + std::to_string(k), random_bumps(n, 3, mix_seed(seed, 200 + k)), "bump", false});
  out.push_back({"radial_bump_ellipsoid", CompactFunction::radial({E, bump_profile(3), 1.0, 1.0}), "radial_bump", true});
  return out;
}

double audit_gradients(const std::vector<NamedFunction>& fs, int probes) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (fs[i].f.has_gradient() && fs[i].f.smoothness() != Smoothness::C0)
      worst = std::max(worst, gradient_check(fs[i].f, probes, 77 + i));
  return worst;
}

}  // namespace affgeom::harness
