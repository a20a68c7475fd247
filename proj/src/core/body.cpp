#include "affgeom/core/body.hpp"

#include "affgeom/core/hull.hpp"
#include "affgeom/core/volume.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace affgeom {

const char* to_string(BodyKind k) {
  switch (k) {
    case BodyKind::Ball: return "ball";
    case BodyKind::Ellipsoid: return "ellipsoid";
    case BodyKind::Cube: return "cube";
    case BodyKind::Simplex: return "simplex";
    case BodyKind::LqBall: return "lq-ball";
    case BodyKind::Polytope: return "polytope";
    case BodyKind::LinearImage: return "linear-image";
    case BodyKind::Translate: return "translate";
    case BodyKind::Polar: return "polar";
    case BodyKind::NumericSupport: return "numeric-support";
  }
  return "?";
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < lo.size(); ++i) v *= hi(i) - lo(i);
  return v;
}

Vec Box::sample(Engine& eng) const {
  Vec x(lo.size());
  for (int i = 0; i < lo.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * uniform01(eng);
  return x;
}

namespace detail {

Box BodyImpl::box() const {
  const double r = bounding_radius();
  return {Vec::Constant(n, -r), Vec::Constant(n, r)};
}

namespace {

void check_direction(const Vec& xi) {
  if (!(xi.norm() > 0.0)) throw DomainError("support: zero direction");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double dual_exponent(double q) { return q / (q - 1.0); }

double lq_norm(const Vec& x, double q) {
  if (std::isinf(q)) return x.cwiseAbs().maxCoeff();
  if (q == 1.0) return x.cwiseAbs().sum();
  if (q == 2.0) return x.norm();
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / m, q);
  return m * std::pow(s, 1.0 / q);
}

Box box_of_points(const std::vector<Vec>& pts) {
  Vec lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

double max_norm(const std::vector<Vec>& pts) {
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, p.norm());
  return r;
}

bool symmetric_set(const std::vector<Vec>& pts) {
  const double eps = 1e-9 * std::max(1.0, max_norm(pts));
  for (const auto& p : pts) {
    bool found = false;
    for (const auto& q : pts)
      if ((p + q).norm() <= eps) found = true;
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------- Ball
class BallImpl final : public BodyImpl {
 public:
  double r;
  BallImpl(int dim, double radius) : r(radius) { n = dim; }
  BodyKind kind() const override { return BodyKind::Ball; }
  std::string describe() const override { return "Ball(r=" + fmt(r) + ")"; }
  double support(const Vec& xi) const override {
    check_direction(xi);
    return r * xi.norm();
  }
  double gauge(const Vec& x) const override { return x.norm() / r; }
  double bounding_radius() const override { return r; }
  double inner_radius() const override { return r; }
  bool origin_symmetric() const override { return true; }
  std::optional<double> exact_volume() const override { return ball_volume(n) * std::pow(r, n); }
  bool is_smooth() const override { return true; }
  std::optional<Vec> support_point(const Vec& xi) const override {
    return Vec(r * xi / xi.norm());
  }
  std::optional<Vec> gauge_gradient(const Vec& x) const override {
    return Vec(x / (r * x.norm()));
  }
  std::optional<Mat> gauge_hessian(const Vec& x) const override {
    const double s = x.norm();
    const Vec u = x / s;
    return Mat((Mat::Identity(n, n) - u * u.transpose()) / (r * s));
  }
};

// ----------------------------------------------------------- Ellipsoid
class EllipsoidImpl final : public BodyImpl {
 public:
  Mat A, Ainv, M;
  double det, smax, smin;
  explicit EllipsoidImpl(const Mat& a) : A(a) {
    n = static_cast<int>(a.rows());
    require(a.rows() == a.cols(), "ellipsoid: matrix must be square");
    det = A.determinant();
    require(std::abs(det) > 1e-300, "ellipsoid: singular matrix");
    Ainv = A.inverse();
    M = Ainv.transpose() * Ainv;
    Eigen::JacobiSVD<Mat> svd(A);
    smax = svd.singularValues().maxCoeff();
    smin = svd.singularValues().minCoeff();
  }
  BodyKind kind() const override { return BodyKind::Ellipsoid; }
  std::string describe() const override {
    std::ostringstream os;
    os << "Ellipsoid(det=" << fmt(det) << ")";
    return os.str();
  }
  double support(const Vec& xi) const override {
    check_direction(xi);
    return (A.transpose() * xi).norm();
  }
  double gauge(const Vec& x) const override { return (Ainv * x).norm(); }
  double bounding_radius() const override { return smax; }
  double inner_radius() const override { return smin; }
  Box box() const override {
    // Exact axis extents: h(+-e_i) = |row_i(A)|.
    Vec h(n);
    for (int i = 0; i < n; ++i) h(i) = A.row(i).norm();
    return {-h, h};
  }
  bool origin_symmetric() const override { return true; }
  std::optional<double> exact_volume() const override { return ball_volume(n) * std::abs(det); }
  bool is_smooth() const override { return true; }
  std::optional<Vec> support_point(const Vec& xi) const override {
    const Vec y = A.transpose() * xi;
    return Vec(A * y / y.norm());
  }
  std::optional<Vec> gauge_gradient(const Vec& x) const override {
    const double g = gauge(x);
    return Vec(M * x / g);
  }
  std::optional<Mat> gauge_hessian(const Vec& x) const override {
    const double g = gauge(x);
    const Vec mx = M * x;
    return Mat(M / g - mx * mx.transpose() / (g * g * g));
  }
};

// --------------------------------------------------------------- Cube
class CubeImpl final : public BodyImpl {
 public:
  double a;
  CubeImpl(int dim, double half) : a(half) { n = dim; }
  BodyKind kind() const override { return BodyKind::Cube; }
  std::string describe() const override { return "Cube(a=" + fmt(a) + ")"; }
  double support(const Vec& xi) const override {
    check_direction(xi);
    return a * xi.cwiseAbs().sum();
  }
  double gauge(const Vec& x) const override { return x.cwiseAbs().maxCoeff() / a; }
  double bounding_radius() const override { return a * std::sqrt(static_cast<double>(n)); }
  double inner_radius() const override { return a; }
  Box box() const override { return {Vec::Constant(n, -a), Vec::Constant(n, a)}; }
  bool origin_symmetric() const override { return true; }
  std::optional<double> exact_volume() const override { return std::pow(2.0 * a, n); }
  std::optional<std::vector<Facet>> facets() const override {
    std::vector<Facet> fs;
    const double area = std::pow(2.0 * a, n - 1);
    for (int i = 0; i < n; ++i) {
      fs.push_back({unit(n, i), a, area});
      fs.push_back({Vec(-unit(n, i)), a, area});
    }
    return fs;
  }
  std::optional<std::vector<Vec>> vertices() const override {
    std::vector<Vec> vs;
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v(i) = (mask >> i & 1) ? a : -a;
      vs.push_back(v);
    }
    return vs;
  }
};

// ------------------------------------------------------------- LqBall
class LqBallImpl final : public BodyImpl {
 public:
  double q;
  LqBallImpl(int dim, double exponent) : q(exponent) {
    n = dim;
    require(q > 1.0 && std::isfinite(q), "lq_ball: exponent must be in (1, inf)");
  }
  BodyKind kind() const override { return BodyKind::LqBall; }
  std::string describe() const override { return "LqBall(q=" + fmt(q) + ")"; }
  double support(const Vec& xi) const override {
    check_direction(xi);
    return lq_norm(xi, dual_exponent(q));
  }
  double gauge(const Vec& x) const override { return lq_norm(x, q); }
  double bounding_radius() const override {
    return std::max(1.0, std::pow(static_cast<double>(n), 0.5 - 1.0 / q));
  }
  double inner_radius() const override {
    return std::min(1.0, std::pow(static_cast<double>(n), 0.5 - 1.0 / q));
  }
  Box box() const override { return {Vec::Constant(n, -1.0), Vec::Constant(n, 1.0)}; }
  bool origin_symmetric() const override { return true; }
  std::optional<double> exact_volume() const override {
    using boost::math::tgamma;
    return std::pow(2.0 * tgamma(1.0 + 1.0 / q), n) / tgamma(1.0 + n / q);
  }
  std::optional<Vec> gauge_gradient(const Vec& x) const override {
    const double g = gauge(x);
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = std::copysign(std::pow(std::abs(x(i)) / g, q - 1.0), x(i));
    return w;
  }
  std::optional<Mat> gauge_hessian(const Vec& x) const override {
    const double g = gauge(x);
    Vec w(n);
    Mat H = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      w(i) = std::copysign(std::pow(std::abs(x(i)) / g, q - 1.0), x(i));
      H(i, i) = std::pow(std::abs(x(i)) / g, q - 2.0) / g;
    }
    return Mat((q - 1.0) * (H - w * w.transpose() / g));
  }
};

// ------------------------------------------------------------ Polytope
class PolytopeImpl : public BodyImpl {
 public:
  std::vector<Vec> verts;
  std::vector<Facet> fs;
  bool interior = true;
  bool sym = false;
  Box bbox;

  PolytopeImpl() = default;
  explicit PolytopeImpl(const std::vector<Vec>& pts) {
    require(!pts.empty(), "polytope: empty vertex list");
    n = static_cast<int>(pts[0].size());
    require(n == 2 || n == 3, "polytope: only n in {2,3} supported");
    fs = hull_facets(pts);
    verts = hull_vertices(pts);
    finish();
  }
  void finish() {
    interior = true;
    for (const auto& f : fs) interior = interior && f.offset > 1e-12;
    sym = symmetric_set(verts);
    bbox = box_of_points(verts);
  }
  BodyKind kind() const override { return BodyKind::Polytope; }
  std::string describe() const override {
    return "Polytope(" + std::to_string(verts.size()) + " vertices)";
  }
  double support(const Vec& xi) const override {
    check_direction(xi);
    double h = -INFINITY;
    for (const auto& v : verts) h = std::max(h, v.dot(xi));
    return h;
  }
  double gauge(const Vec& x) const override {
    if (!interior) throw DomainError("gauge: origin is not interior to " + describe());
    double g = 0.0;
    for (const auto& f : fs) g = std::max(g, f.normal.dot(x) / f.offset);
    return g;
  }
  bool contains(const Vec& x) const override {
    for (const auto& f : fs)
      if (f.normal.dot(x) > f.offset) return false;
    return true;
  }
  double bounding_radius() const override { return max_norm(verts); }
  double inner_radius() const override {
    double r = INFINITY;
    for (const auto& f : fs) r = std::min(r, f.offset);
    return std::max(r, 0.0);
  }
  Box box() const override { return bbox; }
  bool origin_interior() const override { return interior; }
  bool origin_symmetric() const override { return sym; }
  std::optional<double> exact_volume() const override {
    double v = 0.0;
    for (const auto& f : fs) v += f.offset * f.area / n;
    return v;
  }
  std::optional<std::vector<Facet>> facets() const override { return fs; }
  std::optional<std::vector<Vec>> vertices() const override { return verts; }
};

// ------------------------------------------------------------- Simplex
class SimplexImpl final : public PolytopeImpl {
 public:
  Mat bary;  // maps x - v0 to barycentric coordinates 1..n
  Vec v0;
  double vol = 0.0;

  explicit SimplexImpl(const std::vector<Vec>& pts) {
    n = static_cast<int>(pts.at(0).size());
    require(static_cast<int>(pts.size()) == n + 1, "simplex: need n+1 vertices");
    verts = pts;
    v0 = pts[0];
    Mat E(n, n);
    for (int j = 0; j < n; ++j) E.col(j) = pts[j + 1] - v0;
    const double det = E.determinant();
    require(std::abs(det) > 1e-14, "simplex: degenerate vertex set");
    bary = E.inverse();
    vol = std::abs(det) / std::tgamma(n + 1.0);
    // Facet i is opposite vertex i.
    for (int i = 0; i <= n; ++i) {
      std::vector<Vec> face;
      for (int j = 0; j <= n; ++j)
        if (j != i) face.push_back(pts[j]);
      Eigen::MatrixXd D(n - 1, n);
      for (int j = 1; j < n; ++j) D.row(j - 1) = (face[j] - face[0]).transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
      Vec u = lu.kernel().col(0);
      u.normalize();
      if (u.dot(pts[i] - face[0]) > 0) u = -u;
      const Eigen::MatrixXd gram = D * D.transpose();
      const double area = std::sqrt(std::max(gram.determinant(), 0.0)) / std::tgamma(n);
      fs.push_back({u, u.dot(face[0]), area});
    }
    finish();
  }
  BodyKind kind() const override { return BodyKind::Simplex; }
  std::string describe() const override { return "Simplex(n=" + std::to_string(n) + ")"; }
  bool contains(const Vec& x) const override {
    const Vec l = bary * (x - v0);
    const double eps = 1e-14;
    return l.minCoeff() >= -eps && l.sum() <= 1.0 + eps;
  }
  std::optional<double> exact_volume() const override { return vol; }
};

// --------------------------------------------------------- LinearImage
class LinearImageImpl final : public BodyImpl {
 public:
  ConvexBody base;
  Mat A, Ainv;
  double det;
  LinearImageImpl(ConvexBody b, const Mat& a) : base(std::move(b)), A(a) {
    n = base.dim();
    require(a.rows() == n && a.cols() == n, "linear_image: dimension mismatch");
    det = A.determinant();
    if (std::abs(det) < 1e-13) throw DomainError("linear_image: singular matrix");
    Ainv = A.inverse();
  }
  BodyKind kind() const override { return BodyKind::LinearImage; }
  std::string describe() const override {
    return "LinearImage(det=" + fmt(det) + ", " + base.describe() + ")";
  }
  double support(const Vec& xi) const override {
    check_direction(xi);
    return base.support(A.transpose() * xi);
  }
  double gauge(const Vec& x) const override { return base.gauge(Ainv * x); }
  bool contains(const Vec& x) const override { return base.contains(Ainv * x); }
  double bounding_radius() const override {
    if (auto vs = base.vertices()) {
      double r = 0.0;
      for (const auto& v : *vs) r = std::max(r, (A * v).norm());
      return r;
    }
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues().maxCoeff() * base.bounding_radius();
  }
  double inner_radius() const override {
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues().minCoeff() * base.inner_radius();
  }
  Box box() const override {
    Vec h(n), lo(n), hi(n);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      // Exact extents from support values along +-e_i.
      const Vec e = unit(n, i);
      try {
        hi(i) = support(e);
        lo(i) = -support(Vec(-e));
      } catch (const DomainError&) {
        ok = false;
      }
    }
    if (ok) return {lo, hi};
    return BodyImpl::box();
  }
  bool origin_interior() const override { return base.origin_interior(); }
  bool origin_symmetric() const override { return base.origin_symmetric(); }
  std::optional<double> exact_volume() const override {
    if (auto v = base.exact_volume()) return *v * std::abs(det);
    return std::nullopt;
  }
  std::optional<std::vector<Facet>> facets() const override {
    auto bf = base.facets();
    if (!bf) return std::nullopt;
    std::vector<Facet> out;
    const Mat AinvT = Ainv.transpose();
    for (const auto& f : *bf) {
      Vec u = AinvT * f.normal;
      const double s = u.norm();
      out.push_back({Vec(u / s), f.offset / s, std::abs(det) * s * f.area});
    }
    return out;
  }
  std::optional<std::vector<Vec>> vertices() const override {
    auto bv = base.vertices();
    if (!bv) return std::nullopt;
    std::vector<Vec> out;
    for (const auto& v : *bv) out.push_back(A * v);
    return out;
  }
  bool is_smooth() const override { return base.is_smooth(); }
  std::optional<Vec> support_point(const Vec& xi) const override {
    auto p = base.support_point(A.transpose() * xi);
    if (!p) return std::nullopt;
    return Vec(A * *p);
  }
  std::optional<Vec> gauge_gradient(const Vec& x) const override {
    if (!base.is_smooth() && base.kind() != BodyKind::LqBall) return std::nullopt;
    return Vec(Ainv.transpose() * base.gauge_gradient(Ainv * x));
  }
  std::optional<Mat> gauge_hessian(const Vec& x) const override {
    auto h = base.gauge_hessian(Ainv * x);
    if (!h) return std::nullopt;
    return Mat(Ainv.transpose() * *h * Ainv);
  }
};

// ----------------------------------------------------------- Translate
class TranslateImpl final : public BodyImpl {
 public:
  ConvexBody base;
  Vec v;
  bool interior = false;
  std::optional<std::vector<Facet>> fs;

  TranslateImpl(ConvexBody b, const Vec& shift) : base(std::move(b)), v(shift) {
    n = base.dim();
    require(v.size() == n, "translate: dimension mismatch");
    if (auto bf = base.facets()) {
      fs.emplace();
      interior = true;
      for (const auto& f : *bf) {
        const double c = f.offset + f.normal.dot(v);
        interior = interior && c > 1e-12;
        fs->push_back({f.normal, c, f.area});
      }
    } else {
      interior = base.origin_interior() && base.gauge(-v) < 1.0 - 1e-12;
    }
  }
  BodyKind kind() const override { return BodyKind::Translate; }
  std::string describe() const override { return "Translate(" + base.describe() + ")"; }
  double support(const Vec& xi) const override {
    check_direction(xi);
    return base.support(xi) + xi.dot(v);
  }
  bool contains(const Vec& x) const override { return base.contains(x - v); }
  double gauge(const Vec& x) const override {
    if (!interior) throw DomainError("gauge: origin is not interior to " + describe());
    if (x.norm() == 0.0) return 0.0;
    if (fs) {
      double g = 0.0;
      for (const auto& f : *fs) g = std::max(g, f.normal.dot(x) / f.offset);
      return g;
    }
    double hi = 1.0;
    while (!contains(x / hi)) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid > 0.0 && contains(x / mid)) hi = mid;
      else lo = mid;
    }
    return hi;
  }
  double bounding_radius() const override {
    if (auto vs = vertices()) return max_norm(*vs);
    return base.bounding_radius() + v.norm();
  }
  double inner_radius() const override {
    if (fs) {
      double r = INFINITY;
      for (const auto& f : *fs) r = std::min(r, f.offset);
      return std::max(r, 0.0);
    }
    return std::max(0.0, base.inner_radius() - v.norm());
  }
  Box box() const override {
    Box b = base.box();
    return {Vec(b.lo + v), Vec(b.hi + v)};
  }
  bool origin_interior() const override { return interior; }
  std::optional<double> exact_volume() const override { return base.exact_volume(); }
  std::optional<std::vector<Facet>> facets() const override { return fs; }
  std::optional<std::vector<Vec>> vertices() const override {
    auto bv = base.vertices();
    if (!bv) return std::nullopt;
    std::vector<Vec> out;
    for (const auto& p : *bv) out.push_back(p + v);
    return out;
  }
  std::optional<Vec> support_point(const Vec& xi) const override {
    auto p = base.support_point(xi);
    if (!p) return std::nullopt;
    return Vec(*p + v);
  }
};

// --------------------------------------------------------------- Polar
class PolarImpl final : public BodyImpl {
 public:
  ConvexBody base;
  explicit PolarImpl(ConvexBody b) : base(std::move(b)) {
    n = base.dim();
    if (!base.origin_interior()) throw DomainError("polar: origin not interior");
  }
  BodyKind kind() const override { return BodyKind::Polar; }
  std::string describe() const override { return "Polar(" + base.describe() + ")"; }
  double support(const Vec& xi) const override {
    check_direction(xi);
    return base.gauge(xi);
  }
  double gauge(const Vec& x) const override {
    if (x.norm() == 0.0) return 0.0;
    return base.support(x);
  }
  bool contains(const Vec& x) const override { return gauge(x) <= 1.0; }
  double bounding_radius() const override { return 1.0 / base.inner_radius(); }
  double inner_radius() const override { return 1.0 / base.bounding_radius(); }
  bool origin_symmetric() const override { return base.origin_symmetric(); }
};

// ------------------------------------------------------ NumericSupport
class NumericSupportImpl final : public BodyImpl {
 public:
  SupportTable t;
  double hmax = 0.0, hmin = INFINITY, rmax = 0.0;
  std::vector<double> inv;  // 1 / h_j

  explicit NumericSupportImpl(SupportTable table) : t(std::move(table)) {
    require(t.rule != nullptr, "numeric_support: missing rule");
    n = t.rule->dim;
    require(static_cast<int>(t.values.size()) == t.rule->size(),
            "numeric_support: table size mismatch");
    for (double h : t.values) {
      if (!(h > 0.0) || !std::isfinite(h))
        throw DomainError("numeric_support: support values must be positive");
      hmax = std::max(hmax, h);
      hmin = std::min(hmin, h);
      inv.push_back(1.0 / h);
    }
    // Circumradius of the circumscribed polytope {<x,xi_j> <= h_j}.
    double delta;
    const double pi = std::numbers::pi;
    switch (t.rule->layout) {
      case SphereRule::Layout::Circle: delta = 2.0 * pi / t.rule->n_phi; break;
      case SphereRule::Layout::LatLong:
        delta = 2.0 * pi / t.rule->n_phi + pi / t.rule->n_theta;
        break;
      default: delta = 0.6; break;
    }
    rmax = 1.05 * hmax / std::cos(std::min(delta, 1.2));
  }
  BodyKind kind() const override { return BodyKind::NumericSupport; }
  std::string describe() const override {
    return "NumericSupport(" + std::to_string(t.values.size()) + " nodes)";
  }
  double support(const Vec& xi) const override { return query_support(xi).value; }
  SupportQuery query_support(const Vec& xi) const override {
    check_direction(xi);
    const double s = xi.norm();
    const Vec u = xi / s;
    if (t.exact) return {t.exact(xi), false};
    return interpolate(u, s);
  }
  double gauge(const Vec& x) const override {
    const Eigen::VectorXd proj = t.rule->node_matrix.transpose() * Eigen::VectorXd(x);
    double g = 0.0;
    for (int j = 0; j < proj.size(); ++j) g = std::max(g, proj(j) * inv[j]);
    return g;
  }
  // Gauge of the circumscribed polytope: active node over its support value.
  std::optional<Vec> gauge_gradient(const Vec& x) const override {
    const Eigen::VectorXd proj = t.rule->node_matrix.transpose() * Eigen::VectorXd(x);
    Eigen::Index best = 0;
    double g = -INFINITY;
    for (int j = 0; j < proj.size(); ++j)
      if (proj(j) * inv[j] > g) {
        g = proj(j) * inv[j];
        best = j;
      }
    return Vec(t.rule->nodes[best] * inv[best]);
  }
  double bounding_radius() const override { return rmax; }
  double inner_radius() const override { return hmin; }
  bool origin_symmetric() const override { return t.symmetric; }
  const SupportTable* table() const override { return &t; }

 private:
  SupportQuery interpolate(const Vec& u, double s) const {
    const SphereRule& r = *t.rule;
    const double pi = std::numbers::pi;
    if (r.layout == SphereRule::Layout::Circle) {
      double a = std::atan2(u(1), u(0));
      if (a < 0) a += 2.0 * pi;
      const double pos = a / (2.0 * pi) * r.n_phi;
      int i = static_cast<int>(std::floor(pos));
      double f = pos - i;
      i %= r.n_phi;
      if (f < 1e-12) return {s * t.values[i], false};
      if (f > 1.0 - 1e-12) return {s * t.values[(i + 1) % r.n_phi], false};
      return {s * ((1.0 - f) * t.values[i] + f * t.values[(i + 1) % r.n_phi]), true};
    }
    if (r.layout == SphereRule::Layout::LatLong) {
      const double th = std::acos(std::clamp(u(2), -1.0, 1.0));
      double ph = std::atan2(u(1), u(0));
      if (ph < 0) ph += 2.0 * pi;
      const double pos = ph / (2.0 * pi) * r.n_phi;
      int j = static_cast<int>(std::floor(pos)) % r.n_phi;
      const double fj = pos - std::floor(pos);
      auto ring = [&](int i) {
        const double a = t.values[static_cast<std::size_t>(i) * r.n_phi + j];
        const double b = t.values[static_cast<std::size_t>(i) * r.n_phi + (j + 1) % r.n_phi];
        return (1.0 - fj) * a + fj * b;
      };
      auto pole = [&](int i) {
        double m = 0.0;
        for (int k = 0; k < r.n_phi; ++k) m += t.values[static_cast<std::size_t>(i) * r.n_phi + k];
        return m / r.n_phi;
      };
      const int nt = r.n_theta;
      double val;
      if (th <= r.theta[0]) {
        const double f = th / r.theta[0];
        val = (1.0 - f) * pole(0) + f * ring(0);
      } else if (th >= r.theta[nt - 1]) {
        const double f = (th - r.theta[nt - 1]) / (pi - r.theta[nt - 1]);
        val = (1.0 - f) * ring(nt - 1) + f * pole(nt - 1);
      } else {
        const int i = static_cast<int>(
            std::upper_bound(r.theta.begin(), r.theta.end(), th) - r.theta.begin() - 1);
        const double f = (th - r.theta[i]) / (r.theta[i + 1] - r.theta[i]);
        val = (1.0 - f) * ring(i) + f * ring(i + 1);
      }
      // Exact node hit: no interpolation happened.
      const Eigen::VectorXd proj = r.node_matrix.transpose() * Eigen::VectorXd(u);
      Eigen::Index best;
      if (proj.maxCoeff(&best) > 1.0 - 1e-14) return {s * t.values[best], false};
      return {s * val, true};
    }
    const Eigen::VectorXd proj = r.node_matrix.transpose() * Eigen::VectorXd(u);
    Eigen::Index best;
    const double c = proj.maxCoeff(&best);
    return {s * t.values[best], c < 1.0 - 1e-14};
  }
};

}  // namespace
}  // namespace detail

using namespace detail;

// ------------------------------------------------------------- factories
ConvexBody ConvexBody::ball(int n, double radius) {
  require(n >= 2 && n <= kMaxDim, "ball: unsupported dimension");
  require(radius > 0, "ball: radius must be positive");
  return ConvexBody(std::make_shared<BallImpl>(n, radius));
}

ConvexBody ConvexBody::ellipsoid(const Mat& A) {
  return ConvexBody(std::make_shared<EllipsoidImpl>(A));
}

ConvexBody ConvexBody::cube(int n, double half_side) {
  require(n >= 2 && n <= kMaxDim, "cube: unsupported dimension");
  require(half_side > 0, "cube: half side must be positive");
  return ConvexBody(std::make_shared<CubeImpl>(n, half_side));
}

ConvexBody ConvexBody::simplex(const std::vector<Vec>& vertices) {
  return ConvexBody(std::make_shared<SimplexImpl>(vertices));
}

ConvexBody ConvexBody::centered_simplex(int n) {
  // Vertices of the standard simplex in R^{n+1}, projected onto the sum-zero
  // hyperplane with an orthonormal basis and scaled to circumradius 1.
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n + 1, n + 1);
  E.array() -= 1.0 / (n + 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(E);
  const Eigen::MatrixXd Q = qr.householderQ();
  std::vector<Vec> vs;
  for (int i = 0; i <= n; ++i) {
    Eigen::VectorXd c = E.col(i);
    Vec v(n);
    for (int k = 0; k < n; ++k) v(k) = Q.col(k).dot(c);
    vs.push_back(v);
  }
  const double r = vs[0].norm();
  for (auto& v : vs) v /= r;
  return simplex(vs);
}

ConvexBody ConvexBody::lq_ball(int n, double q) {
  require(n >= 2 && n <= kMaxDim, "lq_ball: unsupported dimension");
  if (q == 2.0) return ball(n, 1.0);
  return ConvexBody(std::make_shared<LqBallImpl>(n, q));
}

ConvexBody ConvexBody::polytope(const std::vector<Vec>& vertices) {
  return ConvexBody(std::make_shared<PolytopeImpl>(vertices));
}

ConvexBody ConvexBody::numeric_support(SupportTable table) {
  return ConvexBody(std::make_shared<NumericSupportImpl>(std::move(table)));
}

// --------------------------------------------------------------- forwarding
int ConvexBody::dim() const { return impl_->n; }
BodyKind ConvexBody::kind() const { return impl_->kind(); }
std::string ConvexBody::describe() const { return impl_->describe(); }
double ConvexBody::support(const Vec& xi) const { return impl_->support(xi); }
SupportQuery ConvexBody::query_support(const Vec& xi) const { return impl_->query_support(xi); }
double ConvexBody::gauge(const Vec& x) const { return impl_->gauge(x); }
bool ConvexBody::contains(const Vec& x) const { return impl_->contains(x); }
Box ConvexBody::box() const { return impl_->box(); }
double ConvexBody::bounding_radius() const { return impl_->bounding_radius(); }
double ConvexBody::inner_radius() const { return impl_->inner_radius(); }
bool ConvexBody::origin_interior() const { return impl_->origin_interior(); }
bool ConvexBody::origin_symmetric() const { return impl_->origin_symmetric(); }
std::optional<double> ConvexBody::exact_volume() const { return impl_->exact_volume(); }
std::optional<std::vector<Facet>> ConvexBody::facets() const { return impl_->facets(); }
std::optional<std::vector<Vec>> ConvexBody::vertices() const { return impl_->vertices(); }
bool ConvexBody::is_smooth() const { return impl_->is_smooth(); }
std::optional<Vec> ConvexBody::support_point(const Vec& xi) const {
  return impl_->support_point(xi);
}
std::optional<Mat> ConvexBody::gauge_hessian(const Vec& x) const {
  return impl_->gauge_hessian(x);
}
const SupportTable* ConvexBody::table() const { return impl_->table(); }

Estimate ConvexBody::volume_estimate(const Budget& budget) const { return volume(*this, budget); }

Vec ConvexBody::gauge_gradient(const Vec& x) const {
  if (auto g = impl_->gauge_gradient(x)) return *g;
  const int n = dim();
  const double h = 1e-6 * std::max(1.0, x.norm());
  Vec g(n);
  for (int i = 0; i < n; ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (gauge(a) - gauge(b)) / (2.0 * h);
  }
  return g;
}

// ------------------------------------------------------------- composites
ConvexBody polar(const ConvexBody& body) {
  if (!body.origin_interior()) throw DomainError("polar: origin not interior");
  const auto& impl = body.impl();
  if (auto* b = dynamic_cast<const BallImpl*>(&impl)) return ConvexBody::ball(b->n, 1.0 / b->r);
  if (auto* e = dynamic_cast<const EllipsoidImpl*>(&impl))
    return ConvexBody::ellipsoid(e->Ainv.transpose());
  if (auto* l = dynamic_cast<const LqBallImpl*>(&impl))
    return ConvexBody::lq_ball(l->n, dual_exponent(l->q));
  if (auto* p = dynamic_cast<const PolarImpl*>(&impl)) return p->base;
  if (auto* li = dynamic_cast<const LinearImageImpl*>(&impl))
    return linear_image(polar(li->base), li->Ainv.transpose());
  if (auto fs = body.facets(); fs && (body.dim() == 2 || body.dim() == 3)) {
    std::vector<Vec> vs;
    for (const auto& f : *fs) vs.push_back(f.normal / f.offset);
    return ConvexBody::polytope(vs);
  }
  return ConvexBody(std::make_shared<PolarImpl>(body));
}

ConvexBody linear_image(const ConvexBody& body, const Mat& A) {
  return ConvexBody(std::make_shared<LinearImageImpl>(body, A));
}

ConvexBody translate(const ConvexBody& body, const Vec& v) {
  return ConvexBody(std::make_shared<TranslateImpl>(body, v));
}

ConvexBody scale(const ConvexBody& body, double t) {
  require(t > 0, "scale: factor must be positive");
  if (auto* b = dynamic_cast<const BallImpl*>(&body.impl()))
    return ConvexBody::ball(b->n, b->r * t);
  if (auto* c = dynamic_cast<const CubeImpl*>(&body.impl()))
    return ConvexBody::cube(c->n, c->a * t);
  return linear_image(body, Mat(t * Mat::Identity(body.dim(), body.dim())));
}

}  // namespace affgeom
