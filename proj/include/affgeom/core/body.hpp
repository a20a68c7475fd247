#pragma once

#include "affgeom/core/estimate.hpp"
#include "affgeom/core/montecarlo.hpp"
#include "affgeom/core/sphere.hpp"
#include "affgeom/core/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace affgeom {

struct Box {
  Vec lo, hi;
  double volume() const;
  Vec sample(Engine& eng) const;
};

// Facet of a polytope: outer unit normal, support value along it, (n-1)-area.
struct Facet {
  Vec normal;
  double offset = 0.0;
  double area = 0.0;
};

enum class BodyKind {
  Ball,
  Ellipsoid,
  Cube,
  Simplex,
  LqBall,
  Polytope,
  LinearImage,
  Translate,
  Polar,
  NumericSupport
};

const char* to_string(BodyKind k);

// Anything we can sample uniformly and integrate over: convex bodies and
// star bodies.
class Region {
 public:
  virtual ~Region() = default;
  virtual int dim() const = 0;
  virtual bool contains(const Vec& x) const = 0;
  virtual Box box() const = 0;
  virtual Estimate volume_estimate(const Budget& budget) const = 0;
};

// Support values of a body on the nodes of a sphere rule, with jackknife
// replicas when the values came from Monte-Carlo.
struct SupportTable {
  std::shared_ptr<const SphereRule> rule;
  std::vector<double> values;
  std::vector<std::vector<double>> replicas;  // leave-one-group-out tables
  std::vector<double> node_sigma;
  std::vector<int> flagged;      // nodes whose relative stderr exceeds tolerance
  double worst_rel_error = 0.0;
  Method method = Method::ClosedForm;
  std::int64_t samples = 0;
  bool symmetric = false;
  std::function<double(const Vec&)> exact;  // optional exact support off the nodes
};

struct SupportQuery {
  double value = 0.0;
  bool degraded = false;  // interpolated between nodes
};

namespace detail {
class BodyImpl;
}

class ConvexBody final : public Region {
 public:
  ConvexBody() = default;
  explicit ConvexBody(std::shared_ptr<const detail::BodyImpl> impl) : impl_(std::move(impl)) {}

  static ConvexBody ball(int n, double radius = 1.0);
  static ConvexBody ellipsoid(const Mat& A);
  static ConvexBody cube(int n, double half_side = 1.0);
  static ConvexBody simplex(const std::vector<Vec>& vertices);
  static ConvexBody lq_ball(int n, double q);
  static ConvexBody polytope(const std::vector<Vec>& vertices);
  static ConvexBody numeric_support(SupportTable table);

  // Regular simplex with centroid at the origin and unit circumradius.
  static ConvexBody centered_simplex(int n);

  bool valid() const { return impl_ != nullptr; }
  int dim() const override;
  BodyKind kind() const;
  std::string describe() const;

  double support(const Vec& xi) const;
  SupportQuery query_support(const Vec& xi) const;
  double gauge(const Vec& x) const;
  double radial(const Vec& x) const { return 1.0 / gauge(x); }
  bool contains(const Vec& x) const override;
  Box box() const override;
  Estimate volume_estimate(const Budget& budget) const override;

  double bounding_radius() const;
  double inner_radius() const;
  bool origin_interior() const;
  bool origin_symmetric() const;
  std::optional<double> exact_volume() const;

  // Facets for polytopal kinds (Cube, Simplex, Polytope and their linear
  // images / translates).
  std::optional<std::vector<Facet>> facets() const;
  // Vertices for polytopal kinds.
  std::optional<std::vector<Vec>> vertices() const;

  // Smooth kinds (Ball, Ellipsoid and their linear images).
  bool is_smooth() const;
  std::optional<Vec> support_point(const Vec& xi) const;
  Vec gauge_gradient(const Vec& x) const;  // central differences if no oracle
  std::optional<Mat> gauge_hessian(const Vec& x) const;

  const SupportTable* table() const;
  const detail::BodyImpl& impl() const { return *impl_; }
  const std::shared_ptr<const detail::BodyImpl>& impl_ptr() const { return impl_; }

 private:
  std::shared_ptr<const detail::BodyImpl> impl_;
};

ConvexBody polar(const ConvexBody& body);
ConvexBody linear_image(const ConvexBody& body, const Mat& A);
ConvexBody translate(const ConvexBody& body, const Vec& v);
ConvexBody scale(const ConvexBody& body, double t);

namespace detail {

class BodyImpl {
 public:
  virtual ~BodyImpl() = default;
  int n = 0;

  virtual BodyKind kind() const = 0;
  virtual std::string describe() const = 0;
  virtual double support(const Vec& xi) const = 0;
  virtual SupportQuery query_support(const Vec& xi) const { return {support(xi), false}; }
  virtual double gauge(const Vec& x) const = 0;
  virtual bool contains(const Vec& x) const { return gauge(x) <= 1.0; }
  virtual double bounding_radius() const = 0;
  virtual double inner_radius() const = 0;
  virtual Box box() const;
  virtual bool origin_interior() const { return true; }
  virtual bool origin_symmetric() const { return false; }
  virtual std::optional<double> exact_volume() const { return std::nullopt; }
  virtual std::optional<std::vector<Facet>> facets() const { return std::nullopt; }
  virtual std::optional<std::vector<Vec>> vertices() const { return std::nullopt; }
  virtual bool is_smooth() const { return false; }
  virtual std::optional<Vec> support_point(const Vec&) const { return std::nullopt; }
  virtual std::optional<Vec> gauge_gradient(const Vec&) const { return std::nullopt; }
  virtual std::optional<Mat> gauge_hessian(const Vec&) const { return std::nullopt; }
  virtual const SupportTable* table() const { return nullptr; }
};

}  // namespace detail

}  // namespace affgeom
