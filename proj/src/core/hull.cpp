#include "affgeom/core/hull.hpp"

#include <algorithm>
#include <cmath>

namespace affgeom {

namespace {

double cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

double scale_of(const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return std::max(s, 1e-300);
}

}  // namespace

std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  const std::size_t m = pts.size();
  if (m < 3) return pts;
  const double eps = 1e-13 * scale_of(pts) * scale_of(pts);
  std::vector<Vec> h(2 * m);
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = m - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double polygon_area(const std::vector<Vec>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % poly.size()];
    a += p(0) * q(1) - p(1) * q(0);
  }
  return 0.5 * std::abs(a);
}

std::vector<Facet> hull_facets(const std::vector<Vec>& pts) {
  require(!pts.empty(), "hull: empty point set");
  const int n = static_cast<int>(pts[0].size());
  std::vector<Facet> out;
  if (n == 2) {
    const auto h = convex_hull_2d(pts);
    require(h.size() >= 3, "hull: degenerate polygon");
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec& a = h[i];
      const Vec& b = h[(i + 1) % h.size()];
      const Vec e = b - a;
      const double len = e.norm();
      Vec u = make_vec({e(1), -e(0)}) / len;  // outward for ccw order
      out.push_back({u, u.dot(a), len});
    }
    return out;
  }
  require(n == 3, "hull: only n in {2,3} supported");
  const double s = scale_of(pts);
  const double eps = 1e-10 * s;
  const std::size_t m = pts.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        Eigen::Vector3d a = pts[i], b = pts[j], c = pts[k];
        Eigen::Vector3d nrm = (b - a).cross(c - a);
        const double len = nrm.norm();
        if (len < 1e-12 * s * s) continue;
        nrm /= len;
        double off = nrm.dot(a);
        int above = 0, below = 0;
        for (const auto& q : pts) {
          const double d = nrm.dot(Eigen::Vector3d(q)) - off;
          if (d > eps) ++above;
          if (d < -eps) ++below;
        }
        if (above > 0 && below > 0) continue;
        if (above > 0) {
          nrm = -nrm;
          off = -off;
        }
        Vec u = nrm;
        bool dup = false;
        for (const auto& f : out)
          if ((f.normal - u).norm() < 1e-9) dup = true;
        if (dup) continue;
        // Area of the facet polygon in an orthonormal frame of the plane.
        Eigen::Vector3d e1 = nrm.unitOrthogonal();
        Eigen::Vector3d e2 = nrm.cross(e1);
        std::vector<Vec> proj;
        for (const auto& q : pts) {
          Eigen::Vector3d qq = q;
          if (std::abs(nrm.dot(qq) - off) <= eps) proj.push_back(make_vec({e1.dot(qq), e2.dot(qq)}));
        }
        out.push_back({u, off, polygon_area(convex_hull_2d(proj))});
      }
  require(out.size() >= 4, "hull: degenerate polytope");
  return out;
}

std::vector<Vec> hull_vertices(const std::vector<Vec>& pts) {
  const int n = static_cast<int>(pts[0].size());
  if (n == 2) return convex_hull_2d(pts);
  const auto fs = hull_facets(pts);
  const double eps = 1e-10 * scale_of(pts);
  std::vector<Vec> out;
  for (const auto& p : pts) {
    int active = 0;
    for (const auto& f : fs)
      if (std::abs(f.normal.dot(p) - f.offset) <= eps) ++active;
    if (active < 3) continue;
    bool dup = false;
    for (const auto& q : out)
      if ((q - p).norm() <= eps) dup = true;
    if (!dup) out.push_back(p);
  }
  return out;
}

double hull_volume(const std::vector<Vec>& pts) {
  const auto fs = hull_facets(pts);
  const double n = static_cast<double>(pts[0].size());
  double v = 0.0;
  for (const auto& f : fs) v += f.offset * f.area / n;
  return v;
}

}  // namespace affgeom
