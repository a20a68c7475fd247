#include "affgeom/funcspace/function.hpp"

#include "affgeom/constants/constants.hpp"
#include "affgeom/core/quadrature.hpp"
#include "affgeom/core/volume.hpp"

#include <algorithm>
#include <cmath>

namespace affgeom {

CompactFunction::CompactFunction(int n, Box box, Eval eval, Grad grad, Hess hess, Smoothness smooth,
                                 std::string name)
    : n_(n),
      box_(std::move(box)),
      eval_(std::move(eval)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      smooth_(smooth),
      name_(std::move(name)),
      center_(Vec::Zero(n)) {
  require(n >= 2 && n <= kMaxDim, "CompactFunction: unsupported dimension");
  require(static_cast<bool>(eval_), "CompactFunction: missing evaluation oracle");
}

Vec CompactFunction::gradient(const Vec& x) const {
  if (!grad_) throw DomainError("CompactFunction: no gradient oracle for " + name_);
  return grad_(x);
}

Mat CompactFunction::hessian(const Vec& x) const {
  if (!hess_) throw DomainError("CompactFunction: no Hessian oracle for " + name_);
  return hess_(x);
}

namespace {

double tail_radius(const RadialStructure& r) {
  if (std::isfinite(r.support_end())) return r.support_end();
  // Heavy-tailed profiles get a box where G has dropped below 1e-8 of its
  // sup, capped so box sampling still hits the bulk.
  double R = 1.0 / r.b;
  while (R * r.b < 1e3 && r.G.G(r.b * R) > 1e-8 * r.G.sup) R *= 1.25;
  return R;
}

}  // namespace

CompactFunction CompactFunction::radial(RadialStructure r) {
  const int n = r.K.dim();
  require(r.a > 0 && r.b > 0, "radial function: a and b must be positive");
  const ConvexBody K = r.K;
  const Profile G = r.G;
  const double a = r.a, b = r.b;
  const double R = tail_radius(r);
  Box kb = K.box();
  Box box{kb.lo * R, kb.hi * R};

  auto eval = [K, G, a, b](const Vec& x) {
    const double s = b * K.gauge(x);
    return s >= G.end ? 0.0 : a * G.G(s);
  };
  Grad grad;
  Hess hess;
  if (G.smoothness != Smoothness::Indicator) {
    grad = [K, G, a, b](const Vec& x) -> Vec {
      const double s = b * K.gauge(x);
      if (s >= G.end || s == 0.0) return Vec::Zero(x.size());
      return Vec(a * b * G.dG(s) * K.gauge_gradient(x));
    };
    const bool smooth_gauge = K.gauge_hessian(unit(n, 0)).has_value();
    if (smooth_gauge && G.d2G) {
      hess = [K, G, a, b](const Vec& x) -> Mat {
        const int n = static_cast<int>(x.size());
        const double s = b * K.gauge(x);
        if (s >= G.end || s == 0.0) return Mat::Zero(n, n);
        const Vec g = K.gauge_gradient(x);
        return Mat(a * b * b * G.d2G(s) * g * g.transpose() + a * b * G.dG(s) * *K.gauge_hessian(x));
      };
    }
  }
  CompactFunction f(n, box, eval, grad, hess, G.smoothness,
                    G.name + "(" + K.describe() + ")");
  f.sup_ = a * G.sup;
  f.radial_ = std::move(r);
  return f;
}

PointSource CompactFunction::space_source(std::function<double(double)> profile) const {
  if (!radial_) {
    const Box box = box_;
    const double vol = box.volume();
    return [box, vol](Engine& eng) { return WeightedPoint{box.sample(eng), vol}; };
  }
  const RadialStructure r = *radial_;
  const int n = n_;
  if (!profile) {
    profile = [r, n](double s) {
      return s * r.b >= r.G.end ? 0.0 : r.a * r.G.G(r.b * s) * std::pow(s, n - 1);
    };
  }
  const double S = r.support_end();
  const double u_end = std::isfinite(S) ? S / (1.0 + S) : 1.0;
  constexpr int M = 4096;
  const double du = u_end / M;
  auto cum = std::make_shared<std::vector<double>>(M);
  std::vector<double> mass(M);
  double total = 0.0;
  for (int k = 0; k < M; ++k) {
    double m = 0.0;
    for (double f : {0.1, 0.5, 0.9}) {
      const double u = (k + f) * du;
      const double s = u / (1.0 - u);
      const double v = profile(s) / ((1.0 - u) * (1.0 - u));
      if (std::isfinite(v)) m += std::abs(v);
    }
    mass[k] = m;
    total += m;
  }
  double acc = 0.0;
  for (int k = 0; k < M; ++k) {
    const double q = (total > 0 ? 0.9 * mass[k] / total : 0.9 / M) + 0.1 / M;
    mass[k] = q;
    acc += q;
    (*cum)[k] = acc;
  }
  auto prob = std::make_shared<std::vector<double>>(std::move(mass));
  const double volK = volume(r.K, Budget{}).value;
  const Box kb = r.K.box();
  const ConvexBody K = r.K;
  return [=](Engine& eng) {
    const double t = uniform01(eng) * acc;
    const int k = std::min<int>(M - 1, static_cast<int>(std::upper_bound(cum->begin(), cum->end(), t) - cum->begin()));
    const double u = (k + uniform01(eng)) * du;
    const double s = u / (1.0 - u);
    const double qs = (*prob)[k] / acc / du * (1.0 - u) * (1.0 - u);
    const Vec y = sample_uniform(K, kb, eng);
    const Vec z = y / K.gauge(y);
    return WeightedPoint{s * z, n * volK * std::pow(s, n - 1) / qs};
  };
}

// ---------------------------------------------------------------- profiles
Profile indicator_profile() {
  Profile P;
  P.name = "indicator";
  P.G = [](double s) { return s < 1.0 ? 1.0 : 0.0; };
  P.dG = [](double) { return 0.0; };
  P.d2G = [](double) { return 0.0; };
  P.end = 1.0;
  P.smoothness = Smoothness::Indicator;
  return P;
}

Profile moment_profile(double p, double lambda) {
  require(p >= 1.0, "moment_profile: p >= 1");
  if (std::isinf(lambda)) {
    Profile P = indicator_profile();
    P.name = "moment(inf)";
    return P;
  }
  require(lambda > 0.0 && lambda != 1.0, "moment_profile: lambda must be positive and != 1");
  const double e = 1.0 / (lambda - 1.0);
  Profile P;
  P.name = "moment(p=" + std::to_string(p) + ",lambda=" + std::to_string(lambda) + ")";
  P.smoothness = Smoothness::C0;
  if (lambda > 1.0) {
    P.end = 1.0;
    P.G = [p, e](double s) { return s >= 1.0 ? 0.0 : std::pow(1.0 - std::pow(s, p), e); };
    P.dG = [p, e](double s) {
      return s >= 1.0 ? 0.0 : -e * p * std::pow(s, p - 1.0) * std::pow(1.0 - std::pow(s, p), e - 1.0);
    };
  } else {
    P.G = [p, e](double s) { return std::pow(1.0 + std::pow(s, p), e); };
    P.dG = [p, e](double s) { return e * p * std::pow(s, p - 1.0) * std::pow(1.0 + std::pow(s, p), e - 1.0); };
  }
  return P;
}

Profile sobolev_profile(int n, double p) {
  require(p > 1.0 && p < n, "sobolev_profile: need 1 < p < n");
  const double q = p / (p - 1.0);
  const double m = 1.0 - n / p;
  Profile P;
  P.name = "sobolev(p=" + std::to_string(p) + ")";
  P.G = [q, m](double s) { return std::pow(1.0 + std::pow(s, q), m); };
  P.dG = [q, m](double s) { return m * q * std::pow(s, q - 1.0) * std::pow(1.0 + std::pow(s, q), m - 1.0); };
  P.d2G = [q, m](double s) {
    const double w = 1.0 + std::pow(s, q);
    return m * q * ((q - 1.0) * std::pow(s, q - 2.0) * std::pow(w, m - 1.0) +
                    (m - 1.0) * q * std::pow(s, 2.0 * q - 2.0) * std::pow(w, m - 2.0));
  };
  P.smoothness = q >= 2.0 ? Smoothness::C2 : Smoothness::C1;
  return P;
}

Profile bump_profile(int k) {
  require(k >= 1, "bump_profile: k >= 1");
  Profile P;
  P.name = "bump(" + std::to_string(k) + ")";
  P.end = 1.0;
  P.G = [k](double s) { return s >= 1.0 ? 0.0 : std::pow(1.0 - s * s, k); };
  P.dG = [k](double s) { return s >= 1.0 ? 0.0 : -2.0 * k * s * std::pow(1.0 - s * s, k - 1); };
  P.d2G = [k](double s) {
    if (s >= 1.0) return 0.0;
    const double u = 1.0 - s * s;
    return -2.0 * k * std::pow(u, k - 1) + (k >= 2 ? 4.0 * k * (k - 1) * s * s * std::pow(u, k - 2) : 0.0);
  };
  P.smoothness = k >= 3 ? Smoothness::C2 : (k == 2 ? Smoothness::C1 : Smoothness::C0);
  return P;
}

Profile cone_profile() {
  Profile P;
  P.name = "cone";
  P.end = 1.0;
  P.G = [](double s) { return s >= 1.0 ? 0.0 : 1.0 - s; };
  P.dG = [](double s) { return s >= 1.0 ? 0.0 : -1.0; };
  P.d2G = [](double) { return 0.0; };
  P.smoothness = Smoothness::C0;
  return P;
}

Profile smoothed_indicator_profile(double w) {
  require(w > 0.0 && w < 1.0, "smoothed_indicator_profile: width in (0,1)");
  const double s0 = 1.0 - w / 2.0;
  Profile P;
  P.name = "smoothed_indicator(w=" + std::to_string(w) + ")";
  P.end = 1.0 + w / 2.0;
  P.kinks = {s0};
  P.G = [s0, w](double s) {
    if (s <= s0) return 1.0;
    const double x = (s - s0) / w;
    if (x >= 1.0) return 0.0;
    return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
  };
  P.dG = [s0, w](double s) {
    const double x = (s - s0) / w;
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -30.0 * x * x * (1.0 - x) * (1.0 - x) / w;
  };
  P.d2G = [s0, w](double s) {
    const double x = (s - s0) / w;
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x) / (w * w);
  };
  return P;
}

// ---------------------------------------------------------------- builders
CompactFunction power(const CompactFunction& f, double alpha) {
  require(alpha > 0.0, "power: alpha must be positive");
  if (const auto& r = f.radial_structure()) {
    RadialStructure q = *r;
    const Profile G = r->G;
    q.G.name = G.name + "^" + std::to_string(alpha);
    q.G.G = [G, alpha](double s) { return std::pow(G.G(s), alpha); };
    q.G.dG = [G, alpha](double s) {
      const double g = G.G(s);
      return g > 0.0 ? alpha * std::pow(g, alpha - 1.0) * G.dG(s) : 0.0;
    };
    if (G.d2G) {
      q.G.d2G = [G, alpha](double s) {
        const double g = G.G(s);
        if (!(g > 0.0)) return 0.0;
        const double d = G.dG(s);
        return alpha * (alpha - 1.0) * std::pow(g, alpha - 2.0) * d * d + alpha * std::pow(g, alpha - 1.0) * G.d2G(s);
      };
    }
    q.G.sup = std::pow(G.sup, alpha);
    q.a = std::pow(r->a, alpha);
    CompactFunction out = CompactFunction::radial(q);
    out.set_center(f.center());
    return out;
  }
  auto eval = [f, alpha](const Vec& x) {
    const double v = f(x);
    return v > 0.0 ? std::pow(v, alpha) : 0.0;
  };
  CompactFunction::Grad grad;
  CompactFunction::Hess hess;
  if (f.has_gradient())
    grad = [f, alpha](const Vec& x) -> Vec {
      const double v = f(x);
      if (!(v > 0.0)) return Vec::Zero(x.size());
      return Vec(alpha * std::pow(v, alpha - 1.0) * f.gradient(x));
    };
  if (f.has_hessian())
    hess = [f, alpha](const Vec& x) -> Mat {
      const double v = f(x);
      if (!(v > 0.0)) return Mat::Zero(x.size(), x.size());
      const Vec g = f.gradient(x);
      return Mat(alpha * std::pow(v, alpha - 1.0) * f.hessian(x) +
                 alpha * (alpha - 1.0) * std::pow(v, alpha - 2.0) * g * g.transpose());
    };
  CompactFunction out(f.dim(), f.box(), eval, grad, hess, f.smoothness(),
                      f.name() + "^" + std::to_string(alpha));
  if (f.sup_norm()) out.set_sup_norm(std::pow(*f.sup_norm(), alpha));
  out.set_center(f.center());
  return out;
}

CompactFunction compose_linear(const CompactFunction& f, const Mat& A) {
  const int n = f.dim();
  require(A.rows() == n && A.cols() == n, "compose_linear: shape mismatch");
  require(std::abs(A.determinant()) > 1e-14, "compose_linear: singular map");
  const Mat Ainv = A.inverse();
  if (const auto& r = f.radial_structure()) {
    RadialStructure q = *r;
    q.K = linear_image(r->K, Ainv);
    CompactFunction out = CompactFunction::radial(q);
    out.set_center(Vec(Ainv * f.center()));
    return out;
  }
  // Bounding box of the preimage of f's box.
  const Box& b = f.box();
  Vec lo = Vec::Constant(n, kInf), hi = Vec::Constant(n, -kInf);
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c(i) = (mask >> i & 1) ? b.hi(i) : b.lo(i);
    const Vec y = Ainv * c;
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  auto eval = [f, A](const Vec& x) { return f(Vec(A * x)); };
  CompactFunction::Grad grad;
  CompactFunction::Hess hess;
  if (f.has_gradient()) grad = [f, A](const Vec& x) { return Vec(A.transpose() * f.gradient(Vec(A * x))); };
  if (f.has_hessian())
    hess = [f, A](const Vec& x) { return Mat(A.transpose() * f.hessian(Vec(A * x)) * A); };
  CompactFunction out(n, Box{lo, hi}, eval, grad, hess, f.smoothness(), f.name() + "(A.)");
  if (f.sup_norm()) out.set_sup_norm(*f.sup_norm());
  out.set_center(Vec(Ainv * f.center()));
  return out;
}

CompactFunction indicator(const ConvexBody& K) {
  return CompactFunction::radial(RadialStructure{K, indicator_profile(), 1.0, 1.0});
}

CompactFunction bump_sum(int n, std::vector<BumpTerm> terms) {
  require(!terms.empty(), "bump_sum: no terms");
  Vec lo = Vec::Constant(n, kInf), hi = Vec::Constant(n, -kInf);
  for (const auto& t : terms) {
    require(t.mu.size() == n && t.s > 0 && t.c > 0, "bump_sum: invalid term");
    lo = lo.cwiseMin(t.mu - Vec::Constant(n, t.s));
    hi = hi.cwiseMax(t.mu + Vec::Constant(n, t.s));
  }
  auto T = std::make_shared<const std::vector<BumpTerm>>(std::move(terms));
  auto eval = [T](const Vec& x) {
    double v = 0.0;
    for (const auto& t : *T) {
      const double u = 1.0 - (x - t.mu).squaredNorm() / (t.s * t.s);
      if (u > 0) v += t.c * u * u * u;
    }
    return v;
  };
  auto grad = [T](const Vec& x) {
    Vec g = Vec::Zero(x.size());
    for (const auto& t : *T) {
      const double u = 1.0 - (x - t.mu).squaredNorm() / (t.s * t.s);
      if (u > 0) g += t.c * 3.0 * u * u * (-2.0 / (t.s * t.s)) * (x - t.mu);
    }
    return g;
  };
  auto hess = [T](const Vec& x) {
    const int n = static_cast<int>(x.size());
    Mat H = Mat::Zero(n, n);
    for (const auto& t : *T) {
      const double u = 1.0 - (x - t.mu).squaredNorm() / (t.s * t.s);
      if (u > 0) {
        const Vec du = (-2.0 / (t.s * t.s)) * (x - t.mu);
        H += t.c * (6.0 * u * du * du.transpose() - 3.0 * u * u * (2.0 / (t.s * t.s)) * Mat::Identity(n, n));
      }
    }
    return H;
  };
  CompactFunction f(n, Box{lo, hi}, eval, grad, hess, Smoothness::C2, "bumps");
  // Center: best of the term centres.
  Vec best = (*T)[0].mu;
  for (const auto& t : *T)
    if (eval(t.mu) > eval(best)) best = t.mu;
  f.set_center(best);
  return f;
}

CompactFunction random_bumps(int n, int terms, std::uint64_t seed) {
  Engine eng(splitmix64(seed));
  std::vector<BumpTerm> T;
  for (int k = 0; k < terms; ++k) {
    BumpTerm t;
    t.mu = Vec(n);
    for (int i = 0; i < n; ++i) t.mu(i) = -0.5 + uniform01(eng);
    t.s = 0.6 + 0.6 * uniform01(eng);
    t.c = 0.5 + uniform01(eng);
    T.push_back(t);
  }
  return bump_sum(n, std::move(T));
}

// --------------------------------------------------------------- operations
double lambda_prime(double lambda) { return holder_conjugate(lambda); }

namespace {

Estimate mc_integral(const PointSource& src, const std::function<double(const Vec&)>& phi,
                     const Budget& budget) {
  auto sums = accumulate(budget, 1, [&](Engine& eng, double* acc) {
    const WeightedPoint s = src(eng);
    if (s.w != 0.0) acc[0] += s.w * phi(s.x);
  });
  Estimate e = sums.component(0);
  if (e.relative_error() > budget.tolerance) e.status = Status::Warning;
  return e;
}

std::function<double(double)> radial_profile(const CompactFunction& f,
                                             const std::function<double(double)>& weight) {
  const auto& r = f.radial_structure();
  if (!r) return {};
  const RadialStructure q = *r;
  return [q, weight](double s) { return s * q.b >= q.G.end ? 0.0 : weight(s); };
}

}  // namespace

Estimate lp_norm(const CompactFunction& l, double lambda, const Budget& budget) {
  require(lambda > 0.0, "lp_norm: lambda must be positive");
  const int n = l.dim();
  if (std::isinf(lambda)) {
    if (l.sup_norm()) return Estimate::exact(*l.sup_norm());
    const Box box = l.box();
    // Best box samples, then backtracking gradient ascent from each.
    constexpr std::size_t kKeep = 8;
    std::vector<std::pair<double, Vec>> best;
    Engine eng = budget.engine(hash_tag("sup"));
    for (std::int64_t i = 0; i < budget.samples; ++i) {
      Vec x = box.sample(eng);
      const double v = l(x);
      if (best.size() < kKeep || v > best.back().first) {
        if (best.size() == kKeep) best.pop_back();
        best.emplace_back(v, x);
        std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      }
    }
    double m = best.empty() ? 0.0 : best.front().first;
    if (l.has_gradient()) {
      const double diam = (box.hi - box.lo).norm();
      for (auto& [v, x] : best) {
        double step = 0.1 * diam;
        for (int it = 0; it < 200 && step > 1e-12 * diam; ++it) {
          const Vec g = l.gradient(x);
          const double gn = g.norm();
          if (!(gn > 0.0)) break;
          const Vec y = x + step * g / gn;
          const double fy = l(y);
          if (fy > v) {
            x = y;
            v = fy;
            step *= 1.5;
          } else {
            step *= 0.5;
          }
        }
        m = std::max(m, v);
      }
    }
    return Estimate::quadrature(m);
  }
  std::function<double(double)> prof;
  if (const auto& r = l.radial_structure()) {
    const RadialStructure q = *r;
    prof = radial_profile(l, [q, lambda, n](double s) {
      return std::pow(q.a * q.G.G(q.b * s), lambda) * std::pow(s, n - 1);
    });
  }
  const Estimate m = mc_integral(l.space_source(prof), [&](const Vec& x) { return std::pow(l(x), lambda); },
                                 budget.fork("lp_norm"));
  return pow(m, 1.0 / lambda);
}

namespace {

double profile_integral(const Profile& G, const std::function<double(double)>& f) {
  if (std::isfinite(G.end)) {
    std::vector<double> br = G.kinks;
    br.insert(br.begin(), 0.0);
    br.push_back(G.end);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) s += quad::integrate_singular(f, br[i], br[i + 1], 1e-13);
    return s;
  }
  // Far out the profile underflows while the power weight overflows.
  return quad::integrate_half_line(
      [&](double s) {
        const double v = f(s);
        return std::isfinite(v) || s < 1e8 ? v : 0.0;
      },
      0.0, 1e-13);
}

}  // namespace

CompactFunction normalized_moment_extremal(const ConvexBody& K, double p, double lambda) {
  const int n = K.dim();
  require(lambda_admissible(n, p, lambda), "normalized_moment_extremal: inadmissible lambda");
  const Profile G = moment_profile(p, lambda);
  const double m = (n + p) * profile_integral(G, [&](double s) { return G.G(s) * std::pow(s, n + p - 1); });
  return CompactFunction::radial(RadialStructure{K, G, 1.0 / m, 1.0});
}

CompactFunction normalized_sobolev_extremal(const ConvexBody& K, double p, double w) {
  const int n = K.dim();
  if (!(p >= 1.0 && p < n)) throw DomainError("normalized_sobolev_extremal: need 1 <= p < n");
  const Profile G = p == 1.0 ? smoothed_indicator_profile(w) : sobolev_profile(n, p);
  const double m = profile_integral(G, [&](double s) { return std::pow(std::abs(G.dG(s)), p) * std::pow(s, n - 1); });
  return CompactFunction::radial(RadialStructure{K, G, std::pow(m, -1.0 / p), 1.0});
}

Estimate dual_mixed_volume_f(const CompactFunction& f, const ConvexBody& L, double p,
                             const Budget& budget) {
  const int n = f.dim();
  std::function<double(double)> prof;
  if (const auto& r = f.radial_structure()) {
    const RadialStructure q = *r;
    prof = radial_profile(f, [q, n, p](double s) { return q.a * q.G.G(q.b * s) * std::pow(s, n + p - 1); });
  }
  const Estimate m = mc_integral(f.space_source(prof),
                                 [&](const Vec& x) { return f(x) * fast_pow(L.gauge(x), p); },
                                 budget.fork("dmv_f"));
  return (n + p) / n * m;
}

namespace {

std::function<double(double)> gradient_profile(const CompactFunction& f, double p) {
  const int n = f.dim();
  if (const auto& r = f.radial_structure()) {
    const RadialStructure q = *r;
    return radial_profile(f, [q, n, p](double s) {
      return std::pow(std::abs(q.a * q.b * q.G.dG(q.b * s)), p) * std::pow(s, n - 1);
    });
  }
  return {};
}

}  // namespace

Estimate mixed_volume_f(const CompactFunction& f, const ConvexBody& K, double p,
                        const Budget& budget) {
  require(f.has_gradient(), "mixed_volume_f: gradient oracle required");
  const int n = f.dim();
  const Estimate m = mc_integral(f.space_source(gradient_profile(f, p)),
                                 [&](const Vec& x) {
                                   const Vec g = f.gradient(x);
                                   return g.squaredNorm() > 0 ? fast_pow(K.support(-g), p) : 0.0;
                                 },
                                 budget.fork("mv_f"));
  return m / static_cast<double>(n);
}

PointSource mass_source(const CompactFunction& l) {
  PointSource src = l.space_source();
  return [src, l](Engine& eng) {
    WeightedPoint s = src(eng);
    s.w *= l(s.x);
    return s;
  };
}

PointSource gradient_source(const CompactFunction& l, double p) {
  require(l.has_gradient(), "gradient_source: gradient oracle required");
  PointSource src = l.space_source(gradient_profile(l, p));
  return [src, l](Engine& eng) {
    WeightedPoint s = src(eng);
    s.x = l.gradient(s.x);
    return s;
  };
}

SurfaceMeasure surface_measure_f(const CompactFunction& f, double p) {
  require(f.has_gradient(), "surface_measure_f: gradient oracle required");
  const int n = f.dim();
  PointSource src = f.space_source(gradient_profile(f, p));
  return SurfaceMeasure::pushforward(n, [src, f, p, n](Engine& eng) {
    WeightedPoint s = src(eng);
    const Vec g = f.gradient(s.x);
    const double len = g.norm();
    if (!(len > 0.0)) return WeightedPoint{unit(n, 0), 0.0};
    return WeightedPoint{-g / len, s.w * fast_pow(len, p)};
  });
}

Estimate I_p_functions(const std::vector<CompactFunction>& ls, double p, const Budget& budget) {
  require(!ls.empty(), "I_p_functions: no functions");
  const int n = ls[0].dim();
  require(static_cast<int>(ls.size()) == n, "I_p_functions: need n functions");
  std::vector<PointSource> src;
  for (const auto& l : ls) src.push_back(mass_source(l));
  return det_moment(src, p, budget.fork("I_p_f"));
}

ConvexBody N_p_function_body(const std::vector<CompactFunction>& ls, double p,
                             std::shared_ptr<const SphereRule> rule, const Budget& budget) {
  require(!ls.empty(), "N_p_function_body: no functions");
  const int n = ls[0].dim();
  require(static_cast<int>(ls.size()) == n - 1, "N_p_function_body: need n-1 functions");
  if (!rule) rule = shared_rule(n);
  std::vector<PointSource> src;
  for (const auto& l : ls) src.push_back(mass_source(l));
  const GroupedSums sums = det_moment_table(src, p, *rule, budget.fork("N_p_f"));
  SupportTable t = support_table_from_sums(rule, sums, 1.0, p, budget.tolerance);
  t.symmetric = true;
  return ConvexBody::numeric_support(std::move(t));
}

double gradient_check(const CompactFunction& f, int probes, std::uint64_t seed) {
  require(f.has_gradient(), "gradient_check: no gradient oracle");
  const int n = f.dim();
  Engine eng(splitmix64(seed));
  const Box box = f.box();
  const double scale = (box.hi - box.lo).maxCoeff();
  double worst = 0.0;
  int done = 0;
  for (int tries = 0; done < probes && tries < 1000 * probes; ++tries) {
    const Vec x = box.sample(eng);
    if (!(f(x) > 0.0)) continue;
    const Vec g = f.gradient(x);
    const double gn = g.norm();
    if (gn < 1e-3 * (f.sup_norm().value_or(1.0) / scale)) continue;
    // Fourth-order central stencil at h and h/2. Stencils straddling a
    // point where the function is only C^2 make the two disagree; skip them.
    const auto stencil = [&](double h, Vec& fd) {
      for (int i = 0; i < n; ++i) {
        double v[4];
        const double off[4] = {-2.0, -1.0, 1.0, 2.0};
        for (int k = 0; k < 4; ++k) {
          Vec y = x;
          y(i) += off[k] * h;
          v[k] = f(y);
          if (!(v[k] > 0.0)) return false;  // stay inside the support
        }
        fd(i) = (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h);
      }
      return true;
    };
    Vec fd(n), fd2(n);
    const double h = 1e-4 * scale;
    if (!stencil(h, fd) || !stencil(h / 2.0, fd2)) continue;
    if ((fd - fd2).norm() > 1e-7 * gn) continue;
    worst = std::max(worst, (fd2 - g).norm() / gn);
    ++done;
  }
  return worst;
}

}  // namespace affgeom
