#include "affgeom/harness/registry.hpp"

#include "affgeom/core/volume.hpp"
#include "affgeom/dual/dual.hpp"
#include "affgeom/funcspace/levelset.hpp"
#include "affgeom/functionals/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace affgeom::harness {

const char* to_string(Relation r) {
  switch (r) {
    case Relation::AtLeast: return ">=";
    case Relation::Equal: return "=";
    case Relation::Report: return "report";
  }
  return "?";
}

const std::vector<InequalitySpec>& registry() {
  using R = Relation;
  using D = Domain;
  static const std::vector<InequalitySpec> specs = {
      {"rsi_s", R::AtLeast, D::Bodies, false, "I_p(L_1..L_n) >= b_{n,p} prod vol(L_i)^{(n+p)/n}"},
      {"iso_s", R::AtLeast, D::Bodies, false,
       "a_{n,p} prod vol(L_i)^{-(n+p)/p} >= vol(N_p(L_1..L_{n-1})^o)"},
      {"iso_f", R::AtLeast, D::Functions, true,
       "A prod |l_i|_1^{-(n+p lambda')/p} |l_i|_lambda^{lambda'} >= vol(N_p(l_1..l_{n-1})^o)"},
      {"rsi_f", R::AtLeast, D::Functions, true,
       "I_p(l_1..l_n) >= B prod |l_i|_1^{(n+p lambda')/n} |l_i|_lambda^{-p lambda'/n}"},
      {"moment", R::AtLeast, D::Functions, true,
       "V~_{-p}(f,L) >= c~ |f|_1^{(n+p lambda')/n} |f|_lambda^{-p lambda'/n} vol(L)^{-p/n}"},
      {"mv_ineq", R::AtLeast, D::Bodies, false, "V_p(K,L) >= vol(K)^{(n-p)/n} vol(L)^{p/n}"},
      {"dmv_ineq", R::AtLeast, D::Bodies, false, "V~_{-p}(K,L) >= vol(K)^{(n+p)/n} vol(L)^{-p/n}"},
      {"sobolev_cnv", R::AtLeast, D::Functions, false,
       "V_p(f,L) >= cnv |f|_{np/(n-p)}^p vol(L)^{p/n}, L symmetric, p < n"},
      {"bp_centroid", R::AtLeast, D::Bodies, false, "vol(Gamma_p L) >= vol(L)"},
      {"rsid_s", R::AtLeast, D::Bodies, false, "I~_p(L_1..L_n) >= b~_{n,p} prod Omega_p(L_i)^{(n+p)/n}"},
      {"rsid_f", R::AtLeast, D::Functions, true,
       "I~_p(l_1..l_n) >= C(alpha) prod (Omega_p(l_i)^{(n+alpha')/(n+1)} "
       "Omega_p(l_i^alpha)^{-1/((n+1)(alpha-1))})^{(n+p)/n}"},
      {"levelset", R::AtLeast, D::Profiles, true,
       "(int g^{(n+p)/n})^{n/(n+p)} >= L_{n,p,lambda} (int g t^{lambda-1})^{-p/((n+p)(lambda-1))} "
       "(int g)^{(n+p lambda')/(n+p)}"},
      {"petty_probe", R::Report, D::Bodies, false, "vol(Pi L) vol(L)^{1-n} / ((omega_{n-1}/omega_n)^n omega_n^2)"},
      {"conj_5_1", R::Report, D::Bodies, false,
       "I~_p(L_1..L_n) vs b_bar prod vol(L_i)^{(n-p)/n}, b_bar its value on balls"},
      {"sobolevish_5_5", R::Report, D::Functions, false,
       "I~_p(f..f)^{1/(np)} vs b_hat^{1/(np)} |f|_{np/(n-p)}"},
      {"zhang_5_7", R::AtLeast, D::Functions, false,
       "((1/n) int_S (1/2 int |<grad f, xi>|)^{-n} dxi)^{-1/n} >= omega_{n-1}/omega_n |f|_{n/(n-1)}"},
      {"stronger_5_8", R::Report, D::Functions, false,
       "((1/n) int_S (1/2 int |<grad f, xi>|)^{-n} dxi)^{-1/n} vs (I~_1(f..f)/(omega_n^2 n!))^{1/n}"},
      {"stronger_p_5_9", R::Report, D::Functions, false,
       "((1/n) int_S (int |<grad f, xi>|^p)^{-n/p} dxi)^{-1/n} vs I~_p(f..f)^{1/(np)}, "
       "normalised on the ball"},
      {"blaschke_santalo", R::AtLeast, D::Bodies, false, "omega_n^2 >= vol(K) vol(K^o), K symmetric"},
      {"equivalence_id", R::Equal, D::Bodies, false,
       "I_p(L_1..L_n) = n/(n+p) V~_{-p}(L_n, N_p(L_1..L_{n-1})^o)"},
      {"commutativity_id", R::Equal, D::Bodies, false, "I_p(L_1..L_n) = I_p(L_n..L_1)"},
  };
  return specs;
}

const InequalitySpec& lookup(const std::string& id) {
  for (const auto& s : registry())
    if (s.id == id) return s;
  throw ConfigError("unknown inequality id \"" + id + "\"");
}

namespace {

std::string fmt_param(double v) {
  if (std::isnan(v)) return "-";
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string Case::key() const {
  return id + "|" + instance + "|" + std::to_string(n) + "|" + fmt_param(p) + "|" + fmt_param(lambda);
}

// ------------------------------------------------------------- constants
const ConstantRecord& ConstantCatalog::remember(const ConstantRecord& r) {
  auto k = std::make_tuple(r.name, r.n, fmt_param(r.p), fmt_param(r.lambda));
  return log_.insert_or_assign(k, r).first->second;
}

const ConstantRecord& ConstantCatalog::b_record(int n, double p) {
  auto k = std::make_tuple(std::string("b"), n, fmt_param(p), fmt_param(kNoParam));
  if (auto it = log_.find(k); it != log_.end()) return it->second;
  return remember(b_np(n, p, constants_budget(base_)));
}

Estimate ConstantCatalog::b(int n, double p) { return b_record(n, p).estimate(); }

namespace {
// Any admissible lambda gives the same lambda-free derived constants.
constexpr double kAnyLambda = 2.0;
}  // namespace

Estimate ConstantCatalog::a(int n, double p) {
  const ConstantRecord& b = b_record(n, p);
  return remember(derived_constants(n, p, kAnyLambda, b, moment_constant(n, p, kAnyLambda), std::nullopt).a)
      .estimate();
}

Estimate ConstantCatalog::b_tilde(int n, double p) {
  const ConstantRecord& b = b_record(n, p);
  return remember(
             derived_constants(n, p, kAnyLambda, b, moment_constant(n, p, kAnyLambda), std::nullopt).b_tilde)
      .estimate();
}

Estimate ConstantCatalog::moment(int n, double p, double lambda) {
  return remember(moment_constant(n, p, lambda)).estimate();
}

Estimate ConstantCatalog::A(int n, double p, double lambda) {
  const ConstantRecord& b = b_record(n, p);
  return remember(derived_constants(n, p, lambda, b, moment_constant(n, p, lambda), std::nullopt).A).estimate();
}

Estimate ConstantCatalog::B(int n, double p, double lambda) {
  const ConstantRecord& b = b_record(n, p);
  return remember(derived_constants(n, p, lambda, b, moment_constant(n, p, lambda), std::nullopt).B).estimate();
}

Estimate ConstantCatalog::cnv(int n, double p) { return remember(cnv_np(n, p)).estimate(); }

Estimate ConstantCatalog::petty(int n) { return remember(petty_bound(n)).estimate(); }

Estimate ConstantCatalog::rsid_f(int n, double p, double alpha) {
  const ConstantRecord& b = b_record(n, p);
  if (std::isinf(alpha)) return remember(rsid_f_constant_inf(n, p, b)).estimate();
  return remember(rsid_f_constant(n, p, alpha, b)).estimate();
}

std::vector<ConstantRecord> ConstantCatalog::records() const {
  std::vector<ConstantRecord> out;
  for (const auto& [k, r] : log_) out.push_back(r);
  return out;
}

// ----------------------------------------------------------------- cases
namespace {

using Bodies = std::vector<NamedBody>;
using Functions = std::vector<NamedFunction>;

Sides sides(Estimate lhs, Estimate rhs, std::string note = {}) {
  Sides s{lhs, rhs, false, std::move(note)};
  return s;
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

std::vector<CompactFunction> copies(const CompactFunction& f, int k) { return std::vector<CompactFunction>(k, f); }

const NamedBody* find_body(const Bodies& bs, const std::string& name) {
  for (const auto& b : bs)
    if (b.name == name) return &b;
  return nullptr;
}

// k bodies cycling through the first distinct entries satisfying `keep`.
std::vector<NamedBody> mixed_tuple(const Bodies& bs, int k, const std::function<bool(const NamedBody&)>& keep) {
  std::vector<const NamedBody*> pool;
  for (const auto& b : bs)
    if (keep(b)) pool.push_back(&b);
  std::vector<NamedBody> out;
  if (pool.size() < 2) return out;
  for (int i = 0; i < k; ++i) out.push_back(*pool[i % std::min<std::size_t>(pool.size(), k)]);
  return out;
}

std::vector<ConvexBody> bodies_of(const std::vector<NamedBody>& t) {
  std::vector<ConvexBody> out;
  for (const auto& b : t) out.push_back(b.body);
  return out;
}

std::vector<std::string> names_of(const std::vector<NamedBody>& t) {
  std::vector<std::string> out;
  for (const auto& b : t) out.push_back(b.name);
  return out;
}

Estimate vol(const ConvexBody& K, const Budget& B) { return volume(K, B); }

// prod_i vol(L_i)^k over independent volume estimates.
Estimate vol_product(const std::vector<ConvexBody>& Ls, double k, const Budget& B) {
  Estimate e = Estimate::exact(1.0);
  for (std::size_t i = 0; i < Ls.size(); ++i) e = e * pow(vol(Ls[i], B.fork(1000 + i)), k);
  return e;
}

// Support table of xi -> (scale int |<grad f, xi>|^p)^{1/p} on the rule.
ConvexBody gradient_projection_body(const CompactFunction& f, double p, double scale,
                                    std::shared_ptr<const SphereRule> rule, const Budget& B) {
  const auto src = gradient_source(f, p);
  const int m = rule->size();
  auto sums = accumulate(B, m, [&](Engine& eng, double* acc) {
    const WeightedPoint w = src(eng);
    if (w.w == 0.0) return;
    const Eigen::RowVectorXd d = w.x.transpose() * rule->node_matrix;
    for (int j = 0; j < m; ++j) acc[j] += w.w * fast_pow(std::abs(d(j)), p);
  });
  SupportTable t = support_table_from_sums(rule, sums, scale, p, B.tolerance);
  t.symmetric = true;
  return ConvexBody::numeric_support(std::move(t));
}

// ((1/n) int_S h^{-n})^{-1/n} for the gradient body above.
Estimate affine_gradient_norm(const CompactFunction& f, double p, double scale, const Budget& B) {
  const int n = f.dim();
  const ConvexBody P = gradient_projection_body(f, p, scale, shared_rule(n), B);
  return pow(polar_volume(P), -1.0 / n);
}

// Sobolev extremals with p > 1 decay too slowly to be integrable.
bool integrable(const NamedFunction& f) {
  const auto& r = f.f.radial_structure();
  return !(f.family == "sobolev" && r && !std::isfinite(r->G.end));
}

std::vector<const NamedFunction*> with_gradient(const Functions& fs) {
  std::vector<const NamedFunction*> out;
  for (const auto& f : fs)
    if (f.f.has_gradient()) out.push_back(&f);
  return out;
}

struct Builder {
  const CaseInputs& in;
  ConstantCatalog& C;
  const InequalitySpec& spec;
  std::vector<Case> out;

  int n() const { return in.n; }
  double p() const { return in.p; }
  double lam() const { return in.lambda; }
  const Bodies& bodies() const { return *in.bodies; }
  const Functions& functions() const { return *in.functions; }

  void add(std::string instance, bool equality, std::function<Sides(const Budget&)> fn) {
    Case c;
    c.id = spec.id;
    c.instance = std::move(instance);
    c.n = in.n;
    c.p = in.p;
    c.lambda = spec.uses_lambda ? in.lambda : kNoParam;
    c.relation = spec.relation;
    c.equality = equality;
    c.compute = std::move(fn);
    out.push_back(std::move(c));
  }

  // ------------------------------------------------------- body statements
  void rsi_s() {
    const Estimate b = C.b(n(), p());
    auto one = [&](const std::vector<NamedBody>& t, bool eq) {
      const auto Ls = bodies_of(t);
      const double p_ = p();
      const int n_ = n();
      add(join(names_of(t)), eq, [Ls, b, p_, n_](const Budget& B) {
        return sides(I_p(Ls, p_, B.fork("lhs")), b * vol_product(Ls, (n_ + p_) / n_, B));
      });
    };
    for (const auto& nb : bodies()) one(std::vector<NamedBody>(n(), nb), nb.ellipsoid);
    if (auto t = mixed_tuple(bodies(), n(), [](const NamedBody&) { return true; }); !t.empty()) one(t, false);
  }

  void iso_s() {
    const Estimate a = C.a(n(), p());
    auto one = [&](const std::vector<NamedBody>& t, bool eq) {
      const auto Ls = bodies_of(t);
      const double p_ = p();
      const int n_ = n();
      add(join(names_of(t)), eq, [Ls, a, p_, n_](const Budget& B) {
        const ConvexBody N = N_p_body(Ls, p_, shared_rule(n_), B.fork("N"));
        return sides(a * vol_product(Ls, -(n_ + p_) / p_, B), polar_volume(N));
      });
    };
    for (const auto& nb : bodies()) one(std::vector<NamedBody>(n() - 1, nb), nb.ellipsoid);
    if (n() > 2)
      if (auto t = mixed_tuple(bodies(), n() - 1, [](const NamedBody&) { return true; }); !t.empty()) one(t, false);
  }

  void mv_ineq() {
    const double p_ = p();
    const int n_ = n();
    auto one = [&](const NamedBody& K, const NamedBody& L, bool eq) {
      add(K.name + "," + L.name, eq, [K = K.body, L = L.body, p_, n_](const Budget& B) {
        const Estimate rhs = pow(vol(K, B.fork(1)), (n_ - p_) / n_) * pow(vol(L, B.fork(2)), p_ / n_);
        return sides(mixed_volume(K, L, p_, B.fork("lhs")), rhs);
      });
    };
    const NamedBody* ball = find_body(bodies(), "ball");
    for (const auto& K : bodies()) {
      if (ball && K.name != "ball") one(K, *ball, false);
      one(K, K, true);
    }
    if (ball)
      if (const NamedBody* cube = find_body(bodies(), "cube")) one(*ball, *cube, false);
  }

  void dmv_ineq() {
    const double p_ = p();
    const int n_ = n();
    auto one = [&](const NamedBody& K, const NamedBody& L, bool eq) {
      add(K.name + "," + L.name, eq, [K = K.body, L = L.body, p_, n_](const Budget& B) {
        const Estimate rhs = pow(vol(K, B.fork(1)), (n_ + p_) / n_) * pow(vol(L, B.fork(2)), -p_ / n_);
        return sides(dual_mixed_volume(K, L, p_, B.fork("lhs")), rhs);
      });
    };
    const NamedBody* ball = find_body(bodies(), "ball");
    for (const auto& K : bodies()) {
      if (ball && K.name != "ball") one(K, *ball, false);
      one(K, K, true);
    }
    if (ball)
      if (const NamedBody* cube = find_body(bodies(), "cube")) one(*ball, *cube, false);
  }

  void bp_centroid() {
    const double p_ = p();
    for (const auto& nb : bodies())
      add(nb.name, false, [L = nb.body, p_](const Budget& B) {
        const ConvexBody G = centroid_body(L, p_, shared_rule(L.dim()), B.fork("gamma"));
        return sides(tabulated_volume(G), vol(L, B.fork(1)));
      });
  }

  void rsid_s() {
    const Estimate bt = C.b_tilde(n(), p());
    const double p_ = p();
    const int n_ = n();
    auto one = [&](const std::vector<NamedBody>& t, bool eq) {
      const auto Ls = bodies_of(t);
      add(join(names_of(t)), eq, [Ls, bt, p_, n_](const Budget& B) {
        Estimate rhs = bt;
        for (const auto& L : Ls) rhs = rhs * pow(omega_p(L, p_), (n_ + p_) / n_);
        Sides s = sides(I_tilde_p(Ls, p_, B.fork("lhs")), rhs);
        if (rhs.value == 0.0) {
          s.trivial = true;
          s.note = "Omega_p vanishes on polytopes; bound is 0";
        }
        return s;
      });
    };
    for (const auto& nb : bodies())
      if (nb.smooth) one(std::vector<NamedBody>(n(), nb), nb.ellipsoid);
    if (auto t = mixed_tuple(bodies(), n(), [](const NamedBody& b) { return b.smooth; }); !t.empty()) one(t, false);
    for (const auto& nb : bodies())
      if (nb.polytope) {
        one(std::vector<NamedBody>(n(), nb), false);
        break;
      }
  }

  void petty_probe() {
    const Estimate bound = C.petty(n());
    const int n_ = n();
    for (const auto& nb : bodies())
      add(nb.name, false, [L = nb.body, bound, n_](const Budget& B) {
        return sides(projection_body_volume(L, B.fork("pi")) * pow(vol(L, B.fork(1)), 1.0 - n_), bound);
      });
  }

  // Lower bound constant of the random-simplex probe: its value on balls.
  Estimate b_bar() {
    const int n_ = n();
    const double p_ = p();
    const double w = omega_n(n_);
    return C.b_tilde(n_, p_) * (std::pow(n_ * w, n_ + p_) / std::pow(w, n_ - p_));
  }

  void conj_5_1() {
    const Estimate bb = b_bar();
    const double p_ = p();
    const int n_ = n();
    auto one = [&](const std::vector<NamedBody>& t) {
      const auto Ls = bodies_of(t);
      add(join(names_of(t)), false, [Ls, bb, p_, n_](const Budget& B) {
        return sides(I_tilde_p(Ls, p_, B.fork("lhs")), bb * vol_product(Ls, (n_ - p_) / n_, B));
      });
    };
    for (const auto& nb : bodies()) one(std::vector<NamedBody>(n(), nb));
    if (auto t = mixed_tuple(bodies(), n(), [](const NamedBody&) { return true; }); !t.empty()) one(t);
  }

  void blaschke_santalo() {
    const double w2 = omega_n(n()) * omega_n(n());
    for (const auto& nb : bodies())
      if (nb.symmetric)
        add(nb.name, nb.ellipsoid, [K = nb.body, w2](const Budget& B) {
          return sides(Estimate::exact(w2), vol(K, B.fork(1)) * vol(polar(K), B.fork(2)));
        });
  }

  void equivalence_id() {
    const double p_ = p();
    auto one = [&](const std::vector<NamedBody>& t) {
      const auto Ls = bodies_of(t);
      add(join(names_of(t)), true, [Ls, p_](const Budget& B) {
        const EquivalenceResult r = equivalence_check(Ls, p_, B);
        return sides(r.lhs, r.rhs);
      });
    };
    for (const char* nm : {"ball", "cube"})
      if (const NamedBody* b = find_body(bodies(), nm)) one(std::vector<NamedBody>(n(), *b));
    if (auto t = mixed_tuple(bodies(), n(), [](const NamedBody& b) { return b.name != "ball"; }); !t.empty())
      one(t);
  }

  void commutativity_id() {
    const double p_ = p();
    auto t = mixed_tuple(bodies(), n(), [](const NamedBody& b) { return b.name != "ball"; });
    if (t.empty()) return;
    // n distinct bodies where the corpus has them.
    std::vector<NamedBody> distinct;
    for (const auto& b : bodies())
      if (b.name != "ball" && static_cast<int>(distinct.size()) < n()) distinct.push_back(b);
    if (static_cast<int>(distinct.size()) == n()) t = distinct;
    const auto Ls = bodies_of(t);
    add(join(names_of(t)), true, [Ls, p_](const Budget& B) {
      std::vector<ConvexBody> rev(Ls.rbegin(), Ls.rend());
      return sides(I_p(Ls, p_, B.fork("forward")), I_p(rev, p_, B.fork("reversed")));
    });
  }

  // --------------------------------------------------- function statements
  bool admissible() const { return !std::isnan(lam()) && lambda_admissible(n(), p(), lam()); }

  void moment() {
    if (!admissible()) return;
    const Estimate c = C.moment(n(), p(), lam());
    const double p_ = p(), l_ = lam(), lp = holder_conjugate(l_);
    const int n_ = n();
    auto one = [&](const std::string& fname, const CompactFunction& f, const NamedBody& L, bool eq) {
      add(fname + "|" + L.name, eq, [f, L = L.body, c, p_, l_, lp, n_](const Budget& B) {
        const Estimate rhs = c * pow(lp_norm(f, 1.0, B.fork("l1")), (n_ + p_ * lp) / n_) *
                             pow(lp_norm(f, l_, B.fork("llam")), -p_ * lp / n_) *
                             pow(vol(L, B.fork(1)), -p_ / n_);
        return sides(dual_mixed_volume_f(f, L, p_, B.fork("lhs")), rhs);
      });
    };
    for (const char* lname : {"ball", "cube"}) {
      const NamedBody* L = find_body(bodies(), lname);
      if (!L) continue;
      for (const auto& f : functions())
        if (integrable(f)) one(f.name, f.f, *L, f.family == "moment" && f.name == "moment_ball" && L->name == "ball");
      if (L->name != "ball") one("moment_extremal", normalized_moment_extremal(L->body, p_, l_), *L, true);
    }
  }

  void iso_f() {
    if (!admissible()) return;
    const Estimate A = C.A(n(), p(), lam());
    const double p_ = p(), l_ = lam(), lp = holder_conjugate(l_);
    const int n_ = n();
    for (const auto& nf : functions())
      if (integrable(nf)) add(nf.name, nf.family == "moment", [f = nf.f, A, p_, l_, lp, n_](const Budget& B) {
        const ConvexBody N = N_p_function_body(copies(f, n_ - 1), p_, shared_rule(n_), B.fork("N"));
        const double k = n_ - 1.0;
        const Estimate bound = A * pow(lp_norm(f, 1.0, B.fork("l1")), -k * (n_ + p_ * lp) / p_) *
                               pow(lp_norm(f, l_, B.fork("llam")), k * lp);
        return sides(bound, polar_volume(N));
      });
  }

  void rsi_f() {
    if (!admissible()) return;
    const Estimate Bc = C.B(n(), p(), lam());
    const double p_ = p(), l_ = lam(), lp = holder_conjugate(l_);
    const int n_ = n();
    for (const auto& nf : functions())
      if (integrable(nf)) add(nf.name, nf.family == "moment", [f = nf.f, Bc, p_, l_, lp, n_](const Budget& B) {
        const Estimate rhs = Bc * pow(lp_norm(f, 1.0, B.fork("l1")), n_ + p_ * lp) *
                             pow(lp_norm(f, l_, B.fork("llam")), -p_ * lp);
        return sides(I_p_functions(copies(f, n_), p_, B.fork("lhs")), rhs);
      });
  }

  void sobolev_cnv() {
    if (!(p() < n())) return;
    const Estimate c = C.cnv(n(), p());
    const double p_ = p(), ps = n() * p() / (n() - p());
    const int n_ = n();
    auto one = [&](const std::string& fname, const CompactFunction& f, const NamedBody& L, bool eq) {
      add(fname + "|" + L.name, eq, [f, L = L.body, c, p_, ps, n_](const Budget& B) {
        const Estimate rhs = c * pow(lp_norm(f, ps, B.fork("lps")), p_) * pow(vol(L, B.fork(1)), p_ / n_);
        return sides(mixed_volume_f(f, L, p_, B.fork("lhs")), rhs);
      });
    };
    for (const auto& nb : bodies()) {
      if (!nb.symmetric) continue;
      if (nb.name != "ball" && nb.name != "cube" && nb.name != "ellipsoid") continue;
      for (const NamedFunction* nf : with_gradient(functions()))
        if (nf->name != "sobolev_ball" || nb.name != "ball") one(nf->name, nf->f, nb, false);
      one("sobolev_extremal", normalized_sobolev_extremal(nb.body, p_), nb, p_ > 1.0);
    }
  }

  void levelset() {
    if (!admissible()) return;
    const int n_ = n();
    const double p_ = p(), l_ = lam();
    auto one = [&](const std::string& name, LevelsetInput g, bool eq) {
      add(name, eq, [g = std::move(g), n_, p_, l_](const Budget&) {
        return sides(levelset_check(g, n_, p_, l_), Estimate::exact(1.0));
      });
    };
    one("extremal", {levelset_extremal(l_, n_, p_), 1.0, {}}, true);
    one("cone", {[](double t) { return t < 1.0 ? 1.0 - t : 0.0; }, 1.0, {}}, false);
    one("bump3", {[](double t) { return t < 1.0 ? std::pow(1.0 - t * t, 3) : 0.0; }, 1.0, {}}, false);
    one("exp", {[](double t) { return t < 2.0 ? std::exp(-3.0 * t) : 0.0; }, 2.0, {}}, false);
    // Non-increasing piecewise-linear profile with a jump.
    one("staircase",
        {[](double t) {
           if (t < 0.3) return 1.0 - 0.5 * t;
           if (t < 0.7) return 0.6 - 0.25 * (t - 0.3);
           return t < 1.2 ? 0.3 * (1.2 - t) / 0.5 : 0.0;
         },
         1.2,
         {0.3, 0.7}},
        false);
  }

  void rsid_f() {
    const double alpha = lam();
    if (std::isnan(alpha) || !(alpha > n() / (n() + 1.0)) || alpha == 1.0) return;
    if (!lambda_admissible(n(), p(), rsid_lambda(n(), p(), alpha))) return;
    const Estimate Ca = C.rsid_f(n(), p(), alpha);
    const int n_ = n();
    const double p_ = p();
    for (const auto& nf : functions()) {
      if (!nf.convex_levels || !nf.f.has_hessian()) continue;
      add(nf.name, false, [f = nf.f, Ca, n_, p_, alpha](const Budget& B) {
        const Estimate lhs = I_tilde_p_functions(copies(f, n_), p_, B.fork("lhs"));
        const Estimate om = omega_p_function(f, p_, B.fork("omega"));
        Estimate rhs;
        if (std::isinf(alpha)) {
          rhs = Ca * pow(om, n_ + p_) * pow(lp_norm(f, kInf, B.fork("sup")), -p_);
        } else {
          const double ap = alpha / (alpha - 1.0);
          const Estimate oa = omega_p_function(power(f, alpha), p_, B.fork("omega-alpha"));
          rhs = Ca * pow(om, (n_ + ap) / (n_ + 1.0) * (n_ + p_)) *
                pow(oa, -(n_ + p_) / ((n_ + 1.0) * (alpha - 1.0)));
        }
        return sides(lhs, rhs);
      });
    }
  }

  void zhang_5_7() {
    if (p() != 1.0) return;
    const int n_ = n();
    const double k = omega_n(n_ - 1) / omega_n(n_);
    for (const NamedFunction* nf : with_gradient(functions()))
      add(nf->name, false, [f = nf->f, k, n_](const Budget& B) {
        return sides(affine_gradient_norm(f, 1.0, 0.5, B.fork("lhs")),
                     k * lp_norm(f, n_ / (n_ - 1.0), B.fork("norm")));
      });
  }

  void stronger_5_8() {
    if (p() != 1.0) return;
    const int n_ = n();
    const double k = 1.0 / (omega_n(n_) * omega_n(n_) * std::tgamma(n_ + 1.0));
    for (const NamedFunction* nf : with_gradient(functions()))
      add(nf->name, false, [f = nf->f, k, n_](const Budget& B) {
        return sides(affine_gradient_norm(f, 1.0, 0.5, B.fork("lhs")),
                     pow(k * I_tilde_p_functions(copies(f, n_), 1.0, B.fork("rhs")), 1.0 / n_));
      });
  }

  void sobolevish_5_5() {
    if (!(p() < n())) return;
    const int n_ = n();
    const double p_ = p(), ps = n_ * p_ / (n_ - p_);
    const Estimate cnv = C.cnv(n_, p_);
    const Estimate abar = pow(b_bar() / n_, n_ / p_);
    const Estimate Abar = abar * pow(cnv, (n_ - 1.0) * n_ / p_);
    const Estimate bhat = n_ * cnv * pow(Abar, p_ / n_);
    const double e = 1.0 / (n_ * p_);
    for (const NamedFunction* nf : with_gradient(functions()))
      add(nf->name, false, [f = nf->f, bhat, n_, p_, ps, e](const Budget& B) {
        return sides(pow(I_tilde_p_functions(copies(f, n_), p_, B.fork("lhs")), e),
                     pow(bhat, e) * lp_norm(f, ps, B.fork("norm")));
      });
  }

  void stronger_p_5_9() {
    const int n_ = n();
    const double p_ = p();
    const double e = 1.0 / (n_ * p_);
    // Reference ratio on a radial bump over the ball.
    const CompactFunction ref = CompactFunction::radial({ConvexBody::ball(n_), bump_profile(3), 1.0, 1.0});
    for (const NamedFunction* nf : with_gradient(functions()))
      add(nf->name, false, [f = nf->f, ref, n_, p_, e](const Budget& B) {
        const Estimate r0 = affine_gradient_norm(ref, p_, 1.0, B.fork("ref-lhs")) /
                            pow(I_tilde_p_functions(copies(ref, n_), p_, B.fork("ref-rhs")), e);
        const Estimate lhs = affine_gradient_norm(f, p_, 1.0, B.fork("lhs"));
        return sides(lhs, r0 * pow(I_tilde_p_functions(copies(f, n_), p_, B.fork("rhs")), e),
                     "normalised by the radial-bump ratio on the ball");
      });
  }
};

}  // namespace

std::vector<Case> build_cases(const std::string& id, const CaseInputs& in, ConstantCatalog& constants) {
  const InequalitySpec& spec = lookup(id);
  static const Bodies kNoBodies;
  static const Functions kNoFunctions;
  CaseInputs safe = in;
  if (!safe.bodies) safe.bodies = &kNoBodies;
  if (!safe.functions) safe.functions = &kNoFunctions;
  Builder b{safe, constants, spec, {}};
  using Fn = void (Builder::*)();
  static const std::map<std::string, Fn> table = {
      {"rsi_s", &Builder::rsi_s},
      {"iso_s", &Builder::iso_s},
      {"iso_f", &Builder::iso_f},
      {"rsi_f", &Builder::rsi_f},
      {"moment", &Builder::moment},
      {"mv_ineq", &Builder::mv_ineq},
      {"dmv_ineq", &Builder::dmv_ineq},
      {"sobolev_cnv", &Builder::sobolev_cnv},
      {"bp_centroid", &Builder::bp_centroid},
      {"rsid_s", &Builder::rsid_s},
      {"rsid_f", &Builder::rsid_f},
      {"levelset", &Builder::levelset},
      {"petty_probe", &Builder::petty_probe},
      {"conj_5_1", &Builder::conj_5_1},
      {"sobolevish_5_5", &Builder::sobolevish_5_5},
      {"zhang_5_7", &Builder::zhang_5_7},
      {"stronger_5_8", &Builder::stronger_5_8},
      {"stronger_p_5_9", &Builder::stronger_p_5_9},
      {"blaschke_santalo", &Builder::blaschke_santalo},
      {"equivalence_id", &Builder::equivalence_id},
      {"commutativity_id", &Builder::commutativity_id},
  };
  (b.*table.at(id))();
  return std::move(b.out);
}

}  // namespace affgeom::harness
