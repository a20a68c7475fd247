#include "affgeom/core/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace affgeom {

const char* to_string(Method m) {
  switch (m) {
    case Method::MonteCarlo: return "monte-carlo";
    case Method::Quadrature: return "quadrature";
    case Method::ClosedForm: return "closed-form";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Warning: return "warning";
    case Status::Degraded: return "degraded";
  }
  return "?";
}

Estimate Estimate::exact(double v) { return {v, 0.0, 0, Method::ClosedForm, Status::Ok}; }

Estimate Estimate::quadrature(double v) { return {v, 0.0, 0, Method::Quadrature, Status::Ok}; }

Estimate Estimate::monte_carlo(double v, double s, std::int64_t n) {
  return {v, std::abs(s), n, Method::MonteCarlo, Status::Ok};
}

double Estimate::relative_error() const {
  if (value == 0.0) return sigma == 0.0 ? 0.0 : INFINITY;
  return sigma / std::abs(value);
}

Estimate Estimate::with_status(Status s) const {
  Estimate e = *this;
  e.status = std::max(e.status, s);
  return e;
}

bool Estimate::agrees_with(double target, double k, double abs_tol) const {
  return std::abs(value - target) <= k * sigma + abs_tol;
}

namespace {

Method combine(Method a, Method b) {
  if (a == Method::MonteCarlo || b == Method::MonteCarlo) return Method::MonteCarlo;
  if (a == Method::Quadrature || b == Method::Quadrature) return Method::Quadrature;
  return Method::ClosedForm;
}

Estimate merged(double v, double var, const Estimate& a, const Estimate& b) {
  Estimate e;
  e.value = v;
  e.method = combine(a.method, b.method);
  e.sigma = e.method == Method::MonteCarlo ? std::sqrt(std::max(var, 0.0)) : 0.0;
  e.samples = a.samples + b.samples;
  e.status = std::max(a.status, b.status);
  return e;
}

}  // namespace

Estimate operator+(const Estimate& a, const Estimate& b) {
  return merged(a.value + b.value, a.sigma * a.sigma + b.sigma * b.sigma, a, b);
}

Estimate operator-(const Estimate& a, const Estimate& b) {
  return merged(a.value - b.value, a.sigma * a.sigma + b.sigma * b.sigma, a, b);
}

Estimate operator*(const Estimate& a, const Estimate& b) {
  const double va = b.value * a.sigma, vb = a.value * b.sigma;
  return merged(a.value * b.value, va * va + vb * vb, a, b);
}

Estimate operator/(const Estimate& a, const Estimate& b) {
  const double q = a.value / b.value;
  const double va = a.sigma / b.value, vb = q * b.sigma / b.value;
  return merged(q, va * va + vb * vb, a, b);
}

Estimate operator*(double s, const Estimate& a) {
  Estimate e = a;
  e.value *= s;
  e.sigma *= std::abs(s);
  return e;
}

Estimate operator*(const Estimate& a, double s) { return s * a; }

Estimate operator/(const Estimate& a, double s) { return (1.0 / s) * a; }

Estimate pow(const Estimate& a, double k) {
  Estimate e = a;
  e.value = std::pow(a.value, k);
  e.sigma = std::abs(k * std::pow(a.value, k - 1.0)) * a.sigma;
  if (!std::isfinite(e.sigma)) e.sigma = a.is_mc() ? INFINITY : 0.0;
  return e;
}

bool agree(const Estimate& a, const Estimate& b, double k, double abs_tol) {
  const double s = std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma);
  return std::abs(a.value - b.value) <= k * s + abs_tol;
}

std::string describe(const Estimate& e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.10g +- %.3g (%s, n=%lld, %s)", e.value, e.sigma,
                to_string(e.method), static_cast<long long>(e.samples), to_string(e.status));
  return buf;
}

}  // namespace affgeom
