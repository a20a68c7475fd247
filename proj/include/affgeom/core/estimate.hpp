#pragma once

#include <cstdint>
#include <string>

namespace affgeom {

enum class Method { MonteCarlo, Quadrature, ClosedForm };
enum class Status { Ok, Warning, Degraded };

const char* to_string(Method m);
const char* to_string(Status s);

// A number with its standard error. `sigma` is zero exactly when the value is
// not a Monte-Carlo estimate.
struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
  std::int64_t samples = 0;
  Method method = Method::ClosedForm;
  Status status = Status::Ok;

  static Estimate exact(double v);
  static Estimate quadrature(double v);
  static Estimate monte_carlo(double v, double sigma, std::int64_t samples);

  double relative_error() const;
  bool is_mc() const { return method == Method::MonteCarlo; }
  Estimate with_status(Status s) const;

  // |value - target| <= k * sigma (exact comparison with tolerance `abs_tol`
  // when both sides are deterministic).
  bool agrees_with(double target, double k = 3.0, double abs_tol = 0.0) const;
};

// First-order error propagation for independent inputs.
Estimate operator+(const Estimate& a, const Estimate& b);
Estimate operator-(const Estimate& a, const Estimate& b);
Estimate operator*(const Estimate& a, const Estimate& b);
Estimate operator/(const Estimate& a, const Estimate& b);
Estimate operator*(double s, const Estimate& a);
Estimate operator*(const Estimate& a, double s);
Estimate operator/(const Estimate& a, double s);
Estimate pow(const Estimate& a, double k);

// Combined significance of the difference of two independent estimates.
bool agree(const Estimate& a, const Estimate& b, double k = 3.0, double abs_tol = 0.0);

std::string describe(const Estimate& e);

}  // namespace affgeom
