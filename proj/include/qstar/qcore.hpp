#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qstar {

using cplx = std::complex<double>;

/// Deformation parameter q, strictly inside (0, 1).
class QParam {
 public:
  /// Throws ParameterError unless 0 < q < 1.
  explicit QParam(double q);

  double value() const noexcept { return q_; }
  operator double() const noexcept { return q_; }

 private:
  double q_;
};

/// q-analog of the integer n: (1 - q^n) / (1 - q).
double q_bracket(unsigned n, QParam q);

/// (a; q)_n = prod_{j<n} (1 - a q^j); the empty product is 1.
double q_pochhammer(double a, QParam q, unsigned n);

/// Truncated Taylor series of a normalized analytic function
/// f(z) = z + a_2 z^2 + ... + a_N z^N. Index 0 of coeffs() holds a_1 = 1.
class NormalizedSeries {
 public:
  /// Throws ParameterError if coeffs is empty or coeffs[0] != 1.
  explicit NormalizedSeries(std::vector<cplx> coeffs);

  /// f(z) = z.
  static NormalizedSeries identity() { return NormalizedSeries({cplx{1.0}}); }

  std::size_t size() const noexcept { return coeffs_.size(); }
  /// 1-based access: a(1) == 1.
  cplx a(std::size_t n) const { return coeffs_.at(n - 1); }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }

  cplx operator()(cplx z) const;
  /// f(z)/z evaluated by Horner; equals 1 at z = 0.
  cplx quotient(cplx z) const;

 private:
  std::vector<cplx> coeffs_;
};

/// A normalized function given through its quotient g(z) = f(z)/z with
/// g(0) = 1. Used where the Taylor series is not a practical representation
/// (boundary evaluations, product formulas).
class NormalizedFunction {
 public:
  using Quotient = std::function<cplx(cplx)>;

  NormalizedFunction(Quotient g, std::string label);
  static NormalizedFunction from_series(NormalizedSeries f);

  cplx operator()(cplx z) const { return z * g_(z); }
  cplx quotient(cplx z) const { return g_(z); }
  const std::string& label() const noexcept { return label_; }

 private:
  Quotient g_;
  std::string label_;
};

/// (f(z) - f(qz)) / (z (1 - q)). Throws DomainError at z = 0: the value there
/// is f'(0), which an opaque callable cannot supply.
cplx q_derivative_at(const std::function<cplx(cplx)>& f, cplx z, QParam q);

/// Same operator on a series; at z = 0 returns a_1.
cplx q_derivative_at(const NormalizedSeries& f, cplx z, QParam q);

/// Coefficients [n]_q a_n, n = 1..N, as the coefficients of z^{n-1}.
std::vector<cplx> q_derivative_series(const NormalizedSeries& f, QParam q);

}  // namespace qstar
