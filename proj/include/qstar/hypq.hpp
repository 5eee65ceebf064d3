#pragma once

#include <cstddef>

#include "qstar/qcore.hpp"

namespace qstar {

/// Parameters of Heine's series Phi[a, b; c; q, z].
///
/// Construction enforces what the series needs to be well defined:
/// 0 < q < 1, a, b, c >= 0, c < 1/q and c != 1 (so (c; q)_n never vanishes).
/// The theorem-specific regions are separate predicates.
struct PhiParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double q = 0.5;

  static PhiParams make(double a, double b, double c, double q);

  /// 0 < 1 - aq < 1 - cq and 0 < 1 - b < 1 - c, i.e. c < a < 1/q, c < b < 1.
  bool theorem_valid() const noexcept;
  /// 1 > a >= b >= c >= 0 with a > 0: the closure of the s > 0 region.
  bool corollary_ordered() const noexcept;
  /// Human-readable reason theorem_valid() fails, empty when it holds.
  std::string theorem_violation() const;

  /// s = q (1 - a) / (a (1 - q)).
  double s() const;
  /// Same parameters with (a, b, c) scaled by q.
  PhiParams shifted() const;
};

/// (a;q)_n (b;q)_n / ((c;q)_n (q;q)_n).
double phi_coefficient(const PhiParams& p, std::size_t n);

/// lim_{n->inf} phi_coefficient(p, n) = (a;q)_inf (b;q)_inf / ((c;q)_inf (q;q)_inf).
double phi_coefficient_limit(const PhiParams& p);

enum class Summation {
  /// direct unless that needs many more terms than limit_subtracted; a limit
  /// above 1e3 keeps the direct form while it needs at most 2e6 terms.
  automatic,
  /// Plain partial sums with a geometric tail bound.
  direct,
  /// C/(1-z) + sum (c_n - C) z^n with C the coefficient limit; converges on
  /// the closed disk minus z = 1, so it is used near the boundary.
  limit_subtracted,
};

struct PhiSum {
  cplx value;
  std::size_t terms = 0;
  Summation mode = Summation::direct;
};

/// Phi[a, b; c; q, z] without the leading z of the shifted function.
/// Truncates once the tail estimate drops below tol * |partial sum|.
/// Throws DomainError for |z| >= 1 and ParameterError for tol <= 0.
cplx phi_eval(const PhiParams& p, cplx z, double tol = 1e-15);
PhiSum phi_sum(const PhiParams& p, cplx z, double tol,
               Summation mode = Summation::automatic);

/// The first n_terms partial sum, no tail logic. Reference for tests.
cplx phi_partial_sum(const PhiParams& p, cplx z, std::size_t n_terms);

/// Phi[aq, bq; cq; q, z] / Phi[a, b; c; q, z].
///
/// Computed as a direct quotient and cross-checked against the contiguous
/// relation (1-c)/(a(1-b)z) * (Phi[aq,b;c;q,z]/Phi[a,b;c;q,z] - 1). For
/// |z| < 1e-4 the bracket is summed from its own coefficient formula to
/// avoid cancellation. Throws ConsistencyError when the routes differ by
/// more than 1e-8 relative.
cplx phi_ratio_shifted(const PhiParams& p, cplx z);

/// Classical Gauss series 2F1(a, b; c; z) with the same truncation policy.
cplx gauss_2f1(double a, double b, double c, cplx z, double tol = 1e-15);

/// z * Phi[a, b; c; q, r z] as a normalized function.
NormalizedFunction shifted_phi_function(const PhiParams& p, double r,
                                        double tol = 1e-15);

/// Taylor coefficients of z * Phi[a, b; c; q, r z] truncated once
/// |c_n| r^n < tol * max |c_k| r^k. Requires r < 1.
NormalizedSeries shifted_phi_series(const PhiParams& p, double r,
                                    double tol = 1e-17);

}  // namespace qstar
