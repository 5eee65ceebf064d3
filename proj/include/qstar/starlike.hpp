#pragma once

#include <functional>
#include <optional>
#include <string>

#include "qstar/hypq.hpp"
#include "qstar/qcore.hpp"

namespace qstar {

/// A real number or -infinity. Kept as an explicit state so that an
/// unbounded order is never confused with a large negative value.
class ExtendedReal {
 public:
  ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit from finite values
  static ExtendedReal negative_infinity() { return ExtendedReal(); }

  bool is_finite() const noexcept { return finite_; }
  /// Throws std::logic_error on -infinity.
  double value() const;
  /// "-inf" or the shortest round-trip decimal form.
  std::string to_string() const;

  friend bool operator<=(const ExtendedReal& lhs, double rhs) {
    return !lhs.finite_ || lhs.value_ <= rhs;
  }

 private:
  ExtendedReal() : value_(0.0), finite_(false) {}
  double value_;
  bool finite_ = true;
};

/// Polar sampling of the disk |z| <= max_radius. Radii are clustered toward
/// the outer circle (r_j = max_radius * sin(pi/2 * j / n_radius)); the centre
/// is always included. With refine set, the best grid point seeds a pattern
/// search that halves its steps until both fall below 1e-6.
struct GridSpec {
  int n_theta = 720;
  int n_radius = 64;
  double max_radius = 1.0 - 1e-6;
  bool refine = true;

  void validate() const;
};

struct GridMinimum {
  double value = 0.0;
  cplx argmin{0.0};
};

/// Minimum of objective over the grid (plus refinement). Deterministic: grid
/// ties resolve to the first point in (radius, angle) order.
GridMinimum minimize_on_disk(const std::function<double(cplx)>& objective,
                             const GridSpec& grid);

/// w = z (D_q f)(z) / f(z); 1 at z = 0. Throws DomainError when
/// |f(z)/z| <= 1e-13, i.e. f has a zero at z.
cplx starlike_ratio(const NormalizedFunction& f, cplx z, QParam q);
cplx starlike_ratio(const NormalizedSeries& f, cplx z, QParam q);

/// Grid estimate of the order of q-starlikeness inf Re w.
GridMinimum sigma_q_grid_detail(const NormalizedFunction& f, QParam q,
                                const GridSpec& grid);
double sigma_q_grid(const NormalizedFunction& f, QParam q, const GridSpec& grid = {});
double sigma_q_grid(const NormalizedSeries& f, QParam q, const GridSpec& grid = {});

struct SigmaReport {
  ExtendedReal closed_form{1.0};
  std::optional<double> grid_estimate;
  ExtendedReal lower_bound{1.0};
  double upper_bound = 1.0;
  double rho = 0.0;
  double s = 0.0;
  GridSpec grid;
  /// Agreement expected between grid_estimate and closed_form.
  double grid_tolerance = 1e-4;

  bool sandwich_holds(double slack = 1e-9) const;
};

struct SigmaOptions {
  bool with_grid = false;
  GridSpec grid;
};

/// Closed-form order of q-starlikeness of z Phi[a, b; c; q, r z]:
///   1 + rho q (1-a)(1-b) / ((1-c)(1-q)) * Phi[aq,bq;cq;q,rho] / Phi[a,b;c;q,rho]
/// with rho = -r for s > 0 and rho = r for s < 0, together with the bounds
///   1 + s rho / (1 - rho)  and  1 + rho s (1-b) / (2 (1-c)).
/// The lower bound is -inf for s < 0 at r = 1. At r = 1 the closed form is
/// extrapolated linearly from the radii 1 - 1e-6 and 1 - 1e-9.
///
/// Accepts parameters satisfying the strict theorem predicate or the ordered
/// region 1 > a >= b >= c >= 0; a = 1 (s = 0) is rejected.
SigmaReport sigma_q_phi(const PhiParams& p, double r, const SigmaOptions& options = {});

/// 1 - r s / (1 + r) for 1 > a >= b >= c >= 0. Cross-checked against the
/// lower bound of sigma_q_phi.
double corollary_order(const PhiParams& p, double r);

struct Verdict {
  bool member = false;
  double margin = 0.0;
};

/// Grid test of Re w > alpha. Sound only up to grid resolution.
Verdict in_Sq_alpha(const NormalizedFunction& f, QParam q, double alpha,
                    const GridSpec& grid = {});
/// Grid test of |(w - alpha)/(1 - alpha) - 1/(1-q)| <= 1/(1-q) at every grid
/// point (no refinement). margin is the smallest 1/(1-q) - |...|.
Verdict in_Sq_star_alpha(const NormalizedFunction& f, QParam q, double alpha,
                         const GridSpec& grid = {});

/// Grid infimum of Re(z f'(z)/f(z)) for f(z) = z 2F1(a, b; c; r z).
double classical_order_grid(double a, double b, double c, double r, const GridSpec& grid);

}  // namespace qstar
