#include "qstar/starlike.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qstar/errors.hpp"
#include "qstar/parallel.hpp"

namespace qstar {

double ExtendedReal::value() const {
  if (!finite_) throw std::logic_error("ExtendedReal: value() on -inf");
  return value_;
}

std::string ExtendedReal::to_string() const {
  if (!finite_) return "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, res.ptr);
}

void GridSpec::validate() const {
  if (n_theta < 8) throw ParameterError("grid needs n_theta >= 8");
  if (n_radius < 1) throw ParameterError("grid needs n_radius >= 1");
  if (!(max_radius > 0.0 && max_radius < 1.0)) {
    throw ParameterError("grid max_radius must lie in (0, 1)");
  }
}

GridMinimum minimize_on_disk(const std::function<double(cplx)>& objective,
                             const GridSpec& grid) {
  grid.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  const auto ring_radius = [&](int j) {
    return grid.max_radius * std::sin(0.5 * std::numbers::pi * j / grid.n_radius);
  };

  struct Best {
    double value = INFINITY;
    double theta = 0.0;
    double radius = 0.0;
  };
  std::vector<Best> per_ring(static_cast<std::size_t>(grid.n_radius));
  detail::parallel_for(per_ring.size(), [&](std::size_t idx) {
    const int j = static_cast<int>(idx) + 1;
    const double radius = ring_radius(j);
    Best best;
    for (int k = 0; k < grid.n_theta; ++k) {
      const double theta = two_pi * k / grid.n_theta;
      const double v = objective(std::polar(radius, theta));
      if (v < best.value) best = {v, theta, radius};
    }
    per_ring[idx] = best;
  });

  Best best{objective(cplx{0.0}), 0.0, 0.0};
  for (const auto& b : per_ring) {
    if (b.value < best.value) best = b;
  }

  if (grid.refine) {
    double d_theta = two_pi / grid.n_theta;
    double d_radius = grid.max_radius / grid.n_radius;
    const auto clamp_radius = [&](double r) {
      return std::min(std::max(r, 0.0), grid.max_radius);
    };
    while (std::max(d_theta, d_radius) >= 1e-6) {
      Best candidate = best;
      for (int dt = -1; dt <= 1; ++dt) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (dt == 0 && dr == 0) continue;
          const double theta = best.theta + dt * d_theta;
          const double radius = clamp_radius(best.radius + dr * d_radius);
          const double v = objective(std::polar(radius, theta));
          if (v < candidate.value) candidate = {v, theta, radius};
        }
      }
      if (candidate.value < best.value) {
        best = candidate;
      } else {
        d_theta *= 0.5;
        d_radius *= 0.5;
      }
    }
  }
  const double theta = std::remainder(best.theta, two_pi);
  return {best.value, std::polar(best.radius, theta)};
}

namespace {

cplx ratio_from_quotients(cplx g_z, cplx g_qz, double q) {
  if (std::abs(g_z) <= 1e-13) {
    throw DomainError("starlike_ratio: f vanishes at a point of the disk");
  }
  const cplx w = (g_z - q * g_qz) / ((1.0 - q) * g_z);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw DomainError("starlike_ratio: non-finite value (pole of f)");
  }
  return w;
}

}  // namespace

cplx starlike_ratio(const NormalizedFunction& f, cplx z, QParam q) {
  if (z == cplx{0.0}) return cplx{1.0};
  return ratio_from_quotients(f.quotient(z), f.quotient(q.value() * z), q);
}

cplx starlike_ratio(const NormalizedSeries& f, cplx z, QParam q) {
  if (z == cplx{0.0}) return cplx{1.0};
  return ratio_from_quotients(f.quotient(z), f.quotient(q.value() * z), q);
}

GridMinimum sigma_q_grid_detail(const NormalizedFunction& f, QParam q,
                                const GridSpec& grid) {
  return minimize_on_disk([&](cplx z) { return starlike_ratio(f, z, q).real(); }, grid);
}

double sigma_q_grid(const NormalizedFunction& f, QParam q, const GridSpec& grid) {
  return sigma_q_grid_detail(f, q, grid).value;
}

double sigma_q_grid(const NormalizedSeries& f, QParam q, const GridSpec& grid) {
  return minimize_on_disk([&](cplx z) { return starlike_ratio(f, z, q).real(); }, grid)
      .value;
}

bool SigmaReport::sandwich_holds(double slack) const {
  if (!closed_form.is_finite()) return true;
  const double cf = closed_form.value();
  return lower_bound <= cf + slack && cf <= upper_bound + slack;
}

namespace {

void require_sigma_region(const PhiParams& p, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("r must lie in (0, 1]");
  if (p.a == 0.0) throw ParameterError("a = 0 leaves s = q(1-a)/(a(1-q)) undefined");
  if (p.a == 1.0) {
    throw ParameterError(
        "a = 1 gives s = 0: the order formula degenerates (Phi reduces to 1)");
  }
  if (!(p.theorem_valid() || p.corollary_ordered())) {
    throw ParameterError("parameters outside the theorem region: " + p.theorem_violation());
  }
}

struct Bounds {
  double s;
  double rho;
  ExtendedReal lower;
  double upper;
};

Bounds sigma_bounds(const PhiParams& p, double r) {
  const double s = p.s();
  const double rho = s > 0.0 ? -r : r;
  const ExtendedReal lower = (s < 0.0 && r == 1.0)
                                 ? ExtendedReal::negative_infinity()
                                 : ExtendedReal(1.0 + s * rho / (1.0 - rho));
  const double upper = 1.0 + rho * s * (1.0 - p.b) / (2.0 * (1.0 - p.c));
  return {s, rho, lower, upper};
}

double w_on_axis(const PhiParams& p, double x) {
  const double k = (1.0 - p.a) * (1.0 - p.b) / ((1.0 - p.c) * (1.0 - p.q));
  return (1.0 + x * p.q * k * phi_ratio_shifted(p, cplx{x})).real();
}

}  // namespace

SigmaReport sigma_q_phi(const PhiParams& p, double r, const SigmaOptions& options) {
  require_sigma_region(p, r);
  const Bounds b = sigma_bounds(p, r);
  SigmaReport report;
  report.s = b.s;
  report.rho = b.rho;
  report.lower_bound = b.lower;
  report.upper_bound = b.upper;
  report.grid = options.grid;

  const double sign = b.rho < 0.0 ? -1.0 : 1.0;
  if (r < 1.0) {
    report.closed_form = w_on_axis(p, b.rho);
  } else {
    constexpr double near = 1.0 - 1e-6;
    constexpr double nearer = 1.0 - 1e-9;
    const double w1 = w_on_axis(p, sign * near);
    const double w2 = w_on_axis(p, sign * nearer);
    report.closed_form = w2 + (w2 - w1) * (1.0 - nearer) / (nearer - near);
  }

  if (options.with_grid) {
    const auto f = shifted_phi_function(p, r);
    report.grid_estimate = sigma_q_grid(f, QParam(p.q), options.grid);
  }
  return report;
}

double corollary_order(const PhiParams& p, double r) {
  if (!p.corollary_ordered()) {
    throw ParameterError("corollary_order requires 1 > a >= b >= c >= 0 with a > 0");
  }
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("r must lie in (0, 1]");
  const double s = p.s();
  const double order = 1.0 - r * s / (1.0 + r);
  const Bounds b = sigma_bounds(p, r);
  if (!b.lower.is_finite() || std::abs(b.lower.value() - order) > 1e-12) {
    throw ConsistencyError("corollary_order disagrees with the theorem's lower bound");
  }
  return order;
}

Verdict in_Sq_alpha(const NormalizedFunction& f, QParam q, double alpha,
                    const GridSpec& grid) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in [0, 1)");
  const double inf = sigma_q_grid(f, q, grid);
  return {inf > alpha, inf - alpha};
}

Verdict in_Sq_star_alpha(const NormalizedFunction& f, QParam q, double alpha,
                         const GridSpec& grid) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in [0, 1)");
  const double radius = 1.0 / (1.0 - q.value());
  GridSpec points_only = grid;
  points_only.refine = false;
  const auto margin = minimize_on_disk(
      [&](cplx z) {
        const cplx w = starlike_ratio(f, z, q);
        return radius - std::abs((w - alpha) / (1.0 - alpha) - radius);
      },
      points_only);
  return {margin.value >= 0.0, margin.value};
}

double classical_order_grid(double a, double b, double c, double r, const GridSpec& grid) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("r must lie in (0, 1]");
  const double k = a * b / c;
  return minimize_on_disk(
             [&](cplx z) {
               const cplx x = r * z;
               const cplx F = gauss_2f1(a, b, c, x);
               if (std::abs(F) <= 1e-13) throw DomainError("2F1 vanishes in the disk");
               return (1.0 + x * k * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, x) / F).real();
             },
             grid)
      .value;
}

}  // namespace qstar
