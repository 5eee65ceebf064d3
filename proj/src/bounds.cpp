#include "qstar/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <utility>

#include "qstar/errors.hpp"
#include "qstar/parallel.hpp"

namespace qstar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// [n]_q - 1 = q + q^2 + ... + q^{n-1}
double bracket_minus_one(unsigned n, double q) {
  double sum = 0.0;
  double power = q;
  for (unsigned j = 1; j < n; ++j) {
    sum += power;
    power *= q;
  }
  return sum;
}

}  // namespace

CaratheodoryTriple CaratheodoryTriple::make(double p1, cplx x, cplx zc) {
  if (!(p1 >= 0.0 && p1 <= 2.0)) throw ParameterError("triple needs p1 in [0, 2]");
  if (!(std::abs(x) <= 1.0)) throw ParameterError("triple needs |x| <= 1");
  if (!(std::abs(zc) <= 1.0)) throw ParameterError("triple needs |zc| <= 1");
  return {p1, x, zc};
}

P123 p123_from_triple(const CaratheodoryTriple& t) {
  const double c = t.p1;
  const double d = 4.0 - c * c;
  const cplx x = t.x;
  const double x2 = std::norm(x);
  const cplx p2 = (c * c + x * d) / 2.0;
  const cplx p3 =
      (c * c * c + 2.0 * d * c * x - c * d * x * x + 2.0 * d * (1.0 - x2) * t.zc) / 4.0;
  return {cplx{c}, p2, p3};
}

CaratheodoryMixture::CaratheodoryMixture(std::vector<double> weights,
                                         std::vector<cplx> phases)
    : weights_(std::move(weights)), phases_(std::move(phases)) {
  if (weights_.empty() || weights_.size() != phases_.size()) {
    throw ParameterError("mixture needs matching, non-empty weights and phases");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ParameterError("mixture weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ParameterError("mixture weights must sum to 1");
  for (const cplx& e : phases_) {
    if (std::abs(std::abs(e) - 1.0) > 1e-12) {
      throw ParameterError("mixture phases must be unimodular");
    }
  }
}

CaratheodoryMixture CaratheodoryMixture::random(std::mt19937_64& rng, int max_atoms) {
  std::uniform_int_distribution<int> atoms(1, std::max(1, max_atoms));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = atoms(rng);
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<cplx> e(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    w[k] = unit(rng);
    e[k] = std::polar(1.0, kTwoPi * unit(rng));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total == 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / n);
  } else {
    for (double& x : w) x /= total;
  }
  return CaratheodoryMixture(std::move(w), std::move(e));
}

cplx CaratheodoryMixture::coefficient(unsigned n) const {
  cplx sum{0.0};
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    sum += weights_[k] * std::pow(phases_[k], static_cast<int>(n));
  }
  return 2.0 * sum;
}

std::vector<cplx> CaratheodoryMixture::coefficients(std::size_t count) const {
  std::vector<cplx> out(count, cplx{0.0});
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    cplx power = phases_[k];
    for (std::size_t n = 0; n < count; ++n) {
      out[n] += 2.0 * weights_[k] * power;
      power *= phases_[k];
    }
  }
  return out;
}

cplx CaratheodoryMixture::operator()(cplx z) const {
  cplx sum{0.0};
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    sum += weights_[k] * (1.0 + phases_[k] * z) / (1.0 - phases_[k] * z);
  }
  return sum;
}

NormalizedSeries coeffs_from_p(std::span<const cplx> p_coeffs, QParam q, std::size_t n) {
  if (n < 1) throw ParameterError("coeffs_from_p needs N >= 1");
  if (p_coeffs.size() + 1 < n) {
    throw ParameterError("coeffs_from_p needs p_1 .. p_{N-1}");
  }
  std::vector<cplx> a(n);
  a[0] = 1.0;
  for (std::size_t m = 2; m <= n; ++m) {
    cplx rhs{0.0};
    for (std::size_t k = 1; k < m; ++k) rhs += p_coeffs[m - k - 1] * a[k - 1];
    a[m - 1] = rhs / bracket_minus_one(static_cast<unsigned>(m), q);
  }
  return NormalizedSeries(std::move(a));
}

A234 a234_from_p(cplx p1, cplx p2, cplx p3, QParam q) {
  const double t = q.value();
  const double one_q = 1.0 + t;
  const double three = 1.0 + t + t * t;
  return {
      p1 / t,
      (t * p2 + p1 * p1) / (t * t * one_q),
      (p3 * t * t * one_q + p1 * p2 * t * (2.0 + t) + p1 * p1 * p1) /
          (t * t * t * one_q * three),
  };
}

double bieberbach_bound(QParam q, unsigned n) {
  if (n < 2) throw ParameterError("bieberbach_bound needs n >= 2");
  double product = 1.0;
  for (unsigned j = 2; j <= n; ++j) {
    product *= (q_bracket(j - 1, q) + 1.0) / bracket_minus_one(j, q);
  }
  return product;
}

NormalizedSeries extremal_F_coeffs(QParam q, std::size_t n) {
  if (n < 1) throw ParameterError("extremal_F_coeffs needs N >= 1");
  std::vector<cplx> b(n);
  b[0] = 1.0;
  double running = 1.0;
  for (std::size_t m = 2; m <= n; ++m) {
    const double bm = 2.0 * running / bracket_minus_one(static_cast<unsigned>(m), q);
    b[m - 1] = bm;
    running += bm;
  }
  return NormalizedSeries(std::move(b));
}

NormalizedSeries extremal_G_coeffs(QParam q, std::size_t n) {
  std::vector<cplx> p(n > 0 ? n - 1 : 0);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = (k % 2 == 1) ? 2.0 : 0.0;
  return coeffs_from_p(p, q, n);
}

NormalizedFunction kernel_function(QParam q, std::function<cplx(cplx)> p,
                                   std::string label) {
  const double t = q.value();
  // |factor - 1| ~ 2 (1-q)/q |zeta| for Caratheodory p.
  const double cutoff = 1e-17 * t / (2.0 * (1.0 - t));
  return NormalizedFunction(
      [t, cutoff, p = std::move(p)](cplx z) {
        cplx product{1.0};
        cplx zeta = z;
        while (std::abs(zeta) > cutoff) {
          product *= t / (1.0 - (1.0 - t) * p(zeta));
          zeta *= t;
        }
        return product;
      },
      std::move(label));
}

NormalizedFunction extremal_F_function(QParam q) {
  return kernel_function(q, [](cplx z) { return (1.0 + z) / (1.0 - z); }, "F");
}

NormalizedFunction extremal_G_function(QParam q) {
  return kernel_function(
      q, [](cplx z) { return (1.0 + z * z) / (1.0 - z * z); }, "G");
}

std::function<cplx(cplx)> disk_kernel(cplx center, double radius) {
  const cplx u = (1.0 - center) / radius;
  if (!(std::abs(u) < 1.0)) throw ParameterError("disk_kernel: 1 must lie inside the disk");
  if (!(center.real() - radius >= 0.0)) {
    throw ParameterError("disk_kernel: disk must lie in the closed right half-plane");
  }
  return [center, radius, u](cplx z) {
    return center + radius * (z + u) / (1.0 + std::conj(u) * z);
  };
}

FsBound fekete_szego_bound(QParam q, cplx mu) {
  const double t = q.value();
  const double first =
      std::abs(2.0 * (2.0 + t) - 4.0 * mu * (1.0 + t)) / (t * t * (1.0 + t));
  const double second = 2.0 / (t * (1.0 + t));
  return first >= second ? FsBound{first, FsBranch::F_extremal}
                         : FsBound{second, FsBranch::G_extremal};
}

double hankel2_bound(QParam q) {
  const double t = q.value();
  return 4.0 / (t * t * (1.0 + t) * (1.0 + t));
}

double functional_fs(cplx a2, cplx a3, cplx mu) { return std::abs(a3 - mu * a2 * a2); }

double functional_h22(cplx a2, cplx a3, cplx a4) { return std::abs(a2 * a4 - a3 * a3); }

double caratheodory_quadratic_bound(double lambda) {
  return 2.0 * std::max(1.0, std::abs(2.0 * lambda - 1.0));
}

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::order_grid_oracle: return "order_grid_oracle";
    case TheoremId::order_lower_bound: return "order_lower_bound";
    case TheoremId::order_upper_bound: return "order_upper_bound";
    case TheoremId::corollary_order: return "corollary_order";
    case TheoremId::coefficient_bound: return "coefficient_bound";
    case TheoremId::coefficient_product_identity: return "coefficient_product_identity";
    case TheoremId::fekete_szego_sound: return "fekete_szego_sound";
    case TheoremId::fekete_szego_attained: return "fekete_szego_attained";
    case TheoremId::hankel_sound: return "hankel_sound";
    case TheoremId::hankel_attained: return "hankel_attained";
    case TheoremId::hankel_g_point: return "hankel_g_point";
    case TheoremId::caratheodory_triple: return "caratheodory_triple";
    case TheoremId::caratheodory_quadratic: return "caratheodory_quadratic";
    case TheoremId::caratheodory_quadratic_sharp: return "caratheodory_quadratic_sharp";
    case TheoremId::caratheodory_coefficient: return "caratheodory_coefficient";
    case TheoremId::limit_coefficient_bound: return "limit_coefficient_bound";
    case TheoremId::limit_fekete_szego: return "limit_fekete_szego";
    case TheoremId::limit_hankel: return "limit_hankel";
    case TheoremId::limit_gauss_order: return "limit_gauss_order";
    case TheoremId::containment_star_in_sq: return "containment_star_in_sq";
    case TheoremId::containment_witness: return "containment_witness";
  }
  return "unknown";
}

std::vector<TheoremId> all_theorem_ids() {
  std::vector<TheoremId> ids;
  for (int i = 0; i <= static_cast<int>(TheoremId::containment_witness); ++i) {
    ids.push_back(static_cast<TheoremId>(i));
  }
  return ids;
}

BoundCertificate BoundCertificate::make(TheoremId id, std::map<std::string, double> params,
                                        double lhs, double rhs, double tolerance) {
  BoundCertificate cert;
  cert.theorem_id = id;
  cert.params = std::move(params);
  cert.params["tolerance"] = tolerance;
  cert.lhs = lhs;
  cert.rhs = rhs;
  cert.margin = rhs - lhs;
  cert.pass = cert.margin >= -tolerance;
  return cert;
}

BoundCertificate caratheodory_quadratic_check(cplx p1, cplx p2, double lambda) {
  return BoundCertificate::make(
      TheoremId::caratheodory_quadratic,
      {{"lambda", lambda},
       {"p1_re", p1.real()},
       {"p1_im", p1.imag()},
       {"p2_re", p2.real()},
       {"p2_im", p2.imag()}},
      std::abs(p2 - lambda * p1 * p1), caratheodory_quadratic_bound(lambda), 1e-9);
}

namespace {

// Uniform axis over [lo, hi] (endpoints included); a single point sits at
// `single`.
struct Axis {
  double lo, hi, single;
  int n;
  bool periodic;

  double at(int i) const {
    if (n == 1) return single;
    return periodic ? lo + (hi - lo) * i / n : lo + (hi - lo) * i / (n - 1);
  }
  double cell() const {
    if (n == 1) return 0.0;
    return periodic ? (hi - lo) / n : (hi - lo) / (n - 1);
  }
  double clamp(double v) const { return periodic ? v : std::clamp(v, lo, hi); }
};

// Coordinates are (p1, |x|, arg x, arg zc) with the last ones optional.
template <std::size_t Dim>
struct Point {
  std::array<double, Dim> v{};
  double value = -std::numeric_limits<double>::infinity();
};

template <std::size_t Dim, class Objective>
Point<Dim> grid_max(const std::array<Axis, Dim>& axes, const Objective& objective) {
  // Parallel over the first axis; each slice keeps its first maximum, and the
  // slices are reduced in index order, so ties resolve lexicographically.
  std::vector<Point<Dim>> slices(static_cast<std::size_t>(axes[0].n));
  detail::parallel_for(slices.size(), [&](std::size_t i0) {
    Point<Dim> best;
    std::array<int, Dim> idx{};
    idx[0] = static_cast<int>(i0);
    while (true) {
      std::array<double, Dim> v;
      for (std::size_t d = 0; d < Dim; ++d) v[d] = axes[d].at(idx[d]);
      const double value = objective(v);
      if (value > best.value) best = {v, value};
      std::size_t d = Dim - 1;
      while (d > 0) {
        if (++idx[d] < axes[d].n) break;
        idx[d] = 0;
        --d;
      }
      if (d == 0) break;
    }
    slices[i0] = best;
  });
  Point<Dim> best = slices.front();
  for (const auto& s : slices) {
    if (s.value > best.value) best = s;
  }
  return best;
}

template <std::size_t Dim, class Objective>
Point<Dim> refine_max(const std::array<Axis, Dim>& axes, Point<Dim> start,
                      const Objective& objective) {
  std::array<double, Dim> step;
  for (std::size_t d = 0; d < Dim; ++d) step[d] = axes[d].cell();
  Point<Dim> best = start;
  while (*std::max_element(step.begin(), step.end()) >= 1e-9) {
    Point<Dim> candidate = best;
    for (std::size_t d = 0; d < Dim; ++d) {
      if (step[d] == 0.0) continue;
      for (double sign : {-1.0, 1.0}) {
        auto v = best.v;
        v[d] = axes[d].clamp(v[d] + sign * step[d]);
        const double value = objective(v);
        if (value > candidate.value) candidate = {v, value};
      }
    }
    if (candidate.value > best.value) {
      best = candidate;
    } else {
      for (double& s : step) s *= 0.5;
    }
  }
  return best;
}

template <std::size_t Dim>
bool moved_more_than_a_cell(const std::array<Axis, Dim>& axes, const Point<Dim>& from,
                            const Point<Dim>& to) {
  for (std::size_t d = 0; d < Dim; ++d) {
    double delta = std::abs(to.v[d] - from.v[d]);
    if (axes[d].periodic) delta = std::abs(std::remainder(to.v[d] - from.v[d], kTwoPi));
    if (delta > axes[d].cell() * (1.0 + 1e-12)) return true;
  }
  return false;
}

CaratheodoryTriple triple_of(double p1, double x_radius, double x_angle, cplx zc) {
  return CaratheodoryTriple{std::clamp(p1, 0.0, 2.0),
                            std::polar(std::clamp(x_radius, 0.0, 1.0), x_angle), zc};
}

double hankel_at(QParam q, const CaratheodoryTriple& t) {
  const auto p = p123_from_triple(t);
  const auto a = a234_from_p(p.p1, p.p2, p.p3, q);
  return functional_h22(a.a2, a.a3, a.a4);
}

double fs_at(QParam q, cplx mu, const CaratheodoryTriple& t) {
  const auto p = p123_from_triple(t);
  const auto a = a234_from_p(p.p1, p.p2, p.p3, q);
  return functional_fs(a.a2, a.a3, mu);
}

void validate(const SearchResolution& r) {
  if (r.n_p1 < 1 || r.n_x_radius < 1 || r.n_x_angle < 1 || r.n_zc_angle < 1) {
    throw ParameterError("search resolution needs at least one point per axis");
  }
}

}  // namespace

SearchResult hankel_brute_force(QParam q, const SearchResolution& res) {
  validate(res);
  const std::array<Axis, 4> axes{Axis{0.0, 2.0, 0.0, res.n_p1, false},
                                 Axis{0.0, 1.0, 1.0, res.n_x_radius, false},
                                 Axis{0.0, kTwoPi, 0.0, res.n_x_angle, true},
                                 Axis{0.0, kTwoPi, 0.0, res.n_zc_angle, true}};
  const auto objective = [&](const std::array<double, 4>& v) {
    return hankel_at(q, triple_of(v[0], v[1], v[2], std::polar(1.0, v[3])));
  };
  const bool single = res.n_p1 == 1 && res.n_x_radius == 1 && res.n_x_angle == 1 &&
                      res.n_zc_angle == 1;
  const auto coarse = grid_max(axes, objective);
  SearchResult result;
  auto best = coarse;
  if (!single) {
    best = refine_max(axes, coarse, objective);
    result.coarse_warning = moved_more_than_a_cell(axes, coarse, best);

    // zc enters p3 linearly, so the circle should dominate the disk.
    const auto coarser = [](int n) { return std::max(2, n / 10); };
    const std::array<Axis, 5> disk_axes{
        Axis{0.0, 2.0, 0.0, coarser(res.n_p1), false},
        Axis{0.0, 1.0, 1.0, coarser(res.n_x_radius), false},
        Axis{0.0, kTwoPi, 0.0, coarser(res.n_x_angle), true},
        Axis{0.0, 1.0, 1.0, coarser(res.n_zc_angle), false},
        Axis{0.0, kTwoPi, 0.0, coarser(res.n_zc_angle), true}};
    const auto disk = grid_max(disk_axes, [&](const std::array<double, 5>& v) {
      return hankel_at(q, triple_of(v[0], v[1], v[2], std::polar(v[3], v[4])));
    });
    result.disk_check_ok = disk.value <= best.value * (1.0 + 1e-12);
  }
  result.max_value = best.value;
  result.argmax = triple_of(best.v[0], best.v[1], best.v[2], std::polar(1.0, best.v[3]));
  return result;
}

SearchResult fs_brute_force(QParam q, cplx mu, const SearchResolution& res) {
  validate(res);
  const std::array<Axis, 3> axes{Axis{0.0, 2.0, 0.0, res.n_p1, false},
                                 Axis{0.0, 1.0, 1.0, res.n_x_radius, false},
                                 Axis{0.0, kTwoPi, 0.0, res.n_x_angle, true}};
  const auto objective = [&](const std::array<double, 3>& v) {
    return fs_at(q, mu, triple_of(v[0], v[1], v[2], cplx{0.0}));
  };
  const bool single = res.n_p1 == 1 && res.n_x_radius == 1 && res.n_x_angle == 1;
  const auto coarse = grid_max(axes, objective);
  SearchResult result;
  auto best = coarse;
  if (!single) {
    best = refine_max(axes, coarse, objective);
    result.coarse_warning = moved_more_than_a_cell(axes, coarse, best);
  }
  result.max_value = best.value;
  result.argmax = triple_of(best.v[0], best.v[1], best.v[2], cplx{0.0});
  return result;
}

TripleFit fit_triple(cplx p1, cplx p2, cplx p3, double tol) {
  TripleFit fit;
  const double c = std::abs(p1);
  if (c > 2.0 + tol) return fit;
  const cplx rot = c > 0.0 ? std::conj(p1) / c : cplx{1.0};
  const cplx r2 = p2 * rot * rot;
  const cplx r3 = p3 * rot * rot * rot;
  const double cc = std::min(c, 2.0);
  const double d = 4.0 - cc * cc;

  if (d <= tol) {
    // p1 on the boundary forces p = (1 + e z)/(1 - e z): p2 = p3 = 2 after rotation.
    fit.ok = std::abs(2.0 * r2 - cc * cc) <= 4.0 * tol &&
             std::abs(4.0 * r3 - cc * cc * cc) <= 8.0 * tol;
    fit.triple = {cc, cplx{0.0}, cplx{0.0}};
    return fit;
  }
  cplx x = (2.0 * r2 - cc * cc) / d;
  fit.x_modulus = std::abs(x);
  if (fit.x_modulus > 1.0 + tol) return fit;
  if (fit.x_modulus > 1.0) x /= fit.x_modulus;
  const cplx numer = 4.0 * r3 - cc * cc * cc - 2.0 * d * cc * x + cc * d * x * x;
  const double denom = 2.0 * d * (1.0 - std::norm(x));
  if (denom <= tol) {
    fit.ok = std::abs(numer) <= 8.0 * tol;
    fit.triple = {cc, x, cplx{0.0}};
    return fit;
  }
  const cplx zc = numer / denom;
  fit.zc_modulus = std::abs(zc);
  fit.ok = std::abs(numer) <= denom * (1.0 + tol) + tol;
  fit.triple = {cc, x, fit.zc_modulus > 1.0 ? zc / fit.zc_modulus : zc};
  return fit;
}

}  // namespace qstar
