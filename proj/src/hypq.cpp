#include "qstar/hypq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "qstar/errors.hpp"

namespace qstar {

namespace {

constexpr std::size_t kMaxTerms = 50'000'000;
constexpr std::size_t kTailWarmup = 20;

// 1 - base * q^j without cancellation when base * q^j is close to 1.
double one_minus_scaled(double base, double j, double log_q) {
  if (base == 0.0) return 1.0;
  return -std::expm1(std::log(base) + j * log_q);
}

// phi_coefficient(p, n + 1) / phi_coefficient(p, n).
double coefficient_step(const PhiParams& p, double log_q, std::size_t n) {
  const double j = static_cast<double>(n);
  return one_minus_scaled(p.a, j, log_q) * one_minus_scaled(p.b, j, log_q) /
         (one_minus_scaled(p.c, j, log_q) * one_minus_scaled(1.0, j + 1.0, log_q));
}

// Keeps the largest term ratio seen over the last kTailWarmup terms; the
// geometric tail |t_n| * rho / (1 - rho) uses that ceiling, floored by the
// asymptotic ratio of the series.
class TailMonitor {
 public:
  explicit TailMonitor(double asymptotic_ratio) : floor_(asymptotic_ratio) {}

  void push(double ratio) {
    window_[count_ % window_.size()] = ratio;
    ++count_;
  }

  /// True once the estimated tail after a term of size |term| falls below
  /// threshold.
  bool converged(double term, double threshold) const {
    if (count_ < kTailWarmup) return false;
    double ceiling = floor_;
    for (double r : window_) ceiling = std::max(ceiling, r);
    if (!(ceiling < 1.0)) return false;
    return term * ceiling / (1.0 - ceiling) <= threshold;
  }

 private:
  std::array<double, kTailWarmup> window_{};
  std::size_t count_ = 0;
  double floor_;
};

[[noreturn]] void throw_no_convergence(const char* what) {
  throw DomainError(std::string(what) + ": series did not converge within the term cap");
}

void require_inside_disk(cplx z) {
  if (!(std::abs(z) < 1.0)) {
    std::ostringstream os;
    os << "series diverges for |z| >= 1 (|z| = " << std::abs(z) << ")";
    throw DomainError(os.str());
  }
}

void require_tolerance(double tol) {
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
}

double threshold_for(double tol, cplx partial) {
  return tol * std::max(std::abs(partial), std::numeric_limits<double>::min());
}

PhiSum sum_direct(const PhiParams& p, cplx z, double tol) {
  const double log_q = std::log(p.q);
  const double abs_z = std::abs(z);
  TailMonitor tail(abs_z);
  cplx sum{1.0};
  double coeff = 1.0;
  cplx power{1.0};
  if (z == cplx{0.0}) return {sum, 1, Summation::direct};
  for (std::size_t n = 0; n < kMaxTerms; ++n) {
    const double step = coefficient_step(p, log_q, n);
    coeff *= step;
    power *= z;
    const cplx term = coeff * power;
    sum += term;
    if (coeff == 0.0) return {sum, n + 2, Summation::direct};
    tail.push(std::abs(step) * abs_z);
    if (tail.converged(std::abs(term), threshold_for(tol, sum))) {
      return {sum, n + 2, Summation::direct};
    }
  }
  throw_no_convergence("phi_eval");
}

PhiSum sum_limit_subtracted(const PhiParams& p, cplx z, double tol) {
  const double log_q = std::log(p.q);
  const double abs_z = std::abs(z);
  const double limit = phi_coefficient_limit(p);
  cplx sum = limit / (1.0 - z);
  TailMonitor tail(p.q * abs_z);
  double coeff = 1.0;
  cplx power{1.0};
  double previous = std::abs(coeff - limit);
  sum += coeff - limit;
  // Once every factor of the remaining product is 1 + O(q^j), the differences
  // c_n - C sink into rounding noise and their observed ratios stop meaning
  // anything. |c_m / C - 1| <= 4 k q^m / (1 - q) with k = a + b + c + 1 bounds
  // the rest of the series instead.
  const double k = p.a + p.b + p.c + 1.0;
  const double largest = std::max({p.a, p.b, p.c, 1.0});
  for (std::size_t n = 0; n < kMaxTerms; ++n) {
    coeff *= coefficient_step(p, log_q, n);
    power *= z;
    const double d = coeff - limit;
    const cplx term = d * power;
    sum += term;
    const double size = std::abs(d);
    if (previous > 0.0) tail.push(size / previous * abs_z);
    previous = size;
    if (size == 0.0 && coeff == 0.0) return {sum, n + 2, Summation::limit_subtracted};
    const double q_next = std::exp((static_cast<double>(n) + 2.0) * log_q);
    if (largest * q_next <= 0.5 &&
        std::abs(limit) * 4.0 * k * q_next / ((1.0 - p.q) * (1.0 - p.q)) <=
            threshold_for(tol, sum)) {
      return {sum, n + 2, Summation::limit_subtracted};
    }
    if (tail.converged(std::abs(term), threshold_for(tol, sum))) {
      return {sum, n + 2, Summation::limit_subtracted};
    }
  }
  throw_no_convergence("phi_eval");
}

constexpr double kAffordableDirectTerms = 2e6;
constexpr double kLargeLimit = 1e3;

Summation choose_mode(const PhiParams& p, cplx z, double tol) {
  const double abs_z = std::abs(z);
  if (abs_z == 0.0) return Summation::direct;
  const double log_tol = std::log(std::min(tol, 0.5));
  const double direct_terms = log_tol / std::log(abs_z);
  const double split_terms = log_tol / std::log(p.q);
  if (direct_terms <= 500.0 || direct_terms <= 2.0 * split_terms) return Summation::direct;
  // A large limit C cancels against the (c_n - C) terms and costs about
  // eps * |C| of absolute accuracy; pay for the longer direct sum instead
  // while it stays affordable.
  if (direct_terms <= kAffordableDirectTerms &&
      std::abs(phi_coefficient_limit(p)) > kLargeLimit) {
    return Summation::direct;
  }
  return Summation::limit_subtracted;
}

}  // namespace

PhiParams PhiParams::make(double a, double b, double c, double q) {
  const QParam checked(q);
  for (auto [name, v] : {std::pair{"a", a}, std::pair{"b", b}, std::pair{"c", c}}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ParameterError(std::string(name) + " must be a non-negative real");
    }
  }
  if (!(c < 1.0 / checked.value())) {
    throw ParameterError("c must satisfy c < 1/q so that (c;q)_n stays nonzero");
  }
  if (c == 1.0) throw ParameterError("c = 1 makes (c;q)_n vanish");
  return PhiParams{a, b, c, checked.value()};
}

bool PhiParams::theorem_valid() const noexcept {
  return 0.0 < 1.0 - a * q && 1.0 - a * q < 1.0 - c * q && 0.0 < 1.0 - b &&
         1.0 - b < 1.0 - c;
}

bool PhiParams::corollary_ordered() const noexcept {
  return a < 1.0 && a >= b && b >= c && c >= 0.0 && a > 0.0;
}

std::string PhiParams::theorem_violation() const {
  if (!(0.0 < 1.0 - a * q)) return "requires 1 - a q > 0 (a < 1/q)";
  if (!(1.0 - a * q < 1.0 - c * q)) return "requires 1 - a q < 1 - c q (c < a)";
  if (!(0.0 < 1.0 - b)) return "requires 1 - b > 0 (b < 1)";
  if (!(1.0 - b < 1.0 - c)) return "requires 1 - b < 1 - c (c < b)";
  return {};
}

double PhiParams::s() const {
  if (a == 0.0) throw ParameterError("s = q(1-a)/(a(1-q)) is undefined at a = 0");
  return q * (1.0 - a) / (a * (1.0 - q));
}

PhiParams PhiParams::shifted() const { return PhiParams{a * q, b * q, c * q, q}; }

double phi_coefficient(const PhiParams& p, std::size_t n) {
  const double log_q = std::log(p.q);
  double coeff = 1.0;
  for (std::size_t j = 0; j < n; ++j) coeff *= coefficient_step(p, log_q, j);
  return coeff;
}

double phi_coefficient_limit(const PhiParams& p) {
  const double log_q = std::log(p.q);
  const double eps = std::numeric_limits<double>::epsilon();
  const double largest = std::max({p.a, p.b, p.c, 1.0});
  const double k = 2.0 * (p.a + p.b + p.c + 1.0);
  double product = 1.0;
  for (std::size_t j = 0; j < kMaxTerms; ++j) {
    product *= coefficient_step(p, log_q, j);
    if (product == 0.0) return 0.0;
    // The remaining factors multiply to 1 + O(k q^(j+1) / (1 - q)).
    const double q_next = std::exp((static_cast<double>(j) + 1.0) * log_q);
    if (largest * q_next <= 0.5 && k * q_next / (1.0 - p.q) < 0.1 * eps) {
      return product;
    }
  }
  throw_no_convergence("phi_coefficient_limit");
}

PhiSum phi_sum(const PhiParams& p, cplx z, double tol, Summation mode) {
  require_tolerance(tol);
  require_inside_disk(z);
  if (mode == Summation::automatic) mode = choose_mode(p, z, tol);
  return mode == Summation::limit_subtracted ? sum_limit_subtracted(p, z, tol)
                                             : sum_direct(p, z, tol);
}

cplx phi_eval(const PhiParams& p, cplx z, double tol) {
  return phi_sum(p, z, tol).value;
}

cplx phi_partial_sum(const PhiParams& p, cplx z, std::size_t n_terms) {
  const double log_q = std::log(p.q);
  cplx sum{0.0};
  double coeff = 1.0;
  cplx power{1.0};
  for (std::size_t n = 0; n < n_terms; ++n) {
    sum += coeff * power;
    coeff *= coefficient_step(p, log_q, n);
    power *= z;
  }
  return sum;
}

namespace {

// (Phi[aq, b; c; q, z] - Phi[a, b; c; q, z]) / z summed term by term; the
// n-th coefficient difference is a (1 - q^n) (aq;q)_{n-1} (b;q)_n / ((c;q)_n (q;q)_n).
cplx bracket_over_z(const PhiParams& p, cplx z) {
  const double log_q = std::log(p.q);
  const double eps = std::numeric_limits<double>::epsilon();
  // n = 1 term: a (1 - q) (1 - b) / ((1 - c)(1 - q)).
  double coeff = p.a * (1.0 - p.b) / (1.0 - p.c);
  cplx sum = coeff;
  cplx power{1.0};
  for (std::size_t n = 1; n < 200; ++n) {
    const double j = static_cast<double>(n);
    // coefficient(n + 1) / coefficient(n)
    coeff *= one_minus_scaled(p.a, j, log_q) * one_minus_scaled(p.b, j, log_q) /
             (one_minus_scaled(p.c, j, log_q) * one_minus_scaled(1.0, j, log_q));
    power *= z;
    const cplx term = coeff * power;
    sum += term;
    if (std::abs(term) <= eps * std::abs(sum) * 1e-2) break;
  }
  return sum;
}

}  // namespace

cplx phi_ratio_shifted(const PhiParams& p, cplx z) {
  if (!(p.theorem_valid() || p.corollary_ordered())) {
    throw ParameterError("phi_ratio_shifted: " + p.theorem_violation());
  }
  if (p.a == 0.0) throw ParameterError("phi_ratio_shifted: a must be positive");
  constexpr double tol = 1e-15;
  const cplx base = phi_eval(p, z, tol);
  if (std::abs(base) < 1e-13) {
    throw DomainError("phi_ratio_shifted: Phi[a,b;c;q,z] vanishes numerically");
  }
  const cplx direct = phi_eval(p.shifted(), z, tol) / base;

  const double scale = (1.0 - p.c) / (p.a * (1.0 - p.b));
  cplx contiguous;
  if (std::abs(z) < 1e-4) {
    contiguous = scale * bracket_over_z(p, z) / base;
  } else {
    const PhiParams raised{p.a * p.q, p.b, p.c, p.q};
    contiguous = scale / z * (phi_eval(raised, z, tol) / base - 1.0);
  }
  const double gap = std::abs(direct - contiguous);
  if (gap > 1e-8 * std::max(std::abs(direct), 1e-300)) {
    std::ostringstream os;
    os << "phi_ratio_shifted: direct quotient " << direct
       << " and contiguous relation " << contiguous << " disagree";
    throw ConsistencyError(os.str());
  }
  return direct;
}

cplx gauss_2f1(double a, double b, double c, cplx z, double tol) {
  require_tolerance(tol);
  const auto nonpositive_integer = [](double v) {
    return v <= 0.0 && v == std::floor(v);
  };
  if (nonpositive_integer(c)) {
    // Allowed only if a numerator parameter -m with m < -c terminates the
    // series before (c)_n reaches zero.
    const auto terminates = [&](double v) { return nonpositive_integer(v) && v > c; };
    if (!(terminates(a) || terminates(b))) {
      throw DomainError("gauss_2f1: c is zero or a negative integer");
    }
  }
  require_inside_disk(z);
  const double abs_z = std::abs(z);
  TailMonitor tail(abs_z);
  cplx sum{1.0};
  cplx term{1.0};
  if (z == cplx{0.0}) return sum;
  for (std::size_t n = 0; n < kMaxTerms; ++n) {
    const double k = static_cast<double>(n);
    const double step = (a + k) * (b + k) / ((c + k) * (k + 1.0));
    term *= step * z;
    sum += term;
    if (step == 0.0) return sum;
    tail.push(std::abs(step) * abs_z);
    if (tail.converged(std::abs(term), threshold_for(tol, sum))) return sum;
  }
  throw_no_convergence("gauss_2f1");
}

namespace {

struct ShiftedTable {
  double r = 1.0;
  double limit = 0.0;          // coefficient limit C (limit-subtracted form only)
  bool subtract_limit = false;
  std::vector<double> coeffs;  // c_n or c_n - C, already multiplied by r^n

  cplx operator()(cplx z) const {
    const cplx w = r * z;
    if (!(std::abs(w) < 1.0)) {
      throw DomainError("shifted phi evaluated outside its disk of convergence");
    }
    cplx acc{0.0};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    if (subtract_limit) acc += limit / (1.0 - w);
    return acc;
  }
};

std::vector<double> scaled_coefficients(const PhiParams& p, double r, double limit,
                                        double asymptotic_ratio, double tol) {
  const double log_q = std::log(p.q);
  std::vector<double> out;
  TailMonitor tail(asymptotic_ratio);
  double coeff = 1.0;
  double power = 1.0;
  double previous = std::abs(coeff - limit);
  out.push_back(coeff - limit);
  for (std::size_t n = 0; n < kMaxTerms; ++n) {
    coeff *= coefficient_step(p, log_q, n);
    power *= r;
    const double d = coeff - limit;
    out.push_back(d * power);
    const double size = std::abs(d);
    if (previous > 0.0) tail.push(size / previous * r);
    previous = size;
    if (coeff == 0.0 && size == 0.0) break;
    if (tail.converged(size * power, tol)) break;
  }
  return out;
}

}  // namespace

NormalizedFunction shifted_phi_function(const PhiParams& p, double r, double tol) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("radius r must lie in (0, 1]");
  require_tolerance(tol);
  auto table = std::make_shared<ShiftedTable>();
  table->r = r;
  const double log_tol = std::log(std::min(tol, 0.5));
  const bool direct = r < 1.0 && log_tol / std::log(r) < 200'000.0;
  if (direct) {
    table->coeffs = scaled_coefficients(p, r, 0.0, r, tol);
  } else {
    table->subtract_limit = true;
    table->limit = phi_coefficient_limit(p);
    table->coeffs = scaled_coefficients(p, r, table->limit, p.q * r, tol);
  }
  std::ostringstream label;
  label << "z*Phi[" << p.a << "," << p.b << ";" << p.c << ";" << p.q << "," << r << "z]";
  return NormalizedFunction([table](cplx z) { return (*table)(z); }, label.str());
}

NormalizedSeries shifted_phi_series(const PhiParams& p, double r, double tol) {
  if (!(r > 0.0 && r < 1.0)) {
    throw ParameterError("shifted_phi_series needs 0 < r < 1; use shifted_phi_function at r = 1");
  }
  require_tolerance(tol);
  const auto real = scaled_coefficients(p, r, 0.0, r, tol);
  std::vector<cplx> coeffs(real.begin(), real.end());
  return NormalizedSeries(std::move(coeffs));
}

}  // namespace qstar
