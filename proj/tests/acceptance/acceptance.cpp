// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "qstar/bounds.hpp"
#include "qstar/harness.hpp"
#include "qstar/hypq.hpp"
#include "qstar/starlike.hpp"

using namespace qstar;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr double kNeverExceeds = 1e-9;
constexpr double kAttains = 1e-3;
const QParam kNearOne(1.0 - 1e-6);

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double worst_margin(const SuiteReport& r, TheoremId id, std::size_t* count = nullptr) {
  double worst = INFINITY;
  std::size_t n = 0;
  for (const auto& c : r.certificates) {
    if (c.theorem_id != id) continue;
    worst = std::min(worst, c.margin);
    ++n;
  }
  if (count) *count = n;
  return worst;
}

Outcome closed_form_vs_grid() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_suite("sigma", kSeed, 25);
  const double seconds = elapsed_since(start);
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto& c : r.certificates) {
    if (c.theorem_id != TheoremId::order_grid_oracle) continue;
    worst = std::max(worst, c.lhs);
    ++n;
  }
  const bool ok = n == 75 && worst <= 1e-4 && seconds <= 60.0;
  return {ok, "max |grid - closed| = " + num(worst) + " over " + std::to_string(n) +
                  " (tol 1e-4), " + num(seconds) + " s (limit 60 s)"};
}

Outcome sandwich() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  double worst_lower = INFINITY, worst_upper = INFINITY;
  for (int k = 0; k < 100; ++k) {
    PhiParams p;
    do {
      p = PhiParams{u(rng), u(rng), 0.9 * u(rng), 0.05 + 0.9 * u(rng)};
    } while (!(p.theorem_valid() && p.a > 0.0 && p.a < 1.0));
    const double r = 0.05 + 0.95 * u(rng);
    const auto s = sigma_q_phi(p, r);
    const double cf = s.closed_form.value();
    worst_lower = std::min(worst_lower, cf - s.lower_bound.value());
    worst_upper = std::min(worst_upper, s.upper_bound - cf);
    if (!s.sandwich_holds(kNeverExceeds)) ++violations;
  }
  const auto inst = sigma_q_phi(PhiParams::make(0.5, 0.5, 0.25, 0.5), 1.0);
  const bool instance_ok = std::abs(inst.lower_bound.value() - 0.5) <= 1e-9 &&
                           std::abs(inst.upper_bound - 2.0 / 3.0) <= 1e-9;
  const bool ok = violations == 0 && instance_ok;
  return {ok, std::to_string(violations) + "/100 draws break lower <= closed <= upper; worst " +
                  "closed-lower = " + num(worst_lower) + ", worst upper-closed = " +
                  num(worst_upper) + "; instance lower = " + num(inst.lower_bound.value()) +
                  ", upper = " + num(inst.upper_bound) +
                  " (closed form " + num(inst.closed_form.value()) + ")"};
}

Outcome product_identity() {
  double worst = 0.0;
  for (double qv : {0.3, 0.5, 0.9}) {
    const QParam q(qv);
    const auto F = extremal_F_coeffs(q, 30);
    for (unsigned n = 2; n <= 30; ++n) {
      const double b = bieberbach_bound(q, n);
      worst = std::max(worst, std::abs(F.a(n).real() - b) / b + std::abs(F.a(n).imag()));
    }
  }
  double limit = 0.0;
  for (unsigned n = 2; n <= 10; ++n) {
    limit = std::max(limit, std::abs(bieberbach_bound(kNearOne, n) - n));
  }
  return {worst <= 1e-12 && limit <= 1e-3,
          "max relative |b_n - product| = " + num(worst) + " (tol 1e-12); at q = 1-1e-6 " +
              "max |bound - n| = " + num(limit) + " (tol 1e-3)"};
}

Outcome bieberbach_soundness() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_suite("bieberbach", kSeed, 500);
  const double seconds = elapsed_since(start);
  std::size_t n = 0;
  const double worst = worst_margin(r, TheoremId::coefficient_bound, &n);
  return {worst >= -kNeverExceeds && n == 500 * 9 && seconds <= 10.0,
          "min (bound - |a_n|) = " + num(worst) + " over " + std::to_string(n) +
              " coefficients (tol 1e-9), " + num(seconds) + " s (limit 10 s)"};
}

Outcome fekete_szego() {
  double worst_over = -INFINITY, worst_under = -INFINITY;
  for (double qv : {0.3, 0.5, 0.9}) {
    const QParam q(qv);
    for (cplx mu : {cplx{0.0}, cplx{0.5}, cplx{1.0}, cplx{(2.0 + qv) / (2.0 * (1.0 + qv))},
                    cplx{1.0, 1.0}}) {
      const double bound = fekete_szego_bound(q, mu).value;
      const double found = fs_brute_force(q, mu).max_value;
      worst_over = std::max(worst_over, found - bound);
      worst_under = std::max(worst_under, bound - found);
    }
  }
  double limit = 0.0;
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    limit = std::max(limit, std::abs(fekete_szego_bound(kNearOne, mu).value -
                                     std::max(1.0, std::abs(3.0 - 4.0 * mu))));
  }
  return {worst_over <= kNeverExceeds && worst_under <= kAttains && limit <= 1e-4,
          "max (search - bound) = " + num(worst_over) + " (tol 1e-9), max (bound - search) = " +
              num(worst_under) + " (tol 1e-3); q -> 1 error " + num(limit) + " (tol 1e-4)"};
}

Outcome hankel() {
  const auto start = std::chrono::steady_clock::now();
  double worst_over = -INFINITY, worst_under = -INFINITY;
  for (double qv : {0.3, 0.5, 0.9}) {
    const QParam q(qv);
    const double bound = hankel2_bound(q);
    const double found = hankel_brute_force(q).max_value;
    worst_over = std::max(worst_over, found - bound);
    worst_under = std::max(worst_under, bound - found);
  }
  const double seconds = elapsed_since(start);
  double g_point = 0.0;
  for (double qv : {0.3, 0.5, 0.9}) {
    const QParam q(qv);
    const auto a = a234_from_p(0.0, 2.0, 0.0, q);
    g_point = std::max(g_point,
                       std::abs(functional_h22(a.a2, a.a3, a.a4) - hankel2_bound(q)) /
                           hankel2_bound(q));
  }
  const double limit = std::abs(hankel2_bound(kNearOne) - 1.0);
  const bool ok = worst_over <= kNeverExceeds && worst_under <= kAttains && g_point <= 1e-12 &&
                  limit <= 1e-4 && seconds <= 60.0;
  return {ok, "max (search - bound) = " + num(worst_over) + " (tol 1e-9), max (bound - search) = " +
                  num(worst_under) + " (tol 1e-3); G point relative error " + num(g_point) +
                  "; q -> 1 error " + num(limit) + "; search " + num(seconds) + " s (limit 60 s)"};
}

Outcome lemmas() {
  const auto r = run_suite("lemmas", kSeed, 500);
  std::size_t n_quad = 0, n_sharp = 0, n_coeff = 0;
  const double quad = worst_margin(r, TheoremId::caratheodory_quadratic, &n_quad);
  const double sharp = worst_margin(r, TheoremId::caratheodory_quadratic_sharp, &n_sharp);
  const double coeff = worst_margin(r, TheoremId::caratheodory_coefficient, &n_coeff);
  // Sharpness: the extremal point reaches the bound exactly.
  double gap = 0.0;
  for (const auto& c : r.certificates) {
    if (c.theorem_id == TheoremId::caratheodory_quadratic_sharp) {
      gap = std::max(gap, std::abs(c.margin));
    }
  }
  const bool ok = r.failures == 0 && n_quad == 2500 && n_coeff == 500 && quad >= -1e-9 &&
                  sharp >= -1e-12 && coeff >= -1e-12 && gap <= 1e-12;
  return {ok, "quadratic min margin " + num(quad) + " over " + std::to_string(n_quad) +
                  "; sharpness gap " + num(gap) + " over " + std::to_string(n_sharp) +
                  "; |p_n| <= 2 min margin " + num(coeff) + " over " + std::to_string(n_coeff) +
                  " mixtures"};
}

Outcome containment() {
  const auto r = run_suite("containment", kSeed, 25);
  std::size_t members = 0, witnesses = 0;
  const double member_margin = worst_margin(r, TheoremId::containment_star_in_sq, &members);
  const double witness_margin = worst_margin(r, TheoremId::containment_witness, &witnesses);
  const bool ok = r.failures == 0 && members > 0 && witnesses == 1;
  return {ok, std::to_string(members) + " sampled S*_q members, min S_q margin " +
                  num(member_margin) + "; witness margin " + num(witness_margin) +
                  " (in S_q, outside S*_q)"};
}

Outcome classical_limit() {
  const double q = 0.999, big_a = 0.5;
  const double t = std::pow(q, big_a);
  const double v = sigma_q_phi(PhiParams::make(t, t, t, q), 1.0).closed_form.value();
  const double err = std::abs(v - (1.0 - big_a / 2.0));
  return {err <= 5e-3, "order " + num(v) + " vs 0.75, error " + num(err) + " (tol 5e-3)"};
}

Outcome determinism() {
  std::string differing;
  int n = 0;
  for (const auto& spec : suite_registry()) {
    const auto a = to_json(run_suite(spec.id, kSeed, 5), false);
    const auto b = to_json(run_suite(spec.id, kSeed, 5), false);
    if (a != b) differing += " " + spec.id;
    ++n;
  }
  return {differing.empty(), std::to_string(n) + " suites rerun with seed " +
                                 std::to_string(kSeed) +
                                 (differing.empty() ? ", byte-identical" : ", differ:" + differing)};
}

}  // namespace

int main() {
  report(1, "closed form vs grid oracle", closed_form_vs_grid);
  report(2, "sandwich bounds", sandwich);
  report(3, "recurrence/product identity", product_identity);
  report(4, "Bieberbach soundness", bieberbach_soundness);
  report(5, "Fekete-Szego", fekete_szego);
  report(6, "Hankel H2(2)", hankel);
  report(7, "Caratheodory lemmas", lemmas);
  report(8, "containment", containment);
  report(9, "classical limit of the order", classical_limit);
  report(10, "determinism", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
