#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qstar/qcore.hpp"

namespace qstar {

// ---------------------------------------------------------------------------
// Caratheodory class parametrizations
// ---------------------------------------------------------------------------

/// (p1, x, zc) with p1 in [0, 2], |x| <= 1, |zc| <= 1. Parametrizes the first
/// three coefficients of every p in the Caratheodory class after a rotation
/// making p1 real and non-negative.
struct CaratheodoryTriple {
  double p1 = 0.0;
  cplx x{0.0};
  cplx zc{0.0};

  static CaratheodoryTriple make(double p1, cplx x, cplx zc);
};

struct P123 {
  cplx p1, p2, p3;
};

/// p2 = (p1^2 + x (4 - p1^2)) / 2,
/// p3 = (p1^3 + 2(4 - p1^2) p1 x - p1 (4 - p1^2) x^2 + 2 (4 - p1^2)(1 - |x|^2) zc) / 4.
P123 p123_from_triple(const CaratheodoryTriple& t);

/// p(z) = sum_k w_k (1 + e_k z) / (1 - e_k z) with weights summing to one and
/// unimodular e_k. Its coefficients are p_n = 2 sum_k w_k e_k^n.
class CaratheodoryMixture {
 public:
  CaratheodoryMixture(std::vector<double> weights, std::vector<cplx> phases);

  /// 1 to max_atoms atoms, weights from normalized uniform draws, phases
  /// uniform on the circle.
  static CaratheodoryMixture random(std::mt19937_64& rng, int max_atoms = 8);

  cplx coefficient(unsigned n) const;
  /// p_1 .. p_count.
  std::vector<cplx> coefficients(std::size_t count) const;
  cplx operator()(cplx z) const;

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<cplx>& phases() const noexcept { return phases_; }

 private:
  std::vector<double> weights_;
  std::vector<cplx> phases_;
};

// ---------------------------------------------------------------------------
// Coefficients of f with z D_q f / f = p
// ---------------------------------------------------------------------------

/// Forward substitution of ([n]_q - 1) a_n = sum_{k<n} p_{n-k} a_k with a_1 = 1.
/// p_coeffs holds p_1 .. p_{N-1} (more entries are ignored).
NormalizedSeries coeffs_from_p(std::span<const cplx> p_coeffs, QParam q, std::size_t n);

struct A234 {
  cplx a2, a3, a4;
};

/// Closed forms for a_2, a_3, a_4 in terms of p_1, p_2, p_3.
A234 a234_from_p(cplx p1, cplx p2, cplx p3, QParam q);

/// prod_{j=2}^n ([j-1]_q + 1) / ([j]_q - 1).
double bieberbach_bound(QParam q, unsigned n);

/// Coefficients of F with z D_q F / F = (1 + z)/(1 - z), from the recurrence
/// ([n]_q - 1) b_n = 2 sum_{k<n} b_k.
NormalizedSeries extremal_F_coeffs(QParam q, std::size_t n);
/// Coefficients of G with z D_q G / G = (1 + z^2)/(1 - z^2).
NormalizedSeries extremal_G_coeffs(QParam q, std::size_t n);

/// f with z D_q f / f = p, from f(z)/z = prod_{k>=0} q / (1 - (1-q) p(q^k z)).
/// Meromorphic in the disk wherever p takes the value 1/(1-q).
NormalizedFunction kernel_function(QParam q, std::function<cplx(cplx)> p, std::string label);
NormalizedFunction extremal_F_function(QParam q);
NormalizedFunction extremal_G_function(QParam q);

/// Caratheodory function mapping the disk onto the disk |w - center| < radius
/// with p(0) = 1. Needs |1 - center| < radius and Re(center) >= radius.
std::function<cplx(cplx)> disk_kernel(cplx center, double radius);

// ---------------------------------------------------------------------------
// Bounds and functionals
// ---------------------------------------------------------------------------

enum class FsBranch { F_extremal, G_extremal };

struct FsBound {
  double value = 0.0;
  FsBranch active = FsBranch::F_extremal;
};

/// max{ |2(2+q) - 4 mu (1+q)| / (q^2 (1+q)),  2 / (q (1+q)) }.
FsBound fekete_szego_bound(QParam q, cplx mu);

/// 4 / (q^2 (1+q)^2).
double hankel2_bound(QParam q);

/// |a3 - mu a2^2|
double functional_fs(cplx a2, cplx a3, cplx mu);
/// |a2 a4 - a3^2|
double functional_h22(cplx a2, cplx a3, cplx a4);

/// 2 max{1, |2 lambda - 1|}, the bound on |p2 - lambda p1^2| over the
/// Caratheodory class.
double caratheodory_quadratic_bound(double lambda);

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

enum class TheoremId {
  order_grid_oracle,
  order_lower_bound,
  order_upper_bound,
  corollary_order,
  coefficient_bound,
  coefficient_product_identity,
  fekete_szego_sound,
  fekete_szego_attained,
  hankel_sound,
  hankel_attained,
  hankel_g_point,
  caratheodory_triple,
  caratheodory_quadratic,
  caratheodory_quadratic_sharp,
  caratheodory_coefficient,
  limit_coefficient_bound,
  limit_fekete_szego,
  limit_hankel,
  limit_gauss_order,
  containment_star_in_sq,
  containment_witness,
};

std::string to_string(TheoremId id);
std::vector<TheoremId> all_theorem_ids();

/// lhs <= rhs claim with margin = rhs - lhs; passes iff margin >= -tolerance.
/// The tolerance is stored in params under "tolerance".
struct BoundCertificate {
  TheoremId theorem_id{};
  std::map<std::string, double> params;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;

  static BoundCertificate make(TheoremId id, std::map<std::string, double> params,
                               double lhs, double rhs, double tolerance);
};

/// |p2 - lambda p1^2| <= 2 max{1, |2 lambda - 1|}, tolerance 1e-9.
BoundCertificate caratheodory_quadratic_check(cplx p1, cplx p2, double lambda);

// ---------------------------------------------------------------------------
// Brute-force extremal oracles
// ---------------------------------------------------------------------------

/// Grid over p1 in [0, 2], x = rho e^{i theta} and zc = e^{i phi} on the unit
/// circle. Axes with one point sit at p1 = 0, |x| = 1, angle 0; when every
/// axis has a single point the search evaluates that point only.
struct SearchResolution {
  int n_p1 = 41;
  int n_x_radius = 21;
  int n_x_angle = 72;
  int n_zc_angle = 36;
};

struct SearchResult {
  double max_value = 0.0;
  CaratheodoryTriple argmax;
  /// Refinement moved the optimum by more than one coarse cell.
  bool coarse_warning = false;
  /// Full-disk spot check for zc never beat the circle search (Hankel only).
  bool disk_check_ok = true;
};

SearchResult hankel_brute_force(QParam q, const SearchResolution& resolution = {});
SearchResult fs_brute_force(QParam q, cplx mu, const SearchResolution& resolution = {});

/// Rotates p so that p1 >= 0 and solves the triple relations for (x, zc). Returns the
/// triple when one exists within tol (|x| <= 1 + tol, |zc| <= 1 + tol).
struct TripleFit {
  bool ok = false;
  CaratheodoryTriple triple;
  double x_modulus = 0.0;
  double zc_modulus = 0.0;
};
TripleFit fit_triple(cplx p1, cplx p2, cplx p3, double tol = 1e-9);

}  // namespace qstar
