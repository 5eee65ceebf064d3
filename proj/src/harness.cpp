#include "qstar/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include <json.hpp>

#include "qstar/errors.hpp"
#include "qstar/hypq.hpp"
#include "qstar/parallel.hpp"
#include "qstar/starlike.hpp"

namespace qstar {

namespace {

using Certificates = std::vector<BoundCertificate>;
using Params = std::map<std::string, double>;

constexpr int kRejectionCap = 10'000;
constexpr double kNeverExceeds = 1e-9;
constexpr double kAttains = 1e-3;
constexpr double kOracleAgreement = 1e-4;
constexpr double kExact = 1e-12;
constexpr double kLimitCoefficient = 1e-3;
constexpr double kLimitFeketeSzego = 1e-4;
constexpr double kLimitHankel = 1e-4;
constexpr double kLimitOrder = 5e-3;
constexpr double kMembership = 0.0;
constexpr double kNearOne = 1.0 - 1e-6;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::mt19937_64 case_rng(const std::string& suite, std::uint64_t seed, int index) {
  const std::uint64_t h = fnv1a(suite);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class Draw, class Accept>
auto rejection_sample(std::mt19937_64& rng, Draw draw, Accept accept) {
  for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
    auto candidate = draw(rng);
    if (accept(candidate)) return candidate;
  }
  throw ParameterError("rejection sampling exhausted its attempt cap");
}

// Valid parameters with s > 0, i.e. c < a < 1 and c < b < 1.
PhiParams draw_positive_s(std::mt19937_64& rng) {
  return rejection_sample(
      rng,
      [](std::mt19937_64& g) {
        const double q = uniform(g, 0.05, 0.95);
        const double c = uniform(g, 0.0, 0.9);
        const double a = uniform(g, 0.0, 1.0);
        const double b = uniform(g, 0.0, 1.0);
        return PhiParams{a, b, c, q};
      },
      [](const PhiParams& p) { return p.theorem_valid() && p.a < 1.0 && p.a > 0.0; });
}

Params phi_params(const PhiParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"q", p.q}};
}

// ---------------------------------------------------------------------------

Certificates sigma_case(std::mt19937_64& rng) {
  Certificates out;
  const PhiParams p = draw_positive_s(rng);
  const QParam q(p.q);
  for (double r : {0.5, 0.9, 0.95}) {
    Params params = phi_params(p);
    params["r"] = r;
    const auto report = sigma_q_phi(p, r);
    const double closed = report.closed_form.value();
    const double grid = sigma_q_grid(shifted_phi_series(p, r), q);
    out.push_back(BoundCertificate::make(TheoremId::order_grid_oracle, params,
                                         std::abs(grid - closed), kOracleAgreement, 0.0));
    out.push_back(BoundCertificate::make(TheoremId::order_lower_bound, params,
                                         report.lower_bound.value(), closed, kNeverExceeds));
    out.push_back(BoundCertificate::make(TheoremId::order_upper_bound, params, closed,
                                         report.upper_bound, kNeverExceeds));
    if (p.corollary_ordered()) {
      out.push_back(BoundCertificate::make(TheoremId::corollary_order, params,
                                           corollary_order(p, r), closed, kNeverExceeds));
    }
  }
  return out;
}

// Below q = 0.4 the bound b_10 passes 1e6 and an absolute 1e-9 tolerance is
// finer than the double spacing of the coefficients.
constexpr double kBieberbachMinQ = 0.4;

Certificates bieberbach_case(std::mt19937_64& rng) {
  Certificates out;
  const QParam q(uniform(rng, kBieberbachMinQ, 0.95));
  const auto mixture = CaratheodoryMixture::random(rng);
  constexpr std::size_t kN = 10;
  const auto f = coeffs_from_p(mixture.coefficients(kN - 1), q, kN);
  for (unsigned n = 2; n <= kN; ++n) {
    out.push_back(BoundCertificate::make(
        TheoremId::coefficient_bound,
        {{"q", q.value()}, {"n", n}, {"atoms", static_cast<double>(mixture.weights().size())}},
        std::abs(f.a(n)), bieberbach_bound(q, n), kNeverExceeds));
  }
  const auto extremal = extremal_F_coeffs(q, 30);
  double worst = 0.0;
  for (unsigned n = 2; n <= 30; ++n) {
    const double bound = bieberbach_bound(q, n);
    worst = std::max(worst, std::abs(extremal.a(n).real() - bound) / bound);
  }
  out.push_back(BoundCertificate::make(TheoremId::coefficient_product_identity,
                                       {{"q", q.value()}, {"n_max", 30}}, worst, kExact, 0.0));
  return out;
}

Certificates fs_case(std::mt19937_64& rng) {
  Certificates out;
  const QParam q(uniform(rng, 0.05, 0.95));
  const cplx mu{uniform(rng, -1.0, 2.0), uniform(rng, -1.0, 1.0)};
  const Params params{{"q", q.value()}, {"mu_re", mu.real()}, {"mu_im", mu.imag()}};
  const auto bound = fekete_szego_bound(q, mu);
  const auto search = fs_brute_force(q, mu);
  out.push_back(BoundCertificate::make(TheoremId::fekete_szego_sound, params,
                                       search.max_value, bound.value, kNeverExceeds));
  out.push_back(BoundCertificate::make(TheoremId::fekete_szego_attained, params, bound.value,
                                       search.max_value, kAttains));
  // The active extremal attains the bound exactly.
  const auto t = bound.active == FsBranch::F_extremal
                     ? CaratheodoryTriple{2.0, cplx{0.0}, cplx{0.0}}
                     : CaratheodoryTriple{0.0, cplx{1.0}, cplx{0.0}};
  const auto p = p123_from_triple(t);
  const auto a = a234_from_p(p.p1, p.p2, p.p3, q);
  Params extremal = params;
  extremal["branch_G"] = bound.active == FsBranch::G_extremal ? 1.0 : 0.0;
  out.push_back(BoundCertificate::make(TheoremId::fekete_szego_attained, extremal, bound.value,
                                       functional_fs(a.a2, a.a3, mu), kNeverExceeds));
  for (int k = 0; k < 8; ++k) {
    const auto m = CaratheodoryMixture::random(rng);
    const auto pc = m.coefficients(2);
    const auto am = a234_from_p(pc[0], pc[1], cplx{0.0}, q);
    out.push_back(BoundCertificate::make(TheoremId::fekete_szego_sound, params,
                                         functional_fs(am.a2, am.a3, mu), bound.value,
                                         kNeverExceeds));
  }
  return out;
}

Certificates hankel_case(std::mt19937_64& rng) {
  Certificates out;
  const QParam q(uniform(rng, 0.05, 0.95));
  const Params params{{"q", q.value()}};
  const double bound = hankel2_bound(q);
  const auto search = hankel_brute_force(q);
  Params found = params;
  // The other printed form of the bound, 4/(q^2(1+q^2)), kept for comparison.
  found["alternate_bound"] = 4.0 / (q.value() * q.value() * (1.0 + q.value() * q.value()));
  found["argmax_p1"] = search.argmax.p1;
  found["argmax_x_modulus"] = std::abs(search.argmax.x);
  out.push_back(BoundCertificate::make(TheoremId::hankel_sound, found, search.max_value, bound,
                                       kNeverExceeds));
  out.push_back(BoundCertificate::make(TheoremId::hankel_attained, found, bound,
                                       search.max_value, kAttains));
  const auto p = p123_from_triple({0.0, cplx{1.0}, cplx{1.0}});
  const auto a = a234_from_p(p.p1, p.p2, p.p3, q);
  out.push_back(BoundCertificate::make(TheoremId::hankel_g_point, params,
                                       std::abs(functional_h22(a.a2, a.a3, a.a4) - bound) / bound,
                                       kExact, 0.0));
  return out;
}

Certificates lemmas_case(std::mt19937_64& rng) {
  Certificates out;
  const auto m = CaratheodoryMixture::random(rng);
  const auto p = m.coefficients(20);
  const Params atoms{{"atoms", static_cast<double>(m.weights().size())}};
  for (double lambda : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    out.push_back(caratheodory_quadratic_check(p[0], p[1], lambda));
    // Sharpness: (1+z)/(1-z) saturates when |2 lambda - 1| >= 1, (1+z^2)/(1-z^2) otherwise.
    const bool use_f = std::abs(2.0 * lambda - 1.0) >= 1.0;
    const cplx e1 = use_f ? cplx{2.0} : cplx{0.0};
    const cplx e2{2.0};
    out.push_back(BoundCertificate::make(TheoremId::caratheodory_quadratic_sharp,
                                         {{"lambda", lambda}, {"extremal_F", use_f ? 1.0 : 0.0}},
                                         caratheodory_quadratic_bound(lambda),
                                         std::abs(e2 - lambda * e1 * e1), kExact));
  }
  double largest = 0.0;
  for (const cplx& c : p) largest = std::max(largest, std::abs(c));
  Params coeff = atoms;
  coeff["n_max"] = 20;
  out.push_back(BoundCertificate::make(TheoremId::caratheodory_coefficient, coeff, largest, 2.0,
                                       kExact));
  const auto fit = fit_triple(p[0], p[1], p[2]);
  const double used = fit.ok ? std::max(fit.x_modulus, fit.zc_modulus) : 2.0;
  out.push_back(
      BoundCertificate::make(TheoremId::caratheodory_triple, atoms, used, 1.0, kNeverExceeds));
  return out;
}

Certificates limits_case(std::mt19937_64& rng, int index) {
  Certificates out;
  const QParam near_one(kNearOne);
  switch (index % 4) {
    case 0: {
      const unsigned n = std::uniform_int_distribution<unsigned>(2, 10)(rng);
      out.push_back(BoundCertificate::make(
          TheoremId::limit_coefficient_bound, {{"q", kNearOne}, {"n", n}},
          std::abs(bieberbach_bound(near_one, n) - n), kLimitCoefficient, 0.0));
      break;
    }
    case 1: {
      const double mus[] = {0.0, 0.5, 1.0, 2.0};
      const double mu = mus[std::uniform_int_distribution<int>(0, 3)(rng)];
      const double classical = std::max(1.0, std::abs(3.0 - 4.0 * mu));
      out.push_back(BoundCertificate::make(
          TheoremId::limit_fekete_szego, {{"q", kNearOne}, {"mu", mu}},
          std::abs(fekete_szego_bound(near_one, mu).value - classical), kLimitFeketeSzego,
          0.0));
      break;
    }
    case 2:
      out.push_back(BoundCertificate::make(TheoremId::limit_hankel, {{"q", kNearOne}},
                                           std::abs(hankel2_bound(near_one) - 1.0), kLimitHankel,
                                           0.0));
      break;
    default: {
      const double big_a = uniform(rng, 0.1, 0.9);
      constexpr double q = 0.999;
      const double t = std::pow(q, big_a);
      const auto report = sigma_q_phi(PhiParams::make(t, t, t, q), 1.0);
      const double target = 1.0 - big_a / 2.0;
      const Params params{{"q", q}, {"A", big_a}, {"B", big_a}, {"C", big_a}, {"r", 1.0}};
      out.push_back(BoundCertificate::make(TheoremId::limit_gauss_order, params,
                                           std::abs(report.closed_form.value() - target), kLimitOrder,
                                           0.0));
      GridSpec circle{360, 1, 0.999, true};
      Params classical = params;
      classical["classical_grid"] = 1.0;
      classical["max_radius"] = circle.max_radius;
      out.push_back(BoundCertificate::make(
          TheoremId::limit_gauss_order, classical,
          std::abs(classical_order_grid(big_a, big_a, big_a, 1.0, circle) - target),
          kLimitOrder, 0.0));
      break;
    }
  }
  return out;
}

// Re w > 0 everywhere but w leaves the disk |w - 1/(1-q)| <= 1/(1-q).
constexpr double kWitnessQ = 0.7;
const cplx kWitnessCenter{1.8, 1.5};
constexpr double kWitnessRadius = 1.8;

Certificates containment_case(std::mt19937_64& rng, int index) {
  Certificates out;
  const GridSpec grid{180, 16, 0.99, true};
  const QParam q(uniform(rng, 0.1, 0.9));
  const double alpha = uniform(rng, 0.0, 0.5);
  const double radius = 1.0 / (1.0 - q.value());

  std::vector<std::pair<std::string, NormalizedFunction>> candidates;
  {
    // (w - alpha)/(1 - alpha) = R + R phi(z), phi a disk automorphism image
    // with phi(0) = -q, so w stays in the disk by construction.
    const double t = uniform(rng, 0.1, 0.95);
    const cplx e = std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi));
    const double qq = q.value();
    auto p = [=](cplx z) {
      const cplx psi = t * e * z;
      const cplx phi = (psi - qq) / (1.0 - qq * psi);
      return alpha + (1.0 - alpha) * (radius + radius * phi);
    };
    candidates.emplace_back("disk", kernel_function(q, p, "disk member"));
  }
  {
    const auto m = CaratheodoryMixture::random(rng);
    const double t = uniform(rng, 0.2, 0.8);
    candidates.emplace_back(
        "mixture", kernel_function(q, [m, t](cplx z) { return m(t * z); }, "damped mixture"));
  }
  {
    PhiParams p = draw_positive_s(rng);
    p.q = q.value();
    if (p.theorem_valid()) {
      candidates.emplace_back("phi", shifted_phi_function(p, uniform(rng, 0.3, 0.95)));
    }
  }
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& f = candidates[k].second;
    const auto star = in_Sq_star_alpha(f, q, alpha, grid);
    if (!star.member) continue;
    const auto sq = in_Sq_alpha(f, q, alpha, grid);
    out.push_back(BoundCertificate::make(
        TheoremId::containment_star_in_sq,
        {{"q", q.value()}, {"alpha", alpha}, {"candidate", static_cast<double>(k)},
         {"star_margin", star.margin}},
        alpha, alpha + sq.margin, kMembership));
  }
  if (index == 0) {
    const QParam wq(kWitnessQ);
    const auto f =
        kernel_function(wq, disk_kernel(kWitnessCenter, kWitnessRadius), "witness");
    const auto sq = in_Sq_alpha(f, wq, 0.0, grid);
    const auto star = in_Sq_star_alpha(f, wq, 0.0, grid);
    out.push_back(BoundCertificate::make(
        TheoremId::containment_witness,
        {{"q", kWitnessQ}, {"alpha", 0.0}, {"sq_margin", sq.margin},
         {"star_margin", star.margin}},
        std::max(star.margin, -sq.margin), 0.0, kMembership));
  }
  return out;
}

using CaseFn = std::function<Certificates(std::mt19937_64&, int)>;

struct SuiteEntry {
  SuiteSpec spec;
  CaseFn run;
};

const std::vector<SuiteEntry>& entries() {
  static const std::vector<SuiteEntry> table = {
      {{"sigma",
        {TheoremId::order_grid_oracle, TheoremId::order_lower_bound,
         TheoremId::order_upper_bound, TheoremId::corollary_order},
        "closed-form order vs grid infimum, and its lower and upper bounds",
        {{"grid_oracle", kOracleAgreement}, {"never_exceeds", kNeverExceeds}}},
       [](std::mt19937_64& g, int) { return sigma_case(g); }},
      {{"bieberbach",
        {TheoremId::coefficient_bound, TheoremId::coefficient_product_identity},
        "|a_n| <= product bound for random mixtures; product vs recurrence",
        {{"never_exceeds", kNeverExceeds}, {"identity_relative", kExact}}},
       [](std::mt19937_64& g, int) { return bieberbach_case(g); }},
      {{"fs",
        {TheoremId::fekete_szego_sound, TheoremId::fekete_szego_attained},
        "brute-force |a3 - mu a2^2| never exceeds the bound and attains it",
        {{"never_exceeds", kNeverExceeds}, {"attains", kAttains}}},
       [](std::mt19937_64& g, int) { return fs_case(g); }},
      {{"hankel",
        {TheoremId::hankel_sound, TheoremId::hankel_attained, TheoremId::hankel_g_point},
        "brute-force |a2 a4 - a3^2| against 4/(q^2(1+q)^2); exact value at the G point",
        {{"never_exceeds", kNeverExceeds}, {"attains", kAttains}, {"g_point_relative", kExact}}},
       [](std::mt19937_64& g, int) { return hankel_case(g); }},
      {{"lemmas",
        {TheoremId::caratheodory_triple, TheoremId::caratheodory_quadratic,
         TheoremId::caratheodory_quadratic_sharp, TheoremId::caratheodory_coefficient},
        "Caratheodory triple, |p2 - lambda p1^2| and |p_n| <= 2 on random mixtures",
        {{"never_exceeds", kNeverExceeds}, {"exact", kExact}}},
       [](std::mt19937_64& g, int) { return lemmas_case(g); }},
      {{"limits",
        {TheoremId::limit_coefficient_bound, TheoremId::limit_fekete_szego,
         TheoremId::limit_hankel, TheoremId::limit_gauss_order},
        "q -> 1 limits: n, max(1,|3-4mu|), 1 and 1 - A/2",
        {{"coefficient", kLimitCoefficient},
         {"fekete_szego", kLimitFeketeSzego},
         {"hankel", kLimitHankel},
         {"order", kLimitOrder}}},
       [](std::mt19937_64& g, int i) { return limits_case(g, i); }},
      {{"containment",
        {TheoremId::containment_star_in_sq, TheoremId::containment_witness},
        "S*_q(alpha) members pass the S_q(alpha) test; a witness separates the classes",
        {{"membership", kMembership}}},
       [](std::mt19937_64& g, int i) { return containment_case(g, i); }},
  };
  return table;
}

void append(SuiteReport& into, const std::string& suite, std::uint64_t seed, int n_cases,
            const CaseFn& run) {
  std::vector<Certificates> per_case(static_cast<std::size_t>(n_cases));
  detail::parallel_for(per_case.size(), [&](std::size_t i) {
    auto rng = case_rng(suite, seed, static_cast<int>(i));
    per_case[i] = run(rng, static_cast<int>(i));
  });
  for (auto& certs : per_case) {
    for (auto& c : certs) into.certificates.push_back(std::move(c));
  }
}

TheoremId theorem_from_string(const std::string& s) {
  for (TheoremId id : all_theorem_ids()) {
    if (to_string(id) == s) return id;
  }
  throw ParameterError("unknown theorem id '" + s + "'");
}

}  // namespace

const std::vector<SuiteSpec>& suite_registry() {
  static const std::vector<SuiteSpec> specs = [] {
    std::vector<SuiteSpec> out;
    for (const auto& e : entries()) out.push_back(e.spec);
    return out;
  }();
  return specs;
}

SuiteReport run_suite(const std::string& suite_id, std::uint64_t seed, int n_cases) {
  if (n_cases < 1) throw ParameterError("n_cases must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite_id = suite_id;
  report.seed = seed;
  report.n_cases = n_cases;
  bool found = false;
  for (const auto& e : entries()) {
    if (suite_id == "all" || suite_id == e.spec.id) {
      append(report, e.spec.id, seed, n_cases, e.run);
      found = true;
    }
  }
  if (!found) throw ParameterError("unknown suite '" + suite_id + "'");
  report.failures = static_cast<int>(std::count_if(
      report.certificates.begin(), report.certificates.end(),
      [](const BoundCertificate& c) { return !c.pass; }));
  report.wall_time_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

std::string to_json(const SuiteReport& report, bool include_wall_time, int indent) {
  nlohmann::ordered_json doc;
  doc["suite_id"] = report.suite_id;
  doc["seed"] = report.seed;
  doc["n_cases"] = report.n_cases;
  auto certs = nlohmann::ordered_json::array();
  for (const auto& c : report.certificates) {
    nlohmann::ordered_json j;
    j["theorem_id"] = to_string(c.theorem_id);
    j["params"] = c.params;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["margin"] = c.margin;
    j["verdict"] = c.pass ? "pass" : "fail";
    certs.push_back(std::move(j));
  }
  doc["certificates"] = std::move(certs);
  doc["failures"] = report.failures;
  if (include_wall_time) doc["wall_time_ms"] = report.wall_time_ms;
  return doc.dump(indent);
}

SuiteReport report_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  SuiteReport report;
  report.suite_id = doc.at("suite_id").get<std::string>();
  report.seed = doc.at("seed").get<std::uint64_t>();
  report.n_cases = doc.at("n_cases").get<int>();
  for (const auto& j : doc.at("certificates")) {
    BoundCertificate c;
    c.theorem_id = theorem_from_string(j.at("theorem_id").get<std::string>());
    c.params = j.at("params").get<std::map<std::string, double>>();
    c.lhs = j.at("lhs").get<double>();
    c.rhs = j.at("rhs").get<double>();
    c.margin = j.at("margin").get<double>();
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict != "pass" && verdict != "fail") {
      throw ParameterError("certificate verdict must be pass or fail");
    }
    c.pass = verdict == "pass";
    report.certificates.push_back(std::move(c));
  }
  report.failures = doc.at("failures").get<int>();
  if (doc.contains("wall_time_ms")) report.wall_time_ms = doc.at("wall_time_ms").get<double>();
  return report;
}

}  // namespace qstar
