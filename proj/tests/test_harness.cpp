#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include <json.hpp>

#include "qstar/errors.hpp"
#include "qstar/harness.hpp"

using namespace qstar;

namespace {

int count_failures(const SuiteReport& r) {
  return static_cast<int>(std::count_if(r.certificates.begin(), r.certificates.end(),
                                        [](const BoundCertificate& c) { return !c.pass; }));
}

std::vector<BoundCertificate> with_id(const SuiteReport& r, TheoremId id) {
  std::vector<BoundCertificate> out;
  for (const auto& c : r.certificates) {
    if (c.theorem_id == id) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("registry covers every claim") {
  std::set<TheoremId> covered;
  std::set<std::string> ids;
  for (const auto& spec : suite_registry()) {
    ids.insert(spec.id);
    CHECK_FALSE(spec.description.empty());
    covered.insert(spec.covers.begin(), spec.covers.end());
  }
  CHECK(ids == std::set<std::string>{"sigma", "bieberbach", "fs", "hankel", "lemmas", "limits",
                                     "containment"});
  for (auto id : all_theorem_ids()) {
    CAPTURE(to_string(id));
    CHECK(covered.count(id) == 1);
  }
}

TEST_CASE("run_suite rejects bad input") {
  CHECK_THROWS_AS(run_suite("nope", 1, 1), ParameterError);
  CHECK_THROWS_AS(run_suite("fs", 1, 0), ParameterError);
}

TEST_CASE("every certificate a suite emits is one the registry declares") {
  for (const auto& spec : suite_registry()) {
    const auto report = run_suite(spec.id, 3, 2);
    CHECK(report.n_cases == 2);
    CHECK(report.failures == count_failures(report));
    for (const auto& c : report.certificates) {
      CAPTURE(spec.id);
      CAPTURE(to_string(c.theorem_id));
      CHECK(std::find(spec.covers.begin(), spec.covers.end(), c.theorem_id) !=
            spec.covers.end());
      CHECK(c.params.count("tolerance") == 1);
      CHECK(c.pass == (c.margin >= -c.params.at("tolerance")));
    }
  }
}

TEST_CASE("reports are deterministic") {
  for (const char* id : {"bieberbach", "lemmas", "fs", "containment"}) {
    const auto a = to_json(run_suite(id, 17, 3), false);
    const auto b = to_json(run_suite(id, 17, 3), false);
    CHECK(a == b);
  }
  CHECK(to_json(run_suite("lemmas", 1, 2), false) != to_json(run_suite("lemmas", 2, 2), false));
}

TEST_CASE("case streams do not depend on n_cases") {
  // Certificates of the first cases are the same whether or not later cases run.
  const auto short_run = run_suite("bieberbach", 5, 2);
  const auto long_run = run_suite("bieberbach", 5, 4);
  REQUIRE(long_run.certificates.size() >= short_run.certificates.size());
  for (std::size_t k = 0; k < short_run.certificates.size(); ++k) {
    CHECK(short_run.certificates[k].lhs == long_run.certificates[k].lhs);
  }
}

TEST_CASE("JSON schema and round trip") {
  const auto report = run_suite("lemmas", 9, 2);
  const auto text = to_json(report);
  const auto doc = nlohmann::json::parse(text);
  for (const char* key : {"suite_id", "seed", "n_cases", "certificates", "failures",
                          "wall_time_ms"}) {
    CHECK(doc.contains(key));
  }
  REQUIRE(!doc["certificates"].empty());
  for (const char* key : {"theorem_id", "params", "lhs", "rhs", "margin", "verdict"}) {
    CHECK(doc["certificates"][0].contains(key));
  }
  const auto back = report_from_json(text);
  CHECK(back.suite_id == report.suite_id);
  CHECK(back.seed == report.seed);
  CHECK(back.failures == report.failures);
  REQUIRE(back.certificates.size() == report.certificates.size());
  for (std::size_t k = 0; k < back.certificates.size(); ++k) {
    CHECK(back.certificates[k].theorem_id == report.certificates[k].theorem_id);
    CHECK(back.certificates[k].lhs == report.certificates[k].lhs);
    CHECK(back.certificates[k].params == report.certificates[k].params);
    CHECK(back.certificates[k].pass == report.certificates[k].pass);
  }
  CHECK(to_json(back, false) == to_json(report, false));
  CHECK_FALSE(nlohmann::json::parse(to_json(report, false)).contains("wall_time_ms"));
  CHECK_THROWS(report_from_json("{}"));
}

TEST_CASE("limits suite hits the classical targets") {
  const auto report = run_suite("limits", 1, 4);
  CHECK(report.failures == 0);
  for (auto id : {TheoremId::limit_coefficient_bound, TheoremId::limit_fekete_szego,
                  TheoremId::limit_hankel, TheoremId::limit_gauss_order}) {
    CHECK_FALSE(with_id(report, id).empty());
  }
}

TEST_CASE("sigma suite: oracle and lower bound pass, the upper bound does not") {
  const auto report = run_suite("sigma", 1, 25);
  const auto oracle = with_id(report, TheoremId::order_grid_oracle);
  CHECK(oracle.size() == 75);
  for (const auto& c : oracle) CHECK(c.pass);
  for (const auto& c : with_id(report, TheoremId::order_lower_bound)) CHECK(c.pass);
  for (const auto& c : with_id(report, TheoremId::corollary_order)) CHECK(c.pass);
  const auto upper = with_id(report, TheoremId::order_upper_bound);
  const auto violated = std::count_if(upper.begin(), upper.end(),
                                      [](const BoundCertificate& c) { return !c.pass; });
  // Documented counterexample: the stated upper bound is violated on a
  // sizable share of draws.
  CHECK(violated > 0);
  CHECK(report.failures == violated);
}

TEST_CASE("hankel suite: the G point attains the bound but brute force exceeds it") {
  const auto report = run_suite("hankel", 1, 5);
  for (const auto& c : with_id(report, TheoremId::hankel_g_point)) CHECK(c.pass);
  for (const auto& c : with_id(report, TheoremId::hankel_attained)) CHECK(c.pass);
  const auto sound = with_id(report, TheoremId::hankel_sound);
  CHECK(sound.size() == 5);
  for (const auto& c : sound) {
    CHECK_FALSE(c.pass);
    CHECK(c.params.at("argmax_p1") == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("remaining suites pass") {
  for (const char* id : {"bieberbach", "fs", "lemmas", "containment"}) {
    CAPTURE(id);
    const auto report = run_suite(id, 1, 6);
    CHECK(report.failures == 0);
    CHECK_FALSE(report.certificates.empty());
  }
  const auto containment = run_suite("containment", 1, 6);
  CHECK(with_id(containment, TheoremId::containment_witness).size() == 1);
  CHECK(with_id(containment, TheoremId::containment_star_in_sq).size() >= 6);
}
