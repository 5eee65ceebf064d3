#include "qstar/qcore.hpp"

#include <cmath>
#include <utility>

#include "qstar/errors.hpp"

namespace qstar {

QParam::QParam(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ParameterError("q must satisfy 0 < q < 1, got " + std::to_string(q));
  }
}

double q_bracket(unsigned n, QParam q) {
  // Summing 1 + q + ... + q^{n-1} avoids the cancellation in 1 - q^n as q -> 1.
  double sum = 0.0;
  double power = 1.0;
  for (unsigned j = 0; j < n; ++j) {
    sum += power;
    power *= q.value();
  }
  return sum;
}

double q_pochhammer(double a, QParam q, unsigned n) {
  double product = 1.0;
  double aq = a;
  for (unsigned j = 0; j < n; ++j) {
    product *= 1.0 - aq;
    aq *= q.value();
  }
  return product;
}

NormalizedSeries::NormalizedSeries(std::vector<cplx> coeffs)
    : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw ParameterError("normalized series needs at least a_1");
  }
  if (coeffs_.front() != cplx{1.0, 0.0}) {
    throw ParameterError("normalized series must have a_1 = 1");
  }
}

cplx NormalizedSeries::quotient(cplx z) const {
  cplx acc{0.0};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * z + *it;
  }
  return acc;
}

cplx NormalizedSeries::operator()(cplx z) const { return z * quotient(z); }

NormalizedFunction::NormalizedFunction(Quotient g, std::string label)
    : g_(std::move(g)), label_(std::move(label)) {}

NormalizedFunction NormalizedFunction::from_series(NormalizedSeries f) {
  return NormalizedFunction(
      [series = std::move(f)](cplx z) { return series.quotient(z); },
      "series");
}

cplx q_derivative_at(const std::function<cplx(cplx)>& f, cplx z, QParam q) {
  if (z == cplx{0.0}) {
    throw DomainError(
        "q-derivative at z = 0 needs f'(0); pass the function as a series");
  }
  return (f(z) - f(q.value() * z)) / (z * (1.0 - q.value()));
}

cplx q_derivative_at(const NormalizedSeries& f, cplx z, QParam q) {
  // Evaluated from the derivative series so that z = 0 gives a_1 and small z
  // does not suffer from the divided difference.
  const auto d = q_derivative_series(f, q);
  cplx acc{0.0};
  for (auto it = d.rbegin(); it != d.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<cplx> q_derivative_series(const NormalizedSeries& f, QParam q) {
  std::vector<cplx> out;
  out.reserve(f.size());
  for (std::size_t n = 1; n <= f.size(); ++n) {
    out.push_back(q_bracket(static_cast<unsigned>(n), q) * f.a(n));
  }
  return out;
}

}  // namespace qstar
