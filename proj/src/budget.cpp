#include "govkit/budget.hpp"

#include <cmath>
#include <string>

#include "govkit/error.hpp"

namespace govkit::repro {

namespace {

void check_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    throw Error(ErrorCode::domain_error, std::string(name) + " must lie in (0, 1), got " + std::to_string(x));
  }
}

}  // namespace

double epsilon_bound(std::uint64_t n, double alpha) {
  if (n == 0) throw Error(ErrorCode::domain_error, "trial count must be at least 1");
  check_unit(alpha, "alpha");
  return -std::expm1(std::log(alpha) / static_cast<double>(n));
}

std::uint64_t required_budget(double epsilon, double alpha) {
  check_unit(epsilon, "epsilon");
  check_unit(alpha, "alpha");
  // Closed-form start, then settle on the exact boundary of the bound.
  double guess = std::ceil(std::log(alpha) / std::log1p(-epsilon));
  std::uint64_t n = guess < 1.0 ? 1 : static_cast<std::uint64_t>(guess);
  while (n > 1 && epsilon_bound(n - 1, alpha) <= epsilon) --n;
  while (epsilon_bound(n, alpha) > epsilon) ++n;
  return n;
}

std::uint64_t approximate_budget(double epsilon, double alpha) {
  check_unit(epsilon, "epsilon");
  check_unit(alpha, "alpha");
  return static_cast<std::uint64_t>(std::ceil(std::log(1.0 / alpha) / epsilon));
}

VerificationBudget make_budget(std::uint64_t n, double alpha) { return {n, alpha, epsilon_bound(n, alpha)}; }

}  // namespace govkit::repro
