#pragma once

// Replay budget arithmetic: after n passed trials at significance α, the
// undetected divergence rate is at most ε = 1 − α^(1/n).

#include <cstdint>

namespace govkit::repro {

struct VerificationBudget {
  std::uint64_t n = 1;
  double alpha = 0.01;
  double epsilon = 0.0;
};

// Throws Error(domain_error) unless n >= 1 and 0 < alpha < 1.
double epsilon_bound(std::uint64_t n, double alpha);

// Smallest n with epsilon_bound(n, alpha) <= epsilon. Throws
// Error(domain_error) unless both arguments lie in (0, 1).
std::uint64_t required_budget(double epsilon, double alpha);

// ceil(ln(1/α) / ε); never below required_budget.
std::uint64_t approximate_budget(double epsilon, double alpha);

VerificationBudget make_budget(std::uint64_t n, double alpha);

}  // namespace govkit::repro
