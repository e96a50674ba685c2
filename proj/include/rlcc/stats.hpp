#pragma once

#include <cstdint>
#include <span>

namespace rlcc {

constexpr double kSlackSigmas = 3.0;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

double proportion(std::uint64_t successes, std::uint64_t trials);
// sqrt(p(1-p)/N) at the empirical p.
double standard_error(std::uint64_t successes, std::uint64_t trials);
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kSlackSigmas);

// estimate <= bound + 3 se
bool at_most_with_slack(std::uint64_t successes, std::uint64_t trials, double bound);
// estimate >= bound - 3 se
bool at_least_with_slack(std::uint64_t successes, std::uint64_t trials, double bound);

struct ChiSquareResult {
  double statistic = 0.0;
  unsigned dof = 0;
  double p_value = 1.0;
};

// Goodness of fit against the uniform distribution over the cells.
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts);

}  // namespace rlcc
