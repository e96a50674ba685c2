#include "rlcc/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <stdexcept>

namespace rlcc {

double proportion(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return static_cast<double>(successes) / static_cast<double>(trials);
}

double standard_error(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  const double p = proportion(successes, trials);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {};
  const double n = static_cast<double>(trials);
  const double p = proportion(successes, trials);
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

bool at_most_with_slack(std::uint64_t successes, std::uint64_t trials, double bound) {
  return proportion(successes, trials) <= bound + kSlackSigmas * standard_error(successes, trials);
}

bool at_least_with_slack(std::uint64_t successes, std::uint64_t trials, double bound) {
  return proportion(successes, trials) >= bound - kSlackSigmas * standard_error(successes, trials);
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi-square needs at least two cells");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("chi-square needs observations");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  ChiSquareResult out;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    out.statistic += diff * diff / expected;
  }
  out.dof = static_cast<unsigned>(counts.size() - 1);
  const boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace rlcc
