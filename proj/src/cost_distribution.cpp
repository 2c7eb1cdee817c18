#include "freight/cost_distribution.hpp"

#include <algorithm>
#include <stdexcept>

namespace freight {

CostDistribution CostDistribution::uniform(double lower, double upper) {
  if (lower < 0.0) throw std::invalid_argument("uniform cost: lower must be >= 0");
  if (upper <= lower) throw std::invalid_argument("uniform cost: upper must exceed lower");
  return CostDistribution(Kind::Uniform, lower, upper);
}

double CostDistribution::cdf(double c) const {
  if (c <= lower_) return 0.0;
  if (c >= upper_) return 1.0;
  return (c - lower_) / (upper_ - lower_);
}

double CostDistribution::pdf(double c) const {
  if (c < lower_ || c > upper_) return 0.0;
  return 1.0 / (upper_ - lower_);
}

double CostDistribution::quantile(double x) const {
  if (x < 0.0 || x > 1.0) throw std::domain_error("quantile: x outside [0,1]");
  return lower_ + x * (upper_ - lower_);
}

double CostDistribution::quantile_slope(double x) const {
  if (x < 0.0 || x > 1.0) throw std::domain_error("quantile_slope: x outside [0,1]");
  return upper_ - lower_;
}

double CostDistribution::virtual_cost(double c) const {
  if (c < lower_ || c > upper_) throw std::domain_error("virtual_cost: c outside support");
  // psi(c) = c + F(c)/f(c) = 2c - a for the uniform family.
  return 2.0 * c - lower_;
}

double CostDistribution::inverse_virtual_cost(double v) const {
  if (v < virtual_cost(lower_)) throw std::domain_error("inverse_virtual_cost: v below psi(lower)");
  double c = 0.5 * (v + lower_);
  return std::min(c, upper_);
}

double CostDistribution::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return quantile(u(rng));
}

}  // namespace freight
