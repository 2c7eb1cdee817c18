#pragma once

#include <random>

namespace freight {

/// A carrier opportunity-cost law on one lane. Currently only the uniform
/// family is implemented; the kind tag leaves room for other regular
/// distributions (strictly increasing virtual cost).
class CostDistribution {
 public:
  static CostDistribution uniform(double lower, double upper);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double mean() const { return 0.5 * (lower_ + upper_); }

  double cdf(double c) const;
  double pdf(double c) const;

  /// Inverse cdf. Throws std::domain_error for x outside [0, 1].
  double quantile(double x) const;

  /// d/dx of quantile(x).
  double quantile_slope(double x) const;

  /// psi(c) = c + F(c)/f(c). Throws std::domain_error outside the support.
  double virtual_cost(double c) const;

  /// Inverse of psi. Values above virtual_cost(upper) clamp to the upper
  /// support endpoint; values below virtual_cost(lower) throw.
  double inverse_virtual_cost(double v) const;

  double sample(std::mt19937_64& rng) const;

 private:
  enum class Kind { Uniform };
  CostDistribution(Kind kind, double lower, double upper)
      : kind_(kind), lower_(lower), upper_(upper) {}

  Kind kind_;
  double lower_;
  double upper_;
};

}  // namespace freight
