#pragma once

#include <Eigen/Dense>

#include "shrink/model.hpp"
#include "shrink/phi.hpp"

namespace shrink {

// delta(x) = (I - G phi(z)/z) x with z = x' G Sigma^{-1} x = sum g_i x_i^2 / sigma_i^2.

/// A fully specified shrinkage estimator: covariance, direction, profile.
struct ShrinkageRule {
  ShrinkageRule(CovarianceSpec cov_in, ShrinkageMatrix g_in, PhiSpec phi_in);

  Eigen::Index p() const { return cov.p(); }

  CovarianceSpec cov;
  ShrinkageMatrix g;
  PhiSpec phi;
};

/// Output of one application of a rule.
struct EstimateResult {
  Eigen::ArrayXd delta;
  double z = 0.0;
  Eigen::ArrayXd factors;  // delta_i = factors_i * x_i
  /// Set when x = 0 met a profile with phi(z)/z -> infinity (SteinForm with
  /// c2 = 0); delta is pinned to 0 and `factors` to 0 in that case.
  bool singular_origin = false;
};

/// z = sum_i g_i x_i^2 / sigma_i^2.
double statistic_z(const ShrinkageRule& rule, const Eigen::ArrayXd& x);

/// Applies the rule to one observation.  At z = 0 the ratio phi(z)/z is
/// replaced by its right limit.
EstimateResult apply(const ShrinkageRule& rule, const Eigen::ArrayXd& x);

}  // namespace shrink
