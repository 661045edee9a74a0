#include "shrink/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shrink {

ShrinkageRule::ShrinkageRule(CovarianceSpec cov_in, ShrinkageMatrix g_in, PhiSpec phi_in)
    : cov(std::move(cov_in)), g(std::move(g_in)), phi(std::move(phi_in)) {
  if (cov.p() != g.p()) {
    throw std::invalid_argument("ShrinkageRule: Sigma and G dimensions differ");
  }
  const int gb_p = phi_dimension(phi);
  if (gb_p != 0 && gb_p != cov.p()) {
    throw std::invalid_argument("ShrinkageRule: GeneralizedBayes profile dimension " +
                                std::to_string(gb_p) + " does not match p=" +
                                std::to_string(cov.p()));
  }
}

double statistic_z(const ShrinkageRule& rule, const Eigen::ArrayXd& x) {
  if (x.size() != rule.p()) throw std::invalid_argument("statistic_z: dimension mismatch");
  return (rule.g.g * x.square() / rule.cov.sigma2).sum();
}

EstimateResult apply(const ShrinkageRule& rule, const Eigen::ArrayXd& x) {
  const double z = statistic_z(rule, x);
  EstimateResult out;
  out.z = z;
  const double ratio = z > 0.0 ? phi_eval(rule.phi, z) / z : phi_over_z_limit(rule.phi);
  if (!std::isfinite(ratio)) {
    // x = 0 with the unbounded-ratio profile: the estimator's limit is 0.
    out.singular_origin = true;
    out.factors = Eigen::ArrayXd::Zero(x.size());
    out.delta = Eigen::ArrayXd::Zero(x.size());
    return out;
  }
  out.factors = 1.0 - ratio * rule.g.g;
  out.delta = out.factors * x;
  return out;
}

}  // namespace shrink
