#include "shrink/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shrink {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

CovarianceSpec::CovarianceSpec(Eigen::ArrayXd sigma2_in) : sigma2(std::move(sigma2_in)) {
  require(sigma2.size() >= 3, "CovarianceSpec: need p >= 3, got p=" + std::to_string(sigma2.size()));
  for (Eigen::Index i = 0; i < sigma2.size(); ++i) {
    require(std::isfinite(sigma2[i]) && sigma2[i] > 0.0,
            "CovarianceSpec: variances must be positive and finite");
    if (i > 0) {
      require(sigma2[i] <= sigma2[i - 1],
              "CovarianceSpec: variances must be non-increasing (violated at index " +
                  std::to_string(i) + ")");
    }
  }
}

ShrinkageMatrix::ShrinkageMatrix(Eigen::ArrayXd g_in) : g(std::move(g_in)) {
  require(g.size() >= 1, "ShrinkageMatrix: empty diagonal");
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    require(std::isfinite(g[i]) && g[i] > 0.0 && g[i] <= 1.0,
            "ShrinkageMatrix: entries must satisfy 0 < g_i <= 1");
  }
}

CovarianceSpec make_geometric_covariance(Eigen::Index p, double a) {
  require(p >= 3, "make_geometric_covariance: need p >= 3, got p=" + std::to_string(p));
  require(std::isfinite(a) && a >= 1.0, "make_geometric_covariance: need a >= 1");
  Eigen::ArrayXd sigma2(p);
  for (Eigen::Index i = 0; i < p; ++i) sigma2[i] = std::pow(a, static_cast<double>(p - 1 - i));
  return CovarianceSpec(std::move(sigma2));
}

ShrinkageMatrix casella_g(const CovarianceSpec& cov) {
  return ShrinkageMatrix(cov.sigma2 / cov.largest());
}

ShrinkageMatrix berger_g(const CovarianceSpec& cov) {
  return ShrinkageMatrix(cov.smallest() / cov.sigma2);
}

ShrinkageMatrix identity_g(Eigen::Index p) {
  return ShrinkageMatrix(Eigen::ArrayXd::Ones(p));
}

MeanVector theta_on_diagonal(double m, const CovarianceSpec& cov) {
  require(std::isfinite(m) && m >= 0.0, "theta_on_diagonal: need m >= 0");
  const double coord = m * std::sqrt(cov.trace() / static_cast<double>(cov.p()));
  return MeanVector{Eigen::ArrayXd::Constant(cov.p(), coord)};
}

GaussianVectorStream::GaussianVectorStream(Eigen::ArrayXd shift, Eigen::ArrayXd scale,
                                           std::uint64_t n, RngKey key)
    : shift_(std::move(shift)), scale_(std::move(scale)), n_(n), key_(key), rng_(key, 0) {
  if (shift_.size() != scale_.size()) {
    throw std::invalid_argument("GaussianVectorStream: dimension mismatch");
  }
}

bool GaussianVectorStream::next(Eigen::ArrayXd& x) {
  if (index_ >= n_) return false;
  if (index_ > 0 && index_ % kChunkSamples == 0) {
    rng_ = ChunkRng(key_, index_ / kChunkSamples);
  }
  x.resize(shift_.size());
  for (Eigen::Index i = 0; i < shift_.size(); ++i) {
    x[i] = shift_[i] + scale_[i] * rng_.normal();
  }
  ++index_;
  return true;
}

GaussianVectorStream sample_conditional(const MeanVector& theta, const CovarianceSpec& cov,
                                        std::uint64_t n, std::uint64_t seed) {
  if (theta.theta.size() != cov.p()) {
    throw std::invalid_argument("sample_conditional: theta/Sigma dimension mismatch");
  }
  return GaussianVectorStream(theta.theta, cov.sigma2.sqrt(), n,
                              RngKey{seed, kStreamConditional});
}

GaussianVectorStream sample_marginal(double tau, const CovarianceSpec& cov, std::uint64_t n,
                                     std::uint64_t seed) {
  if (!(std::isfinite(tau) && tau >= 0.0)) {
    throw std::invalid_argument("sample_marginal: need tau >= 0");
  }
  return GaussianVectorStream(Eigen::ArrayXd::Zero(cov.p()), (cov.sigma2 + tau).sqrt(), n,
                              RngKey{seed, kStreamMarginal});
}

}  // namespace shrink
