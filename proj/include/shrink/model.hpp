#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "shrink/rng.hpp"

namespace shrink {

// Observation model: X ~ N_p(theta, Sigma) with Sigma = diag(sigma2) known,
// variances sorted in non-increasing order (ties allowed), p >= 3.

/// Diagonal covariance with non-increasing positive entries.
struct CovarianceSpec {
  explicit CovarianceSpec(Eigen::ArrayXd sigma2_in);

  Eigen::Index p() const { return sigma2.size(); }
  double trace() const { return sigma2.sum(); }
  double largest() const { return sigma2[0]; }
  double smallest() const { return sigma2[sigma2.size() - 1]; }

  Eigen::ArrayXd sigma2;
};

/// Diagonal shrinkage direction matrix G = diag(g), 0 < g_i <= 1.
struct ShrinkageMatrix {
  explicit ShrinkageMatrix(Eigen::ArrayXd g_in);

  Eigen::Index p() const { return g.size(); }

  Eigen::ArrayXd g;
};

/// Mean vector of the sampling model.
struct MeanVector {
  Eigen::ArrayXd theta;
};

/// One cell of the benchmark grids: signal multiplier m (ordinary risk) or
/// prior variance tau (ensemble risk).
struct ExperimentPoint {
  double m = 0.0;
  double tau = 0.0;
};

/// diag(a^{p-1}, ..., a, 1): geometrically decaying spectrum, a >= 1.
CovarianceSpec make_geometric_covariance(Eigen::Index p, double a);

/// G = Sigma / sigma2_max; shrinkage strongest on the low-variance tail.
ShrinkageMatrix casella_g(const CovarianceSpec& cov);

/// G = sigma2_min * Sigma^{-1}; the direction that maximises the ordinary
/// minimaxity budget h(Sigma, G) at 2(p-2).
ShrinkageMatrix berger_g(const CovarianceSpec& cov);

/// G = I.
ShrinkageMatrix identity_g(Eigen::Index p);

/// theta = m * sqrt(tr Sigma / p) * (1, ..., 1), so |theta|^2 = m^2 tr Sigma.
MeanVector theta_on_diagonal(double m, const CovarianceSpec& cov);

// --- Gaussian sampling -----------------------------------------------------
//
// Streams are chunk-addressed: sample k lives in chunk k / kChunkSamples and
// chunks are generated independently, which is what lets the risk engines
// split work across threads without changing the draw sequence.

inline constexpr std::uint64_t kStreamConditional = 0x11;
inline constexpr std::uint64_t kStreamMarginal = 0x22;
inline constexpr std::uint64_t kStreamJointDirect = 0x33;
inline constexpr std::uint64_t kStreamDecomposition = 0x44;

/// Sequential reader over a stream of N_p(shift, diag(scale^2)) vectors.
class GaussianVectorStream {
 public:
  GaussianVectorStream(Eigen::ArrayXd shift, Eigen::ArrayXd scale, std::uint64_t n, RngKey key);

  /// Writes the next vector; returns false once n vectors were produced.
  bool next(Eigen::ArrayXd& x);

  std::uint64_t size() const { return n_; }

 private:
  Eigen::ArrayXd shift_;
  Eigen::ArrayXd scale_;
  std::uint64_t n_;
  std::uint64_t index_ = 0;
  RngKey key_;
  ChunkRng rng_;
};

/// X_k ~ N(theta, Sigma), k = 0..n-1.
GaussianVectorStream sample_conditional(const MeanVector& theta, const CovarianceSpec& cov,
                                        std::uint64_t n, std::uint64_t seed);

/// Marginal of X when theta ~ N(0, tau I): X_k ~ N(0, Sigma + tau I).
GaussianVectorStream sample_marginal(double tau, const CovarianceSpec& cov, std::uint64_t n,
                                     std::uint64_t seed);

}  // namespace shrink
