#include "shrink/risk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "shrink/accumulate.hpp"

namespace shrink {
namespace {

void check_tau(double tau) {
  if (!(std::isfinite(tau) && tau >= 0.0)) {
    throw std::invalid_argument("bayes risk: need finite tau >= 0");
  }
}

void check_theta(const ShrinkageRule& rule, const MeanVector& theta) {
  if (theta.theta.size() != rule.p()) {
    throw std::invalid_argument("ordinary risk: theta dimension mismatch");
  }
}

RiskEstimate to_estimate(const MomentAccumulator& acc, double shift, EngineTag tag) {
  return RiskEstimate{shift + acc.mean, acc.stderr_mean(), acc.count, tag};
}

// Per-worker context shared by the Monte Carlo kernels.  The hot loops run on
// raw buffers: p is small, the arrays fit in cache, and the per-sample cost
// is what decides whether 1e7-draw sweeps are usable on a laptop.
struct RuleContext {
  explicit RuleContext(const ShrinkageRule& rule)
      : p(static_cast<std::size_t>(rule.p())), phi(rule.phi), phi_fast(rule.phi) {
    sigma.resize(p);
    g.resize(p);
    wz.resize(p);  // g_i / sigma_i^2 (weights of z)
    for (std::size_t i = 0; i < p; ++i) {
      sigma[i] = std::sqrt(rule.cov.sigma2[i]);
      g[i] = rule.g.g[i];
      wz[i] = g[i] / rule.cov.sigma2[i];
    }
  }

  std::size_t p;
  PhiSpec phi;
  CachedPhi phi_fast;
  std::vector<double> sigma, g, wz;
};

}  // namespace

const char* engine_name(EngineTag tag) {
  switch (tag) {
    case EngineTag::kMc:
      return "mc";
    case EngineTag::kSure:
      return "sure";
    case EngineTag::kRaoBlackwell:
      return "rb";
    case EngineTag::kDirichlet:
      return "dirichlet";
    case EngineTag::kClosed:
      return "closed";
  }
  return "?";
}

double loss(const Eigen::ArrayXd& delta, const Eigen::ArrayXd& theta) {
  if (delta.size() != theta.size()) throw std::invalid_argument("loss: dimension mismatch");
  return (delta - theta).square().sum();
}

RiskEstimate mc_ordinary_risk(const ShrinkageRule& rule, const MeanVector& theta, std::uint64_t n,
                              std::uint64_t seed, int threads) {
  check_theta(rule, theta);
  if (n == 0) throw std::invalid_argument("mc_ordinary_risk: need n >= 1");
  const RngKey key{seed, kStreamConditional};
  auto factory = [&] {
    struct Worker {
      RuleContext ctx;
      std::vector<double> mean;
      std::vector<double> x;

      double operator()(ChunkRng& rng, std::uint64_t) {
        const std::size_t p = ctx.p;
        double z = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          x[i] = mean[i] + ctx.sigma[i] * rng.normal();
          z += ctx.wz[i] * x[i] * x[i];
        }
        const double r = z > 0.0 ? ctx.phi_fast.value(z) / z : ctx.phi_fast.ratio(0.0);
        double acc = 0.0;
        if (std::isfinite(r)) {
          for (std::size_t i = 0; i < p; ++i) {
            const double e = (x[i] - mean[i]) - r * ctx.g[i] * x[i];
            acc += e * e;
          }
        } else {  // x = 0 under an unbounded ratio: delta = 0
          for (std::size_t i = 0; i < p; ++i) acc += mean[i] * mean[i];
        }
        return acc;
      }
    };
    Worker w{RuleContext(rule), {}, {}};
    w.mean.assign(theta.theta.data(), theta.theta.data() + theta.theta.size());
    w.x.resize(w.ctx.p);
    return w;
  };
  return to_estimate(parallel_accumulate(n, key, factory, threads), 0.0, EngineTag::kMc);
}

double sure_risk_diff(const ShrinkageRule& rule, const Eigen::ArrayXd& x) {
  if (x.size() != rule.p()) throw std::invalid_argument("sure_risk_diff: dimension mismatch");
  const double z = statistic_z(rule, x);
  const double sgs2 = (rule.g.g * rule.cov.sigma2).sum();
  if (z == 0.0) {
    const double limit = phi_over_z_limit(rule.phi);
    if (!std::isfinite(limit)) return -std::numeric_limits<double>::infinity();
    return -2.0 * sgs2 * limit;
  }
  const PhiValue pv = phi_value(rule.phi, z);
  const double r = pv.value / z;
  const double b = (rule.g.g.square() * x.square()).sum();
  return -2.0 * sgs2 * r + b * (r * r + 4.0 * r / z - 4.0 * pv.derivative / z);
}

RiskEstimate mc_ordinary_risk_sure(const ShrinkageRule& rule, const MeanVector& theta,
                                   std::uint64_t n, std::uint64_t seed, int threads) {
  check_theta(rule, theta);
  if (n == 0) throw std::invalid_argument("mc_ordinary_risk_sure: need n >= 1");
  const double trace = rule.cov.trace();
  const RngKey key{seed, kStreamConditional};
  auto factory = [&] {
    struct Worker {
      RuleContext ctx;
      std::vector<double> mean;
      std::vector<double> x;
      double sgs2 = 0.0;

      double operator()(ChunkRng& rng, std::uint64_t) {
        const std::size_t p = ctx.p;
        double z = 0.0;
        double b = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          x[i] = mean[i] + ctx.sigma[i] * rng.normal();
          const double x2 = x[i] * x[i];
          z += ctx.wz[i] * x2;
          b += ctx.g[i] * ctx.g[i] * x2;
        }
        if (z == 0.0) return -2.0 * sgs2 * ctx.phi_fast.ratio(0.0);
        const double phi = ctx.phi_fast.value(z);
        const double dphi = ctx.phi_fast.derivative(z);
        const double r = phi / z;
        return -2.0 * sgs2 * r + b * (r * r + 4.0 * r / z - 4.0 * dphi / z);
      }
    };
    Worker w{RuleContext(rule), {}, {}, 0.0};
    w.mean.assign(theta.theta.data(), theta.theta.data() + theta.theta.size());
    w.x.resize(w.ctx.p);
    for (std::size_t i = 0; i < w.ctx.p; ++i) {
      w.sgs2 += rule.g.g[i] * rule.cov.sigma2[i];
    }
    return w;
  };
  return to_estimate(parallel_accumulate(n, key, factory, threads), trace, EngineTag::kSure);
}

RiskEstimate bayes_risk_rb(const ShrinkageRule& rule, double tau, std::uint64_t n,
                           std::uint64_t seed, int threads) {
  check_tau(tau);
  if (n == 0) throw std::invalid_argument("bayes_risk_rb: need n >= 1");
  const double posterior_var = posterior_mean_bayes_risk(rule.cov, tau);
  const RngKey key{seed, kStreamMarginal};
  auto factory = [&] {
    struct Worker {
      RuleContext ctx;
      std::vector<double> sd;  // sqrt(sigma_i^2 + tau)
      std::vector<double> b;   // sigma_i^2 / (tau + sigma_i^2)
      std::vector<double> x;

      double operator()(ChunkRng& rng, std::uint64_t) {
        const std::size_t p = ctx.p;
        double z = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          x[i] = sd[i] * rng.normal();
          z += ctx.wz[i] * x[i] * x[i];
        }
        const double r = z > 0.0 ? ctx.phi_fast.value(z) / z : ctx.phi_fast.ratio(0.0);
        double acc = 0.0;
        if (std::isfinite(r)) {
          for (std::size_t i = 0; i < p; ++i) {
            const double e = (b[i] - r * ctx.g[i]) * x[i];
            acc += e * e;
          }
        }
        return acc;
      }
    };
    Worker w{RuleContext(rule), {}, {}, {}};
    w.sd.resize(w.ctx.p);
    w.b.resize(w.ctx.p);
    w.x.resize(w.ctx.p);
    for (std::size_t i = 0; i < w.ctx.p; ++i) {
      const double s2 = rule.cov.sigma2[i];
      w.sd[i] = std::sqrt(s2 + tau);
      w.b[i] = s2 / (tau + s2);
    }
    return w;
  };
  return to_estimate(parallel_accumulate(n, key, factory, threads), posterior_var,
                     EngineTag::kRaoBlackwell);
}

RiskEstimate bayes_risk_direct(const ShrinkageRule& rule, double tau, std::uint64_t n,
                               std::uint64_t seed, int threads) {
  check_tau(tau);
  if (n == 0) throw std::invalid_argument("bayes_risk_direct: need n >= 1");
  const double sqrt_tau = std::sqrt(tau);
  const RngKey key{seed, kStreamJointDirect};
  auto factory = [&] {
    struct Worker {
      RuleContext ctx;
      double sqrt_tau;
      std::vector<double> theta;
      std::vector<double> x;

      double operator()(ChunkRng& rng, std::uint64_t) {
        const std::size_t p = ctx.p;
        double z = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          theta[i] = sqrt_tau * rng.normal();
          x[i] = theta[i] + ctx.sigma[i] * rng.normal();
          z += ctx.wz[i] * x[i] * x[i];
        }
        const double r = z > 0.0 ? ctx.phi_fast.value(z) / z : ctx.phi_fast.ratio(0.0);
        double acc = 0.0;
        if (std::isfinite(r)) {
          for (std::size_t i = 0; i < p; ++i) {
            const double e = (x[i] - theta[i]) - r * ctx.g[i] * x[i];
            acc += e * e;
          }
        } else {
          for (std::size_t i = 0; i < p; ++i) acc += theta[i] * theta[i];
        }
        return acc;
      }
    };
    Worker w{RuleContext(rule), sqrt_tau, {}, {}};
    w.theta.resize(w.ctx.p);
    w.x.resize(w.ctx.p);
    return w;
  };
  return to_estimate(parallel_accumulate(n, key, factory, threads), 0.0, EngineTag::kMc);
}

RiskEstimate bayes_risk_dirichlet_oracle(const ShrinkageRule& rule, double tau, std::uint64_t n,
                                         std::uint64_t seed, int threads) {
  check_tau(tau);
  if (n == 0) throw std::invalid_argument("bayes_risk_dirichlet_oracle: need n >= 1");
  const double trace = rule.cov.trace();
  const RngKey key{seed, kStreamDecomposition};
  auto factory = [&] {
    struct Worker {
      RuleContext ctx;
      std::vector<double> a;    // g_i (sigma_i^2 + tau) / sigma_i^2
      std::vector<double> gs2;  // g_i sigma_i^2
      std::vector<double> q2;   // g_i^2 (sigma_i^2 + tau)
      std::vector<double> y;

      double operator()(ChunkRng& rng, std::uint64_t) {
        const std::size_t p = ctx.p;
        double sum_y = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          const double xi = rng.normal();
          y[i] = xi * xi;
          sum_y += y[i];
        }
        double w = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          const double eta = rng.normal();
          w += eta * eta;
        }
        // t_i = y_i / sum_y is Dirichlet(1/2,...,1/2); w is chi^2_p.
        double s = 0.0, a1 = 0.0, t2 = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          const double t = y[i] / sum_y;
          s += t * a[i];
          a1 += t * gs2[i];
          t2 += t * q2[i];
        }
        const double z = w * s;
        const double phi = z > 0.0 ? ctx.phi_fast.value(z) : 0.0;
        return -2.0 * a1 * phi / s + t2 * phi * phi / (w * s * s);
      }
    };
    Worker w{RuleContext(rule), {}, {}, {}, {}};
    w.a.resize(w.ctx.p);
    w.gs2.resize(w.ctx.p);
    w.q2.resize(w.ctx.p);
    w.y.resize(w.ctx.p);
    for (std::size_t i = 0; i < w.ctx.p; ++i) {
      const double s2 = rule.cov.sigma2[i];
      const double gi = rule.g.g[i];
      w.a[i] = gi * (s2 + tau) / s2;
      w.gs2[i] = gi * s2;
      w.q2[i] = gi * gi * (s2 + tau);
    }
    return w;
  };
  return to_estimate(parallel_accumulate(n, key, factory, threads), trace, EngineTag::kDirichlet);
}

double posterior_mean_bayes_risk(const CovarianceSpec& cov, double tau) {
  check_tau(tau);
  return (tau * cov.sigma2 / (tau + cov.sigma2)).sum();
}

std::vector<ProofDecomposition> sample_proof_decomposition(Eigen::Index p, std::uint64_t n,
                                                           std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("sample_proof_decomposition: need p >= 1");
  std::vector<ProofDecomposition> out;
  out.reserve(n);
  const RngKey key{seed, kStreamDecomposition};
  ChunkRng rng(key, 0);
  for (std::uint64_t k = 0; k < n; ++k) {
    if (k > 0 && k % kChunkSamples == 0) rng = ChunkRng(key, k / kChunkSamples);
    ProofDecomposition d;
    d.t.resize(p);
    double sum_y = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      const double xi = rng.normal();
      d.t[i] = xi * xi;
      sum_y += d.t[i];
    }
    double w = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      const double eta = rng.normal();
      w += eta * eta;
    }
    d.t /= sum_y;
    d.w = w;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace shrink
