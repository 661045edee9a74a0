#include "shrink/phi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "shrink/quadrature.hpp"

namespace shrink {
namespace {

constexpr double kSeriesCutoff = 1e-3;
constexpr double kTailCutoff = 50.0;
constexpr double kSaturationCutoff = 1e8;
constexpr double kQuadRelTol = 1e-12;

void check_z(double z) {
  if (!(std::isfinite(z) && z >= 0.0)) {
    throw std::invalid_argument("phi: need finite z >= 0, got z=" + std::to_string(z));
  }
}

/// Alternating series sum_k (-z/2)^k / (k! (a+k+1)); used for small z where
/// only a handful of terms contribute.
double integral_series(double a, double z) {
  double term = 1.0;  // (-z/2)^k / k!
  double sum = 1.0 / (a + 1.0);
  for (int k = 1; k < 64; ++k) {
    term *= -0.5 * z / static_cast<double>(k);
    const double contrib = term / (a + 1.0 + static_cast<double>(k));
    sum += contrib;
    if (std::abs(contrib) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

/// Gamma(a+1) (2/z)^{a+1} - int_1^inf l^a e^{-z l/2} dl, the large-z form.
/// The tail integral expands by repeated integration by parts into
/// (2/z) e^{-z/2} sum_k c_k with c_0 = 1, c_k = c_{k-1} (a-k+1)(2/z); for
/// z > 50 the terms reach machine negligibility long before the asymptotic
/// series can turn.
double integral_large_z(double a, double z) {
  const double full = std::tgamma(a + 1.0) * std::pow(2.0 / z, a + 1.0);
  const double damp = std::exp(-0.5 * z);
  if (damp == 0.0) return full;
  double c = 1.0;
  double s = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 64; ++k) {
    c *= (a - static_cast<double>(k - 1)) * (2.0 / z);
    if (c == 0.0 || std::abs(c) < 1e-18 * std::abs(s) || std::abs(c) > prev) break;
    s += c;
    prev = std::abs(c);
  }
  return full - damp * (2.0 / z) * s;
}

/// Smallest substitution order m such that l = u^m turns l^a into a clean
/// power of u: the transformed exponent q = m(a+1) - 1 must be >= 0 and
/// either (nearly) integral or >= 1, so the integrand has no endpoint
/// singularity worth worrying about.  a = -1/2 gives m = 2.
int substitution_order(double a) {
  for (int m = 2; m <= 64; ++m) {
    const double q = static_cast<double>(m) * (a + 1.0) - 1.0;
    if (q < 0.0) continue;
    if (q >= 1.0 || std::abs(q - std::round(q)) < 1e-9) return m;
  }
  return 0;
}

double integral_quadrature(double a, double z) {
  if (a >= 0.0) {
    auto f = [a, z](double l) { return std::pow(l, a) * std::exp(-0.5 * z * l); };
    return integrate_adaptive(f, 0.0, 1.0, kQuadRelTol).value;
  }
  const int m = substitution_order(a);
  if (m > 0) {
    const double q = static_cast<double>(m) * (a + 1.0) - 1.0;
    auto f = [m, q, z](double u) {
      const double l = std::pow(u, m);
      return static_cast<double>(m) * std::pow(u, q) * std::exp(-0.5 * z * l);
    };
    return integrate_adaptive(f, 0.0, 1.0, kQuadRelTol).value;
  }
  // a extremely close to -1: peel off [0, eps] by series, integrate the rest.
  const double eps = 1e-2;
  double term = 1.0;
  double head = std::pow(eps, a + 1.0) / (a + 1.0);
  for (int k = 1; k < 64; ++k) {
    term *= -0.5 * z * eps / static_cast<double>(k);
    const double contrib = term * std::pow(eps, a + 1.0) / (a + 1.0 + static_cast<double>(k));
    head += contrib;
    if (std::abs(contrib) < 1e-17 * std::abs(head)) break;
  }
  auto f = [a, z](double l) { return std::pow(l, a) * std::exp(-0.5 * z * l); };
  return head + integrate_adaptive(f, eps, 1.0, kQuadRelTol).value;
}

struct GbIntegrals {
  double n = 0.0;  // exponent p/2 - 1
  double d = 0.0;  // exponent p/2 - 2
  double m = 0.0;  // exponent p/2
};

GbIntegrals gb_integrals(int p, double z, bool with_m) {
  const double half_p = 0.5 * static_cast<double>(p);
  GbIntegrals out;
  out.n = incomplete_integral(half_p - 1.0, z);
  out.d = incomplete_integral(half_p - 2.0, z);
  if (with_m) out.m = incomplete_integral(half_p, z);
  return out;
}

double gb_value(const GeneralizedBayes& gb, double z) {
  if (z == 0.0) return 0.0;
  if (z > kSaturationCutoff) return static_cast<double>(gb.p - 2);
  const auto ints = gb_integrals(gb.p, z, false);
  return z * ints.n / ints.d;
}

double gb_prime(const GeneralizedBayes& gb, double z) {
  if (z == 0.0) {
    return static_cast<double>(gb.p - 2) / static_cast<double>(gb.p);
  }
  if (z > kSaturationCutoff) return 0.0;
  const auto ints = gb_integrals(gb.p, z, true);
  const double d = ints.n / ints.d - 0.5 * z * (ints.m * ints.d - ints.n * ints.n) / (ints.d * ints.d);
  // The two O(1/z) pieces cancel to an exponentially small remainder at large
  // z; clamp the floating-point residue to the known sign of the derivative.
  return d > 0.0 ? d : 0.0;
}

}  // namespace

PhiSpec make_mle() { return Mle{}; }

PhiSpec make_stein_form(double c1, double c2) {
  if (!(std::isfinite(c1) && c1 > 0.0)) {
    throw std::invalid_argument("SteinForm: need c1 > 0");
  }
  if (!(std::isfinite(c2) && c2 >= 0.0)) {
    throw std::invalid_argument("SteinForm: need c2 >= 0");
  }
  return SteinForm{c1, c2};
}

PhiSpec make_generalized_bayes(int p) {
  if (p < 3) throw std::invalid_argument("GeneralizedBayes: need p >= 3, got p=" + std::to_string(p));
  return GeneralizedBayes{p};
}

double incomplete_integral(double a, double z) {
  if (!(std::isfinite(a) && a > -1.0)) {
    throw std::invalid_argument("incomplete_integral: need a > -1");
  }
  if (!(std::isfinite(z) && z >= 0.0)) {
    throw std::invalid_argument("incomplete_integral: need z >= 0");
  }
  if (z == 0.0) return 1.0 / (a + 1.0);
  if (z < kSeriesCutoff) return integral_series(a, z);
  if (z > kTailCutoff) return integral_large_z(a, z);
  return integral_quadrature(a, z);
}

double phi_eval(const PhiSpec& spec, double z) {
  check_z(z);
  return std::visit(
      [z](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Mle>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SteinForm>) {
          if (z == 0.0) return s.c2 > 0.0 ? 0.0 : s.c1;  // c2 = 0: limit of c1 z/z
          return s.c1 * z / (s.c2 + z);
        } else {
          return gb_value(s, z);
        }
      },
      spec);
}

double phi_prime(const PhiSpec& spec, double z) {
  check_z(z);
  return std::visit(
      [z](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Mle>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SteinForm>) {
          if (s.c2 == 0.0) return 0.0;
          const double denom = s.c2 + z;
          return s.c1 * s.c2 / (denom * denom);
        } else {
          return gb_prime(s, z);
        }
      },
      spec);
}

PhiValue phi_value(const PhiSpec& spec, double z) {
  check_z(z);
  if (const auto* gb = std::get_if<GeneralizedBayes>(&spec)) {
    if (z == 0.0) {
      return {0.0, static_cast<double>(gb->p - 2) / static_cast<double>(gb->p)};
    }
    if (z > kSaturationCutoff) return {static_cast<double>(gb->p - 2), 0.0};
    const auto ints = gb_integrals(gb->p, z, true);
    const double value = z * ints.n / ints.d;
    double deriv =
        ints.n / ints.d - 0.5 * z * (ints.m * ints.d - ints.n * ints.n) / (ints.d * ints.d);
    if (deriv < 0.0) deriv = 0.0;
    return {value, deriv};
  }
  return {phi_eval(spec, z), phi_prime(spec, z)};
}

double phi_sup(const PhiSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Mle>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SteinForm>) {
          return s.c1;
        } else {
          return static_cast<double>(s.p - 2);
        }
      },
      spec);
}

double phi_over_z_limit(const PhiSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Mle>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, SteinForm>) {
          return s.c2 > 0.0 ? s.c1 / s.c2 : std::numeric_limits<double>::infinity();
        } else {
          return static_cast<double>(s.p - 2) / static_cast<double>(s.p);
        }
      },
      spec);
}

int phi_dimension(const PhiSpec& spec) {
  if (const auto* gb = std::get_if<GeneralizedBayes>(&spec)) return gb->p;
  return 0;
}

CachedPhi::CachedPhi(const PhiSpec& spec) {
  if (std::holds_alternative<Mle>(spec)) {
    kind_ = Kind::kMle;
    return;
  }
  if (const auto* sf = std::get_if<SteinForm>(&spec)) {
    kind_ = Kind::kStein;
    c1_ = sf->c1;
    c2_ = sf->c2;
    return;
  }
  const auto& gb = std::get<GeneralizedBayes>(spec);
  kind_ = Kind::kTable;
  saturation_ = static_cast<double>(gb.p - 2);
  slope0_ = saturation_ / static_cast<double>(gb.p);
  z_lo_ = 1e-8;
  z_hi_ = 200.0;
  const int n = 4096;
  u_lo_ = std::log(z_lo_);
  du_ = (std::log(z_hi_) - u_lo_) / static_cast<double>(n - 1);
  val_.resize(n);
  dval_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double z = std::exp(u_lo_ + du_ * static_cast<double>(i));
    const PhiValue pv = phi_value(spec, z);
    val_[i] = pv.value;
    dval_[i] = z * pv.derivative;  // d phi / d ln z
  }
}

double CachedPhi::hermite(double z, bool want_derivative) const {
  const double u = std::log(z);
  double s = (u - u_lo_) / du_;
  int i = static_cast<int>(s);
  const int last = static_cast<int>(val_.size()) - 2;
  if (i < 0) i = 0;
  if (i > last) i = last;
  const double t = s - static_cast<double>(i);
  const double v0 = val_[i], v1 = val_[i + 1];
  const double m0 = dval_[i] * du_, m1 = dval_[i + 1] * du_;
  if (!want_derivative) {
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * m0 +
           (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * m1;
  }
  const double t2 = t * t;
  const double dd = (6.0 * t2 - 6.0 * t) * (v0 - v1) + (3.0 * t2 - 4.0 * t + 1.0) * m0 +
                    (3.0 * t2 - 2.0 * t) * m1;
  return dd / (du_ * z);  // d phi / dz
}

double CachedPhi::value(double z) const {
  switch (kind_) {
    case Kind::kMle:
      return 0.0;
    case Kind::kStein:
      if (z == 0.0) return c2_ > 0.0 ? 0.0 : c1_;
      return c1_ * z / (c2_ + z);
    case Kind::kTable:
      if (z <= z_lo_) return slope0_ * z;
      if (z >= z_hi_) return saturation_;
      return hermite(z, false);
  }
  return 0.0;
}

double CachedPhi::derivative(double z) const {
  switch (kind_) {
    case Kind::kMle:
      return 0.0;
    case Kind::kStein: {
      if (c2_ == 0.0) return 0.0;
      const double denom = c2_ + z;
      return c1_ * c2_ / (denom * denom);
    }
    case Kind::kTable:
      if (z <= z_lo_) return slope0_;
      if (z >= z_hi_) return 0.0;
      return hermite(z, true);
  }
  return 0.0;
}

double CachedPhi::ratio(double z) const {
  switch (kind_) {
    case Kind::kMle:
      return 0.0;
    case Kind::kStein:
      if (z == 0.0 && c2_ == 0.0) return std::numeric_limits<double>::infinity();
      return c1_ / (c2_ + z);
    case Kind::kTable:
      if (z <= z_lo_) return slope0_;
      return value(z) / z;
  }
  return 0.0;
}

}  // namespace shrink
