#pragma once

#include <limits>
#include <variant>
#include <vector>

namespace shrink {

// Shrinkage profiles phi: [0, inf) -> [0, inf).  An estimator of the class
// delta(x) = (I - G * phi(z)/z) x is parameterised by one of three families:
//
//   Mle               phi(z) = 0                  (no shrinkage)
//   SteinForm         phi(z) = c1 z / (c2 + z)    (c1 > 0, c2 >= 0)
//   GeneralizedBayes  phi(z) = z N(z) / D(z) with
//                        N(z) = int_0^1 l^{p/2-1} e^{-z l/2} dl
//                        D(z) = int_0^1 l^{p/2-2} e^{-z l/2} dl
//
// The GeneralizedBayes profile is the posterior-shrinkage profile of a scale
// mixture of normals with mixing density l^{-2} on (0, 1); it increases
// concavely from 0 with initial slope (p-2)/p and saturates at p-2.

struct Mle {};

struct SteinForm {
  double c1 = 1.0;
  double c2 = 0.0;
};

struct GeneralizedBayes {
  int p = 3;
};

using PhiSpec = std::variant<Mle, SteinForm, GeneralizedBayes>;

/// Validating factories.
PhiSpec make_mle();
PhiSpec make_stein_form(double c1, double c2);
PhiSpec make_generalized_bayes(int p);

/// Profile value and derivative at one point.
struct PhiValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// int_0^1 l^a e^{-z l / 2} dl for a > -1, z >= 0, to ~1e-12 relative error.
///
/// Evaluation strategy by region:
///   z < 1e-3   truncated alternating power series in z
///   z <= 50    adaptive Gauss-Kronrod; negative exponents are first smoothed
///              by the substitution l = u^m (m = 2 for a = -1/2)
///   z > 50     Gamma(a+1) (2/z)^{a+1} minus the explicitly summed tail
///              int_1^inf, which is stable where the quadrature form is not
double incomplete_integral(double a, double z);

/// phi(z).  Throws std::invalid_argument for z < 0 or non-finite z.
double phi_eval(const PhiSpec& spec, double z);

/// dphi/dz, with phi'(0) taken as the right limit ((p-2)/p, c1/c2, or 0).
double phi_prime(const PhiSpec& spec, double z);

/// Value and derivative in one call (shares integral work for the
/// GeneralizedBayes family).
PhiValue phi_value(const PhiSpec& spec, double z);

/// sup_z phi(z): 0, c1, or p-2.
double phi_sup(const PhiSpec& spec);

/// lim_{z->0+} phi(z)/z; +infinity for SteinForm with c2 = 0.
double phi_over_z_limit(const PhiSpec& spec);

/// Dimension parameter of a GeneralizedBayes spec, 0 otherwise.
int phi_dimension(const PhiSpec& spec);

/// Fast evaluator used inside Monte Carlo loops.  Closed-form families are
/// evaluated directly; the GeneralizedBayes profile is tabulated once on a
/// log-z grid and interpolated with a C1 cubic Hermite (absolute error below
/// 1e-8, checked by the test suite) so that 1e7-sample sweeps stay cheap.
class CachedPhi {
 public:
  explicit CachedPhi(const PhiSpec& spec);

  double value(double z) const;
  double derivative(double z) const;
  /// phi(z)/z with its right limit at z = 0 (may be +infinity).
  double ratio(double z) const;

 private:
  enum class Kind { kMle, kStein, kTable };

  double hermite(double z, bool want_derivative) const;

  Kind kind_ = Kind::kMle;
  double c1_ = 0.0;
  double c2_ = 0.0;
  double saturation_ = 0.0;  // p - 2
  double slope0_ = 0.0;      // phi'(0)
  double z_lo_ = 0.0;
  double z_hi_ = 0.0;
  double u_lo_ = 0.0;
  double du_ = 0.0;
  std::vector<double> val_;   // phi at grid nodes
  std::vector<double> dval_;  // dphi/du at grid nodes, u = ln z
};

}  // namespace shrink
