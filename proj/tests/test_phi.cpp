#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shrink/phi.hpp"

using namespace shrink;

namespace {

// 200-point logarithmic grid on [lo, hi]
std::vector<double> log_grid(double lo, double hi, int points = 200) {
  std::vector<double> zs(points);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i) {
    zs[i] = std::exp(llo + (lhi - llo) * i / (points - 1));
  }
  return zs;
}

// second divided difference (curvature sign on an unequally spaced grid)
double second_divided_difference(double x1, double f1, double x2, double f2, double x3,
                                 double f3) {
  return ((f3 - f2) / (x3 - x2) - (f2 - f1) / (x2 - x1)) / (x3 - x1);
}

}  // namespace

TEST_CASE("profile factories validate their parameters") {
  CHECK_NOTHROW(make_mle());
  CHECK_NOTHROW(make_stein_form(8.0, 8.0));
  CHECK_NOTHROW(make_stein_form(1.0, 0.0));
  CHECK_THROWS_AS(make_stein_form(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_stein_form(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_stein_form(1.0, -0.5), std::invalid_argument);
  CHECK_NOTHROW(make_generalized_bayes(3));
  CHECK_THROWS_AS(make_generalized_bayes(2), std::invalid_argument);
}

TEST_CASE("truncated-exponential moment integral against frozen references") {
  // reference values computed with 30-digit arithmetic
  struct Ref {
    double a, z, value;
  };
  const Ref refs[] = {
      {0.0, 4.0, 0.43233235838169365},  {1.0, 4.0, 0.14849853757254048},
      {3.0, 2.0, 0.11392894125692285},  {-0.5, 4.0, 1.1962880133226082},
      {4.0, 1.0, 0.13218480380608572},  {3.0, 1.0, 0.16815576540391907},
      {2.5, 7.3, 0.021523460472396261}, {0.0, 0.0, 1.0},
      {2.0, 0.0, 1.0 / 3.0},            {1.0, 0.0, 0.5},
  };
  for (const Ref& r : refs) {
    CHECK(incomplete_integral(r.a, r.z) == doctest::Approx(r.value).epsilon(1e-10));
  }
}

TEST_CASE("moment integral closed form across all evaluation regions") {
  // a = 0 integrates in closed form for every z; exercises the series,
  // quadrature, and large-z branches plus both crossovers
  for (double z : {1e-6, 1e-4, 5e-4, 2e-3, 0.01, 0.5, 2.0, 10.0, 49.0, 50.0,
                   51.0, 100.0, 500.0, 1400.0}) {
    const double closed = z == 0.0 ? 1.0 : (2.0 / z) * (1.0 - std::exp(-z / 2.0));
    CHECK(incomplete_integral(0.0, z) == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("moment integral satisfies the integration-by-parts recurrence") {
  // d/dl [ l^a e^{-z l/2} ] integrated over (0,1) gives
  // I(a, z) = -(2/z) e^{-z/2} + (2a/z) I(a-1, z) for a > 0, z > 0
  for (double a : {0.5, 1.0, 2.5, 4.0, 5.5}) {
    for (double z : {0.5, 3.0, 20.0, 80.0, 300.0}) {
      const double rhs =
          -(2.0 / z) * std::exp(-z / 2.0) + (2.0 * a / z) * incomplete_integral(a - 1.0, z);
      CHECK(incomplete_integral(a, z) == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("moment integral with singular endpoint matches the error-function form") {
  // a = -1/2 via l = u^2:  I(-1/2, z) = sqrt(2 pi / z) erf(sqrt(z/2))
  for (double z : {0.3, 4.0, 30.0}) {
    const double closed = std::sqrt(2.0 * M_PI / z) * std::erf(std::sqrt(z / 2.0));
    CHECK(incomplete_integral(-0.5, z) == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("moment integral rejects out-of-domain arguments") {
  CHECK_THROWS_AS(incomplete_integral(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_integral(-1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_integral(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("rational profile values and limits") {
  const PhiSpec stein = make_stein_form(8.0, 8.0);
  CHECK(phi_eval(stein, 8.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(phi_eval(stein, 0.0) == 0.0);
  CHECK(phi_sup(stein) == 8.0);
  CHECK(phi_over_z_limit(stein) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(phi_prime(stein, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  // degenerate denominator: value at 0 is the z -> 0 limit of c1 z / z
  const PhiSpec classic = make_stein_form(8.0, 0.0);
  CHECK(phi_eval(classic, 0.0) == 8.0);
  CHECK(phi_eval(classic, 123.0) == 8.0);
  CHECK(std::isinf(phi_over_z_limit(classic)));

  const PhiSpec none = make_mle();
  CHECK(phi_eval(none, 0.0) == 0.0);
  CHECK(phi_eval(none, 77.0) == 0.0);
  CHECK(phi_sup(none) == 0.0);
  CHECK(phi_over_z_limit(none) == 0.0);

  CHECK_THROWS_AS(phi_eval(stein, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(phi_prime(stein, -1.0), std::invalid_argument);
}

TEST_CASE("mixture profile against frozen high-precision references") {
  struct Ref {
    int p;
    double z, value;
  };
  // 30-digit-arithmetic references
  const Ref refs[] = {
      {3, 0.5, 0.15582825626417683},  {3, 1.0, 0.29112509477279321},
      {3, 4.0, 0.77374130354992326},  {3, 10.0, 0.98297261208346691},
      {3, 50.0, 0.99999999992164571}, {5, 0.5, 0.29133931170771615},
      {5, 1.0, 0.56505049562819775},  {5, 4.0, 1.8303134631071011},
      {5, 10.0, 2.8267765784395296},  {10, 0.5, 0.3965946096761865},
      {10, 1.0, 0.78608546955598463}, {10, 4.0, 2.9481686791931695},
      {10, 10.0, 6.0900837357949272}, {10, 50.0, 7.999998191673902},
  };
  for (const Ref& r : refs) {
    CHECK(phi_eval(make_generalized_bayes(r.p), r.z) ==
          doctest::Approx(r.value).epsilon(1e-9));
  }

  // saturation plateau and the far-tail shortcut
  CHECK(phi_eval(make_generalized_bayes(10), 200.0) ==
        doctest::Approx(8.0).epsilon(1e-12));
  CHECK(phi_eval(make_generalized_bayes(10), 1e9) == 8.0);
  CHECK(phi_eval(make_generalized_bayes(10), 0.0) == 0.0);
  CHECK(phi_sup(make_generalized_bayes(10)) == 8.0);
}

TEST_CASE("mixture profile derivative at the origin is exact") {
  for (int p = 3; p <= 12; ++p) {
    const double expected = (p - 2.0) / p;
    CHECK(phi_prime(make_generalized_bayes(p), 0.0) ==
          doctest::Approx(expected).epsilon(1e-15));
    CHECK(phi_over_z_limit(make_generalized_bayes(p)) ==
          doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("profile derivative against frozen references and finite differences") {
  // frozen central differences from 30-digit arithmetic, p = 10
  struct Ref {
    double z, value;
  };
  const Ref refs[] = {{0.5, 0.786233102177},
                      {1.0, 0.771580569722},
                      {4.0, 0.664209301332},
                      {10.0, 0.373380633234}};
  const PhiSpec gb10 = make_generalized_bayes(10);
  for (const Ref& r : refs) {
    CHECK(phi_prime(gb10, r.z) == doctest::Approx(r.value).epsilon(1e-8));
  }

  // finite-difference oracle on moderate z where the quotient is well
  // conditioned (the derivative underflows relative to phi near saturation)
  auto fd = [](const PhiSpec& spec, double z) {
    const double h = 1e-5 * std::max(1.0, z);
    return (phi_eval(spec, z + h) - phi_eval(spec, z - h)) / (2.0 * h);
  };
  const std::vector<PhiSpec> specs = {make_generalized_bayes(3), make_generalized_bayes(10),
                                      make_stein_form(8.0, 8.0), make_stein_form(3.0, 0.5)};
  for (const PhiSpec& spec : specs) {
    for (double z : {1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 10.0}) {
      const double exact = phi_prime(spec, z);
      CHECK(fd(spec, z) == doctest::Approx(exact).epsilon(1e-6));
    }
  }
}

TEST_CASE("value-and-derivative bundle is consistent with the split calls") {
  const std::vector<PhiSpec> specs = {make_mle(), make_stein_form(4.0, 2.0),
                                      make_generalized_bayes(7)};
  for (const PhiSpec& spec : specs) {
    for (double z : {0.0, 0.3, 2.0, 17.0, 400.0}) {
      const PhiValue v = phi_value(spec, z);
      CHECK(v.value == doctest::Approx(phi_eval(spec, z)).epsilon(1e-14));
      CHECK(v.derivative == doctest::Approx(phi_prime(spec, z)).epsilon(1e-14));
    }
  }
}

TEST_CASE("mixture profile shape properties on the log grid") {
  const std::vector<double> zs = log_grid(1e-4, 1e6);
  for (int p = 3; p <= 12; ++p) {
    const PhiSpec spec = make_generalized_bayes(p);
    const double sat = static_cast<double>(p - 2);
    std::vector<double> vals(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) vals[i] = phi_eval(spec, zs[i]);

    for (std::size_t i = 0; i < zs.size(); ++i) {
      // non-negative and inside the envelope min(p-2, (p-2) z / p)
      CHECK(vals[i] >= 0.0);
      const double envelope = std::min(sat, sat * zs[i] / p);
      CHECK(vals[i] <= envelope * (1.0 + 1e-9) + 1e-300);

      if (i > 0) {
        // strictly increasing away from saturation; on the plateau the
        // evaluation may wobble by rounding, so only near-monotone there
        const bool saturated = sat - vals[i - 1] <= 1e-9 * sat;
        if (saturated) {
          CHECK(vals[i] >= vals[i - 1] - 1e-12 * sat);
        } else {
          CHECK(vals[i] > vals[i - 1]);
        }

        // phi(z)/z decreasing
        const double r_prev = vals[i - 1] / zs[i - 1];
        const double r_here = vals[i] / zs[i];
        CHECK(r_here <= r_prev * (1.0 + 1e-12));
      }
      if (i > 1) {
        // concavity: second divided differences non-positive up to rounding
        const double dd = second_divided_difference(zs[i - 2], vals[i - 2], zs[i - 1],
                                                    vals[i - 1], zs[i], vals[i]);
        CHECK(dd <= 1e-9);
      }
    }
    CHECK(std::abs(vals.back() - sat) <= 1e-3);
  }
}

TEST_CASE("rational profile shares the same shape properties") {
  const std::vector<double> zs = log_grid(1e-4, 1e6);
  for (const auto& [c1, c2] : std::vector<std::pair<double, double>>{
           {8.0, 8.0}, {2.0, 5.0}, {16.0, 1.0}}) {
    const PhiSpec spec = make_stein_form(c1, c2);
    std::vector<double> vals(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) vals[i] = phi_eval(spec, zs[i]);
    for (std::size_t i = 1; i < zs.size(); ++i) {
      CHECK(vals[i] >= 0.0);
      CHECK(vals[i] >= vals[i - 1]);
      CHECK(vals[i] / zs[i] <= vals[i - 1] / zs[i - 1] * (1.0 + 1e-12));
      if (i > 1) {
        CHECK(second_divided_difference(zs[i - 2], vals[i - 2], zs[i - 1], vals[i - 1],
                                        zs[i], vals[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("cached evaluator reproduces the quadrature profile") {
  for (int p : {3, 10}) {
    const PhiSpec spec = make_generalized_bayes(p);
    const CachedPhi cached(spec);
    // dense sweep across and beyond the tabulated window
    for (double z : log_grid(1e-9, 1e7, 1200)) {
      CHECK(std::abs(cached.value(z) - phi_eval(spec, z)) <= 1e-8);
      CHECK(std::abs(cached.derivative(z) - phi_prime(spec, z)) <= 1e-6);
    }
    CHECK(cached.value(0.0) == 0.0);
    CHECK(cached.ratio(0.0) == doctest::Approx((p - 2.0) / p).epsilon(1e-12));
    // ratio equals value / z away from the origin
    for (double z : {1e-6, 0.37, 12.0, 4000.0}) {
      CHECK(cached.ratio(z) == doctest::Approx(cached.value(z) / z).epsilon(1e-12));
    }
  }

  const CachedPhi stein(make_stein_form(8.0, 8.0));
  for (double z : {0.0, 0.5, 8.0, 100.0}) {
    CHECK(stein.value(z) == doctest::Approx(8.0 * z / (8.0 + z)).epsilon(1e-15));
  }
  CHECK(stein.ratio(0.0) == doctest::Approx(1.0).epsilon(1e-15));

  const CachedPhi classic(make_stein_form(8.0, 0.0));
  CHECK(std::isinf(classic.ratio(0.0)));
  CHECK(classic.value(3.0) == 8.0);

  const CachedPhi none(make_mle());
  CHECK(none.value(5.0) == 0.0);
  CHECK(none.ratio(0.0) == 0.0);
}

TEST_CASE("profile family metadata") {
  CHECK(phi_dimension(make_generalized_bayes(9)) == 9);
  CHECK(phi_dimension(make_mle()) == 0);
  CHECK(phi_dimension(make_stein_form(1.0, 1.0)) == 0);
}
