#include "coopbatch/rng.hpp"

#include <cmath>

namespace coopbatch {

double phi(double x) {
  if (!std::isfinite(x)) throw InputError("phi: non-finite argument");
  // 0.5 * erfc(-x / sqrt(2)); libm erfc is accurate to ~1 ulp.
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Acklam's rational approximation to the normal quantile (|rel err| < 1.2e-9),
// plus one Halley step against phi to push it to near machine precision.
double inverse_phi(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("inverse_phi: p outside (0,1)");

  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};

  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement.
  const double e = phi(x) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double std_normal(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  return normal_from_bits(hash_bits(seed, ids));
}

double interp_variate(std::uint64_t z1, std::uint64_t z2, double c,
                      std::initializer_list<std::uint64_t> ids) {
  if (!(c >= 0.0 && c <= 1.0)) throw InputError("interp_variate: c outside [0,1]");
  if (c == 0.0) return phi(std_normal(z1, ids));
  if (c == 1.0) return phi(std_normal(z2, ids));
  const double angle = c * 1.5707963267948966192;  // c * pi/2
  const double n = std::cos(angle) * std_normal(z1, ids) +
                   std::sin(angle) * std_normal(z2, ids);
  return phi(n);
}

SeedSchedule SeedSchedule::make(std::uint64_t kappa, std::uint64_t root_seed) {
  if (kappa == 0) throw InputError("SeedSchedule: kappa must be >= 1 (or infinity)");
  SeedSchedule s;
  s.kappa = kappa;
  s.z1 = hash_bits(root_seed, {kStreamFresh, 1});
  s.z2 = hash_bits(root_seed, {kStreamFresh, 2});
  s.iteration = 0;
  return s;
}

SeedSchedule schedule_advance(SeedSchedule s) {
  s.iteration += 1;
  if (s.kappa != kKappaInfinity && s.iteration % s.kappa == 0) {
    s.z1 = s.z2;
    s.z2 = hash_bits(s.z2, {kStreamFresh, s.iteration});
  }
  return s;
}

}  // namespace coopbatch
