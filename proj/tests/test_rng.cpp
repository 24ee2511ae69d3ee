#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "coopbatch/rng.hpp"
#include "oracles.hpp"

using namespace coopbatch;

TEST_CASE("hash_uniform is a pure function of seed and ids") {
  CHECK(hash_uniform(42, {1, 2, 3}) == hash_uniform(42, {1, 2, 3}));
  CHECK(hash_uniform(42, {1, 2, 3}) != hash_uniform(43, {1, 2, 3}));
  CHECK(hash_uniform(42, {1, 2, 3}) != hash_uniform(42, {1, 2, 4}));
  const double u = hash_uniform(7, {0});
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
}

TEST_CASE("hash_uniform passes KS against U(0,1)") {
  const std::size_t n = 100000;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = hash_uniform(123, {9, i});
  CHECK(oracle::ks_statistic_uniform(xs) < oracle::ks_critical_1pct(n));
}

TEST_CASE("changing one id component changes the draw") {
  std::size_t distinct = 0;
  const std::size_t pairs = 10000;
  for (std::size_t i = 0; i < pairs; ++i)
    if (hash_uniform(5, {i, 0}) != hash_uniform(5, {i, 1})) ++distinct;
  CHECK(static_cast<double>(distinct) / pairs >= 0.999);
}

TEST_CASE("std_normal moments") {
  const std::size_t n = 100000;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = std_normal(77, {i});
  const auto mv = oracle::mean_var(xs);
  CHECK(std::abs(mv.mean) <= 0.02);
  CHECK(mv.var >= 0.97);
  CHECK(mv.var <= 1.03);
  CHECK(std_normal(77, {3}) == std_normal(77, {3}));
}

TEST_CASE("probability integral transform of std_normal is uniform") {
  const std::size_t n = 100000;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = phi(std_normal(31, {i}));
  CHECK(oracle::ks_statistic_uniform(xs) < oracle::ks_critical_1pct(n));
}

TEST_CASE("phi basics") {
  CHECK(phi(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  for (double x = -4.0; x <= 4.0; x += 0.37)
    CHECK(std::abs(phi(-x) - (1.0 - phi(x))) < 1e-12);
  CHECK_THROWS_AS(phi(std::numeric_limits<double>::quiet_NaN()), InputError);
  CHECK_THROWS_AS(phi(std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("phi matches quadrature reference within 1e-7") {
  double prev = -1.0;
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double got = phi(x);
    CHECK(std::abs(got - oracle::simpson_phi(x)) < 1e-7);
    CHECK(got > prev);  // strictly increasing on the grid
    prev = got;
  }
}

TEST_CASE("inverse_phi inverts phi") {
  for (double p = 0.001; p < 1.0; p += 0.013)
    CHECK(phi(inverse_phi(p)) == doctest::Approx(p).epsilon(1e-10));
  CHECK_THROWS_AS(inverse_phi(0.0), InputError);
  CHECK_THROWS_AS(inverse_phi(1.0), InputError);
}

TEST_CASE("interp_variate endpoints are exact") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    CHECK(interp_variate(11, 22, 0.0, {i}) == phi(std_normal(11, {i})));
    CHECK(interp_variate(11, 22, 1.0, {i}) == phi(std_normal(22, {i})));
  }
  CHECK_THROWS_AS(interp_variate(1, 2, -0.1, {0}), InputError);
  CHECK_THROWS_AS(interp_variate(1, 2, 1.1, {0}), InputError);
}

TEST_CASE("interp_variate at c=0.5 combines the normals equally") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const double n1 = std_normal(11, {i});
    const double n2 = std_normal(22, {i});
    const double expected = phi((n1 + n2) / std::sqrt(2.0));
    CHECK(interp_variate(11, 22, 0.5, {i}) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("interp_variate stays uniform at interior c") {
  const std::size_t n = 100000;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = interp_variate(3, 4, 0.3, {i});
  CHECK(oracle::ks_statistic_uniform(xs) < oracle::ks_critical_1pct(n));
}

TEST_CASE("adjacent iterations stay highly correlated under large kappa") {
  const std::uint64_t kappa = 64;
  const std::size_t n = 10000;
  std::vector<double> a(n), b(n);
  const double c0 = 3.0 / static_cast<double>(kappa);
  const double c1 = 4.0 / static_cast<double>(kappa);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = interp_variate(5, 6, c0, {i});
    b[i] = interp_variate(5, 6, c1, {i});
  }
  const double pi = 3.14159265358979323846;
  CHECK(oracle::pearson(a, b) >
        std::cos(pi / (2.0 * static_cast<double>(kappa))) - 0.05);
}

TEST_CASE("schedule contribution ramps by 1/kappa") {
  SeedSchedule s = SeedSchedule::make(4, 99);
  std::vector<double> cs;
  for (int i = 0; i < 4; ++i) {
    cs.push_back(s.contribution());
    s = schedule_advance(s);
  }
  CHECK(cs == std::vector<double>{0.0, 0.25, 0.5, 0.75});
  CHECK(s.contribution() == 0.0);  // wrapped into the next group
}

TEST_CASE("schedule rotates z1 <- z2 at group boundaries") {
  SeedSchedule s = SeedSchedule::make(4, 99);
  const std::uint64_t old_z2 = s.z2;
  for (int i = 0; i < 4; ++i) s = schedule_advance(s);
  CHECK(s.z1 == old_z2);
  CHECK(s.z2 != old_z2);
}

TEST_CASE("kappa=1 rotates every step and keeps c at zero") {
  SeedSchedule s = SeedSchedule::make(1, 7);
  std::uint64_t prev = s.z1;
  for (int i = 0; i < 10; ++i) {
    CHECK(s.contribution() == 0.0);
    CHECK(s.smoothing_active() == false);
    s = schedule_advance(s);
    CHECK(s.z1 != prev);
    prev = s.z1;
  }
}

TEST_CASE("kappa=inf never rotates") {
  SeedSchedule s = SeedSchedule::make(kKappaInfinity, 7);
  const std::uint64_t z1 = s.z1, z2 = s.z2;
  for (int i = 0; i < 1000; ++i) s = schedule_advance(s);
  CHECK(s.z1 == z1);
  CHECK(s.z2 == z2);
  CHECK(s.contribution() == 0.0);
  CHECK_THROWS_AS(SeedSchedule::make(0, 1), InputError);
}
