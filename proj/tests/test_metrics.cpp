#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "netscore/metrics.hpp"

using namespace netscore;

TEST_CASE("normalize_units divides by 1e6 and 1e9") {
  auto n = normalize_units(NetworkMetrics(70.6, 1'000'000, 1'000'000'000));
  CHECK(n.accuracy_percent == 70.6);
  CHECK(n.mparams == 1.0);
  CHECK(n.gmacs == 1.0);

  n = normalize_units(NetworkMetrics(50.0, 25'000'000, 2'000'000'000));
  CHECK(n.mparams == 25.0);
  CHECK(n.gmacs == 2.0);

  n = normalize_units(NetworkMetrics(57.5, 1'250'000, 860'000'000));
  CHECK(n.accuracy_percent == 57.5);
  CHECK(n.mparams == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(n.gmacs == doctest::Approx(0.86).epsilon(1e-12));
}

TEST_CASE("information density is accuracy per M-Params") {
  CHECK(information_density(NetworkMetrics(50.0, 25'000'000, 1)).value ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(information_density(NetworkMetrics(100.0, 1'000'000, 1)).value ==
        doctest::Approx(100.0).epsilon(1e-12));
  // Seed registry's SqueezeNet record.
  auto score = information_density(NetworkMetrics(57.5, 1'250'000, 860'000'000));
  CHECK(score.value == doctest::Approx(46.0).epsilon(1e-12));
  CHECK(score.kind == MetricKind::density);
}

TEST_CASE("netscore identity cases") {
  CHECK(compute_netscore(NetworkMetrics(100.0, 1'000'000, 1'000'000'000)).value ==
        doctest::Approx(80.0).epsilon(1e-12));
  // Accuracy-only config collapses to 20*log10(a).
  MetricConfig accuracy_only{1.0, 0.0, 0.0};
  CHECK(compute_netscore(NetworkMetrics(10.0, 123, 456'789), accuracy_only).value ==
        doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("netscore matches the ratio form on the seed MobileNetv1 record") {
  auto score = compute_netscore(NetworkMetrics(70.6, 4'240'000, 569'000'000));
  CHECK(score.kind == MetricKind::netscore);
  CHECK(score.value == doctest::Approx(70.13).epsilon(0.0001));
  double ratio = std::pow(70.6, 2.0) / (std::sqrt(4.24) * std::sqrt(0.569));
  CHECK(score.value == doctest::Approx(20.0 * std::log10(ratio)).epsilon(1e-12));
}

TEST_CASE("default config") {
  MetricConfig config = default_config();
  CHECK(config.alpha == 2.0);
  CHECK(config.beta == 0.5);
  CHECK(config.gamma == 0.5);
  CHECK(compute_netscore(NetworkMetrics(100.0, 1'000'000, 1'000'000'000), config).value ==
        doctest::Approx(80.0).epsilon(1e-12));

  // Dropping alpha from 2 to 1 removes exactly 20*log10(a).
  std::mt19937 rng(411);
  std::uniform_real_distribution<double> acc(0.5, 100.0);
  std::uniform_int_distribution<std::int64_t> count(1, 1'000'000'000);
  MetricConfig lowered{1.0, 0.5, 0.5};
  for (int i = 0; i < 200; ++i) {
    NetworkMetrics m(acc(rng), count(rng), count(rng));
    double diff = compute_netscore(m).value - compute_netscore(m, lowered).value;
    CHECK(diff == doctest::Approx(20.0 * std::log10(m.accuracy_percent())).epsilon(1e-9));
  }
}

TEST_CASE("construction rejects out-of-range inputs") {
  CHECK_THROWS_AS(NetworkMetrics(0.0, 1, 1), ValidationError);
  CHECK_THROWS_AS(NetworkMetrics(-5.0, 1, 1), ValidationError);
  CHECK_THROWS_AS(NetworkMetrics(100.5, 1, 1), ValidationError);
  CHECK_THROWS_AS(NetworkMetrics(50.0, 0, 1), ValidationError);
  CHECK_THROWS_AS(NetworkMetrics(50.0, 1, 0), ValidationError);
  CHECK_THROWS_AS(NetworkMetrics(50.0, -1, -1), ValidationError);
  CHECK_NOTHROW(NetworkMetrics(100.0, 1, 1));
  // 0.706 is a legal (if unusual) sub-percent accuracy; it is never rescaled.
  CHECK(compute_netscore(NetworkMetrics(0.706, 1'000'000, 1'000'000'000)).value ==
        doctest::Approx(40.0 * std::log10(0.706)).epsilon(1e-9));
}

TEST_CASE("metric_violations reports every violation") {
  CHECK(metric_violations(70.0, 1'000, 1'000).empty());
  CHECK(metric_violations(0.0, 1'000, 1'000).size() == 1);
  CHECK(metric_violations(0.0, 0, 1'000).size() == 2);
  CHECK(metric_violations(105.0, 0, 0).size() == 3);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate_config(MetricConfig{0.0, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate_config(MetricConfig{-1.0, 0.5, 0.5}), ValidationError);
  CHECK_NOTHROW(validate_config(MetricConfig{0.0, 0.5, 0.0}));
}

TEST_CASE("monotonicity in each argument") {
  std::mt19937 rng(1217);
  std::uniform_real_distribution<double> acc(0.5, 99.0);
  std::uniform_int_distribution<std::int64_t> count(1'000, 1'000'000'000);
  for (int i = 0; i < 300; ++i) {
    double a = acc(rng);
    std::int64_t p = count(rng), m = count(rng);
    double base = compute_netscore(NetworkMetrics(a, p, m)).value;
    CHECK(compute_netscore(NetworkMetrics(a + 0.5, p, m)).value > base);
    CHECK(compute_netscore(NetworkMetrics(a, 2 * p, m)).value < base);
    CHECK(compute_netscore(NetworkMetrics(a, p, 2 * m)).value < base);
  }
}

TEST_CASE("exact scale laws") {
  std::mt19937 rng(90210);
  std::uniform_real_distribution<double> acc(0.5, 100.0);
  std::uniform_real_distribution<double> unit(0.001, 1000.0);
  std::uniform_real_distribution<double> factor(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    double a = acc(rng), p = unit(rng), m = unit(rng), k = factor(rng);
    double base = netscore_value(a, p, m);
    if (a * k <= 100.0) {
      CHECK(netscore_value(a * k, p, m) - base ==
            doctest::Approx(2.0 * 20.0 * std::log10(k)).epsilon(1e-9));
    }
    CHECK(netscore_value(a, p * k, m) - base ==
          doctest::Approx(-0.5 * 20.0 * std::log10(k)).epsilon(1e-9));
    CHECK(netscore_value(a, p, m * k) - base ==
          doctest::Approx(-0.5 * 20.0 * std::log10(k)).epsilon(1e-9));
  }
}

TEST_CASE("ordering matches the linear ratio") {
  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> acc(0.5, 100.0);
  std::uniform_real_distribution<double> unit(0.01, 500.0);
  for (int i = 0; i < 500; ++i) {
    double a1 = acc(rng), p1 = unit(rng), m1 = unit(rng);
    double a2 = acc(rng), p2 = unit(rng), m2 = unit(rng);
    double r1 = a1 * a1 / std::sqrt(p1 * m1);
    double r2 = a2 * a2 / std::sqrt(p2 * m2);
    if (r1 == r2) continue;
    CHECK((netscore_value(a1, p1, m1) > netscore_value(a2, p2, m2)) == (r1 > r2));
  }
}

TEST_CASE("density is homogeneous in accuracy") {
  std::mt19937 rng(64);
  std::uniform_real_distribution<double> unit(0.01, 100.0);
  for (int i = 0; i < 300; ++i) {
    double a = unit(rng), p = unit(rng), k = unit(rng);
    CHECK(density_value(k * a, p) == doctest::Approx(k * density_value(a, p)).epsilon(1e-12));
  }
}
