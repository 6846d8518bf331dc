#include <doctest.h>

#include <cmath>

#include "efld/expfam.hpp"

using namespace efld;

namespace {
const ExpFamilySpec kGauss = ExpFamilySpec::gaussian();
const ExpFamilySpec kPm1 = ExpFamilySpec::bernoulli_pm1();
const ExpFamilySpec kB01 = ExpFamilySpec::bernoulli_01();
}  // namespace

TEST_CASE("log partition closed forms") {
    CHECK(log_partition(kGauss, {2.0}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(log_partition(kPm1, {0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    // high-precision series value for log(e^{-0.7} + e^{0.7})
    CHECK(log_partition(kPm1, {0.7}) ==
          doctest::Approx(0.9204174099184509266048327).epsilon(1e-15));
    CHECK(log_partition(kB01, {0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("log partition is stable at large parameters") {
    for (double t : {1e3, -1e3, 847.0}) {
        CHECK(std::isfinite(log_partition(kPm1, {t})));
        CHECK(std::isfinite(log_partition(kB01, {t})));
        CHECK(log_partition(kPm1, {t}) == doctest::Approx(std::fabs(t)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(log_partition(kPm1, {std::nan("")}), domain_error);
}

TEST_CASE("mean parameter closed forms") {
    CHECK(mean_param(kPm1, {0.0})[0] == 0.0);
    CHECK(mean_param(kPm1, {1.0})[0] == doctest::Approx(0.7615941559557649).epsilon(1e-15));
    CHECK(mean_param(kGauss, {3.5})[0] == 3.5);
    CHECK(mean_param(kB01, {0.0})[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("numeric gradient of log partition matches the mean parameter") {
    const double h = 1e-5;
    for (const auto& spec : {kGauss, kPm1, kB01}) {
        for (int i = 0; i <= 200; ++i) {
            const double t = -20.0 + 40.0 * i / 200.0;
            const double fd =
                (log_partition_scalar(spec, t + h) - log_partition_scalar(spec, t - h)) /
                (2.0 * h);
            const double mean = mean_param_scalar(spec, t);
            CHECK(std::fabs(fd - mean) <=
                  1e-6 * (std::fabs(mean) + std::fabs(fd)) + 1e-9);
        }
    }
}

TEST_CASE("numeric curvature of the log partition stays within [0, c2]") {
    const double h = 1e-3;
    for (const auto& spec : {kGauss, kPm1, kB01}) {
        for (int i = 0; i <= 400; ++i) {
            const double t = -20.0 + 40.0 * i / 400.0;
            const double dd = (log_partition_scalar(spec, t + h) -
                               2.0 * log_partition_scalar(spec, t) +
                               log_partition_scalar(spec, t - h)) /
                              (h * h);
            CHECK(dd >= -1e-6);
            CHECK(dd <= spec.c2 + 1e-6);
            CHECK(variance_scalar(spec, t) <= spec.c2 + 1e-15);
        }
    }
}

TEST_CASE("sampler: saturated {-1,+1} parameter behaves as a sure sign") {
    RngStream rng(7);
    ScaledParam param{{50.0, -50.0}, 1.0};
    for (int i = 0; i < 1000; ++i) {
        const NoiseDraw xi = sample_noise(kPm1, param, rng);
        CHECK(xi.xi[0] == 1.0);
        CHECK(xi.xi[1] == -1.0);
    }
}

TEST_CASE("sampler: symmetric {-1,+1} draws have near-zero mean") {
    RngStream rng(11);
    ScaledParam param{{0.0}, 1.0};
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += sample_noise(kPm1, param, rng).xi[0];
    CHECK(std::fabs(sum / n) < 4e-3);
}

TEST_CASE("sampler: gaussian moments match the declared law") {
    RngStream rng(13);
    ScaledParam param{{0.0}, 1.0};
    double sum = 0.0, sum_sq = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double x = sample_noise(kGauss, param, rng).xi[0];
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::fabs(mean) < 5.0 / std::sqrt(double(n)));
    CHECK(std::fabs(var - 1.0) < 0.01);
}

TEST_CASE("sampler law: sufficient-statistic mean and variance per family") {
    // mean within 5 standard errors of the mean parameter; variance <= c2 * 1.01
    struct Case {
        ExpFamilySpec spec;
        double theta, alpha;
    };
    const Case cases[] = {{kGauss, 0.7, 2.0}, {kPm1, 0.4, 1.0}, {kB01, -0.3, 1.0}};
    const int n = 1000000;
    for (const auto& c : cases) {
        RngStream rng(17);
        ScaledParam param{{c.theta}, c.alpha};
        const double ta = c.theta / c.alpha;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = sufficient_stat(c.spec, sample_noise(c.spec, param, rng).xi[0],
                                             c.alpha);
            sum += s;
            sum_sq += s * s;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        const double se = std::sqrt(variance_scalar(c.spec, ta) / n);
        CHECK(std::fabs(mean - mean_param_scalar(c.spec, ta)) <= 5.0 * se);
        CHECK(var <= c.spec.c2 * 1.01);
    }
}

TEST_CASE("sampler determinism") {
    ScaledParam param{{0.3, -0.2}, 0.5};
    for (const auto& spec : {kGauss, kPm1, kB01}) {
        RngStream a(99), b(99);
        for (int i = 0; i < 50; ++i)
            CHECK(sample_noise(spec, param, a).xi == sample_noise(spec, param, b).xi);
    }
}

TEST_CASE("log density closed forms and support checks") {
    CHECK(log_density(kPm1, {{1.0}}, {{0.0}, 1.0}) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(log_density(kPm1, {{0.5}}, {{0.0}, 1.0}), domain_error);
    CHECK_THROWS_AS(log_density(kB01, {{-1.0}}, {{0.0}, 1.0}), domain_error);

    // normalization over {-1,+1}^3 at random parameters
    RngStream rng(5);
    Vec theta(3);
    for (double& t : theta) t = rng.normal();
    ScaledParam param{theta, 1.3};
    double total = 0.0;
    for (int m = 0; m < 8; ++m) {
        NoiseDraw xi{{m & 1 ? 1.0 : -1.0, m & 2 ? 1.0 : -1.0, m & 4 ? 1.0 : -1.0}};
        total += std::exp(log_density(kPm1, xi, param));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // gaussian mode density equals the direct normal formula
    const double alpha = 0.7, theta0 = 1.9;
    const double direct = -std::log(std::sqrt(2.0 * 3.14159265358979323846) * alpha);
    CHECK(log_density(kGauss, {{theta0}}, {{theta0}, alpha}) ==
          doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("bregman divergence examples and smoothness bound") {
    CHECK(bregman_div(kPm1, {0.4, -1.0}, {0.4, -1.0}) == 0.0);
    CHECK(bregman_div(kGauss, {1.0}, {0.0}) == doctest::Approx(0.5).epsilon(1e-15));
    const double d = bregman_div(kPm1, {0.3}, {-0.2});
    CHECK(d >= 0.0);
    CHECK(d <= 0.25);  // c2 * |0.3 - (-0.2)|^2

    RngStream rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& spec = trial % 2 ? kPm1 : kB01;
        Vec t1(3), t2(3);
        for (int j = 0; j < 3; ++j) {
            t1[j] = 3.0 * rng.normal();
            t2[j] = 3.0 * rng.normal();
        }
        const double v = bregman_div(spec, t1, t2);
        CHECK(v >= 0.0);
        CHECK(v <= spec.c2 * dist_sq(t1, t2) + 1e-12);
    }
}

TEST_CASE("{-1,+1} mean lower bound on [-1,1]") {
    const double c = std::tanh(1.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = -1.0 + 2.0 * i / 9999.0;
        CHECK(std::fabs(std::tanh(x)) >= c * std::fabs(x));
    }
}
