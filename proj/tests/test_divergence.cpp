#include <doctest.h>

#include <cmath>

#include "efld/divergence.hpp"
#include "efld/rng.hpp"

using namespace efld;

namespace {

FiniteDist rand_dist(std::size_t atoms, RngStream& rng) {
    Vec w(atoms);
    for (double& x : w) x = -std::log(rng.uniform_pos());
    return FiniteDist::from_weights(std::move(w));
}

}  // namespace

TEST_CASE("finite distribution validation") {
    CHECK_THROWS_AS(FiniteDist({0.5, 0.6}), domain_error);
    CHECK_THROWS_AS(FiniteDist({1.5, -0.5}), domain_error);
    CHECK_THROWS_AS(FiniteDist(Vec{}), domain_error);
    CHECK_NOTHROW(FiniteDist({0.25, 0.75}));
}

TEST_CASE("squared Hellinger examples") {
    const FiniteDist p({0.5, 0.5}), q({0.9, 0.1});
    CHECK(hellinger_sq(p, p) == 0.0);
    CHECK(hellinger_sq(FiniteDist({1.0, 0.0}), FiniteDist({0.0, 1.0})) == 1.0);
    // high-precision evaluation of 0.5*((sqrt(.5)-sqrt(.9))^2+(sqrt(.5)-sqrt(.1))^2)
    CHECK(hellinger_sq(p, q) == doctest::Approx(0.1055728090000841214).epsilon(1e-15));
    CHECK_THROWS_AS(hellinger_sq(p, FiniteDist({1.0})), shape_error);
}

TEST_CASE("KL examples and absolute continuity") {
    const FiniteDist p({1.0, 0.0}), q({0.5, 0.5});
    CHECK(kl_div(q, q) == 0.0);
    CHECK(kl_div(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(kl_div(q, p), domain_error);  // q puts mass where p has none

    RngStream rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const FiniteDist a = rand_dist(16, rng), b = rand_dist(16, rng);
        CHECK(kl_div(a, b) >= 2.0 * hellinger_sq(a, b) - 1e-12);
    }
}

TEST_CASE("total variation and the Pinsker route") {
    const FiniteDist p({1.0, 0.0}), q({0.0, 1.0});
    CHECK(tv_dist(p, p) == 0.0);
    CHECK(tv_dist(p, q) == 1.0);
    RngStream rng(37);
    for (int trial = 0; trial < 1000; ++trial) {
        const FiniteDist a = rand_dist(2 + rng.uniform_int(30), rng);
        const FiniteDist b = rand_dist(a.size(), rng);
        CHECK(tv_dist(a, b) <= std::sqrt(0.5 * kl_div(a, b)) + 1e-12);
    }
}

TEST_CASE("lsd examples, errors and permutation invariance") {
    const FiniteDist half({0.5, 0.5});
    CHECK(lsd(half, half, half) == 0.0);
    CHECK(lsd(FiniteDist({1.0, 0.0}), FiniteDist({0.0, 1.0}), half) == 4.0);
    CHECK_THROWS_AS(lsd(FiniteDist({1.0, 0.0}), FiniteDist({0.5, 0.5}),
                        FiniteDist({0.0, 1.0})),
                    domain_error);

    RngStream rng(41);
    const FiniteDist a = rand_dist(8, rng), b = rand_dist(8, rng), c = rand_dist(8, rng);
    const double base = lsd(a, b, c);
    // apply one fixed permutation to all three supports simultaneously
    const std::size_t perm[8] = {3, 1, 7, 0, 5, 2, 6, 4};
    Vec pa(8), pb(8), pc(8);
    for (std::size_t i = 0; i < 8; ++i) {
        pa[i] = a.probs[perm[i]];
        pb[i] = b.probs[perm[i]];
        pc[i] = c.probs[perm[i]];
    }
    CHECK(lsd(FiniteDist(pa), FiniteDist(pb), FiniteDist(pc)) ==
          doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("product {-1,+1} distribution enumerates exactly") {
    ProductBernoulliPM1 prod({0.0, 0.0});
    const FiniteDist d = prod.to_finite_dist();
    for (double pr : d.probs) CHECK(pr == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(ProductBernoulliPM1(Vec(13, 0.0)), domain_error);
}

TEST_CASE("gaussian lsd agrees with a dense Riemann-sum oracle") {
    const ScalarGaussianTriple t{0.1, -0.1, 0.0, 1.0};
    const double quad = lsd_gaussian(t);

    // independent brute force: 1e7-point midpoint rule over the same window
    const double lo = -12.0, hi = 12.0;
    const long n = 10000000;
    const double dx = (hi - lo) / n;
    double riemann = 0.0;
    for (long i = 0; i < n; ++i) {
        const double x = lo + (i + 0.5) * dx;
        auto phi = [&](double mu) {
            const double z = x - mu;
            return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
        };
        const double d = phi(t.mu_b) - phi(t.mu_b_prime);
        riemann += d * d / phi(t.mu_a) * dx;
    }
    CHECK(quad == doctest::Approx(riemann).epsilon(1e-5));
    // closed form for equal-variance gaussians corroborates both routes
    // (quadrature tolerance is 1e-9 absolute, so compare at 1e-6 relative)
    CHECK(quad == doctest::Approx(0.04000066667000000794).epsilon(1e-6));
    CHECK(lsd_gaussian({0.3, 0.3, -0.2, 0.8}) == 0.0);
}

TEST_CASE("gaussian lsd rejects means far beyond the admissible scaling") {
    const ScalarGaussianTriple bad{60.0, -60.0, 0.0, 0.05};
    CHECK_THROWS_AS(lsd_gaussian(bad), numeric_error);
    try {
        lsd_gaussian(bad);
    } catch (const numeric_error& e) {
        CHECK(std::string(e.what()).find("floor") != std::string::npos);
    }
}

TEST_CASE("mixture KL pair obeys its closed-form bound") {
    RngStream rng(43);
    const FiniteDist q = rand_dist(32, rng);
    CHECK(mixture_kl_pair(q, q, rand_dist(32, rng), 0.3).exact_kl == 0.0);

    for (int trial = 0; trial < 1000; ++trial) {
        const FiniteDist a = rand_dist(32, rng), b = rand_dist(32, rng),
                         r = rand_dist(32, rng);
        const auto pair = mixture_kl_pair(a, b, r, 0.1);  // s = 5/50
        CHECK(pair.exact_kl <= pair.lemma_bound + 1e-10);
    }

    const FiniteDist a = rand_dist(32, rng), b = rand_dist(32, rng), r = rand_dist(32, rng);
    const auto tiny = mixture_kl_pair(a, b, r, 1e-6);
    CHECK(tiny.exact_kl <= 1e-11 * lsd(a, b, r));
    CHECK_THROWS_AS(mixture_kl_pair(a, b, r, 0.0), domain_error);
    CHECK_THROWS_AS(mixture_kl_pair(a, b, r, 1.0), domain_error);
}

TEST_CASE("divergence upper bound from parameter distance") {
    CHECK(lsd_upper_bound({{0.5, 0.5}, 1.0}, {{0.5, 0.5}, 1.0}, 1.0) == 0.0);
    CHECK(lsd_upper_bound({{0.3, -0.4}, 1.0}, {{0.0, 0.0}, 1.0}, 1.0) ==
          doctest::Approx(1.25).epsilon(1e-15));
    CHECK_THROWS_AS(lsd_upper_bound({{0.1}, 1.0}, {{0.1}, 2.0}, 1.0), domain_error);
}

TEST_CASE("admissible scaling floor") {
    CHECK(alpha_floor(0.0, 1.0) == 0.0);
    CHECK(alpha_floor(1.0, 1.0) == doctest::Approx(2.8284271247461901).epsilon(1e-15));
    CHECK(alpha_floor(2.0, 0.25) == doctest::Approx(2.8284271247461901).epsilon(1e-15));
    CHECK_THROWS_AS(alpha_floor(-1.0, 1.0), domain_error);
}

TEST_CASE("enumerated product distributions satisfy the divergence bound") {
    RngStream rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t p = 8;
        Vec gb(p), gbp(p), ga(p);
        for (std::size_t j = 0; j < p; ++j) {
            gb[j] = rng.normal();
            gbp[j] = rng.normal();
            ga[j] = rng.normal();
        }
        const double delta =
            std::sqrt(std::max({dist_sq(gb, gbp), dist_sq(gb, ga), dist_sq(gbp, ga)}));
        const double alpha = alpha_floor(delta, 1.0) * 1.5 + 1e-9;
        Vec tb(p), tbp(p), ta(p);
        for (std::size_t j = 0; j < p; ++j) {
            tb[j] = gb[j] / alpha;
            tbp[j] = gbp[j] / alpha;
            ta[j] = ga[j] / alpha;
        }
        const double exact = lsd(ProductBernoulliPM1(tb).to_finite_dist(),
                                 ProductBernoulliPM1(tbp).to_finite_dist(),
                                 ProductBernoulliPM1(ta).to_finite_dist());
        CHECK(exact <= lsd_upper_bound({gb, alpha}, {gbp, alpha}, 1.0) + 1e-8);
    }
}
