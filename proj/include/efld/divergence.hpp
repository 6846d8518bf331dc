#pragma once

#include <cstdint>
#include <utility>

#include "efld/expfam.hpp"
#include "efld/vecops.hpp"

namespace efld {

// Exact small-instance divergence machinery: finite distributions with
// enumerated supports, the chi-square style divergence
// lsd(P,P',A) = sum (p - p')^2 / a used by the stability analysis, and the
// mixture-KL bound. Everything here is an oracle: exact enumeration or
// controlled quadrature, no sampling.

struct FiniteDist {
    Vec probs;

    // Validates: support size 1..4096, entries >= 0, total within 1e-12 of 1.
    explicit FiniteDist(Vec p);

    // Normalizes nonnegative weights to a distribution.
    static FiniteDist from_weights(Vec w);

    std::size_t size() const { return probs.size(); }
};

// Product of independent {-1,+1} Bernoulli components at scaled natural
// parameters theta_alpha (dimension <= 12); expands to the exact 2^p-atom
// distribution, atom index bit j set meaning xi_j = +1.
struct ProductBernoulliPM1 {
    Vec theta_alpha;

    explicit ProductBernoulliPM1(Vec t);
    FiniteDist to_finite_dist() const;
};

// Three univariate Gaussians with shared variance alpha^2.
struct ScalarGaussianTriple {
    double mu_b;
    double mu_b_prime;
    double mu_a;
    double alpha;
};

// Squared Hellinger divergence, 0.5 * sum (sqrt(p) - sqrt(q))^2, in [0,1].
double hellinger_sq(const FiniteDist& p, const FiniteDist& q);

// KL divergence sum p log(p/q). Atoms with p=0 contribute 0; p>0 with q=0
// is an absolute-continuity violation and raises a domain error.
double kl_div(const FiniteDist& p, const FiniteDist& q);

// Total variation with the 1/2 convention: 0.5 * sum |p - q|.
double tv_dist(const FiniteDist& p, const FiniteDist& q);

// sum_i (p_i - p'_i)^2 / a_i. Atoms where a=0 and p=p' contribute 0; a=0
// with p != p' raises a domain error.
double lsd(const FiniteDist& p_b, const FiniteDist& p_b_prime, const FiniteDist& p_a);

// Same divergence for the scalar Gaussian triple, via adaptive Simpson
// quadrature on [min(mu)-12a, max(mu)+12a] with 1e-9 absolute tolerance.
double lsd_gaussian(const ScalarGaussianTriple& t);

// KL( sQ+(1-s)R || sQ'+(1-s)R ) paired with its closed-form upper bound
// s^2/(1-s) * lsd(Q,Q',R). exact_kl <= lemma_bound always.
struct MixtureKlPair {
    double exact_kl;
    double lemma_bound;
};
MixtureKlPair mixture_kl_pair(const FiniteDist& q, const FiniteDist& q_prime,
                              const FiniteDist& r, double s);

// Parameter-distance bound on the divergence: 5 * c2 * ||tb/a - tb'/a||^2.
// Requires both parameters to carry the same scaling alpha.
double lsd_upper_bound(const ScaledParam& theta_b, const ScaledParam& theta_b_prime, double c2);

// Minimal admissible scaling sqrt(8*c2) * delta for a maximal pairwise
// gradient distance delta.
double alpha_floor(double delta, double c2);

// Adaptive Simpson integration (exposed for the quadrature tests).
double adaptive_simpson(double (*f)(double, const void*), const void* ctx, double lo, double hi,
                        double abs_tol);

}  // namespace efld
