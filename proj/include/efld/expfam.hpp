#pragma once

#include "efld/rng.hpp"
#include "efld/vecops.hpp"

namespace efld {

// Component-wise independent exponential family noise in scaled
// natural-parameter form. Three instances are provided: Gaussian (SGLD
// noise), Bernoulli over {-1,+1} (noisy sign updates) and Bernoulli over
// {0,1}.

enum class Family { gaussian, bernoulli_pm1, bernoulli_01 };

enum class SupportKind { real_line, pm_one, zero_one };

struct ExpFamilySpec {
    Family kind;
    SupportKind support;
    double c2;  // sup of the scalar psi'' (analytic constant per family)

    static ExpFamilySpec gaussian() { return {Family::gaussian, SupportKind::real_line, 1.0}; }
    static ExpFamilySpec bernoulli_pm1() {
        return {Family::bernoulli_pm1, SupportKind::pm_one, 1.0};
    }
    static ExpFamilySpec bernoulli_01() {
        return {Family::bernoulli_01, SupportKind::zero_one, 0.25};
    }
};

// Natural parameter theta with its scaling alpha > 0. The scaled parameter
// used by densities and samplers is theta/alpha, computed on demand; theta
// itself is stored unscaled (for EFLD it is the mini-batch gradient).
struct ScaledParam {
    Vec theta;
    double alpha = 1.0;

    Vec scaled() const;
};

struct NoiseDraw {
    Vec xi;
};

// Scalar log-partition psi(theta_alpha), numerically stable for |theta|
// up to ~1e3 (log-sum-exp forms for the Bernoulli families).
double log_partition_scalar(const ExpFamilySpec& spec, double theta_alpha);

// Scalar mean parameter psi'(theta_alpha).
double mean_param_scalar(const ExpFamilySpec& spec, double theta_alpha);

// Scalar psi''(theta_alpha); every family satisfies 0 <= psi'' <= c2.
double variance_scalar(const ExpFamilySpec& spec, double theta_alpha);

// Sum over components of psi; domain error on non-finite input.
double log_partition(const ExpFamilySpec& spec, const Vec& theta_alpha);

// Component-wise gradient of the log-partition (expectation parameter).
Vec mean_param(const ExpFamilySpec& spec, const Vec& theta_alpha);

// One draw with independent components. Gaussian draws are in x-space with
// law N(theta_j, alpha^2) per component, so that rho*xi reproduces the SGLD
// increment under the (rho, alpha) = (eta, sigma/eta) mapping. Bernoulli
// draws are the support values themselves. Deterministic given rng state.
NoiseDraw sample_noise(const ExpFamilySpec& spec, const ScaledParam& param, RngStream& rng);

// Log density of a draw. Discrete families use base measure 1; the Gaussian
// uses the alpha-dependent base measure, i.e. the N(theta, alpha^2) density.
// Draws outside the declared support raise a domain error.
double log_density(const ExpFamilySpec& spec, const NoiseDraw& xi, const ScaledParam& param);

// Bregman divergence d_psi(t1, t2) = psi(t1) - psi(t2) - <psi'(t2), t1-t2>
// between two scaled natural parameter vectors. Nonnegative.
double bregman_div(const ExpFamilySpec& spec, const Vec& theta1, const Vec& theta2);

// P(+1) for the {-1,+1} Bernoulli at scaled parameter theta_alpha, clamped
// to [1e-300, 1-1e-16] so saturated parameters never produce NaN.
double plus_prob_pm1(double theta_alpha);

bool in_support(const ExpFamilySpec& spec, double value);

// Sufficient statistic of a draw component: draw/alpha for the Gaussian
// (Example-1 scaling), the draw itself for the discrete families.
double sufficient_stat(const ExpFamilySpec& spec, double draw, double alpha);

}  // namespace efld
