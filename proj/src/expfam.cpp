#include "efld/expfam.hpp"

#include <cmath>

namespace efld {

namespace {

constexpr double kProbLo = 1e-300;
constexpr double kProbHi = 1.0 - 1e-16;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double clamp_prob(double p) { return std::min(std::max(p, kProbLo), kProbHi); }

}  // namespace

Vec ScaledParam::scaled() const {
    if (!(alpha > 0.0)) throw domain_error("ScaledParam: alpha must be > 0");
    Vec s(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) s[j] = theta[j] / alpha;
    return s;
}

double log_partition_scalar(const ExpFamilySpec& spec, double theta_alpha) {
    switch (spec.kind) {
        case Family::gaussian:
            return 0.5 * theta_alpha * theta_alpha;
        case Family::bernoulli_pm1: {
            const double a = std::fabs(theta_alpha);
            return a + std::log1p(std::exp(-2.0 * a));
        }
        case Family::bernoulli_01: {
            const double m = std::max(theta_alpha, 0.0);
            return m + std::log1p(std::exp(-std::fabs(theta_alpha)));
        }
    }
    throw domain_error("log_partition: unknown family");
}

double mean_param_scalar(const ExpFamilySpec& spec, double theta_alpha) {
    switch (spec.kind) {
        case Family::gaussian:
            return theta_alpha;
        case Family::bernoulli_pm1:
            return std::tanh(theta_alpha);
        case Family::bernoulli_01:
            return logistic(theta_alpha);
    }
    throw domain_error("mean_param: unknown family");
}

double variance_scalar(const ExpFamilySpec& spec, double theta_alpha) {
    switch (spec.kind) {
        case Family::gaussian:
            return 1.0;
        case Family::bernoulli_pm1: {
            const double t = std::tanh(theta_alpha);
            return 1.0 - t * t;
        }
        case Family::bernoulli_01: {
            const double p = logistic(theta_alpha);
            return p * (1.0 - p);
        }
    }
    throw domain_error("variance: unknown family");
}

double log_partition(const ExpFamilySpec& spec, const Vec& theta_alpha) {
    require_finite(theta_alpha, "log_partition");
    double s = 0.0;
    for (double t : theta_alpha) s += log_partition_scalar(spec, t);
    return s;
}

Vec mean_param(const ExpFamilySpec& spec, const Vec& theta_alpha) {
    require_finite(theta_alpha, "mean_param");
    Vec m(theta_alpha.size());
    for (std::size_t j = 0; j < theta_alpha.size(); ++j)
        m[j] = mean_param_scalar(spec, theta_alpha[j]);
    return m;
}

double plus_prob_pm1(double theta_alpha) { return clamp_prob(logistic(2.0 * theta_alpha)); }

NoiseDraw sample_noise(const ExpFamilySpec& spec, const ScaledParam& param, RngStream& rng) {
    if (!(param.alpha > 0.0)) throw domain_error("sample_noise: alpha must be > 0");
    require_finite(param.theta, "sample_noise");
    NoiseDraw out;
    out.xi.resize(param.theta.size());
    switch (spec.kind) {
        case Family::gaussian:
            for (std::size_t j = 0; j < out.xi.size(); ++j)
                out.xi[j] = param.theta[j] + param.alpha * rng.normal();
            break;
        case Family::bernoulli_pm1:
            for (std::size_t j = 0; j < out.xi.size(); ++j) {
                const double p = plus_prob_pm1(param.theta[j] / param.alpha);
                out.xi[j] = rng.uniform() < p ? 1.0 : -1.0;
            }
            break;
        case Family::bernoulli_01:
            for (std::size_t j = 0; j < out.xi.size(); ++j) {
                const double p = clamp_prob(logistic(param.theta[j] / param.alpha));
                out.xi[j] = rng.uniform() < p ? 1.0 : 0.0;
            }
            break;
    }
    return out;
}

bool in_support(const ExpFamilySpec& spec, double value) {
    switch (spec.support) {
        case SupportKind::real_line:
            return std::isfinite(value);
        case SupportKind::pm_one:
            return value == 1.0 || value == -1.0;
        case SupportKind::zero_one:
            return value == 0.0 || value == 1.0;
    }
    return false;
}

double sufficient_stat(const ExpFamilySpec& spec, double draw, double alpha) {
    return spec.kind == Family::gaussian ? draw / alpha : draw;
}

double log_density(const ExpFamilySpec& spec, const NoiseDraw& xi, const ScaledParam& param) {
    if (xi.xi.size() != param.theta.size())
        throw shape_error("log_density: draw/parameter size mismatch");
    if (!(param.alpha > 0.0)) throw domain_error("log_density: alpha must be > 0");
    double s = 0.0;
    for (std::size_t j = 0; j < xi.xi.size(); ++j) {
        const double x = xi.xi[j];
        if (!in_support(spec, x))
            throw domain_error("log_density: draw component " + std::to_string(j) +
                               " outside support");
        const double ta = param.theta[j] / param.alpha;
        if (spec.kind == Family::gaussian) {
            const double z = (x - param.theta[j]) / param.alpha;
            s += -0.5 * z * z - kLogSqrt2Pi - std::log(param.alpha);
        } else {
            s += x * ta - log_partition_scalar(spec, ta);
        }
    }
    return s;
}

double bregman_div(const ExpFamilySpec& spec, const Vec& theta1, const Vec& theta2) {
    require_same_size(theta1, theta2, "bregman_div");
    require_finite(theta1, "bregman_div");
    require_finite(theta2, "bregman_div");
    double s = 0.0;
    for (std::size_t j = 0; j < theta1.size(); ++j) {
        s += log_partition_scalar(spec, theta1[j]) - log_partition_scalar(spec, theta2[j]) -
             mean_param_scalar(spec, theta2[j]) * (theta1[j] - theta2[j]);
    }
    // convexity guarantees s >= 0; absorb rounding noise near zero
    if (s < 0.0 && s > -1e-12) s = 0.0;
    return s;
}

}  // namespace efld
