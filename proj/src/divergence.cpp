#include "efld/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace efld {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;

void require_equal_support(const FiniteDist& p, const FiniteDist& q, const char* where) {
    if (p.size() != q.size())
        throw shape_error(std::string(where) + ": support size mismatch " +
                          std::to_string(p.size()) + " vs " + std::to_string(q.size()));
}

}  // namespace

FiniteDist::FiniteDist(Vec p) : probs(std::move(p)) {
    if (probs.empty() || probs.size() > 4096)
        throw domain_error("FiniteDist: support size must be in 1..4096, got " +
                           std::to_string(probs.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0))
            throw domain_error("FiniteDist: negative probability at atom " + std::to_string(i));
        total += probs[i];
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw domain_error("FiniteDist: probabilities sum to " + std::to_string(total));
}

FiniteDist FiniteDist::from_weights(Vec w) {
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) throw domain_error("FiniteDist: negative weight");
        total += x;
    }
    if (!(total > 0.0)) throw domain_error("FiniteDist: zero total weight");
    for (double& x : w) x /= total;
    // renormalize the largest atom so the total is exactly representable
    double s = 0.0;
    for (double x : w) s += x;
    auto it = std::max_element(w.begin(), w.end());
    *it += 1.0 - s;
    return FiniteDist(std::move(w));
}

ProductBernoulliPM1::ProductBernoulliPM1(Vec t) : theta_alpha(std::move(t)) {
    if (theta_alpha.empty() || theta_alpha.size() > 12)
        throw domain_error("ProductBernoulliPM1: dimension must be in 1..12");
    require_finite(theta_alpha, "ProductBernoulliPM1");
}

FiniteDist ProductBernoulliPM1::to_finite_dist() const {
    const std::size_t p = theta_alpha.size();
    Vec plus(p), minus(p);
    for (std::size_t j = 0; j < p; ++j) {
        plus[j] = plus_prob_pm1(theta_alpha[j]);
        minus[j] = 1.0 - plus[j];
    }
    Vec atoms(std::size_t(1) << p);
    for (std::size_t m = 0; m < atoms.size(); ++m) {
        double pr = 1.0;
        for (std::size_t j = 0; j < p; ++j) pr *= (m >> j) & 1 ? plus[j] : minus[j];
        atoms[m] = pr;
    }
    return FiniteDist::from_weights(std::move(atoms));
}

double hellinger_sq(const FiniteDist& p, const FiniteDist& q) {
    require_equal_support(p, q, "hellinger_sq");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p.probs[i]) - std::sqrt(q.probs[i]);
        s += d * d;
    }
    return 0.5 * s;
}

double kl_div(const FiniteDist& p, const FiniteDist& q) {
    require_equal_support(p, q, "kl_div");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.probs[i] == 0.0) continue;
        if (q.probs[i] == 0.0)
            throw domain_error("kl_div: absolute continuity violated at atom " +
                               std::to_string(i));
        s += p.probs[i] * std::log(p.probs[i] / q.probs[i]);
    }
    return std::max(s, 0.0);
}

double tv_dist(const FiniteDist& p, const FiniteDist& q) {
    require_equal_support(p, q, "tv_dist");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p.probs[i] - q.probs[i]);
    return 0.5 * s;
}

double lsd(const FiniteDist& p_b, const FiniteDist& p_b_prime, const FiniteDist& p_a) {
    require_equal_support(p_b, p_b_prime, "lsd");
    require_equal_support(p_b, p_a, "lsd");
    double s = 0.0;
    for (std::size_t i = 0; i < p_b.size(); ++i) {
        const double d = p_b.probs[i] - p_b_prime.probs[i];
        if (p_a.probs[i] == 0.0) {
            if (d != 0.0)
                throw domain_error("lsd: reference atom " + std::to_string(i) +
                                   " has zero mass under differing densities");
            continue;
        }
        s += d * d / p_a.probs[i];
    }
    return s;
}

namespace {

struct SimpsonFrame {
    double a, b, fa, fm, fb, whole;
    int depth;
};

double simpson_rule(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

}  // namespace

double adaptive_simpson(double (*f)(double, const void*), const void* ctx, double lo, double hi,
                        double abs_tol) {
    const int kMaxDepth = 52;
    double m0 = 0.5 * (lo + hi);
    double fa = f(lo, ctx), fm = f(m0, ctx), fb = f(hi, ctx);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        throw numeric_error("quadrature: non-finite integrand");
    double total = 0.0;
    std::vector<SimpsonFrame> stack;
    stack.push_back({lo, hi, fa, fm, fb, simpson_rule(fa, fm, fb, hi - lo), 0});
    while (!stack.empty()) {
        SimpsonFrame fr = stack.back();
        stack.pop_back();
        const double m = 0.5 * (fr.a + fr.b);
        const double lm = 0.5 * (fr.a + m);
        const double rm = 0.5 * (m + fr.b);
        const double flm = f(lm, ctx);
        const double frm = f(rm, ctx);
        if (!std::isfinite(flm) || !std::isfinite(frm))
            throw numeric_error("quadrature: non-finite integrand");
        const double left = simpson_rule(fr.fa, flm, fr.fm, m - fr.a);
        const double right = simpson_rule(fr.fm, frm, fr.fb, fr.b - m);
        const double delta = left + right - fr.whole;
        if (fr.depth >= kMaxDepth)
            throw numeric_error("quadrature: max refinement depth exceeded");
        if (std::fabs(delta) <= 15.0 * abs_tol * std::max(1e-12, (fr.b - fr.a) / (hi - lo))) {
            total += left + right + delta / 15.0;
        } else {
            stack.push_back({fr.a, m, fr.fa, flm, fr.fm, left, fr.depth + 1});
            stack.push_back({m, fr.b, fr.fm, frm, fr.fb, right, fr.depth + 1});
        }
    }
    return total;
}

namespace {

// (phi_b - phi_b')^2 / phi_a for unit-variance-alpha Gaussians, evaluated in
// log space so far-apart means overflow to an exception, not to garbage.
double gaussian_lsd_integrand(double x, const void* ctx) {
    const auto* t = static_cast<const ScalarGaussianTriple*>(ctx);
    const double inv = 1.0 / t->alpha;
    auto logphi = [&](double mu) {
        const double z = (x - mu) * inv;
        return -0.5 * z * z - kLogSqrt2Pi - std::log(t->alpha);
    };
    const double lb = logphi(t->mu_b);
    const double lbp = logphi(t->mu_b_prime);
    const double la = logphi(t->mu_a);
    const double hi = std::max(lb, lbp);
    const double diff = -std::expm1(-std::fabs(lb - lbp));  // 1 - e^{-|lb-lbp|}
    const double v = std::exp(2.0 * hi - la) * diff * diff;
    return v;
}

}  // namespace

double lsd_gaussian(const ScalarGaussianTriple& t) {
    if (!(t.alpha > 0.0)) throw domain_error("lsd_gaussian: alpha must be > 0");
    if (t.mu_b == t.mu_b_prime) return 0.0;
    const double lo = std::min({t.mu_b, t.mu_b_prime, t.mu_a}) - 12.0 * t.alpha;
    const double hi = std::max({t.mu_b, t.mu_b_prime, t.mu_a}) + 12.0 * t.alpha;
    try {
        return adaptive_simpson(gaussian_lsd_integrand, &t, lo, hi, 1e-9);
    } catch (const numeric_error& e) {
        const double delta =
            std::max({std::fabs(t.mu_b - t.mu_b_prime), std::fabs(t.mu_b - t.mu_a),
                      std::fabs(t.mu_b_prime - t.mu_a)});
        throw numeric_error(std::string(e.what()) +
                            "; means too far apart for alpha=" + std::to_string(t.alpha) +
                            " (admissible floor sqrt(8*c2)*delta = " +
                            std::to_string(alpha_floor(delta, 1.0)) + ")");
    }
}

MixtureKlPair mixture_kl_pair(const FiniteDist& q, const FiniteDist& q_prime, const FiniteDist& r,
                              double s) {
    if (!(s > 0.0 && s < 1.0)) throw domain_error("mixture_kl_pair: s must be in (0,1)");
    require_equal_support(q, q_prime, "mixture_kl_pair");
    require_equal_support(q, r, "mixture_kl_pair");
    Vec mix_p(q.size()), mix_q(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        mix_p[i] = s * q.probs[i] + (1.0 - s) * r.probs[i];
        mix_q[i] = s * q_prime.probs[i] + (1.0 - s) * r.probs[i];
    }
    MixtureKlPair out;
    out.exact_kl = kl_div(FiniteDist::from_weights(std::move(mix_p)),
                          FiniteDist::from_weights(std::move(mix_q)));
    out.lemma_bound = s * s / (1.0 - s) * lsd(q, q_prime, r);
    return out;
}

double lsd_upper_bound(const ScaledParam& theta_b, const ScaledParam& theta_b_prime, double c2) {
    if (theta_b.alpha != theta_b_prime.alpha)
        throw domain_error("lsd_upper_bound: scaling mismatch " + std::to_string(theta_b.alpha) +
                           " vs " + std::to_string(theta_b_prime.alpha));
    require_same_size(theta_b.theta, theta_b_prime.theta, "lsd_upper_bound");
    const double inv = 1.0 / theta_b.alpha;
    double s = 0.0;
    for (std::size_t j = 0; j < theta_b.theta.size(); ++j) {
        const double d = (theta_b.theta[j] - theta_b_prime.theta[j]) * inv;
        s += d * d;
    }
    return 5.0 * c2 * s;
}

double alpha_floor(double delta, double c2) {
    if (!(delta >= 0.0)) throw domain_error("alpha_floor: delta must be >= 0");
    return std::sqrt(8.0 * c2) * delta;
}

}  // namespace efld
