#include "efld/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace efld {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::size_t> sample_minibatch(std::size_t n, int b, RngStream& rng) {
    if (n < 1) throw domain_error("sample_minibatch: n must be >= 1");
    if (b < 1) throw domain_error("sample_minibatch: b must be >= 1");
    std::vector<std::size_t> idx(static_cast<std::size_t>(b));
    for (auto& i : idx) i = rng.uniform_int(n);
    return idx;
}

void efld_step(TrainState& state, const ExpFamilySpec& family, const Vec& grad, double rho,
               double alpha) {
    if (!(rho > 0.0)) throw domain_error("efld_step: rho must be > 0");
    if (!(alpha > 0.0)) throw domain_error("efld_step: alpha must be > 0");
    if (!all_finite(grad))
        throw numeric_error("efld_step: non-finite gradient at step " +
                            std::to_string(state.t + 1) +
                            " (|w| = " + std::to_string(norm2(state.w)) + ")");
    require_same_size(grad, state.w, "efld_step");
    ScaledParam param{grad, alpha};
    const NoiseDraw xi = sample_noise(family, param, state.rng);
    axpy(-rho, xi.xi, state.w);
    ++state.t;
}

std::pair<double, double> sgld_params(double eta, double sigma) {
    if (!(eta > 0.0) || !(sigma > 0.0))
        throw config_error("sgld_params: eta and sigma must be > 0");
    return {eta, sigma / eta};
}

void sign_sgd_step(TrainState& state, const Vec& grad, double eta) {
    if (!(eta > 0.0)) throw domain_error("sign_sgd_step: eta must be > 0");
    if (!all_finite(grad))
        throw numeric_error("sign_sgd_step: non-finite gradient at step " +
                            std::to_string(state.t + 1));
    require_same_size(grad, state.w, "sign_sgd_step");
    for (std::size_t j = 0; j < state.w.size(); ++j)
        state.w[j] -= eta * (grad[j] >= 0.0 ? 1.0 : -1.0);
    ++state.t;
}

void sgd_step(TrainState& state, const Vec& grad, double eta) {
    if (!(eta > 0.0)) throw domain_error("sgd_step: eta must be > 0");
    if (!all_finite(grad))
        throw numeric_error("sgd_step: non-finite gradient at step " +
                            std::to_string(state.t + 1));
    require_same_size(grad, state.w, "sgd_step");
    axpy(-eta, grad, state.w);
    ++state.t;
}

double max_pairwise_grad_distance(const Model& model, const Vec& w,
                                  const std::vector<Example>& pool) {
    if (pool.size() < 2) throw domain_error("max_pairwise_grad_distance: pool size must be >= 2");
    std::vector<Vec> grads(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) per_example_grad(model, w, pool[i], grads[i]);
    double best = 0.0;
    for (std::size_t i = 0; i < grads.size(); ++i)
        for (std::size_t j = i + 1; j < grads.size(); ++j)
            best = std::max(best, dist_sq(grads[i], grads[j]));
    return std::sqrt(best);
}

double adaptive_alpha(const Model& model, const Vec& w, const std::vector<Example>& pool,
                      double c2, double safety) {
    if (!(safety >= 1.0)) throw domain_error("adaptive_alpha: safety must be >= 1");
    const double delta = max_pairwise_grad_distance(model, w, pool);
    return safety * std::sqrt(8.0 * c2) * delta;
}

namespace {

// Uniform subsample of the pool for the adaptive scaling, drawn from the
// run's own rng so trajectories stay a pure function of (setup, seed).
std::vector<Example> pool_subsample(const std::vector<Example>& pool, int m, RngStream& rng) {
    if (static_cast<std::size_t>(m) >= pool.size()) return pool;
    std::vector<Example> out;
    out.reserve(static_cast<std::size_t>(m));
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (int i = 0; i < m; ++i) {
        const std::size_t j = static_cast<std::size_t>(i) + rng.uniform_int(idx.size() - i);
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
        out.push_back(pool[idx[static_cast<std::size_t>(i)]]);
    }
    return out;
}

}  // namespace

Trajectory run_training(const RunSetup& setup, const std::vector<StepObserver>& observers) {
    if (!setup.data) throw config_error("run_training: missing dataset");
    const Dataset& data = *setup.data;
    if (data.examples.empty()) throw config_error("run_training: empty dataset");
    const OptimizerSpec& opt = setup.opt;
    if (opt.batch_size < 1) throw config_error("run_training: batch_size must be >= 1");

    Vec w0 = setup.w0.empty() ? init_params(setup.model, setup.seed) : setup.w0;
    TrainState state(std::move(w0), 0);
    state.rng = RngStream::child_of(setup.seed, 0x57e9);

    const std::int64_t spe = setup.steps_per_epoch > 0
                                 ? setup.steps_per_epoch
                                 : std::max<std::int64_t>(
                                       1, static_cast<std::int64_t>(data.n()) / opt.batch_size);

    RngStream alpha_rng = RngStream::child_of(setup.seed, 0xa19a);

    for (std::int64_t step = 0; step < setup.steps; ++step) {
        const std::int64_t t = state.t;  // 0-based before the update
        state.epoch = static_cast<int>(t / spe);
        const auto batch = sample_minibatch(data.n(), opt.batch_size, state.rng);
        const Vec grad = batch_grad(setup.model, state.w, data.examples, batch);

        StepInfo info;
        info.epoch = state.epoch;
        info.batch = &batch;
        info.eta = kNan;
        info.rho = kNan;
        info.sigma = kNan;
        info.alpha = kNan;

        switch (opt.kind) {
            case OptimizerSpec::Kind::sgld: {
                const double eta = opt.eta.at(t, spe);
                double sigma;
                if (opt.beta > 0.0)
                    sigma = std::sqrt(2.0 * eta / opt.beta);
                else if (opt.sigma_over_eta > 0.0)
                    sigma = opt.sigma_over_eta * eta;
                else
                    sigma = opt.sigma.at(t, spe);
                const auto [rho, alpha] = sgld_params(eta, sigma);
                efld_step(state, ExpFamilySpec::gaussian(), grad, rho, alpha);
                info.eta = eta;
                info.sigma = sigma;
                info.rho = rho;
                info.alpha = alpha;
                break;
            }
            case OptimizerSpec::Kind::noisy_sign_sgd:
            case OptimizerSpec::Kind::efld: {
                const bool sign = opt.kind == OptimizerSpec::Kind::noisy_sign_sgd;
                const ExpFamilySpec family =
                    sign ? ExpFamilySpec::bernoulli_pm1() : opt.family;
                const double rho =
                    sign ? opt.eta.at(t, spe) : opt.rho.at(t, spe);
                double alpha;
                if (opt.adaptive_alpha) {
                    const auto& pool =
                        data.held_out_pool.empty() ? data.examples : data.held_out_pool;
                    const auto sub = pool_subsample(pool, opt.alpha_pool, alpha_rng);
                    alpha = std::max(
                        adaptive_alpha(setup.model, state.w, sub, family.c2, opt.alpha_safety),
                        opt.alpha_min);
                } else {
                    alpha = opt.alpha.at(t, spe);
                }
                efld_step(state, family, grad, rho, alpha);
                info.rho = rho;
                info.eta = rho;
                info.alpha = alpha;
                break;
            }
            case OptimizerSpec::Kind::sign_sgd: {
                const double eta = opt.eta.at(t, spe);
                sign_sgd_step(state, grad, eta);
                info.eta = eta;
                break;
            }
            case OptimizerSpec::Kind::sgd: {
                const double eta = opt.eta.at(t, spe);
                sgd_step(state, grad, eta);
                info.eta = eta;
                break;
            }
        }

        info.t = state.t;
        info.w = &state.w;
        for (const auto& obs : observers) obs(info);
    }
    return {state.w, state.t};
}

namespace {

void validate_trace(const OptRunTrace& run, bool minibatch, const char* where) {
    if (run.rows.empty()) throw domain_error(std::string(where) + ": empty trace");
    const double expect = 1.0 / std::sqrt(static_cast<double>(run.steps));
    if (std::fabs(run.step_size - expect) > 1e-12 * expect)
        throw domain_error(std::string(where) + ": step size " +
                           std::to_string(run.step_size) + " is not 1/sqrt(T)");
    for (std::size_t i = 0; i < run.rows.size(); ++i) {
        const auto& r = run.rows[i];
        const double floor =
            minibatch ? std::max(std::sqrt(2.0) * r.kappa, 4.0 * r.grad_inf) : r.grad_inf;
        if (r.alpha + 1e-12 < floor)
            throw domain_error(std::string(where) + ": alpha " + std::to_string(r.alpha) +
                               " below its admissible floor " + std::to_string(floor) +
                               " at step " + std::to_string(i + 1));
    }
}

double mean_grad_sq(const std::vector<OptRunTrace>& runs) {
    double acc = 0.0;
    for (const auto& run : runs) {
        double s = 0.0;
        for (const auto& r : run.rows) s += r.grad_sq;
        acc += s / static_cast<double>(run.rows.size());
    }
    return acc / static_cast<double>(runs.size());
}

}  // namespace

ConvCheck check_signsgd_full(const std::vector<OptRunTrace>& runs) {
    if (runs.empty()) throw domain_error("check_signsgd_full: no runs");
    double c = 0.0;
    for (const auto& run : runs) {
        validate_trace(run, false, "check_signsgd_full");
        for (const auto& r : run.rows) c = std::max(c, r.alpha);
    }
    const auto& first = runs.front();
    const double t = static_cast<double>(first.steps);
    ConvCheck out;
    out.c = c;
    out.lhs = mean_grad_sq(runs);
    out.rhs = 5.0 * c / (3.0 * std::sqrt(t)) *
              (first.loss_start - first.loss_star + 0.5 * first.k_l1);
    out.pass = out.lhs <= out.rhs;
    return out;
}

ConvCheck check_signsgd_minibatch(const std::vector<OptRunTrace>& runs) {
    if (runs.empty()) throw domain_error("check_signsgd_minibatch: no runs");
    double c = 0.0;
    for (const auto& run : runs) {
        validate_trace(run, true, "check_signsgd_minibatch");
        for (const auto& r : run.rows) c = std::max(c, r.alpha);
    }
    const auto& first = runs.front();
    const double t = static_cast<double>(first.steps);
    ConvCheck out;
    out.c = c;
    out.lhs = mean_grad_sq(runs);
    out.rhs = 4.0 * c / std::sqrt(t) * (first.loss_start - first.loss_star + 0.5 * first.k_l1);
    out.pass = out.lhs <= out.rhs;
    return out;
}

ConvCheck check_sgld(const std::vector<OptRunTrace>& runs, int dim, double c3) {
    if (runs.empty()) throw domain_error("check_sgld: no runs");
    const auto& first = runs.front();
    const double t = static_cast<double>(first.steps);
    const double expect = 1.0 / std::sqrt(t);
    double noise_sum = 0.0;
    for (const auto& run : runs) {
        if (run.rows.empty()) throw domain_error("check_sgld: empty trace");
        if (std::fabs(run.step_size - expect) > 1e-12 * expect)
            throw domain_error("check_sgld: step size is not 1/sqrt(T)");
        double s = 0.0;
        for (const auto& r : run.rows)
            s += dim * r.alpha * r.alpha + c3 * r.kappa * r.kappa;
        noise_sum += s;
    }
    noise_sum /= static_cast<double>(runs.size());
    ConvCheck out;
    out.lhs = mean_grad_sq(runs);
    out.rhs = (first.loss_start - first.loss_star) / std::sqrt(t) +
              (first.k_max / (2.0 * t)) * noise_sum / std::sqrt(t);
    out.pass = out.lhs <= out.rhs;
    return out;
}

double estimate_kappa(const Model& model, const Vec& w, const std::vector<Example>& examples,
                      int batch_size, int dirs, int draws, RngStream& rng) {
    if (examples.empty()) throw domain_error("estimate_kappa: empty example set");
    const std::size_t p = param_count(model);
    std::vector<std::size_t> all(examples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const Vec full = batch_grad(model, w, examples, all);

    std::vector<Vec> vs(static_cast<std::size_t>(dirs));
    for (auto& v : vs) {
        v.resize(p);
        double nsq = 0.0;
        do {
            for (double& x : v) x = rng.normal();
            nsq = norm_sq(v);
        } while (nsq == 0.0);
        scale(v, 1.0 / std::sqrt(nsq));
    }

    const double lambdas[] = {0.5, 1.0, 2.0};
    std::vector<double> mgf(vs.size() * 2 * 3, 0.0);
    for (int d = 0; d < draws; ++d) {
        const auto batch = sample_minibatch(examples.size(), batch_size, rng);
        Vec g = batch_grad(model, w, examples, batch);
        for (std::size_t j = 0; j < g.size(); ++j) g[j] -= full[j];
        for (std::size_t vi = 0; vi < vs.size(); ++vi) {
            const double proj = dot(vs[vi], g);
            for (int li = 0; li < 3; ++li) {
                mgf[(vi * 2 + 0) * 3 + static_cast<std::size_t>(li)] +=
                    std::exp(lambdas[li] * proj);
                mgf[(vi * 2 + 1) * 3 + static_cast<std::size_t>(li)] +=
                    std::exp(-lambdas[li] * proj);
            }
        }
    }
    double kappa_sq = 0.0;
    for (std::size_t vi = 0; vi < vs.size(); ++vi)
        for (int sgn = 0; sgn < 2; ++sgn)
            for (int li = 0; li < 3; ++li) {
                const double m =
                    mgf[(vi * 2 + static_cast<std::size_t>(sgn)) * 3 +
                        static_cast<std::size_t>(li)] /
                    static_cast<double>(draws);
                const double lg = std::max(std::log(m), 0.0);
                kappa_sq = std::max(kappa_sq, 2.0 * lg / (lambdas[li] * lambdas[li]));
            }
    return std::sqrt(kappa_sq);
}

}  // namespace efld
