#include "efld/bound.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace efld {

double grad_discrepancy(const Model& model, const Vec& w, const Example& z,
                        const Example& z_prime) {
    Vec g1, g2;
    per_example_grad(model, w, z, g1);
    per_example_grad(model, w, z_prime, g2);
    return dist_sq(g1, g2);
}

double surrogate_incoherence(const Model& model, const Vec& w,
                             const std::vector<Example>& examples,
                             const std::vector<std::size_t>& batch) {
    const Vec gb = batch_grad(model, w, examples, batch);
    std::vector<std::size_t> all(examples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const Vec gfull = batch_grad(model, w, examples, all);
    return dist_sq(gb, gfull);
}

std::pair<double, double> delta_and_floor(const Model& model, const Vec& w,
                                          const std::vector<Example>& pool, double c2) {
    const double delta = max_pairwise_grad_distance(model, w, pool);
    return {delta, std::sqrt(8.0 * c2) * delta};
}

namespace {

std::vector<Example> subsample(const std::vector<Example>& pool, int m, RngStream& rng) {
    if (m <= 0 || static_cast<std::size_t>(m) >= pool.size()) return pool;
    std::vector<Example> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out.push_back(pool[rng.uniform_int(pool.size())]);
    return out;
}

}  // namespace

void record_step(BoundLedger& ledger, const StepInfo& info, const Model& model,
                 const Dataset& data, const BoundConfig& config, RngStream& meter_rng,
                 double train_err, double test_err) {
    if (data.held_out_pool.empty()) throw config_error("record_step: empty held-out pool");
    if (config.pairs_per_step < 1)
        throw config_error("record_step: pairs_per_step must be >= 1");
    if (config.n < 2 * static_cast<std::size_t>(config.batch_size))
        std::fprintf(stderr, "warning: n=%zu below 2*batch_size=%d; bound hypotheses assume "
                             "b <= n/2\n",
                     config.n, 2 * config.batch_size);

    const Vec& w = *info.w;
    double disc = 0.0, grad_sq = 0.0;
    Vec g;
    for (int i = 0; i < config.pairs_per_step; ++i) {
        const Example& z = data.examples[meter_rng.uniform_int(data.n())];
        const Example& zp = data.held_out_pool[meter_rng.uniform_int(data.held_out_pool.size())];
        disc += grad_discrepancy(model, w, z, zp);
        per_example_grad(model, w, z, g);
        grad_sq += norm_sq(g);
    }
    disc /= config.pairs_per_step;
    grad_sq /= config.pairs_per_step;

    LedgerRow row;
    row.t = info.t;
    row.epoch = info.epoch;
    row.eta = info.eta;
    row.sigma = info.sigma;
    row.alpha = info.alpha;
    row.mean_disc = disc;
    row.mean_grad_sq = grad_sq;
    row.train_err = train_err;
    row.test_err = test_err;

    if (config.incoh_enabled && info.batch)
        row.incoh_surrogate = surrogate_incoherence(model, w, data.examples, *info.batch);
    else
        row.incoh_surrogate = std::numeric_limits<double>::quiet_NaN();

    if (config.delta_pool > 0 && data.held_out_pool.size() >= 2) {
        const auto pool = subsample(data.held_out_pool, config.delta_pool, meter_rng);
        const auto [dh, fl] = delta_and_floor(model, w, pool, config.c2);
        row.delta_hat = dh;
        row.alpha_floor = fl;
    } else {
        row.delta_hat = std::numeric_limits<double>::quiet_NaN();
        row.alpha_floor = std::numeric_limits<double>::quiet_NaN();
    }

    const double stride = static_cast<double>(config.eval_every);
    if (std::isfinite(info.alpha) && info.alpha > 0.0) {
        row.ours_contrib = stride * disc / (info.alpha * info.alpha);
        ledger.ours_radicand += row.ours_contrib;
    }
    if (std::isfinite(info.sigma) && info.sigma > 0.0 && std::isfinite(info.eta)) {
        row.li_contrib = stride * info.eta * info.eta * grad_sq / (info.sigma * info.sigma);
        ledger.li_radicand += row.li_contrib;
        ledger.sgld_rows = true;
    }
    ledger.rows.push_back(row);
    ledger.rows.back().our_bound = our_bound(ledger, config);
    ledger.rows.back().li_bound =
        ledger.sgld_rows ? li_bound(ledger, config) : std::numeric_limits<double>::quiet_NaN();
}

double our_bound(const BoundLedger& ledger, const BoundConfig& config) {
    if (config.n == 0) throw config_error("our_bound: n must be > 0");
    return config.c0 * std::sqrt(5.0 * config.c2) / static_cast<double>(config.n) *
           std::sqrt(ledger.ours_radicand);
}

double li_bound(const BoundLedger& ledger, const BoundConfig& config) {
    if (!ledger.sgld_rows)
        throw unsupported_error("li_bound: defined only for SGLD runs (needs eta and sigma)");
    if (config.n == 0) throw config_error("li_bound: n must be > 0");
    return config.c0 * std::sqrt(5.0 * config.c2) / static_cast<double>(config.n) *
           std::sqrt(ledger.li_radicand);
}

std::vector<double> replay_our_bound(const BoundLedger& ledger, const BoundConfig& config,
                                     double alpha_scale, std::size_t n) {
    if (!(alpha_scale > 0.0)) throw domain_error("replay_our_bound: scale must be > 0");
    if (n == 0) throw domain_error("replay_our_bound: n must be > 0");
    const double c = config.c0 * std::sqrt(5.0 * config.c2) / static_cast<double>(n);
    std::vector<double> out;
    out.reserve(ledger.rows.size());
    double radicand = 0.0;
    const double inv_sq = 1.0 / (alpha_scale * alpha_scale);
    for (const auto& row : ledger.rows) {
        radicand += row.ours_contrib * inv_sq;
        out.push_back(c * std::sqrt(radicand));
    }
    return out;
}

}  // namespace efld
