#include "efld/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "efld/bound.hpp"
#include "efld/divergence.hpp"
#include "efld/engine.hpp"

namespace efld {

namespace {

constexpr std::uint64_t kSuiteSeed = 0x0efd5eed;

FiniteDist random_dist(std::size_t atoms, RngStream& rng) {
    Vec w(atoms);
    for (double& x : w) x = -std::log(rng.uniform_pos());  // flat Dirichlet
    return FiniteDist::from_weights(std::move(w));
}

CheckLine line(std::string name, double margin, double threshold, std::string detail = "") {
    CheckLine c;
    c.name = std::move(name);
    c.margin = margin;
    c.threshold = threshold;
    c.pass = margin >= threshold;
    c.detail = std::move(detail);
    return c;
}

void push_trial(SuiteResult& out, int trial, const char* check, double margin) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d,%s,%.12g", trial, check, margin);
    out.trial_margins.emplace_back(buf);
}

SuiteResult suite_divergences() {
    SuiteResult out;
    out.suite = "divergences";
    RngStream rng = RngStream::child_of(kSuiteSeed, 1);
    double m_kl = 1e300, m_sqrt = 1e300, m_pinsker = 1e300, m_chain2 = 1e300, m_tv2 = 1e300;
    std::string witness;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t atoms = 2 + rng.uniform_int(63);
        const FiniteDist p = random_dist(atoms, rng);
        const FiniteDist q = random_dist(atoms, rng);
        const double h2x2 = 2.0 * hellinger_sq(p, q);
        const double kl = kl_div(p, q);
        const double tv = tv_dist(p, q);
        const double root = std::sqrt(0.5 * kl);
        m_kl = std::min(m_kl, kl - h2x2);
        if (root - h2x2 < m_sqrt) {
            m_sqrt = root - h2x2;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "worst at trial %d (k=%zu): 2H^2=%.4f KL=%.4f",
                          trial, atoms, h2x2, kl);
            witness = buf;
        }
        m_pinsker = std::min(m_pinsker, root - tv);
        m_chain2 = std::min(m_chain2, std::sqrt(2.0 * kl) - h2x2);
        m_tv2 = std::min(m_tv2, 2.0 * tv - h2x2);
        push_trial(out, trial, "kl_vs_2h2", kl - h2x2);
        push_trial(out, trial, "sqrt_kl_half_vs_2h2", root - h2x2);
        push_trial(out, trial, "pinsker", root - tv);
    }
    out.checks.push_back(line("2H^2 <= KL", m_kl, -1e-10));
    out.checks.push_back(line("2H^2 <= sqrt(KL/2)", m_sqrt, -1e-10, witness));
    out.checks.push_back(line("TV <= sqrt(KL/2)", m_pinsker, -1e-10));
    out.checks.push_back(
        line("2H^2 <= sqrt(2 KL) [proof-chain form]", m_chain2, -1e-10));
    out.checks.push_back(line("2H^2 <= 2 TV", m_tv2, -1e-10));
    return out;
}

SuiteResult suite_mixture() {
    SuiteResult out;
    out.suite = "mixture";
    RngStream rng = RngStream::child_of(kSuiteSeed, 2);
    const double svals[] = {0.5, 0.1, 5.0 / 50.0};
    double worst = 1e300;
    std::vector<double> ratios_half, ratios_tenth, ratios_hundredth, ratios_milli, tiny_ratio;
    for (int trial = 0; trial < 1000; ++trial) {
        const FiniteDist q = random_dist(32, rng);
        const FiniteDist qp = random_dist(32, rng);
        const FiniteDist r = random_dist(32, rng);
        const double raw_lsd = lsd(q, qp, r);
        for (double s : svals) {
            const auto pair = mixture_kl_pair(q, qp, r, s);
            worst = std::min(worst, pair.lemma_bound - pair.exact_kl);
        }
        push_trial(out, trial, "lemma_slack",
                   mixture_kl_pair(q, qp, r, 0.1).lemma_bound -
                       mixture_kl_pair(q, qp, r, 0.1).exact_kl);
        for (double s : {0.5, 0.1, 0.01, 0.001}) {
            const double ratio = mixture_kl_pair(q, qp, r, s).exact_kl / raw_lsd;
            if (s == 0.5) ratios_half.push_back(ratio);
            else if (s == 0.1) ratios_tenth.push_back(ratio);
            else if (s == 0.01) ratios_hundredth.push_back(ratio);
            else ratios_milli.push_back(ratio);
        }
        tiny_ratio.push_back(mixture_kl_pair(q, qp, r, 1e-6).exact_kl / raw_lsd);
    }
    auto med = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    const double med_half = med(ratios_half);
    const double med_tenth = med(ratios_tenth);
    const double med_hundredth = med(ratios_hundredth);
    const double med_milli = med(ratios_milli);
    out.checks.push_back(line("exact KL <= s^2/(1-s) * lsd", worst, -1e-10));
    out.checks.push_back(line("s^2 scaling: med ratio(1e-3) <= 1e-4 med ratio(0.5)",
                              1e-4 * med_half - med_milli, 0.0));
    out.checks.push_back(line("median KL/lsd decreasing over s in {.5,.1,.01,.001}",
                              std::min({med_half - med_tenth, med_tenth - med_hundredth,
                                        med_hundredth - med_milli}),
                              0.0));
    out.checks.push_back(
        line("s=1e-6: exact KL <= 1e-11 * lsd", 1e-11 - *std::max_element(tiny_ratio.begin(),
                                                                          tiny_ratio.end()),
             0.0));
    return out;
}

SuiteResult suite_theorem2() {
    SuiteResult out;
    out.suite = "theorem2";
    RngStream rng = RngStream::child_of(kSuiteSeed, 3);
    double worst_bern = 1e300, worst_gauss = 1e300;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t p = 1 + rng.uniform_int(10);
        const double scale = std::exp(rng.uniform(-1.5, 0.5));
        Vec gb(p), gbp(p), ga(p);
        for (std::size_t j = 0; j < p; ++j) {
            gb[j] = scale * rng.normal();
            gbp[j] = scale * rng.normal();
            ga[j] = scale * rng.normal();
        }
        const double delta = std::sqrt(std::max(
            {dist_sq(gb, gbp), dist_sq(gb, ga), dist_sq(gbp, ga)}));
        const double c2 = 1.0;
        const double alpha = alpha_floor(delta, c2) * (1.0 + rng.uniform(0.0, 2.0)) + 1e-9;
        Vec tb(p), tbp(p), ta(p);
        for (std::size_t j = 0; j < p; ++j) {
            tb[j] = gb[j] / alpha;
            tbp[j] = gbp[j] / alpha;
            ta[j] = ga[j] / alpha;
        }
        const double exact = lsd(ProductBernoulliPM1(tb).to_finite_dist(),
                                 ProductBernoulliPM1(tbp).to_finite_dist(),
                                 ProductBernoulliPM1(ta).to_finite_dist());
        const double rhs = lsd_upper_bound({gb, alpha}, {gbp, alpha}, c2);
        worst_bern = std::min(worst_bern, rhs - exact);
        push_trial(out, trial, "bernoulli", rhs - exact);
    }
    for (int trial = 0; trial < 500; ++trial) {
        const double scale = std::exp(rng.uniform(-1.5, 0.5));
        ScalarGaussianTriple t;
        t.mu_b = scale * rng.normal();
        t.mu_b_prime = scale * rng.normal();
        t.mu_a = scale * rng.normal();
        const double delta = std::max({std::fabs(t.mu_b - t.mu_b_prime),
                                       std::fabs(t.mu_b - t.mu_a),
                                       std::fabs(t.mu_b_prime - t.mu_a)});
        t.alpha = alpha_floor(delta, 1.0) * (1.0 + rng.uniform(0.0, 2.0)) + 1e-9;
        const double exact = lsd_gaussian(t);
        const double rhs =
            lsd_upper_bound({{t.mu_b}, t.alpha}, {{t.mu_b_prime}, t.alpha}, 1.0);
        worst_gauss = std::min(worst_gauss, rhs - exact);
        push_trial(out, 500 + trial, "gaussian", rhs - exact);
    }
    out.checks.push_back(
        line("product {-1,+1}^p (p<=10): lsd <= 5 c2 ||dtheta/alpha||^2", worst_bern, -1e-8));
    out.checks.push_back(line("scalar gaussian: lsd <= 5 c2 (dmu/alpha)^2", worst_gauss, -1e-8));
    return out;
}

SuiteResult suite_lemmas() {
    SuiteResult out;
    out.suite = "lemmas";
    const double tanh1 = std::tanh(1.0);
    double m_tanh = 1e300, m_mix = 1e300;
    const int grid = 10000;
    for (int i = 0; i < grid; ++i) {
        const double x = -1.0 + 2.0 * i / (grid - 1);
        m_tanh = std::min(m_tanh, std::fabs(std::tanh(x)) - tanh1 * std::fabs(x));
    }
    for (int i = 0; i < grid; ++i) {
        const double x = -10.0 + 20.0 * i / (grid - 1);
        const double lhs = std::fabs(-std::expm1(-2.0 * x));
        m_mix = std::min(m_mix, lhs - std::min(std::fabs(x), 0.5));
    }
    out.checks.push_back(
        line("|tanh x| >= tanh(1) |x| on [-1,1]", m_tanh, 0.0, "tanh(1) ~ 0.76159"));
    out.checks.push_back(line("|1 - e^{-2x}| >= min(|x|, 1/2) on [-10,10]", m_mix, 0.0));
    return out;
}

double fd_rel_error(const Model& model, const Vec& w, const Example& z, double h,
                    int coord_budget, RngStream& rng) {
    const LossCaps caps;
    Vec g = per_example_grad(model, w, z);
    Vec wp = w;
    double worst = 0.0;
    std::vector<std::size_t> coords;
    if (coord_budget <= 0 || static_cast<std::size_t>(coord_budget) >= w.size()) {
        coords.resize(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) coords[j] = j;
    } else {
        for (int k = 0; k < coord_budget; ++k) coords.push_back(rng.uniform_int(w.size()));
    }
    for (std::size_t j : coords) {
        wp[j] = w[j] + h;
        const double up = per_example_loss(model, wp, z, caps).raw;
        wp[j] = w[j] - h;
        const double dn = per_example_loss(model, wp, z, caps).raw;
        wp[j] = w[j];
        const double fd = (up - dn) / (2.0 * h);
        const double rel =
            std::fabs(fd - g[j]) / (std::max(std::fabs(fd), std::fabs(g[j])) + 1e-8);
        worst = std::max(worst, rel);
    }
    return worst;
}

SuiteResult suite_gradients() {
    SuiteResult out;
    out.suite = "gradients";
    RngStream rng = RngStream::child_of(kSuiteSeed, 4);

    {  // quadratic, exact form
        const int dim = 8;
        QuadraticModel qm;
        qm.w_star.resize(dim);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            for (double& v : qm.w_star) v = rng.normal();
            Model m = qm;
            Vec w(dim);
            for (double& v : w) v = rng.normal();
            Example z;
            z.x.resize(dim);
            for (double& v : z.x) v = rng.normal();
            z.y = 0;
            worst = std::max(worst, fd_rel_error(m, w, z, 1e-7, 0, rng));
        }
        out.checks.push_back(line("quadratic gradient vs central differences", 1e-5 - worst, 0.0));
    }
    {  // logistic, includes the w=0 case
        const Model m = LogisticModel{10, 3};
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Vec w(param_count(m), 0.0);
            if (trial % 2 == 1)
                for (double& v : w) v = 0.5 * rng.normal();
            Example z;
            z.x.resize(10);
            for (double& v : z.x) v = rng.normal();
            z.y = static_cast<int>(rng.uniform_int(3));
            worst = std::max(worst, fd_rel_error(m, w, z, 1e-6, 0, rng));
        }
        out.checks.push_back(line("logistic gradient vs central differences", 1e-5 - worst, 0.0));
    }
    {  // mlp, 50 random coordinates per trial
        const Model m = MlpModel{{12, 16, 8, 3}};
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Vec w = init_params(m, 42 + static_cast<std::uint64_t>(trial));
            Example z;
            z.x.resize(12);
            for (double& v : z.x) v = rng.normal();
            z.y = static_cast<int>(rng.uniform_int(3));
            worst = std::max(worst, fd_rel_error(m, w, z, 1e-5, 50, rng));
        }
        out.checks.push_back(line("mlp gradient vs central differences", 1e-4 - worst, 0.0));
    }
    return out;
}

// quadratic loss around data mean; zero-feature examples keep L(w*) = 0
struct QuadRun {
    Dataset data;
    Model model;
    Vec w0;
};

QuadRun make_quad_run(int dim, double distance, std::uint64_t seed, int n_examples) {
    QuadRun qr;
    qr.data.dim = dim;
    qr.data.num_classes = 2;
    qr.data.examples.assign(static_cast<std::size_t>(n_examples), Example{Vec(), 0});
    QuadraticModel qm;
    qm.w_star.assign(static_cast<std::size_t>(dim), 0.0);
    qr.model = qm;
    RngStream rng = RngStream::child_of(seed, 0x90d);
    Vec dir(static_cast<std::size_t>(dim));
    double nsq = 0.0;
    do {
        for (double& v : dir) v = rng.normal();
        nsq = norm_sq(dir);
    } while (nsq == 0.0);
    scale(dir, distance / std::sqrt(nsq));
    qr.w0 = dir;
    return qr;
}

OptRunTrace trace_signsgd_full(int dim, double distance, std::int64_t steps,
                               std::uint64_t seed) {
    // fixed start shared by every repeat; the expectation is over the
    // algorithm's own randomness only
    QuadRun qr = make_quad_run(dim, distance, 0xF12ED, 2);
    const double rho = 1.0 / std::sqrt(static_cast<double>(steps));
    TrainState state(qr.w0, 0);
    state.rng = RngStream::child_of(seed, 0x519);
    OptRunTrace trace;
    trace.steps = steps;
    trace.step_size = rho;
    trace.loss_star = 0.0;
    trace.loss_start = mean_loss(qr.model, qr.w0, qr.data.examples);
    trace.k_l1 = static_cast<double>(dim);
    trace.k_max = 1.0;
    const ExpFamilySpec fam = ExpFamilySpec::bernoulli_pm1();
    Vec grad;
    for (std::int64_t t = 0; t < steps; ++t) {
        per_example_grad(qr.model, state.w, qr.data.examples[0], grad);  // full batch
        const double alpha = std::max(norm_inf(grad), 1e-12);
        efld_step(state, fam, grad, rho, alpha);
        per_example_grad(qr.model, state.w, qr.data.examples[0], grad);
        OptTraceRow row;
        row.grad_sq = norm_sq(grad);
        row.grad_inf = norm_inf(grad);
        row.alpha = std::max(row.grad_inf, 1e-12);
        trace.rows.push_back(row);
    }
    return trace;
}

Dataset plus_minus_pairs(int dim, int pairs, double radius, std::uint64_t seed) {
    Dataset data;
    data.dim = dim;
    data.num_classes = 2;
    RngStream rng = RngStream::child_of(seed, 0x9a125);
    for (int k = 0; k < pairs; ++k) {
        Vec v(static_cast<std::size_t>(dim));
        double nsq = 0.0;
        do {
            for (double& x : v) x = rng.normal();
            nsq = norm_sq(v);
        } while (nsq == 0.0);
        scale(v, radius / std::sqrt(nsq));
        Example e1, e2;
        e1.x = v;
        for (double& x : v) x = -x;
        e2.x = v;
        data.examples.push_back(e1);
        data.examples.push_back(e2);
    }
    return data;
}

OptRunTrace trace_signsgd_minibatch(int dim, double distance, std::int64_t steps, int b,
                                    std::uint64_t seed) {
    Dataset data = plus_minus_pairs(dim, 20, 1.0, 777);
    QuadraticModel qm;
    qm.w_star.assign(static_cast<std::size_t>(dim), 0.0);
    Model model = qm;
    const Vec w0 = make_quad_run(dim, distance, 0xF12ED, 2).w0;
    const double eta = 1.0 / std::sqrt(static_cast<double>(steps));
    const double kappa = 1.0 / std::sqrt(static_cast<double>(b));  // Hoeffding on +-1 pairs

    std::vector<std::size_t> all(data.examples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    TrainState state(w0, 0);
    state.rng = RngStream::child_of(seed, 0x51a);
    OptRunTrace trace;
    trace.steps = steps;
    trace.step_size = eta;
    trace.loss_star = mean_loss(model, Vec(static_cast<std::size_t>(dim), 0.0), data.examples);
    trace.loss_start = mean_loss(model, w0, data.examples);
    trace.k_l1 = static_cast<double>(dim);
    trace.k_max = 1.0;
    const ExpFamilySpec fam = ExpFamilySpec::bernoulli_pm1();
    for (std::int64_t t = 0; t < steps; ++t) {
        Vec gfull = batch_grad(model, state.w, data.examples, all);
        const double alpha =
            std::max(std::sqrt(2.0) * kappa, 4.0 * norm_inf(gfull));
        const auto batch = sample_minibatch(data.examples.size(), b, state.rng);
        const Vec gb = batch_grad(model, state.w, data.examples, batch);
        efld_step(state, fam, gb, eta, alpha);
        gfull = batch_grad(model, state.w, data.examples, all);
        OptTraceRow row;
        row.grad_sq = norm_sq(gfull);
        row.grad_inf = norm_inf(gfull);
        row.kappa = kappa;
        row.alpha = std::max(std::sqrt(2.0) * kappa, 4.0 * row.grad_inf);
        trace.rows.push_back(row);
    }
    return trace;
}

OptRunTrace trace_sgld(int dim, double distance, std::int64_t steps, double alpha,
                       std::uint64_t seed, const Dataset* blob_data, int b, double kappa) {
    const bool full_batch = blob_data == nullptr;
    Dataset zero = make_quad_run(dim, distance, 0xF12ED, 2).data;
    const Dataset& data = full_batch ? zero : *blob_data;
    QuadraticModel qm;
    qm.w_star.assign(static_cast<std::size_t>(dim), 0.0);
    Model model = qm;
    const Vec w0 = make_quad_run(dim, distance, 0xF12ED, 2).w0;
    const double eta = 1.0 / std::sqrt(static_cast<double>(steps));

    std::vector<std::size_t> all(data.examples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Vec mean_x(static_cast<std::size_t>(dim), 0.0);
    for (const auto& e : data.examples)
        if (!e.x.empty()) axpy(1.0 / static_cast<double>(data.examples.size()), e.x, mean_x);

    TrainState state(w0, 0);
    state.rng = RngStream::child_of(seed, 0x51b);
    OptRunTrace trace;
    trace.steps = steps;
    trace.step_size = eta;
    trace.loss_star = mean_loss(model, mean_x, data.examples);
    trace.loss_start = mean_loss(model, w0, data.examples);
    trace.k_l1 = static_cast<double>(dim);
    trace.k_max = 1.0;
    const ExpFamilySpec fam = ExpFamilySpec::gaussian();
    for (std::int64_t t = 0; t < steps; ++t) {
        const Vec g = full_batch
                          ? batch_grad(model, state.w, data.examples, all)
                          : batch_grad(model, state.w, data.examples,
                                       sample_minibatch(data.examples.size(), b, state.rng));
        efld_step(state, fam, g, eta, alpha);
        const Vec gfull = batch_grad(model, state.w, data.examples, all);
        OptTraceRow row;
        row.grad_sq = norm_sq(gfull);
        row.grad_inf = norm_inf(gfull);
        row.alpha = alpha;
        row.kappa = kappa;
        trace.rows.push_back(row);
    }
    return trace;
}

SuiteResult suite_convergence() {
    SuiteResult out;
    out.suite = "convergence";

    {  // full-batch noisy sign updates on the quadratic
        std::vector<OptRunTrace> runs;
        for (int rep = 0; rep < 20; ++rep)
            runs.push_back(trace_signsgd_full(10, 1.0, 10000, 100 + rep));
        const ConvCheck c = check_signsgd_full(runs);
        char detail[128];
        std::snprintf(detail, sizeof(detail), "lhs=%.4g rhs=%.4g c=%.4g", c.lhs, c.rhs, c.c);
        out.checks.push_back(line("noisy sign full batch: avg grad^2 <= 5c/(3 sqrt(T)) budget",
                                  c.rhs - c.lhs, 0.0, detail));
    }
    {  // mini-batch variant on the symmetric +- pair construction
        std::vector<OptRunTrace> runs;
        for (int rep = 0; rep < 20; ++rep)
            runs.push_back(trace_signsgd_minibatch(10, 1.0, 10000, 10, 300 + rep));
        const ConvCheck c = check_signsgd_minibatch(runs);
        char detail[128];
        std::snprintf(detail, sizeof(detail), "lhs=%.4g rhs=%.4g c=%.4g", c.lhs, c.rhs, c.c);
        out.checks.push_back(line("noisy sign mini batch: avg grad^2 <= 4c/sqrt(T) budget",
                                  c.rhs - c.lhs, 0.0, detail));
    }
    {  // SGLD full batch, fixed scaling
        std::vector<OptRunTrace> runs;
        for (int rep = 0; rep < 20; ++rep)
            runs.push_back(trace_sgld(10, 1.0, 10000, 0.1, 500 + rep, nullptr, 0, 0.0));
        const ConvCheck c = check_sgld(runs, 10);
        char detail[128];
        std::snprintf(detail, sizeof(detail), "lhs=%.6g rhs=%.6g", c.lhs, c.rhs);
        out.checks.push_back(
            line("sgld full batch: avg grad^2 <= descent + noise budget", c.rhs - c.lhs, 0.0,
                 detail));
    }
    {  // SGLD mini batch on blobs with the empirical sub-Gaussian estimate
        SynthSpec spec;
        spec.dim = 4;
        spec.n = 64;
        spec.classes = 2;
        spec.separation = 1.0;
        Dataset blobs = synth_dataset(spec, 2024);
        QuadraticModel qm;
        qm.w_star.assign(4, 0.0);
        Model model = qm;
        RngStream krng = RngStream::child_of(kSuiteSeed, 6);
        const double kappa =
            estimate_kappa(model, Vec(4, 0.0), blobs.examples, 10, 16, 512, krng);
        std::vector<OptRunTrace> runs;
        for (int rep = 0; rep < 20; ++rep)
            runs.push_back(trace_sgld(4, 1.0, 10000, 0.1, 700 + rep, &blobs, 10, kappa));
        const ConvCheck c = check_sgld(runs, 4);
        char detail[128];
        std::snprintf(detail, sizeof(detail), "lhs=%.6g rhs=%.6g kappa=%.4g", c.lhs, c.rhs,
                      kappa);
        out.checks.push_back(
            line("sgld mini batch (empirical kappa): lhs <= rhs", c.rhs - c.lhs, 0.0, detail));
    }
    {  // deterministic sign descent keeps the loss envelope falling
        QuadRun qr = make_quad_run(10, 1.0, 41, 2);
        const std::int64_t steps = 1000;
        const double eta = 1.0 / std::sqrt(static_cast<double>(steps));
        TrainState state(qr.w0, 0);
        const double loss0 = mean_loss(qr.model, qr.w0, qr.data.examples);
        double envelope = loss0;
        double max_excess = 0.0;
        Vec grad;
        for (std::int64_t t = 0; t < steps; ++t) {
            per_example_grad(qr.model, state.w, qr.data.examples[0], grad);
            sign_sgd_step(state, grad, eta);
            const double loss = mean_loss(qr.model, state.w, qr.data.examples);
            max_excess = std::max(max_excess, loss - loss0);
            envelope = std::min(envelope, loss);
        }
        out.checks.push_back(line("sign descent never exceeds the initial loss",
                                  10.0 * eta * eta / 2.0 * 10.0 - max_excess, 0.0));
        out.checks.push_back(
            line("sign descent envelope reaches 5% of the initial loss",
                 0.05 * loss0 - envelope, 0.0));
    }
    {  // saturation: |g| >= 10 alpha makes the noisy sign match sign(g)
        RngStream rng = RngStream::child_of(kSuiteSeed, 7);
        const ExpFamilySpec fam = ExpFamilySpec::bernoulli_pm1();
        const double alpha = 0.05;
        std::int64_t agree = 0;
        const std::int64_t draws = 100000;
        for (std::int64_t i = 0; i < draws; ++i) {
            const double g = (rng.bernoulli(0.5) ? 1.0 : -1.0) *
                             (10.0 * alpha + rng.uniform(0.0, alpha));
            ScaledParam param{{g}, alpha};
            const NoiseDraw xi = sample_noise(fam, param, rng);
            if ((xi.xi[0] > 0) == (g > 0)) ++agree;
        }
        const double rate = static_cast<double>(agree) / static_cast<double>(draws);
        char detail[64];
        std::snprintf(detail, sizeof(detail), "agreement=%.5f", rate);
        out.checks.push_back(
            line("saturated noisy sign agrees with sign(g) at 99.9%", rate - 0.999, 0.0,
                 detail));
    }
    return out;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"divergences", "mixture", "theorem2", "lemmas", "gradients", "convergence"};
}

SuiteResult run_suite(const std::string& name) {
    if (name == "divergences") return suite_divergences();
    if (name == "mixture") return suite_mixture();
    if (name == "theorem2") return suite_theorem2();
    if (name == "lemmas") return suite_lemmas();
    if (name == "gradients") return suite_gradients();
    if (name == "convergence") return suite_convergence();
    throw config_error("unknown verify suite '" + name + "'");
}

void print_suite(const SuiteResult& result) {
    std::printf("== suite %s ==\n", result.suite.c_str());
    for (const auto& c : result.checks) {
        std::printf("  %-62s %s  margin=%.6g (>= %.2g)%s%s\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.margin, c.threshold,
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
    }
}

}  // namespace efld
