#include "efld/models.hpp"

#include <algorithm>
#include <cmath>

#include "efld/errors.hpp"

namespace efld {

namespace {

struct MlpWorkspace {
    std::vector<Vec> act;    // act[l] = activations entering layer l (act[0] = input)
    std::vector<Vec> delta;  // backprop buffers per layer output
};

thread_local MlpWorkspace tl_ws;

void prepare_ws(const MlpModel& m) {
    const std::size_t L = m.layers.size();
    if (tl_ws.act.size() != L) {
        tl_ws.act.assign(L, Vec());
        tl_ws.delta.assign(L, Vec());
    }
    for (std::size_t l = 0; l < L; ++l) {
        tl_ws.act[l].resize(static_cast<std::size_t>(m.layers[l]));
        tl_ws.delta[l].resize(static_cast<std::size_t>(m.layers[l]));
    }
}

void check_mlp(const MlpModel& m) {
    if (m.layers.size() < 2) throw config_error("mlp: needs at least input and output layers");
    for (int d : m.layers)
        if (d < 1) throw config_error("mlp: layer sizes must be >= 1");
}

// logits -> (loss, softmax in place) for label y
double softmax_ce(Vec& logits, int y) {
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : logits) z += std::exp(v - mx);
    const double lse = mx + std::log(z);
    const double loss = lse - logits[static_cast<std::size_t>(y)];
    for (double& v : logits) v = std::exp(v - lse);
    return loss;
}

// Forward pass for the MLP; fills tl_ws.act, returns raw loss and leaves the
// softmax probabilities in tl_ws.delta[last] when want_probs is set.
double mlp_forward(const MlpModel& m, const Vec& w, const Example& z, bool want_probs) {
    prepare_ws(m);
    const std::size_t L = m.layers.size();
    std::copy(z.x.begin(), z.x.end(), tl_ws.act[0].begin());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const int in = m.layers[l];
        const int out = m.layers[l + 1];
        const Vec& a = tl_ws.act[l];
        Vec& o = tl_ws.act[l + 1];
        const bool hidden = l + 2 < L;
        for (int r = 0; r < out; ++r) {
            const double* row = w.data() + off + static_cast<std::size_t>(r) * in;
            double s = 0.0;
            for (int c = 0; c < in; ++c) s += row[c] * a[static_cast<std::size_t>(c)];
            s += w[off + static_cast<std::size_t>(out) * in + static_cast<std::size_t>(r)];
            o[static_cast<std::size_t>(r)] = hidden ? std::max(s, 0.0) : s;
        }
        off += static_cast<std::size_t>(out) * (in + 1);
    }
    Vec& logits = tl_ws.act[L - 1];
    if (!want_probs) {
        double mx = logits[0];
        for (double v : logits) mx = std::max(mx, v);
        double zs = 0.0;
        for (double v : logits) zs += std::exp(v - mx);
        return mx + std::log(zs) - logits[static_cast<std::size_t>(z.y)];
    }
    Vec probs = logits;
    const double loss = softmax_ce(probs, z.y);
    tl_ws.delta[L - 1] = probs;
    return loss;
}

// acc += coeff * grad(z). Rows behind dead relu units contribute nothing and
// are skipped; the transposed backprop walk stays contiguous per weight row.
void mlp_grad_accum(const MlpModel& m, const Vec& w, const Example& z, double coeff, Vec& acc) {
    mlp_forward(m, w, z, true);
    const std::size_t L = m.layers.size();
    Vec& dout = tl_ws.delta[L - 1];  // softmax probs
    dout[static_cast<std::size_t>(z.y)] -= 1.0;
    std::vector<std::size_t> offs(L - 1);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < L; ++l) {
        offs[l] = off;
        off += static_cast<std::size_t>(m.layers[l + 1]) * (m.layers[l] + 1);
    }
    for (std::size_t l = L - 1; l-- > 0;) {
        const int in = m.layers[l];
        const int out = m.layers[l + 1];
        const Vec& a = tl_ws.act[l];
        const Vec& d = tl_ws.delta[l + 1];
        double* gw = acc.data() + offs[l];
        for (int r = 0; r < out; ++r) {
            const double dr = d[static_cast<std::size_t>(r)];
            if (dr == 0.0) continue;
            const double cdr = coeff * dr;
            double* row = gw + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) row[c] += cdr * a[static_cast<std::size_t>(c)];
            gw[static_cast<std::size_t>(out) * in + static_cast<std::size_t>(r)] += cdr;
        }
        if (l == 0) break;
        Vec& dprev = tl_ws.delta[l];
        std::fill(dprev.begin(), dprev.end(), 0.0);
        const double* wl = w.data() + offs[l];
        for (int r = 0; r < out; ++r) {
            const double dr = d[static_cast<std::size_t>(r)];
            if (dr == 0.0) continue;
            const double* row = wl + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) dprev[static_cast<std::size_t>(c)] += row[c] * dr;
        }
        // relu mask: act[l] is already rectified
        for (int c = 0; c < in; ++c)
            if (a[static_cast<std::size_t>(c)] <= 0.0) dprev[static_cast<std::size_t>(c)] = 0.0;
    }
}

void mlp_grad(const MlpModel& m, const Vec& w, const Example& z, Vec& g) {
    g.assign(w.size(), 0.0);
    mlp_grad_accum(m, w, z, 1.0, g);
}

void check_example_dim(const Model& m, const Example& z) {
    const int d = input_dim(m);
    if (std::holds_alternative<QuadraticModel>(m)) {
        if (!z.x.empty() && static_cast<int>(z.x.size()) != d)
            throw shape_error("quadratic: example dim " + std::to_string(z.x.size()) +
                              " vs param dim " + std::to_string(d));
        return;
    }
    if (static_cast<int>(z.x.size()) != d)
        throw shape_error("model: example dim " + std::to_string(z.x.size()) + " vs expected " +
                          std::to_string(d));
}

void check_param_dim(const Model& m, const Vec& w) {
    if (w.size() != param_count(m))
        throw shape_error("model: parameter size " + std::to_string(w.size()) + " vs expected " +
                          std::to_string(param_count(m)));
}

}  // namespace

std::size_t param_count(const Model& m) {
    if (const auto* q = std::get_if<QuadraticModel>(&m)) return q->w_star.size();
    if (const auto* lg = std::get_if<LogisticModel>(&m))
        return static_cast<std::size_t>(lg->classes) * lg->dim + lg->classes;
    const auto& mlp = std::get<MlpModel>(m);
    check_mlp(mlp);
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < mlp.layers.size(); ++l)
        total += static_cast<std::size_t>(mlp.layers[l + 1]) * (mlp.layers[l] + 1);
    return total;
}

int input_dim(const Model& m) {
    if (const auto* q = std::get_if<QuadraticModel>(&m)) return static_cast<int>(q->w_star.size());
    if (const auto* lg = std::get_if<LogisticModel>(&m)) return lg->dim;
    return std::get<MlpModel>(m).layers.front();
}

int model_classes(const Model& m) {
    if (std::holds_alternative<QuadraticModel>(m)) return 0;
    if (const auto* lg = std::get_if<LogisticModel>(&m)) return lg->classes;
    return std::get<MlpModel>(m).layers.back();
}

bool is_classifier(const Model& m) { return !std::holds_alternative<QuadraticModel>(m); }

Vec init_params(const Model& m, std::uint64_t seed) {
    Vec w(param_count(m), 0.0);
    if (const auto* mlp = std::get_if<MlpModel>(&m)) {
        RngStream rng = RngStream::child_of(seed, 0x1417);
        std::size_t off = 0;
        for (std::size_t l = 0; l + 1 < mlp->layers.size(); ++l) {
            const int in = mlp->layers[l];
            const int out = mlp->layers[l + 1];
            const double sd = std::sqrt(2.0 / in);
            for (std::size_t i = 0; i < static_cast<std::size_t>(out) * in; ++i)
                w[off + i] = sd * rng.normal();
            off += static_cast<std::size_t>(out) * (in + 1);  // biases stay zero
        }
    }
    return w;
}

LossValue per_example_loss(const Model& m, const Vec& w, const Example& z,
                           const LossCaps& caps) {
    check_param_dim(m, w);
    check_example_dim(m, z);
    double raw = 0.0;
    if (const auto* q = std::get_if<QuadraticModel>(&m)) {
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double d = w[j] - q->w_star[j] - (z.x.empty() ? 0.0 : z.x[j]);
            s += d * d;
        }
        raw = 0.5 * s;
    } else if (const auto* lg = std::get_if<LogisticModel>(&m)) {
        Vec logits(static_cast<std::size_t>(lg->classes));
        for (int c = 0; c < lg->classes; ++c) {
            const double* row = w.data() + static_cast<std::size_t>(c) * lg->dim;
            double s = 0.0;
            for (int j = 0; j < lg->dim; ++j) s += row[j] * z.x[static_cast<std::size_t>(j)];
            logits[static_cast<std::size_t>(c)] =
                s + w[static_cast<std::size_t>(lg->classes) * lg->dim + c];
        }
        raw = softmax_ce(logits, z.y);
    } else {
        raw = mlp_forward(std::get<MlpModel>(m), w, z, false);
    }
    return {raw, std::min(raw, caps.loss_clamp)};
}

void per_example_grad(const Model& m, const Vec& w, const Example& z, Vec& out) {
    check_param_dim(m, w);
    check_example_dim(m, z);
    if (const auto* q = std::get_if<QuadraticModel>(&m)) {
        out.resize(w.size());
        for (std::size_t j = 0; j < w.size(); ++j)
            out[j] = w[j] - q->w_star[j] - (z.x.empty() ? 0.0 : z.x[j]);
        return;
    }
    if (const auto* lg = std::get_if<LogisticModel>(&m)) {
        Vec logits(static_cast<std::size_t>(lg->classes));
        for (int c = 0; c < lg->classes; ++c) {
            const double* row = w.data() + static_cast<std::size_t>(c) * lg->dim;
            double s = 0.0;
            for (int j = 0; j < lg->dim; ++j) s += row[j] * z.x[static_cast<std::size_t>(j)];
            logits[static_cast<std::size_t>(c)] =
                s + w[static_cast<std::size_t>(lg->classes) * lg->dim + c];
        }
        softmax_ce(logits, z.y);  // logits now hold probabilities
        logits[static_cast<std::size_t>(z.y)] -= 1.0;
        out.assign(w.size(), 0.0);
        for (int c = 0; c < lg->classes; ++c) {
            const double dc = logits[static_cast<std::size_t>(c)];
            double* row = out.data() + static_cast<std::size_t>(c) * lg->dim;
            for (int j = 0; j < lg->dim; ++j) row[j] = dc * z.x[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(lg->classes) * lg->dim + c] = dc;
        }
        return;
    }
    mlp_grad(std::get<MlpModel>(m), w, z, out);
}

Vec per_example_grad(const Model& m, const Vec& w, const Example& z) {
    Vec g;
    per_example_grad(m, w, z, g);
    return g;
}

namespace {

// acc += grad(z), dispatching to the fused MLP path where it matters
void grad_accum(const Model& m, const Vec& w, const Example& z, Vec& acc) {
    if (const auto* mlp = std::get_if<MlpModel>(&m)) {
        check_param_dim(m, w);
        check_example_dim(m, z);
        mlp_grad_accum(*mlp, w, z, 1.0, acc);
        return;
    }
    thread_local Vec g;
    per_example_grad(m, w, z, g);
    axpy(1.0, g, acc);
}

}  // namespace

Vec batch_grad(const Model& m, const Vec& w, const std::vector<Example>& examples,
               const std::vector<std::size_t>& idx) {
    if (idx.empty()) throw domain_error("batch_grad: empty batch");
    Vec acc(param_count(m), 0.0);
    for (std::size_t i : idx) grad_accum(m, w, examples[i], acc);
    scale(acc, 1.0 / static_cast<double>(idx.size()));
    return acc;
}

Vec batch_grad(const Model& m, const Vec& w, const std::vector<Example>& batch) {
    if (batch.empty()) throw domain_error("batch_grad: empty batch");
    Vec acc(param_count(m), 0.0);
    for (const Example& z : batch) grad_accum(m, w, z, acc);
    scale(acc, 1.0 / static_cast<double>(batch.size()));
    return acc;
}

double mean_loss(const Model& m, const Vec& w, const std::vector<Example>& examples) {
    if (examples.empty()) throw domain_error("mean_loss: empty example set");
    double s = 0.0;
    const LossCaps caps;
    for (const Example& z : examples) s += per_example_loss(m, w, z, caps).raw;
    return s / static_cast<double>(examples.size());
}

int predict(const Model& m, const Vec& w, const Example& z) {
    if (!is_classifier(m)) throw unsupported_error("predict: not a classifier model");
    check_param_dim(m, w);
    check_example_dim(m, z);
    if (const auto* lg = std::get_if<LogisticModel>(&m)) {
        int best = 0;
        double best_v = -1e308;
        for (int c = 0; c < lg->classes; ++c) {
            const double* row = w.data() + static_cast<std::size_t>(c) * lg->dim;
            double s = 0.0;
            for (int j = 0; j < lg->dim; ++j) s += row[j] * z.x[static_cast<std::size_t>(j)];
            s += w[static_cast<std::size_t>(lg->classes) * lg->dim + c];
            if (s > best_v) {
                best_v = s;
                best = c;
            }
        }
        return best;
    }
    const auto& mlp = std::get<MlpModel>(m);
    mlp_forward(mlp, w, z, false);
    const Vec& logits = tl_ws.act[mlp.layers.size() - 1];
    int best = 0;
    for (std::size_t c = 1; c < logits.size(); ++c)
        if (logits[c] > logits[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    return best;
}

double test_error(const Model& m, const Vec& w, const std::vector<Example>& examples) {
    if (examples.empty()) throw domain_error("test_error: empty example set");
    std::size_t wrong = 0;
    for (const Example& z : examples)
        if (predict(m, w, z) != z.y) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(examples.size());
}

double test_error_subsample(const Model& m, const Vec& w, const std::vector<Example>& examples,
                            std::size_t subsample, std::uint64_t seed) {
    if (subsample == 0 || subsample >= examples.size()) return test_error(m, w, examples);
    RngStream rng = RngStream::child_of(seed, 0xe881);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < subsample; ++i) {
        const Example& z = examples[rng.uniform_int(examples.size())];
        if (predict(m, w, z) != z.y) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(subsample);
}

}  // namespace efld
