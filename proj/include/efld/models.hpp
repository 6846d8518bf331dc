#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "efld/data.hpp"
#include "efld/vecops.hpp"

namespace efld {

// Small differentiable models with first-class per-example gradients,
// backpropagated by hand (the model set is tiny; no autodiff dependency).

// loss(w, z) = 0.5 * ||w - w_star - z.x||^2. Examples with an empty feature
// vector are treated as z.x = 0, giving the plain 0.5*||w - w_star||^2 bowl.
struct QuadraticModel {
    Vec w_star;
};

// Multinomial logistic regression with bias: params [W (classes x dim), b].
struct LogisticModel {
    int dim = 0;
    int classes = 2;
};

// Fully connected ReLU net ending in softmax cross-entropy.
// layers = {in, hidden..., classes}; params are per-layer [W row-major, b].
struct MlpModel {
    std::vector<int> layers;
};

using Model = std::variant<QuadraticModel, LogisticModel, MlpModel>;

// Clamp applied to losses reported to the bound machinery; the bound
// constant is c0 = 2 * loss_clamp. Optimization always uses the raw loss.
struct LossCaps {
    double loss_clamp = 4.0;
    double c0() const { return 2.0 * loss_clamp; }
};

std::size_t param_count(const Model& m);
int input_dim(const Model& m);
int model_classes(const Model& m);
bool is_classifier(const Model& m);

// Deterministic initial parameters: zeros for quadratic/logistic, He-scaled
// normals for MLP weights (biases zero).
Vec init_params(const Model& m, std::uint64_t seed);

struct LossValue {
    double raw;
    double clamped;
};

LossValue per_example_loss(const Model& m, const Vec& w, const Example& z, const LossCaps& caps);

// Gradient of the raw loss; deterministic. out is resized as needed.
void per_example_grad(const Model& m, const Vec& w, const Example& z, Vec& out);
Vec per_example_grad(const Model& m, const Vec& w, const Example& z);

// Arithmetic mean of per-example gradients, accumulated in index order.
Vec batch_grad(const Model& m, const Vec& w, const std::vector<Example>& examples,
               const std::vector<std::size_t>& idx);
Vec batch_grad(const Model& m, const Vec& w, const std::vector<Example>& batch);

// Mean raw loss over a set of examples.
double mean_loss(const Model& m, const Vec& w, const std::vector<Example>& examples);

int predict(const Model& m, const Vec& w, const Example& z);

// Misclassification rate under argmax prediction (classifier models only).
double test_error(const Model& m, const Vec& w, const std::vector<Example>& examples);

// Same on a deterministic subsample (0 = use all examples).
double test_error_subsample(const Model& m, const Vec& w, const std::vector<Example>& examples,
                            std::size_t subsample, std::uint64_t seed);

}  // namespace efld
