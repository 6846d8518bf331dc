#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "efld/data.hpp"
#include "efld/expfam.hpp"
#include "efld/models.hpp"
#include "efld/schedule.hpp"

namespace efld {

// Noisy update loop: w_t = w_{t-1} - rho_t * xi_t with xi_t drawn from an
// exponential family whose natural parameter is the scaled mini-batch
// gradient. Gaussian noise recovers SGLD via (rho, alpha) = (eta, sigma/eta);
// {-1,+1} Bernoulli noise gives a noisy sign update.

struct TrainState {
    Vec w;
    std::int64_t t = 0;
    RngStream rng;
    int epoch = 0;

    TrainState(Vec w0, std::uint64_t seed) : w(std::move(w0)), rng(seed) {}
};

struct OptimizerSpec {
    enum class Kind { efld, sgld, noisy_sign_sgd, sign_sgd, sgd };

    Kind kind = Kind::sgld;
    ExpFamilySpec family = ExpFamilySpec::gaussian();  // efld only
    Schedule rho = Schedule::constant(0.01);           // efld step size
    Schedule eta = Schedule::constant(0.01);           // sgld / sign / sgd step size
    Schedule sigma = Schedule::constant(0.001);        // sgld noise level
    double beta = 0.0;            // sgld: >0 derives sigma_t = sqrt(2 eta_t / beta)
    double sigma_over_eta = 0.0;  // sgld: >0 derives sigma_t = r * eta_t (alpha fixed at r)
    Schedule alpha = Schedule::constant(1.0);          // efld / noisy sign scaling
    bool adaptive_alpha = false;
    double alpha_safety = 1.0;
    int alpha_pool = 64;       // pool subsample for the adaptive scaling
    double alpha_min = 1e-8;   // floor applied to the adaptive scaling
    int batch_size = 1;
};

// b indices drawn i.i.d. uniform over [0, n) (with replacement).
std::vector<std::size_t> sample_minibatch(std::size_t n, int b, RngStream& rng);

// One noisy step: draws xi with natural parameter grad/alpha, applies
// w -= rho * xi, advances t. Non-finite gradients halt with a numeric error
// carrying the step index.
void efld_step(TrainState& state, const ExpFamilySpec& family, const Vec& grad, double rho,
               double alpha);

// SGLD parameterization of the noisy step: (rho, alpha) = (eta, sigma/eta).
std::pair<double, double> sgld_params(double eta, double sigma);

// Deterministic sign update, sign(0) := +1.
void sign_sgd_step(TrainState& state, const Vec& grad, double eta);

// Plain gradient step.
void sgd_step(TrainState& state, const Vec& grad, double eta);

// Largest pairwise distance between per-example gradients over the pool.
double max_pairwise_grad_distance(const Model& model, const Vec& w,
                                  const std::vector<Example>& pool);

// Data-dependent scaling safety * sqrt(8*c2) * delta_hat, where delta_hat is
// the exact pairwise maximum over the (subsampled) pool. Degenerate pools
// give 0; callers floor the result before dividing by it.
double adaptive_alpha(const Model& model, const Vec& w, const std::vector<Example>& pool,
                      double c2, double safety);

struct StepInfo {
    std::int64_t t = 0;  // 1-based step index after the update
    int epoch = 0;
    const Vec* w = nullptr;
    const std::vector<std::size_t>* batch = nullptr;
    double eta = 0.0;    // nan when the optimizer has no eta
    double rho = 0.0;
    double sigma = 0.0;  // nan unless SGLD
    double alpha = 0.0;  // nan for noise-free optimizers
};

using StepObserver = std::function<void(const StepInfo&)>;

struct RunSetup {
    Model model;
    const Dataset* data = nullptr;
    OptimizerSpec opt;
    std::int64_t steps = 0;  // total steps T
    std::int64_t steps_per_epoch = 0;  // 0 -> derived from n/batch_size
    std::uint64_t seed = 0;
    Vec w0;  // empty -> init_params(model, seed)
};

struct Trajectory {
    Vec w_final;
    std::int64_t steps = 0;
};

// Runs T steps; fully deterministic in (setup, seed). Observers fire after
// every step. Noise and batch sampling use a stream independent from any
// stream the observers may own.
Trajectory run_training(const RunSetup& setup, const std::vector<StepObserver>& observers);

// --- convergence-rate verification -------------------------------------

// One recorded iterate of an optimization run used by the convergence
// checks: the post-update iterate's full-batch gradient statistics and the
// scaling used at that iterate.
struct OptTraceRow {
    double grad_sq = 0.0;   // ||grad L_S(w_t)||_2^2
    double grad_inf = 0.0;  // ||grad L_S(w_t)||_inf
    double alpha = 0.0;
    double kappa = 0.0;     // sub-Gaussian proxy at step t (0 for full batch)
};

struct OptRunTrace {
    std::vector<OptTraceRow> rows;  // one per step, iterates w_1..w_T
    double loss_start = 0.0;        // L_S at the initial iterate
    double loss_star = 0.0;         // L_S at a minimizer
    double k_l1 = 0.0;              // ||K_vec||_1
    double k_max = 0.0;             // max_i K_i
    double step_size = 0.0;         // rho or eta actually used
    std::int64_t steps = 0;
};

struct ConvCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double c = 0.0;  // max alpha over all runs
    bool pass = false;
};

// Full-batch noisy sign updates: requires rho = 1/sqrt(T) and
// alpha_t >= ||grad||_inf at every recorded iterate; the certified rate is
// lhs <= (5c / 3 sqrt(T)) (L(w0) - L(w*) + ||K||_1 / 2) with c = max alpha.
ConvCheck check_signsgd_full(const std::vector<OptRunTrace>& runs);

// Mini-batch variant: alpha_t >= max(sqrt(2) kappa_t, 4 ||grad||_inf), rate
// constant 4c instead of 5c/3.
ConvCheck check_signsgd_minibatch(const std::vector<OptRunTrace>& runs);

// SGLD rate: lhs <= (L(w0)-L(w*))/sqrt(T) + (K/2T) sum(p alpha^2 + c3
// kappa^2)/sqrt(T). c3 is an absolute constant, default 8.
ConvCheck check_sgld(const std::vector<OptRunTrace>& runs, int dim, double c3 = 8.0);

// Smallest kappa such that the empirical moment generating function of
// <v, batch_grad - full_grad> along `dirs` random unit directions stays
// below exp(lambda^2 kappa^2 / 2) for lambda in {0.5, 1, 2}.
double estimate_kappa(const Model& model, const Vec& w, const std::vector<Example>& examples,
                      int batch_size, int dirs, int draws, RngStream& rng);

}  // namespace efld
