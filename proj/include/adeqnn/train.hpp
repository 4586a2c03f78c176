#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "adeqnn/qcore.hpp"

namespace adeqnn::train {

// SPSA perturbation schedule: c_k = c0 / (k+1)^gamma, averaged over avg_draws
// independent Rademacher directions.
struct SpsaConfig {
  double c0 = 0.1;
  double gamma = 0.101;
  int avg_draws = 4;
};

enum class OptimizerKind { AMSGrad, RMSProp };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::AMSGrad;
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
};

OptimizerConfig amsgrad_defaults();  // lr 0.05, beta1 0.9, beta2 0.99
OptimizerConfig rmsprop_defaults();  // lr 0.01, beta2 0.9

struct OptimizerState {
  OptimizerConfig cfg;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::vector<double> max_second_moment;  // AMSGrad only, elementwise nondecreasing
  long step = 0;
};

OptimizerState make_optimizer(const OptimizerConfig& cfg, std::size_t dim);

// In-place updates. amsgrad: m <- b1*m+(1-b1)g, v <- b2*v+(1-b2)g^2,
// vhat <- max(vhat, v), theta -= lr*m/(sqrt(vhat)+eps). No bias correction.
void amsgrad_step(OptimizerState& state, std::vector<double>& theta,
                  const std::vector<double>& g);
// rmsprop: v <- b2*v+(1-b2)g^2, theta -= lr*g/(sqrt(v)+eps).
void rmsprop_step(OptimizerState& state, std::vector<double>& theta,
                  const std::vector<double>& g);
// Dispatches on state.cfg.kind.
void optimizer_step(OptimizerState& state, std::vector<double>& theta,
                    const std::vector<double>& g);

// Geometric shot ramp: s0 * 2^floor(iter*(doublings+1)/total_iters),
// capped at s0 * 2^doublings.
struct ShotSchedule {
  std::int64_t s0 = 256;
  int doublings = 0;
  int total_iters = 1;
};

std::int64_t shots_at(const ShotSchedule& schedule, int iter);

double mse_loss(const std::vector<double>& scores,
                const std::vector<double>& target);

// One SPSA estimate, spec shape: cost takes only theta, rng supplies the
// Rademacher draws. Post-selection failures propagate to the caller.
std::vector<double> spsa_gradient(
    const std::function<double(const std::vector<double>&)>& cost,
    const std::vector<double>& theta, int k, const SpsaConfig& cfg,
    qcore::Rng& rng);

struct HistoryRow {
  int iter = 0;
  double cost = 0.0;
  std::int64_t shots = 0;
  double metric = 0.0;  // NaN when no metric function is supplied
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<double> theta_final;
  std::vector<HistoryRow> history;
  std::vector<double> wall_ms;  // per-iteration timing, never serialized
};

// Cost evaluated at theta with a caller-derived rng (sampled-mode noise only;
// exact-mode costs ignore the rng). Must be pure apart from rng consumption.
using Cost =
    std::function<double(const std::vector<double>&, qcore::Rng&)>;
// Supplies the cost for one iteration (batch selection, shot budget).
using CostBuilder = std::function<Cost(int iter, std::int64_t shots)>;
// Optional progress metric, evaluated on the post-update parameters.
using MetricFn = std::function<double(const std::vector<double>& theta, int iter)>;

struct TrainOptions {
  std::vector<int> frozen_indices;  // held at their theta0 values
  MetricFn metric;
};

// Shared hybrid loop: per iteration builds the cost, estimates the SPSA
// gradient (avg_draws directions, each costing two evaluations), applies one
// optimizer step, and records (iter, mean evaluated cost, shots, metric).
//
// Determinism: every evaluation draws from qcore::Rng::derive(seed, iter,
// slot) where the slot index is fixed by (draw, attempt, sign), so serial and
// parallel execution produce identical histories. Thread count comes from
// ADEQNN_THREADS (default 1).
//
// Post-selection: a draw whose evaluation throws NullPostSelection is retried
// once with a fresh direction; a draw that fails twice is dropped, and three
// consecutive dropped draws abort the run by rethrowing.
RunRecord train_loop(const CostBuilder& builder, std::vector<double> theta0,
                     const OptimizerConfig& opt_cfg, const SpsaConfig& spsa_cfg,
                     const ShotSchedule& schedule, int iters,
                     std::uint64_t seed, const TrainOptions& options = {});

// ADEQNN_THREADS clamped to [1, 64]; 1 when unset or unparsable.
int thread_budget();

}  // namespace adeqnn::train
