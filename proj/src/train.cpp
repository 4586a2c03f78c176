#include "adeqnn/train.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>

namespace adeqnn::train {

OptimizerConfig amsgrad_defaults() {
  return OptimizerConfig{OptimizerKind::AMSGrad, 0.05, 0.9, 0.99, 1e-8};
}

OptimizerConfig rmsprop_defaults() {
  return OptimizerConfig{OptimizerKind::RMSProp, 0.01, 0.0, 0.9, 1e-8};
}

OptimizerState make_optimizer(const OptimizerConfig& cfg, std::size_t dim) {
  OptimizerState st;
  st.cfg = cfg;
  st.first_moment.assign(dim, 0.0);
  st.second_moment.assign(dim, 0.0);
  st.max_second_moment.assign(dim, 0.0);
  return st;
}

namespace {

void check_dims(const OptimizerState& st, const std::vector<double>& theta,
                const std::vector<double>& g) {
  if (theta.size() != g.size() || theta.size() != st.first_moment.size())
    throw std::invalid_argument("optimizer dimension mismatch");
}

}  // namespace

void amsgrad_step(OptimizerState& st, std::vector<double>& theta,
                  const std::vector<double>& g) {
  check_dims(st, theta, g);
  const double b1 = st.cfg.beta1, b2 = st.cfg.beta2;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    st.first_moment[i] = b1 * st.first_moment[i] + (1.0 - b1) * g[i];
    st.second_moment[i] = b2 * st.second_moment[i] + (1.0 - b2) * g[i] * g[i];
    st.max_second_moment[i] = std::max(st.max_second_moment[i], st.second_moment[i]);
    theta[i] -= st.cfg.lr * st.first_moment[i] /
                (std::sqrt(st.max_second_moment[i]) + st.cfg.eps);
  }
  ++st.step;
}

void rmsprop_step(OptimizerState& st, std::vector<double>& theta,
                  const std::vector<double>& g) {
  check_dims(st, theta, g);
  const double b2 = st.cfg.beta2;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    st.second_moment[i] = b2 * st.second_moment[i] + (1.0 - b2) * g[i] * g[i];
    theta[i] -= st.cfg.lr * g[i] / (std::sqrt(st.second_moment[i]) + st.cfg.eps);
  }
  ++st.step;
}

void optimizer_step(OptimizerState& st, std::vector<double>& theta,
                    const std::vector<double>& g) {
  if (st.cfg.kind == OptimizerKind::AMSGrad)
    amsgrad_step(st, theta, g);
  else
    rmsprop_step(st, theta, g);
}

std::int64_t shots_at(const ShotSchedule& s, int iter) {
  if (iter < 0 || iter >= s.total_iters)
    throw std::out_of_range("shots_at: iter outside [0, total_iters)");
  if (s.s0 < 1 || s.doublings < 0)
    throw std::invalid_argument("shots_at: bad schedule");
  std::int64_t e = static_cast<std::int64_t>(iter) * (s.doublings + 1) /
                   s.total_iters;
  if (e > s.doublings) e = s.doublings;
  return s.s0 << e;
}

double mse_loss(const std::vector<double>& scores,
                const std::vector<double>& target) {
  if (scores.size() != target.size() || scores.empty())
    throw std::invalid_argument("mse_loss: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double d = scores[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(scores.size());
}

namespace {

double decayed_c(const SpsaConfig& cfg, int k) {
  return cfg.c0 / std::pow(static_cast<double>(k) + 1.0, cfg.gamma);
}

std::vector<double> rademacher(std::size_t dim, qcore::Rng& rng) {
  std::vector<double> d(dim);
  for (auto& x : d) x = rng.below(2) == 0 ? 1.0 : -1.0;
  return d;
}

}  // namespace

std::vector<double> spsa_gradient(
    const std::function<double(const std::vector<double>&)>& cost,
    const std::vector<double>& theta, int k, const SpsaConfig& cfg,
    qcore::Rng& rng) {
  if (cfg.avg_draws < 1) throw std::invalid_argument("avg_draws must be >= 1");
  const double ck = decayed_c(cfg, k);
  std::vector<double> g(theta.size(), 0.0), shifted(theta.size());
  for (int a = 0; a < cfg.avg_draws; ++a) {
    auto delta = rademacher(theta.size(), rng);
    for (std::size_t i = 0; i < theta.size(); ++i)
      shifted[i] = theta[i] + ck * delta[i];
    double cp = cost(shifted);
    for (std::size_t i = 0; i < theta.size(); ++i)
      shifted[i] = theta[i] - ck * delta[i];
    double cm = cost(shifted);
    if (!std::isfinite(cp) || !std::isfinite(cm))
      throw std::runtime_error("spsa_gradient: non-finite cost");
    double scale = (cp - cm) / (2.0 * ck);
    for (std::size_t i = 0; i < theta.size(); ++i) g[i] += scale * delta[i];
  }
  for (auto& x : g) x /= static_cast<double>(cfg.avg_draws);
  return g;
}

int thread_budget() {
  static int cached = [] {
    const char* env = std::getenv("ADEQNN_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    if (n < 1) return 1;
    return n > 64 ? 64 : n;
  }();
  return cached;
}

namespace {

// One SPSA direction: fresh Rademacher draw, two cost evaluations, retried
// once on post-selection failure. Fully determined by (seed, iter, draw).
struct DrawResult {
  bool ok = false;
  double cost_plus = 0.0;
  double cost_minus = 0.0;
  std::vector<double> delta;
};

DrawResult evaluate_draw(const Cost& cost, const std::vector<double>& theta,
                         const std::vector<int>& frozen, double ck,
                         std::uint64_t seed, int iter, int draw) {
  DrawResult out;
  std::vector<double> shifted(theta.size());
  for (int attempt = 0; attempt < 2; ++attempt) {
    // slots: attempt-local triple (direction, +eval, -eval)
    std::uint32_t base = static_cast<std::uint32_t>(draw) * 8 +
                         static_cast<std::uint32_t>(attempt) * 4;
    auto dir_rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(iter), base);
    auto delta = rademacher(theta.size(), dir_rng);
    for (int f : frozen) delta[static_cast<std::size_t>(f)] = 0.0;
    try {
      for (std::size_t i = 0; i < theta.size(); ++i)
        shifted[i] = theta[i] + ck * delta[i];
      auto rng_p = qcore::Rng::derive(seed, static_cast<std::uint32_t>(iter), base + 1);
      double cp = cost(shifted, rng_p);
      for (std::size_t i = 0; i < theta.size(); ++i)
        shifted[i] = theta[i] - ck * delta[i];
      auto rng_m = qcore::Rng::derive(seed, static_cast<std::uint32_t>(iter), base + 2);
      double cm = cost(shifted, rng_m);
      if (!std::isfinite(cp) || !std::isfinite(cm))
        throw std::runtime_error("train_loop: non-finite cost");
      out.ok = true;
      out.cost_plus = cp;
      out.cost_minus = cm;
      out.delta = std::move(delta);
      return out;
    } catch (const qcore::NullPostSelection&) {
      continue;  // resample the direction once
    }
  }
  return out;  // both attempts blocked
}

}  // namespace

RunRecord train_loop(const CostBuilder& builder, std::vector<double> theta0,
                     const OptimizerConfig& opt_cfg, const SpsaConfig& spsa_cfg,
                     const ShotSchedule& schedule, int iters,
                     std::uint64_t seed, const TrainOptions& options) {
  if (iters < 0) throw std::invalid_argument("train_loop: negative iters");
  if (spsa_cfg.avg_draws < 1)
    throw std::invalid_argument("train_loop: avg_draws must be >= 1");
  for (int f : options.frozen_indices)
    if (f < 0 || static_cast<std::size_t>(f) >= theta0.size())
      throw std::invalid_argument("train_loop: frozen index out of range");

  RunRecord rec;
  rec.seed = seed;
  rec.history.reserve(static_cast<std::size_t>(iters));
  rec.wall_ms.reserve(static_cast<std::size_t>(iters));

  auto theta = theta0;
  auto opt = make_optimizer(opt_cfg, theta.size());
  const int threads = thread_budget();
  int consecutive_dropped = 0;

  for (int it = 0; it < iters; ++it) {
    auto t0 = std::chrono::steady_clock::now();
    std::int64_t shots = shots_at(schedule, it);
    Cost cost = builder(it, shots);
    const double ck = decayed_c(spsa_cfg, it);

    std::vector<DrawResult> results(static_cast<std::size_t>(spsa_cfg.avg_draws));
    if (threads <= 1 || spsa_cfg.avg_draws == 1) {
      for (int a = 0; a < spsa_cfg.avg_draws; ++a)
        results[static_cast<std::size_t>(a)] = evaluate_draw(
            cost, theta, options.frozen_indices, ck, seed, it, a);
    } else {
      // slot-indexed parallel map; reduction below stays in draw order
      std::vector<std::future<void>> futs;
      futs.reserve(static_cast<std::size_t>(threads));
      std::atomic<int> next{0};
      for (int t = 0; t < threads; ++t)
        futs.push_back(std::async(std::launch::async, [&] {
          for (;;) {
            int a = next.fetch_add(1);
            if (a >= spsa_cfg.avg_draws) return;
            results[static_cast<std::size_t>(a)] = evaluate_draw(
                cost, theta, options.frozen_indices, ck, seed, it, a);
          }
        }));
      for (auto& f : futs) f.get();
    }

    std::vector<double> g(theta.size(), 0.0);
    int contributing = 0;
    double cost_sum = 0.0;
    for (int a = 0; a < spsa_cfg.avg_draws; ++a) {
      const auto& r = results[static_cast<std::size_t>(a)];
      if (!r.ok) {
        if (++consecutive_dropped >= 3)
          throw qcore::NullPostSelection(
              "train_loop: three consecutive SPSA draws blocked by post-selection");
        continue;
      }
      consecutive_dropped = 0;
      double scale = (r.cost_plus - r.cost_minus) / (2.0 * ck);
      for (std::size_t i = 0; i < theta.size(); ++i) g[i] += scale * r.delta[i];
      cost_sum += 0.5 * (r.cost_plus + r.cost_minus);
      ++contributing;
    }
    if (contributing > 0) {
      for (auto& x : g) x /= static_cast<double>(contributing);
      optimizer_step(opt, theta, g);
      for (int f : options.frozen_indices)
        theta[static_cast<std::size_t>(f)] = theta0[static_cast<std::size_t>(f)];
    }

    HistoryRow row;
    row.iter = it;
    row.cost = contributing > 0 ? cost_sum / contributing
                                : std::numeric_limits<double>::quiet_NaN();
    row.shots = shots;
    row.metric = options.metric
                     ? options.metric(theta, it)
                     : std::numeric_limits<double>::quiet_NaN();
    rec.history.push_back(row);
    rec.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count());
  }

  rec.theta_final = std::move(theta);
  return rec;
}

}  // namespace adeqnn::train
