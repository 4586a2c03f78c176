#include "adeqnn/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adeqnn::tasks {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<double, 4> map_angles(const std::array<int, 4>& input_map,
                                 const std::vector<double>& features) {
  std::array<double, 4> a{};
  for (int q = 0; q < 4; ++q) {
    int f = input_map[static_cast<std::size_t>(q)];
    if (f < 0) continue;
    if (static_cast<std::size_t>(f) >= features.size())
      throw std::invalid_argument("input_map points past the feature vector");
    a[static_cast<std::size_t>(q)] = features[static_cast<std::size_t>(f)] * kPi;
  }
  return a;
}

// distribution from sampled counts, scores undefined when nothing is accepted
circuit::OutputDistribution empirical_distribution(
    const std::array<std::int64_t, 16>& counts, std::int64_t accepted,
    std::int64_t shots) {
  if (accepted < 1)
    throw qcore::NullPostSelection("no shots survived post-selection");
  circuit::OutputDistribution dist;
  for (int b = 0; b < 16; ++b)
    dist.p[static_cast<std::size_t>(b)] =
        static_cast<double>(counts[static_cast<std::size_t>(b)]) / static_cast<double>(accepted);
  dist.success_prob = static_cast<double>(accepted) / static_cast<double>(shots);
  return dist;
}

std::vector<double> scores_for(const circuit::CircuitConfig& config,
                               const circuit::ParamVector& params,
                               const std::array<double, 4>& angles,
                               std::int64_t shots, qcore::Rng* rng) {
  if (config.shots_mode == circuit::ShotsMode::exact || rng == nullptr)
    return circuit::readout_scores(circuit::forward(config, params, angles),
                                   config.readout);
  auto [counts, accepted] =
      circuit::forward_sampled(config, params, angles, shots, *rng);
  return circuit::readout_scores(empirical_distribution(counts, accepted, shots),
                                 config.readout);
}

}  // namespace

ClassifyHyper default_hyper(ClassifyTask task) {
  ClassifyHyper h;
  h.spsa.c0 = 0.5;
  h.opt.lr = 0.08;
  if (task == ClassifyTask::glass) {
    h.epochs = 70;
    h.batch = 32;
    h.spsa.avg_draws = 64;
  } else {
    h.epochs = 100;
    h.batch = 25;
    h.spsa.avg_draws = 16;
    h.data_seed = task == ClassifyTask::circle ? 67 : 13;
  }
  h.shots.s0 = 256;
  h.shots.doublings = 5;
  return h;
}

circuit::CircuitConfig classify_config(ClassifyTask task, Variant variant,
                                       circuit::ShotsMode mode) {
  circuit::CircuitConfig cfg;
  cfg.replication_enabled = variant == Variant::ade;
  cfg.mcry_enabled = variant == Variant::ade;
  cfg.shots_mode = mode;
  if (task == ClassifyTask::glass) {
    cfg.readout = circuit::Readout::three_class;
    cfg.input_map = {0, 1, 2, 3};
  } else {
    cfg.readout = circuit::Readout::two_class;
    // replication duplicates the two features across the register; the
    // plain variant encodes each feature once
    cfg.input_map = variant == Variant::ade ? std::array<int, 4>{0, 1, 0, 1}
                                            : std::array<int, 4>{0, 1, -1, -1};
  }
  return cfg;
}

ClassifyResult run_classification(ClassifyTask task,
                                  const circuit::CircuitConfig& config,
                                  const ClassifyHyper& hyper,
                                  std::uint64_t seed,
                                  const std::string& glass_path) {
  datasets::Split split;
  int n_classes = 2;
  switch (task) {
    case ClassifyTask::circle:
      split = datasets::gen_circle(50, 200, hyper.data_seed);
      break;
    case ClassifyTask::spiral:
      split = datasets::gen_spiral(50, 200, hyper.data_seed, hyper.spiral);
      break;
    case ClassifyTask::glass:
      split = datasets::load_glass(glass_path);
      n_classes = 3;
      break;
  }
  const auto& train_pts = split.first;
  const auto& test_pts = split.second;
  const int n_train = static_cast<int>(train_pts.size());

  std::vector<std::array<double, 4>> train_angles, test_angles;
  for (const auto& p : train_pts)
    train_angles.push_back(map_angles(config.input_map, p.features));
  for (const auto& p : test_pts)
    test_angles.push_back(map_angles(config.input_map, p.features));

  // precomputed shuffled-epoch batch schedule, one stream for the whole run
  const int batch = std::min(hyper.batch, n_train);
  const int iters_per_epoch = (n_train + batch - 1) / batch;
  const int iters = hyper.epochs * iters_per_epoch;
  std::vector<std::vector<int>> batches;
  batches.reserve(static_cast<std::size_t>(iters));
  {
    auto shuffle_rng = qcore::Rng::derive(seed, 0xB47C, 0);
    std::vector<int> order(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int e = 0; e < hyper.epochs; ++e) {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);
      for (int s = 0; s < n_train; s += batch) {
        std::vector<int> idx(order.begin() + s,
                             order.begin() + std::min(s + batch, n_train));
        batches.push_back(std::move(idx));
      }
    }
  }

  auto one_hot = [&](int label) {
    std::vector<double> t(static_cast<std::size_t>(n_classes), 0.0);
    t[static_cast<std::size_t>(label)] = 1.0;
    return t;
  };

  const bool sampled = config.shots_mode == circuit::ShotsMode::sampled;
  train::CostBuilder builder = [&](int iter, std::int64_t shots) -> train::Cost {
    const auto& idx = batches[static_cast<std::size_t>(iter)];
    return [&, idx, shots](const std::vector<double>& theta,
                           qcore::Rng& rng) -> double {
      circuit::ParamVector params(theta);
      double acc = 0.0;
      for (int i : idx) {
        auto scores = scores_for(config, params, train_angles[static_cast<std::size_t>(i)],
                                 shots, sampled ? &rng : nullptr);
        acc += train::mse_loss(scores, one_hot(train_pts[static_cast<std::size_t>(i)].label));
      }
      return acc / static_cast<double>(idx.size());
    };
  };

  // per-iteration metric: exact-mode test accuracy
  circuit::CircuitConfig exact_cfg = config;
  exact_cfg.shots_mode = circuit::ShotsMode::exact;
  auto test_accuracy_of = [&](const circuit::ParamVector& params) {
    std::vector<std::vector<double>> preds;
    std::vector<int> truths;
    for (std::size_t i = 0; i < test_pts.size(); ++i) {
      preds.push_back(circuit::readout_scores(
          circuit::forward(exact_cfg, params, test_angles[i]), config.readout));
      truths.push_back(test_pts[i].label);
    }
    return metrics::accuracy_and_confusion(preds, truths, n_classes);
  };
  train::TrainOptions options;
  options.metric = [&](const std::vector<double>& theta, int) {
    return test_accuracy_of(circuit::ParamVector(theta)).first;
  };
  if (!config.mcry_enabled)
    for (int i = circuit::kMcry; i < circuit::kCry; ++i)
      options.frozen_indices.push_back(i);  // inert without the module

  auto init_rng = qcore::Rng::derive(seed, 0x1717, 0);
  auto theta0 = circuit::initial_params(init_rng);

  train::ShotSchedule schedule = hyper.shots;
  schedule.total_iters = iters;
  auto record = train::train_loop(builder, theta0.v, hyper.opt, hyper.spsa,
                                  schedule, iters, seed, options);

  ClassifyResult out;
  circuit::ParamVector final_params(record.theta_final);
  auto [test_acc, confusion] = test_accuracy_of(final_params);
  out.test_accuracy = test_acc;
  out.confusion = std::move(confusion);
  {
    std::vector<std::vector<double>> preds;
    std::vector<int> truths;
    for (std::size_t i = 0; i < train_pts.size(); ++i) {
      preds.push_back(circuit::readout_scores(
          circuit::forward(exact_cfg, final_params, train_angles[i]),
          config.readout));
      truths.push_back(train_pts[i].label);
    }
    out.train_accuracy = metrics::accuracy_and_confusion(preds, truths, n_classes).first;
  }
  if (task != ClassifyTask::glass) {
    out.boundary.reserve(101 * 101);
    for (int iy = 0; iy < 101; ++iy)
      for (int ix = 0; ix < 101; ++ix) {
        BoundaryRow row;
        row.x = -1.0 + 0.02 * ix;
        row.y = -1.0 + 0.02 * iy;
        row.scores = circuit::readout_scores(
            circuit::forward(exact_cfg, final_params,
                             map_angles(config.input_map, {row.x, row.y})),
            config.readout);
        row.pred = static_cast<int>(std::max_element(row.scores.begin(),
                                                     row.scores.end()) -
                                    row.scores.begin());
        out.boundary.push_back(std::move(row));
      }
  }
  out.record = std::move(record);
  out.data = std::move(split);
  return out;
}

// ---------------- patched generative adversarial training ----------------

std::array<double, 64> generator_forward(
    const std::array<circuit::ParamVector, 4>& patches,
    const std::array<double, 2>& noise, bool exact, std::int64_t shots,
    qcore::Rng* rng) {
  if (noise[0] < 0.0 || noise[0] > 1.0 || noise[1] < 0.0 || noise[1] > 1.0)
    throw std::invalid_argument("generator noise must lie in [0,1]^2");
  circuit::CircuitConfig cfg;
  cfg.replication_enabled = true;
  cfg.mcry_enabled = true;
  cfg.input_map = {0, -1, 1, -1};  // noise drives q0 and q2
  cfg.shots_mode = exact ? circuit::ShotsMode::exact : circuit::ShotsMode::sampled;
  std::array<double, 64> img{};
  for (int k = 0; k < 4; ++k) {
    std::array<double, 4> angles =
        map_angles(cfg.input_map, {noise[0], noise[1]});
    circuit::OutputDistribution dist;
    if (exact) {
      dist = circuit::forward(cfg, patches[static_cast<std::size_t>(k)], angles);
    } else {
      if (rng == nullptr) throw std::invalid_argument("sampled mode needs an rng");
      auto [counts, accepted] = circuit::forward_sampled(
          cfg, patches[static_cast<std::size_t>(k)], angles, shots, *rng);
      dist = empirical_distribution(counts, accepted, shots);
    }
    double peak = 0.0;
    for (double p : dist.p) peak = std::max(peak, p);
    if (peak <= 0.0)
      throw qcore::NullPostSelection("patch produced an all-zero distribution");
    for (int j = 0; j < 16; ++j)
      img[static_cast<std::size_t>(k * 16 + j)] = dist.p[static_cast<std::size_t>(j)] / peak;
  }
  return img;
}

GanResult train_qgan(const std::vector<std::array<double, 64>>& images,
                     const GanConfig& cfg, std::uint64_t seed) {
  if (images.empty()) throw std::invalid_argument("train_qgan: no images");
  if (cfg.batch < 1 || cfg.iters < 0 || cfg.n_critic < 1)
    throw std::invalid_argument("train_qgan: bad config");

  GanResult out;
  for (int p = 0; p < 64; ++p) {
    double m = 0.0;
    for (const auto& img : images) m += img[static_cast<std::size_t>(p)];
    out.prototype[static_cast<std::size_t>(p)] = m / static_cast<double>(images.size());
  }

  auto init_rng = qcore::Rng::derive(seed, 0, 0);
  MlpDiscriminator critic = make_discriminator(init_rng);
  auto critic_flat = flatten(critic);
  auto critic_cfg = train::rmsprop_defaults();
  critic_cfg.lr = cfg.lr_critic;
  auto critic_state = train::make_optimizer(critic_cfg, critic_flat.size());

  std::array<circuit::ParamVector, 4> patches;
  std::vector<double> gen_theta;
  gen_theta.reserve(4 * circuit::kParamCount);
  for (int p = 0; p < 4; ++p) {
    auto r = qcore::Rng::derive(seed, 1, static_cast<std::uint32_t>(p));
    patches[static_cast<std::size_t>(p)] = circuit::initial_params(r);
    gen_theta.insert(gen_theta.end(), patches[static_cast<std::size_t>(p)].v.begin(),
                     patches[static_cast<std::size_t>(p)].v.end());
  }
  auto gen_cfg = train::rmsprop_defaults();
  gen_cfg.lr = cfg.lr_generator;
  auto gen_state = train::make_optimizer(gen_cfg, gen_theta.size());

  auto patches_of = [](const std::vector<double>& theta) {
    std::array<circuit::ParamVector, 4> ps;
    for (int p = 0; p < 4; ++p)
      ps[static_cast<std::size_t>(p)] = circuit::ParamVector(std::vector<double>(
          theta.begin() + p * circuit::kParamCount,
          theta.begin() + (p + 1) * circuit::kParamCount));
    return ps;
  };

  auto generate = [&](const std::vector<double>& theta,
                      const std::array<double, 2>& z, qcore::Rng* rng) {
    return generator_forward(patches_of(theta), z, cfg.exact, cfg.shots, rng);
  };

  out.record.seed = seed;
  const int eval_batch = 16;

  for (int it = 0; it < cfg.iters; ++it) {
    // critic phase: n_critic fresh batches
    for (int c = 0; c < cfg.n_critic; ++c) {
      auto rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(it),
                                    16 + static_cast<std::uint32_t>(c));
      auto grads = zero_grads();
      double inv_b = 1.0 / static_cast<double>(cfg.batch);
      for (int k = 0; k < cfg.batch; ++k) {
        const auto& real = images[rng.below(images.size())];
        std::array<double, 2> z{rng.uniform(), rng.uniform()};
        auto fake = generate(gen_theta, z, cfg.exact ? nullptr : &rng);
        MlpCache cache_r, cache_f;
        mlp_forward(critic, real.data(), &cache_r);
        mlp_forward(critic, fake.data(), &cache_f);
        accumulate(grads, mlp_backward(critic, cache_f, 1.0), inv_b);
        accumulate(grads, mlp_backward(critic, cache_r, -1.0), inv_b);
        MlpGrads gp_grads;
        gradient_penalty(critic, real.data(), fake.data(), rng, gp_grads);
        accumulate(grads, gp_grads, 10.0 * inv_b);
      }
      train::rmsprop_step(critic_state, critic_flat, flatten(grads));
      unflatten(critic_flat, critic);
    }

    // generator phase: SPSA on the concatenated patch parameters
    std::vector<std::array<double, 2>> zs(static_cast<std::size_t>(cfg.batch));
    {
      auto rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(it), 2);
      for (auto& z : zs) z = {rng.uniform(), rng.uniform()};
    }
    auto gen_cost = [&](const std::vector<double>& theta,
                        qcore::Rng& rng) -> double {
      double acc = 0.0;
      for (const auto& z : zs) {
        auto img = generate(theta, z, cfg.exact ? nullptr : &rng);
        acc -= mlp_forward(critic, img.data());
      }
      return acc / static_cast<double>(cfg.batch);
    };
    const double ck =
        cfg.spsa.c0 / std::pow(static_cast<double>(it) + 1.0, cfg.spsa.gamma);
    std::vector<double> g(gen_theta.size(), 0.0), shifted(gen_theta.size());
    double cost_sum = 0.0;
    for (int a = 0; a < cfg.spsa.avg_draws; ++a) {
      auto dir_rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(it),
                                        64 + 4 * static_cast<std::uint32_t>(a));
      std::vector<double> delta(gen_theta.size());
      for (auto& d : delta) d = dir_rng.below(2) == 0 ? 1.0 : -1.0;
      for (std::size_t i = 0; i < gen_theta.size(); ++i)
        shifted[i] = gen_theta[i] + ck * delta[i];
      auto rng_p = qcore::Rng::derive(seed, static_cast<std::uint32_t>(it),
                                      64 + 4 * static_cast<std::uint32_t>(a) + 1);
      double cp = gen_cost(shifted, rng_p);
      for (std::size_t i = 0; i < gen_theta.size(); ++i)
        shifted[i] = gen_theta[i] - ck * delta[i];
      auto rng_m = qcore::Rng::derive(seed, static_cast<std::uint32_t>(it),
                                      64 + 4 * static_cast<std::uint32_t>(a) + 2);
      double cm = gen_cost(shifted, rng_m);
      double scale = (cp - cm) / (2.0 * ck);
      for (std::size_t i = 0; i < gen_theta.size(); ++i) g[i] += scale * delta[i];
      cost_sum += 0.5 * (cp + cm);
    }
    for (auto& x : g) x /= static_cast<double>(cfg.spsa.avg_draws);
    train::rmsprop_step(gen_state, gen_theta, g);

    // recorded diagnostics on fresh evaluation batches
    auto eval_rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(it), 5);
    std::vector<std::array<double, 64>> real_eval, fake_eval;
    for (int k = 0; k < eval_batch; ++k) {
      real_eval.push_back(images[eval_rng.below(images.size())]);
      std::array<double, 2> z{eval_rng.uniform(), eval_rng.uniform()};
      fake_eval.push_back(generate(gen_theta, z, cfg.exact ? nullptr : &eval_rng));
    }
    train::HistoryRow row;
    row.iter = it;
    row.cost = cost_sum / static_cast<double>(cfg.spsa.avg_draws);
    row.shots = cfg.exact ? 0 : cfg.shots;
    row.metric = metrics::wasserstein_estimate(critic, real_eval, fake_eval);
    out.record.history.push_back(row);

    if (cfg.checkpoint_every > 0 && (it + 1) % cfg.checkpoint_every == 0) {
      auto ck_rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(it), 6);
      out.checkpoints.emplace_back(
          it + 1, generate(gen_theta, {0.5, 0.5}, cfg.exact ? nullptr : &ck_rng));
    }
  }

  // final sample set and similarity scores
  auto final_rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(cfg.iters), 7);
  double s_proto = 0.0, s_near = 0.0;
  const int n_final = 32;
  for (int k = 0; k < n_final; ++k) {
    std::array<double, 2> z{final_rng.uniform(), final_rng.uniform()};
    auto img = generate(gen_theta, z, cfg.exact ? nullptr : &final_rng);
    s_proto += metrics::ssim(img, out.prototype);
    double best = -1.0;
    for (const auto& real : images) best = std::max(best, metrics::ssim(img, real));
    s_near += best;
    out.final_images.push_back(img);
  }
  out.ssim_vs_prototype = s_proto / n_final;
  out.ssim_vs_nearest = s_near / n_final;
  auto final_patches = patches_of(gen_theta);
  for (int p = 0; p < 4; ++p)
    out.generator_params[static_cast<std::size_t>(p)] = final_patches[static_cast<std::size_t>(p)].v;
  out.critic = std::move(critic);
  out.record.theta_final = std::move(gen_theta);
  return out;
}

// ---------------- denoising diffusion on Gibbs targets ----------------

QgdmResult train_qgdm(const qcore::DensityMatrix& target, int T,
                      Variant variant, std::uint64_t seed,
                      const QgdmConfig& cfg) {
  if (target.dim != 4) throw std::invalid_argument("train_qgdm: need a 2-qubit target");
  if (T < 1) throw std::invalid_argument("train_qgdm: T must be >= 1");

  QgdmResult out;
  out.forward_trajectory =
      datasets::forward_diffuse(target, datasets::linear_schedule(T));

  qcore::DensityMatrix current = qcore::maximally_mixed(4);  // rho_tilde_T
  for (int t = T; t >= 1; --t) {
    const qcore::DensityMatrix& step_target =
        t >= 2 ? out.forward_trajectory[static_cast<std::size_t>(t - 2)] : target;

    auto theta_rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(t), 0x717);
    auto theta0 = circuit::initial_params(theta_rng);
    train::TrainOptions options;
    for (int i = circuit::kLayer1W; i < circuit::kLayer1CU; ++i)
      options.frozen_indices.push_back(i);  // denoiser never applies W
    if (variant == Variant::baseline) {
      for (int i = circuit::kMcry; i < circuit::kCry; ++i) {
        theta0.v[static_cast<std::size_t>(i)] = kPi;  // all-pass diagonal
        options.frozen_indices.push_back(i);
      }
    }
    options.metric = [&](const std::vector<double>& theta, int) {
      auto rho = circuit::denoiser_forward(circuit::ParamVector(theta), current,
                                           true, 0, nullptr);
      return qcore::uhlmann_fidelity(rho, target);
    };

    train::CostBuilder builder = [&](int, std::int64_t shots) -> train::Cost {
      return [&, shots](const std::vector<double>& theta,
                        qcore::Rng& rng) -> double {
        auto rho = circuit::denoiser_forward(circuit::ParamVector(theta), current,
                                             cfg.exact, shots, cfg.exact ? nullptr : &rng);
        return 1.0 - qcore::uhlmann_fidelity(rho, step_target);
      };
    };

    train::ShotSchedule schedule;
    schedule.s0 = cfg.shots;
    schedule.doublings = 0;
    schedule.total_iters = cfg.iters_per_step;
    std::uint64_t step_seed = seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t));
    auto record = train::train_loop(builder, theta0.v, cfg.opt, cfg.spsa,
                                    schedule, cfg.iters_per_step, step_seed, options);

    circuit::ParamVector trained(record.theta_final);
    qcore::DensityMatrix output = [&] {
      if (cfg.exact) return circuit::denoiser_forward(trained, current, true, 0, nullptr);
      auto rng = qcore::Rng::derive(seed, static_cast<std::uint32_t>(t), 0xFEED);
      return circuit::denoiser_forward(trained, current, false, cfg.shots, &rng);
    }();

    QgdmStepResult step;
    step.t = t;
    step.theta = record.theta_final;
    step.step_fidelity = qcore::uhlmann_fidelity(output, step_target);
    step.achieved_fidelity = qcore::uhlmann_fidelity(output, target);
    step.record = std::move(record);
    out.steps.push_back(std::move(step));
    current = std::move(output);
  }
  out.reconstructed = current;
  out.final_fidelity = qcore::uhlmann_fidelity(out.reconstructed, target);
  return out;
}

}  // namespace adeqnn::tasks
