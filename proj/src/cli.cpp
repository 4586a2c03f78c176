#include "adeqnn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "adeqnn/tasks.hpp"

namespace adeqnn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------- run-directory writers ----------------

void write_text(const fs::path& path, const std::string& text) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string format_history(const train::RunRecord& rec, int step = -1) {
  std::string out;
  char buf[128];
  for (const auto& row : rec.history) {
    if (step >= 0) {
      std::snprintf(buf, sizeof buf, "%d,", step);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%d,%.17g,%lld,%.17g\n", row.iter, row.cost,
                  static_cast<long long>(row.shots), row.metric);
    out += buf;
  }
  return out;
}

void write_history_csv(const fs::path& path, const train::RunRecord& rec) {
  write_text(path, "iter,cost,shots,metric\n" + format_history(rec));
}

void write_pgm(const fs::path& path, const std::array<double, 64>& img) {
  std::string data = "P5\n8 8\n255\n";
  for (double v : img) {
    int g = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    data.push_back(static_cast<char>(g));
  }
  write_text(path, data);
}

void write_image_csv(const fs::path& path, const std::array<double, 64>& img) {
  std::string out;
  char buf[64];
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      std::snprintf(buf, sizeof buf, "%.9g%c", img[static_cast<std::size_t>(r * 8 + c)],
                    c == 7 ? '\n' : ',');
      out += buf;
    }
  }
  write_text(path, out);
}

void write_density_csv(const fs::path& path, const qcore::DensityMatrix& rho) {
  std::string out;
  char buf[96];
  for (int r = 0; r < rho.dim; ++r) {
    for (int c = 0; c < rho.dim; ++c) {
      auto v = rho.at(r, c);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g%c", v.real(), v.imag(),
                    c == rho.dim - 1 ? '\n' : ',');
      out += buf;
    }
  }
  write_text(path, out);
}

json params_json(const std::vector<double>& values) {
  return json{{"param_layout_version", circuit::kParamLayoutVersion},
              {"values", values}};
}

fs::path prepare_run_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir / "exports");
  return dir;
}

// ---------------- subcommand payloads ----------------

struct ClassifyOpts {
  std::string dataset = "circle";
  std::string variant = "ade";
  std::string mode = "exact";
  std::uint64_t seed = 0;
  int epochs = -1;  // -1: task default
  std::string out = "runs/classify";
  std::int64_t shots_s0 = 256;
  int shots_doublings = 5;
  std::string glass_file = "data/glass_synthetic.data";
  // task defaults unless overridden (calibration escape hatches)
  double spsa_c0 = -1.0;
  double spsa_gamma = -1.0;
  int spsa_avg = -1;
  double lr = -1.0;
  int batch = -1;
  std::int64_t data_seed = -1;
};

int do_classify(const ClassifyOpts& o) {
  tasks::ClassifyTask task = o.dataset == "circle"   ? tasks::ClassifyTask::circle
                             : o.dataset == "spiral" ? tasks::ClassifyTask::spiral
                                                     : tasks::ClassifyTask::glass;
  tasks::Variant variant =
      o.variant == "ade" ? tasks::Variant::ade : tasks::Variant::baseline;
  auto mode = o.mode == "exact" ? circuit::ShotsMode::exact
                                : circuit::ShotsMode::sampled;
  if (task == tasks::ClassifyTask::glass && !fs::exists(o.glass_file)) {
    std::fprintf(stderr, "glass data file not found: %s\n", o.glass_file.c_str());
    return 2;
  }
  auto config = tasks::classify_config(task, variant, mode);
  auto hyper = tasks::default_hyper(task);
  if (o.epochs >= 0) hyper.epochs = o.epochs;
  hyper.shots.s0 = o.shots_s0;
  hyper.shots.doublings = o.shots_doublings;
  if (o.spsa_c0 > 0) hyper.spsa.c0 = o.spsa_c0;
  if (o.spsa_gamma >= 0) hyper.spsa.gamma = o.spsa_gamma;
  if (o.spsa_avg > 0) hyper.spsa.avg_draws = o.spsa_avg;
  if (o.lr > 0) hyper.opt.lr = o.lr;
  if (o.batch > 0) hyper.batch = o.batch;
  if (o.data_seed >= 0) hyper.data_seed = static_cast<std::uint64_t>(o.data_seed);

  auto result = tasks::run_classification(task, config, hyper, o.seed, o.glass_file);

  auto dir = prepare_run_dir(o.out);
  json cfg{{"command", "classify"},
           {"dataset", o.dataset},
           {"variant", o.variant},
           {"mode", o.mode},
           {"seed", o.seed},
           {"epochs", hyper.epochs},
           {"batch", hyper.batch},
           {"data_seed", hyper.data_seed},
           {"spsa", {{"c0", hyper.spsa.c0}, {"gamma", hyper.spsa.gamma}, {"avg_draws", hyper.spsa.avg_draws}}},
           {"optimizer", {{"kind", "amsgrad"}, {"lr", hyper.opt.lr}, {"beta1", hyper.opt.beta1}, {"beta2", hyper.opt.beta2}}},
           {"shots", {{"s0", hyper.shots.s0}, {"doublings", hyper.shots.doublings}}},
           {"glass_file", o.glass_file}};
  if (task == tasks::ClassifyTask::spiral)
    cfg["spiral_shape"] = {{"turns", hyper.spiral.turns},
                           {"r0", hyper.spiral.r0},
                           {"sigma", hyper.spiral.sigma}};
  write_json(dir / "config.json", cfg);
  write_json(dir / "params.json", params_json(result.record.theta_final));
  write_history_csv(dir / "history.csv", result.record);

  json m{{"train_accuracy", result.train_accuracy},
         {"test_accuracy", result.test_accuracy},
         {"confusion", result.confusion.counts},
         {"final_cost", result.record.history.empty()
                            ? 0.0
                            : result.record.history.back().cost}};
  write_json(dir / "metrics.json", m);

  datasets::export_points_csv((dir / "exports" / "train.csv").string(),
                              result.data.first);
  datasets::export_points_csv((dir / "exports" / "test.csv").string(),
                              result.data.second);
  if (!result.boundary.empty()) {
    std::string grid = "x,y,score0,score1,pred\n";
    char buf[160];
    for (const auto& row : result.boundary) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%d\n", row.x, row.y,
                    row.scores[0], row.scores[1], row.pred);
      grid += buf;
    }
    write_text(dir / "exports" / "boundary.csv", grid);
  }
  std::printf("test_accuracy %.6f\n", result.test_accuracy);
  return 0;
}

struct QganOpts {
  int digit = 0;
  int iters = 300;
  int batch = 4;
  std::string mode = "exact";
  std::uint64_t seed = 0;
  std::string out = "runs/qgan";
  std::string digits_file = "data/digits.csv";
  // calibration overrides, active when >= 0
  int n_critic = -1;
  double lr_gen = -1.0;
  double lr_critic = -1.0;
  double spsa_c0 = -1.0;
  int spsa_avg = -1;
};

int do_qgan(const QganOpts& o) {
  if (!fs::exists(o.digits_file)) {
    std::fprintf(stderr, "digits data file not found: %s\n", o.digits_file.c_str());
    return 2;
  }
  auto images = datasets::load_digits(o.digits_file, {o.digit});
  tasks::GanConfig cfg;
  cfg.iters = o.iters;
  cfg.batch = o.batch;
  cfg.exact = o.mode == "exact";
  if (o.n_critic > 0) cfg.n_critic = o.n_critic;
  if (o.lr_gen > 0) cfg.lr_generator = o.lr_gen;
  if (o.lr_critic > 0) cfg.lr_critic = o.lr_critic;
  if (o.spsa_c0 > 0) cfg.spsa.c0 = o.spsa_c0;
  if (o.spsa_avg > 0) cfg.spsa.avg_draws = o.spsa_avg;
  auto result = tasks::train_qgan(images, cfg, o.seed);

  auto dir = prepare_run_dir(o.out);
  json c{{"command", "qgan"},    {"digit", o.digit},
         {"iters", o.iters},     {"batch", o.batch},
         {"mode", o.mode},       {"seed", o.seed},
         {"n_critic", cfg.n_critic}, {"lr_generator", cfg.lr_generator},
         {"lr_critic", cfg.lr_critic}, {"digits_file", o.digits_file}};
  write_json(dir / "config.json", c);
  json pj{{"param_layout_version", circuit::kParamLayoutVersion}};
  for (int p = 0; p < 4; ++p)
    pj["patches"].push_back(result.generator_params[static_cast<std::size_t>(p)]);
  write_json(dir / "params.json", pj);
  write_history_csv(dir / "history.csv", result.record);

  json m{{"ssim_vs_prototype", result.ssim_vs_prototype},
         {"ssim_vs_nearest", result.ssim_vs_nearest},
         {"n_training_images", images.size()}};
  if (!result.record.history.empty()) {
    m["wasserstein_first"] = result.record.history.front().metric;
    m["wasserstein_final"] = result.record.history.back().metric;
  }
  write_json(dir / "metrics.json", m);

  write_pgm(dir / "exports" / "prototype.pgm", result.prototype);
  write_image_csv(dir / "exports" / "prototype.csv", result.prototype);
  for (const auto& [it, img] : result.checkpoints) {
    char name[64];
    std::snprintf(name, sizeof name, "sample_iter%04d", it);
    write_pgm(dir / "exports" / (std::string(name) + ".pgm"), img);
    write_image_csv(dir / "exports" / (std::string(name) + ".csv"), img);
  }
  for (std::size_t k = 0; k < result.final_images.size() && k < 8; ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "final_%02zu", k);
    write_pgm(dir / "exports" / (std::string(name) + ".pgm"), result.final_images[k]);
    write_image_csv(dir / "exports" / (std::string(name) + ".csv"),
                    result.final_images[k]);
  }
  std::printf("ssim_vs_prototype %.6f\n", result.ssim_vs_prototype);
  return 0;
}

struct QgdmOpts {
  std::string variant = "ade";
  int steps = 1;
  double beta = 1.0;
  std::string hamiltonian_file;
  std::string mode = "exact";
  std::uint64_t seed = 0;
  std::string out = "runs/qgdm";
  int iters_per_step = 400;
};

std::vector<qcore::cxd> load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<qcore::cxd> h;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ss, cell, ',')) nums.push_back(std::stod(cell));
    if (nums.size() != 8)
      throw std::runtime_error("hamiltonian rows need 8 numbers (re,im x4)");
    for (int c = 0; c < 4; ++c)
      h.emplace_back(nums[static_cast<std::size_t>(2 * c)],
                     nums[static_cast<std::size_t>(2 * c + 1)]);
  }
  if (h.size() != 16) throw std::runtime_error("hamiltonian must be 4x4");
  return h;
}

int do_qgdm(const QgdmOpts& o) {
  std::vector<qcore::cxd> h;
  if (o.hamiltonian_file.empty()) {
    h = datasets::default_hamiltonian();
  } else {
    if (!fs::exists(o.hamiltonian_file)) {
      std::fprintf(stderr, "hamiltonian file not found: %s\n",
                   o.hamiltonian_file.c_str());
      return 2;
    }
    h = load_hamiltonian(o.hamiltonian_file);
  }
  qcore::DensityMatrix target = [&] {
    try {
      return datasets::gibbs_state(h, o.beta);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("bad hamiltonian: ") + e.what());
    }
  }();

  tasks::QgdmConfig cfg;
  cfg.exact = o.mode == "exact";
  cfg.iters_per_step = o.iters_per_step;
  auto variant =
      o.variant == "ade" ? tasks::Variant::ade : tasks::Variant::baseline;
  auto result = tasks::train_qgdm(target, o.steps, variant, o.seed, cfg);

  auto dir = prepare_run_dir(o.out);
  json c{{"command", "qgdm"},   {"variant", o.variant},
         {"steps", o.steps},    {"beta", o.beta},
         {"mode", o.mode},      {"seed", o.seed},
         {"iters_per_step", o.iters_per_step},
         {"hamiltonian_file", o.hamiltonian_file}};
  write_json(dir / "config.json", c);

  json pj{{"param_layout_version", circuit::kParamLayoutVersion}};
  std::string history = "step,iter,cost,shots,metric\n";
  json per_step = json::array();
  for (const auto& step : result.steps) {
    pj["steps"].push_back(json{{"t", step.t}, {"values", step.theta}});
    history += format_history(step.record, step.t);
    per_step.push_back(json{{"t", step.t},
                            {"step_fidelity", step.step_fidelity},
                            {"achieved_fidelity", step.achieved_fidelity}});
  }
  write_json(dir / "params.json", pj);
  write_text(dir / "history.csv", history);
  write_json(dir / "metrics.json",
             json{{"final_fidelity", result.final_fidelity},
                  {"steps", per_step}});

  write_density_csv(dir / "exports" / "target.csv", target);
  for (std::size_t t = 0; t < result.forward_trajectory.size(); ++t) {
    char name[64];
    std::snprintf(name, sizeof name, "rho_forward_%02zu.csv", t + 1);
    write_density_csv(dir / "exports" / name, result.forward_trajectory[t]);
  }
  write_density_csv(dir / "exports" / "reconstructed.csv", result.reconstructed);
  std::printf("final_fidelity %.6f\n", result.final_fidelity);
  return 0;
}

int do_gate_check(const std::string& out) {
  auto table = circuit::cccx_truth_table();
  auto ideal = circuit::cccx_ideal_table();
  double fid = 0.0;
  for (int i = 0; i < 16; ++i) {
    std::vector<double> p(table[static_cast<std::size_t>(i)].begin(),
                          table[static_cast<std::size_t>(i)].end());
    std::vector<double> q(ideal[static_cast<std::size_t>(i)].begin(),
                          ideal[static_cast<std::size_t>(i)].end());
    fid += metrics::statistical_fidelity(p, q);
  }
  fid /= 16.0;

  // success probability of the CCCZ configuration on a random normalized input
  const double cccz = 2.0 * std::asin(1.0 / std::sqrt(3.0));
  double angles[7];
  for (auto& a : angles) a = cccz;
  qcore::Rng rng(7);
  std::vector<qcore::cxd> amps(16);
  double norm = 0.0;
  for (auto& a : amps) {
    a = qcore::cxd(rng.normal(), rng.normal());
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  auto [state, success] = circuit::apply_mcry(qcore::make_state(4, amps), angles);

  auto dir = prepare_run_dir(out);
  std::string csv = "input";
  for (int j = 0; j < 16; ++j) csv += ",p" + std::to_string(j);
  csv += "\n";
  char buf[32];
  for (int i = 0; i < 16; ++i) {
    csv += std::to_string(i);
    for (int j = 0; j < 16; ++j) {
      std::snprintf(buf, sizeof buf, ",%.9g", table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      csv += buf;
    }
    csv += "\n";
  }
  write_text(dir / "exports" / "cccx_truth_table.csv", csv);
  write_json(dir / "metrics.json",
             json{{"cccx_fidelity", fid}, {"cccz_success", success}});
  std::printf("%.6f\n%.6f\n", fid, success);
  return std::abs(fid - 1.0) < 1e-9 ? 0 : 1;
}

// fast invariant suite; prints one line per property
int do_verify() {
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  };

  // MCRY contraction vs explicit virtual-qubit evolution
  {
    bool ok = true;
    qcore::Rng rng(11);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
      std::vector<qcore::cxd> amps(16);
      double norm = 0.0;
      for (auto& a : amps) {
        a = qcore::cxd(rng.normal(), rng.normal());
        norm += std::norm(a);
      }
      for (auto& a : amps) a /= std::sqrt(norm);
      double angles[7];
      for (auto& a : angles) a = rng.uniform(0.15, 2.0 * std::numbers::pi);
      auto s = qcore::make_state(4, amps);
      try {
        auto [fast, p_fast] = circuit::apply_mcry(s, angles);
        auto [oracle, p_oracle] = circuit::mcry_expanded_oracle(s, angles);
        if (std::abs(p_fast - p_oracle) > 1e-12) ok = false;
        for (int b = 0; b < 16 && ok; ++b)
          if (std::abs(fast.amps[static_cast<std::size_t>(b)] -
                       oracle.amps[static_cast<std::size_t>(b)]) > 1e-12)
            ok = false;
      } catch (const qcore::NullPostSelection&) {
        continue;
      }
    }
    report("mcry_oracle_equivalence", ok);
  }

  // mesh unitarity
  {
    bool ok = true;
    qcore::Rng rng(12);
    for (int trial = 0; trial < 100 && ok; ++trial) {
      double angles[16];
      for (auto& a : angles) a = rng.uniform(-std::numbers::pi, std::numbers::pi);
      try {
        circuit::clements_u4(angles);  // ctor checks U U^dag = I
      } catch (const std::exception&) {
        ok = false;
      }
    }
    report("mesh_unitarity", ok);
  }

  // forward distribution normalization
  {
    bool ok = true;
    qcore::Rng rng(13);
    circuit::CircuitConfig cfg;
    for (int trial = 0; trial < 500 && ok; ++trial) {
      auto params = circuit::initial_params(rng);
      std::array<double, 4> ang{};
      for (auto& a : ang) a = rng.uniform(-std::numbers::pi, std::numbers::pi);
      try {
        auto dist = circuit::forward(cfg, params, ang);
        double sum = 0.0;
        for (double p : dist.p) sum += p;
        if (std::abs(sum - 1.0) > 1e-10) ok = false;
      } catch (const qcore::NullPostSelection&) {
        continue;
      }
    }
    report("forward_normalization", ok);
  }

  // CCCZ success probability
  {
    bool ok = true;
    const double cccz = 2.0 * std::asin(1.0 / std::sqrt(3.0));
    double angles[7];
    for (auto& a : angles) a = cccz;
    qcore::Rng rng(14);
    for (int trial = 0; trial < 50 && ok; ++trial) {
      std::vector<qcore::cxd> amps(16);
      double norm = 0.0;
      for (auto& a : amps) {
        a = qcore::cxd(rng.normal(), rng.normal());
        norm += std::norm(a);
      }
      for (auto& a : amps) a /= std::sqrt(norm);
      auto [state, success] = circuit::apply_mcry(qcore::make_state(4, amps), angles);
      if (std::abs(success - 1.0 / 9.0) > 1e-12) ok = false;
    }
    report("cccz_success_probability", ok);
  }

  // SPSA on a quadratic is exact
  {
    train::SpsaConfig sc;
    sc.c0 = 0.1;
    sc.gamma = 0.0;
    sc.avg_draws = 1;
    qcore::Rng rng(15);
    auto g = train::spsa_gradient(
        [](const std::vector<double>& t) { return t[0] * t[0]; }, {1.0}, 0, sc, rng);
    report("spsa_quadratic_exact", std::abs(g[0] - 2.0) < 1e-12);
  }

  // critic backprop vs finite differences
  {
    qcore::Rng rng(16);
    auto d = tasks::make_discriminator(rng);
    std::array<double, 64> x{};
    for (auto& v : x) v = rng.uniform();
    tasks::MlpCache cache;
    tasks::mlp_forward(d, x.data(), &cache);
    auto grads = tasks::mlp_backward(d, cache, 1.0);
    bool ok = true;
    const double h = 1e-6;
    for (int probe = 0; probe < 20 && ok; ++probe) {
      std::size_t i = rng.below(d.w1.size());
      double keep = d.w1[i];
      d.w1[i] = keep + h;
      double up = tasks::mlp_forward(d, x.data());
      d.w1[i] = keep - h;
      double dn = tasks::mlp_forward(d, x.data());
      d.w1[i] = keep;
      double fd = (up - dn) / (2.0 * h);
      if (std::abs(fd - grads.w1[i]) > 1e-5 * std::max(1.0, std::abs(fd))) ok = false;
    }
    report("critic_backprop_fd", ok);
  }

  // purification round trip
  {
    bool ok = true;
    qcore::Rng rng(17);
    for (int trial = 0; trial < 50 && ok; ++trial) {
      std::vector<qcore::cxd> m(16);
      for (auto& v : m) v = qcore::cxd(rng.normal(), rng.normal());
      std::vector<qcore::cxd> rho(16, qcore::cxd(0, 0));
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          qcore::cxd acc(0, 0);
          for (int k = 0; k < 4; ++k)
            acc += m[static_cast<std::size_t>(r * 4 + k)] *
                   std::conj(m[static_cast<std::size_t>(c * 4 + k)]);
          rho[static_cast<std::size_t>(r * 4 + c)] = acc;
        }
      double tr = 0.0;
      for (int i = 0; i < 4; ++i) tr += rho[static_cast<std::size_t>(i * 4 + i)].real();
      for (auto& v : rho) v /= tr;
      auto dm = qcore::make_density(4, rho);
      auto pure = qcore::purify(dm);
      auto back = qcore::partial_trace(
          qcore::density_from_state(pure), {3, 1});
      for (int e = 0; e < 16 && ok; ++e)
        if (std::abs(back.m[static_cast<std::size_t>(e)] - dm.m[static_cast<std::size_t>(e)]) > 1e-9)
          ok = false;
    }
    report("purify_partial_trace_roundtrip", ok);
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"ancillary-dimension-expanded quantum network simulator"};
  app.require_subcommand(1);

  ClassifyOpts co;
  auto* classify = app.add_subcommand("classify", "train a classifier");
  classify->add_option("--dataset", co.dataset)
      ->check(CLI::IsMember({"circle", "spiral", "glass"}));
  classify->add_option("--variant", co.variant)
      ->check(CLI::IsMember({"ade", "baseline"}));
  classify->add_option("--mode", co.mode)->check(CLI::IsMember({"exact", "sampled"}));
  classify->add_option("--seed", co.seed);
  classify->add_option("--epochs", co.epochs);
  classify->add_option("--out", co.out);
  classify->add_option("--shots-s0", co.shots_s0);
  classify->add_option("--shots-doublings", co.shots_doublings);
  classify->add_option("--glass-file", co.glass_file);
  classify->add_option("--spsa-c0", co.spsa_c0);
  classify->add_option("--spsa-gamma", co.spsa_gamma);
  classify->add_option("--spsa-avg", co.spsa_avg);
  classify->add_option("--lr", co.lr);
  classify->add_option("--batch", co.batch);
  classify->add_option("--data-seed", co.data_seed);

  QganOpts go;
  auto* qgan = app.add_subcommand("qgan", "train the patched image generator");
  qgan->add_option("--digit", go.digit)->check(CLI::IsMember({0, 1}));
  qgan->add_option("--iters", go.iters);
  qgan->add_option("--batch", go.batch);
  qgan->add_option("--mode", go.mode)->check(CLI::IsMember({"exact", "sampled"}));
  qgan->add_option("--seed", go.seed);
  qgan->add_option("--out", go.out);
  qgan->add_option("--digits-file", go.digits_file);
  qgan->add_option("--n-critic", go.n_critic);
  qgan->add_option("--lr-gen", go.lr_gen);
  qgan->add_option("--lr-critic", go.lr_critic);
  qgan->add_option("--spsa-c0", go.spsa_c0);
  qgan->add_option("--spsa-avg", go.spsa_avg);

  QgdmOpts do_;
  auto* qgdm = app.add_subcommand("qgdm", "train the diffusion denoiser");
  qgdm->add_option("--variant", do_.variant)->check(CLI::IsMember({"ade", "baseline"}));
  qgdm->add_option("--steps", do_.steps)->check(CLI::PositiveNumber);
  qgdm->add_option("--beta", do_.beta);
  qgdm->add_option("--hamiltonian", do_.hamiltonian_file);
  qgdm->add_option("--mode", do_.mode)->check(CLI::IsMember({"exact", "sampled"}));
  qgdm->add_option("--seed", do_.seed);
  qgdm->add_option("--out", do_.out);
  qgdm->add_option("--iters-per-step", do_.iters_per_step);

  std::string gate_out = "runs/gate_check";
  auto* gate = app.add_subcommand("gate_check", "exact gate truth tables");
  gate->add_option("--out", gate_out);

  app.add_subcommand("verify", "fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify->parsed()) return do_classify(co);
    if (qgan->parsed()) return do_qgan(go);
    if (qgdm->parsed()) return do_qgdm(do_);
    if (gate->parsed()) return do_gate_check(gate_out);
    return do_verify();
  } catch (const qcore::NullPostSelection& e) {
    std::fprintf(stderr, "training failed: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace adeqnn::cli
