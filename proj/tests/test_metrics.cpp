#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "adeqnn/metrics.hpp"
#include "adeqnn/mlp.hpp"
#include "adeqnn/qcore.hpp"

using namespace adeqnn;

namespace {

std::vector<double> random_dist(std::size_t n, qcore::Rng& rng) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& v : p) {
    v = rng.uniform();
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

// critic computing w . x[0..31] exactly: biases keep both hidden layers in
// the identity region of the leaky rectifier
tasks::MlpDiscriminator linear_critic(const std::vector<double>& w32, double gain = 1.0) {
  tasks::MlpDiscriminator d;
  d.w1.assign(64 * 64, 0.0);
  d.b1.assign(64, 10.0);
  for (int i = 0; i < 64; ++i) d.w1[std::size_t(i) * 64 + i] = 1.0;
  d.w2.assign(32 * 64, 0.0);
  d.b2.assign(32, 0.0);
  for (int j = 0; j < 32; ++j) d.w2[std::size_t(j) * 64 + j] = 1.0;
  d.w3.assign(32, 0.0);
  double bias_feed = 0.0;
  for (int j = 0; j < 32; ++j) {
    d.w3[std::size_t(j)] = gain * w32[std::size_t(j)];
    bias_feed += gain * w32[std::size_t(j)] * 10.0;
  }
  d.b3 = -bias_feed;
  return d;
}

}  // namespace

TEST_CASE("statistical_fidelity endpoints, symmetry and validation") {
  CHECK(metrics::statistical_fidelity({0.3, 0.7}, {0.3, 0.7}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metrics::statistical_fidelity({1.0, 0.0}, {0.0, 1.0}) == 0.0);
  CHECK(metrics::statistical_fidelity({1.0, 0.0}, {0.5, 0.5}) ==
        doctest::Approx(0.5).epsilon(1e-12));

  auto rng = qcore::Rng(2);
  for (int t = 0; t < 50; ++t) {
    auto p = random_dist(16, rng);
    auto q = random_dist(16, rng);
    double f = metrics::statistical_fidelity(p, q);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f == doctest::Approx(metrics::statistical_fidelity(q, p)).epsilon(1e-12));
  }

  CHECK_THROWS((void)metrics::statistical_fidelity({1.0}, {0.5, 0.5}));
  CHECK_THROWS((void)metrics::statistical_fidelity({}, {}));
  CHECK_THROWS((void)metrics::statistical_fidelity({0.5, 0.4}, {0.5, 0.5}));
  CHECK_THROWS((void)metrics::statistical_fidelity({1.5, -0.5}, {0.5, 0.5}));
}

TEST_CASE("ssim self-similarity, symmetry and contrast response") {
  auto rng = qcore::Rng(14);
  std::array<double, 64> x{};
  for (auto& v : x) v = rng.uniform();
  CHECK(metrics::ssim(x, x) == doctest::Approx(1.0).epsilon(1e-12));

  std::array<double, 64> y{};
  for (auto& v : y) v = rng.uniform();
  double xy = metrics::ssim(x, y);
  CHECK(xy == doctest::Approx(metrics::ssim(y, x)).epsilon(1e-14));
  CHECK(xy < 1.0);
  CHECK(xy > -1.0);

  // constant against shifted constant: structure term is neutral, the
  // luminance term penalizes the shift
  std::array<double, 64> a{}, b{};
  a.fill(0.5);
  b.fill(0.8);
  double ab = metrics::ssim(a, b);
  CHECK(ab > 0.0);
  CHECK(ab < 1.0);
  double want = (2.0 * 0.5 * 0.8 + 1e-4) / (0.25 + 0.64 + 1e-4);
  CHECK(ab == doctest::Approx(want).epsilon(1e-12));

  // global window with n-1 variance normalization, L = 1 constants
  std::array<double, 64> ramp{}, ramp2{};
  for (int i = 0; i < 64; ++i) {
    ramp[std::size_t(i)] = i / 63.0;
    ramp2[std::size_t(i)] = 0.25 + 0.5 * i / 63.0;
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < 64; ++i) {
    mx += ramp[std::size_t(i)];
    my += ramp2[std::size_t(i)];
  }
  mx /= 64.0;
  my /= 64.0;
  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (int i = 0; i < 64; ++i) {
    vx += (ramp[std::size_t(i)] - mx) * (ramp[std::size_t(i)] - mx);
    vy += (ramp2[std::size_t(i)] - my) * (ramp2[std::size_t(i)] - my);
    cov += (ramp[std::size_t(i)] - mx) * (ramp2[std::size_t(i)] - my);
  }
  vx /= 63.0;
  vy /= 63.0;
  cov /= 63.0;
  double manual = (2.0 * mx * my + 1e-4) * (2.0 * cov + 9e-4) /
                  ((mx * mx + my * my + 1e-4) * (vx + vy + 9e-4));
  CHECK(metrics::ssim(ramp, ramp2) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("accuracy_and_confusion counts argmax hits with low-index ties") {
  std::vector<std::vector<double>> preds{
      {0.9, 0.1},   // -> 0
      {0.2, 0.8},   // -> 1
      {0.5, 0.5},   // tie -> 0
      {0.4, 0.6},   // -> 1
  };
  std::vector<int> truths{0, 1, 0, 0};
  auto [acc, cm] = metrics::accuracy_and_confusion(preds, truths, 2);
  CHECK(acc == doctest::Approx(0.75));
  CHECK(cm.k == 2);
  CHECK(cm.counts[0][0] == 2);
  CHECK(cm.counts[0][1] == 1);
  CHECK(cm.counts[1][1] == 1);
  CHECK(cm.counts[1][0] == 0);
  // row sums recover the per-class sample counts
  CHECK(cm.counts[0][0] + cm.counts[0][1] == 3);
  CHECK(cm.counts[1][0] + cm.counts[1][1] == 1);

  std::vector<std::vector<double>> p3{{0.2, 0.2, 0.6}, {0.4, 0.4, 0.2}};
  auto [acc3, cm3] = metrics::accuracy_and_confusion(p3, {2, 1}, 3);
  CHECK(acc3 == doctest::Approx(0.5));
  CHECK(cm3.counts[2][2] == 1);
  CHECK(cm3.counts[1][0] == 1);  // tie between 0 and 1 goes to 0

  CHECK_THROWS((void)metrics::accuracy_and_confusion(preds, {0, 1}, 2));
  CHECK_THROWS((void)metrics::accuracy_and_confusion(preds, {0, 1, 2, 0}, 2));
}

TEST_CASE("wasserstein_estimate closed forms on engineered critics") {
  // constant critic scores every image identically
  auto rng = qcore::Rng(4);
  auto constant = linear_critic(std::vector<double>(32, 0.0));
  constant.b3 = 3.25;
  std::vector<std::array<double, 64>> real(3), fake(2);
  for (auto& img : real)
    for (auto& v : img) v = rng.uniform();
  for (auto& img : fake)
    for (auto& v : img) v = rng.uniform();
  CHECK(metrics::wasserstein_estimate(constant, real, fake) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // linear critic w . x gives w . (mean_real - mean_fake)
  std::vector<double> w(32);
  for (auto& v : w) v = rng.uniform(-1.0, 1.0);
  auto critic = linear_critic(w);
  double want = 0.0;
  for (int j = 0; j < 32; ++j) {
    double mr = 0.0, mf = 0.0;
    for (const auto& img : real) mr += img[std::size_t(j)];
    for (const auto& img : fake) mf += img[std::size_t(j)];
    want += w[std::size_t(j)] * (mr / 3.0 - mf / 2.0);
  }
  CHECK(metrics::wasserstein_estimate(critic, real, fake) ==
        doctest::Approx(want).epsilon(1e-10));

  CHECK_THROWS((void)metrics::wasserstein_estimate(critic, {}, fake));
  CHECK_THROWS((void)metrics::wasserstein_estimate(critic, real, {}));
}
