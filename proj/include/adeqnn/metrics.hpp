#pragma once

#include <array>
#include <vector>

#include "adeqnn/mlp.hpp"

namespace adeqnn::metrics {

// (sum sqrt(p_i q_i))^2 between classical distributions; symmetric, in [0,1].
double statistical_fidelity(const std::vector<double>& p,
                            const std::vector<double>& q);

// Single-window structural similarity on 8x8 images in [0,1]: dynamic range
// L=1, c1=(0.01)^2, c2=(0.03)^2, unbiased (n-1) variance denominators.
double ssim(const std::array<double, 64>& x, const std::array<double, 64>& y);

struct ConfusionMatrix {
  int k = 0;
  std::vector<std::vector<int>> counts;  // rows true, columns predicted
};

// preds holds per-sample class scores; argmax with ties toward the lower
// class index.
std::pair<double, ConfusionMatrix> accuracy_and_confusion(
    const std::vector<std::vector<double>>& preds,
    const std::vector<int>& truths, int k);

// Critic estimate mean D(real) - mean D(fake).
double wasserstein_estimate(const tasks::MlpDiscriminator& d,
                            const std::vector<std::array<double, 64>>& real_batch,
                            const std::vector<std::array<double, 64>>& fake_batch);

}  // namespace adeqnn::metrics
