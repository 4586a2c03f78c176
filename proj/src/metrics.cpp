#include "adeqnn/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace adeqnn::metrics {

double statistical_fidelity(const std::vector<double>& p,
                            const std::vector<double>& q) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("statistical_fidelity: length mismatch");
  double sp = 0.0, sq = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0)
      throw std::invalid_argument("statistical_fidelity: negative entry");
    sp += p[i];
    sq += q[i];
    acc += std::sqrt(p[i] * q[i]);
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
    throw std::invalid_argument("statistical_fidelity: inputs must sum to 1");
  double f = acc * acc;
  return f > 1.0 ? 1.0 : f;
}

double ssim(const std::array<double, 64>& x, const std::array<double, 64>& y) {
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  constexpr int n = 64;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[static_cast<std::size_t>(i)];
    my += y[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (int i = 0; i < n; ++i) {
    double dx = x[static_cast<std::size_t>(i)] - mx;
    double dy = y[static_cast<std::size_t>(i)] - my;
    vx += dx * dx;
    vy += dy * dy;
    cov += dx * dy;
  }
  vx /= n - 1;
  vy /= n - 1;
  cov /= n - 1;
  return (2.0 * mx * my + c1) * (2.0 * cov + c2) /
         ((mx * mx + my * my + c1) * (vx + vy + c2));
}

std::pair<double, ConfusionMatrix> accuracy_and_confusion(
    const std::vector<std::vector<double>>& preds,
    const std::vector<int>& truths, int k) {
  if (preds.size() != truths.size())
    throw std::invalid_argument("accuracy_and_confusion: length mismatch");
  ConfusionMatrix cm;
  cm.k = k;
  cm.counts.assign(static_cast<std::size_t>(k),
                   std::vector<int>(static_cast<std::size_t>(k), 0));
  int hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    int truth = truths[i];
    if (truth < 0 || truth >= k)
      throw std::invalid_argument("accuracy_and_confusion: label out of range");
    const auto& s = preds[i];
    std::size_t best = 0;
    for (std::size_t c = 1; c < s.size(); ++c)
      if (s[c] > s[best]) best = c;  // strict >: ties go to the lower index
    if (static_cast<int>(best) >= k)
      throw std::invalid_argument("accuracy_and_confusion: prediction out of range");
    cm.counts[static_cast<std::size_t>(truth)][best] += 1;
    if (static_cast<int>(best) == truth) ++hits;
  }
  double acc = preds.empty() ? 0.0 : static_cast<double>(hits) / preds.size();
  return {acc, cm};
}

double wasserstein_estimate(const tasks::MlpDiscriminator& d,
                            const std::vector<std::array<double, 64>>& real_batch,
                            const std::vector<std::array<double, 64>>& fake_batch) {
  if (real_batch.empty() || fake_batch.empty())
    throw std::invalid_argument("wasserstein_estimate: empty batch");
  double sr = 0.0, sf = 0.0;
  for (const auto& img : real_batch) sr += tasks::mlp_forward(d, img.data());
  for (const auto& img : fake_batch) sf += tasks::mlp_forward(d, img.data());
  return sr / static_cast<double>(real_batch.size()) -
         sf / static_cast<double>(fake_batch.size());
}

}  // namespace adeqnn::metrics
