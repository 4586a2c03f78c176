#include "adeqnn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace adeqnn::tasks {

namespace {

constexpr double kSlope = 0.2;

double lrelu(double z) { return z >= 0.0 ? z : kSlope * z; }
double lrelu_grad(double z) { return z >= 0.0 ? 1.0 : kSlope; }

}  // namespace

MlpDiscriminator make_discriminator(qcore::Rng& rng) {
  MlpDiscriminator d;
  auto fill = [&](std::vector<double>& w, int rows, int cols) {
    w.resize(static_cast<std::size_t>(rows) * cols);
    double scale = std::sqrt(2.0 / cols);
    for (auto& x : w) x = scale * rng.normal();
  };
  fill(d.w1, MlpDiscriminator::kH1, MlpDiscriminator::kIn);
  fill(d.w2, MlpDiscriminator::kH2, MlpDiscriminator::kH1);
  fill(d.w3, 1, MlpDiscriminator::kH2);
  d.b1.assign(MlpDiscriminator::kH1, 0.0);
  d.b2.assign(MlpDiscriminator::kH2, 0.0);
  d.b3 = 0.0;
  return d;
}

double mlp_forward(const MlpDiscriminator& d, const double* image,
                   MlpCache* cache) {
  constexpr int in = MlpDiscriminator::kIn;
  constexpr int h1 = MlpDiscriminator::kH1;
  constexpr int h2 = MlpDiscriminator::kH2;
  std::vector<double> z1(h1), a1(h1), z2(h2), a2(h2);
  for (int i = 0; i < h1; ++i) {
    double acc = d.b1[static_cast<std::size_t>(i)];
    const double* row = &d.w1[static_cast<std::size_t>(i) * in];
    for (int j = 0; j < in; ++j) acc += row[j] * image[j];
    z1[static_cast<std::size_t>(i)] = acc;
    a1[static_cast<std::size_t>(i)] = lrelu(acc);
  }
  for (int i = 0; i < h2; ++i) {
    double acc = d.b2[static_cast<std::size_t>(i)];
    const double* row = &d.w2[static_cast<std::size_t>(i) * h1];
    for (int j = 0; j < h1; ++j) acc += row[j] * a1[static_cast<std::size_t>(j)];
    z2[static_cast<std::size_t>(i)] = acc;
    a2[static_cast<std::size_t>(i)] = lrelu(acc);
  }
  double score = d.b3;
  for (int i = 0; i < h2; ++i) score += d.w3[static_cast<std::size_t>(i)] * a2[static_cast<std::size_t>(i)];
  if (cache) {
    for (int j = 0; j < in; ++j) cache->x[static_cast<std::size_t>(j)] = image[j];
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
    cache->z2 = std::move(z2);
    cache->a2 = std::move(a2);
  }
  return score;
}

MlpGrads zero_grads() {
  MlpGrads g;
  g.w1.assign(static_cast<std::size_t>(MlpDiscriminator::kH1) * MlpDiscriminator::kIn, 0.0);
  g.b1.assign(MlpDiscriminator::kH1, 0.0);
  g.w2.assign(static_cast<std::size_t>(MlpDiscriminator::kH2) * MlpDiscriminator::kH1, 0.0);
  g.b2.assign(MlpDiscriminator::kH2, 0.0);
  g.w3.assign(MlpDiscriminator::kH2, 0.0);
  g.b3 = 0.0;
  g.input.fill(0.0);
  return g;
}

MlpGrads mlp_backward(const MlpDiscriminator& d, const MlpCache& cache,
                      double upstream) {
  constexpr int in = MlpDiscriminator::kIn;
  constexpr int h1 = MlpDiscriminator::kH1;
  constexpr int h2 = MlpDiscriminator::kH2;
  if (cache.z1.size() != h1 || cache.z2.size() != h2)
    throw std::invalid_argument("mlp_backward: cache does not match network");
  MlpGrads g = zero_grads();
  g.b3 = upstream;
  std::vector<double> dz2(h2);
  for (int i = 0; i < h2; ++i) {
    g.w3[static_cast<std::size_t>(i)] = upstream * cache.a2[static_cast<std::size_t>(i)];
    dz2[static_cast<std::size_t>(i)] =
        upstream * d.w3[static_cast<std::size_t>(i)] * lrelu_grad(cache.z2[static_cast<std::size_t>(i)]);
  }
  std::vector<double> da1(h1, 0.0);
  for (int i = 0; i < h2; ++i) {
    const double* row = &d.w2[static_cast<std::size_t>(i) * h1];
    double* grow = &g.w2[static_cast<std::size_t>(i) * h1];
    g.b2[static_cast<std::size_t>(i)] = dz2[static_cast<std::size_t>(i)];
    for (int j = 0; j < h1; ++j) {
      grow[j] = dz2[static_cast<std::size_t>(i)] * cache.a1[static_cast<std::size_t>(j)];
      da1[static_cast<std::size_t>(j)] += row[j] * dz2[static_cast<std::size_t>(i)];
    }
  }
  std::vector<double> dz1(h1);
  for (int j = 0; j < h1; ++j)
    dz1[static_cast<std::size_t>(j)] = da1[static_cast<std::size_t>(j)] * lrelu_grad(cache.z1[static_cast<std::size_t>(j)]);
  for (int i = 0; i < h1; ++i) {
    const double* row = &d.w1[static_cast<std::size_t>(i) * in];
    double* grow = &g.w1[static_cast<std::size_t>(i) * in];
    g.b1[static_cast<std::size_t>(i)] = dz1[static_cast<std::size_t>(i)];
    for (int j = 0; j < in; ++j) {
      grow[j] = dz1[static_cast<std::size_t>(i)] * cache.x[static_cast<std::size_t>(j)];
      g.input[static_cast<std::size_t>(j)] += row[j] * dz1[static_cast<std::size_t>(i)];
    }
  }
  return g;
}

double gradient_penalty(const MlpDiscriminator& d, const double* real_img,
                        const double* fake_img, qcore::Rng& rng,
                        MlpGrads& grads_out) {
  constexpr int in = MlpDiscriminator::kIn;
  constexpr int h1 = MlpDiscriminator::kH1;
  constexpr int h2 = MlpDiscriminator::kH2;
  double u = rng.uniform();
  std::array<double, 64> xhat{};
  for (int j = 0; j < in; ++j)
    xhat[static_cast<std::size_t>(j)] = u * real_img[j] + (1.0 - u) * fake_img[j];

  MlpCache cache;
  mlp_forward(d, xhat.data(), &cache);

  // input gradient g = W1^T (m1 . (W2^T (m2 . w3))) with the activation
  // masks m frozen (leaky rectifier, piecewise linear)
  std::vector<double> r2(h2), r1(h1, 0.0), grad_x(in, 0.0);
  for (int i = 0; i < h2; ++i)
    r2[static_cast<std::size_t>(i)] = d.w3[static_cast<std::size_t>(i)] * lrelu_grad(cache.z2[static_cast<std::size_t>(i)]);
  for (int i = 0; i < h2; ++i) {
    const double* row = &d.w2[static_cast<std::size_t>(i) * h1];
    for (int j = 0; j < h1; ++j) r1[static_cast<std::size_t>(j)] += row[j] * r2[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < h1; ++j) r1[static_cast<std::size_t>(j)] *= lrelu_grad(cache.z1[static_cast<std::size_t>(j)]);
  for (int i = 0; i < h1; ++i) {
    const double* row = &d.w1[static_cast<std::size_t>(i) * in];
    for (int j = 0; j < in; ++j) grad_x[static_cast<std::size_t>(j)] += row[j] * r1[static_cast<std::size_t>(i)];
  }

  double norm2 = 0.0;
  for (double v : grad_x) norm2 += v * v;
  double norm = std::sqrt(std::max(norm2, 1e-24));
  double penalty = (norm - 1.0) * (norm - 1.0);

  // v = dP/d(grad_x); masks still frozen, biases drop out entirely
  std::vector<double> v(in);
  double scale = 2.0 * (norm - 1.0) / norm;
  for (int j = 0; j < in; ++j) v[static_cast<std::size_t>(j)] = scale * grad_x[static_cast<std::size_t>(j)];

  grads_out = zero_grads();
  // dP/dW1[i][j] = r1[i] * v[j]
  for (int i = 0; i < h1; ++i) {
    double* grow = &grads_out.w1[static_cast<std::size_t>(i) * in];
    for (int j = 0; j < in; ++j) grow[j] = r1[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  }
  // q = W1 v; dP/dW2[k][j] = r2[k] * (m1 . q)[j]
  std::vector<double> q(h1, 0.0);
  for (int i = 0; i < h1; ++i) {
    const double* row = &d.w1[static_cast<std::size_t>(i) * in];
    double acc = 0.0;
    for (int j = 0; j < in; ++j) acc += row[j] * v[static_cast<std::size_t>(j)];
    q[static_cast<std::size_t>(i)] = acc * lrelu_grad(cache.z1[static_cast<std::size_t>(i)]);
  }
  for (int k = 0; k < h2; ++k) {
    double* grow = &grads_out.w2[static_cast<std::size_t>(k) * h1];
    for (int j = 0; j < h1; ++j) grow[j] = r2[static_cast<std::size_t>(k)] * q[static_cast<std::size_t>(j)];
  }
  // dP/dw3 = m2 . (W2 (m1 . q))
  for (int k = 0; k < h2; ++k) {
    const double* row = &d.w2[static_cast<std::size_t>(k) * h1];
    double acc = 0.0;
    for (int j = 0; j < h1; ++j) acc += row[j] * q[static_cast<std::size_t>(j)];
    grads_out.w3[static_cast<std::size_t>(k)] = acc * lrelu_grad(cache.z2[static_cast<std::size_t>(k)]);
  }
  return penalty;
}

std::vector<double> flatten(const MlpDiscriminator& d) {
  std::vector<double> f;
  f.reserve(d.w1.size() + d.b1.size() + d.w2.size() + d.b2.size() + d.w3.size() + 1);
  f.insert(f.end(), d.w1.begin(), d.w1.end());
  f.insert(f.end(), d.b1.begin(), d.b1.end());
  f.insert(f.end(), d.w2.begin(), d.w2.end());
  f.insert(f.end(), d.b2.begin(), d.b2.end());
  f.insert(f.end(), d.w3.begin(), d.w3.end());
  f.push_back(d.b3);
  return f;
}

void unflatten(const std::vector<double>& flat, MlpDiscriminator& d) {
  std::size_t off = 0;
  auto take = [&](std::vector<double>& dst) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + dst.size()), dst.begin());
    off += dst.size();
  };
  take(d.w1);
  take(d.b1);
  take(d.w2);
  take(d.b2);
  take(d.w3);
  d.b3 = flat[off++];
  if (off != flat.size())
    throw std::invalid_argument("unflatten: size mismatch");
}

std::vector<double> flatten(const MlpGrads& g) {
  std::vector<double> f;
  f.reserve(g.w1.size() + g.b1.size() + g.w2.size() + g.b2.size() + g.w3.size() + 1);
  f.insert(f.end(), g.w1.begin(), g.w1.end());
  f.insert(f.end(), g.b1.begin(), g.b1.end());
  f.insert(f.end(), g.w2.begin(), g.w2.end());
  f.insert(f.end(), g.b2.begin(), g.b2.end());
  f.insert(f.end(), g.w3.begin(), g.w3.end());
  f.push_back(g.b3);
  return f;
}

void accumulate(MlpGrads& acc, const MlpGrads& inc, double scale) {
  for (std::size_t i = 0; i < acc.w1.size(); ++i) acc.w1[i] += scale * inc.w1[i];
  for (std::size_t i = 0; i < acc.b1.size(); ++i) acc.b1[i] += scale * inc.b1[i];
  for (std::size_t i = 0; i < acc.w2.size(); ++i) acc.w2[i] += scale * inc.w2[i];
  for (std::size_t i = 0; i < acc.b2.size(); ++i) acc.b2[i] += scale * inc.b2[i];
  for (std::size_t i = 0; i < acc.w3.size(); ++i) acc.w3[i] += scale * inc.w3[i];
  acc.b3 += scale * inc.b3;
  for (std::size_t i = 0; i < acc.input.size(); ++i) acc.input[i] += scale * inc.input[i];
}

}  // namespace adeqnn::tasks
