#pragma once

#include <array>
#include <vector>

#include "adeqnn/qcore.hpp"

namespace adeqnn::tasks {

// Wasserstein critic: 64 -> 64 -> 32 -> 1, leaky rectifier slope 0.2 on the
// two hidden layers, linear scalar output.
struct MlpDiscriminator {
  static constexpr int kIn = 64, kH1 = 64, kH2 = 32;
  std::vector<double> w1;  // kH1 x kIn, row-major
  std::vector<double> b1;  // kH1
  std::vector<double> w2;  // kH2 x kH1
  std::vector<double> b2;  // kH2
  std::vector<double> w3;  // kH2
  double b3 = 0.0;
};

MlpDiscriminator make_discriminator(qcore::Rng& rng);

struct MlpCache {
  std::array<double, 64> x{};
  std::vector<double> z1, a1, z2, a2;
};

// score plus (optionally) the pre-activations needed for backprop
double mlp_forward(const MlpDiscriminator& d, const double* image,
                   MlpCache* cache = nullptr);

struct MlpGrads {
  std::vector<double> w1, b1, w2, b2, w3;
  double b3 = 0.0;
  std::array<double, 64> input{};
};

MlpGrads zero_grads();

// Exact reverse-mode gradients of (upstream * score) w.r.t. weights and input.
MlpGrads mlp_backward(const MlpDiscriminator& d, const MlpCache& cache,
                      double upstream);

// Unit-gradient-norm penalty at the random interpolate u*real + (1-u)*fake:
// penalty = (||grad_x D(xhat)||_2 - 1)^2, plus its exact weight gradients
// (explicit double-backward through the input-gradient; bias terms drop out).
double gradient_penalty(const MlpDiscriminator& d, const double* real_img,
                        const double* fake_img, qcore::Rng& rng,
                        MlpGrads& grads_out);

// Flat parameter views used by the optimizer (order: w1,b1,w2,b2,w3,b3).
std::vector<double> flatten(const MlpDiscriminator& d);
void unflatten(const std::vector<double>& flat, MlpDiscriminator& d);
std::vector<double> flatten(const MlpGrads& g);

void accumulate(MlpGrads& acc, const MlpGrads& inc, double scale);

}  // namespace adeqnn::tasks
