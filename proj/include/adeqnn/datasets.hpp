#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adeqnn/qcore.hpp"

namespace adeqnn::datasets {

struct LabeledPoint {
  std::vector<double> features;  // each in [-1, 1]
  int label = 0;
};

using Split = std::pair<std::vector<LabeledPoint>, std::vector<LabeledPoint>>;

// Uniform points on [-1,1]^2; label 1 inside radius sqrt(2/pi), which splits
// the square's area in half. Train then test drawn from one seeded stream.
Split gen_circle(int n_train, int n_test, std::uint64_t seed);

// Two interleaved spiral arms: u~U[0,1], angle turns*2*pi*u + class*pi,
// radius r0 + (1-r0)*u, plus Gaussian jitter, clipped to [-1,1]. Classes
// alternate; arm geometry is a tunable reconstruction.
struct SpiralShape {
  double turns = 1.5;   // full revolutions per arm
  double r0 = 0.0;      // inner radius; 0 starts both arms at the origin
  double sigma = 0.05;  // Gaussian jitter
};

Split gen_spiral(int n_train, int n_test, std::uint64_t seed,
                 const SpiralShape& shape = {});

// UCI glass.data layout (id, 9 features, class; 214 rows). Keeps classes
// {1,2,7} (175 rows), stratified 75:25 split, z-scores with train statistics,
// projects to 4 principal components fit on the train split, rescales each
// component to [-1,1] by train min/max (test clamped). Labels remapped to
// 0,1,2 in class order (1,2,7).
Split load_glass(const std::string& path);

// CSV rows of 64 integer pixel intensities (0..16) plus a label; returns
// images of the requested classes scaled to [0,1].
std::vector<std::array<double, 64>> load_digits(const std::string& path,
                                                const std::vector<int>& classes);

// exp(-beta*H)/Z for a 4x4 Hermitian H (row-major).
qcore::DensityMatrix gibbs_state(const std::vector<qcore::cxd>& hamiltonian,
                                 double beta);

// Z(x)Z + 0.5*(X(x)I + I(x)X), the default diffusion target's Hamiltonian.
std::vector<qcore::cxd> default_hamiltonian();

struct DiffusionSchedule {
  int T = 1;
  std::vector<double> gammas;  // gammas[T-1] == 1 so the endpoint is I/4
};

DiffusionSchedule linear_schedule(int T);  // gamma_t = t/T

// rho_t = (1-gamma_t) rho_{t-1} + gamma_t I/4; returns rho_1..rho_T.
std::vector<qcore::DensityMatrix> forward_diffuse(
    const qcore::DensityMatrix& rho0, const DiffusionSchedule& schedule);

// Header f0,...,f{d-1},label; 9 significant digits, LF line endings.
void export_points_csv(const std::string& path,
                       const std::vector<LabeledPoint>& points);

}  // namespace adeqnn::datasets
