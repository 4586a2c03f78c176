#pragma once
// The 4-qubit + 2-virtual-qubit photonic circuit: parameter layout, forward
// evaluation with post-selected readout, the non-unitary MCRY module, the
// baseline (linear) variant, and the CCCZ/CCCX gate configurations.
//
// Photon convention: photon 2 carries (q3,q2) as ququart i = 2*q3 + q2,
// photon 1 carries (q1,q0) as ququart j = 2*q1 + q0; flat index 4i + j equals
// the basis index b = 8*q3 + 4*q2 + 2*q1 + q0.

#include "adeqnn/qcore.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace adeqnn::circuit {

using qcore::cxd;
using qcore::DensityMatrix;
using qcore::Rng;
using qcore::StateVector;

// --- trainable parameter layout (81 angles, radians, stored unwrapped) ---
// layer1_W   [ 0,16)  4-mode mesh on the (q3,q1) pair
// layer1_CU  [16,40)  four (V_x,U_x) pairs, 3 angles each, x = 2*q3+q1,
//                     V_x acts on q2 and U_x on q0, ZYZ angles (a,b,c)
// u4_photon1 [40,56)  4-mode mesh on (q1,q0)
// u4_photon2 [56,72)  4-mode mesh on (q3,q2)
// mcry       [72,79)  (th0_p1, th1_p1, th2_p1, th1_p2, th2_p2, th3_p2, th_z)
// cry        [79,81)  cry[0]: control q1 -> target q0; cry[1]: q3 -> q2
inline constexpr int kLayer1W = 0;
inline constexpr int kLayer1CU = 16;
inline constexpr int kU4Photon1 = 40;
inline constexpr int kU4Photon2 = 56;
inline constexpr int kMcry = 72;
inline constexpr int kCry = 79;
inline constexpr int kParamCount = 81;
inline constexpr int kParamLayoutVersion = 1;

struct ParamVector {
  std::vector<double> v;  // size kParamCount
  ParamVector() : v(kParamCount, 0.0) {}
  explicit ParamVector(std::vector<double> vals);
  const double* layer1_w() const { return v.data() + kLayer1W; }
  const double* layer1_cu() const { return v.data() + kLayer1CU; }
  const double* u4_photon1() const { return v.data() + kU4Photon1; }
  const double* u4_photon2() const { return v.data() + kU4Photon2; }
  const double* mcry() const { return v.data() + kMcry; }
  const double* cry() const { return v.data() + kCry; }
};

enum class Readout { two_class, three_class, tomography };
enum class ShotsMode { exact, sampled };

struct CircuitConfig {
  bool replication_enabled = true;
  bool mcry_enabled = true;
  Readout readout = Readout::two_class;
  // input_map[k] = feature index encoded on qubit k, or -1 for angle 0;
  // default is the cyclic tiling produced by encode_features
  std::array<int, 4> input_map = {0, 1, 2, 3};
  ShotsMode shots_mode = ShotsMode::exact;
};

struct McryDiagonal {
  // d[i][j]: amplitude multiplier for photon-2 index i, photon-1 index j
  std::array<std::array<double, 4>, 4> d{};
};

struct OutputDistribution {
  std::array<double, 16> p{};
  double success_prob = 1.0;
};

// features tiled cyclically to 4 entries, each mapped to feature * pi
std::array<double, 4> encode_features(const std::vector<double>& features);

// 4-mode rectangular mesh: six MZI blocks (theta, phi) on mode pairs
// (0,1),(2,3),(1,2),(0,1),(2,3),(1,2) followed by 4 output phases.
// angles = (th1,ph1, ..., th6,ph6, psi0..psi3); the all-zeros vector is the
// documented identity configuration theta_I.
qcore::Unitary clements_u4(const double* angles16);

// layer 1: RY(data) per qubit, W on (q3,q1), controlled pair operator
// C = sum_x |x><x|_(q3,q1) (x) (V_x (x) U_x)_(q2,q0), then the RZ(data)
// re-upload when replication is enabled
StateVector layer1_apply(const StateVector& s, const double* w16, const double* cu24,
                         const std::array<double, 4>& data_angles, bool replication_enabled);

// post-selected single-photon transmission of one MZI (paper-convention mesh cell)
double mzi_amplitude(double theta);

// post-selected two-photon interference amplitude of the shared MZI
double two_photon_amplitude(double theta_z);

McryDiagonal mcry_diagonal(const double* mcry_angles7);

// diagonal contraction + renormalization; returns (state, success_prob)
std::pair<StateVector, double> apply_mcry(const StateVector& s, const double* mcry_angles7);

// independent oracle: explicit 64-dim evolution with two virtual qubits,
// projection on |00>_v and renormalization; must agree with apply_mcry
std::pair<StateVector, double> mcry_expanded_oracle(const StateVector& s,
                                                    const double* mcry_angles7);

OutputDistribution forward(const CircuitConfig& config, const ParamVector& params,
                           const std::array<double, 4>& data_angles);

// accepted ~ Binomial(shots, success_prob), counts ~ Multinomial(accepted, p)
std::pair<std::array<std::int64_t, 16>, std::int64_t> forward_sampled(
    const CircuitConfig& config, const ParamVector& params,
    const std::array<double, 4>& data_angles, std::int64_t shots, Rng& rng);

// truth_table[input][output]; the CCCX configuration is H on q2, MCRY at
// all-angles = 2*arcsin(1/sqrt(3)), H on q2
std::array<std::array<double, 16>, 16> cccx_truth_table();
std::array<std::array<double, 16>, 16> cccx_ideal_table();

// two_class: (P(q2=1), P(q3=1)); three_class: P over (q3,q2) in {00,01,10},
// renormalized across those three outcomes
std::vector<double> readout_scores(const OutputDistribution& dist, Readout mode);

// seeded start: mesh and controlled-pair slices uniform in [-pi/8, pi/8]
// about the identity vector, MCRY and CRY slices uniform in [-pi, pi]
ParamVector initial_params(Rng& rng);

// QGDM denoiser: loads purify(rho_in) across (q3,q1) with purifier (q2,q0),
// applies the controlled-pair operator (no data angles, no W), U4 (x) U4,
// MCRY, CRY; exact mode traces out (q3,q2); sampled mode measures 9 Pauli
// settings on (q1,q0) with `shots` each and reconstructs via MLE tomography
DensityMatrix denoiser_forward(const ParamVector& params, const DensityMatrix& rho_in,
                               bool exact, std::int64_t shots, Rng* rng);

}  // namespace adeqnn::circuit
