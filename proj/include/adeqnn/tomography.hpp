#pragma once
// Two-qubit Pauli-basis tomography: measurement settings and the iterative
// R*rho*R maximum-likelihood reconstruction. Lives in its own header because
// both the circuit denoiser and the task pipelines consume it.

#include "adeqnn/qcore.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace adeqnn::tasks {

struct PauliSetting {
  char hi;  // Pauli on q1 (high bit of the two-qubit index): 'X','Y','Z'
  char lo;  // Pauli on q0
};

// the 9 nontrivial settings, row-major over {X,Y,Z} x {X,Y,Z}
std::vector<PauliSetting> pauli_settings();

// single-qubit rotation mapping the given Pauli eigenbasis onto the Z basis
qcore::Unitary premeasure_rotation(char pauli);

// 4x4 projector for outcome (s_hi, s_lo), s in {0,1} meaning eigenvalue +1/-1
std::vector<qcore::cxd> setting_projector(const PauliSetting& s, int out_hi, int out_lo);

// outcome probabilities (index 2*s_hi + s_lo) of measuring rho in a setting
std::array<double, 4> setting_probabilities(const qcore::DensityMatrix& rho,
                                            const PauliSetting& s);

// iterative RrhoR fixed point from 9x4 outcome counts; starts at I/4, stops
// when the max-entry change is < 1e-10 or after 1e4 iterations
qcore::DensityMatrix mle_tomography(const std::array<std::array<std::int64_t, 4>, 9>& counts);

}  // namespace adeqnn::tasks
