#include "adeqnn/tomography.hpp"

#include <cmath>

namespace adeqnn::tasks {

using qcore::cxd;

std::vector<PauliSetting> pauli_settings() {
  const char ax[3] = {'X', 'Y', 'Z'};
  std::vector<PauliSetting> out;
  out.reserve(9);
  for (char hi : ax)
    for (char lo : ax) out.push_back({hi, lo});
  return out;
}

qcore::Unitary premeasure_rotation(char pauli) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (pauli) {
    case 'X':  // H
      return qcore::make_unitary(2, {cxd(r, 0), cxd(r, 0), cxd(r, 0), cxd(-r, 0)});
    case 'Y':  // H * Sdag maps |+i>,|-i> onto |0>,|1>
      return qcore::make_unitary(2, {cxd(r, 0), cxd(0, -r), cxd(r, 0), cxd(0, r)});
    case 'Z':
      return qcore::make_unitary(2, {cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(1, 0)});
    default:
      throw std::invalid_argument("pauli must be X, Y or Z");
  }
}

namespace {

// 2x2 projector onto the +1 (s=0) or -1 (s=1) eigenspace of a Pauli
std::array<cxd, 4> pauli_projector(char pauli, int s) {
  double sign = s == 0 ? 1.0 : -1.0;
  switch (pauli) {
    case 'X':
      return {cxd(0.5, 0), cxd(0.5 * sign, 0), cxd(0.5 * sign, 0), cxd(0.5, 0)};
    case 'Y':
      return {cxd(0.5, 0), cxd(0, -0.5 * sign), cxd(0, 0.5 * sign), cxd(0.5, 0)};
    case 'Z':
      return {cxd(s == 0 ? 1.0 : 0.0, 0), cxd(0, 0), cxd(0, 0), cxd(s == 1 ? 1.0 : 0.0, 0)};
    default:
      throw std::invalid_argument("pauli must be X, Y or Z");
  }
}

}  // namespace

std::vector<cxd> setting_projector(const PauliSetting& s, int out_hi, int out_lo) {
  auto ph = pauli_projector(s.hi, out_hi);
  auto pl = pauli_projector(s.lo, out_lo);
  std::vector<cxd> out(16);
  for (int r1 = 0; r1 < 2; ++r1)
    for (int r0 = 0; r0 < 2; ++r0)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c0 = 0; c0 < 2; ++c0)
          out[(r1 * 2 + r0) * 4 + (c1 * 2 + c0)] = ph[r1 * 2 + c1] * pl[r0 * 2 + c0];
  return out;
}

std::array<double, 4> setting_probabilities(const qcore::DensityMatrix& rho,
                                            const PauliSetting& s) {
  if (rho.dim != 4) throw std::invalid_argument("expected a 2-qubit density matrix");
  std::array<double, 4> probs{};
  for (int hi = 0; hi < 2; ++hi)
    for (int lo = 0; lo < 2; ++lo) {
      auto proj = setting_projector(s, hi, lo);
      cxd tr(0, 0);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) tr += proj[r * 4 + c] * rho.at(c, r);
      probs[hi * 2 + lo] = std::max(0.0, tr.real());
    }
  // remove rounding drift so the four outcomes sum to exactly 1
  double sum = probs[0] + probs[1] + probs[2] + probs[3];
  if (sum > 0.0)
    for (double& p : probs) p /= sum;
  return probs;
}

qcore::DensityMatrix mle_tomography(const std::array<std::array<std::int64_t, 4>, 9>& counts) {
  auto settings = pauli_settings();
  std::int64_t total = 0;
  for (size_t k = 0; k < 9; ++k) {
    std::int64_t st = 0;
    for (int o = 0; o < 4; ++o) {
      if (counts[k][o] < 0) throw std::invalid_argument("negative count");
      st += counts[k][o];
    }
    if (st == 0) throw std::invalid_argument("setting has no counts");
    total += st;
  }
  // precompute projectors and relative frequencies over all 36 outcomes
  std::vector<std::vector<cxd>> projs;
  std::vector<double> freqs;
  projs.reserve(36);
  freqs.reserve(36);
  for (size_t k = 0; k < 9; ++k)
    for (int o = 0; o < 4; ++o) {
      projs.push_back(setting_projector(settings[k], (o >> 1) & 1, o & 1));
      freqs.push_back(static_cast<double>(counts[k][o]) / static_cast<double>(total));
    }

  std::vector<cxd> rho(16, cxd(0, 0));
  for (int i = 0; i < 4; ++i) rho[i * 4 + i] = 0.25;

  std::vector<cxd> r_op(16), tmp(16), next(16);
  for (int iter = 0; iter < 10000; ++iter) {
    std::fill(r_op.begin(), r_op.end(), cxd(0, 0));
    for (size_t k = 0; k < projs.size(); ++k) {
      if (freqs[k] == 0.0) continue;
      cxd tr(0, 0);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) tr += projs[k][r * 4 + c] * rho[c * 4 + r];
      double p = std::max(tr.real(), 1e-12);
      double w = freqs[k] / p;
      for (int e = 0; e < 16; ++e) r_op[e] += w * projs[k][e];
    }
    // next = normalize(R rho R)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        cxd acc(0, 0);
        for (int t = 0; t < 4; ++t) acc += r_op[r * 4 + t] * rho[t * 4 + c];
        tmp[r * 4 + c] = acc;
      }
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        cxd acc(0, 0);
        for (int t = 0; t < 4; ++t) acc += tmp[r * 4 + t] * r_op[t * 4 + c];
        next[r * 4 + c] = acc;
      }
    double tr = 0.0;
    for (int i = 0; i < 4; ++i) tr += next[i * 4 + i].real();
    if (tr <= 0.0) throw std::runtime_error("tomography iteration lost trace");
    double delta = 0.0;
    for (int e = 0; e < 16; ++e) {
      next[e] /= tr;
      delta = std::max(delta, std::abs(next[e] - rho[e]));
    }
    rho.swap(next);
    if (delta < 1e-10) break;
  }
  // exact Hermitian symmetrization before validation
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c) {
      cxd avg = 0.5 * (rho[r * 4 + c] + std::conj(rho[c * 4 + r]));
      rho[r * 4 + c] = avg;
      rho[c * 4 + r] = std::conj(avg);
    }
  return qcore::make_density(4, std::move(rho));
}

}  // namespace adeqnn::tasks
