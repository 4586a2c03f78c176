#include "adeqnn/circuit.hpp"

#include "adeqnn/tomography.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>

namespace adeqnn::circuit {

namespace {

// --- fast in-place kernels on a fixed 16-amplitude register ---
// semantics match qcore::apply_gate; kept local for speed in training loops

using Reg = std::array<cxd, 16>;

void apply1(Reg& a, int q, const cxd u00, const cxd u01, const cxd u10, const cxd u11) {
  int step = 1 << q;
  for (int base = 0; base < 16; ++base) {
    if (base & step) continue;
    cxd x0 = a[base], x1 = a[base | step];
    a[base] = u00 * x0 + u01 * x1;
    a[base | step] = u10 * x0 + u11 * x1;
  }
}

// gate index g = 2*bit(q_hi) + bit(q_lo)
void apply2(Reg& a, int q_hi, int q_lo, const std::array<cxd, 16>& u) {
  int sh = 1 << q_hi, sl = 1 << q_lo;
  for (int base = 0; base < 16; ++base) {
    if (base & (sh | sl)) continue;
    cxd x0 = a[base], x1 = a[base | sl], x2 = a[base | sh], x3 = a[base | sh | sl];
    a[base] = u[0] * x0 + u[1] * x1 + u[2] * x2 + u[3] * x3;
    a[base | sl] = u[4] * x0 + u[5] * x1 + u[6] * x2 + u[7] * x3;
    a[base | sh] = u[8] * x0 + u[9] * x1 + u[10] * x2 + u[11] * x3;
    a[base | sh | sl] = u[12] * x0 + u[13] * x1 + u[14] * x2 + u[15] * x3;
  }
}

void apply_ry(Reg& a, int q, double theta) {
  double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  apply1(a, q, cxd(c, 0), cxd(-s, 0), cxd(s, 0), cxd(c, 0));
}

void apply_rz(Reg& a, int q, double theta) {
  apply1(a, q, std::polar(1.0, -theta / 2.0), cxd(0, 0), cxd(0, 0), std::polar(1.0, theta / 2.0));
}

std::array<cxd, 16> clements_entries(const double* a) {
  static constexpr int pairs[6][2] = {{0, 1}, {2, 3}, {1, 2}, {0, 1}, {2, 3}, {1, 2}};
  std::array<cxd, 16> u{};
  for (int i = 0; i < 4; ++i) u[i * 4 + i] = 1.0;
  for (int k = 0; k < 6; ++k) {
    double th = a[2 * k], ph = a[2 * k + 1];
    cxd e = std::polar(1.0, ph);
    double c = std::cos(th / 2.0), s = std::sin(th / 2.0);
    int p = pairs[k][0], q = pairs[k][1];
    // left-multiply by the embedded MZI block [[e c, -s],[e s, c]]
    for (int col = 0; col < 4; ++col) {
      cxd rp = u[p * 4 + col], rq = u[q * 4 + col];
      u[p * 4 + col] = e * c * rp - s * rq;
      u[q * 4 + col] = e * s * rp + c * rq;
    }
  }
  for (int r = 0; r < 4; ++r) {
    cxd e = std::polar(1.0, a[12 + r]);
    for (int col = 0; col < 4; ++col) u[r * 4 + col] *= e;
  }
  return u;
}

std::array<cxd, 4> su2_zyz(double a, double b, double c) {
  // Rz(a) * Ry(b) * Rz(c)
  double cb = std::cos(b / 2.0), sb = std::sin(b / 2.0);
  cxd ea = std::polar(1.0, -a / 2.0), eap = std::polar(1.0, a / 2.0);
  cxd ec = std::polar(1.0, -c / 2.0), ecp = std::polar(1.0, c / 2.0);
  return {ea * cb * ec, ea * -sb * ecp, eap * sb * ec, eap * cb * ecp};
}

void apply_controlled_pairs(Reg& a, const double* cu24) {
  // for each control value x = 2*q3 + q1: V_x on q2, U_x on q0
  Reg out{};
  for (int x = 0; x < 4; ++x) {
    int q3 = (x >> 1) & 1, q1 = x & 1;
    auto v = su2_zyz(cu24[6 * x], cu24[6 * x + 1], cu24[6 * x + 2]);
    auto u = su2_zyz(cu24[6 * x + 3], cu24[6 * x + 4], cu24[6 * x + 5]);
    int base = (q3 << 3) | (q1 << 1);
    for (int q2 = 0; q2 < 2; ++q2)
      for (int q0 = 0; q0 < 2; ++q0) {
        cxd acc(0, 0);
        for (int r2 = 0; r2 < 2; ++r2)
          for (int r0 = 0; r0 < 2; ++r0)
            acc += v[q2 * 2 + r2] * u[q0 * 2 + r0] * a[base | (r2 << 2) | r0];
        out[base | (q2 << 2) | q0] = acc;
      }
  }
  a = out;
}

void apply_cry(Reg& a, int q_ctrl, int q_tgt, double theta) {
  double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  int sc = 1 << q_ctrl, st = 1 << q_tgt;
  for (int base = 0; base < 16; ++base) {
    if ((base & sc) == 0 || (base & st)) continue;
    cxd x0 = a[base], x1 = a[base | st];
    a[base] = c * x0 - s * x1;
    a[base | st] = s * x0 + c * x1;
  }
}

Reg to_reg(const StateVector& s) {
  if (s.n_qubits != 4) throw std::invalid_argument("expected a 4-qubit state");
  Reg a;
  std::copy(s.amps.begin(), s.amps.end(), a.begin());
  return a;
}

StateVector from_reg(const Reg& a) {
  return qcore::make_state(4, std::vector<cxd>(a.begin(), a.end()));
}

bool corrupt_mcry_hook() {
  // deliberate-fault hook for the self-check command's mutation test:
  // flips the sign of the two-photon diagonal entry on the fast path only
  static const bool on = [] {
    const char* v = std::getenv("ADEQNN_CORRUPT_MCRY");
    return v != nullptr && v[0] == '1';
  }();
  return on;
}

void mcry_scale(Reg& a, const double* angles7, double& success_prob) {
  McryDiagonal d = mcry_diagonal(angles7);
  if (corrupt_mcry_hook()) d.d[0][3] = -d.d[0][3];
  double n2 = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a[4 * i + j] *= d.d[i][j];
      n2 += std::norm(a[4 * i + j]);
    }
  if (n2 <= 1e-12)
    throw qcore::NullPostSelection("post-selection kept no probability mass");
  double inv = 1.0 / std::sqrt(n2);
  for (auto& v : a) v *= inv;
  success_prob *= n2;
}

void run_core(Reg& a, const CircuitConfig& config, const ParamVector& params,
              double& success_prob) {
  // paired single-photon meshes, non-unitary MCRY, final CRY couplers
  apply2(a, 1, 0, clements_entries(params.u4_photon1()));
  apply2(a, 3, 2, clements_entries(params.u4_photon2()));
  if (config.mcry_enabled) mcry_scale(a, params.mcry(), success_prob);
  apply_cry(a, 1, 0, params.cry()[0]);
  apply_cry(a, 3, 2, params.cry()[1]);
}

}  // namespace

ParamVector::ParamVector(std::vector<double> vals) : v(std::move(vals)) {
  if (v.size() != kParamCount)
    throw std::invalid_argument("parameter vector must hold 81 angles");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("parameter is not finite");
}

std::array<double, 4> encode_features(const std::vector<double>& features) {
  if (features.empty() || features.size() > 4)
    throw std::invalid_argument("need 1..4 features");
  std::array<double, 4> angles{};
  for (int k = 0; k < 4; ++k) {
    double f = features[k % features.size()];
    if (f < -1.0 - 1e-9 || f > 1.0 + 1e-9)
      throw std::invalid_argument("feature outside [-1,1]");
    angles[k] = f * M_PI;
  }
  return angles;
}

qcore::Unitary clements_u4(const double* angles16) {
  for (int i = 0; i < 16; ++i)
    if (!std::isfinite(angles16[i])) throw std::invalid_argument("mesh angle not finite");
  auto u = clements_entries(angles16);
  return qcore::make_unitary(4, std::vector<cxd>(u.begin(), u.end()));
}

StateVector layer1_apply(const StateVector& s, const double* w16, const double* cu24,
                         const std::array<double, 4>& data_angles, bool replication_enabled) {
  Reg a = to_reg(s);
  for (int k = 0; k < 4; ++k) apply_ry(a, k, data_angles[k]);
  apply2(a, 3, 1, clements_entries(w16));
  apply_controlled_pairs(a, cu24);
  if (replication_enabled)
    for (int k = 0; k < 4; ++k) apply_rz(a, k, data_angles[k]);
  return from_reg(a);
}

double mzi_amplitude(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("theta not finite");
  return std::sin(theta / 2.0);
}

double two_photon_amplitude(double theta_z) {
  if (!std::isfinite(theta_z)) throw std::invalid_argument("theta_z not finite");
  double s = std::sin(theta_z / 2.0), c = std::cos(theta_z / 2.0);
  return s * s - c * c;  // = -cos(theta_z)
}

McryDiagonal mcry_diagonal(const double* m) {
  for (int i = 0; i < 7; ++i)
    if (!std::isfinite(m[i])) throw std::invalid_argument("mcry angle not finite");
  const double tz = m[6];
  const double a1[4] = {mzi_amplitude(m[0]), mzi_amplitude(m[1]), mzi_amplitude(m[2]),
                        mzi_amplitude(tz)};
  const double a2[4] = {mzi_amplitude(tz), mzi_amplitude(m[3]), mzi_amplitude(m[4]),
                        mzi_amplitude(m[5])};
  McryDiagonal d;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d.d[i][j] = a2[i] * a1[j];
  d.d[0][3] = two_photon_amplitude(tz);
  return d;
}

std::pair<StateVector, double> apply_mcry(const StateVector& s, const double* mcry_angles7) {
  Reg a = to_reg(s);
  double success = 1.0;
  mcry_scale(a, mcry_angles7, success);
  return {from_reg(a), success};
}

std::pair<StateVector, double> mcry_expanded_oracle(const StateVector& s,
                                                    const double* m) {
  // Explicit evolution in the 64-dim space of (q_v2, q_v1, q3, q2, q1, q0):
  // per computational branch (i,j), a controlled RY on each virtual qubit
  // with an effective angle whose post-selected matrix element reproduces
  // the MZI transmissions; branch (0,3) uses the two-photon amplitude.
  if (s.n_qubits != 4) throw std::invalid_argument("expected a 4-qubit state");
  const double tz = m[6];
  const double a1[4] = {mzi_amplitude(m[0]), mzi_amplitude(m[1]), mzi_amplitude(m[2]),
                        mzi_amplitude(tz)};
  const double a2[4] = {mzi_amplitude(tz), mzi_amplitude(m[3]), mzi_amplitude(m[4]),
                        mzi_amplitude(m[5])};
  std::vector<cxd> big(64, cxd(0, 0));
  for (int b = 0; b < 16; ++b) big[b] = s.amps[b];  // virtual qubits start in |00>

  auto effective_angle = [](double amp) {
    // RY(t) has <0|RY|0> = cos(t/2); choose t so cos(t/2) = amp
    return 2.0 * std::acos(std::clamp(amp, -1.0, 1.0));
  };

  std::vector<cxd> out(64, cxd(0, 0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      int b = 4 * i + j;
      double amp_v1, amp_v2;
      if (i == 0 && j == 3) {
        // the two-photon branch interferes on the shared MZI; its kept
        // component carries the coincidence amplitude on v1, nothing on v2
        amp_v1 = two_photon_amplitude(tz);
        amp_v2 = 1.0;
      } else {
        amp_v1 = a1[j];
        amp_v2 = a2[i];
      }
      double t1 = effective_angle(amp_v1), t2 = effective_angle(amp_v2);
      double c1 = std::cos(t1 / 2.0), s1 = std::sin(t1 / 2.0);
      double c2 = std::cos(t2 / 2.0), s2 = std::sin(t2 / 2.0);
      // controlled RY(t2) on v2 and RY(t1) on v1 for this branch;
      // input has v2 = v1 = 0, so only the first column matters
      cxd in = big[b];
      out[b] += c2 * c1 * in;                 // v2=0, v1=0 (kept)
      out[16 * 1 + b] += c2 * s1 * in;        // v1=1 (discarded)
      out[16 * 2 + b] += s2 * c1 * in;        // v2=1 (discarded)
      out[16 * 3 + b] += s2 * s1 * in;        // both (discarded)
    }
  double kept = 0.0;
  for (int b = 0; b < 16; ++b) kept += std::norm(out[b]);
  if (kept <= 1e-12)
    throw qcore::NullPostSelection("post-selection kept no probability mass");
  std::vector<cxd> amps(16);
  double inv = 1.0 / std::sqrt(kept);
  for (int b = 0; b < 16; ++b) amps[b] = out[b] * inv;
  return {qcore::make_state(4, std::move(amps)), kept};
}

OutputDistribution forward(const CircuitConfig& config, const ParamVector& params,
                           const std::array<double, 4>& data_angles) {
  Reg a{};
  a[0] = 1.0;
  for (int k = 0; k < 4; ++k) apply_ry(a, k, data_angles[k]);
  apply2(a, 3, 1, clements_entries(params.layer1_w()));
  apply_controlled_pairs(a, params.layer1_cu());
  if (config.replication_enabled)
    for (int k = 0; k < 4; ++k) apply_rz(a, k, data_angles[k]);
  OutputDistribution dist;
  dist.success_prob = 1.0;
  run_core(a, config, params, dist.success_prob);
  for (int b = 0; b < 16; ++b) dist.p[b] = std::norm(a[b]);
  return dist;
}

std::pair<std::array<std::int64_t, 16>, std::int64_t> forward_sampled(
    const CircuitConfig& config, const ParamVector& params,
    const std::array<double, 4>& data_angles, std::int64_t shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  OutputDistribution dist = forward(config, params, data_angles);
  // post-selection acceptance first, then outcomes among accepted shots
  std::int64_t accepted = 0;
  for (std::int64_t i = 0; i < shots; ++i)
    if (rng.uniform() < dist.success_prob) ++accepted;
  std::array<std::int64_t, 16> counts{};
  if (accepted > 0) {
    auto c = qcore::sample_counts(std::vector<double>(dist.p.begin(), dist.p.end()),
                                  accepted, rng);
    std::copy(c.begin(), c.end(), counts.begin());
  }
  return {counts, accepted};
}

std::array<std::array<double, 16>, 16> cccx_truth_table() {
  const double th = 2.0 * std::asin(1.0 / std::sqrt(3.0));
  const double angles[7] = {th, th, th, th, th, th, th};
  const double r = 1.0 / std::sqrt(2.0);
  std::array<std::array<double, 16>, 16> table{};
  for (int in = 0; in < 16; ++in) {
    Reg a{};
    a[in] = 1.0;
    apply1(a, 2, cxd(r, 0), cxd(r, 0), cxd(r, 0), cxd(-r, 0));  // H on q2
    double success = 1.0;
    mcry_scale(a, angles, success);
    apply1(a, 2, cxd(r, 0), cxd(r, 0), cxd(r, 0), cxd(-r, 0));
    for (int out = 0; out < 16; ++out) table[in][out] = std::norm(a[out]);
  }
  return table;
}

std::array<std::array<double, 16>, 16> cccx_ideal_table() {
  std::array<std::array<double, 16>, 16> table{};
  for (int in = 0; in < 16; ++in) {
    int out = in == 3 ? 7 : in == 7 ? 3 : in;  // |0011> <-> |0111>
    table[in][out] = 1.0;
  }
  return table;
}

std::vector<double> readout_scores(const OutputDistribution& dist, Readout mode) {
  if (mode == Readout::two_class) {
    double p2 = 0.0, p3 = 0.0;
    for (int b = 0; b < 16; ++b) {
      if ((b >> 2) & 1) p2 += dist.p[b];
      if ((b >> 3) & 1) p3 += dist.p[b];
    }
    return {p2, p3};
  }
  if (mode == Readout::three_class) {
    double m[4] = {0, 0, 0, 0};
    for (int b = 0; b < 16; ++b) m[(b >> 2) & 3] += dist.p[b];  // (q3,q2)
    double sum = m[0] + m[1] + m[2];
    if (sum < 1e-9)
      throw std::domain_error("three-class readout mass below tolerance");
    return {m[0] / sum, m[1] / sum, m[2] / sum};
  }
  throw std::invalid_argument("readout mode has no scores");
}

DensityMatrix denoiser_forward(const ParamVector& params, const DensityMatrix& rho_in,
                               bool exact, std::int64_t shots, Rng* rng) {
  Reg a = to_reg(qcore::purify(rho_in));
  apply_controlled_pairs(a, params.layer1_cu());
  CircuitConfig cfg;  // mcry always applied here; a frozen identity slice is a no-op
  double success = 1.0;
  run_core(a, cfg, params, success);
  // reduce the pure state straight to the kept (q1,q0) pair; same result as
  // density_from_state + partial_trace but without the 16x16 eigensolve
  std::vector<cxd> red(16, cxd(0, 0));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cxd acc(0, 0);
      for (int e = 0; e < 4; ++e) acc += a[(e << 2) | r] * std::conj(a[(e << 2) | c]);
      red[r * 4 + c] = acc;
    }
  DensityMatrix reduced = qcore::make_density(4, std::move(red));
  if (exact) return reduced;
  if (rng == nullptr || shots < 1)
    throw std::invalid_argument("sampled denoiser needs shots and an rng");
  std::array<std::array<std::int64_t, 4>, 9> counts{};
  auto settings = tasks::pauli_settings();
  for (size_t k = 0; k < settings.size(); ++k) {
    auto probs = tasks::setting_probabilities(reduced, settings[k]);
    auto c = qcore::sample_counts(std::vector<double>(probs.begin(), probs.end()),
                                  shots, *rng);
    for (int o = 0; o < 4; ++o) counts[k][o] = c[o];
  }
  return tasks::mle_tomography(counts);
}

ParamVector initial_params(Rng& rng) {
  ParamVector p;
  const double pi = std::numbers::pi;
  for (int i = 0; i < kMcry; ++i) p.v[i] = rng.uniform(-pi / 8.0, pi / 8.0);
  for (int i = kMcry; i < kParamCount; ++i) p.v[i] = rng.uniform(-pi, pi);
  return p;
}

}  // namespace adeqnn::circuit
