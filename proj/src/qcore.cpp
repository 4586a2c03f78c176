#include "adeqnn/qcore.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace adeqnn::qcore {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " is not finite");
}

}  // namespace

Rng::Rng(std::uint64_t seed) : gen_(seed) {}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // hash (seed, stream, index) into one well-mixed 64-bit engine seed
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x ^= stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t b = splitmix64(x);
  x ^= index * 0x9e3779b97f4a7c15ULL + 0x94d049bb133111ebULL;
  std::uint64_t c = splitmix64(x);
  return Rng(a ^ (b * 0xff51afd7ed558ccdULL) ^ (c * 0xc4ceb9fe1a85ec53ULL));
}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform() {
  // 53 random bits -> [0,1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double mean, double stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double z0 = r * std::cos(2.0 * M_PI * u2);
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return mean + stddev * z0;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  // rejection sampling to avoid modulo bias
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = gen_();
  } while (v >= limit);
  return v % n;
}

StateVector make_state(int n_qubits) {
  if (n_qubits < 2 || n_qubits > 6) throw std::invalid_argument("n_qubits must be 2..6");
  StateVector s;
  s.n_qubits = n_qubits;
  s.amps.assign(static_cast<size_t>(1) << n_qubits, cxd(0.0, 0.0));
  s.amps[0] = 1.0;
  return s;
}

StateVector make_state(int n_qubits, std::vector<cxd> amps) {
  if (n_qubits < 2 || n_qubits > 6) throw std::invalid_argument("n_qubits must be 2..6");
  if (amps.size() != (static_cast<size_t>(1) << n_qubits))
    throw std::invalid_argument("amplitude count does not match qubit count");
  for (const auto& a : amps) {
    check_finite(a.real(), "amplitude");
    check_finite(a.imag(), "amplitude");
  }
  StateVector s;
  s.n_qubits = n_qubits;
  s.amps = std::move(amps);
  return s;
}

double norm2(const StateVector& s) {
  double n = 0.0;
  for (const auto& a : s.amps) n += std::norm(a);
  return n;
}

DensityMatrix make_density(int dim, std::vector<cxd> entries) {
  if (dim != 4 && dim != 16) throw std::invalid_argument("density dim must be 4 or 16");
  if (entries.size() != static_cast<size_t>(dim) * dim)
    throw std::invalid_argument("density entry count mismatch");
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      cxd d = entries[r * dim + c] - std::conj(entries[c * dim + r]);
      if (std::abs(d) > 1e-10) throw std::invalid_argument("density matrix not Hermitian");
    }
  auto [evals, evecs] = hermitian_eig(entries, dim);
  bool clamped = false;
  for (double& ev : evals) {
    if (ev < -1e-9) throw std::invalid_argument("density matrix not PSD");
    if (ev < 0.0) {
      ev = 0.0;
      clamped = true;
    }
  }
  double tr = 0.0;
  for (double ev : evals) tr += ev;
  if (std::abs(tr - 1.0) > 1e-10 && !clamped)
    throw std::invalid_argument("density matrix trace != 1");
  if (tr <= 0.0) throw std::invalid_argument("density matrix trace <= 0");
  if (clamped || std::abs(tr - 1.0) > 1e-15) {
    // rebuild from clamped spectrum, renormalized to trace 1
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        cxd acc(0.0, 0.0);
        for (int k = 0; k < dim; ++k)
          acc += evecs.at(r, k) * (evals[k] / tr) * std::conj(evecs.at(c, k));
        entries[r * dim + c] = acc;
      }
    // exact Hermitian symmetrization against rounding
    for (int r = 0; r < dim; ++r)
      for (int c = r; c < dim; ++c) {
        cxd avg = 0.5 * (entries[r * dim + c] + std::conj(entries[c * dim + r]));
        entries[r * dim + c] = avg;
        entries[c * dim + r] = std::conj(avg);
      }
  }
  DensityMatrix rho;
  rho.dim = dim;
  rho.m = std::move(entries);
  return rho;
}

DensityMatrix density_from_state(const StateVector& s) {
  int dim = 1 << s.n_qubits;
  std::vector<cxd> m(static_cast<size_t>(dim) * dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m[r * dim + c] = s.amps[r] * std::conj(s.amps[c]);
  return make_density(dim, std::move(m));
}

DensityMatrix maximally_mixed(int dim) {
  std::vector<cxd> m(static_cast<size_t>(dim) * dim, cxd(0.0, 0.0));
  for (int i = 0; i < dim; ++i) m[i * dim + i] = 1.0 / dim;
  DensityMatrix rho;
  rho.dim = dim;
  rho.m = std::move(m);
  return rho;
}

Unitary make_unitary(int dim, std::vector<cxd> entries) {
  if (dim < 2) throw std::invalid_argument("unitary dim must be >= 2");
  if (entries.size() != static_cast<size_t>(dim) * dim)
    throw std::invalid_argument("unitary entry count mismatch");
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      cxd acc(0.0, 0.0);
      for (int k = 0; k < dim; ++k)
        acc += std::conj(entries[k * dim + r]) * entries[k * dim + c];
      cxd expect = (r == c) ? cxd(1.0, 0.0) : cxd(0.0, 0.0);
      if (std::abs(acc - expect) > 1e-10)
        throw std::invalid_argument("matrix is not unitary within 1e-10");
    }
  Unitary u;
  u.dim = dim;
  u.m = std::move(entries);
  return u;
}

int basis_index(int q3, int q2, int q1, int q0) {
  for (int b : {q3, q2, q1, q0})
    if (b != 0 && b != 1) throw std::invalid_argument("basis bits must be 0 or 1");
  return 8 * q3 + 4 * q2 + 2 * q1 + q0;
}

std::array<int, 4> basis_bits(int b) {
  if (b < 0 || b > 15) throw std::invalid_argument("basis index out of range");
  return {(b >> 3) & 1, (b >> 2) & 1, (b >> 1) & 1, b & 1};
}

Unitary rotation_gate(char axis, double theta) {
  check_finite(theta, "rotation angle");
  Unitary u;
  u.dim = 2;
  u.m.resize(4);
  double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  if (axis == 'Y') {
    u.m = {cxd(c, 0), cxd(-s, 0), cxd(s, 0), cxd(c, 0)};
  } else if (axis == 'Z') {
    u.m = {cxd(c, -s), cxd(0, 0), cxd(0, 0), cxd(c, s)};
  } else {
    throw std::invalid_argument("rotation axis must be 'Y' or 'Z'");
  }
  return u;
}

Unitary hadamard() {
  Unitary u;
  u.dim = 2;
  double r = 1.0 / std::sqrt(2.0);
  u.m = {cxd(r, 0), cxd(r, 0), cxd(r, 0), cxd(-r, 0)};
  return u;
}

StateVector apply_gate(const StateVector& s, const Unitary& gate,
                       const std::vector<int>& targets) {
  int m = static_cast<int>(targets.size());
  if (m == 0 || gate.dim != (1 << m))
    throw std::invalid_argument("gate dim must equal 2^len(targets)");
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= s.n_qubits)
      throw std::invalid_argument("gate target out of range");
    for (size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate gate target");
  }
  int n = 1 << s.n_qubits;
  StateVector out = s;
  int gdim = gate.dim;
  // enumerate base indices with all target bits clear, then scatter the gate
  std::vector<int> offsets(gdim, 0);
  for (int g = 0; g < gdim; ++g)
    for (int t = 0; t < m; ++t)
      if ((g >> (m - 1 - t)) & 1) offsets[g] |= 1 << targets[t];
  int target_mask = 0;
  for (int t : targets) target_mask |= 1 << t;
  std::vector<cxd> in(gdim);
  for (int base = 0; base < n; ++base) {
    if (base & target_mask) continue;
    for (int g = 0; g < gdim; ++g) in[g] = s.amps[base | offsets[g]];
    for (int r = 0; r < gdim; ++r) {
      cxd acc(0.0, 0.0);
      for (int c = 0; c < gdim; ++c) acc += gate.at(r, c) * in[c];
      out.amps[base | offsets[r]] = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (rho.dim != 16) throw std::invalid_argument("partial_trace expects a 4-qubit density matrix");
  if (keep.size() != 2 || keep[0] == keep[1])
    throw std::invalid_argument("keep must name 2 distinct qubits");
  for (int q : keep)
    if (q < 0 || q > 3) throw std::invalid_argument("keep index out of range");
  int hi = keep[0], lo = keep[1];
  std::vector<int> traced;
  for (int q = 3; q >= 0; --q)
    if (q != hi && q != lo) traced.push_back(q);
  std::vector<cxd> out(16, cxd(0.0, 0.0));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cxd acc(0.0, 0.0);
      for (int e = 0; e < 4; ++e) {
        int row = ((r >> 1) & 1) << hi | (r & 1) << lo;
        int col = ((c >> 1) & 1) << hi | (c & 1) << lo;
        row |= ((e >> 1) & 1) << traced[0] | (e & 1) << traced[1];
        col |= ((e >> 1) & 1) << traced[0] | (e & 1) << traced[1];
        acc += rho.at(row, col);
      }
      out[r * 4 + c] = acc;
    }
  return make_density(4, std::move(out));
}

StateVector purify(const DensityMatrix& rho) {
  if (rho.dim != 4) throw std::invalid_argument("purify expects a 2-qubit density matrix");
  auto [evals, evecs] = hermitian_eig(rho.m, 4);
  // descending order so a pure input leaves the purifier in |00>
  std::array<int, 4> order = {3, 2, 1, 0};
  StateVector psi = make_state(4);
  psi.amps[0] = 0.0;
  for (int i = 0; i < 4; ++i) {
    double lam = std::max(0.0, evals[order[i]]);
    if (lam <= 0.0) continue;
    double w = std::sqrt(lam);
    for (int a = 0; a < 4; ++a) {
      int q3 = (a >> 1) & 1, q1 = a & 1;
      int q2 = (i >> 1) & 1, q0 = i & 1;
      psi.amps[8 * q3 + 4 * q2 + 2 * q1 + q0] += w * evecs.at(a, order[i]);
    }
  }
  return psi;
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim != sigma.dim) throw std::invalid_argument("fidelity dim mismatch");
  int d = rho.dim;
  auto [evals, evecs] = hermitian_eig(rho.m, d);
  // sq = sqrt(rho)
  std::vector<cxd> sq(static_cast<size_t>(d) * d, cxd(0.0, 0.0));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      cxd acc(0.0, 0.0);
      for (int k = 0; k < d; ++k) {
        // numerically-null eigenvalues would contribute sqrt-amplified noise
        double w = evals[k] > 1e-13 ? std::sqrt(evals[k]) : 0.0;
        acc += evecs.at(r, k) * w * std::conj(evecs.at(c, k));
      }
      sq[r * d + c] = acc;
    }
  // m = sq * sigma * sq
  std::vector<cxd> tmp(static_cast<size_t>(d) * d, cxd(0.0, 0.0));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      cxd acc(0.0, 0.0);
      for (int k = 0; k < d; ++k) acc += sq[r * d + k] * sigma.at(k, c);
      tmp[r * d + c] = acc;
    }
  std::vector<cxd> m(static_cast<size_t>(d) * d, cxd(0.0, 0.0));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      cxd acc(0.0, 0.0);
      for (int k = 0; k < d; ++k) acc += tmp[r * d + k] * sq[k * d + c];
      m[r * d + c] = acc;
    }
  // symmetrize against rounding before the eigensolve
  for (int r = 0; r < d; ++r)
    for (int c = r; c < d; ++c) {
      cxd avg = 0.5 * (m[r * d + c] + std::conj(m[c * d + r]));
      m[r * d + c] = avg;
      m[c * d + r] = std::conj(avg);
    }
  auto [mev, mvec] = hermitian_eig(m, d);
  double tr = 0.0;
  for (double ev : mev) tr += ev > 1e-13 ? std::sqrt(ev) : 0.0;
  double f = tr * tr;
  if (f < 0.0 && f > -1e-9) f = 0.0;
  if (f > 1.0 && f < 1.0 + 1e-9) f = 1.0;
  return std::clamp(f, 0.0, 1.0);
}

std::pair<std::vector<double>, Unitary> hermitian_eig(const std::vector<cxd>& h, int dim) {
  if (dim < 1 || h.size() != static_cast<size_t>(dim) * dim)
    throw std::invalid_argument("hermitian_eig size mismatch");
  Eigen::MatrixXcd mat(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) mat(r, c) = h[r * dim + c];
  if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("matrix is not Hermitian within 1e-9");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed to converge");
  std::vector<double> evals(dim);
  Unitary evecs;
  evecs.dim = dim;
  evecs.m.resize(static_cast<size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i) evals[i] = solver.eigenvalues()(i);  // ascending
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) evecs.m[r * dim + c] = solver.eigenvectors()(r, c);
  return {std::move(evals), std::move(evecs)};
}

std::vector<std::int64_t> sample_counts(const std::vector<double>& p,
                                        std::int64_t shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  double total = 0.0;
  for (double v : p) {
    if (v < -1e-12) throw std::invalid_argument("negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("probabilities do not sum to 1");
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += std::max(0.0, p[i]);
    cdf[i] = acc;
  }
  cdf.back() = acc;  // guard the final bin against rounding
  std::vector<std::int64_t> counts(p.size(), 0);
  for (std::int64_t s = 0; s < shots; ++s) {
    double u = rng.uniform() * acc;
    size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (idx >= counts.size()) idx = counts.size() - 1;
    ++counts[idx];
  }
  return counts;
}

}  // namespace adeqnn::qcore
