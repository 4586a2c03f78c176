#pragma once
// Dense complex linear algebra and quantum-state primitives for up to 6 qubits.
// Value semantics throughout; no global state. Basis convention for the 4-qubit
// register: index b = 8*q3 + 4*q2 + 2*q1 + q0 (qubit k owns bit k).

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adeqnn::qcore {

using cxd = std::complex<double>;

// thrown when post-selection keeps no probability mass
struct NullPostSelection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic random source. Wraps std::mt19937_64 (engine output is
// specified by the standard, so sequences are platform-portable) but samples
// uniforms/normals/integers with our own code because the std distribution
// objects are not portable across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // independent substream for evaluation `index` of stream `stream`;
  // used for reproducible parallel evaluation
  static Rng derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  std::uint64_t next_u64();
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0); // Box-Muller
  std::uint64_t below(std::uint64_t n);      // [0, n), unbiased

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct StateVector {
  int n_qubits = 0;          // 2..6
  std::vector<cxd> amps;     // length 2^n_qubits
};

struct DensityMatrix {
  int dim = 0;               // 4 or 16
  std::vector<cxd> m;        // row-major dim*dim
  cxd at(int r, int c) const { return m[static_cast<size_t>(r) * dim + c]; }
};

struct Unitary {
  int dim = 0;
  std::vector<cxd> m;        // row-major
  cxd at(int r, int c) const { return m[static_cast<size_t>(r) * dim + c]; }
};

StateVector make_state(int n_qubits);                       // |0...0>
StateVector make_state(int n_qubits, std::vector<cxd> amps);
double norm2(const StateVector& s);                         // sum |amp|^2

// validates Hermitian / trace-1 / PSD; eigenvalues in [-1e-9, 0) are clamped
// to 0 and the matrix renormalized to trace 1
DensityMatrix make_density(int dim, std::vector<cxd> entries);
DensityMatrix density_from_state(const StateVector& s);     // |s><s|
DensityMatrix maximally_mixed(int dim);

// validates U^dag U = I within 1e-10
Unitary make_unitary(int dim, std::vector<cxd> entries);

int basis_index(int q3, int q2, int q1, int q0);
std::array<int, 4> basis_bits(int b);                       // {q3,q2,q1,q0}

// standard rotation exp(-i*theta*sigma_axis/2); axis is 'Y' or 'Z'
Unitary rotation_gate(char axis, double theta);
Unitary hadamard();

// gate dim must be 2^len(targets); targets[0] is the MOST significant bit of
// the gate's index, so apply_gate(s, U4, {3,1}) sees gate index 2*q3 + q1
StateVector apply_gate(const StateVector& s, const Unitary& gate,
                       const std::vector<int>& targets);

// keep exactly 2 qubits of a 4-qubit density matrix; keep[0] is the high bit
// of the output index
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// |psi> = sum_i sqrt(lambda_i) |e_i>_(q3,q1) |i>_(q2,q0), eigenvalues sorted
// descending so a pure input leaves the purifying register in |00>
StateVector purify(const DensityMatrix& rho);

// F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0,1]
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// eigenvalues ascending; h is row-major dim x dim, Hermitian within 1e-9
std::pair<std::vector<double>, Unitary> hermitian_eig(const std::vector<cxd>& h, int dim);

// multinomial draw; p sums to 1 within 1e-9, shots >= 1
std::vector<std::int64_t> sample_counts(const std::vector<double>& p,
                                        std::int64_t shots, Rng& rng);

}  // namespace adeqnn::qcore
