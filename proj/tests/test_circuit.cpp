#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "adeqnn/circuit.hpp"
#include "adeqnn/qcore.hpp"

using namespace adeqnn;
using qcore::cxd;

namespace {

constexpr double kPi = std::numbers::pi;
const double kThird = 2.0 * std::asin(1.0 / std::sqrt(3.0));

qcore::StateVector random_state4(qcore::Rng& rng) {
  std::vector<cxd> a(16);
  double nrm = 0.0;
  for (auto& x : a) {
    x = {rng.normal(), rng.normal()};
    nrm += std::norm(x);
  }
  nrm = std::sqrt(nrm);
  for (auto& x : a) x /= nrm;
  return qcore::make_state(4, std::move(a));
}

// identity-acting parameter vector: meshes and controlled pairs at zero,
// MCRY fully transmitting (all pi), readout couplers at zero
circuit::ParamVector identity_params() {
  circuit::ParamVector p;
  for (int i = 0; i < 7; ++i) p.v[std::size_t(circuit::kMcry + i)] = kPi;
  return p;
}

std::array<cxd, 4> zyz_oracle(double a, double b, double c) {
  double cb = std::cos(b / 2.0), sb = std::sin(b / 2.0);
  cxd ea = std::polar(1.0, -a / 2.0), eap = std::polar(1.0, a / 2.0);
  cxd ec = std::polar(1.0, -c / 2.0), ecp = std::polar(1.0, c / 2.0);
  return {ea * cb * ec, ea * -sb * ecp, eap * sb * ec, eap * cb * ecp};
}

}  // namespace

TEST_CASE("encode_features tiles cyclically and scales by pi") {
  auto a = circuit::encode_features({0.25, -0.5});
  CHECK(a[0] == doctest::Approx(0.25 * kPi).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(-0.5 * kPi).epsilon(1e-15));
  CHECK(a[2] == doctest::Approx(0.25 * kPi).epsilon(1e-15));
  CHECK(a[3] == doctest::Approx(-0.5 * kPi).epsilon(1e-15));

  auto z = circuit::encode_features({0.0, 0.0});
  for (double v : z) CHECK(v == 0.0);

  auto f = circuit::encode_features({1.0, -1.0, 0.5, 0.0});
  CHECK(f[0] == doctest::Approx(kPi));
  CHECK(f[1] == doctest::Approx(-kPi));
  CHECK(f[2] == doctest::Approx(0.5 * kPi));
  CHECK(f[3] == 0.0);

  CHECK_THROWS(circuit::encode_features({1.5}));
  CHECK_THROWS(circuit::encode_features({}));
}

TEST_CASE("clements_u4 identity configuration and unitarity") {
  double zeros[16] = {};
  auto id = circuit::clements_u4(zeros);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(id.at(r, c) - (r == c ? 1.0 : 0.0)) < 1e-12);

  auto rng = qcore::Rng(3);
  for (int t = 0; t < 100; ++t) {
    double angles[16];
    for (double& v : angles) v = rng.uniform(-kPi, kPi);
    auto u = circuit::clements_u4(angles);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        cxd acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += std::conj(u.at(k, r)) * u.at(k, c);
        CHECK(std::abs(acc - (r == c ? 1.0 : 0.0)) < 1e-10);
      }
  }
}

TEST_CASE("clements_u4 blocks touch only their mode pair") {
  // first block sits on modes (0,1): modes 2,3 stay identity
  double angles[16] = {};
  angles[0] = 0.7;
  angles[1] = -1.1;
  auto u = circuit::clements_u4(angles);
  for (int r = 2; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(u.at(r, c) - (r == c ? 1.0 : 0.0)) < 1e-12);

  // second block sits on modes (2,3): modes 0,1 stay identity
  double angles2[16] = {};
  angles2[2] = 0.4;
  angles2[3] = 2.0;
  auto u2 = circuit::clements_u4(angles2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(u2.at(r, c) - (r == c ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("layer1_apply identity configuration leaves |0000> unchanged") {
  auto s = qcore::make_state(4);
  double w[16] = {};
  double cu[24] = {};
  auto out = circuit::layer1_apply(s, w, cu, {0, 0, 0, 0}, true);
  CHECK(std::abs(out.amps[0] - 1.0) < 1e-12);
  CHECK(std::abs(qcore::norm2(out) - 1.0) < 1e-12);
}

TEST_CASE("layer1_apply controlled pair fires only on its control value") {
  // branch x = 3 applies X (up to phase) on q2 and q0; |1010> -> |1111|
  auto s = qcore::make_state(4);
  std::vector<cxd> amps(16, 0.0);
  amps[qcore::basis_index(1, 0, 1, 0)] = 1.0;
  s = qcore::make_state(4, amps);

  double w[16] = {};
  double cu[24] = {};
  cu[18] = 0.0; cu[19] = kPi; cu[20] = kPi;  // V_3 = X up to phase
  cu[21] = 0.0; cu[22] = kPi; cu[23] = kPi;  // U_3 = X up to phase
  auto out = circuit::layer1_apply(s, w, cu, {0, 0, 0, 0}, false);
  CHECK(std::norm(out.amps[qcore::basis_index(1, 1, 1, 1)]) == doctest::Approx(1.0).epsilon(1e-12));

  // a state on branch x = 0 is untouched by the same parameters
  auto s0 = qcore::make_state(4);
  auto out0 = circuit::layer1_apply(s0, w, cu, {0, 0, 0, 0}, false);
  CHECK(std::abs(out0.amps[0] - 1.0) < 1e-12);
}

TEST_CASE("layer1_apply branch action matches the V_x (x) U_x oracle") {
  auto rng = qcore::Rng(9);
  double w[16] = {};  // identity mesh isolates the controlled stage
  for (int trial = 0; trial < 25; ++trial) {
    double cu[24];
    for (double& v : cu) v = rng.uniform(-kPi, kPi);
    for (int x = 0; x < 4; ++x) {
      int q3 = (x >> 1) & 1, q1 = x & 1;
      // random superposition over (q2,q0) inside branch x
      std::array<cxd, 4> coef;
      double nrm = 0.0;
      for (auto& c : coef) {
        c = {rng.normal(), rng.normal()};
        nrm += std::norm(c);
      }
      nrm = std::sqrt(nrm);
      std::vector<cxd> amps(16, 0.0);
      for (int q2 = 0; q2 < 2; ++q2)
        for (int q0 = 0; q0 < 2; ++q0)
          amps[qcore::basis_index(q3, q2, q1, q0)] = coef[std::size_t(q2 * 2 + q0)] / nrm;
      auto out = circuit::layer1_apply(qcore::make_state(4, amps), w, cu,
                                       {0, 0, 0, 0}, false);

      auto v = zyz_oracle(cu[6 * x], cu[6 * x + 1], cu[6 * x + 2]);
      auto u = zyz_oracle(cu[6 * x + 3], cu[6 * x + 4], cu[6 * x + 5]);
      for (int q2 = 0; q2 < 2; ++q2)
        for (int q0 = 0; q0 < 2; ++q0) {
          cxd want = 0.0;
          for (int r2 = 0; r2 < 2; ++r2)
            for (int r0 = 0; r0 < 2; ++r0)
              want += v[std::size_t(q2 * 2 + r2)] * u[std::size_t(q0 * 2 + r0)] *
                      coef[std::size_t(r2 * 2 + r0)] / nrm;
          CHECK(std::abs(out.amps[qcore::basis_index(q3, q2, q1, q0)] - want) < 1e-12);
        }
      // no leakage out of the branch
      for (int b = 0; b < 16; ++b) {
        auto bits = qcore::basis_bits(b);
        if (bits[0] != q3 || bits[2] != q1) CHECK(std::abs(out.amps[b]) < 1e-12);
      }
    }
  }
}

TEST_CASE("mzi_amplitude and two_photon_amplitude at the pinned points") {
  CHECK(circuit::mzi_amplitude(kPi) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(circuit::mzi_amplitude(kThird) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(circuit::mzi_amplitude(0.0) == 0.0);

  CHECK(circuit::two_photon_amplitude(kPi) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(circuit::two_photon_amplitude(kThird) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(circuit::two_photon_amplitude(kPi / 2.0) == doctest::Approx(0.0));
  CHECK(std::abs(circuit::two_photon_amplitude(1.3) + std::cos(1.3)) < 1e-15);
}

TEST_CASE("mcry_diagonal entries follow the product formula") {
  double all_pi[7] = {kPi, kPi, kPi, kPi, kPi, kPi, kPi};
  auto d1 = circuit::mcry_diagonal(all_pi);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(d1.d[std::size_t(i)][std::size_t(j)] == doctest::Approx(1.0).epsilon(1e-15));

  double cccz[7];
  for (double& v : cccz) v = kThird;
  auto d2 = circuit::mcry_diagonal(cccz);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(d2.d[std::size_t(i)][std::size_t(j)]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d2.d[0][3] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  double mixed[7] = {kPi / 2.0, kPi, kPi, kPi, kPi, kPi, kPi};
  auto d3 = circuit::mcry_diagonal(mixed);
  for (int i = 0; i < 4; ++i)
    CHECK(d3.d[std::size_t(i)][0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i)
    for (int j = 1; j < 4; ++j)
      CHECK(d3.d[std::size_t(i)][std::size_t(j)] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_mcry agrees with the expanded virtual-qubit oracle") {
  auto rng = qcore::Rng(21);
  for (int t = 0; t < 300; ++t) {
    auto s = random_state4(rng);
    double angles[7];
    for (double& v : angles) v = rng.uniform(0.15, 2.0 * kPi);
    auto [fast, p_fast] = circuit::apply_mcry(s, angles);
    auto [slow, p_slow] = circuit::mcry_expanded_oracle(s, angles);
    CHECK(std::abs(p_fast - p_slow) < 1e-12);
    for (int b = 0; b < 16; ++b) CHECK(std::abs(fast.amps[b] - slow.amps[b]) < 1e-12);
  }
}

TEST_CASE("apply_mcry identity and CCCZ configurations") {
  auto rng = qcore::Rng(33);
  double all_pi[7] = {kPi, kPi, kPi, kPi, kPi, kPi, kPi};
  auto s = random_state4(rng);
  auto [out, p] = circuit::apply_mcry(s, all_pi);
  CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
  for (int b = 0; b < 16; ++b) CHECK(std::abs(out.amps[b] - s.amps[b]) < 1e-12);

  double cccz[7];
  for (double& v : cccz) v = kThird;
  for (int t = 0; t < 100; ++t) {
    auto in = random_state4(rng);
    auto [cz, pz] = circuit::apply_mcry(in, cccz);
    CHECK(std::abs(pz - 1.0 / 9.0) < 1e-12);
    for (int b = 0; b < 16; ++b) {
      cxd want = b == 3 ? -in.amps[b] : in.amps[b];
      CHECK(std::abs(cz.amps[b] - want) < 1e-12);
    }
  }

  // sign flip visible on a |0011> + |0000> superposition
  std::vector<cxd> amps(16, 0.0);
  amps[0] = 1.0 / std::sqrt(2.0);
  amps[3] = 1.0 / std::sqrt(2.0);
  auto [flipped, pf] = circuit::mcry_expanded_oracle(qcore::make_state(4, amps), cccz);
  CHECK(std::abs(pf - 1.0 / 9.0) < 1e-12);
  CHECK(flipped.amps[0].real() * flipped.amps[3].real() < 0.0);

  // all-blocked configuration signals an empty post-selection
  double blocked[7] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, kPi / 2.0};
  CHECK_THROWS_AS((void)circuit::apply_mcry(s, blocked), qcore::NullPostSelection);
}

TEST_CASE("forward composes to a normalized post-selected distribution") {
  circuit::CircuitConfig cfg;
  auto p0 = circuit::forward(cfg, identity_params(), {0, 0, 0, 0});
  CHECK(p0.p[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p0.success_prob == doctest::Approx(1.0).epsilon(1e-12));

  auto rng = qcore::Rng(17);
  for (int t = 0; t < 500; ++t) {
    auto params = circuit::initial_params(rng);
    std::array<double, 4> data;
    for (double& v : data) v = rng.uniform(-kPi, kPi);
    auto dist = circuit::forward(cfg, params, data);
    double sum = 0.0;
    for (double v : dist.p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-10);
    CHECK(dist.success_prob > 0.0);
    CHECK(dist.success_prob <= 1.0 + 1e-12);
  }
}

TEST_CASE("forward with transmitting MCRY equals the MCRY-disabled circuit") {
  auto rng = qcore::Rng(29);
  circuit::CircuitConfig on, off;
  off.mcry_enabled = false;
  for (int t = 0; t < 50; ++t) {
    auto params = circuit::initial_params(rng);
    for (int i = 0; i < 7; ++i) params.v[std::size_t(circuit::kMcry + i)] = kPi;
    std::array<double, 4> data;
    for (double& v : data) v = rng.uniform(-kPi, kPi);
    auto a = circuit::forward(on, params, data);
    auto b = circuit::forward(off, params, data);
    CHECK(a.success_prob == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.success_prob == 1.0);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(a.p[i] - b.p[i]) < 1e-12);
  }
}

TEST_CASE("forward distribution is continuous in every parameter") {
  auto rng = qcore::Rng(71);
  circuit::CircuitConfig cfg;
  auto params = circuit::initial_params(rng);
  std::array<double, 4> data{0.3, -0.9, 1.2, 0.0};
  auto base = circuit::forward(cfg, params, data);
  for (int k = 0; k < circuit::kParamCount; ++k) {
    auto bumped = params;
    bumped.v[std::size_t(k)] += 1e-6;
    auto shifted = circuit::forward(cfg, bumped, data);
    double l1 = 0.0;
    for (int i = 0; i < 16; ++i) l1 += std::abs(shifted.p[i] - base.p[i]);
    CHECK(l1 < 1e-4);
  }
}

TEST_CASE("forward_sampled accepts binomially and is seed-deterministic") {
  circuit::CircuitConfig cfg;
  auto rng = qcore::Rng(5);
  auto [counts, accepted] =
      circuit::forward_sampled(cfg, identity_params(), {0, 0, 0, 0}, 1000, rng);
  CHECK(accepted == 1000);
  CHECK(counts[0] == 1000);

  // CCCZ-configured MCRY accepts ~1/9 of shots
  auto params = identity_params();
  for (int i = 0; i < 7; ++i) params.v[std::size_t(circuit::kMcry + i)] = kThird;
  auto r1 = qcore::Rng(42), r2 = qcore::Rng(42);
  auto [c1, a1] = circuit::forward_sampled(cfg, params, {0, 0, 0, 0}, 90000, r1);
  auto [c2, a2] = circuit::forward_sampled(cfg, params, {0, 0, 0, 0}, 90000, r2);
  CHECK(a1 == a2);
  CHECK(c1 == c2);
  double sigma = std::sqrt(90000.0 * (1.0 / 9.0) * (8.0 / 9.0));
  CHECK(std::abs(double(a1) - 10000.0) < 5.0 * sigma);

  CHECK_THROWS((void)circuit::forward_sampled(cfg, identity_params(), {0, 0, 0, 0}, 0, rng));
}

TEST_CASE("cccx_truth_table is the ideal swap of |0011> and |0111>") {
  auto table = circuit::cccx_truth_table();
  auto ideal = circuit::cccx_ideal_table();
  for (int in = 0; in < 16; ++in) {
    int want = in == 3 ? 7 : in == 7 ? 3 : in;
    CHECK(table[std::size_t(in)][std::size_t(want)] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ideal[std::size_t(in)][std::size_t(want)] == 1.0);
    // statistical fidelity of each row against the ideal row
    double fid = 0.0;
    for (int out = 0; out < 16; ++out)
      fid += std::sqrt(table[std::size_t(in)][std::size_t(out)] *
                       ideal[std::size_t(in)][std::size_t(out)]);
    CHECK(fid * fid == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("readout_scores marginalizes the distribution") {
  circuit::OutputDistribution d;
  d.p[qcore::basis_index(0, 1, 0, 0)] = 1.0;
  auto two = circuit::readout_scores(d, circuit::Readout::two_class);
  CHECK(two[0] == doctest::Approx(1.0));  // P(q2=1)
  CHECK(two[1] == doctest::Approx(0.0));  // P(q3=1)

  circuit::OutputDistribution u;
  for (auto& v : u.p) v = 1.0 / 16.0;
  auto two_u = circuit::readout_scores(u, circuit::Readout::two_class);
  CHECK(two_u[0] == doctest::Approx(0.5));
  CHECK(two_u[1] == doctest::Approx(0.5));
  auto three_u = circuit::readout_scores(u, circuit::Readout::three_class);
  REQUIRE(three_u.size() == 3);
  for (double v : three_u) CHECK(v == doctest::Approx(1.0 / 3.0));

  // all mass on (q3,q2) = 11 leaves nothing for the three-class outcomes
  circuit::OutputDistribution bad;
  bad.p[qcore::basis_index(1, 1, 0, 0)] = 1.0;
  CHECK_THROWS((void)circuit::readout_scores(bad, circuit::Readout::three_class));
}

TEST_CASE("initial_params respects the documented slice ranges") {
  auto r1 = qcore::Rng(77), r2 = qcore::Rng(77);
  auto a = circuit::initial_params(r1);
  auto b = circuit::initial_params(r2);
  CHECK(a.v == b.v);
  for (int i = 0; i < circuit::kMcry; ++i) {
    CHECK(a.v[std::size_t(i)] >= -kPi / 8.0);
    CHECK(a.v[std::size_t(i)] <= kPi / 8.0);
  }
  for (int i = circuit::kMcry; i < circuit::kParamCount; ++i) {
    CHECK(a.v[std::size_t(i)] >= -kPi);
    CHECK(a.v[std::size_t(i)] <= kPi);
  }
}

TEST_CASE("denoiser_forward identity configuration is the relabeled trace") {
  // pure input: purifier stays |00>, output equals the traced purification
  std::vector<cxd> phi(4, 0.0);
  phi[0] = std::sqrt(0.7);
  phi[3] = std::sqrt(0.3);
  std::vector<cxd> rho_m(16, 0.0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rho_m[std::size_t(r) * 4 + c] = phi[std::size_t(r)] * std::conj(phi[std::size_t(c)]);
  auto rho = qcore::make_density(4, rho_m);

  auto out = circuit::denoiser_forward(identity_params(), rho, true, 0, nullptr);
  auto psi = qcore::purify(rho);
  auto want = qcore::partial_trace(qcore::density_from_state(psi), {1, 0});
  for (std::size_t i = 0; i < out.m.size(); ++i)
    CHECK(std::abs(out.m[i] - want.m[i]) < 1e-11);
}

TEST_CASE("denoiser_forward outputs valid states for random parameters") {
  auto rng = qcore::Rng(101);
  auto mixed = qcore::maximally_mixed(4);
  for (int t = 0; t < 100; ++t) {
    auto params = circuit::initial_params(rng);
    auto out = circuit::denoiser_forward(params, mixed, true, 0, nullptr);
    cxd tr = 0.0;
    double herm = 0.0;
    for (int r = 0; r < 4; ++r) {
      tr += out.at(r, r);
      for (int c = 0; c < 4; ++c) herm = std::max(herm, std::abs(out.at(r, c) - std::conj(out.at(c, r))));
    }
    CHECK(std::abs(tr - 1.0) < 1e-10);
    CHECK(herm < 1e-10);
    auto [evals, evecs] = qcore::hermitian_eig(out.m, 4);
    for (double ev : evals) CHECK(ev > -1e-9);
  }
}

TEST_CASE("denoiser_forward sampled mode converges to the exact channel") {
  auto rng = qcore::Rng(55);
  auto params = circuit::initial_params(rng);
  auto rho_in = qcore::maximally_mixed(4);
  auto exact = circuit::denoiser_forward(params, rho_in, true, 0, nullptr);
  auto sample_rng = qcore::Rng(56);
  auto sampled = circuit::denoiser_forward(params, rho_in, false, 100000, &sample_rng);
  CHECK(qcore::uhlmann_fidelity(exact, sampled) >= 0.99);
}
