#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

#include "adeqnn/datasets.hpp"
#include "adeqnn/qcore.hpp"

using namespace adeqnn;
using qcore::cxd;

namespace {

constexpr double kPi = std::numbers::pi;
const char* kGlassPath = "data/glass_synthetic.data";
const char* kDigitsPath = "data/digits.csv";

bool same_points(const std::vector<datasets::LabeledPoint>& a,
                 const std::vector<datasets::LabeledPoint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].label != b[i].label || a[i].features != b[i].features) return false;
  return true;
}

}  // namespace

TEST_CASE("gen_circle labels by the half-area radius") {
  auto [train, test] = datasets::gen_circle(5000, 5000, 41);
  REQUIRE(train.size() == 5000);
  REQUIRE(test.size() == 5000);
  const double r2 = 2.0 / kPi;
  int inside = 0;
  for (const auto& pts : {train, test})
    for (const auto& p : pts) {
      REQUIRE(p.features.size() == 2);
      CHECK(std::abs(p.features[0]) <= 1.0);
      CHECK(std::abs(p.features[1]) <= 1.0);
      double rr = p.features[0] * p.features[0] + p.features[1] * p.features[1];
      CHECK(p.label == (rr < r2 ? 1 : 0));
      inside += p.label;
    }
  // the defining radius splits the square's area exactly in half
  CHECK(std::abs(inside / 10000.0 - 0.5) < 0.05);
}

TEST_CASE("gen_circle draws train and test from one seeded stream") {
  auto split = datasets::gen_circle(5, 5, 99);
  auto all = datasets::gen_circle(10, 0, 99);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(all.first[i].features == split.first[i].features);
    CHECK(all.first[5 + i].features == split.second[i].features);
  }
  auto again = datasets::gen_circle(5, 5, 99);
  CHECK(same_points(split.first, again.first));
  CHECK(same_points(split.second, again.second));
  auto other = datasets::gen_circle(5, 5, 100);
  CHECK(!same_points(split.first, other.first));
}

TEST_CASE("gen_spiral realizes the documented arm parametrization") {
  for (const auto& shape :
       {datasets::SpiralShape{}, datasets::SpiralShape{1.0, 0.12, 0.05}}) {
    const std::uint64_t seed = 7;
    auto split = datasets::gen_spiral(40, 0, seed, shape);
    qcore::Rng rng(seed);
    for (int i = 0; i < 40; ++i) {
      int c = i % 2;
      double u = rng.uniform();
      double ang = shape.turns * 2.0 * kPi * u + c * kPi;
      double r = shape.r0 + (1.0 - shape.r0) * u;
      double x = std::clamp(r * std::sin(ang) + shape.sigma * rng.normal(), -1.0, 1.0);
      double y = std::clamp(r * std::cos(ang) + shape.sigma * rng.normal(), -1.0, 1.0);
      const auto& p = split.first[std::size_t(i)];
      CHECK(p.label == c);
      CHECK(p.features[0] == doctest::Approx(x).epsilon(1e-12));
      CHECK(p.features[1] == doctest::Approx(y).epsilon(1e-12));
    }
  }
}

TEST_CASE("gen_spiral default shape starts both arms at the origin") {
  // with r0 = 0 and no jitter the radius vanishes as u -> 0 for either class
  datasets::SpiralShape clean{1.5, 0.0, 0.0};
  auto split = datasets::gen_spiral(400, 0, 3, clean);
  double min_r[2] = {2.0, 2.0};
  for (const auto& p : split.first) {
    double r = std::hypot(p.features[0], p.features[1]);
    min_r[p.label] = std::min(min_r[p.label], r);
    CHECK(r <= std::sqrt(2.0) + 1e-12);
  }
  CHECK(min_r[0] < 0.1);
  CHECK(min_r[1] < 0.1);

  auto a = datasets::gen_spiral(30, 30, 12);
  auto b = datasets::gen_spiral(30, 30, 12);
  CHECK(same_points(a.first, b.first));
  CHECK(same_points(a.second, b.second));
}

TEST_CASE("load_glass keeps three classes and splits 131 to 44") {
  auto [train, test] = datasets::load_glass(kGlassPath);
  CHECK(train.size() == 131);
  CHECK(test.size() == 44);

  std::array<int, 3> train_n{}, test_n{};
  for (const auto& p : train) {
    REQUIRE(p.label >= 0);
    REQUIRE(p.label <= 2);
    ++train_n[std::size_t(p.label)];
    REQUIRE(p.features.size() == 4);
    for (double v : p.features) {
      CHECK(v >= -1.0 - 1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
  for (const auto& p : test) {
    REQUIRE(p.label >= 0);
    REQUIRE(p.label <= 2);
    ++test_n[std::size_t(p.label)];
    for (double v : p.features) {
      CHECK(v >= -1.0 - 1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
  // source classes carry 70, 76 and 29 rows; each split keeps the ratios
  const std::array<int, 3> totals{70, 76, 29};
  for (int c = 0; c < 3; ++c) {
    CHECK(train_n[std::size_t(c)] + test_n[std::size_t(c)] == totals[std::size_t(c)]);
    double frac = double(train_n[std::size_t(c)]) / totals[std::size_t(c)];
    CHECK(std::abs(frac - 0.75) < 0.03);
  }

  // train min and max define the [-1,1] rescale, so both are attained
  for (int f = 0; f < 4; ++f) {
    double lo = 2.0, hi = -2.0;
    for (const auto& p : train) {
      lo = std::min(lo, p.features[std::size_t(f)]);
      hi = std::max(hi, p.features[std::size_t(f)]);
    }
    CHECK(lo == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
  }

  auto again = datasets::load_glass(kGlassPath);
  CHECK(same_points(train, again.first));
  CHECK(same_points(test, again.second));

  CHECK_THROWS((void)datasets::load_glass("data/no_such_file.data"));
}

TEST_CASE("load_digits filters classes and scales intensities to [0,1]") {
  auto zeros = datasets::load_digits(kDigitsPath, {0});
  auto ones = datasets::load_digits(kDigitsPath, {1});
  auto both = datasets::load_digits(kDigitsPath, {0, 1});
  CHECK(zeros.size() == 178);
  CHECK(ones.size() == 182);
  CHECK(both.size() == 360);

  bool saw_unit = false;
  for (const auto& img : both)
    for (double v : img) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(std::abs(v * 16.0 - std::round(v * 16.0)) < 1e-12);
      if (v == 1.0) saw_unit = true;
    }
  CHECK(saw_unit);  // full-intensity pixels map to exactly 1.0

  CHECK(datasets::load_digits(kDigitsPath, {}).empty());
  CHECK_THROWS((void)datasets::load_digits("data/no_such_file.csv", {0}));
}

TEST_CASE("gibbs_state endpoints and shift invariance") {
  auto h = datasets::default_hamiltonian();

  auto mixed = datasets::gibbs_state(h, 0.0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(mixed.at(r, c) - (r == c ? 0.25 : 0.0)) < 1e-12);

  // beta -> inf selects the ground state
  auto cold = datasets::gibbs_state(h, 50.0);
  auto [evals, evecs] = qcore::hermitian_eig(h, 4);
  std::vector<cxd> ground(16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      ground[std::size_t(r) * 4 + c] = evecs.at(r, 0) * std::conj(evecs.at(c, 0));
  CHECK(qcore::uhlmann_fidelity(cold, qcore::make_density(4, ground)) >= 0.999);

  // adding a multiple of the identity leaves the state unchanged
  auto shifted = h;
  for (int i = 0; i < 4; ++i) shifted[std::size_t(i) * 4 + i] += 3.7;
  auto a = datasets::gibbs_state(h, 1.3);
  auto b = datasets::gibbs_state(shifted, 1.3);
  for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(a.m[i] - b.m[i]) < 1e-12);

  // valid density at intermediate temperature
  auto warm = datasets::gibbs_state(h, 0.8);
  cxd tr = 0.0;
  for (int r = 0; r < 4; ++r) tr += warm.at(r, r);
  CHECK(std::abs(tr - 1.0) < 1e-12);
  auto [wev, wvec] = qcore::hermitian_eig(warm.m, 4);
  for (double ev : wev) CHECK(ev > 0.0);

  CHECK_THROWS((void)datasets::gibbs_state(h, -1.0));
  CHECK_THROWS((void)datasets::gibbs_state(std::vector<cxd>(4, 0.0), 1.0));
}

TEST_CASE("default_hamiltonian is the pinned coupling matrix") {
  auto h = datasets::default_hamiltonian();
  REQUIRE(h.size() == 16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(h[std::size_t(r) * 4 + c] - std::conj(h[std::size_t(c) * 4 + r])) < 1e-15);
  const double zz[4] = {1.0, -1.0, -1.0, 1.0};
  for (int i = 0; i < 4; ++i) CHECK(h[std::size_t(i) * 4 + i] == cxd(zz[i], 0.0));
  CHECK(h[2] == cxd(0.5, 0.0));   // X on the high qubit
  CHECK(h[1] == cxd(0.5, 0.0));   // X on the low qubit
  CHECK(h[3] == cxd(0.0, 0.0));   // no XX term
}

TEST_CASE("linear_schedule hits the exact endpoint") {
  auto s1 = datasets::linear_schedule(1);
  REQUIRE(s1.gammas.size() == 1);
  CHECK(s1.gammas[0] == 1.0);

  auto s3 = datasets::linear_schedule(3);
  REQUIRE(s3.gammas.size() == 3);
  CHECK(s3.gammas[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s3.gammas[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s3.gammas[2] == 1.0);

  CHECK_THROWS((void)datasets::linear_schedule(0));
}

TEST_CASE("forward_diffuse blends toward the maximally mixed state") {
  std::vector<cxd> m(16, 0.0);
  m[0] = 1.0;
  auto rho0 = qcore::make_density(4, m);

  auto one = datasets::forward_diffuse(rho0, datasets::linear_schedule(1));
  REQUIRE(one.size() == 1);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(one[0].at(r, c) - (r == c ? 0.25 : 0.0)) < 1e-15);

  datasets::DiffusionSchedule half;
  half.T = 1;
  half.gammas = {0.5};
  auto mid = datasets::forward_diffuse(rho0, half)[0];
  CHECK(std::abs(mid.at(0, 0) - 0.625) < 1e-15);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(mid.at(i, i) - 0.125) < 1e-15);

  // trajectory follows the recurrence step by step on a random state
  auto rng = qcore::Rng(31);
  std::vector<cxd> g(16);
  for (auto& x : g) x = {rng.normal(), rng.normal()};
  std::vector<cxd> rm(16, 0.0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cxd acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += g[std::size_t(r) * 4 + k] * std::conj(g[std::size_t(c) * 4 + k]);
      rm[std::size_t(r) * 4 + c] = acc;
    }
  cxd tr = rm[0] + rm[5] + rm[10] + rm[15];
  for (auto& x : rm) x /= tr;
  auto rho = qcore::make_density(4, rm);
  auto sched = datasets::linear_schedule(3);
  auto traj = datasets::forward_diffuse(rho, sched);
  REQUIRE(traj.size() == 3);
  auto cur = rho.m;
  for (std::size_t t = 0; t < 3; ++t) {
    double gmm = sched.gammas[t];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        cxd want = (1.0 - gmm) * cur[std::size_t(r) * 4 + c] +
                   (r == c ? gmm * 0.25 : 0.0);
        CHECK(std::abs(traj[t].at(r, c) - want) < 1e-14);
      }
    cur = traj[t].m;
    cxd trace = 0.0;
    for (int r = 0; r < 4; ++r) trace += traj[t].at(r, r);
    CHECK(std::abs(trace - 1.0) < 1e-12);
  }
  // endpoint is exactly maximally mixed
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(traj[2].at(r, c) - (r == c ? 0.25 : 0.0)) < 1e-14);
}

TEST_CASE("export_points_csv writes the documented layout") {
  const char* path = "test_points_tmp.csv";
  std::vector<datasets::LabeledPoint> pts{{{0.5, -0.25}, 1}, {{-1.0, 0.125}, 0}};
  datasets::export_points_csv(path, pts);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "f0,f1,label");
  std::getline(in, line);
  CHECK(line == "0.5,-0.25,1");
  std::getline(in, line);
  CHECK(line == "-1,0.125,0");
  CHECK(!std::getline(in, line));
  in.close();
  std::remove(path);

  CHECK_THROWS((void)datasets::export_points_csv(path, {}));
}
