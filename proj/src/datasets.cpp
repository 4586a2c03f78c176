#include "adeqnn/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace adeqnn::datasets {

using qcore::cxd;

Split gen_circle(int n_train, int n_test, std::uint64_t seed) {
  qcore::Rng rng(seed);
  const double r2 = 2.0 / std::numbers::pi;
  auto gen = [&](int n) {
    std::vector<LabeledPoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      double x = rng.uniform(-1.0, 1.0);
      double y = rng.uniform(-1.0, 1.0);
      pts.push_back({{x, y}, x * x + y * y < r2 ? 1 : 0});
    }
    return pts;
  };
  auto train = gen(n_train);
  auto test = gen(n_test);
  return {std::move(train), std::move(test)};
}

Split gen_spiral(int n_train, int n_test, std::uint64_t seed,
                 const SpiralShape& shape) {
  qcore::Rng rng(seed);
  auto gen = [&](int n) {
    std::vector<LabeledPoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int c = i % 2;
      double u = rng.uniform();
      double ang = shape.turns * 2.0 * std::numbers::pi * u + c * std::numbers::pi;
      double r = shape.r0 + (1.0 - shape.r0) * u;
      double x = r * std::sin(ang) + shape.sigma * rng.normal();
      double y = r * std::cos(ang) + shape.sigma * rng.normal();
      pts.push_back({{std::clamp(x, -1.0, 1.0), std::clamp(y, -1.0, 1.0)}, c});
    }
    return pts;
  };
  auto train = gen(n_train);
  auto test = gen(n_test);
  return {std::move(train), std::move(test)};
}

namespace {

std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               std::size_t expect_cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("malformed cell in " + path + ": " + cell);
      }
    }
    if (row.size() != expect_cols)
      throw std::runtime_error("bad column count in " + path);
    rows.push_back(std::move(row));
  }
  return rows;
}

// top-k principal directions of the (n-1)-normalized covariance, with a sign
// convention (largest-magnitude entry positive) so results are reproducible
std::vector<std::vector<double>> pca_components(
    const std::vector<std::vector<double>>& x, int k) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<cxd> cov(d * d, cxd(0, 0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x[i][a] * x[i][b];
      cov[a * d + b] = cxd(s / static_cast<double>(n - 1), 0.0);
    }
  auto [evals, evecs] = qcore::hermitian_eig(cov, static_cast<int>(d));
  std::vector<std::vector<double>> comps;
  for (int c = 0; c < k; ++c) {
    std::size_t col = d - 1 - static_cast<std::size_t>(c);  // descending
    std::vector<double> v(d);
    for (std::size_t r = 0; r < d; ++r)
      v[r] = evecs.at(static_cast<int>(r), static_cast<int>(col)).real();
    std::size_t arg = 0;
    for (std::size_t r = 1; r < d; ++r)
      if (std::abs(v[r]) > std::abs(v[arg])) arg = r;
    if (v[arg] < 0.0)
      for (auto& e : v) e = -e;
    comps.push_back(std::move(v));
  }
  return comps;
}

}  // namespace

Split load_glass(const std::string& path) {
  auto rows = read_csv_rows(path, 11);
  if (rows.size() != 214)
    throw std::runtime_error(path + ": expected 214 rows, got " +
                             std::to_string(rows.size()));
  // keep classes 1, 2, 7 and remap to 0, 1, 2
  const std::map<int, int> remap{{1, 0}, {2, 1}, {7, 2}};
  std::vector<std::vector<double>> feats;
  std::vector<int> labels;
  for (const auto& r : rows) {
    int cls = static_cast<int>(r[10]);
    auto it = remap.find(cls);
    if (it == remap.end()) continue;
    feats.emplace_back(r.begin() + 1, r.begin() + 10);
    labels.push_back(it->second);
  }
  if (feats.size() != 175)
    throw std::runtime_error(path + ": expected 175 rows in classes {1,2,7}");

  // stratified 75:25 split, fixed shuffle seed, largest-remainder rounding
  std::array<std::vector<std::size_t>, 3> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  qcore::Rng rng(20250707);
  std::array<int, 3> n_train{};
  std::array<double, 3> remainder{};
  int assigned = 0;
  for (int c = 0; c < 3; ++c) {
    auto& idx = by_class[static_cast<std::size_t>(c)];
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.below(i)]);
    double exact = 0.75 * static_cast<double>(idx.size());
    n_train[static_cast<std::size_t>(c)] = static_cast<int>(exact);
    remainder[static_cast<std::size_t>(c)] = exact - std::floor(exact);
    assigned += static_cast<int>(exact);
  }
  int want = static_cast<int>(0.75 * 175.0 + 0.5);  // 131
  while (assigned < want) {
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (remainder[static_cast<std::size_t>(c)] >
          remainder[static_cast<std::size_t>(best)])
        best = c;
    ++n_train[static_cast<std::size_t>(best)];
    remainder[static_cast<std::size_t>(best)] = -1.0;
    ++assigned;
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (int c = 0; c < 3; ++c) {
    const auto& idx = by_class[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < idx.size(); ++i)
      (static_cast<int>(i) < n_train[static_cast<std::size_t>(c)] ? train_idx
                                                                  : test_idx)
          .push_back(idx[i]);
  }

  // z-score with train statistics
  std::vector<double> mean(9, 0.0), sd(9, 0.0);
  for (auto i : train_idx)
    for (int f = 0; f < 9; ++f) mean[static_cast<std::size_t>(f)] += feats[i][static_cast<std::size_t>(f)];
  for (auto& m : mean) m /= static_cast<double>(train_idx.size());
  for (auto i : train_idx)
    for (int f = 0; f < 9; ++f) {
      double d = feats[i][static_cast<std::size_t>(f)] - mean[static_cast<std::size_t>(f)];
      sd[static_cast<std::size_t>(f)] += d * d;
    }
  for (auto& s : sd) {
    s = std::sqrt(s / static_cast<double>(train_idx.size() - 1));
    if (s < 1e-12) s = 1.0;
  }
  auto standardize = [&](std::size_t i) {
    std::vector<double> v(9);
    for (int f = 0; f < 9; ++f)
      v[static_cast<std::size_t>(f)] =
          (feats[i][static_cast<std::size_t>(f)] - mean[static_cast<std::size_t>(f)]) /
          sd[static_cast<std::size_t>(f)];
    return v;
  };

  std::vector<std::vector<double>> ztrain;
  ztrain.reserve(train_idx.size());
  for (auto i : train_idx) ztrain.push_back(standardize(i));
  auto comps = pca_components(ztrain, 4);

  auto project = [&](const std::vector<double>& z) {
    std::vector<double> p(4, 0.0);
    for (int c = 0; c < 4; ++c)
      for (int f = 0; f < 9; ++f)
        p[static_cast<std::size_t>(c)] +=
            comps[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)] *
            z[static_cast<std::size_t>(f)];
    return p;
  };

  std::vector<std::vector<double>> ptrain, ptest;
  for (auto& z : ztrain) ptrain.push_back(project(z));
  for (auto i : test_idx) ptest.push_back(project(standardize(i)));

  std::array<double, 4> lo, hi;
  lo.fill(1e300);
  hi.fill(-1e300);
  for (const auto& p : ptrain)
    for (int c = 0; c < 4; ++c) {
      lo[static_cast<std::size_t>(c)] = std::min(lo[static_cast<std::size_t>(c)], p[static_cast<std::size_t>(c)]);
      hi[static_cast<std::size_t>(c)] = std::max(hi[static_cast<std::size_t>(c)], p[static_cast<std::size_t>(c)]);
    }
  auto rescale = [&](const std::vector<double>& p) {
    std::vector<double> v(4);
    for (int c = 0; c < 4; ++c) {
      auto cc = static_cast<std::size_t>(c);
      double span = hi[cc] - lo[cc];
      double t = span > 0.0 ? 2.0 * (p[cc] - lo[cc]) / span - 1.0 : 0.0;
      v[cc] = std::clamp(t, -1.0, 1.0);
    }
    return v;
  };

  Split out;
  for (std::size_t k = 0; k < train_idx.size(); ++k)
    out.first.push_back({rescale(ptrain[k]), labels[train_idx[k]]});
  for (std::size_t k = 0; k < test_idx.size(); ++k)
    out.second.push_back({rescale(ptest[k]), labels[test_idx[k]]});
  return out;
}

std::vector<std::array<double, 64>> load_digits(const std::string& path,
                                                const std::vector<int>& classes) {
  auto rows = read_csv_rows(path, 65);
  std::vector<std::array<double, 64>> out;
  for (const auto& r : rows) {
    int label = static_cast<int>(r[64]);
    if (std::find(classes.begin(), classes.end(), label) == classes.end())
      continue;
    std::array<double, 64> img{};
    for (int p = 0; p < 64; ++p) {
      double v = r[static_cast<std::size_t>(p)];
      if (v < 0.0 || v > 16.0 || v != std::floor(v))
        throw std::runtime_error(path + ": intensity out of range");
      img[static_cast<std::size_t>(p)] = v / 16.0;
    }
    out.push_back(img);
  }
  return out;
}

qcore::DensityMatrix gibbs_state(const std::vector<cxd>& hamiltonian,
                                 double beta) {
  if (hamiltonian.size() != 16)
    throw std::invalid_argument("gibbs_state: expected a 4x4 Hamiltonian");
  if (beta < 0.0) throw std::invalid_argument("gibbs_state: beta must be >= 0");
  auto [evals, evecs] = qcore::hermitian_eig(hamiltonian, 4);
  // shift by the ground energy before exponentiating to stay in range
  double w0 = evals[0];
  std::array<double, 4> w{};
  double z = 0.0;
  for (int k = 0; k < 4; ++k) {
    w[static_cast<std::size_t>(k)] = std::exp(-beta * (evals[static_cast<std::size_t>(k)] - w0));
    z += w[static_cast<std::size_t>(k)];
  }
  std::vector<cxd> rho(16, cxd(0, 0));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cxd acc(0, 0);
      for (int k = 0; k < 4; ++k)
        acc += evecs.at(r, k) * (w[static_cast<std::size_t>(k)] / z) *
               std::conj(evecs.at(c, k));
      rho[static_cast<std::size_t>(r * 4 + c)] = acc;
    }
  return qcore::make_density(4, std::move(rho));
}

std::vector<cxd> default_hamiltonian() {
  // Z(x)Z diagonal (1,-1,-1,1) plus 0.5 * (X(x)I + I(x)X)
  std::vector<cxd> h(16, cxd(0, 0));
  const double zz[4] = {1.0, -1.0, -1.0, 1.0};
  for (int i = 0; i < 4; ++i) h[static_cast<std::size_t>(i * 4 + i)] = cxd(zz[i], 0);
  auto add = [&](int r, int c, double v) {
    h[static_cast<std::size_t>(r * 4 + c)] += cxd(v, 0);
  };
  // X on the high qubit couples (0,2),(1,3); X on the low couples (0,1),(2,3)
  add(0, 2, 0.5); add(2, 0, 0.5); add(1, 3, 0.5); add(3, 1, 0.5);
  add(0, 1, 0.5); add(1, 0, 0.5); add(2, 3, 0.5); add(3, 2, 0.5);
  return h;
}

DiffusionSchedule linear_schedule(int T) {
  if (T < 1) throw std::invalid_argument("linear_schedule: T must be >= 1");
  DiffusionSchedule s;
  s.T = T;
  s.gammas.resize(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t)
    s.gammas[static_cast<std::size_t>(t - 1)] = static_cast<double>(t) / T;
  s.gammas[static_cast<std::size_t>(T - 1)] = 1.0;  // exact endpoint
  return s;
}

std::vector<qcore::DensityMatrix> forward_diffuse(
    const qcore::DensityMatrix& rho0, const DiffusionSchedule& schedule) {
  if (rho0.dim != 4) throw std::invalid_argument("forward_diffuse: need dim 4");
  std::vector<qcore::DensityMatrix> traj;
  traj.reserve(schedule.gammas.size());
  std::vector<cxd> cur = rho0.m;
  for (double g : schedule.gammas) {
    std::vector<cxd> next(16);
    for (int e = 0; e < 16; ++e) next[static_cast<std::size_t>(e)] = (1.0 - g) * cur[static_cast<std::size_t>(e)];
    for (int i = 0; i < 4; ++i) next[static_cast<std::size_t>(i * 4 + i)] += g * 0.25;
    traj.push_back(qcore::make_density(4, next));
    cur = std::move(next);
  }
  return traj;
}

void export_points_csv(const std::string& path,
                       const std::vector<LabeledPoint>& points) {
  if (points.empty()) throw std::invalid_argument("export_points_csv: empty");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path);
  const std::size_t d = points[0].features.size();
  for (std::size_t c = 0; c < d; ++c)
    std::fprintf(f, "f%zu,", c);
  std::fprintf(f, "label\n");
  for (const auto& p : points) {
    for (double v : p.features) std::fprintf(f, "%.9g,", v);
    std::fprintf(f, "%d\n", p.label);
  }
  std::fclose(f);
}

}  // namespace adeqnn::datasets
