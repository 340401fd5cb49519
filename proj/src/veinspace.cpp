#include "veinforge/veinspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "veinforge/common.hpp"

namespace vf {

CoordinateList extract_coordinates(const BinaryImage& skel) {
  CoordinateList out;
  for (int y = 0; y < skel.height; ++y)
    for (int x = 0; x < skel.width; ++x)
      if (skel.at(x, y)) out.points.push_back({x, y});
  return out;  // scan order is raster order
}

std::vector<Coord> resample(const CoordinateList& coords, int m) {
  const int len = static_cast<int>(coords.points.size());
  if (len == 0) raise(Err::EmptyCoordinateList, "resample of empty list");
  std::vector<Coord> out;
  out.reserve(m);
  for (int t = 0; t < m; ++t) {
    const int idx =
        m == 1 ? 0
               : static_cast<int>(std::lround(static_cast<double>(t) * (len - 1) /
                                              (m - 1)));
    out.push_back(coords.points[idx]);
  }
  return out;
}

PairGrid build_pair_grid(const std::vector<Coord>& seq, const TrainingDims& dims) {
  const int need = std::max(dims.M, dims.N);
  if (static_cast<int>(seq.size()) < need)
    raise(Err::InsufficientCoordinates, "sequence shorter than grid dims");
  PairGrid grid(dims.M, dims.N);
  for (int j = 0; j < dims.M; ++j) {
    const double xj = seq[j].x;
    for (int k = 0; k < dims.N; ++k) {
      grid.at(j, 2 * k) = xj;
      grid.at(j, 2 * k + 1) = seq[k].y;
    }
  }
  return grid;
}

PairGrid make_grid(const CoordinateList& coords, const TrainingDims& dims) {
  if (static_cast<int>(coords.points.size()) < kMinPoints)
    raise(Err::InsufficientCoordinates, "skeleton has fewer than 8 pixels");
  return build_pair_grid(resample(coords, std::max(dims.M, dims.N)), dims);
}

MeanGrid mean_grid(const std::vector<PairGrid>& grids) {
  if (grids.empty()) raise(Err::DimensionMismatch, "mean of zero grids");
  const int m = grids.front().M;
  const int n = grids.front().N;
  MeanGrid g(m, n);
  for (const PairGrid& grid : grids) {
    if (!grid.same_shape(m, n)) raise(Err::DimensionMismatch, "mixed grid dims");
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += grid.data[i];
  }
  const double inv = 1.0 / grids.size();
  for (double& v : g.data) v *= inv;
  return g;
}

CenteredGrid center(const PairGrid& grid, const MeanGrid& g) {
  if (!grid.same_shape(g.M, g.N))
    raise(Err::DimensionMismatch, "center dims disagree");
  CenteredGrid out(grid.M, grid.N);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = grid.data[i] - g.data[i];
  return out;
}

SymMatrix covariance(const std::vector<CenteredGrid>& centered) {
  if (centered.empty()) raise(Err::DimensionMismatch, "covariance of zero grids");
  const int m = centered.front().M;
  const int n = centered.front().N;
  for (const CenteredGrid& phi : centered)
    if (!phi.same_shape(m, n)) raise(Err::DimensionMismatch, "mixed grid dims");

  const int cols = 2 * n;
  const double inv = 1.0 / centered.size();
  SymMatrix c(m);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < m; ++r) {
    for (int s = 0; s <= r; ++s) {
      double acc = 0.0;
      for (const CenteredGrid& phi : centered) {
        const double* rowr = &phi.data[static_cast<std::size_t>(r) * cols];
        const double* rows = &phi.data[static_cast<std::size_t>(s) * cols];
        double dot = 0.0;
        for (int t = 0; t < cols; ++t) dot += rowr[t] * rows[t];
        acc += dot;
      }
      c.at(r, s) = acc * inv;
      c.at(s, r) = c.at(r, s);
    }
  }
  return c;
}

SymMatrix build_qif(const MeanGrid& g, const SymMatrix& c_inv) {
  if (c_inv.n != g.M) raise(Err::DimensionMismatch, "c_inv order vs grid rows");
  const int m = g.M;
  const int cols = 2 * g.N;

  // tmp = c_inv * g, then Q = g^T * tmp.
  Mat tmp(m, cols);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += c_inv.at(r, k) * g.at(k, c);
      tmp.at(r, c) = acc;
    }

  Mat q(cols, cols);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < cols; ++a)
    for (int b = 0; b < cols; ++b) {
      double acc = 0.0;
      for (int r = 0; r < m; ++r) acc += g.at(r, a) * tmp.at(r, b);
      q.at(a, b) = acc;
    }
  return SymMatrix::from_dense(q);
}

int select_eigenveins(const std::vector<double>& values, double tau) {
  if (tau != 0.9 && tau != 0.95)
    std::fprintf(stderr, "warning: variance fraction %.6g is off the beaten path\n",
                 tau);
  double total = 0.0;
  for (double v : values) total += std::max(v, 0.0);
  if (!(total > 0.0)) raise(Err::AllZeroSpectrum, "no positive variance");
  double prefix = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    prefix += std::max(values[k], 0.0);
    if (prefix / total > tau) return static_cast<int>(k) + 1;
  }
  return static_cast<int>(values.size());  // tau >= 1 never crosses
}

std::vector<std::vector<double>> make_eigenveins(const SymMatrix& q,
                                                 const EigenPairs& pairs, int K) {
  const int n = q.n;
  std::vector<std::vector<double>> veins(K, std::vector<double>(n, 0.0));
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += q.at(i, j) * pairs.vectors.at(j, k);
      veins[k][i] = acc;
    }
  return veins;
}

WeightVector project(const PairGrid& grid, const MeanGrid& g,
                     const std::vector<std::vector<double>>& eigenveins) {
  if (!grid.same_shape(g.M, g.N))
    raise(Err::DimensionMismatch, "project dims disagree");
  const int cols = 2 * g.N;

  // Sum the centered rows once; each weight is then a single dot product.
  std::vector<double> colsum(cols, 0.0);
  for (int j = 0; j < grid.M; ++j)
    for (int c = 0; c < cols; ++c) colsum[c] += grid.at(j, c) - g.at(j, c);

  const double scale = 1.0 / (static_cast<double>(g.N) * g.M);
  WeightVector w(eigenveins.size(), 0.0);
  for (std::size_t k = 0; k < eigenveins.size(); ++k) {
    if (static_cast<int>(eigenveins[k].size()) != cols)
      raise(Err::DimensionMismatch, "eigenvein length vs grid cols");
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += eigenveins[k][c] * colsum[c];
    w[k] = acc * scale;
  }
  return w;
}

namespace {

// Stabilized Gram-Schmidt; vectors that collapse below tolerance are
// dropped rather than normalized into noise.
std::vector<std::vector<double>> orthonormalize(
    const std::vector<std::vector<double>>& vecs) {
  std::vector<std::vector<double>> basis;
  for (const auto& v : vecs) {
    std::vector<double> u = v;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * b[i];
      for (std::size_t i = 0; i < u.size(); ++i) u[i] -= dot * b[i];
    }
    double norm = 0.0;
    for (double x : u) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 1e-12) {
      for (double& x : u) x /= norm;
      basis.push_back(std::move(u));
    }
  }
  return basis;
}

}  // namespace

double residual(const PairGrid& grid, const MeanGrid& g,
                const std::vector<std::vector<double>>& eigenveins) {
  if (!grid.same_shape(g.M, g.N))
    raise(Err::DimensionMismatch, "residual dims disagree");
  const int cols = 2 * g.N;
  const std::vector<std::vector<double>> basis = orthonormalize(eigenveins);

  double total = 0.0;
  std::vector<double> d(cols);
  for (int j = 0; j < grid.M; ++j) {
    for (int c = 0; c < cols; ++c) d[c] = grid.at(j, c) - g.at(j, c);
    for (const auto& b : basis) {
      double dot = 0.0;
      for (int c = 0; c < cols; ++c) dot += d[c] * b[c];
      for (int c = 0; c < cols; ++c) d[c] -= dot * b[c];
    }
    double sq = 0.0;
    for (int c = 0; c < cols; ++c) sq += d[c] * d[c];
    total += sq;
  }
  return total / grid.M / cols;
}

namespace {

// Threshold at the empirical equal-error point of two score lists, used to
// seed theta_id from the training set. Candidates are the observed scores;
// the pick minimizes |FAR - FRR|, then FAR + FRR, then the threshold itself.
double eer_threshold(std::vector<double> genuine, std::vector<double> impostor) {
  if (genuine.empty() && impostor.empty()) return 1.0;
  if (impostor.empty())
    return 2.0 * *std::max_element(genuine.begin(), genuine.end());
  if (genuine.empty())
    return 0.5 * *std::min_element(impostor.begin(), impostor.end());

  std::vector<double> cand = genuine;
  cand.insert(cand.end(), impostor.begin(), impostor.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  double best_theta = cand.front();
  double best_gap = std::numeric_limits<double>::infinity();
  double best_sum = std::numeric_limits<double>::infinity();
  for (double theta : cand) {
    double fa = 0.0, fr = 0.0;
    for (double s : impostor) fa += s <= theta;
    for (double s : genuine) fr += s > theta;
    const double far = fa / impostor.size();
    const double frr = fr / genuine.size();
    const double gap = std::abs(far - frr);
    const double sum = far + frr;
    if (gap < best_gap || (gap == best_gap && sum < best_sum)) {
      best_gap = gap;
      best_sum = sum;
      best_theta = theta;
    }
  }
  return best_theta;
}

}  // namespace

VeinSpaceModel train(const std::vector<std::pair<std::string, CoordinateList>>& samples,
                     const TrainOptions& opts) {
  if (samples.size() < 2)
    raise(Err::InsufficientSamples, "training needs at least two samples");

  int m = opts.max_points;
  for (const auto& [label, coords] : samples) {
    const int count = static_cast<int>(coords.points.size());
    if (count < kMinPoints)
      raise(Err::InsufficientCoordinates, "skeleton has fewer than 8 pixels");
    m = std::min(m, count);
  }

  VeinSpaceModel model;
  model.dims = {m, m, static_cast<int>(samples.size())};
  model.tau = opts.tau;

  std::vector<PairGrid> grids;
  grids.reserve(samples.size());
  for (const auto& [label, coords] : samples)
    grids.push_back(make_grid(coords, model.dims));

  model.mean = mean_grid(grids);

  std::vector<CenteredGrid> centered;
  centered.reserve(grids.size());
  for (const PairGrid& grid : grids) centered.push_back(center(grid, model.mean));

  const SymMatrix c = covariance(centered);
  const SymMatrix c_inv =
      opts.ridge ? pinv_psd(ridge_regularize(c, opts.ridge_lambda), opts.rcond)
                 : pinv_psd(c, opts.rcond);
  const SymMatrix q = build_qif(model.mean, c_inv);

  const EigenPairs pairs = sym_eig(q);
  model.K = select_eigenveins(pairs.values, opts.tau);
  model.eigenvalues.assign(pairs.values.begin(), pairs.values.begin() + model.K);
  model.eigenveins = make_eigenveins(q, pairs, model.K);

  for (std::size_t i = 0; i < samples.size(); ++i)
    model.templates.push_back(
        {samples[i].first, project(grids[i], model.mean, model.eigenveins)});

  // theta_vein: 99th percentile of training residuals, with headroom.
  std::vector<double> res;
  res.reserve(grids.size());
  for (const PairGrid& grid : grids)
    res.push_back(residual(grid, model.mean, model.eigenveins));
  std::sort(res.begin(), res.end());
  const std::size_t p99 =
      std::min(res.size() - 1,
               static_cast<std::size_t>(std::ceil(0.99 * res.size())) - 1);
  model.theta_vein = std::max(1.5 * res[p99], 1e-9);

  // theta_id: equal-error threshold of leave-one-out template distances.
  std::vector<double> genuine, impostor;
  for (std::size_t i = 0; i < model.templates.size(); ++i)
    for (std::size_t j = i + 1; j < model.templates.size(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < model.templates[i].weights.size(); ++k) {
        const double diff =
            model.templates[i].weights[k] - model.templates[j].weights[k];
        acc += diff * diff;
      }
      (model.templates[i].label == model.templates[j].label ? genuine : impostor)
          .push_back(std::sqrt(acc));
    }
  model.theta_id = eer_threshold(std::move(genuine), std::move(impostor));
  return model;
}

}  // namespace vf
