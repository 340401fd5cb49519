#pragma once

#include <string>
#include <vector>

#include "veinforge/linalg.hpp"
#include "veinforge/raster.hpp"

namespace vf {

struct TrainingDims {
  int M = 0;  // x-coordinates kept per image
  int N = 0;  // y-coordinates kept per image
  int I = 0;  // training images
};

// M x 2N coordinate grid: data[j][2k] = x_j, data[j][2k+1] = y_k. The three
// pipeline stages (raw, mean, centered) share the layout but are distinct
// types so a mean grid cannot slip in where a sample grid belongs.
template <class Tag>
struct GridT {
  int M = 0;
  int N = 0;
  std::vector<double> data;  // row-major M x 2N

  GridT() = default;
  GridT(int m, int n)
      : M(m), N(n), data(static_cast<std::size_t>(m) * 2 * n, 0.0) {}

  int cols() const { return 2 * N; }
  double& at(int j, int c) {
    return data[static_cast<std::size_t>(j) * cols() + c];
  }
  double at(int j, int c) const {
    return data[static_cast<std::size_t>(j) * cols() + c];
  }
  bool same_shape(int m, int n) const { return M == m && N == n; }
};

using PairGrid = GridT<struct PairGridTag>;
using MeanGrid = GridT<struct MeanGridTag>;
using CenteredGrid = GridT<struct CenteredGridTag>;

using WeightVector = std::vector<double>;

struct VeinSpaceModel {
  struct Template {
    std::string label;
    WeightVector weights;  // length K
  };

  TrainingDims dims;
  MeanGrid mean;
  double tau = 0.95;
  int K = 0;
  std::vector<double> eigenvalues;             // K, descending
  std::vector<std::vector<double>> eigenveins; // K vectors of length 2N
  std::vector<Template> templates;
  double theta_vein = 0.0;
  double theta_id = 0.0;
};

struct TrainOptions {
  double tau = 0.95;
  double rcond = 1e-10;
  int max_points = 128;
  bool ridge = false;         // invert C + lambda*(trace/M)*Id instead of pinv
  double ridge_lambda = 1e-6;
};

// Minimum skeleton pixels an image must supply to enter training/matching.
inline constexpr int kMinPoints = 8;

CoordinateList extract_coordinates(const BinaryImage& skel);

// Uniform index resampling: picks round(t*(len-1)/(m-1)) for t = 0..m-1
// (m = 1 picks index 0). Indices may repeat when m > len; order is kept.
std::vector<Coord> resample(const CoordinateList& coords, int m);

// seq[j].x fills the x side (j < M), seq[k].y the y side (k < N).
PairGrid build_pair_grid(const std::vector<Coord>& seq, const TrainingDims& dims);

// Full intake for one image: enforces kMinPoints, resamples to max(M, N),
// builds the grid.
PairGrid make_grid(const CoordinateList& coords, const TrainingDims& dims);

MeanGrid mean_grid(const std::vector<PairGrid>& grids);
CenteredGrid center(const PairGrid& grid, const MeanGrid& g);

// C = (1/I) * sum of phi_i * phi_i^T, order M.
SymMatrix covariance(const std::vector<CenteredGrid>& centered);

// Q = g^T * c_inv * g, order 2N, symmetrized.
SymMatrix build_qif(const MeanGrid& g, const SymMatrix& c_inv);

// Smallest K whose clamped-spectrum prefix ratio strictly exceeds tau.
int select_eigenveins(const std::vector<double>& values, double tau);

// e_k = Q * v_k for the top-K pairs.
std::vector<std::vector<double>> make_eigenveins(const SymMatrix& q,
                                                 const EigenPairs& pairs, int K);

// omega_k = (1/(N*M)) * sum_j e_k . (row_j(grid) - row_j(g)).
WeightVector project(const PairGrid& grid, const MeanGrid& g,
                     const std::vector<std::vector<double>>& eigenveins);

// Mean squared per-row distance to span{e_k}, normalized by 2N. The
// eigenveins are orthonormalized internally (they arrive orthogonal but
// scaled by their eigenvalues).
double residual(const PairGrid& grid, const MeanGrid& g,
                const std::vector<std::vector<double>>& eigenveins);

VeinSpaceModel train(const std::vector<std::pair<std::string, CoordinateList>>& samples,
                     const TrainOptions& opts = {});

}  // namespace vf
