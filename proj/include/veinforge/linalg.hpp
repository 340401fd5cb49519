#pragma once

#include <vector>

#include "veinforge/mat.hpp"

namespace vf {

// Symmetric matrix; from_dense symmetrizes via (A + A^T)/2 so the stored
// entries satisfy at(i,j) == at(j,i) exactly.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;  // row-major n*n

  SymMatrix() = default;
  explicit SymMatrix(int order)
      : n(order), a(static_cast<std::size_t>(order) * order, 0.0) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }

  static SymMatrix from_dense(const Mat& m);
  static SymMatrix identity(int order);
};

// values descending; vectors.at(r, i) is component r of the i-th eigenvector.
struct EigenPairs {
  std::vector<double> values;
  Mat vectors;
};

double frobenius(const SymMatrix& a);

// Cyclic Jacobi eigen-decomposition. Deterministic: fixed sweep order, no
// pivoting; ties in the descending value sort keep sweep order. Each vector
// is normalized with its first component of magnitude > 1e-12 made positive.
EigenPairs sym_eig(const SymMatrix& a);

// Eigen-based pseudo-inverse for PSD input: eigenvalues > rcond * mu_max are
// inverted, the rest dropped. Eigenvalues below -1e-10 * ||A||_F are a
// contract violation (NotPSD).
SymMatrix pinv_psd(const SymMatrix& a, double rcond);

// Ridge alternative to pseudo-inversion: A + lambda * (trace(A)/n) * Id.
SymMatrix ridge_regularize(const SymMatrix& a, double lambda);

}  // namespace vf
