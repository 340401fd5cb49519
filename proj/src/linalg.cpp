#include "veinforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "veinforge/common.hpp"

namespace vf {

SymMatrix SymMatrix::from_dense(const Mat& m) {
  if (m.rows != m.cols) raise(Err::DimensionMismatch, "symmetrize non-square");
  SymMatrix s(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    s.at(i, i) = m.at(i, i);
    for (int j = 0; j < i; ++j) {
      const double v = 0.5 * (m.at(i, j) + m.at(j, i));
      s.at(i, j) = v;
      s.at(j, i) = v;
    }
  }
  return s;
}

SymMatrix SymMatrix::identity(int order) {
  SymMatrix s(order);
  for (int i = 0; i < order; ++i) s.at(i, i) = 1.0;
  return s;
}

double frobenius(const SymMatrix& a) {
  double s = 0.0;
  for (double v : a.a) s += v * v;
  return std::sqrt(s);
}

EigenPairs sym_eig(const SymMatrix& a) {
  const int n = a.n;
  for (double v : a.a)
    if (!std::isfinite(v)) raise(Err::NonFinite, "sym_eig input");

  SymMatrix b = a;
  Mat vmat = Mat::identity(n);

  const double scale = frobenius(a);
  const double tol = 1e-13 * (scale > 0.0 ? scale : 1.0);
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * b.at(p, q) * b.at(p, q);
    if (std::sqrt(off) <= tol) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = b.at(p, q);
        if (apq == 0.0) continue;
        const double theta = (b.at(q, q) - b.at(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double bpp = b.at(p, p);
        const double bqq = b.at(q, q);
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double bip = b.at(i, p);
          const double biq = b.at(i, q);
          b.at(i, p) = b.at(p, i) = c * bip - s * biq;
          b.at(i, q) = b.at(q, i) = s * bip + c * biq;
        }
        b.at(p, p) = bpp - t * apq;
        b.at(q, q) = bqq + t * apq;
        b.at(p, q) = b.at(q, p) = 0.0;

        for (int i = 0; i < n; ++i) {
          const double vip = vmat.at(i, p);
          const double viq = vmat.at(i, q);
          vmat.at(i, p) = c * vip - s * viq;
          vmat.at(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return b.at(i, i) > b.at(j, j); });

  EigenPairs out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    out.values[k] = b.at(src, src);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += vmat.at(i, src) * vmat.at(i, src);
    norm = std::sqrt(norm);
    double flip = 1.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(vmat.at(i, src)) > 1e-12) {
        if (vmat.at(i, src) < 0.0) flip = -1.0;
        break;
      }
    }
    for (int i = 0; i < n; ++i) out.vectors.at(i, k) = flip * vmat.at(i, src) / norm;
  }
  return out;
}

SymMatrix pinv_psd(const SymMatrix& a, double rcond) {
  for (double v : a.a)
    if (!std::isfinite(v)) raise(Err::NonFinite, "pinv_psd input");

  const EigenPairs eig = sym_eig(a);
  const int n = a.n;
  const double neg_tol = -1e-10 * frobenius(a);
  for (double mu : eig.values)
    if (mu < neg_tol) raise(Err::NotPSD, "negative eigenvalue in pinv_psd");

  const double mu_max = eig.values.empty() ? 0.0 : eig.values.front();
  const double cutoff = rcond * mu_max;

  SymMatrix out(n);
  for (int k = 0; k < n; ++k) {
    const double mu = eig.values[k];
    if (!(mu > cutoff) || mu <= 0.0) continue;
    const double inv = 1.0 / mu;
    for (int i = 0; i < n; ++i) {
      const double vik = eig.vectors.at(i, k);
      for (int j = 0; j <= i; ++j)
        out.at(i, j) += inv * vik * eig.vectors.at(j, k);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) out.at(j, i) = out.at(i, j);
  return out;
}

SymMatrix ridge_regularize(const SymMatrix& a, double lambda) {
  SymMatrix out = a;
  double tr = 0.0;
  for (int i = 0; i < a.n; ++i) tr += a.at(i, i);
  const double bump = lambda * tr / a.n;
  for (int i = 0; i < a.n; ++i) out.at(i, i) += bump;
  return out;
}

}  // namespace vf
