#pragma once

#include <cstddef>
#include <vector>

namespace vf {

// Dense row-major matrix of doubles; small helper, not a linear-algebra
// library. Heavy lifting stays in explicit loops where it is measured.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * cols + c];
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
std::vector<double> matvec(const Mat& a, const std::vector<double>& x);
double frobenius(const Mat& a);

}  // namespace vf
