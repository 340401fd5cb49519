#include "veinforge/mat.hpp"

#include <cmath>

#include "veinforge/common.hpp"

namespace vf {

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) raise(Err::DimensionMismatch, "matmul shapes");
  Mat out(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
    }
  }
  return out;
}

Mat transpose(const Mat& a) {
  Mat out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

std::vector<double> matvec(const Mat& a, const std::vector<double>& x) {
  if (a.cols != static_cast<int>(x.size()))
    raise(Err::DimensionMismatch, "matvec shapes");
  std::vector<double> out(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (int j = 0; j < a.cols; ++j) acc += a.at(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

double frobenius(const Mat& a) {
  double s = 0.0;
  for (double v : a.a) s += v * v;
  return std::sqrt(s);
}

}  // namespace vf
