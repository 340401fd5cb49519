#include "veinforge/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "veinforge/common.hpp"

namespace vf::serial {
namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

std::uint8_t quantize(double v) {
  long q = std::lround(v);
  return static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
}

GrayImage morph_direct(const GrayImage& img, const StructuringElement& se,
                       bool want_max) {
  const int w = img.width;
  const int h = img.height;
  const int rx = se.width / 2;
  const int ry = se.height / 2;
  const std::uint8_t pad = want_max ? 0 : 255;
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t best = pad;
      for (int dy = -ry; dy <= ry; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        for (int dx = -rx; dx <= rx; ++dx) {
          const int sx = x + dx;
          if (sx < 0 || sx >= w || !se.at(dx, dy)) continue;
          const std::uint8_t v = img.at(sx, sy);
          best = want_max ? std::max(best, v) : std::min(best, v);
        }
      }
      out.at(x, y) = best;
    }
  }
  return out;
}

inline int px(const BinaryImage& b, int x, int y) {
  if (x < 0 || x >= b.width || y < 0 || y >= b.height) return 0;
  return b.pixels[static_cast<std::size_t>(y) * b.width + x];
}

bool ring_connected_once(const BinaryImage& b, int x, int y) {
  static constexpr int kRing[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {1, 0},
                                      {1, 1},   {0, 1},  {-1, 1}, {-1, 0}};
  int cells[8];
  int n = 0;
  for (int i = 0; i < 8; ++i)
    if (px(b, x + kRing[i][0], y + kRing[i][1])) cells[n++] = i;
  if (n == 0) return false;
  bool seen[8] = {};
  int stack[8];
  int top = 0;
  stack[top++] = cells[0];
  seen[cells[0]] = true;
  int reached = 1;
  while (top > 0) {
    const int c = stack[--top];
    for (int k = 0; k < n; ++k) {
      const int d = cells[k];
      if (seen[d]) continue;
      const int ddx = kRing[c][0] - kRing[d][0];
      const int ddy = kRing[c][1] - kRing[d][1];
      if (ddx >= -1 && ddx <= 1 && ddy >= -1 && ddy <= 1) {
        seen[d] = true;
        stack[top++] = d;
        ++reached;
      }
    }
  }
  return reached == n;
}

bool in_filled_block(const BinaryImage& b, int x, int y) {
  for (int oy = -1; oy <= 0; ++oy)
    for (int ox = -1; ox <= 0; ++ox)
      if (px(b, x + ox, y + oy) && px(b, x + ox + 1, y + oy) &&
          px(b, x + ox, y + oy + 1) && px(b, x + ox + 1, y + oy + 1))
        return true;
  return false;
}

}  // namespace

GrayImage dilate(const GrayImage& img, const StructuringElement& se) {
  return morph_direct(img, se, true);
}

GrayImage erode(const GrayImage& img, const StructuringElement& se) {
  return morph_direct(img, se, false);
}

GrayImage smooth(const GrayImage& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kern(static_cast<std::size_t>(r) + 1);
  double sum = 0.0;
  for (int i = 0; i <= r; ++i) {
    kern[i] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    sum += i == 0 ? kern[i] : 2.0 * kern[i];
  }
  for (double& v : kern) v /= sum;

  const int w = img.width;
  const int h = img.height;
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d)
        acc += kern[std::abs(d)] * img.at(clampi(x + d, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d)
        acc += kern[std::abs(d)] * tmp[static_cast<std::size_t>(clampi(y + d, 0, h - 1)) * w + x];
      out.pixels[static_cast<std::size_t>(y) * w + x] = quantize(acc);
    }
  }
  return out;
}

std::vector<double> wiener_response(const GrayImage& img, int window) {
  if (window > img.width || window > img.height)
    raise(Err::WindowTooLarge, "wiener window exceeds image size");
  const int w = img.width;
  const int h = img.height;
  const int r = window / 2;
  const double n = static_cast<double>(window) * window;

  std::vector<double> mean(static_cast<std::size_t>(w) * h);
  std::vector<double> var(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0, s2 = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const int sy = clampi(y + dy, 0, h - 1);
        for (int dx = -r; dx <= r; ++dx) {
          const double v = img.at(clampi(x + dx, 0, w - 1), sy);
          s += v;
          s2 += v * v;
        }
      }
      const double mu = s / n;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mean[i] = mu;
      var[i] = std::max(0.0, s2 / n - mu * mu);
    }
  }

  double nu = 0.0;
  for (double v : var) nu += v;
  nu /= static_cast<double>(var.size());

  std::vector<double> out(var.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double denom = std::max(var[i], nu);
      const double gain = denom > 0.0 ? std::max(var[i] - nu, 0.0) / denom : 0.0;
      out[i] = mean[i] + gain * (img.at(x, y) - mean[i]);
    }
  }
  return out;
}

std::vector<double> matched_filter_response(const GrayImage& img,
                                            const MatchedFilterParams& params) {
  const int w = img.width;
  const int h = img.height;
  std::vector<MatchedKernel> kernels;
  for (int o = 0; o < params.orientations; ++o) {
    const double angle = M_PI * o / params.orientations;
    kernels.push_back(matched_kernel(params.sigma, params.length, angle));
  }

  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = -1e300;
      for (const MatchedKernel& k : kernels) {
        double acc = 0.0;
        for (int dy = -k.radius; dy <= k.radius; ++dy)
          for (int dx = -k.radius; dx <= k.radius; ++dx)
            acc += k.at(dx, dy) *
                   img.at(clampi(x + dx, 0, w - 1), clampi(y + dy, 0, h - 1));
        best = std::max(best, acc);
      }
      out[static_cast<std::size_t>(y) * w + x] = best;
    }
  }
  return out;
}

BinaryImage thin(const BinaryImage& bin) {
  BinaryImage cur = bin;
  const int w = cur.width;
  const int h = cur.height;
  std::vector<std::uint8_t> kill(cur.pixels.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int phase = 0; phase < 2; ++phase) {
      std::fill(kill.begin(), kill.end(), 0);
      bool any = false;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!px(cur, x, y)) continue;
          const int p2 = px(cur, x, y - 1), p3 = px(cur, x + 1, y - 1);
          const int p4 = px(cur, x + 1, y), p5 = px(cur, x + 1, y + 1);
          const int p6 = px(cur, x, y + 1), p7 = px(cur, x - 1, y + 1);
          const int p8 = px(cur, x - 1, y), p9 = px(cur, x - 1, y - 1);
          const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
          if (b < 2 || b > 6) continue;
          const int seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
          int a = 0;
          for (int i = 0; i < 8; ++i) a += seq[i] == 0 && seq[i + 1] == 1;
          if (a != 1) continue;
          const bool ok = phase == 0
                              ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0)
                              : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
          if (!ok) continue;
          kill[static_cast<std::size_t>(y) * w + x] = 1;
          any = true;
        }
      }
      if (any) {
        changed = true;
        for (std::size_t i = 0; i < kill.size(); ++i)
          if (kill[i]) cur.pixels[i] = 0;
      }
    }
  }
  // same staircase-block sweep as the main path, see preprocess.cpp
  bool swept = true;
  while (swept) {
    swept = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!px(cur, x, y) || !in_filled_block(cur, x, y)) continue;
        if (!ring_connected_once(cur, x, y)) continue;
        if (px(cur, x, y - 1) && px(cur, x + 1, y) && px(cur, x, y + 1) &&
            px(cur, x - 1, y))
          continue;
        cur.pixels[static_cast<std::size_t>(y) * w + x] = 0;
        swept = true;
      }
  }
  return cur;
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

  Mat tmp(m, cols);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += c_inv.at(r, k) * g.at(k, c);
      tmp.at(r, c) = acc;
    }

  Mat q(cols, cols);
  for (int a = 0; a < cols; ++a)
    for (int b = 0; b < cols; ++b) {
      double acc = 0.0;
      for (int r = 0; r < m; ++r) acc += g.at(r, a) * tmp.at(r, b);
      q.at(a, b) = acc;
    }
  return SymMatrix::from_dense(q);
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) raise(Err::DimensionMismatch, "matmul shapes");
  Mat out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
    }
  }
  return out;
}

}  // namespace vf::serial
