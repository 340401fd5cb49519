#include "veinforge/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "veinforge/common.hpp"

namespace vf {

namespace {

constexpr std::uint8_t kDilatePad = 0;    // neutral for max
constexpr std::uint8_t kErodePad = 255;   // neutral for min

// Maximal horizontal runs of set cells per mask row, as dx intervals [a, b]
// relative to the center. Morphology over an arbitrary mask reduces to
// sliding-window extrema over these runs.
struct MaskRun {
  int dy;
  int a;
  int b;
};

std::vector<MaskRun> mask_runs(const StructuringElement& se) {
  std::vector<MaskRun> runs;
  const int rx = se.width / 2;
  const int ry = se.height / 2;
  for (int dy = -ry; dy <= ry; ++dy) {
    int dx = -rx;
    while (dx <= rx) {
      if (!se.at(dx, dy)) {
        ++dx;
        continue;
      }
      int end = dx;
      while (end + 1 <= rx && se.at(end + 1, dy)) ++end;
      runs.push_back({dy, dx, end});
      dx = end + 1;
    }
  }
  return runs;
}

// out[x] = extremum of row[j] for j in [x+a, x+b] clipped to the row;
// windows that fall entirely outside yield `pad`. Monotonic-deque sliding
// window, O(width) per run.
void run_extreme(const std::uint8_t* row, int w, int a, int b, bool want_max,
                 std::uint8_t pad, std::uint8_t* out) {
  std::deque<int> q;
  int nextj = 0;
  for (int x = 0; x < w; ++x) {
    const int hi = std::min(x + b, w - 1);
    while (nextj <= hi) {
      if (want_max) {
        while (!q.empty() && row[q.back()] <= row[nextj]) q.pop_back();
      } else {
        while (!q.empty() && row[q.back()] >= row[nextj]) q.pop_back();
      }
      q.push_back(nextj);
      ++nextj;
    }
    while (!q.empty() && q.front() < x + a) q.pop_front();
    out[x] = q.empty() ? pad : row[q.front()];
  }
}

GrayImage morph_extreme(const GrayImage& img, const StructuringElement& se,
                        bool want_max) {
  const int w = img.width;
  const int h = img.height;
  const std::uint8_t pad = want_max ? kDilatePad : kErodePad;
  const std::vector<MaskRun> runs = mask_runs(se);
  const int nruns = static_cast<int>(runs.size());

  // One sliding-extremum plane per mask run, then a vertical reduce.
  std::vector<std::uint8_t> planes(static_cast<std::size_t>(nruns) * w * h);
#pragma omp parallel for collapse(2) schedule(static)
  for (int r = 0; r < nruns; ++r) {
    for (int y = 0; y < h; ++y) {
      run_extreme(&img.pixels[static_cast<std::size_t>(y) * w], w, runs[r].a,
                  runs[r].b, want_max, pad,
                  &planes[(static_cast<std::size_t>(r) * h + y) * w]);
    }
  }

  GrayImage out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::uint8_t* dst = &out.pixels[static_cast<std::size_t>(y) * w];
    std::fill(dst, dst + w, pad);
    for (int r = 0; r < nruns; ++r) {
      const int sy = y + runs[r].dy;
      if (sy < 0 || sy >= h) continue;
      const std::uint8_t* src =
          &planes[(static_cast<std::size_t>(r) * h + sy) * w];
      if (want_max) {
        for (int x = 0; x < w; ++x) dst[x] = std::max(dst[x], src[x]);
      } else {
        for (int x = 0; x < w; ++x) dst[x] = std::min(dst[x], src[x]);
      }
    }
  }
  return out;
}

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

std::uint8_t quantize(double v) {
  long q = std::lround(v);
  return static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
}

}  // namespace

StructuringElement StructuringElement::square(int side) {
  StructuringElement se;
  se.width = side;
  se.height = side;
  se.mask.assign(static_cast<std::size_t>(side) * side, 1);
  return se;
}

StructuringElement StructuringElement::cross(int radius) {
  StructuringElement se;
  const int side = 2 * radius + 1;
  se.width = side;
  se.height = side;
  se.mask.assign(static_cast<std::size_t>(side) * side, 0);
  for (int d = -radius; d <= radius; ++d) {
    se.mask[static_cast<std::size_t>(radius) * side + (d + radius)] = 1;
    se.mask[static_cast<std::size_t>(d + radius) * side + radius] = 1;
  }
  return se;
}

StructuringElement StructuringElement::disk(int radius) {
  StructuringElement se;
  const int side = 2 * radius + 1;
  se.width = side;
  se.height = side;
  se.mask.assign(static_cast<std::size_t>(side) * side, 0);
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius)
        se.mask[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] = 1;
  return se;
}

bool StructuringElement::valid() const {
  if (width <= 0 || height <= 0 || width % 2 == 0 || height % 2 == 0)
    return false;
  if (mask.size() != static_cast<std::size_t>(width) * height) return false;
  return at(0, 0);
}

bool PipelineConfig::valid() const {
  return background_se_radius > 0 && smoothing_sigma > 0.0 &&
         wiener_window >= 3 && wiener_window % 2 == 1 &&
         matched_filter.sigma > 0.0 && matched_filter.length >= 1 &&
         matched_filter.orientations >= 1 && fixed_level >= 0 &&
         fixed_level <= 255 && min_component_area >= 0 && prune_length >= 0;
}

GrayImage dilate(const GrayImage& img, const StructuringElement& se) {
  return morph_extreme(img, se, true);
}

GrayImage erode(const GrayImage& img, const StructuringElement& se) {
  return morph_extreme(img, se, false);
}

GrayImage open(const GrayImage& img, const StructuringElement& se) {
  return dilate(erode(img, se), se);
}

GrayImage subtract_background(const GrayImage& img, const StructuringElement& se) {
  GrayImage bg = open(img, se);
  GrayImage out(img.width, img.height);
  const std::size_t n = img.pixels.size();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const int d = static_cast<int>(img.pixels[i]) - static_cast<int>(bg.pixels[i]);
    out.pixels[i] = static_cast<std::uint8_t>(d > 0 ? d : 0);
  }
  return out;
}

GrayImage contrast_stretch(const GrayImage& img) {
  const auto [mn_it, mx_it] =
      std::minmax_element(img.pixels.begin(), img.pixels.end());
  const int mn = *mn_it;
  const int mx = *mx_it;
  GrayImage out(img.width, img.height);
  if (mn == mx) return out;  // defined degenerate case: all-zero
  const double scale = 255.0 / (mx - mn);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(img.pixels.size()); ++i)
    out.pixels[i] = quantize((img.pixels[i] - mn) * scale);
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
#pragma omp parallel for schedule(static)
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

  // Noise power: mean local variance, accumulated serially so the result
  // does not depend on the thread count.
  double nu = 0.0;
  for (double v : var) nu += v;
  nu /= static_cast<double>(var.size());

  std::vector<double> out(var.size());
#pragma omp parallel for schedule(static)
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

GrayImage wiener_filter(const GrayImage& img, int window) {
  const std::vector<double> resp = wiener_response(img, window);
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < resp.size(); ++i) out.pixels[i] = quantize(resp[i]);
  return out;
}

MatchedKernel matched_kernel(double sigma, int length, double angle_rad) {
  const double half_len = (length - 1) / 2.0;
  const double half_width = 3.0 * sigma;
  MatchedKernel k;
  k.radius = static_cast<int>(
      std::ceil(std::sqrt(half_len * half_len + half_width * half_width)));
  const int side = 2 * k.radius + 1;
  k.weights.assign(static_cast<std::size_t>(side) * side, 0.0);

  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  double sum = 0.0;
  int count = 0;
  for (int dy = -k.radius; dy <= k.radius; ++dy) {
    for (int dx = -k.radius; dx <= k.radius; ++dx) {
      const double u = dx * c + dy * s;   // along the line
      const double v = -dx * s + dy * c;  // across the line
      if (std::abs(u) > half_len + 1e-9 || std::abs(v) > half_width + 1e-9)
        continue;
      // Inverted Gaussian cross-profile: negative at the line center, so a
      // dark line on a bright field scores positive once zero-meaned.
      const double wgt = -std::exp(-(v * v) / (2.0 * sigma * sigma));
      k.weights[static_cast<std::size_t>(dy + k.radius) * side + (dx + k.radius)] =
          wgt;
      sum += wgt;
      ++count;
    }
  }
  // Zero-mean over the included cells only; excluded cells stay exactly 0.
  // Raw weights are strictly negative, so a zero weight marks exclusion.
  const double mean = sum / count;
  for (double& wcell : k.weights)
    if (wcell != 0.0) wcell -= mean;
  return k;
}

std::vector<double> matched_filter_response(const GrayImage& img,
                                            const MatchedFilterParams& params) {
  const int w = img.width;
  const int h = img.height;

  struct Tap {
    int dx, dy;
    double wgt;
  };
  std::vector<std::vector<Tap>> taps(params.orientations);
  for (int o = 0; o < params.orientations; ++o) {
    const double angle = M_PI * o / params.orientations;
    const MatchedKernel k = matched_kernel(params.sigma, params.length, angle);
    for (int dy = -k.radius; dy <= k.radius; ++dy)
      for (int dx = -k.radius; dx <= k.radius; ++dx)
        if (k.at(dx, dy) != 0.0) taps[o].push_back({dx, dy, k.at(dx, dy)});
  }

  std::vector<double> out(static_cast<std::size_t>(w) * h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = -1e300;
      for (const auto& kt : taps) {
        double acc = 0.0;
        for (const Tap& t : kt)
          acc += t.wgt * img.at(clampi(x + t.dx, 0, w - 1), clampi(y + t.dy, 0, h - 1));
        best = std::max(best, acc);
      }
      out[static_cast<std::size_t>(y) * w + x] = best;
    }
  }
  return out;
}

GrayImage matched_filter(const GrayImage& img, const MatchedFilterParams& params) {
  const std::vector<double> resp = matched_filter_response(img, params);
  const auto [mn_it, mx_it] = std::minmax_element(resp.begin(), resp.end());
  const double mn = *mn_it;
  const double mx = *mx_it;
  GrayImage out(img.width, img.height);
  if (!(mx > mn)) return out;  // flat response
  const double scale = 255.0 / (mx - mn);
  for (std::size_t i = 0; i < resp.size(); ++i)
    out.pixels[i] = quantize((resp[i] - mn) * scale);
  return out;
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
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d)
        acc += kern[std::abs(d)] * img.at(clampi(x + d, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayImage out(w, h);
#pragma omp parallel for schedule(static)
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

namespace {

// 256-bit helpers for the exact Otsu comparison. The between-class variance
// ratio test cross-multiplies A^2 * B terms that overflow __int128 for large
// images, so products are kept as four 64-bit limbs.
struct Wide {
  std::uint64_t w[4]{};
};

Wide wide_mul_u128(unsigned __int128 a, unsigned __int128 b) {
  const std::uint64_t al = static_cast<std::uint64_t>(a);
  const std::uint64_t ah = static_cast<std::uint64_t>(a >> 64);
  const std::uint64_t bl = static_cast<std::uint64_t>(b);
  const std::uint64_t bh = static_cast<std::uint64_t>(b >> 64);
  Wide r;
  unsigned __int128 p0 = static_cast<unsigned __int128>(al) * bl;
  unsigned __int128 p1 = static_cast<unsigned __int128>(al) * bh;
  unsigned __int128 p2 = static_cast<unsigned __int128>(ah) * bl;
  unsigned __int128 p3 = static_cast<unsigned __int128>(ah) * bh;
  r.w[0] = static_cast<std::uint64_t>(p0);
  unsigned __int128 mid = (p0 >> 64) + static_cast<std::uint64_t>(p1) +
                          static_cast<std::uint64_t>(p2);
  r.w[1] = static_cast<std::uint64_t>(mid);
  unsigned __int128 hi = (mid >> 64) + (p1 >> 64) + (p2 >> 64) +
                         static_cast<std::uint64_t>(p3);
  r.w[2] = static_cast<std::uint64_t>(hi);
  r.w[3] = static_cast<std::uint64_t>((hi >> 64) + (p3 >> 64));
  return r;
}

Wide wide_scale(const Wide& v, std::uint64_t m) {
  Wide r;
  unsigned __int128 carry = 0;
  for (int i = 0; i < 4; ++i) {
    unsigned __int128 p = static_cast<unsigned __int128>(v.w[i]) * m + carry;
    r.w[i] = static_cast<std::uint64_t>(p);
    carry = p >> 64;
  }
  return r;  // inputs here never need a fifth limb
}

int wide_cmp(const Wide& a, const Wide& b) {
  for (int i = 3; i >= 0; --i) {
    if (a.w[i] != b.w[i]) return a.w[i] < b.w[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace

std::pair<BinaryImage, int> threshold_otsu(const GrayImage& img) {
  std::uint64_t hist[256] = {};
  for (std::uint8_t v : img.pixels) ++hist[v];
  int nonzero = 0;
  for (int i = 0; i < 256; ++i) nonzero += hist[i] != 0;
  if (nonzero < 2) raise(Err::NoContrast, "image has a single intensity");

  const std::uint64_t total = img.pixels.size();
  std::uint64_t wsum = 0;
  for (int i = 0; i < 256; ++i) wsum += hist[i] * static_cast<std::uint64_t>(i);

  // Maximize sigma_b^2(t) = (S*w0 - T*s0)^2 / (w0*(T-w0)); compare candidates
  // by cross-multiplication so ties and orderings are exact. Ties keep the
  // lowest level because only strictly greater candidates replace the best.
  int best_level = 0;
  unsigned __int128 best_num = 0;  // |S*w0 - T*s0|, squared lazily
  std::uint64_t best_den = 1;
  bool have_best = false;
  std::uint64_t w0 = 0, s0 = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    if (w0 == 0 || w0 == total) continue;
    const __int128 a = static_cast<__int128>(wsum) * w0 -
                       static_cast<__int128>(total) * s0;
    const unsigned __int128 absa =
        a < 0 ? static_cast<unsigned __int128>(-a) : static_cast<unsigned __int128>(a);
    const std::uint64_t den = w0 * (total - w0);  // fits: both factors < 2^32
    if (!have_best) {
      best_num = absa;
      best_den = den;
      best_level = t;
      have_best = true;
      continue;
    }
    const Wide lhs = wide_scale(wide_mul_u128(absa, absa), best_den);
    const Wide rhs = wide_scale(wide_mul_u128(best_num, best_num), den);
    if (wide_cmp(lhs, rhs) > 0) {
      best_num = absa;
      best_den = den;
      best_level = t;
    }
  }
  return {threshold_fixed(img, best_level), best_level};
}

BinaryImage threshold_fixed(const GrayImage& img, int level) {
  BinaryImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    out.pixels[i] = img.pixels[i] > level ? 1 : 0;
  return out;
}

namespace {

// 8-connected flood fill from (x0, y0); returns the component's pixels.
std::vector<int> flood8(const BinaryImage& bin, std::vector<std::uint8_t>& seen,
                        int x0, int y0) {
  const int w = bin.width;
  const int h = bin.height;
  std::vector<int> comp;
  std::vector<int> stack{y0 * w + x0};
  seen[static_cast<std::size_t>(y0) * w + x0] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    comp.push_back(i);
    const int x = i % w;
    const int y = i / w;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (bin.pixels[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(static_cast<int>(j));
        }
      }
  }
  return comp;
}

}  // namespace

BinaryImage remove_small_components(const BinaryImage& bin, int min_area) {
  BinaryImage out = bin;
  std::vector<std::uint8_t> seen(bin.pixels.size(), 0);
  for (int y = 0; y < bin.height; ++y)
    for (int x = 0; x < bin.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * bin.width + x;
      if (!bin.pixels[i] || seen[i]) continue;
      const std::vector<int> comp = flood8(bin, seen, x, y);
      if (static_cast<int>(comp.size()) < min_area)
        for (int j : comp) out.pixels[j] = 0;
    }
  return out;
}

namespace {

inline int px(const BinaryImage& b, int x, int y) {
  if (x < 0 || x >= b.width || y < 0 || y >= b.height) return 0;
  return b.pixels[static_cast<std::size_t>(y) * b.width + x];
}

// True when the set neighbors of (x, y) form one 8-connected group without
// the center, so deleting the pixel cannot split the skeleton.
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
#pragma omp parallel for schedule(static) reduction(||: any)
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
  // The crossing number above ignores the diagonal adjacency between edge
  // neighbors, so staircase junctions can keep 2x2 blocks. Delete block
  // members whose removal provably preserves connectivity, serially so a
  // block never loses two pixels at once.
  bool swept = true;
  while (swept) {
    swept = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!px(cur, x, y) || !in_filled_block(cur, x, y)) continue;
        if (!ring_connected_once(cur, x, y)) continue;
        if (px(cur, x, y - 1) && px(cur, x + 1, y) && px(cur, x, y + 1) &&
            px(cur, x - 1, y))
          continue;  // fully 4-surrounded: deletion would open a hole
        cur.pixels[static_cast<std::size_t>(y) * w + x] = 0;
        swept = true;
      }
  }
  return cur;
}

BinaryImage prune(const BinaryImage& skel, int max_spur) {
  BinaryImage cur = skel;
  const int w = cur.width;
  const int h = cur.height;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> deg(cur.pixels.size(), 0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!px(cur, x, y)) continue;
        int d = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            if ((dx || dy) && px(cur, x + dx, y + dy)) ++d;
        deg[static_cast<std::size_t>(y) * w + x] = d;
      }

    // Spur = a chain of non-junction pixels that ends at an endpoint and
    // attaches to a junction. Chains between two endpoints (bare paths),
    // loops, and internal segments survive; junction pixels are never removed.
    BinaryImage chains = cur;
    for (std::size_t i = 0; i < chains.pixels.size(); ++i)
      if (deg[i] >= 3) chains.pixels[i] = 0;

    std::vector<std::uint8_t> seen(chains.pixels.size(), 0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!chains.pixels[i] || seen[i]) continue;
        const std::vector<int> piece = flood8(chains, seen, x, y);
        bool has_end = false;
        bool touches_junction = false;
        for (int j : piece) {
          if (deg[j] == 1) has_end = true;
          const int jx = j % w;
          const int jy = j / w;
          for (int dy = -1; dy <= 1 && !touches_junction; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const int nx = jx + dx;
              const int ny = jy + dy;
              if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
              if (px(cur, nx, ny) &&
                  deg[static_cast<std::size_t>(ny) * w + nx] >= 3) {
                touches_junction = true;
                break;
              }
            }
        }
        if (has_end && touches_junction &&
            static_cast<int>(piece.size()) <= max_spur) {
          for (int j : piece) cur.pixels[j] = 0;
          changed = true;
        }
      }
  }
  return cur;
}

BinaryImage preprocess_pipeline(const GrayImage& img, const PipelineConfig& cfg) {
  GrayImage g = subtract_background(
      img, StructuringElement::disk(cfg.background_se_radius));
  g = contrast_stretch(g);
  g = smooth(g, cfg.smoothing_sigma);
  g = wiener_filter(g, cfg.wiener_window);
  if (cfg.matched_filter.enabled) g = matched_filter(g, cfg.matched_filter);
  BinaryImage b = cfg.threshold_mode == ThresholdMode::Otsu
                      ? threshold_otsu(g).first
                      : threshold_fixed(g, cfg.fixed_level);
  b = remove_small_components(b, cfg.min_component_area);
  b = thin(b);
  return prune(b, cfg.prune_length);
}

}  // namespace vf
