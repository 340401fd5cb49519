#include "veinforge/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "veinforge/common.hpp"
#include "veinforge/detmath.hpp"

namespace vf {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

// Horizontal margin the tree may never leave, as a fraction of the width.
constexpr double kTreeMargin = 0.05;

// Superellipse half-extents of the hand blob relative to the image, and the
// width of its feathered rim in superellipse units. The rim must fall gently:
// a steep silhouette edge turns into a line-like band after background
// subtraction and the line detector traces it instead of veins. At this
// extent the silhouette leaves the frame except for a soft corner vignette.
constexpr double kHandExtent = 0.62;
constexpr double kHandFeather = 0.5;

constexpr double kHaloSigma = 7.0;
constexpr double kFloor = 150.0;   // background level outside the hand
constexpr double kHandBase = 190.0;

struct Segment {
  double ax, ay, bx, by;
};

double clampd(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace

bool SynthSpec::valid() const {
  return width >= 64 && height >= 64 && n_subjects >= 1 &&
         samples_per_subject >= 1 && branch_depth >= 1 &&
         branch_angle_jitter_deg >= 0.0 && jitter.translation >= 0.0 &&
         jitter.rotation_deg >= 0.0 && jitter.noise_sigma >= 0.0 &&
         vein_width >= 1.0 && vein_width <= 16.0;
}

std::uint64_t subject_tree_seed(const SynthSpec& spec, int subject) {
  // Sample streams use sample indices < 2^32, so this never collides.
  return stream_seed(spec.seed, static_cast<std::uint64_t>(subject),
                     0xFFFFFFFFULL);
}

std::uint64_t sample_stream_seed(const SynthSpec& spec, int subject,
                                 int sample) {
  return stream_seed(spec.seed, static_cast<std::uint64_t>(subject),
                     static_cast<std::uint64_t>(sample));
}

VeinTree gen_vein_tree(const SynthSpec& spec, std::uint64_t subject_seed) {
  if (!spec.valid()) raise(Err::InvalidSpec, "gen_vein_tree: bad SynthSpec");
  Xorshift64Star rng(subject_seed);

  const double W = spec.width, H = spec.height;
  const double xlo = kTreeMargin * W, xhi = W - 1 - kTreeMargin * W;
  const double step = 6.0;

  // Subject-level shape: where the bundle sits horizontally, how far the
  // whole tree leans, and how widely branches fork. Per-sample jitter never
  // touches these, so they are what tells subjects apart.
  const double anchor = 0.5 * (W - 1) + rng.uniform(-1.0, 1.0) * 0.30 * W;
  const double lean = rng.uniform(-1.0, 1.0) * 11.0 * kDegToRad;
  const double split_base = rng.uniform(10.0, 24.0);
  const int n_roots = rng.uniform_int(2, 3);
  const double root_len = H * rng.uniform(0.46, 0.55);

  VeinTree tree;

  // Depth-first growth; the draw order is part of the deterministic stream.
  const auto grow = [&](auto&& self, double x, double y, double heading,
                        double len, int level) -> void {
    Polyline line;
    line.pts.emplace_back(x, y);
    const int n_steps = std::max(2, static_cast<int>(std::lround(len / step)));
    for (int i = 0; i < n_steps; ++i) {
      heading += rng.uniform(-1.0, 1.0) * 4.0 * kDegToRad;
      x = clampd(x + step * det_cos(heading), xlo, xhi);
      y += step * det_sin(heading);  // may leave the frame; the renderer clips
      line.pts.emplace_back(x, y);
    }
    tree.push_back(std::move(line));
    if (level + 1 >= spec.branch_depth) return;
    const double split_a =
        (split_base + spec.branch_angle_jitter_deg * rng.uniform(-1.0, 1.0)) *
        kDegToRad;
    const double split_b =
        (split_base + spec.branch_angle_jitter_deg * rng.uniform(-1.0, 1.0)) *
        kDegToRad;
    self(self, x, y, heading - split_a, len * 0.72, level + 1);
    self(self, x, y, heading + split_b, len * 0.72, level + 1);
  };

  for (int r = 0; r < n_roots; ++r) {
    // Roots start just below the frame and run past the top, so whatever the
    // pose jitter, the visible window always sees a full-height slice of the
    // same pattern.
    const double x0 =
        clampd(anchor + rng.uniform(-1.0, 1.0) * 0.06 * W, xlo, xhi);
    const double y0 = H * (1.02 + 0.06 * rng.uniform(0.0, 1.0));
    const double heading =
        -0.5 * kPi + lean + rng.uniform(-1.0, 1.0) * 6.0 * kDegToRad;
    grow(grow, x0, y0, heading, root_len, 0);
  }
  return tree;
}

Sample render_sample(const SynthSpec& spec, const VeinTree& tree,
                     std::uint64_t sample_seed) {
  if (!spec.valid()) raise(Err::InvalidSpec, "render_sample: bad SynthSpec");
  const int W = spec.width, H = spec.height;
  Xorshift64Star rng(sample_seed);

  // Per-sample pose jitter about the image center.
  const double dx = rng.uniform(-spec.jitter.translation, spec.jitter.translation);
  const double dy = rng.uniform(-spec.jitter.translation, spec.jitter.translation);
  const double rot =
      rng.uniform(-spec.jitter.rotation_deg, spec.jitter.rotation_deg) *
      kDegToRad;
  const double rc = det_cos(rot), rs = det_sin(rot);
  const double cx = (W - 1) * 0.5, cy = (H - 1) * 0.5;

  // Per-sample illumination gradient coefficients.
  const double ga = rng.uniform(-25.0, 25.0);
  const double gb = rng.uniform(-25.0, 25.0);
  const double gc = rng.uniform(-15.0, 15.0);

  const auto place = [&](double px, double py) {
    const double ux = px - cx, uy = py - cy;
    return std::pair<double, double>{rc * ux - rs * uy + cx + dx,
                                     rs * ux + rc * uy + cy + dy};
  };

  std::vector<Segment> segs;
  for (const Polyline& line : tree) {
    for (std::size_t i = 1; i < line.pts.size(); ++i) {
      const auto [ax, ay] = place(line.pts[i - 1].first, line.pts[i - 1].second);
      const auto [bx, by] = place(line.pts[i].first, line.pts[i].second);
      segs.push_back({ax, ay, bx, by});
    }
  }

  // Band-limited squared distance to the nearest centerline segment.
  const double band = 24.0;
  std::vector<double> d2(static_cast<std::size_t>(W) * H, 1e30);
  for (const Segment& s : segs) {
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(s.ax, s.bx) - band)));
    const int x1 = std::min(W - 1, static_cast<int>(std::ceil(std::max(s.ax, s.bx) + band)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(s.ay, s.by) - band)));
    const int y1 = std::min(H - 1, static_cast<int>(std::ceil(std::max(s.ay, s.by) + band)));
    const double ex = s.bx - s.ax, ey = s.by - s.ay;
    const double ee = ex * ex + ey * ey;
    for (int y = y0; y <= y1; ++y) {
      double* row = d2.data() + static_cast<std::size_t>(y) * W;
      for (int x = x0; x <= x1; ++x) {
        const double px = x - s.ax, py = y - s.ay;
        const double t = ee > 0.0 ? clampd((px * ex + py * ey) / ee, 0.0, 1.0) : 0.0;
        const double qx = px - t * ex, qy = py - t * ey;
        const double dd = qx * qx + qy * qy;
        if (dd < row[x]) row[x] = dd;
      }
    }
  }

  const double sigma_v = spec.vein_width * 0.5;
  const double inv2sv = 1.0 / (2.0 * sigma_v * sigma_v);
  const double inv2sh = 1.0 / (2.0 * kHaloSigma * kHaloSigma);
  const double band2 = band * band;
  const double hand_rx = kHandExtent * W, hand_ry = kHandExtent * H;

  Sample out;
  out.image = GrayImage(W, H);
  // The noise stream is drawn per pixel in raster order, so rendering stays
  // strictly serial.
  for (int y = 0; y < H; ++y) {
    const double gyn = static_cast<double>(y) / (H - 1) - 0.5;
    for (int x = 0; x < W; ++x) {
      const double hx = (x - cx) / hand_rx, hy = (y - cy) / hand_ry;
      const double hx2 = hx * hx, hy2 = hy * hy;
      const double sE = hx2 * hx2 + hy2 * hy2;
      const double t = clampd((1.0 - sE) / kHandFeather, 0.0, 1.0);
      const double f = t * t * (3.0 - 2.0 * t);
      const double gxn = static_cast<double>(x) / (W - 1) - 0.5;
      const double illum = kHandBase + ga * gxn + gb * gyn + gc * gxn * gyn;
      double v = kFloor + f * (illum - kFloor);
      const double dd = d2[static_cast<std::size_t>(y) * W + x];
      if (dd < band2) {
        v += kHaloAmplitude * det_exp_neg(dd * inv2sh) -
             kVeinContrast * det_exp_neg(dd * inv2sv);
      }
      v += spec.jitter.noise_sigma * rng.gauss();
      out.image.at(x, y) =
          static_cast<std::uint8_t>(std::lround(clampd(v, 0.0, 255.0)));
    }
  }

  // Ground truth: the jittered centerline rasterized one pixel wide.
  out.truth = BinaryImage(W, H);
  for (const Segment& s : segs) {
    const double ex = s.bx - s.ax, ey = s.by - s.ay;
    const double len = std::sqrt(ex * ex + ey * ey);
    const int n = std::max(1, static_cast<int>(std::ceil(len / 0.4)));
    for (int i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      const int xi = static_cast<int>(std::lround(s.ax + t * ex));
      const int yi = static_cast<int>(std::lround(s.ay + t * ey));
      if (xi >= 0 && xi < W && yi >= 0 && yi < H) out.truth.at(xi, yi) = 1;
    }
  }
  return out;
}

std::vector<LabeledSample> gen_dataset(const SynthSpec& spec) {
  if (!spec.valid()) raise(Err::InvalidSpec, "gen_dataset: bad SynthSpec");
  std::vector<LabeledSample> out;
  out.reserve(static_cast<std::size_t>(spec.n_subjects) *
              spec.samples_per_subject);
  for (int subj = 0; subj < spec.n_subjects; ++subj) {
    const VeinTree tree = gen_vein_tree(spec, subject_tree_seed(spec, subj));
    for (int samp = 0; samp < spec.samples_per_subject; ++samp) {
      Sample s = render_sample(spec, tree, sample_stream_seed(spec, subj, samp));
      LabeledSample ls;
      ls.subject = subj;
      ls.sample = samp;
      ls.label = std::to_string(subj);
      ls.image = std::move(s.image);
      ls.truth = std::move(s.truth);
      out.push_back(std::move(ls));
    }
  }
  return out;
}

void write_dataset(const SynthSpec& spec, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "gt", ec);
  if (ec) raise(Err::IoFailure, "write_dataset: cannot create " + dir);

  const std::vector<LabeledSample> data = gen_dataset(spec);
  std::ofstream manifest(fs::path(dir) / "manifest.csv", std::ios::binary);
  if (!manifest) raise(Err::IoFailure, "write_dataset: cannot open manifest");
  manifest << "filename,label\n";
  for (const LabeledSample& ls : data) {
    char name[64];
    std::snprintf(name, sizeof(name), "subject%d_sample%d.pgm", ls.subject,
                  ls.sample);
    save_pgm(ls.image, (fs::path(dir) / name).string());
    save_pgm(to_gray(ls.truth), (fs::path(dir) / "gt" / name).string());
    manifest << name << ',' << ls.label << '\n';
  }
  if (!manifest.flush()) raise(Err::IoFailure, "write_dataset: manifest write");
}

}  // namespace vf
