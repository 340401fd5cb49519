// Times every parallel kernel against its plain-loop reference and checks
// the outputs agree: exactly for integer rasters, under == for doubles.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "veinforge/detmath.hpp"
#include "veinforge/linalg.hpp"
#include "veinforge/mat.hpp"
#include "veinforge/preprocess.hpp"
#include "veinforge/reference.hpp"
#include "veinforge/synthgen.hpp"
#include "veinforge/veinspace.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int reps = 3) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool all_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

int failures = 0;

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-22s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, match ? "match" : "MISMATCH");
  failures += !match;
}

}  // namespace

int main() {
  vf::SynthSpec spec;
  const vf::VeinTree tree = vf::gen_vein_tree(spec, vf::subject_tree_seed(spec, 0));
  const vf::GrayImage img =
      vf::render_sample(spec, tree, vf::sample_stream_seed(spec, 0, 0)).image;
  const vf::StructuringElement disk = vf::StructuringElement::disk(15);

  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    vf::GrayImage a, b;
    const double ts = time_ms([&] { a = vf::serial::dilate(img, disk); });
    const double tp = time_ms([&] { b = vf::dilate(img, disk); });
    row("dilate disk r=15", ts, tp, a == b);
  }
  {
    vf::GrayImage a, b;
    const double ts = time_ms([&] { a = vf::serial::erode(img, disk); });
    const double tp = time_ms([&] { b = vf::erode(img, disk); });
    row("erode disk r=15", ts, tp, a == b);
  }
  {
    vf::GrayImage a, b;
    const double ts = time_ms([&] { a = vf::serial::smooth(img, 1.0); });
    const double tp = time_ms([&] { b = vf::smooth(img, 1.0); });
    row("smooth sigma=1", ts, tp, a == b);
  }
  {
    std::vector<double> a, b;
    const double ts = time_ms([&] { a = vf::serial::wiener_response(img, 5); });
    const double tp = time_ms([&] { b = vf::wiener_response(img, 5); });
    row("wiener w=5", ts, tp, all_equal(a, b));
  }
  vf::MatchedFilterParams mf;
  {
    std::vector<double> a, b;
    const double ts =
        time_ms([&] { a = vf::serial::matched_filter_response(img, mf); }, 1);
    const double tp = time_ms([&] { b = vf::matched_filter_response(img, mf); });
    row("matched filter", ts, tp, all_equal(a, b));
  }
  {
    const vf::BinaryImage bin = vf::threshold_otsu(vf::matched_filter(img, mf)).first;
    vf::BinaryImage a, b;
    const double ts = time_ms([&] { a = vf::serial::thin(bin); });
    const double tp = time_ms([&] { b = vf::thin(bin); });
    row("thin", ts, tp, a == b);
  }

  // Dense linear algebra on synthetic training grids.
  vf::Xorshift64Star rng(7);
  const int m = 128, n = 128, imgs = 64;
  std::vector<vf::CenteredGrid> centered(imgs, vf::CenteredGrid(m, n));
  for (auto& g : centered)
    for (double& v : g.data) v = rng.uniform(-1.0, 1.0);
  vf::MeanGrid g(m, n);
  for (double& v : g.data) v = rng.uniform(0.0, 200.0);

  vf::SymMatrix cs(1), cp(1);
  {
    const double ts = time_ms([&] { cs = vf::serial::covariance(centered); });
    const double tp = time_ms([&] { cp = vf::covariance(centered); });
    row("covariance 128x64", ts, tp, all_equal(cs.a, cp.a));
  }
  {
    const vf::SymMatrix cinv = vf::pinv_psd(cp, 1e-10);
    vf::SymMatrix qa(1), qb(1);
    const double ts = time_ms([&] { qa = vf::serial::build_qif(g, cinv); });
    const double tp = time_ms([&] { qb = vf::build_qif(g, cinv); });
    row("build_qif 2N=256", ts, tp, all_equal(qa.a, qb.a));
  }
  {
    vf::Mat a(256, 256), b(256, 256);
    for (double& v : a.a) v = rng.uniform(-1.0, 1.0);
    for (double& v : b.a) v = rng.uniform(-1.0, 1.0);
    vf::Mat ra, rb;
    const double ts = time_ms([&] { ra = vf::serial::matmul(a, b); });
    const double tp = time_ms([&] { rb = vf::matmul(a, b); });
    row("matmul 256", ts, tp, all_equal(ra.a, rb.a));
  }

  if (failures) {
    std::printf("\n%d kernel(s) disagree with the reference\n", failures);
    return 1;
  }
  std::printf("\nall kernels agree with the reference\n");
  return 0;
}
