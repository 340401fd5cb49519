#pragma once

#include <vector>

#include "veinforge/linalg.hpp"
#include "veinforge/mat.hpp"
#include "veinforge/preprocess.hpp"
#include "veinforge/veinspace.hpp"

// Plain-loop counterparts of every parallel kernel, kept as the ground truth
// the fast paths are checked against (and timed against by bench_kernels).
// Integer kernels must agree exactly; double kernels must agree under ==,
// which the fast paths preserve by never splitting a single reduction across
// threads.
namespace vf::serial {

// Direct nested-scan morphology, a different algorithm from the run
// decomposition in the main path.
GrayImage dilate(const GrayImage& img, const StructuringElement& se);
GrayImage erode(const GrayImage& img, const StructuringElement& se);

GrayImage smooth(const GrayImage& img, double sigma);
std::vector<double> wiener_response(const GrayImage& img, int window);

// Applies each oriented kernel over its full square support including the
// zero cells the main path skips.
std::vector<double> matched_filter_response(const GrayImage& img,
                                            const MatchedFilterParams& params);

BinaryImage thin(const BinaryImage& bin);

SymMatrix covariance(const std::vector<CenteredGrid>& centered);
SymMatrix build_qif(const MeanGrid& g, const SymMatrix& c_inv);
Mat matmul(const Mat& a, const Mat& b);

}  // namespace vf::serial
