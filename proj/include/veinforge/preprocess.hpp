#pragma once

#include <utility>
#include <vector>

#include "veinforge/raster.hpp"

namespace vf {

// Binary morphology mask with odd dimensions and a set center cell.
struct StructuringElement {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;

  static StructuringElement square(int side);
  static StructuringElement cross(int radius);
  // Flat disk: cells with dx*dx + dy*dy <= radius*radius.
  static StructuringElement disk(int radius);

  bool at(int dx, int dy) const {  // dx,dy relative to center
    return mask[static_cast<std::size_t>(dy + height / 2) * width +
                (dx + width / 2)] != 0;
  }
  bool valid() const;
};

struct MatchedFilterParams {
  double sigma = 2.0;
  int length = 9;        // extent along the orientation, pixels
  int orientations = 12; // evenly spaced over 180 degrees
  bool enabled = true;
};

enum class ThresholdMode { Otsu, Fixed };

struct PipelineConfig {
  int background_se_radius = 15;
  double smoothing_sigma = 1.0;
  int wiener_window = 5;
  MatchedFilterParams matched_filter;
  ThresholdMode threshold_mode = ThresholdMode::Otsu;
  int fixed_level = 128;
  int min_component_area = 50;
  int prune_length = 8;

  bool valid() const;
};

// Grayscale morphology. Out-of-bounds samples are 0 for dilate and 255 for
// erode, which keeps the complement duality testable at borders.
GrayImage dilate(const GrayImage& img, const StructuringElement& se);
GrayImage erode(const GrayImage& img, const StructuringElement& se);
// Erosion followed by dilation.
GrayImage open(const GrayImage& img, const StructuringElement& se);
// Top-hat: max(img - open(img, se), 0). The opening is the background estimate.
GrayImage subtract_background(const GrayImage& img, const StructuringElement& se);

// Linear map of [min, max] onto [0, 255], rounding half away from zero.
// A constant image maps to all-zero.
GrayImage contrast_stretch(const GrayImage& img);

// Local adaptive Wiener filter: per-pixel mean/variance over a window
// (clamp-to-edge), noise power = mean of all local variances, gain
// max(var-noise,0)/max(var,noise). The double-precision response is exposed
// so tests can check the statistics before quantization.
std::vector<double> wiener_response(const GrayImage& img, int window);
GrayImage wiener_filter(const GrayImage& img, int window);

// Oriented zero-mean kernels with an inverted-Gaussian cross-profile; dark
// lines respond positively. Output is the per-pixel max response over all
// orientations, rescaled to [0, 255].
struct MatchedKernel {
  int radius = 0;                // square support of side 2*radius+1
  std::vector<double> weights;   // zero outside the oriented support
  double at(int dx, int dy) const {
    return weights[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) +
                   (dx + radius)];
  }
};
MatchedKernel matched_kernel(double sigma, int length, double angle_rad);
std::vector<double> matched_filter_response(const GrayImage& img,
                                            const MatchedFilterParams& params);
GrayImage matched_filter(const GrayImage& img, const MatchedFilterParams& params);

// Separable Gaussian blur; kernel truncated at radius ceil(3*sigma) and
// normalized to sum 1; clamp-to-edge boundary; quantized once at the end.
GrayImage smooth(const GrayImage& img, double sigma);

// Threshold level maximizing between-class variance over all 256 candidates
// (exact integer arithmetic, ties toward the lowest level). Foreground is
// intensity > level. Throws NoContrast for constant images.
std::pair<BinaryImage, int> threshold_otsu(const GrayImage& img);
BinaryImage threshold_fixed(const GrayImage& img, int level);

// Clears 8-connected foreground components with fewer than min_area pixels.
BinaryImage remove_small_components(const BinaryImage& bin, int min_area);

// Zhang-Suen iterative thinning run to fixpoint, then an exact-connectivity
// sweep that clears the 2x2 staircase blocks Zhang-Suen leaves at junctions.
// The result never contains a fully set 2x2 block.
BinaryImage thin(const BinaryImage& bin);

// Removes junction-terminated spur branches of length <= max_spur. Longer
// branches, endpoint-to-endpoint paths, loops, and junction pixels survive.
BinaryImage prune(const BinaryImage& skel, int max_spur);

// Full stage composition: subtract_background -> contrast_stretch -> smooth
// -> wiener -> matched filter (if enabled) -> threshold -> component cleanup
// -> thin -> prune.
BinaryImage preprocess_pipeline(const GrayImage& img, const PipelineConfig& cfg);

}  // namespace vf
