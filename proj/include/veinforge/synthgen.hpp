#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veinforge/raster.hpp"

namespace vf {

struct JitterSpec {
  double translation = 3.0;   // px, uniform +/- per sample
  double rotation_deg = 2.0;  // degrees, uniform +/- per sample
  double noise_sigma = 8.0;   // intensity units
};

struct SynthSpec {
  int width = 320;
  int height = 240;
  int n_subjects = 20;
  int samples_per_subject = 5;
  int branch_depth = 4;  // 1 = root stems only
  double branch_angle_jitter_deg = 10.0;
  JitterSpec jitter;
  double vein_width = 4.0;
  std::uint64_t seed = 42;

  bool valid() const;
};

struct Polyline {
  std::vector<std::pair<double, double>> pts;
};

using VeinTree = std::vector<Polyline>;

struct Sample {
  GrayImage image;
  BinaryImage truth;  // 1-px jittered centerline raster
};

struct LabeledSample {
  int subject = 0;
  int sample = 0;
  std::string label;
  GrayImage image;
  BinaryImage truth;
};

// Tube darkness at the centerline and the brightness of the scattering halo
// hugging each vein; tests audit centerline darkness against kVeinContrast.
inline constexpr double kVeinContrast = 100.0;
inline constexpr double kHaloAmplitude = 40.0;

std::uint64_t subject_tree_seed(const SynthSpec& spec, int subject);
std::uint64_t sample_stream_seed(const SynthSpec& spec, int subject, int sample);

// Recursive binary branching from 2-3 root stems near the wrist edge,
// deterministic in subject_seed, confined to the interior margin band.
VeinTree gen_vein_tree(const SynthSpec& spec, std::uint64_t subject_seed);

// Dark Gaussian-profile tubes with a bright halo on a feathered hand blob
// over a smooth illumination gradient, plus per-pixel Gaussian noise.
Sample render_sample(const SynthSpec& spec, const VeinTree& tree,
                     std::uint64_t sample_seed);

std::vector<LabeledSample> gen_dataset(const SynthSpec& spec);

// Writes subject<S>_sample<K>.pgm, gt/ copies of the centerlines, and
// manifest.csv (filename,label) under dir.
void write_dataset(const SynthSpec& spec, const std::string& dir);

}  // namespace vf
