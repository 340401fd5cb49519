#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veinforge/raster.hpp"
#include "veinforge/veinspace.hpp"

namespace vf {

enum class Outcome { Accepted, RejectedNotAVein, RejectedUnknown };

struct MatchDecision {
  Outcome outcome = Outcome::RejectedUnknown;
  std::string best_label;  // empty when no candidate was scored
  double distance = 0.0;
  double vein_score = 0.0;
};

// Work counters for the complexity claims in the benchmark: vein-space
// matching reads K reals per template plus one M x 2N projection; the pixel
// baseline reads every pixel of every template.
struct OpCounters {
  std::uint64_t reals_touched = 0;
  std::uint64_t pixels_touched = 0;
};

double euclidean(const WeightVector& a, const WeightVector& b);

// Vein-ness gate first (residual vs theta_vein), then nearest template by
// euclidean distance; ties keep the earliest enrolled. Accepted iff the
// distance is within theta_id.
MatchDecision identify(const VeinSpaceModel& model, const PairGrid& probe,
                       OpCounters* counters = nullptr);

// As identify, but the distance is measured only against the claimed
// label's templates.
MatchDecision verify(const VeinSpaceModel& model, const PairGrid& probe,
                     const std::string& claimed, OpCounters* counters = nullptr);

enum class PixelNorm { Max, Jaccard };

// Overlap count normalized by max(|A|,|B|) (or by the union for Jaccard).
double pixel_similarity(const BinaryImage& a, const BinaryImage& b,
                        PixelNorm norm = PixelNorm::Max);

MatchDecision pixel_identify(
    const std::vector<std::pair<std::string, BinaryImage>>& templates,
    const BinaryImage& probe, double theta_px, PixelNorm norm = PixelNorm::Max,
    OpCounters* counters = nullptr);

}  // namespace vf
