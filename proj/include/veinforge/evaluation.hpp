#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "veinforge/matching.hpp"
#include "veinforge/raster.hpp"

namespace vf {

struct TrialCounts {
  std::uint64_t impostor_attempts = 0;
  std::uint64_t impostor_accepts = 0;
  std::uint64_t genuine_attempts = 0;
  std::uint64_t genuine_rejects = 0;
};

// Exact rational divisions; both raise NoAttempts on an empty denominator.
double far(const TrialCounts& c);
double frr(const TrialCounts& c);

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct SweepResult {
  std::vector<RocPoint> points;  // thresholds ascending, -inf and +inf included
  double eer = 0.0;
  double eer_threshold = 0.0;
};

// Scores are distances: accept means score <= threshold.
SweepResult sweep_thresholds(const std::vector<double>& genuine,
                             const std::vector<double>& impostor);

struct EvalRow {
  int n_images = 0;
  double far = 0.0;
  double frr = 0.0;
};

struct EvalReport {
  std::string method;
  double threshold = 0.0;  // threshold applied to the largest row
  double eer = 0.0;        // EER of the largest row's sweep
  std::vector<EvalRow> rows;
};

struct TimingRow {
  int n_images = 0;
  double pixel_seconds = 0.0;
  double qif_seconds = 0.0;
  double speedup = 0.0;
};

struct TimingTable {
  std::vector<TimingRow> rows;
};

struct DatasetEntry {
  std::string label;
  BinaryImage skeleton;
};

using Dataset = std::vector<DatasetEntry>;

enum class Method { Qif, Pixel };

struct ExperimentOptions {
  Method method = Method::Qif;
  double tau = 0.95;
  std::optional<double> threshold;  // unset: per-row equal-error threshold
  std::vector<int> row_sizes = {20, 40, 60, 80, 100};
};

// Per row size n: take the first n dataset entries, hold out the last 20%
// of identities (by first appearance) as impostors, enroll the first sample
// of each remaining identity, probe the rest as genuine and every withheld
// sample as impostor. Vein-gate failures score +infinity.
EvalReport run_experiment(const Dataset& dataset, const ExperimentOptions& opts);

// Matching-phase wall clock (projection + distance loops vs pixel loops),
// median over repetitions, deliberately single-threaded.
TimingTable bench_timing(const Dataset& dataset, const std::vector<int>& sizes,
                         int repetitions);

void emit_csv(const EvalReport& report, const std::string& path);
void emit_csv(const TimingTable& table, const std::string& path);
EvalReport parse_eval_csv(const std::string& path);
TimingTable parse_timing_csv(const std::string& path);

}  // namespace vf
