#include "veinforge/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "veinforge/common.hpp"
#include "veinforge/veinspace.hpp"

namespace vf {

double far(const TrialCounts& c) {
  if (c.impostor_attempts == 0) raise(Err::NoAttempts, "no impostor attempts");
  return static_cast<double>(c.impostor_accepts) /
         static_cast<double>(c.impostor_attempts);
}

double frr(const TrialCounts& c) {
  if (c.genuine_attempts == 0) raise(Err::NoAttempts, "no genuine attempts");
  return static_cast<double>(c.genuine_rejects) /
         static_cast<double>(c.genuine_attempts);
}

SweepResult sweep_thresholds(const std::vector<double>& genuine,
                             const std::vector<double>& impostor) {
  if (genuine.empty() || impostor.empty())
    raise(Err::EmptyScoreList, "sweep needs both score lists");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cand;
  cand.reserve(genuine.size() + impostor.size() + 2);
  cand.push_back(-inf);
  cand.insert(cand.end(), genuine.begin(), genuine.end());
  cand.insert(cand.end(), impostor.begin(), impostor.end());
  cand.push_back(inf);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  SweepResult out;
  out.points.reserve(cand.size());
  for (double theta : cand) {
    double fa = 0.0, fr = 0.0;
    for (double s : impostor) fa += s <= theta;
    for (double s : genuine) fr += s > theta;
    out.points.push_back(
        {theta, fa / impostor.size(), fr / genuine.size()});
  }

  // FAR-FRR is non-decreasing along the sweep: locate the sign change and
  // interpolate linearly inside the bracketing segment.
  std::size_t hi = 0;
  while (hi < out.points.size() && out.points[hi].far < out.points[hi].frr) ++hi;
  if (hi == 0) {
    out.eer = out.points.front().far;
    out.eer_threshold = out.points.front().threshold;
    return out;
  }
  const RocPoint& a = out.points[hi - 1];
  const RocPoint& b = out.points[hi];
  if (b.far == b.frr) {
    out.eer = b.far;
    out.eer_threshold = b.threshold;
    return out;
  }
  const double denom = (b.far - a.far) - (b.frr - a.frr);
  const double t = denom != 0.0 ? (a.frr - a.far) / denom : 0.0;
  out.eer = a.far + t * (b.far - a.far);
  out.eer_threshold =
      std::isinf(a.threshold) || std::isinf(b.threshold)
          ? (std::isinf(b.threshold) ? a.threshold : b.threshold)
          : a.threshold + t * (b.threshold - a.threshold);
  return out;
}

namespace {

struct RowSplit {
  // enrollment (label, entry index) per kept identity, then probe lists
  std::vector<std::pair<std::string, int>> enrolled;
  std::vector<int> genuine_probes;
  std::vector<int> impostor_probes;
};

RowSplit split_prefix(const Dataset& dataset, int n) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<int>> by_label;
  for (int i = 0; i < n; ++i) {
    const std::string& label = dataset[i].label;
    if (label.empty()) raise(Err::ProtocolViolation, "entry with empty label");
    if (!by_label.count(label)) order.push_back(label);
    by_label[label].push_back(i);
  }

  const int n_id = static_cast<int>(order.size());
  const int withheld =
      static_cast<int>(std::ceil(0.2 * static_cast<double>(n_id)));
  const int kept = n_id - withheld;

  RowSplit split;
  for (int i = 0; i < n_id; ++i) {
    const std::vector<int>& samples = by_label[order[i]];
    if (i < kept) {
      split.enrolled.push_back({order[i], samples.front()});
      for (std::size_t s = 1; s < samples.size(); ++s)
        split.genuine_probes.push_back(samples[s]);
    } else {
      for (int s : samples) split.impostor_probes.push_back(s);
    }
  }
  return split;
}

double safe_rate(std::uint64_t hits, std::uint64_t attempts) {
  return attempts == 0 ? 0.0 : static_cast<double>(hits) / attempts;
}

}  // namespace

EvalReport run_experiment(const Dataset& dataset, const ExperimentOptions& opts) {
  const double inf = std::numeric_limits<double>::infinity();
  EvalReport report;
  report.method = opts.method == Method::Qif ? "qif" : "pixel";

  std::vector<int> sizes = opts.row_sizes;
  std::sort(sizes.begin(), sizes.end());
  for (int n : sizes) {
    if (n < 2 || n > static_cast<int>(dataset.size())) continue;
    const RowSplit split = split_prefix(dataset, n);
    if (split.enrolled.size() < 2) {
      std::fprintf(stderr, "warning: row %d has %zu enrollable identities, skipped\n",
                   n, split.enrolled.size());
      continue;
    }

    std::vector<double> genuine_scores, impostor_scores;
    double fallback_theta = 0.5;
    if (opts.method == Method::Qif) {
      std::vector<std::pair<std::string, CoordinateList>> samples;
      for (const auto& [label, idx] : split.enrolled)
        samples.push_back({label, extract_coordinates(dataset[idx].skeleton)});
      const VeinSpaceModel model = train(samples, TrainOptions{.tau = opts.tau});
      fallback_theta = model.theta_id;

      auto score_of = [&](int idx, const std::string* claimed) {
        try {
          const PairGrid grid =
              make_grid(extract_coordinates(dataset[idx].skeleton), model.dims);
          const MatchDecision dec = claimed ? verify(model, grid, *claimed)
                                            : identify(model, grid);
          return dec.distance;
        } catch (const Error&) {
          return inf;  // unmatchable probe: degenerate skeleton
        }
      };
      for (int idx : split.genuine_probes)
        genuine_scores.push_back(score_of(idx, &dataset[idx].label));
      for (int idx : split.impostor_probes)
        impostor_scores.push_back(score_of(idx, nullptr));
    } else {
      std::vector<std::pair<std::string, BinaryImage>> templates;
      for (const auto& [label, idx] : split.enrolled)
        templates.push_back({label, dataset[idx].skeleton});

      auto sim_to = [&](const BinaryImage& a, const BinaryImage& probe) {
        try {
          return pixel_similarity(a, probe);
        } catch (const Error&) {
          return 0.0;
        }
      };
      for (int idx : split.genuine_probes) {
        double best = 0.0;
        for (const auto& [label, img] : templates)
          if (label == dataset[idx].label)
            best = std::max(best, sim_to(img, dataset[idx].skeleton));
        genuine_scores.push_back(1.0 - best);
      }
      for (int idx : split.impostor_probes) {
        double best = 0.0;
        for (const auto& [label, img] : templates)
          best = std::max(best, sim_to(img, dataset[idx].skeleton));
        impostor_scores.push_back(1.0 - best);
      }
    }

    double theta;
    double row_eer = 0.0;
    const bool can_sweep = !genuine_scores.empty() && !impostor_scores.empty();
    if (can_sweep) {
      const SweepResult sweep = sweep_thresholds(genuine_scores, impostor_scores);
      row_eer = sweep.eer;
      theta = opts.threshold.value_or(sweep.eer_threshold);
    } else {
      theta = opts.threshold.value_or(fallback_theta);
    }

    std::uint64_t rejects = 0, accepts = 0;
    for (double s : genuine_scores) rejects += s > theta;
    for (double s : impostor_scores) accepts += s <= theta;
    report.rows.push_back({n, safe_rate(accepts, impostor_scores.size()),
                           safe_rate(rejects, genuine_scores.size())});
    report.threshold = theta;
    report.eer = row_eer;
  }
  return report;
}

TimingTable bench_timing(const Dataset& dataset, const std::vector<int>& sizes,
                         int repetitions) {
  if (repetitions < 3)
    raise(Err::InsufficientData, "need at least 3 repetitions");
  for (int n : sizes)
    if (n < 2 || n > static_cast<int>(dataset.size()))
      raise(Err::InsufficientData, "size exceeds dataset");

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };

  TimingTable table;
  for (int n : sizes) {
    std::vector<std::pair<std::string, CoordinateList>> samples;
    for (int i = 0; i < n; ++i)
      samples.push_back(
          {dataset[i].label, extract_coordinates(dataset[i].skeleton)});
    const VeinSpaceModel model = train(samples);

    std::vector<PairGrid> grids;
    for (int i = 0; i < n; ++i)
      grids.push_back(make_grid(samples[i].second, model.dims));

    std::vector<std::pair<std::string, BinaryImage>> templates;
    for (int i = 0; i < n; ++i)
      templates.push_back({dataset[i].label, dataset[i].skeleton});

    std::vector<double> qif_times, pixel_times;
    for (int rep = 0; rep < repetitions; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      for (const PairGrid& grid : grids) identify(model, grid);
      auto t1 = std::chrono::steady_clock::now();
      for (int i = 0; i < n; ++i)
        pixel_identify(templates, dataset[i].skeleton, 0.5);
      auto t2 = std::chrono::steady_clock::now();
      qif_times.push_back(std::chrono::duration<double>(t1 - t0).count());
      pixel_times.push_back(std::chrono::duration<double>(t2 - t1).count());
    }

    TimingRow row;
    row.n_images = n;
    row.qif_seconds = std::max(median(qif_times), 1e-9);
    row.pixel_seconds = std::max(median(pixel_times), 1e-9);
    row.speedup = row.pixel_seconds / row.qif_seconds;
    table.rows.push_back(row);
  }
  return table;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Err::IoFailure, "cannot open " + path);
  return f;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void emit_csv(const EvalReport& report, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "n_images,far,frr\n";
  char buf[96];
  for (const EvalRow& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f\n", row.n_images, row.far,
                  row.frr);
    f << buf;
  }
  if (!f) raise(Err::IoFailure, "write failed: " + path);
}

void emit_csv(const TimingTable& table, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "n_images,pixel_seconds,qif_seconds,speedup\n";
  char buf[128];
  for (const TimingRow& row : table.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.3f,%.3f,%.3f\n", row.n_images,
                  row.pixel_seconds, row.qif_seconds, row.speedup);
    f << buf;
  }
  if (!f) raise(Err::IoFailure, "write failed: " + path);
}

EvalReport parse_eval_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Err::IoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "n_images,far,frr")
    raise(Err::IoFailure, "unexpected eval csv header in " + path);
  EvalReport report;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) raise(Err::IoFailure, "bad eval csv row in " + path);
    report.rows.push_back(
        {std::stoi(fields[0]), std::stod(fields[1]), std::stod(fields[2])});
  }
  return report;
}

TimingTable parse_timing_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Err::IoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "n_images,pixel_seconds,qif_seconds,speedup")
    raise(Err::IoFailure, "unexpected timing csv header in " + path);
  TimingTable table;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) raise(Err::IoFailure, "bad timing csv row in " + path);
    table.rows.push_back({std::stoi(fields[0]), std::stod(fields[1]),
                          std::stod(fields[2]), std::stod(fields[3])});
  }
  return table;
}

}  // namespace vf
