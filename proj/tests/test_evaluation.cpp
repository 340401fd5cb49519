#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "veinforge/detmath.hpp"
#include "veinforge/evaluation.hpp"
#include "veinforge/synthgen.hpp"
#include "test_util.hpp"

using namespace vf;

namespace {

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

BinaryImage random_skeleton(Xorshift64Star& rng, int n_points) {
  std::vector<Coord> pts;
  while (static_cast<int>(pts.size()) < n_points) {
    pts.push_back({rng.uniform_int(0, 31), rng.uniform_int(0, 23)});
    pts = CoordinateList::from_unordered(pts).points;
  }
  CoordinateList list;
  list.points = pts;
  return rasterize(list, 32, 24);
}

const Dataset& synth_dataset() {
  static const Dataset dataset = [] {
    SynthSpec spec;
    spec.width = 120;
    spec.height = 96;
    spec.n_subjects = 8;
    spec.samples_per_subject = 3;
    Dataset d;
    for (const LabeledSample& ls : gen_dataset(spec))
      d.push_back({ls.label, ls.truth});
    return d;
  }();
  return dataset;
}

}  // namespace

TEST_CASE("far and frr are exact rational rates") {
  TrialCounts c;
  c.impostor_attempts = 20;
  c.impostor_accepts = 2;
  c.genuine_attempts = 100;
  c.genuine_rejects = 3;
  CHECK(far(c) == 0.1);
  CHECK(frr(c) == 0.03);
  CHECK(fmt4(far(c)) == "0.1000");
  CHECK(fmt4(frr(c)) == "0.0300");

  c.impostor_accepts = 0;
  c.genuine_rejects = 0;
  CHECK(far(c) == 0.0);
  CHECK(frr(c) == 0.0);

  TrialCounts none;
  CHECK(tu::code_of([&] { far(none); }) == Err::NoAttempts);
  CHECK(tu::code_of([&] { frr(none); }) == Err::NoAttempts);
}

TEST_CASE("sweep_thresholds pins the crossover on hand-traced score sets") {
  // cleanly separated: zero-error threshold sits on the last genuine score
  const SweepResult sep = sweep_thresholds({1.0, 2.0}, {5.0, 6.0});
  CHECK(sep.eer == 0.0);
  CHECK(sep.eer_threshold == 2.0);

  // identical lists: rates cross mid-segment, linear interpolation
  const SweepResult same = sweep_thresholds({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(same.eer == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(same.eer_threshold == doctest::Approx(1.5).epsilon(1e-12));

  // exact crossing at a candidate: no interpolation
  const SweepResult exact =
      sweep_thresholds({1.0, 2.0, 3.0, 4.0, 10.0}, {5.0, 6.0, 7.0, 8.0, 9.0});
  CHECK(exact.eer == 0.2);
  CHECK(exact.eer_threshold == 5.0);
}

TEST_CASE("sweep points run from reject-everything to accept-everything") {
  Xorshift64Star rng(14);
  std::vector<double> genuine(6), impostor(9);
  for (auto& v : genuine) v = rng.uniform(0.0, 3.0);
  for (auto& v : impostor) v = rng.uniform(1.0, 5.0);
  const SweepResult sw = sweep_thresholds(genuine, impostor);

  REQUIRE(sw.points.size() >= 2);
  CHECK(std::isinf(sw.points.front().threshold));
  CHECK(sw.points.front().threshold < 0.0);
  CHECK(sw.points.front().far == 0.0);
  CHECK(sw.points.front().frr == 1.0);
  CHECK(std::isinf(sw.points.back().threshold));
  CHECK(sw.points.back().far == 1.0);
  CHECK(sw.points.back().frr == 0.0);

  for (std::size_t i = 1; i < sw.points.size(); ++i) {
    CHECK(sw.points[i].threshold > sw.points[i - 1].threshold);
    CHECK(sw.points[i].far >= sw.points[i - 1].far);
    CHECK(sw.points[i].frr <= sw.points[i - 1].frr);
  }

  CHECK(tu::code_of([&] { sweep_thresholds({}, impostor); }) ==
        Err::EmptyScoreList);
  CHECK(tu::code_of([&] { sweep_thresholds(genuine, {}); }) ==
        Err::EmptyScoreList);
}

TEST_CASE("run_experiment is deterministic on a fixed dataset") {
  ExperimentOptions opts;
  opts.row_sizes = {12, 24};
  const EvalReport a = run_experiment(synth_dataset(), opts);
  const EvalReport b = run_experiment(synth_dataset(), opts);
  REQUIRE(a.rows.size() == b.rows.size());
  CHECK(a.threshold == b.threshold);
  CHECK(a.eer == b.eer);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].n_images == b.rows[i].n_images);
    CHECK(a.rows[i].far == b.rows[i].far);
    CHECK(a.rows[i].frr == b.rows[i].frr);
  }
  CHECK(a.method == "qif");
  CHECK(run_experiment(synth_dataset(),
                       {.method = Method::Pixel, .row_sizes = {24}})
            .method == "pixel");
}

TEST_CASE("duplicate skeletons across labels push FAR to 1 at EER") {
  Xorshift64Star rng(21);
  const BinaryImage s1 = random_skeleton(rng, 14);
  const BinaryImage s2 = random_skeleton(rng, 14);
  // C reuses A's skeleton under a different label and lands in the holdout
  const Dataset dataset = {{"A", s1}, {"A", s1}, {"B", s2},
                           {"B", s2}, {"C", s1}, {"C", s1}};
  ExperimentOptions opts;
  opts.row_sizes = {6};
  const EvalReport report = run_experiment(dataset, opts);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].n_images == 6);
  CHECK(report.rows[0].far == 1.0);
  CHECK(report.rows[0].frr == 0.0);
  CHECK(report.eer == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.threshold == 0.0);
}

TEST_CASE("run_experiment agrees with a by-hand protocol replication") {
  const Dataset& dataset = synth_dataset();
  const int n = 24;

  // replicate the split: identities in first-appearance order, last 20%
  // (rounded up) withheld as impostors, first sample of the rest enrolled
  std::vector<std::string> order;
  std::map<std::string, std::vector<int>> by_label;
  for (int i = 0; i < n; ++i) {
    if (!by_label.count(dataset[i].label)) order.push_back(dataset[i].label);
    by_label[dataset[i].label].push_back(i);
  }
  const int n_id = static_cast<int>(order.size());
  const int kept = n_id - static_cast<int>(std::ceil(0.2 * n_id));
  REQUIRE(kept >= 2);

  std::vector<std::pair<std::string, CoordinateList>> samples;
  std::vector<int> genuine_idx, impostor_idx;
  for (int i = 0; i < n_id; ++i) {
    const auto& entries = by_label[order[i]];
    if (i < kept) {
      samples.push_back(
          {order[i], extract_coordinates(dataset[entries[0]].skeleton)});
      for (std::size_t s = 1; s < entries.size(); ++s)
        genuine_idx.push_back(entries[s]);
    } else {
      for (int e : entries) impostor_idx.push_back(e);
    }
  }

  const VeinSpaceModel model = train(samples, TrainOptions{.tau = 0.95});
  const double inf = std::numeric_limits<double>::infinity();
  auto score = [&](int idx, bool claimed) {
    try {
      const PairGrid grid =
          make_grid(extract_coordinates(dataset[idx].skeleton), model.dims);
      return claimed ? verify(model, grid, dataset[idx].label).distance
                     : identify(model, grid).distance;
    } catch (const Error&) {
      return inf;
    }
  };
  std::vector<double> genuine, impostor;
  for (int idx : genuine_idx) genuine.push_back(score(idx, true));
  for (int idx : impostor_idx) impostor.push_back(score(idx, false));
  REQUIRE_FALSE(genuine.empty());
  REQUIRE_FALSE(impostor.empty());

  // fixed thresholds: far/frr must match exactly
  for (double theta : {1e-6, 1.0, 1e9}) {
    ExperimentOptions opts;
    opts.threshold = theta;
    opts.row_sizes = {n};
    const EvalReport report = run_experiment(dataset, opts);
    REQUIRE(report.rows.size() == 1);
    int accepts = 0, rejects = 0;
    for (double s : impostor) accepts += s <= theta;
    for (double s : genuine) rejects += s > theta;
    CHECK(report.rows[0].far ==
          static_cast<double>(accepts) / impostor.size());
    CHECK(report.rows[0].frr == static_cast<double>(rejects) / genuine.size());
    CHECK(report.threshold == theta);
  }

  // default threshold: the row runs at its own equal-error point
  ExperimentOptions dflt;
  dflt.row_sizes = {n};
  const EvalReport report = run_experiment(dataset, dflt);
  const SweepResult sweep = sweep_thresholds(genuine, impostor);
  CHECK(report.eer == sweep.eer);
  CHECK(report.threshold == sweep.eer_threshold);
}

TEST_CASE("run_experiment skips undersized and oversized rows") {
  ExperimentOptions opts;
  opts.row_sizes = {1, 24, 9999};
  const EvalReport report = run_experiment(synth_dataset(), opts);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].n_images == 24);

  // two identities leave a single enrollable one after the 20% holdout
  Xorshift64Star rng(22);
  const Dataset two = {{"A", random_skeleton(rng, 12)},
                       {"A", random_skeleton(rng, 12)},
                       {"B", random_skeleton(rng, 12)},
                       {"B", random_skeleton(rng, 12)}};
  ExperimentOptions small;
  small.row_sizes = {4};
  CHECK(run_experiment(two, small).rows.empty());

  const Dataset unlabeled = {{"", random_skeleton(rng, 12)},
                             {"A", random_skeleton(rng, 12)}};
  ExperimentOptions bad;
  bad.row_sizes = {2};
  CHECK(tu::code_of([&] { run_experiment(unlabeled, bad); }) ==
        Err::ProtocolViolation);
}

TEST_CASE("emit_csv writes the documented byte-exact table") {
  tu::TempDir dir;
  EvalReport report;
  report.method = "qif";
  report.rows = {{20, 0.05, 0.06}};
  const std::string path = dir / "r.csv";
  emit_csv(report, path);
  CHECK(tu::slurp(path) == "n_images,far,frr\n20,0.0500,0.0600\n");

  EvalReport empty;
  emit_csv(empty, dir / "e.csv");
  CHECK(tu::slurp(dir / "e.csv") == "n_images,far,frr\n");
}

TEST_CASE("eval csv round-trips through parse") {
  tu::TempDir dir;
  EvalReport report;
  report.rows = {{20, 0.05, 0.06}, {40, 0.1, 0.125}, {100, 0.0, 1.0}};
  const std::string path = dir / "round.csv";
  emit_csv(report, path);
  const EvalReport back = parse_eval_csv(path);
  REQUIRE(back.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.rows[i].n_images == report.rows[i].n_images);
    CHECK(back.rows[i].far == report.rows[i].far);
    CHECK(back.rows[i].frr == report.rows[i].frr);
  }

  tu::spew(dir / "blank.csv", "n_images,far,frr\n\n20,0.0500,0.0600\n\n");
  CHECK(parse_eval_csv(dir / "blank.csv").rows.size() == 1);

  tu::spew(dir / "bad_header.csv", "n,far,frr\n");
  CHECK(tu::code_of([&] { parse_eval_csv(dir / "bad_header.csv"); }) ==
        Err::IoFailure);
  tu::spew(dir / "bad_row.csv", "n_images,far,frr\n20,0.0500\n");
  CHECK(tu::code_of([&] { parse_eval_csv(dir / "bad_row.csv"); }) ==
        Err::IoFailure);
  CHECK(tu::code_of([&] { parse_eval_csv(dir / "absent.csv"); }) ==
        Err::IoFailure);
}

TEST_CASE("timing csv round-trips with three-decimal seconds") {
  tu::TempDir dir;
  TimingTable table;
  table.rows = {{100, 1.5, 0.5, 3.0}, {200, 0.25, 0.125, 2.0}};
  const std::string path = dir / "t.csv";
  emit_csv(table, path);
  CHECK(tu::slurp(path) ==
        "n_images,pixel_seconds,qif_seconds,speedup\n"
        "100,1.500,0.500,3.000\n200,0.250,0.125,2.000\n");
  const TimingTable back = parse_timing_csv(path);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].pixel_seconds == 1.5);
  CHECK(back.rows[1].speedup == 2.0);
  CHECK(back.rows[1].n_images == 200);
}

TEST_CASE("bench_timing reports positive medians and their ratio") {
  Xorshift64Star rng(23);
  Dataset dataset;
  for (int i = 0; i < 4; ++i)
    dataset.push_back({"s" + std::to_string(i), random_skeleton(rng, 14)});

  const TimingTable table = bench_timing(dataset, {3, 4}, 3);
  REQUIRE(table.rows.size() == 2);
  for (const TimingRow& row : table.rows) {
    CHECK(row.pixel_seconds >= 1e-9);
    CHECK(row.qif_seconds >= 1e-9);
    CHECK(row.speedup ==
          doctest::Approx(row.pixel_seconds / row.qif_seconds).epsilon(1e-12));
  }
  CHECK(table.rows[0].n_images == 3);

  CHECK(tu::code_of([&] { bench_timing(dataset, {3}, 2); }) ==
        Err::InsufficientData);
  CHECK(tu::code_of([&] { bench_timing(dataset, {5}, 3); }) ==
        Err::InsufficientData);
  CHECK(tu::code_of([&] { bench_timing(dataset, {1}, 3); }) ==
        Err::InsufficientData);
}
