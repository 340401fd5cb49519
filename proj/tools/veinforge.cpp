// Command-line front end. Every subcommand is a thin composition of library
// calls; no numeric logic lives here.
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "veinforge/common.hpp"
#include "veinforge/evaluation.hpp"
#include "veinforge/manifest.hpp"
#include "veinforge/matching.hpp"
#include "veinforge/modelstore.hpp"
#include "veinforge/preprocess.hpp"
#include "veinforge/raster.hpp"
#include "veinforge/synthgen.hpp"
#include "veinforge/veinspace.hpp"

namespace {

struct PipelineFlags {
  vf::PipelineConfig cfg;
  std::string threshold_mode = "otsu";
  bool no_matched_filter = false;
  bool raw = false;  // inputs are raw grayscale, run the full pipeline
};

void add_pipeline_flags(CLI::App* sub, PipelineFlags& pf, bool with_raw) {
  sub->add_option("--se-radius", pf.cfg.background_se_radius,
                  "background disk radius")->check(CLI::Range(1, 200));
  sub->add_option("--sigma", pf.cfg.smoothing_sigma, "smoothing sigma")
      ->check(CLI::PositiveNumber);
  sub->add_option("--wiener-window", pf.cfg.wiener_window, "wiener window (odd)")
      ->check(CLI::Range(3, 99));
  sub->add_option("--mf-sigma", pf.cfg.matched_filter.sigma,
                  "matched filter profile sigma")->check(CLI::PositiveNumber);
  sub->add_option("--mf-length", pf.cfg.matched_filter.length,
                  "matched filter length")->check(CLI::Range(1, 99));
  sub->add_option("--orientations", pf.cfg.matched_filter.orientations,
                  "matched filter orientations")->check(CLI::Range(1, 64));
  sub->add_flag("--no-matched-filter", pf.no_matched_filter,
                "skip the matched filter stage");
  sub->add_option("--threshold-mode", pf.threshold_mode, "otsu or fixed")
      ->check(CLI::IsMember({"otsu", "fixed"}));
  sub->add_option("--level", pf.cfg.fixed_level, "fixed threshold level")
      ->check(CLI::Range(0, 255));
  sub->add_option("--min-area", pf.cfg.min_component_area,
                  "minimum component area")->check(CLI::Range(0, 1 << 20));
  sub->add_option("--prune", pf.cfg.prune_length, "maximum spur length")
      ->check(CLI::Range(0, 1 << 20));
  if (with_raw)
    sub->add_flag("--raw", pf.raw,
                  "inputs are raw grayscale images, not skeletons");
}

vf::PipelineConfig resolve(PipelineFlags& pf) {
  pf.cfg.matched_filter.enabled = !pf.no_matched_filter;
  pf.cfg.threshold_mode = pf.threshold_mode == "fixed"
                              ? vf::ThresholdMode::Fixed
                              : vf::ThresholdMode::Otsu;
  if (!pf.cfg.valid()) throw CLI::ValidationError("pipeline flags out of range");
  return pf.cfg;
}

vf::BinaryImage load_probe(const std::string& path, const PipelineFlags& pf) {
  const vf::GrayImage img = vf::load_pgm(path);
  vf::PipelineConfig cfg = pf.cfg;
  return pf.raw ? vf::preprocess_pipeline(img, cfg) : vf::to_binary(img);
}

vf::PairGrid probe_grid(const vf::VeinSpaceModel& model,
                        const vf::BinaryImage& skel) {
  return vf::make_grid(vf::extract_coordinates(skel), model.dims);
}

std::vector<std::pair<std::string, vf::CoordinateList>> as_training_set(
    const vf::Dataset& data) {
  std::vector<std::pair<std::string, vf::CoordinateList>> out;
  out.reserve(data.size());
  for (const vf::DatasetEntry& e : data)
    out.emplace_back(e.label, vf::extract_coordinates(e.skeleton));
  return out;
}

int report_decision(const vf::MatchDecision& d) {
  switch (d.outcome) {
    case vf::Outcome::Accepted:
      std::printf("ACCEPT label=%s distance=%.6f\n", d.best_label.c_str(),
                  d.distance);
      return 0;
    case vf::Outcome::RejectedNotAVein:
      std::printf("REJECT reason=not-a-vein vein_score=%.6f\n", d.vein_score);
      return 1;
    case vf::Outcome::RejectedUnknown:
      std::printf("REJECT reason=no-match label=%s distance=%.6f\n",
                  d.best_label.c_str(), d.distance);
      return 1;
  }
  return 1;
}

std::string suffixed_report(const std::string& path, const std::string& method) {
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
    return path + "." + method + ".csv";
  return path.substr(0, dot) + "." + method + path.substr(dot);
}

int run_eval_method(const vf::Dataset& data, vf::ExperimentOptions opts,
                    const std::string& method, const std::string& report) {
  opts.method = method == "pixel" ? vf::Method::Pixel : vf::Method::Qif;
  const vf::EvalReport rep = vf::run_experiment(data, opts);
  vf::emit_csv(rep, report);
  std::printf("EVAL method=%s threshold=%.6f eer=%.4f rows=%zu report=%s\n",
              method.c_str(), rep.threshold, rep.eer, rep.rows.size(),
              report.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dorsal hand vein recognition toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags take precedence");

  int rc = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  vf::SynthSpec spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--subjects", spec.n_subjects)->check(CLI::Range(1, 10000));
  synth->add_option("--samples", spec.samples_per_subject)
      ->check(CLI::Range(1, 1000));
  synth->add_option("--seed", spec.seed, "dataset seed")
      ->envname("VEINFORGE_SEED");
  synth->add_option("--width", spec.width)->check(CLI::Range(64, 4096));
  synth->add_option("--height", spec.height)->check(CLI::Range(64, 4096));
  synth->add_option("--depth", spec.branch_depth)->check(CLI::Range(1, 10));
  synth->add_option("--angle-jitter", spec.branch_angle_jitter_deg)
      ->check(CLI::Range(0.0, 90.0));
  synth->add_option("--translation", spec.jitter.translation)
      ->check(CLI::Range(0.0, 50.0));
  synth->add_option("--rotation", spec.jitter.rotation_deg)
      ->check(CLI::Range(0.0, 45.0));
  synth->add_option("--noise", spec.jitter.noise_sigma)
      ->check(CLI::Range(0.0, 64.0));
  synth->add_option("--vein-width", spec.vein_width)
      ->check(CLI::Range(1.0, 16.0));
  synth->callback([&] {
    if (!spec.valid()) throw CLI::ValidationError("synth flags out of range");
    vf::write_dataset(spec, synth_out);
    std::printf("SYNTH subjects=%d samples=%d -> %s\n", spec.n_subjects,
                spec.samples_per_subject, synth_out.c_str());
  });

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "raw image to skeleton");
  std::string prep_in, prep_out;
  PipelineFlags prep_pf;
  prep->add_option("--in", prep_in, "input PGM")->required();
  prep->add_option("--out", prep_out, "output skeleton PGM")->required();
  add_pipeline_flags(prep, prep_pf, false);
  prep->callback([&] {
    const vf::PipelineConfig cfg = resolve(prep_pf);
    const vf::BinaryImage skel =
        vf::preprocess_pipeline(vf::load_pgm(prep_in), cfg);
    vf::save_pgm(vf::to_gray(skel), prep_out);
    std::printf("PREPROCESS %s -> %s pixels=%zu\n", prep_in.c_str(),
                prep_out.c_str(), skel.popcount());
  });

  // train
  auto* train = app.add_subcommand("train", "fit a model from a manifest");
  std::string train_manifest, train_out;
  vf::TrainOptions topts;
  PipelineFlags train_pf;
  train->add_option("--manifest", train_manifest, "dataset manifest CSV")
      ->required();
  train->add_option("--out", train_out, "model output path")->required();
  train->add_option("--tau", topts.tau, "variance fraction (0.9 or 0.95)")
      ->check(CLI::Range(0.0, 1.0));
  train->add_option("--max-points", topts.max_points)
      ->check(CLI::Range(8, 4096));
  train->add_flag("--ridge", topts.ridge, "ridge-regularized inverse");
  add_pipeline_flags(train, train_pf, true);
  train->callback([&] {
    const vf::PipelineConfig cfg = resolve(train_pf);
    const vf::Dataset data =
        vf::load_dataset(train_manifest, train_pf.raw ? &cfg : nullptr);
    const vf::VeinSpaceModel model = vf::train(as_training_set(data), topts);
    vf::save_model(model, train_out);
    std::printf(
        "TRAINED images=%d grid=%dx%d K=%d theta_vein=%.6g theta_id=%.6g -> %s\n",
        model.dims.I, model.dims.M, model.dims.N, model.K, model.theta_vein,
        model.theta_id, train_out.c_str());
  });

  // enroll
  auto* enroll = app.add_subcommand("enroll", "add a template to a model");
  std::string en_model, en_in, en_label;
  PipelineFlags en_pf;
  enroll->add_option("--model", en_model)->required();
  enroll->add_option("--in", en_in, "skeleton (or raw) PGM")->required();
  enroll->add_option("--label", en_label)->required();
  add_pipeline_flags(enroll, en_pf, true);
  enroll->callback([&] {
    resolve(en_pf);
    vf::VeinSpaceModel model = vf::load_model(en_model);
    const vf::PairGrid grid = probe_grid(model, load_probe(en_in, en_pf));
    model.templates.push_back(
        {en_label, vf::project(grid, model.mean, model.eigenveins)});
    vf::save_model(model, en_model);
    std::printf("ENROLLED label=%s templates=%zu\n", en_label.c_str(),
                model.templates.size());
  });

  // verify
  auto* verify = app.add_subcommand("verify", "1:1 check of a claimed label");
  std::string ve_model, ve_in, ve_label;
  PipelineFlags ve_pf;
  verify->add_option("--model", ve_model)->required();
  verify->add_option("--in", ve_in)->required();
  verify->add_option("--label", ve_label, "claimed identity")->required();
  add_pipeline_flags(verify, ve_pf, true);
  verify->callback([&] {
    resolve(ve_pf);
    const vf::VeinSpaceModel model = vf::load_model(ve_model);
    const vf::PairGrid grid = probe_grid(model, load_probe(ve_in, ve_pf));
    rc = report_decision(vf::verify(model, grid, ve_label));
  });

  // identify
  auto* ident = app.add_subcommand("identify", "1:N closed-set search");
  std::string id_model, id_in;
  PipelineFlags id_pf;
  ident->add_option("--model", id_model)->required();
  ident->add_option("--in", id_in)->required();
  add_pipeline_flags(ident, id_pf, true);
  ident->callback([&] {
    resolve(id_pf);
    const vf::VeinSpaceModel model = vf::load_model(id_model);
    const vf::PairGrid grid = probe_grid(model, load_probe(id_in, id_pf));
    rc = report_decision(vf::identify(model, grid));
  });

  // eval
  auto* eval = app.add_subcommand("eval", "FAR/FRR tables over database sizes");
  std::string ev_manifest, ev_method = "qif", ev_report;
  vf::ExperimentOptions eopts;
  std::optional<double> ev_threshold;
  PipelineFlags ev_pf;
  eval->add_option("--manifest", ev_manifest)->required();
  eval->add_option("--method", ev_method)->check(CLI::IsMember({"qif", "pixel", "both"}));
  eval->add_option("--report", ev_report, "output CSV")->required();
  eval->add_option("--tau", eopts.tau)->check(CLI::Range(0.0, 1.0));
  eval->add_option("--threshold", ev_threshold,
                   "fixed accept threshold (default: per-row equal error)");
  eval->add_option("--sizes", eopts.row_sizes, "database sizes")
      ->delimiter(',');
  add_pipeline_flags(eval, ev_pf, true);
  eval->callback([&] {
    const vf::PipelineConfig cfg = resolve(ev_pf);
    const vf::Dataset data =
        vf::load_dataset(ev_manifest, ev_pf.raw ? &cfg : nullptr);
    eopts.threshold = ev_threshold;
    if (ev_method == "both") {
      run_eval_method(data, eopts, "qif", suffixed_report(ev_report, "qif"));
      run_eval_method(data, eopts, "pixel",
                      suffixed_report(ev_report, "pixel"));
    } else {
      run_eval_method(data, eopts, ev_method, ev_report);
    }
  });

  // bench
  auto* bench = app.add_subcommand("bench", "matching-phase timing table");
  std::string be_manifest, be_report;
  std::vector<int> be_sizes = {20, 40, 60, 80, 100};
  int be_reps = 5;
  PipelineFlags be_pf;
  bench->add_option("--manifest", be_manifest)->required();
  bench->add_option("--report", be_report, "output CSV")->required();
  bench->add_option("--sizes", be_sizes, "database sizes")->delimiter(',');
  bench->add_option("--reps", be_reps, "repetitions (median)")
      ->check(CLI::Range(3, 1000));
  add_pipeline_flags(bench, be_pf, true);
  bench->callback([&] {
    const vf::PipelineConfig cfg = resolve(be_pf);
    const vf::Dataset data =
        vf::load_dataset(be_manifest, be_pf.raw ? &cfg : nullptr);
    const vf::TimingTable table = vf::bench_timing(data, be_sizes, be_reps);
    vf::emit_csv(table, be_report);
    for (const vf::TimingRow& r : table.rows)
      std::printf("BENCH n=%d pixel=%.3fs qif=%.3fs speedup=%.3f\n",
                  r.n_images, r.pixel_seconds, r.qif_seconds, r.speedup);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const vf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return rc;
}
