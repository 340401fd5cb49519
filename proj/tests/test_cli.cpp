#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "veinforge/evaluation.hpp"
#include "veinforge/modelstore.hpp"
#include "veinforge/raster.hpp"
#include "test_util.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Drives the installed binary exactly the way a user would: a shell line,
// captured stdout/stderr, and the raw exit status.
RunResult run_cli(const std::string& args, const std::string& env = "") {
  static const tu::TempDir io;
  static int counter = 0;
  const std::string out_path = io / ("out" + std::to_string(counter));
  const std::string err_path = io / ("err" + std::to_string(counter));
  ++counter;
  const std::string cmd = env + (env.empty() ? "" : " ") + VEINFORGE_BIN +
                          " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = tu::slurp(out_path);
  r.err = tu::slurp(err_path);
  return r;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// One synthetic dataset and trained model shared by the whole suite.
struct Workspace {
  tu::TempDir dir;
  std::string data;
  std::string gt_manifest;
  std::string model;

  Workspace() {
    data = dir / "data";
    const RunResult synth = run_cli(
        "synth --out " + data +
        " --subjects 4 --samples 2 --width 160 --height 120");
    REQUIRE(synth.code == 0);
    REQUIRE(starts_with(synth.out, "SYNTH subjects=4 samples=2"));

    // the ground-truth skeletons share filenames, so the manifest transfers
    gt_manifest = data + "/gt/manifest.csv";
    tu::spew(gt_manifest, tu::slurp(data + "/manifest.csv"));

    model = dir / "model.vqm";
    const RunResult train =
        run_cli("train --manifest " + gt_manifest + " --out " + model);
    REQUIRE(train.code == 0);
    REQUIRE(starts_with(train.out, "TRAINED images=8 grid="));
  }

  std::string gt(int subject, int sample) const {
    return data + "/gt/subject" + std::to_string(subject) + "_sample" +
           std::to_string(sample) + ".pgm";
  }
};

Workspace& ws() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("synth writes a loadable dataset tree") {
  namespace fs = std::filesystem;
  CHECK(fs::exists(ws().data + "/manifest.csv"));
  CHECK(fs::exists(ws().data + "/subject3_sample1.pgm"));
  CHECK(fs::exists(ws().gt(0, 0)));
  const vf::GrayImage img = vf::load_pgm(ws().data + "/subject0_sample0.pgm");
  CHECK(img.width == 160);
  CHECK(img.height == 120);
}

TEST_CASE("trained model loads with one template per image") {
  const vf::VeinSpaceModel model = vf::load_model(ws().model);
  CHECK(model.dims.I == 8);
  CHECK(model.templates.size() == 8);
  CHECK(model.K >= 1);
}

TEST_CASE("preprocess produces a nonempty skeleton image") {
  const std::string out = ws().dir / "skel.pgm";
  const RunResult r = run_cli("preprocess --in " + ws().data +
                              "/subject0_sample0.pgm --out " + out);
  CHECK(r.code == 0);
  CHECK(starts_with(r.out, "PREPROCESS"));
  CHECK(vf::to_binary(vf::load_pgm(out)).popcount() > 0);
}

TEST_CASE("verify accepts the true identity of a training image") {
  const RunResult r = run_cli("verify --model " + ws().model + " --in " +
                              ws().gt(0, 0) + " --label 0");
  CHECK(r.code == 0);
  CHECK(starts_with(r.out, "ACCEPT label=0 distance="));
}

TEST_CASE("verify against a different identity stays in protocol") {
  const RunResult r = run_cli("verify --model " + ws().model + " --in " +
                              ws().gt(0, 0) + " --label 1");
  // the claim is scored against label 1 only; either verdict is a clean exit
  CHECK((r.code == 0 || r.code == 1));
  CHECK(r.out.find("label=1") != std::string::npos);
}

TEST_CASE("verify of an unenrolled label is an error, not a reject") {
  const RunResult r = run_cli("verify --model " + ws().model + " --in " +
                              ws().gt(0, 0) + " --label nosuch");
  CHECK(r.code == 3);
  CHECK(r.err.find("UnknownLabel") != std::string::npos);
}

TEST_CASE("identify finds the owner of a training image") {
  const RunResult r =
      run_cli("identify --model " + ws().model + " --in " + ws().gt(2, 1));
  CHECK(r.code == 0);
  CHECK(starts_with(r.out, "ACCEPT label=2 distance="));
}

TEST_CASE("a checkerboard probe fails the vein gate with exit 1") {
  vf::GrayImage checker(160, 120);
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 160; ++x)
      checker.at(x, y) = (x + y) % 2 ? 255 : 0;
  const std::string path = ws().dir / "checker.pgm";
  vf::save_pgm(checker, path);

  const RunResult r =
      run_cli("identify --model " + ws().model + " --in " + path);
  CHECK(r.code == 1);
  CHECK(starts_with(r.out, "REJECT reason=not-a-vein vein_score="));
}

TEST_CASE("enroll appends a template that identify can then hit") {
  const std::string copy = ws().dir / "model_copy.vqm";
  tu::spew(copy, tu::slurp(ws().model));
  const RunResult en = run_cli("enroll --model " + copy + " --in " +
                               ws().gt(3, 1) + " --label extra");
  CHECK(en.code == 0);
  CHECK(starts_with(en.out, "ENROLLED label=extra templates=9"));
  CHECK(vf::load_model(copy).templates.size() == 9);
}

TEST_CASE("flag errors exit 2 before any work happens") {
  CHECK(run_cli("synth --bogus-flag 1 --out /tmp/x").code == 2);
  CHECK(run_cli("train --out /tmp/x.vqm").code == 2);  // missing --manifest
  CHECK(run_cli("eval --manifest m.csv --report r.csv --method nope").code ==
        2);
}

TEST_CASE("library failures exit 3 with the error name on stderr") {
  const RunResult r = run_cli("identify --model " + ws().model +
                              " --in /nonexistent/probe.pgm");
  CHECK(r.code == 3);
  CHECK(starts_with(r.err, "error: "));
  CHECK(r.err.find("MissingFile") != std::string::npos);

  CHECK(run_cli("identify --model /nonexistent.vqm --in " + ws().gt(0, 0))
            .code == 3);
}

TEST_CASE("off-menu tau trains fine but warns") {
  const std::string out = ws().dir / "tau_model.vqm";
  const RunResult r = run_cli("train --manifest " + ws().gt_manifest +
                              " --out " + out + " --tau 0.7");
  CHECK(r.code == 0);
  CHECK(r.err.find("off the beaten path") != std::string::npos);
}

TEST_CASE("eval --method both writes one report per method") {
  const std::string report = ws().dir / "r.csv";
  const RunResult r =
      run_cli("eval --manifest " + ws().gt_manifest + " --report " + report +
              " --method both --sizes 8");
  CHECK(r.code == 0);
  CHECK(r.out.find("EVAL method=qif") != std::string::npos);
  CHECK(r.out.find("EVAL method=pixel") != std::string::npos);

  const vf::EvalReport qif = vf::parse_eval_csv(ws().dir / "r.qif.csv");
  const vf::EvalReport pixel = vf::parse_eval_csv(ws().dir / "r.pixel.csv");
  REQUIRE(qif.rows.size() == 1);
  REQUIRE(pixel.rows.size() == 1);
  CHECK(qif.rows[0].n_images == 8);
  CHECK(pixel.rows[0].n_images == 8);
}

TEST_CASE("eval --raw runs the full pipeline from grayscale images") {
  const std::string report = ws().dir / "raw.csv";
  const RunResult r = run_cli("eval --manifest " + ws().data +
                              "/manifest.csv --report " + report +
                              " --raw --sizes 8");
  CHECK(r.code == 0);
  CHECK(vf::parse_eval_csv(report).rows.size() == 1);
}

TEST_CASE("bench emits its timing table") {
  const std::string report = ws().dir / "bench.csv";
  const RunResult r = run_cli("bench --manifest " + ws().gt_manifest +
                              " --report " + report + " --sizes 4,8 --reps 3");
  CHECK(r.code == 0);
  CHECK(starts_with(r.out, "BENCH"));
  const vf::TimingTable table = vf::parse_timing_csv(report);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].n_images == 4);
  CHECK(table.rows[1].n_images == 8);
  // medians land below the 3-decimal CSV grain on tiny inputs, so only
  // nonnegativity survives the roundtrip
  CHECK(table.rows[0].qif_seconds >= 0.0);
  CHECK(table.rows[0].pixel_seconds >= 0.0);
}

TEST_CASE("config files feed flags, and explicit flags win") {
  const std::string img = ws().data + "/subject1_sample0.pgm";
  const std::string by_flags = ws().dir / "flags.pgm";
  CHECK(run_cli("preprocess --in " + img + " --out " + by_flags +
                " --threshold-mode fixed --level 140")
            .code == 0);

  const std::string cfg = ws().dir / "pipe.ini";
  tu::spew(cfg, "[preprocess]\nthreshold-mode=fixed\nlevel=140\n");
  const std::string by_config = ws().dir / "config.pgm";
  CHECK(run_cli("--config " + cfg + " preprocess --in " + img + " --out " +
                by_config)
            .code == 0);
  CHECK(tu::slurp(by_config) == tu::slurp(by_flags));

  // a flag on the command line overrides the config file value
  const std::string by_override = ws().dir / "override.pgm";
  CHECK(run_cli("--config " + cfg + " preprocess --in " + img + " --out " +
                by_override + " --level 96")
            .code == 0);
  const std::string by_flag96 = ws().dir / "flag96.pgm";
  CHECK(run_cli("preprocess --in " + img + " --out " + by_flag96 +
                " --threshold-mode fixed --level 96")
            .code == 0);
  CHECK(tu::slurp(by_override) == tu::slurp(by_flag96));
  CHECK(tu::slurp(by_override) != tu::slurp(by_config));
}

TEST_CASE("VEINFORGE_SEED stands in for --seed") {
  const std::string a = ws().dir / "seed_env";
  const std::string b = ws().dir / "seed_flag";
  const std::string c = ws().dir / "seed_default";
  CHECK(run_cli("synth --out " + a + " --subjects 1 --samples 1",
                "VEINFORGE_SEED=7")
            .code == 0);
  CHECK(run_cli("synth --out " + b + " --subjects 1 --samples 1 --seed 7")
            .code == 0);
  CHECK(run_cli("synth --out " + c + " --subjects 1 --samples 1").code == 0);

  const std::string name = "/subject0_sample0.pgm";
  CHECK(tu::slurp(a + name) == tu::slurp(b + name));
  CHECK(tu::slurp(a + name) != tu::slurp(c + name));
}
