#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "soilml/agronomy.hpp"
#include "soilml/curves.hpp"
#include "soilml/phantom.hpp"

using namespace soilml;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory for one test, wiped on construction.
struct Scratch {
  fs::path dir;

  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("soilml_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  std::string path(const std::string& leaf) const {
    return (dir / leaf).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long line_count(const std::string& text) {
  long n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

/// Runs the tool, captures stdout/stderr into the scratch dir, returns the
/// exit code.
int run(const Scratch& scratch, const std::string& args,
        std::string* out = nullptr, std::string* err = nullptr) {
  const std::string out_path = scratch.path("stdout.txt");
  const std::string err_path = scratch.path("stderr.txt");
  const std::string cmd = std::string(SOILML_CLI_PATH) + " " + args + " > \"" +
                          out_path + "\" 2> \"" + err_path + "\"";
  const int rc = std::system(cmd.c_str());
  if (out) *out = slurp(out_path);
  if (err) *err = slurp(err_path);
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

/// Soil rows whose features come from the same forward model the dataset
/// generator uses, so any regressor trained on a generated table predicts
/// positive concentrations for them.
void write_soil_rows(const std::string& path) {
  const curves::CellGeometry geom;
  const double gain = geom.electrode_area_A / geom.electrode_separation_l;
  std::vector<agronomy::SoilSample> rows;
  const std::vector<std::pair<std::string, phantom::SolutionComposition>> mixes =
      {{"cal1", {0.0, 2.5, 267.5}},
       {"f1", {20.0, 1.25, 267.5}},
       {"f2", {40.0, 2.5, 133.75}}};
  for (const auto& [id, comp] : mixes) {
    const double sigma = phantom::sigma_model(comp);
    agronomy::SoilSample s;
    s.id = id;
    s.ph = phantom::forward_ph(comp);
    s.conductivity = sigma;
    s.avg_power = sigma * gain * 12.5;  // integral of V dV over the 0-5 sweep
    s.lab_p2o5 = comp.c_h3po4 / 2.0 * 141.94 * 2.25;
    s.lab_k2o = comp.c_koh / 2.0 * 94.2 * 2.25;
    rows.push_back(std::move(s));
  }
  agronomy::write_soil_csv(path, rows);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("dataset generation is reproducible byte for byte") {
  Scratch scratch("gen");
  std::string out;
  REQUIRE(run(scratch, "gen -o " + scratch.path("a.csv") + " --seed 3", &out) == 0);
  CHECK(out.find("seed: 3") != std::string::npos);
  CHECK(out.find("rows: 231") != std::string::npos);
  CHECK(out.find("ph: ") != std::string::npos);
  REQUIRE(run(scratch, "gen -o " + scratch.path("b.csv") + " --seed 3") == 0);

  const std::string a = slurp(scratch.path("a.csv"));
  CHECK(a == slurp(scratch.path("b.csv")));
  CHECK(line_count(a) == 232);  // header plus one row per mixture

  REQUIRE(run(scratch, "gen -o " + scratch.path("c.csv") + " --seed 4") == 0);
  CHECK(a != slurp(scratch.path("c.csv")));
}

TEST_CASE("generation rejects a step that misses the total") {
  Scratch scratch("gen_bad");
  std::string err;
  CHECK(run(scratch, "gen -o " + scratch.path("x.csv") + " --step 3", nullptr,
            &err) == 1);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("training and predicting close the calibration loop") {
  Scratch scratch("flow");
  const std::string data = scratch.path("data.csv");
  const std::string model = scratch.path("forest.model");
  const std::string soil = scratch.path("soil.csv");
  const std::string preds = scratch.path("preds.csv");
  const std::string cal = scratch.path("factors.txt");

  REQUIRE(run(scratch, "gen -o " + data + " --seed 1") == 0);
  std::string out;
  REQUIRE(run(scratch,
              "train -d " + data + " -o " + model +
                  " --model forest --trees 10 --seed 2",
              &out) == 0);
  CHECK(out.find("model: forest (raw)") != std::string::npos);
  CHECK(out.find("train mae: ") != std::string::npos);
  REQUIRE(fs::exists(model));

  write_soil_rows(soil);
  REQUIRE(run(scratch,
              "predict --model " + model + " -i " + soil + " -o " + preds +
                  " --calibrate-first 1 --save-calibration " + cal,
              &out) == 0);
  CHECK(out.find("factor forest.p2o5 = ") != std::string::npos);
  CHECK(out.find("factor forest.k2o = ") != std::string::npos);
  CHECK(out.find("evaluation rows: 2") != std::string::npos);
  CHECK(out.find("p2o5 error: ") != std::string::npos);
  CHECK(out.find("k2o error: ") != std::string::npos);

  const std::string pred_csv = slurp(preds);
  CHECK(pred_csv.rfind("sample_id,lab_p2o5_kg_ha,pred_p2o5_kg_ha,"
                       "lab_k2o_kg_ha,pred_k2o_kg_ha\n",
                       0) == 0);
  CHECK(line_count(pred_csv) == 3);
  CHECK(slurp(cal).find("forest.p2o5 = ") != std::string::npos);

  // reuse the saved factors over every sample
  REQUIRE(run(scratch,
              "predict --model " + model + " -i " + soil + " -o " + preds +
                  " --calibration " + cal,
              &out) == 0);
  CHECK(out.find("evaluation rows: 3") != std::string::npos);

  // exactly one calibration source may be given
  CHECK(run(scratch, "predict --model " + model + " -i " + soil + " -o " +
                         preds + " --calibrate-first 1 --calibration " + cal) ==
        2);
  CHECK(run(scratch,
            "predict --model " + model + " -i " + soil + " -o " + preds) == 2);
}

TEST_CASE("featurize builds dataset rows from labeled sweeps") {
  Scratch scratch("feat_dataset");
  const fs::path sweeps = scratch.dir / "sweeps";
  fs::create_directories(sweeps);
  auto write_sweep = [&sweeps](const std::string& name) {
    std::ofstream f(sweeps / name);
    for (int i = 0; i <= 100; ++i) {
      const double v = 0.05 * i;
      f << v << "," << 0.02 * v << "\n";
    }
  };
  write_sweep("0-5-100-2.1.csv");
  write_sweep("80-0-535-13.7.csv");

  const std::string out_csv = scratch.path("table.csv");
  std::string out;
  REQUIRE(run(scratch,
              "featurize -i " + sweeps.string() + " -o " + out_csv +
                  " --format dataset",
              &out) == 0);
  CHECK(out.find("files: 2, rows written: 2, failures: 0") != std::string::npos);
  const std::string table = slurp(out_csv);
  CHECK(table.rfind("ph,conductivity_s_per_m,avg_power_w,c_hno3_mmol,"
                    "c_h3po4_mmol,c_koh_mmol\n",
                    0) == 0);
  CHECK(line_count(table) == 3);
  // files walk in name order, so the acidic sweep lands first
  CHECK(table.find("\n2.1,") != std::string::npos);
  CHECK(table.find("\n13.7,") != std::string::npos);

  // an unlabeled stem cannot produce a dataset row
  write_sweep("plain.csv");
  std::string err;
  CHECK(run(scratch,
            "featurize -i " + sweeps.string() + " -o " + out_csv +
                " --format dataset",
            &out, &err) == 1);
  CHECK(out.find("failures: 1") != std::string::npos);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("featurize builds soil rows from a pH map") {
  Scratch scratch("feat_soil");
  const fs::path sweeps = scratch.dir / "sweeps";
  fs::create_directories(sweeps);
  {
    std::ofstream f(sweeps / "fieldA.csv");
    for (int i = 0; i <= 100; ++i) {
      const double v = 0.05 * i;
      f << v << "," << 0.02 * v << "\n";
    }
  }
  std::ofstream(scratch.path("ph.txt")) << "fieldA = 6.5\n";

  const std::string out_csv = scratch.path("soil.csv");
  REQUIRE(run(scratch, "featurize -i " + sweeps.string() + " -o " + out_csv +
                           " --format soil --ph-map " + scratch.path("ph.txt")) ==
          0);
  const std::string soil = slurp(out_csv);
  CHECK(soil.rfind("sample_id,ph,conductivity_s_per_m,avg_power_w\n", 0) == 0);
  CHECK(soil.find("fieldA,6.5,") != std::string::npos);
}

TEST_CASE("argument errors use the parse exit code") {
  Scratch scratch("args");
  CHECK(run(scratch, "") == 2);  // a subcommand is required
  CHECK(run(scratch, "--help") == 0);
  CHECK(run(scratch, "train -d " + scratch.path("missing.csv") + " -o " +
                         scratch.path("m") + " --model linear") == 2);
  REQUIRE(run(scratch, "gen -o " + scratch.path("d.csv")) == 0);
  CHECK(run(scratch, "train -d " + scratch.path("d.csv") + " -o " +
                         scratch.path("m") + " --model svm") == 2);
  CHECK(run(scratch, "convert --mmol 10") == 2);
}

TEST_CASE("cross-validation reports are reproducible") {
  Scratch scratch("eval");
  const std::string data = scratch.path("data.csv");
  REQUIRE(run(scratch, "gen -o " + data + " --seed 5") == 0);

  const std::string args = "eval -d " + data +
                           " --models linear,knn --prep raw --seed 7 --outdir ";
  std::string out;
  REQUIRE(run(scratch, args + scratch.path("e1"), &out) == 0);
  CHECK(out.find("seed: 7") != std::string::npos);
  CHECK(out.find("linear (raw): train ") != std::string::npos);
  REQUIRE(run(scratch, args + scratch.path("e2")) == 0);

  const std::string folds = slurp(scratch.path("e1") + "/folds.csv");
  CHECK(folds == slurp(scratch.path("e2") + "/folds.csv"));
  CHECK(folds.rfind("model,preprocessing,fold,train_mae,test_mae,train_r2,"
                    "test_r2\n",
                    0) == 0);
  CHECK(line_count(folds) == 11);  // two models, five folds each
  CHECK(slurp(scratch.path("e1") + "/report.csv") ==
        slurp(scratch.path("e2") + "/report.csv"));
  CHECK(fs::exists(scratch.path("e1") + "/comparison.svg"));
}

TEST_CASE("the unit calculator prints the hand-checked chain") {
  Scratch scratch("convert");
  std::string out;
  REQUIRE(run(scratch, "convert --mmol 10 --compound KOH", &out) == 0);
  CHECK(out.find("K2O: 5 mmol/L") != std::string::npos);
  CHECK(out.find("471") != std::string::npos);
  CHECK(out.find("1059.75") != std::string::npos);

  REQUIRE(run(scratch, "convert --mmol 80 --compound HNO3", &out) == 0);
  CHECK(out.find("5040") != std::string::npos);
}

}  // TEST_SUITE
