// Command-line front end: dataset synthesis, sweep featurization, training,
// cross-validated comparison, soil prediction, and a unit-chain calculator.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "soilml/agronomy.hpp"
#include "soilml/csv.hpp"
#include "soilml/curves.hpp"
#include "soilml/dataset.hpp"
#include "soilml/errors.hpp"
#include "soilml/eval.hpp"
#include "soilml/models.hpp"
#include "soilml/phantom.hpp"
#include "soilml/rng.hpp"
#include "soilml/svg.hpp"

namespace fs = std::filesystem;
using namespace soilml;

namespace {

struct GenArgs {
  std::string output;
  std::uint64_t seed = 0;
  double noise = 0.01;
  double step = 2.0;
  double total = 40.0;
  std::string ion_model_path;
  double cell_l = curves::CellGeometry{}.electrode_separation_l;
  double cell_a = curves::CellGeometry{}.electrode_area_A;
};

int run_gen(const GenArgs& args) {
  phantom::IonModel ions;
  if (!args.ion_model_path.empty())
    ions = phantom::load_ion_model(args.ion_model_path);
  curves::CellGeometry geometry{args.cell_l, args.cell_a};
  auto table = phantom::generate_dataset(phantom::Stocks{}, ions, geometry,
                                         args.noise, args.seed, args.step,
                                         args.total);
  table.write_csv(args.output);
  std::cout << "seed: " << args.seed << "\n";
  std::cout << "rows: " << table.rows() << "\n";
  for (int c = 0; c < 3; ++c) {
    std::cout << table.feature_names[static_cast<std::size_t>(c)] << ": "
              << csv::format_double(table.X.col(c).minCoeff()) << " .. "
              << csv::format_double(table.X.col(c).maxCoeff()) << "\n";
  }
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

struct FeaturizeArgs {
  std::string input_dir;
  std::string output;
  std::string format = "soil";
  bool milliamps = false;
  std::string ph_map_path;
  double cell_l = curves::CellGeometry{}.electrode_separation_l;
  double cell_a = curves::CellGeometry{}.electrode_area_A;
};

int run_featurize(const FeaturizeArgs& args) {
  const curves::CellGeometry geometry{args.cell_l, args.cell_a};
  const double scale = args.milliamps ? 1e-3 : 1.0;

  std::map<std::string, double> ph_map;
  if (!args.ph_map_path.empty())
    for (const auto& [key, value] : csv::read_keyvalue_file(args.ph_map_path))
      ph_map[key] = csv::parse_double(value);

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(args.input_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty())
    std::cerr << "warning: no .csv sweep files in " << args.input_dir << "\n";

  std::vector<std::string> errors;
  std::vector<agronomy::SoilSample> soil_rows;
  std::vector<std::array<double, 6>> dataset_rows;

  for (const auto& path : files) {
    try {
      auto curve = curves::read_curve_file(path, scale);
      const std::string stem = fs::path(path).stem().string();
      const double sigma = curves::conductivity(curve, geometry);
      const double p_av = curves::average_power(curve);

      if (args.format == "dataset") {
        if (!curve.label())
          throw ValidationError(
              "filename does not encode a composition (want N-P-K-pH)");
        const auto& l = *curve.label();
        dataset_rows.push_back({l.ph, sigma, p_av, l.n_mmol, l.p_mmol, l.k_mmol});
      } else {
        agronomy::SoilSample s;
        s.id = stem;
        auto it = ph_map.find(stem);
        if (it != ph_map.end())
          s.ph = it->second;
        else if (curve.label())
          s.ph = curve.label()->ph;
        else
          throw ValidationError("no pH known for '" + stem +
                                "' (no --ph-map entry, unlabeled filename)");
        s.conductivity = sigma;
        s.avg_power = p_av;
        s.validate();
        soil_rows.push_back(std::move(s));
      }
    } catch (const Error& e) {
      errors.push_back(std::string(e.what()));
    }
  }

  if (args.format == "dataset") {
    dataset::FeatureTable table;
    const Eigen::Index n = static_cast<Eigen::Index>(dataset_rows.size());
    table.X.resize(n, 3);
    table.Y.resize(n, 3);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& row = dataset_rows[static_cast<std::size_t>(r)];
      for (int c = 0; c < 3; ++c) table.X(r, c) = row[static_cast<std::size_t>(c)];
      for (int c = 0; c < 3; ++c) table.Y(r, c) = row[static_cast<std::size_t>(c) + 3];
    }
    std::ofstream out(args.output, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open " + args.output + " for writing");
    out << table.to_csv();
  } else {
    agronomy::write_soil_csv(args.output, soil_rows);
  }

  std::cout << "files: " << files.size() << ", rows written: "
            << (args.format == "dataset" ? dataset_rows.size() : soil_rows.size())
            << ", failures: " << errors.size() << "\n";
  for (const auto& e : errors) std::cerr << "error: " << e << "\n";
  return errors.empty() ? 0 : 1;
}

struct TrainArgs {
  std::string data;
  std::string output;
  std::string model;
  std::string prep = "raw";
  std::uint64_t seed = 0;
  int knn_k = 5;
  int trees = 20;
  bool no_bootstrap = false;
  int epochs = 700;
  double lr = 1e-3;
  std::string activation = "relu";
};

eval::ModelConfig model_config(models::ModelKind kind, int knn_k, int trees,
                               bool bootstrap, int epochs, double lr,
                               const std::string& activation) {
  eval::ModelConfig config;
  config.kind = kind;
  config.knn_k = knn_k;
  config.forest.n_trees = trees;
  config.forest.bootstrap = bootstrap;
  config.mlp.epochs = epochs;
  config.mlp.learning_rate = lr;
  config.mlp.activation = models::parse_activation(activation);
  return config;
}

int run_train(const TrainArgs& args) {
  auto table = dataset::FeatureTable::read_csv(args.data);
  auto config =
      model_config(models::parse_kind(args.model), args.knn_k, args.trees,
                   !args.no_bootstrap, args.epochs, args.lr, args.activation);
  auto prep = eval::parse_preprocessing(args.prep);
  auto bundle = eval::fit_full(table, config, prep, args.seed);
  models::save_bundle(args.output, bundle);

  Eigen::MatrixXd pred =
      models::predict(bundle.model, bundle.pipeline.transform(table.X));
  std::cout << "seed: " << args.seed << "\n";
  std::cout << "model: " << args.model << " (" << args.prep << ")\n";
  std::cout << "train mae: " << csv::format_double(eval::mae(table.Y, pred))
            << "\n";
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

struct EvalArgs {
  std::string data;
  std::string outdir;
  std::string models_list = "all";
  std::string prep = "both";
  int k = 5;
  std::uint64_t seed = 0;
  int knn_k = 5;
  int trees = 20;
  int epochs = 700;
  double lr = 1e-3;
  std::string activation = "relu";
};

int run_eval(const EvalArgs& args) {
  auto table = dataset::FeatureTable::read_csv(args.data);

  std::vector<models::ModelKind> kinds;
  if (args.models_list == "all") {
    kinds = {models::ModelKind::Linear, models::ModelKind::Knn,
             models::ModelKind::Forest, models::ModelKind::Mlp};
  } else {
    for (const auto& tok : csv::split(args.models_list))
      kinds.push_back(models::parse_kind(tok));
  }
  std::vector<eval::Preprocessing> preps;
  if (args.prep == "both")
    preps = {eval::Preprocessing::Raw, eval::Preprocessing::Pca};
  else
    preps = {eval::parse_preprocessing(args.prep)};

  fs::create_directories(args.outdir);
  auto plan =
      dataset::make_kfold(table.rows(), args.k, derive_seed(args.seed, "kfold"));

  std::vector<eval::FoldResult> all;
  for (auto kind : kinds) {
    auto config = model_config(kind, args.knn_k, args.trees, true, args.epochs,
                               args.lr, args.activation);
    for (auto prep : preps) {
      auto results = eval::run_cv(table, config, prep, plan, args.seed);
      all.insert(all.end(), std::make_move_iterator(results.begin()),
                 std::make_move_iterator(results.end()));
    }
  }

  // per-fold listing
  {
    std::string folds_csv =
        "model,preprocessing,fold,train_mae,test_mae,train_r2,test_r2\n";
    for (const auto& r : all) {
      folds_csv += models::kind_name(r.kind) + "," +
                   eval::preprocessing_name(r.prep) + "," +
                   std::to_string(r.fold) + "," +
                   csv::format_double(r.train_mae) + "," +
                   csv::format_double(r.test_mae) + ",";
      folds_csv += r.train_r2 ? csv::format_double(*r.train_r2) : "";
      folds_csv += ",";
      folds_csv += r.test_r2 ? csv::format_double(*r.test_r2) : "";
      folds_csv += "\n";
    }
    svg::write_file((fs::path(args.outdir) / "folds.csv").string(), folds_csv);
  }

  // neural-net epoch curves, one CSV per fold plus one chart per prep
  for (auto prep : preps) {
    std::vector<svg::Series> val_series;
    for (const auto& r : all) {
      if (r.kind != models::ModelKind::Mlp || r.prep != prep || !r.curve)
        continue;
      const auto& curve = *r.curve;
      const std::string base = "epochs_nn_" + eval::preprocessing_name(prep) +
                               "_fold" + std::to_string(r.fold);
      svg::write_file((fs::path(args.outdir) / (base + ".csv")).string(),
                      curve.to_csv());
      svg::Series s;
      s.name = "fold " + std::to_string(r.fold);
      for (std::size_t e = 0; e < curve.val_mae.size(); ++e) {
        s.x.push_back(static_cast<double>(e + 1));
        s.y.push_back(curve.val_mae[e]);
      }
      val_series.push_back(std::move(s));
    }
    if (!val_series.empty()) {
      svg::write_file(
          (fs::path(args.outdir) /
           ("epochs_nn_" + eval::preprocessing_name(prep) + ".svg"))
              .string(),
          svg::line_chart("NN validation MAE, " + eval::preprocessing_name(prep),
                          "epoch", "MAE (mmol/L)", val_series));
    }
  }

  auto report = eval::compare_models(all);
  svg::write_file((fs::path(args.outdir) / "report.csv").string(),
                  report.to_csv());

  std::vector<svg::Bar> bars;
  for (const auto& row : report.rows)
    bars.push_back(svg::Bar{models::kind_name(row.kind) + " " +
                                eval::preprocessing_name(row.prep),
                            row.mean_test, row.sd_test});
  svg::write_file((fs::path(args.outdir) / "comparison.svg").string(),
                  svg::bar_chart("Test MAE by model", "MAE (mmol/L)", bars));

  std::cout << "seed: " << args.seed << "\n";
  for (const auto& row : report.rows) {
    std::cout << models::kind_name(row.kind) << " ("
              << eval::preprocessing_name(row.prep) << "): train "
              << csv::format_double(row.mean_train) << " +- "
              << csv::format_double(row.sd_train) << ", test "
              << csv::format_double(row.mean_test) << " +- "
              << csv::format_double(row.sd_test) << "\n";
  }
  std::cout << "wrote " << args.outdir << "\n";
  return 0;
}

struct PredictArgs {
  std::string model_path;
  std::string input;
  std::string output;
  std::size_t calibrate_first = 0;
  std::string calibration_path;
  std::string save_calibration_path;
  bool ratio_of_means = false;
  std::string denominator = "lab";
  double bulk_density = 1.5;
  double depth = 0.15;
  double area = 1.0;
};

int run_predict(const PredictArgs& args) {
  auto bundle = models::load_bundle(args.model_path);
  auto samples = agronomy::read_soil_csv(args.input);
  agronomy::ConversionConstants constants;
  constants.bulk_density_g_cm3 = args.bulk_density;
  constants.depth_m = args.depth;
  constants.area_ha = args.area;

  agronomy::CalibrationSet cs;
  std::vector<agronomy::SoilSample> eval_samples;
  if (args.calibrate_first > 0) {
    cs = agronomy::calibrate(bundle, samples, args.calibrate_first, constants,
                             args.ratio_of_means
                                 ? agronomy::RatioMode::RatioOfMeans
                                 : agronomy::RatioMode::MeanOfRatios);
    eval_samples.assign(
        samples.begin() + static_cast<std::ptrdiff_t>(args.calibrate_first),
        samples.end());
    if (!args.save_calibration_path.empty())
      agronomy::save_calibration(args.save_calibration_path, cs);
  } else {
    cs = agronomy::load_calibration(args.calibration_path);
    eval_samples = samples;
  }

  const auto kind = models::kind_of(bundle.model);
  for (auto n : {agronomy::Nutrient::P2O5, agronomy::Nutrient::K2O})
    std::cout << "factor " << agronomy::CalibrationSet::key(kind, n) << " = "
              << csv::format_double(cs.get(kind, n)) << "\n";

  csv::Table out;
  out.header = {"sample_id", "lab_p2o5_kg_ha", "pred_p2o5_kg_ha",
                "lab_k2o_kg_ha", "pred_k2o_kg_ha"};
  std::vector<double> pred_p, lab_p, pred_k, lab_k;
  if (!eval_samples.empty()) {
    auto preds = agronomy::predict_soil(bundle, eval_samples, cs, constants);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& s = eval_samples[i];
      out.rows.push_back(
          {s.id, s.lab_p2o5 ? csv::format_double(*s.lab_p2o5) : "",
           csv::format_double(preds[i].p2o5_kg_ha),
           s.lab_k2o ? csv::format_double(*s.lab_k2o) : "",
           csv::format_double(preds[i].k2o_kg_ha)});
      if (s.lab_p2o5) {
        pred_p.push_back(preds[i].p2o5_kg_ha);
        lab_p.push_back(*s.lab_p2o5);
      }
      if (s.lab_k2o) {
        pred_k.push_back(preds[i].k2o_kg_ha);
        lab_k.push_back(*s.lab_k2o);
      }
    }
  }
  csv::write_file(args.output, out);

  const auto denom = args.denominator == "prediction"
                         ? agronomy::ErrorDenominator::Prediction
                         : agronomy::ErrorDenominator::Lab;
  std::cout << "evaluation rows: " << eval_samples.size() << "\n";
  if (!pred_p.empty())
    std::cout << "p2o5 error: "
              << csv::format_double(agronomy::mape(pred_p, lab_p, denom))
              << "%\n";
  if (!pred_k.empty())
    std::cout << "k2o error: "
              << csv::format_double(agronomy::mape(pred_k, lab_k, denom))
              << "%\n";
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

struct ConvertArgs {
  double mmol = 0.0;
  std::string compound;
  double bulk_density = 1.5;
  double depth = 0.15;
  double area = 1.0;
};

int run_convert(const ConvertArgs& args) {
  agronomy::ConversionConstants constants;
  constants.bulk_density_g_cm3 = args.bulk_density;
  constants.depth_m = args.depth;
  constants.area_ha = args.area;

  std::cout << args.compound << ": " << csv::format_double(args.mmol)
            << " mmol/L\n";
  if (args.compound == "HNO3") {
    const double ppm = agronomy::mmol_to_ppm(args.mmol, constants.molar_mass_hno3);
    std::cout << "ppm: " << csv::format_double(ppm) << " mg/L\n";
    std::cout << "kg/ha: "
              << csv::format_double(agronomy::ppm_to_kg_per_ha(ppm, constants))
              << "\n";
    return 0;
  }
  const bool is_koh = args.compound == "KOH";
  const auto compound =
      is_koh ? phantom::Compound::KOH : phantom::Compound::H3PO4;
  const double oxide_mmol = agronomy::compound_to_oxide(args.mmol, compound);
  const double mass =
      is_koh ? constants.molar_mass_k2o : constants.molar_mass_p2o5;
  const double ppm = agronomy::mmol_to_ppm(oxide_mmol, mass);
  std::cout << (is_koh ? "K2O" : "P2O5") << ": "
            << csv::format_double(oxide_mmol) << " mmol/L\n";
  std::cout << "ppm: " << csv::format_double(ppm) << " mg/L\n";
  std::cout << "kg/ha: "
            << csv::format_double(agronomy::ppm_to_kg_per_ha(ppm, constants))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soil macronutrient pipeline"};
  app.require_subcommand(1);
  app.set_config("--config");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "synthesize the phantom dataset");
  gen->add_option("-o,--output", gen_args.output, "dataset CSV to write")
      ->required();
  gen->add_option("--seed", gen_args.seed, "master seed");
  gen->add_option("--noise", gen_args.noise, "relative current noise SD");
  gen->add_option("--step", gen_args.step, "volume increment, mL");
  gen->add_option("--total", gen_args.total, "final volume, mL");
  gen->add_option("--ion-model", gen_args.ion_model_path,
                  "ion model override file")
      ->check(CLI::ExistingFile);
  gen->add_option("--cell-l", gen_args.cell_l, "electrode separation, m");
  gen->add_option("--cell-a", gen_args.cell_a, "electrode area, m^2");

  FeaturizeArgs feat_args;
  auto* feat = app.add_subcommand("featurize", "extract features from sweeps");
  feat->add_option("-i,--input", feat_args.input_dir, "directory of V-I CSVs")
      ->required()
      ->check(CLI::ExistingDirectory);
  feat->add_option("-o,--output", feat_args.output, "feature CSV to write")
      ->required();
  feat->add_option("--format", feat_args.format, "output schema")
      ->check(CLI::IsMember({"soil", "dataset"}));
  feat->add_flag("--milliamps", feat_args.milliamps,
                 "input currents are in mA");
  feat->add_option("--ph-map", feat_args.ph_map_path,
                   "key-value file: stem = pH")
      ->check(CLI::ExistingFile);
  feat->add_option("--cell-l", feat_args.cell_l, "electrode separation, m");
  feat->add_option("--cell-a", feat_args.cell_a, "electrode area, m^2");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "fit one model on a dataset");
  train->add_option("-d,--data", train_args.data, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("-o,--output", train_args.output, "model file to write")
      ->required();
  train->add_option("--model", train_args.model, "regressor kind")
      ->required()
      ->check(CLI::IsMember({"linear", "knn", "forest", "nn"}));
  train->add_option("--prep", train_args.prep, "feature preprocessing")
      ->check(CLI::IsMember({"raw", "pca"}));
  train->add_option("--seed", train_args.seed, "master seed");
  train->add_option("--knn-k", train_args.knn_k, "neighbors");
  train->add_option("--trees", train_args.trees, "forest size");
  train->add_flag("--no-bootstrap", train_args.no_bootstrap,
                  "grow trees on the full sample");
  train->add_option("--epochs", train_args.epochs, "NN training epochs");
  train->add_option("--lr", train_args.lr, "NN learning rate");
  train->add_option("--activation", train_args.activation, "NN activation")
      ->check(CLI::IsMember({"relu", "identity"}));

  EvalArgs eval_args;
  auto* evalc = app.add_subcommand("eval", "cross-validated comparison");
  evalc->add_option("-d,--data", eval_args.data, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evalc->add_option("--outdir", eval_args.outdir, "report directory")
      ->required();
  evalc->add_option("--models", eval_args.models_list,
                    "'all' or comma list of linear,knn,forest,nn");
  evalc->add_option("--prep", eval_args.prep, "raw, pca, or both")
      ->check(CLI::IsMember({"raw", "pca", "both"}));
  evalc->add_option("--k", eval_args.k, "fold count");
  evalc->add_option("--seed", eval_args.seed, "master seed");
  evalc->add_option("--knn-k", eval_args.knn_k, "neighbors");
  evalc->add_option("--trees", eval_args.trees, "forest size");
  evalc->add_option("--epochs", eval_args.epochs, "NN training epochs");
  evalc->add_option("--lr", eval_args.lr, "NN learning rate");
  evalc->add_option("--activation", eval_args.activation, "NN activation")
      ->check(CLI::IsMember({"relu", "identity"}));

  PredictArgs pred_args;
  auto* predict = app.add_subcommand("predict", "soil nutrients in kg/ha");
  predict->add_option("--model", pred_args.model_path, "trained model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("-i,--input", pred_args.input, "soil sample CSV")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("-o,--output", pred_args.output, "prediction CSV")
      ->required();
  auto* source = predict->add_option_group("calibration");
  source->add_option("--calibrate-first", pred_args.calibrate_first,
                     "derive factors from the first N samples")
      ->check(CLI::PositiveNumber);
  source->add_option("--calibration", pred_args.calibration_path,
                     "calibration factor file")
      ->check(CLI::ExistingFile);
  source->require_option(1);
  predict->add_option("--save-calibration", pred_args.save_calibration_path,
                      "write derived factors here");
  predict->add_flag("--ratio-of-means", pred_args.ratio_of_means,
                    "calibrate with ratio of means instead of mean of ratios");
  predict->add_option("--denominator", pred_args.denominator,
                      "percentage-error denominator")
      ->check(CLI::IsMember({"lab", "prediction"}));
  predict->add_option("--bulk-density", pred_args.bulk_density, "g/cm^3");
  predict->add_option("--depth", pred_args.depth, "plow depth, m");
  predict->add_option("--area", pred_args.area, "area, ha");

  ConvertArgs conv_args;
  auto* convert = app.add_subcommand("convert", "unit-chain calculator");
  convert->add_option("--mmol", conv_args.mmol, "concentration, mmol/L")
      ->required();
  convert->add_option("--compound", conv_args.compound, "compound")
      ->required()
      ->check(CLI::IsMember({"HNO3", "H3PO4", "KOH"}));
  convert->add_option("--bulk-density", conv_args.bulk_density, "g/cm^3");
  convert->add_option("--depth", conv_args.depth, "plow depth, m");
  convert->add_option("--area", conv_args.area, "area, ha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (feat->parsed()) return run_featurize(feat_args);
    if (train->parsed()) return run_train(train_args);
    if (evalc->parsed()) return run_eval(eval_args);
    if (predict->parsed()) return run_predict(pred_args);
    if (convert->parsed()) return run_convert(conv_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
