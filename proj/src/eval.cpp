#include "soilml/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "soilml/csv.hpp"
#include "soilml/errors.hpp"
#include "soilml/rng.hpp"

namespace soilml::eval {

double mae(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Yhat) {
  if (Y.rows() != Yhat.rows() || Y.cols() != Yhat.cols())
    throw ValidationError("mae: shape mismatch");
  if (Y.size() == 0) throw ValidationError("mae: empty input");
  return (Y - Yhat).cwiseAbs().mean();
}

double r_squared(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Yhat) {
  if (Y.rows() != Yhat.rows() || Y.cols() != Yhat.cols())
    throw ValidationError("r_squared: shape mismatch");
  if (Y.rows() < 2) throw ValidationError("r_squared: need at least 2 rows");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    const double mean = Y.col(j).mean();
    const double ss_tot = (Y.col(j).array() - mean).square().sum();
    if (!(ss_tot > 0.0))
      throw UndefinedScoreError("r_squared: output " + std::to_string(j) +
                                " has zero variance");
    const double ss_res = (Y.col(j) - Yhat.col(j)).squaredNorm();
    acc += 1.0 - ss_res / ss_tot;
  }
  return acc / static_cast<double>(Y.cols());
}

std::string preprocessing_name(Preprocessing p) {
  return p == Preprocessing::Raw ? "raw" : "pca";
}

Preprocessing parse_preprocessing(const std::string& name) {
  if (name == "raw") return Preprocessing::Raw;
  if (name == "pca") return Preprocessing::Pca;
  throw ValidationError("unknown preprocessing '" + name + "'");
}

namespace {

models::Model fit_one(const ModelConfig& config, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, std::uint64_t seed,
                      const Eigen::MatrixXd* val_X, const Eigen::MatrixXd* val_Y,
                      models::EpochCurve* curve) {
  switch (config.kind) {
    case models::ModelKind::Linear:
      return models::LinearModel::fit(X, Y);
    case models::ModelKind::Knn:
      return models::KnnModel::fit(X, Y, config.knn_k);
    case models::ModelKind::Forest:
      return models::ForestModel::fit(X, Y, config.forest, seed);
    case models::ModelKind::Mlp:
      return models::MlpModel::fit(X, Y, config.mlp, seed, val_X, val_Y, curve);
  }
  throw ValidationError("unknown model kind");
}

std::optional<double> try_r2(const Eigen::MatrixXd& Y,
                             const Eigen::MatrixXd& Yhat) {
  try {
    return r_squared(Y, Yhat);
  } catch (const UndefinedScoreError&) {
    return std::nullopt;
  } catch (const ValidationError&) {
    return std::nullopt;  // single-row folds have no defined R^2
  }
}

}  // namespace

std::vector<FoldResult> run_cv(const dataset::FeatureTable& table,
                               const ModelConfig& config, Preprocessing prep,
                               const dataset::KFoldPlan& plan,
                               std::uint64_t seed) {
  table.validate();
  if (plan.rows() != table.rows())
    throw ValidationError("run_cv: plan does not cover the table");

  std::vector<FoldResult> out;
  out.reserve(plan.folds.size());
  for (int f = 0; f < static_cast<int>(plan.folds.size()); ++f) {
    const auto train_idx = plan.train_indices(f);
    const auto& test_idx = plan.folds[static_cast<std::size_t>(f)];

    Eigen::MatrixXd Xtr = dataset::take_rows(table.X, train_idx);
    Eigen::MatrixXd Ytr = dataset::take_rows(table.Y, train_idx);
    Eigen::MatrixXd Xte = dataset::take_rows(table.X, test_idx);
    Eigen::MatrixXd Yte = dataset::take_rows(table.Y, test_idx);

    dataset::Pipeline pipeline;
    pipeline.scaler = dataset::StandardScaler::fit(Xtr);
    Eigen::MatrixXd Ztr = pipeline.scaler.transform(Xtr);
    if (prep == Preprocessing::Pca) {
      pipeline.pca = dataset::Pca::fit(Ztr);
      Ztr = pipeline.pca->transform(Ztr);
    }
    Eigen::MatrixXd Zte = pipeline.transform(Xte);

    FoldResult res;
    res.kind = config.kind;
    res.prep = prep;
    res.fold = f;

    const std::uint64_t fold_seed =
        derive_seed(seed, "cv." + models::kind_name(config.kind),
                    static_cast<std::uint64_t>(f));
    models::EpochCurve curve;
    models::Model model =
        fit_one(config, Ztr, Ytr, fold_seed,
                config.kind == models::ModelKind::Mlp ? &Zte : nullptr,
                config.kind == models::ModelKind::Mlp ? &Yte : nullptr,
                config.kind == models::ModelKind::Mlp ? &curve : nullptr);

    Eigen::MatrixXd train_pred = models::predict(model, Ztr);
    Eigen::MatrixXd test_pred = models::predict(model, Zte);
    res.train_mae = mae(Ytr, train_pred);
    res.test_mae = mae(Yte, test_pred);
    res.train_r2 = try_r2(Ytr, train_pred);
    res.test_r2 = try_r2(Yte, test_pred);
    if (config.kind == models::ModelKind::Mlp) res.curve = std::move(curve);
    out.push_back(std::move(res));
  }
  return out;
}

models::Bundle fit_full(const dataset::FeatureTable& table,
                        const ModelConfig& config, Preprocessing prep,
                        std::uint64_t seed) {
  table.validate();
  models::Bundle bundle;
  bundle.pipeline.scaler = dataset::StandardScaler::fit(table.X);
  Eigen::MatrixXd Z = bundle.pipeline.scaler.transform(table.X);
  if (prep == Preprocessing::Pca) {
    bundle.pipeline.pca = dataset::Pca::fit(Z);
    Z = bundle.pipeline.pca->transform(Z);
  }
  const std::uint64_t fit_seed =
      derive_seed(seed, "train." + models::kind_name(config.kind), 0);
  bundle.model = fit_one(config, Z, table.Y, fit_seed, nullptr, nullptr, nullptr);
  return bundle;
}

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) throw ValidationError("mean_sd: empty sample");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

ComparisonReport compare_models(const std::vector<FoldResult>& results) {
  if (results.empty()) throw ValidationError("compare_models: no results");
  std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& r : results) {
    auto& g = groups[{static_cast<int>(r.kind), static_cast<int>(r.prep)}];
    g.first.push_back(r.train_mae);
    g.second.push_back(r.test_mae);
  }

  ComparisonReport report;
  for (const auto& [key, maes] : groups) {
    ComparisonRow row;
    row.kind = static_cast<models::ModelKind>(key.first);
    row.prep = static_cast<Preprocessing>(key.second);
    std::tie(row.mean_train, row.sd_train) = mean_sd(maes.first);
    std::tie(row.mean_test, row.sd_test) = mean_sd(maes.second);
    report.rows.push_back(row);
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ComparisonRow& a, const ComparisonRow& b) {
              if (a.mean_test != b.mean_test) return a.mean_test < b.mean_test;
              if (a.kind != b.kind) return a.kind < b.kind;
              return a.prep < b.prep;
            });
  return report;
}

std::string ComparisonReport::to_csv() const {
  std::string out = "model,preprocessing,split,mean_mae,sd_mae\n";
  for (const auto& row : rows) {
    const std::string head =
        models::kind_name(row.kind) + "," + preprocessing_name(row.prep);
    out += head + ",train," + csv::format_double(row.mean_train) + "," +
           csv::format_double(row.sd_train) + "\n";
    out += head + ",test," + csv::format_double(row.mean_test) + "," +
           csv::format_double(row.sd_test) + "\n";
  }
  return out;
}

}  // namespace soilml::eval
