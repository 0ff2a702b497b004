#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soilml/dataset.hpp"
#include "soilml/models.hpp"

namespace soilml::eval {

/// Mean absolute error, uniform over samples and outputs.
double mae(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Yhat);

/// Coefficient of determination per output, averaged uniformly.
double r_squared(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Yhat);

enum class Preprocessing { Raw, Pca };

std::string preprocessing_name(Preprocessing p);
Preprocessing parse_preprocessing(const std::string& name);

/// Which regressor to run and its knobs. Only the block matching `kind`
/// is consulted.
struct ModelConfig {
  models::ModelKind kind = models::ModelKind::Linear;
  int knn_k = 5;
  models::ForestConfig forest;
  models::MlpConfig mlp;
};

struct FoldResult {
  models::ModelKind kind = models::ModelKind::Linear;
  Preprocessing prep = Preprocessing::Raw;
  int fold = 0;
  double train_mae = 0.0;
  double test_mae = 0.0;
  std::optional<double> train_r2;
  std::optional<double> test_r2;
  std::optional<models::EpochCurve> curve;  // neural net folds only
};

/// One full pass over the plan: per fold, fit the scaler (and PCA when
/// enabled) on the training segments only, transform both segments, fit the
/// model, and score it. The validation segment doubles as the neural net's
/// epoch-curve set. Model seeds derive from (seed, kind, fold).
std::vector<FoldResult> run_cv(const dataset::FeatureTable& table,
                               const ModelConfig& config, Preprocessing prep,
                               const dataset::KFoldPlan& plan,
                               std::uint64_t seed);

/// Fit on every row, wrapped with its transform for later prediction.
models::Bundle fit_full(const dataset::FeatureTable& table,
                        const ModelConfig& config, Preprocessing prep,
                        std::uint64_t seed);

struct ComparisonRow {
  models::ModelKind kind = models::ModelKind::Linear;
  Preprocessing prep = Preprocessing::Raw;
  double mean_train = 0.0;
  double sd_train = 0.0;
  double mean_test = 0.0;
  double sd_test = 0.0;
};

/// Rows ranked by ascending mean test MAE; ties fall back to the enum
/// orders, so the ranking never depends on input order.
struct ComparisonReport {
  std::vector<ComparisonRow> rows;

  /// Schema: model,preprocessing,split,mean_mae,sd_mae
  std::string to_csv() const;
};

ComparisonReport compare_models(const std::vector<FoldResult>& results);

/// Mean and population SD (divisor n) of a sample.
std::pair<double, double> mean_sd(const std::vector<double>& xs);

}  // namespace soilml::eval
