#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "soilml/dataset.hpp"

namespace soilml::models {

/// Multi-output ordinary least squares with intercept.
struct LinearModel {
  Eigen::MatrixXd W;     // n_features x n_outputs
  Eigen::RowVectorXd b;  // intercepts

  static LinearModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);
  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;
};

/// Uniform-weight Euclidean k nearest neighbors. Distance ties go to the
/// lower training-row index.
struct KnnModel {
  Eigen::MatrixXd train_X;
  Eigen::MatrixXd train_Y;
  int k = 5;

  static KnnModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                      int k = 5);
  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;
};

/// Flat binary tree node. feature < 0 marks a leaf carrying the prediction;
/// internal nodes send x(feature) <= threshold left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Eigen::RowVectorXd value;
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0

  const Eigen::RowVectorXd& predict_row(
      const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct ForestConfig {
  int n_trees = 20;
  bool bootstrap = true;
  int max_depth = 0;  // 0 means unlimited
  int min_samples_split = 2;

  void validate() const;
};

/// Bagged regression trees split by minimum total absolute deviation around
/// the children's medians; leaves predict per-output medians, the forest
/// averages over trees.
struct ForestModel {
  ForestConfig config;
  std::vector<Tree> trees;

  static ForestModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         const ForestConfig& config, std::uint64_t seed);
  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;
};

enum class Activation { ReLU, Identity };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);

struct MlpConfig {
  std::vector<int> hidden = {500, 500};
  Activation activation = Activation::ReLU;
  int epochs = 700;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Train and validation MAE per epoch, both evaluated at the parameters the
/// epoch started from.
struct EpochCurve {
  std::vector<double> train_mae;
  std::vector<double> val_mae;  // empty when no validation set was given

  std::string to_csv() const;  // epoch,train_mae,val_mae
};

/// One full-batch Adam update, kept freestanding so the closed-form
/// single-step identity is testable in isolation.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;

  explicit AdamState(Eigen::Index n)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
            const MlpConfig& config);
};

/// Fully connected net, all parameters in one flat vector. Hidden layers
/// share one activation; the output layer is linear. Trained by full-batch
/// Adam on MAE.
struct MlpModel {
  std::vector<int> sizes;  // e.g. {3, 500, 500, 3}
  Activation activation = Activation::ReLU;
  Eigen::VectorXd params;

  /// Glorot-uniform weights, zero biases.
  static MlpModel init(int n_inputs, int n_outputs, const MlpConfig& config,
                       std::uint64_t seed);

  static MlpModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                      const MlpConfig& config, std::uint64_t seed,
                      const Eigen::MatrixXd* val_X = nullptr,
                      const Eigen::MatrixXd* val_Y = nullptr,
                      EpochCurve* curve = nullptr);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;

  /// Mean absolute error of predict(X) against Y.
  double loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) const;

  /// Subgradient of loss with respect to params (sign(0) taken as 0).
  Eigen::VectorXd gradient(const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y) const;

  /// Loss and gradient from one shared forward pass.
  void backward(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                Eigen::VectorXd& grad, double& loss_out) const;

  Eigen::Index n_params() const;
  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
};

enum class ModelKind { Linear, Knn, Forest, Mlp };

using Model = std::variant<LinearModel, KnnModel, ForestModel, MlpModel>;

ModelKind kind_of(const Model& m);
std::string kind_name(ModelKind k);
ModelKind parse_kind(const std::string& name);

Eigen::MatrixXd predict(const Model& m, const Eigen::MatrixXd& X);

/// A fitted model together with the feature transform it was trained behind.
struct Bundle {
  dataset::Pipeline pipeline;
  Model model;
};

/// Self-describing text container, doubles in hexfloat, so a load-save
/// round trip reproduces predictions bit for bit.
std::string serialize_bundle(const Bundle& b);
Bundle deserialize_bundle(std::string_view text, const std::string& name);
void save_bundle(const std::string& path, const Bundle& b);
Bundle load_bundle(const std::string& path);

}  // namespace soilml::models
