#include <cmath>
#include <vector>

#include "soilml/csv.hpp"
#include "soilml/errors.hpp"
#include "soilml/models.hpp"
#include "soilml/rng.hpp"

namespace soilml::models {

std::string activation_name(Activation a) {
  return a == Activation::ReLU ? "relu" : "identity";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "identity") return Activation::Identity;
  throw ValidationError("unknown activation '" + name + "'");
}

void MlpConfig::validate() const {
  for (int h : hidden)
    if (h < 1) throw ValidationError("mlp: hidden sizes must be >= 1");
  if (epochs < 1) throw ValidationError("mlp: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("mlp: learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ValidationError("mlp: betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ValidationError("mlp: epsilon must be > 0");
}

std::string EpochCurve::to_csv() const {
  std::string out = "epoch,train_mae,val_mae\n";
  for (std::size_t e = 0; e < train_mae.size(); ++e) {
    out += std::to_string(e + 1);
    out += ',';
    out += csv::format_double(train_mae[e]);
    out += ',';
    out += (e < val_mae.size()) ? csv::format_double(val_mae[e]) : "nan";
    out += '\n';
  }
  return out;
}

void AdamState::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                     const MlpConfig& config) {
  if (params.size() != m.size() || grad.size() != m.size())
    throw ValidationError("adam: size mismatch");
  ++t;
  m = config.beta1 * m + (1.0 - config.beta1) * grad;
  v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  params.array() -= config.learning_rate * (m.array() / c1) /
                    ((v.array() / c2).sqrt() + config.epsilon);
}

namespace {

Eigen::Index params_size(const std::vector<int>& sizes) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
    n += static_cast<Eigen::Index>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  return n;
}

Eigen::Index layer_offset(const std::vector<int>& sizes, int layer) {
  Eigen::Index off = 0;
  for (int l = 0; l < layer; ++l)
    off += static_cast<Eigen::Index>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  return off;
}

}  // namespace

Eigen::Index MlpModel::n_params() const { return params_size(sizes); }

Eigen::Map<Eigen::MatrixXd> MlpModel::weight(int layer) {
  Eigen::Index off = layer_offset(sizes, layer);
  return {params.data() + off, sizes[layer + 1], sizes[layer]};
}

Eigen::Map<const Eigen::MatrixXd> MlpModel::weight(int layer) const {
  Eigen::Index off = layer_offset(sizes, layer);
  return {params.data() + off, sizes[layer + 1], sizes[layer]};
}

Eigen::Map<Eigen::VectorXd> MlpModel::bias(int layer) {
  Eigen::Index off = layer_offset(sizes, layer) +
                     static_cast<Eigen::Index>(sizes[layer + 1]) * sizes[layer];
  return {params.data() + off, sizes[layer + 1]};
}

Eigen::Map<const Eigen::VectorXd> MlpModel::bias(int layer) const {
  Eigen::Index off = layer_offset(sizes, layer) +
                     static_cast<Eigen::Index>(sizes[layer + 1]) * sizes[layer];
  return {params.data() + off, sizes[layer + 1]};
}

MlpModel MlpModel::init(int n_inputs, int n_outputs, const MlpConfig& config,
                        std::uint64_t seed) {
  config.validate();
  if (n_inputs < 1 || n_outputs < 1)
    throw ValidationError("mlp: need at least one input and one output");
  MlpModel model;
  model.sizes.push_back(n_inputs);
  for (int h : config.hidden) model.sizes.push_back(h);
  model.sizes.push_back(n_outputs);
  model.activation = config.activation;
  model.params = Eigen::VectorXd::Zero(params_size(model.sizes));

  Rng rng(seed);
  const int n_layers = static_cast<int>(model.sizes.size()) - 1;
  for (int l = 0; l < n_layers; ++l) {
    auto W = model.weight(l);
    const double bound =
        std::sqrt(6.0 / static_cast<double>(model.sizes[l] + model.sizes[l + 1]));
    for (Eigen::Index c = 0; c < W.cols(); ++c)
      for (Eigen::Index r = 0; r < W.rows(); ++r)
        W(r, c) = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return model;
}

namespace {

struct ForwardCache {
  std::vector<Eigen::MatrixXd> a;  // a[0] = X^T, a[l+1] = activation output
  std::vector<Eigen::MatrixXd> z;  // pre-activation per layer
};

void forward_pass(const MlpModel& model, const Eigen::MatrixXd& X,
                  ForwardCache& cache) {
  const int n_layers = static_cast<int>(model.sizes.size()) - 1;
  cache.a.assign(static_cast<std::size_t>(n_layers) + 1, {});
  cache.z.assign(static_cast<std::size_t>(n_layers), {});
  cache.a[0] = X.transpose();
  for (int l = 0; l < n_layers; ++l) {
    auto& z = cache.z[static_cast<std::size_t>(l)];
    z.noalias() = model.weight(l) * cache.a[static_cast<std::size_t>(l)];
    z.colwise() += model.bias(l);
    if (l + 1 < n_layers && model.activation == Activation::ReLU)
      cache.a[static_cast<std::size_t>(l) + 1] = z.cwiseMax(0.0);
    else
      cache.a[static_cast<std::size_t>(l) + 1] = z;
  }
}

}  // namespace

Eigen::MatrixXd MlpModel::predict(const Eigen::MatrixXd& X) const {
  if (X.cols() != sizes.front())
    throw ValidationError("mlp: feature count mismatch");
  ForwardCache cache;
  forward_pass(*this, X, cache);
  return cache.a.back().transpose();
}

double MlpModel::loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) const {
  if (Y.rows() != X.rows() || Y.cols() != sizes.back())
    throw ValidationError("mlp: target shape mismatch");
  ForwardCache cache;
  forward_pass(*this, X, cache);
  return (cache.a.back() - Y.transpose()).cwiseAbs().mean();
}

Eigen::VectorXd MlpModel::gradient(const Eigen::MatrixXd& X,
                                   const Eigen::MatrixXd& Y) const {
  double ignored;
  Eigen::VectorXd g(n_params());
  backward(X, Y, g, ignored);
  return g;
}

void MlpModel::backward(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                        Eigen::VectorXd& grad, double& loss_out) const {
  if (Y.rows() != X.rows() || Y.cols() != sizes.back())
    throw ValidationError("mlp: target shape mismatch");
  const int n_layers = static_cast<int>(sizes.size()) - 1;
  ForwardCache cache;
  forward_pass(*this, X, cache);

  const double denom = static_cast<double>(Y.rows()) * Y.cols();
  Eigen::MatrixXd diff = cache.a.back() - Y.transpose();
  loss_out = diff.cwiseAbs().sum() / denom;

  grad.resize(n_params());
  Eigen::MatrixXd g = diff.array().sign().matrix() / denom;
  for (int l = n_layers - 1; l >= 0; --l) {
    Eigen::Index off = layer_offset(sizes, l);
    Eigen::Map<Eigen::MatrixXd> dW(grad.data() + off, sizes[l + 1], sizes[l]);
    Eigen::Map<Eigen::VectorXd> db(
        grad.data() + off + static_cast<Eigen::Index>(sizes[l + 1]) * sizes[l],
        sizes[l + 1]);
    dW.noalias() = g * cache.a[static_cast<std::size_t>(l)].transpose();
    db = g.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back;
      back.noalias() = weight(l).transpose() * g;
      if (activation == Activation::ReLU)
        g = back.cwiseProduct(
            (cache.z[static_cast<std::size_t>(l) - 1].array() > 0.0)
                .cast<double>()
                .matrix());
      else
        g = std::move(back);
    }
  }
}

MlpModel MlpModel::fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       const MlpConfig& config, std::uint64_t seed,
                       const Eigen::MatrixXd* val_X,
                       const Eigen::MatrixXd* val_Y, EpochCurve* curve) {
  config.validate();
  if (X.rows() != Y.rows()) throw ValidationError("mlp: X and Y row counts differ");
  if (X.rows() < 1) throw InsufficientDataError("mlp: empty training set");
  if (!X.allFinite() || !Y.allFinite())
    throw ValidationError("mlp: non-finite input");
  if ((val_X == nullptr) != (val_Y == nullptr))
    throw ValidationError("mlp: validation X and Y must come together");

  MlpModel model = MlpModel::init(static_cast<int>(X.cols()),
                                  static_cast<int>(Y.cols()), config, seed);
  AdamState adam(model.n_params());
  Eigen::VectorXd grad(model.n_params());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double train_loss = 0.0;
    model.backward(X, Y, grad, train_loss);
    if (!std::isfinite(train_loss))
      throw DivergenceError(epoch, "mlp: non-finite training loss");
    if (curve) {
      curve->train_mae.push_back(train_loss);
      if (val_X) curve->val_mae.push_back(model.loss(*val_X, *val_Y));
    }
    adam.step(model.params, grad, config);
    if (!model.params.allFinite())
      throw DivergenceError(epoch, "mlp: non-finite parameters");
  }
  return model;
}

}  // namespace soilml::models
