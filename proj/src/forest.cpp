#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "soilml/errors.hpp"
#include "soilml/models.hpp"
#include "soilml/rng.hpp"

namespace soilml::models {

void ForestConfig::validate() const {
  if (n_trees < 1) throw ValidationError("forest: need at least one tree");
  if (max_depth < 0) throw ValidationError("forest: negative max_depth");
  if (min_samples_split < 2)
    throw ValidationError("forest: min_samples_split below 2");
}

const Eigen::RowVectorXd& Tree::predict_row(
    const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int at = 0;
  while (true) {
    const TreeNode& node = nodes[static_cast<std::size_t>(at)];
    if (node.feature < 0) return node.value;
    at = (x(node.feature) <= node.threshold) ? node.left : node.right;
  }
}

namespace {

// Order statistics of a shifting sample: balanced low/high multisets with
// running sums, so the L1 cost around the median updates in O(log n) per
// move. low_ holds the extra element when the count is odd.
class RunningMedian {
 public:
  void insert(double x) {
    if (low_.empty() || x <= *low_.rbegin()) {
      low_.insert(x);
      sum_low_ += x;
    } else {
      high_.insert(x);
      sum_high_ += x;
    }
    rebalance();
  }

  void erase(double x) {
    auto it = low_.find(x);
    if (it != low_.end()) {
      low_.erase(it);
      sum_low_ -= x;
    } else {
      it = high_.find(x);
      if (it == high_.end()) throw ValidationError("median: erase of absent value");
      high_.erase(it);
      sum_high_ -= x;
    }
    rebalance();
  }

  std::size_t size() const { return low_.size() + high_.size(); }

  double median() const {
    if (low_.empty()) throw ValidationError("median: empty sample");
    if (low_.size() > high_.size()) return *low_.rbegin();
    return 0.5 * (*low_.rbegin() + *high_.begin());
  }

  /// Sum of |y - median()| over the sample. Exact for any median position
  /// between the halves.
  double abs_cost() const {
    if (size() == 0) return 0.0;
    const double m = median();
    return (sum_high_ - m * static_cast<double>(high_.size())) +
           (m * static_cast<double>(low_.size()) - sum_low_);
  }

 private:
  void rebalance() {
    if (low_.size() > high_.size() + 1) {
      auto it = std::prev(low_.end());
      sum_low_ -= *it;
      sum_high_ += *it;
      high_.insert(*it);
      low_.erase(it);
    } else if (high_.size() > low_.size()) {
      auto it = high_.begin();
      sum_high_ -= *it;
      sum_low_ += *it;
      low_.insert(*it);
      high_.erase(it);
    }
  }

  std::multiset<double> low_, high_;
  double sum_low_ = 0.0, sum_high_ = 0.0;
};

struct Builder {
  const Eigen::MatrixXd& X;
  const Eigen::MatrixXd& Y;
  const ForestConfig& config;
  std::vector<TreeNode> nodes;

  Eigen::RowVectorXd leaf_value(const std::vector<Eigen::Index>& samples) const {
    Eigen::RowVectorXd value(Y.cols());
    std::vector<double> col(samples.size());
    for (Eigen::Index out = 0; out < Y.cols(); ++out) {
      for (std::size_t i = 0; i < samples.size(); ++i) col[i] = Y(samples[i], out);
      std::sort(col.begin(), col.end());
      const std::size_t n = col.size();
      value(out) = (n % 2 == 1) ? col[n / 2]
                                : 0.5 * (col[n / 2 - 1] + col[n / 2]);
    }
    return value;
  }

  int make_leaf(const std::vector<Eigen::Index>& samples) {
    TreeNode node;
    node.value = leaf_value(samples);
    nodes.push_back(std::move(node));
    return static_cast<int>(nodes.size()) - 1;
  }

  int build(std::vector<Eigen::Index>& samples, int depth) {
    const std::size_t n = samples.size();
    if (n < static_cast<std::size_t>(config.min_samples_split) ||
        (config.max_depth > 0 && depth >= config.max_depth))
      return make_leaf(samples);

    // Node purity: zero L1 cost means every split is pointless.
    {
      double node_cost = 0.0;
      for (Eigen::Index out = 0; out < Y.cols(); ++out) {
        RunningMedian rm;
        for (auto i : samples) rm.insert(Y(i, out));
        node_cost += rm.abs_cost();
      }
      if (node_cost == 0.0) return make_leaf(samples);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();

    std::vector<Eigen::Index> order(samples);
    std::vector<RunningMedian> left(static_cast<std::size_t>(Y.cols()));
    std::vector<RunningMedian> right(static_cast<std::size_t>(Y.cols()));
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
      std::sort(order.begin(), order.end(),
                [this, f](Eigen::Index a, Eigen::Index b) {
                  return X(a, f) < X(b, f);
                });
      for (Eigen::Index out = 0; out < Y.cols(); ++out) {
        left[static_cast<std::size_t>(out)] = RunningMedian();
        right[static_cast<std::size_t>(out)] = RunningMedian();
        for (auto i : order) right[static_cast<std::size_t>(out)].insert(Y(i, out));
      }
      for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        for (Eigen::Index out = 0; out < Y.cols(); ++out) {
          const double y = Y(order[pos], out);
          left[static_cast<std::size_t>(out)].insert(y);
          right[static_cast<std::size_t>(out)].erase(y);
        }
        const double a = X(order[pos], f);
        const double b = X(order[pos + 1], f);
        if (a == b) continue;
        const double threshold = 0.5 * (a + b);
        if (!(threshold < b)) continue;  // midpoint collapsed onto b
        double cost = 0.0;
        for (Eigen::Index out = 0; out < Y.cols(); ++out)
          cost += left[static_cast<std::size_t>(out)].abs_cost() +
                  right[static_cast<std::size_t>(out)].abs_cost();
        if (cost < best_cost) {
          best_cost = cost;
          best_feature = static_cast<int>(f);
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) return make_leaf(samples);

    std::vector<Eigen::Index> ls, rs;
    for (auto i : samples)
      (X(i, best_feature) <= best_threshold ? ls : rs).push_back(i);

    TreeNode node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    nodes.push_back(std::move(node));
    const int at = static_cast<int>(nodes.size()) - 1;
    const int l = build(ls, depth + 1);
    const int r = build(rs, depth + 1);
    nodes[static_cast<std::size_t>(at)].left = l;
    nodes[static_cast<std::size_t>(at)].right = r;
    return at;
  }
};

}  // namespace

ForestModel ForestModel::fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                             const ForestConfig& config, std::uint64_t seed) {
  config.validate();
  if (X.rows() != Y.rows())
    throw ValidationError("forest: X and Y row counts differ");
  if (X.rows() < 2) throw InsufficientDataError("forest: need at least 2 rows");
  if (!X.allFinite() || !Y.allFinite())
    throw ValidationError("forest: non-finite input");

  ForestModel model;
  model.config = config;
  model.trees.reserve(static_cast<std::size_t>(config.n_trees));
  const Eigen::Index n = X.rows();
  for (int t = 0; t < config.n_trees; ++t) {
    std::vector<Eigen::Index> samples(static_cast<std::size_t>(n));
    if (config.bootstrap) {
      Rng rng(derive_seed(seed, "forest.tree", static_cast<std::uint64_t>(t)));
      for (auto& s : samples)
        s = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      std::iota(samples.begin(), samples.end(), Eigen::Index{0});
    }
    Builder builder{X, Y, config, {}};
    builder.build(samples, 0);
    model.trees.push_back(Tree{std::move(builder.nodes)});
  }
  return model;
}

Eigen::MatrixXd ForestModel::predict(const Eigen::MatrixXd& X) const {
  if (trees.empty()) throw ValidationError("forest: model has no trees");
  // Any leaf fixes the output arity; the root may be internal, so scan.
  Eigen::Index n_out = 0;
  for (const auto& node : trees.front().nodes)
    if (node.feature < 0) {
      n_out = node.value.size();
      break;
    }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), n_out);
  for (Eigen::Index q = 0; q < X.rows(); ++q) {
    for (const auto& tree : trees) out.row(q) += tree.predict_row(X.row(q));
  }
  return out / static_cast<double>(trees.size());
}

}  // namespace soilml::models
