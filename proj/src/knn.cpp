#include <algorithm>
#include <numeric>

#include "soilml/errors.hpp"
#include "soilml/models.hpp"

namespace soilml::models {

KnnModel KnnModel::fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       int k) {
  if (X.rows() == 0) throw ValidationError("knn: empty training set");
  if (Y.rows() != X.rows())
    throw ValidationError("knn: X and Y row counts differ");
  if (k < 1 || static_cast<Eigen::Index>(k) > X.rows())
    throw ValidationError("knn: k must lie in [1, n_train]");
  if (!X.allFinite() || !Y.allFinite())
    throw ValidationError("knn: non-finite input");
  return KnnModel{X, Y, k};
}

Eigen::MatrixXd KnnModel::predict(const Eigen::MatrixXd& X) const {
  if (X.cols() != train_X.cols())
    throw ValidationError("knn: feature count mismatch");
  const Eigen::Index n_train = train_X.rows();
  Eigen::MatrixXd out(X.rows(), train_Y.cols());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  Eigen::VectorXd d2(n_train);
  for (Eigen::Index q = 0; q < X.rows(); ++q) {
    d2 = (train_X.rowwise() - X.row(q)).rowwise().squaredNorm();
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // lower index wins ties, hence the lexicographic comparator
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                     [&d2](Eigen::Index a, Eigen::Index b) {
                       if (d2(a) != d2(b)) return d2(a) < d2(b);
                       return a < b;
                     });
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(train_Y.cols());
    for (int i = 0; i < k; ++i) acc += train_Y.row(order[static_cast<std::size_t>(i)]);
    out.row(q) = acc / static_cast<double>(k);
  }
  return out;
}

}  // namespace soilml::models
