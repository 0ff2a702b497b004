#include <Eigen/QR>

#include "soilml/errors.hpp"
#include "soilml/models.hpp"

namespace soilml::models {

LinearModel LinearModel::fit(const Eigen::MatrixXd& X,
                             const Eigen::MatrixXd& Y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (Y.rows() != n) throw ValidationError("linear: X and Y row counts differ");
  if (n <= p)
    throw InsufficientDataError("linear: need more rows than features");
  if (!X.allFinite() || !Y.allFinite())
    throw ValidationError("linear: non-finite input");

  Eigen::MatrixXd A(n, p + 1);
  A.leftCols(p) = X;
  A.col(p).setOnes();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < p + 1)
    throw SingularDesignError("linear: design matrix is rank deficient");

  Eigen::MatrixXd coef = qr.solve(Y);  // (p+1) x n_outputs
  LinearModel m;
  m.W = coef.topRows(p);
  m.b = coef.row(p);
  return m;
}

Eigen::MatrixXd LinearModel::predict(const Eigen::MatrixXd& X) const {
  if (X.cols() != W.rows())
    throw ValidationError("linear: feature count mismatch");
  return (X * W).rowwise() + b;
}

}  // namespace soilml::models
