#include "soilml/dataset.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "soilml/csv.hpp"
#include "soilml/errors.hpp"
#include "soilml/rng.hpp"

namespace soilml::dataset {

void FeatureTable::validate() const {
  if (X.rows() != Y.rows())
    throw ValidationError("table: X and Y row counts differ");
  if (X.rows() < 2) throw InsufficientDataError("table: need at least 2 rows");
  if (static_cast<std::size_t>(X.cols()) != feature_names.size())
    throw ValidationError("table: feature name count mismatch");
  if (static_cast<std::size_t>(Y.cols()) != target_names.size())
    throw ValidationError("table: target name count mismatch");
  if (!X.allFinite() || !Y.allFinite())
    throw ValidationError("table: non-finite entry");
}

FeatureTable FeatureTable::read_csv(const std::string& path) {
  auto t = csv::read_file(path, /*has_header=*/true);
  FeatureTable out;
  std::vector<std::string> want;
  for (auto* n : kFeatureNames) want.emplace_back(n);
  for (auto* n : kTargetNames) want.emplace_back(n);
  if (t.header != want)
    throw ValidationError(path + ": unexpected header for a dataset CSV");
  const Eigen::Index n = static_cast<Eigen::Index>(t.rows.size());
  out.X.resize(n, 3);
  out.Y.resize(n, 3);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    try {
      for (int c = 0; c < 3; ++c) out.X(r, c) = csv::parse_double(row[c]);
      for (int c = 0; c < 3; ++c) out.Y(r, c) = csv::parse_double(row[3 + c]);
    } catch (const ValidationError& e) {
      throw ParseError(path, static_cast<std::size_t>(r) + 2, e.what());
    }
  }
  out.validate();
  return out;
}

std::string FeatureTable::to_csv() const {
  csv::Table t;
  for (const auto& n : feature_names) t.header.push_back(n);
  for (const auto& n : target_names) t.header.push_back(n);
  for (Eigen::Index r = 0; r < rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(6);
    for (Eigen::Index c = 0; c < X.cols(); ++c)
      row.push_back(csv::format_double(X(r, c)));
    for (Eigen::Index c = 0; c < Y.cols(); ++c)
      row.push_back(csv::format_double(Y(r, c)));
    t.rows.push_back(std::move(row));
  }
  return csv::to_string(t);
}

void FeatureTable::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << to_csv();
  if (!out) throw ValidationError("write failed for " + path);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m,
                          const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= m.rows())
      throw ValidationError("take_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  }
  return out;
}

StandardScaler StandardScaler::fit(const Eigen::MatrixXd& X) {
  if (X.rows() < 2)
    throw InsufficientDataError("scaler: need at least 2 rows");
  StandardScaler s;
  const double n = static_cast<double>(X.rows());
  s.mean_ = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - s.mean_;
  s.sd_ = (centered.array().square().colwise().sum() / n).sqrt();
  for (Eigen::Index j = 0; j < s.sd_.size(); ++j) {
    double floor = 1e-12 * std::max(1.0, std::abs(s.mean_(j)));
    if (!(s.sd_(j) > floor))
      throw DegenerateFeatureError("scaler: column " + std::to_string(j) +
                                   " is constant");
  }
  return s;
}

StandardScaler StandardScaler::from_moments(const Eigen::RowVectorXd& mean,
                                            const Eigen::RowVectorXd& sd) {
  if (mean.size() != sd.size())
    throw ValidationError("scaler: mean and sd lengths differ");
  for (Eigen::Index j = 0; j < sd.size(); ++j)
    if (!(sd(j) > 0.0) || !std::isfinite(sd(j)))
      throw ValidationError("scaler: stored sd must be > 0");
  StandardScaler s;
  s.mean_ = mean;
  s.sd_ = sd;
  return s;
}

Eigen::MatrixXd StandardScaler::transform(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean_.size())
    throw ValidationError("scaler: column count mismatch");
  return (X.rowwise() - mean_).array().rowwise() / sd_.array();
}

Pca Pca::fit(const Eigen::MatrixXd& X, int n_components) {
  if (X.rows() < 2) throw InsufficientDataError("pca: need at least 2 rows");
  const int p = static_cast<int>(X.cols());
  if (n_components < 0) n_components = p;
  if (n_components == 0 || n_components > p)
    throw ValidationError("pca: n_components must be in [1, n_features]");

  Pca f;
  f.mean_ = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - f.mean_;
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(X.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw ValidationError("pca: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; flip to descending and fix each
  // component's sign so the largest-magnitude coefficient is positive.
  f.components_.resize(n_components, p);
  f.variance_.resize(n_components);
  for (int c = 0; c < n_components; ++c) {
    int src = p - 1 - c;
    Eigen::VectorXd comp = es.eigenvectors().col(src);
    Eigen::Index imax = 0;
    comp.cwiseAbs().maxCoeff(&imax);
    if (comp(imax) < 0.0) comp = -comp;
    f.components_.row(c) = comp.transpose();
    f.variance_(c) = std::max(0.0, es.eigenvalues()(src));
  }
  return f;
}

Pca Pca::from_parts(const Eigen::RowVectorXd& mean,
                    const Eigen::MatrixXd& components,
                    const Eigen::VectorXd& explained_variance) {
  if (components.cols() != mean.size())
    throw ValidationError("pca: component width and mean length differ");
  if (components.rows() != explained_variance.size())
    throw ValidationError("pca: component and variance counts differ");
  for (Eigen::Index i = 0; i < explained_variance.size(); ++i) {
    if (!(explained_variance(i) >= 0.0))
      throw ValidationError("pca: stored variance must be >= 0");
    if (i > 0 && explained_variance(i) > explained_variance(i - 1))
      throw ValidationError("pca: stored variances must be non-increasing");
  }
  Pca f;
  f.mean_ = mean;
  f.components_ = components;
  f.variance_ = explained_variance;
  return f;
}

Eigen::MatrixXd Pca::transform(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean_.size())
    throw ValidationError("pca: column count mismatch");
  return (X.rowwise() - mean_) * components_.transpose();
}

Eigen::MatrixXd Pca::inverse(const Eigen::MatrixXd& Z) const {
  if (Z.cols() != components_.rows())
    throw ValidationError("pca: component count mismatch");
  return (Z * components_).rowwise() + mean_;
}

Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&v](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && v(order[static_cast<std::size_t>(j + 1)]) ==
                            v(order[static_cast<std::size_t>(i)]))
      ++j;
    // positions i..j (0-based) share the midrank
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index t = i; t <= j; ++t)
      ranks(order[static_cast<std::size_t>(t)]) = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
  if (x.size() < 3)
    throw InsufficientDataError("spearman: need at least 3 samples");
  Eigen::VectorXd rx = average_ranks(x);
  Eigen::VectorXd ry = average_ranks(y);
  rx.array() -= rx.mean();
  ry.array() -= ry.mean();
  const double vx = rx.squaredNorm();
  const double vy = ry.squaredNorm();
  if (vx <= 0.0 || vy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return rx.dot(ry) / std::sqrt(vx * vy);
}

Eigen::MatrixXd spearman_matrix(const FeatureTable& table) {
  table.validate();
  if (table.rows() < 3)
    throw InsufficientDataError("spearman: need at least 3 rows");
  Eigen::MatrixXd cols(table.rows(), table.X.cols() + table.Y.cols());
  cols << table.X, table.Y;
  const Eigen::Index p = cols.cols();
  Eigen::MatrixXd out(p, p);
  auto constant = [&cols](Eigen::Index c) {
    return cols.col(c).minCoeff() == cols.col(c).maxCoeff();
  };
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      double r;
      if (i == j)
        r = constant(i) ? std::numeric_limits<double>::quiet_NaN() : 1.0;
      else
        r = spearman(cols.col(i), cols.col(j));
      out(i, j) = r;
      out(j, i) = r;
    }
  }
  return out;
}

Eigen::Index KFoldPlan::rows() const {
  Eigen::Index n = 0;
  for (const auto& f : folds) n += static_cast<Eigen::Index>(f.size());
  return n;
}

std::vector<Eigen::Index> KFoldPlan::train_indices(int fold) const {
  if (fold < 0 || fold >= static_cast<int>(folds.size()))
    throw ValidationError("kfold: fold index out of range");
  std::vector<Eigen::Index> out;
  for (int f = 0; f < static_cast<int>(folds.size()); ++f)
    if (f != fold)
      out.insert(out.end(), folds[static_cast<std::size_t>(f)].begin(),
                 folds[static_cast<std::size_t>(f)].end());
  return out;
}

KFoldPlan make_kfold(Eigen::Index n_rows, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("kfold: k must be at least 2");
  if (static_cast<Eigen::Index>(k) > n_rows)
    throw ValidationError("kfold: k exceeds row count");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_rows));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(seed);
  rng.shuffle(perm);

  KFoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(static_cast<std::size_t>(k));
  const Eigen::Index base = n_rows / k;
  const Eigen::Index extra = n_rows % k;
  std::size_t at = 0;
  for (int f = 0; f < k; ++f) {
    Eigen::Index len = base + (f < extra ? 1 : 0);
    auto& fold = plan.folds[static_cast<std::size_t>(f)];
    fold.assign(perm.begin() + static_cast<std::ptrdiff_t>(at),
                perm.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += static_cast<std::size_t>(len);
  }
  return plan;
}

}  // namespace soilml::dataset
