#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace soilml::dataset {

inline constexpr std::array<const char*, 3> kFeatureNames = {
    "ph", "conductivity_s_per_m", "avg_power_w"};
inline constexpr std::array<const char*, 3> kTargetNames = {
    "c_hno3_mmol", "c_h3po4_mmol", "c_koh_mmol"};

/// Rows of (pH, sigma, P_av) features with their concentration targets.
struct FeatureTable {
  std::vector<std::string> feature_names{kFeatureNames.begin(),
                                         kFeatureNames.end()};
  std::vector<std::string> target_names{kTargetNames.begin(),
                                        kTargetNames.end()};
  Eigen::MatrixXd X;  // n x 3
  Eigen::MatrixXd Y;  // n x 3

  Eigen::Index rows() const { return X.rows(); }

  /// Checks shapes, finiteness, and the n >= 2 floor.
  void validate() const;

  /// Canonical CSV with the six named columns.
  static FeatureTable read_csv(const std::string& path);
  void write_csv(const std::string& path) const;
  std::string to_csv() const;
};

/// Rows of `m` picked by index.
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m,
                          const std::vector<Eigen::Index>& idx);

/// Column-wise standardization. SD uses divisor n (population), the
/// convention of the usual preprocessing toolkits.
class StandardScaler {
 public:
  static StandardScaler fit(const Eigen::MatrixXd& X);

  /// Rebuild from stored moments (deserialization).
  static StandardScaler from_moments(const Eigen::RowVectorXd& mean,
                                     const Eigen::RowVectorXd& sd);

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;

  const Eigen::RowVectorXd& mean() const { return mean_; }
  const Eigen::RowVectorXd& sd() const { return sd_; }

 private:
  Eigen::RowVectorXd mean_;
  Eigen::RowVectorXd sd_;
};

/// Plain PCA rotation: center, eigendecompose the covariance (divisor n-1),
/// project onto components sorted by descending eigenvalue. No whitening.
class Pca {
 public:
  /// n_components < 0 keeps all of them.
  static Pca fit(const Eigen::MatrixXd& X, int n_components = -1);

  /// Rebuild from stored parts (deserialization).
  static Pca from_parts(const Eigen::RowVectorXd& mean,
                        const Eigen::MatrixXd& components,
                        const Eigen::VectorXd& explained_variance);

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;

  /// Right-inverse of transform for full-component fits: rotate back and
  /// un-center.
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& Z) const;

  const Eigen::RowVectorXd& mean() const { return mean_; }
  /// One orthonormal component per row.
  const Eigen::MatrixXd& components() const { return components_; }
  const Eigen::VectorXd& explained_variance() const { return variance_; }

 private:
  Eigen::RowVectorXd mean_;
  Eigen::MatrixXd components_;
  Eigen::VectorXd variance_;
};

/// The fitted feature transform a model was trained behind: standardization
/// always, rotation when PCA is enabled.
struct Pipeline {
  StandardScaler scaler;
  std::optional<Pca> pca;

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd Z = scaler.transform(X);
    return pca ? pca->transform(Z) : Z;
  }
};

/// Midranks: ties get the average of the positions they occupy.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& v);

/// Spearman correlation = Pearson on midranks. NaN when either side has no
/// rank variation; never silently 0.
double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// 6x6 matrix over the table's columns in order (3 features, 3 targets).
Eigen::MatrixXd spearman_matrix(const FeatureTable& table);

/// Disjoint near-equal folds over shuffled row indices.
struct KFoldPlan {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<std::vector<Eigen::Index>> folds;

  Eigen::Index rows() const;
  std::vector<Eigen::Index> train_indices(int fold) const;
};

KFoldPlan make_kfold(Eigen::Index n_rows, int k, std::uint64_t seed);

}  // namespace soilml::dataset
