#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>

namespace soilml::curves {

inline constexpr double kVoltageStep = 0.05;   // volts
inline constexpr double kSweepSpan = 5.0;      // volts
inline constexpr int kCanonicalSamples = 101;  // 100 intervals over 0..5 V
inline constexpr double kStepTolerance = 1e-9;

/// Parallel-plate cell used for the sweeps.
struct CellGeometry {
  double electrode_separation_l = 0.045;  // meters
  double electrode_area_A = 1.26e-4;      // square meters

  void validate() const;
};

/// Composition and pH encoded in a sweep filename stem `<N>-<P>-<K>-<pH>`.
/// Concentrations in mmol/L: N is HNO3, P is H3PO4, K is KOH.
struct SweepLabel {
  double n_mmol = 0.0;
  double p_mmol = 0.0;
  double k_mmol = 0.0;
  double ph = 0.0;
};

/// Parse a filename stem into a label. Splits on '-' from the right, so the
/// four tokens must be plain non-negative numbers. Anything else means the
/// file is unlabeled, not an error.
std::optional<SweepLabel> parse_label(std::string_view stem);

/// One voltage sweep. The constructor enforces the measurement protocol:
/// voltages start at 0 and rise in uniform 50 mV steps, currents are finite
/// and the same length. At least two samples.
class VICurve {
 public:
  VICurve(Eigen::VectorXd voltages, Eigen::VectorXd currents,
          std::optional<SweepLabel> label = std::nullopt);

  const Eigen::VectorXd& voltages() const { return voltages_; }
  const Eigen::VectorXd& currents() const { return currents_; }
  const std::optional<SweepLabel>& label() const { return label_; }

  Eigen::Index samples() const { return voltages_.size(); }
  Eigen::Index intervals() const { return voltages_.size() - 1; }

  /// Mean grid spacing. Every individual step is within kStepTolerance of it.
  double step() const {
    return (voltages_(voltages_.size() - 1) - voltages_(0)) /
           static_cast<double>(intervals());
  }

 private:
  Eigen::VectorXd voltages_;
  Eigen::VectorXd currents_;
  std::optional<SweepLabel> label_;
};

/// Parse a headerless two-column CSV (voltage, current) into a curve. The
/// label comes from the filename stem when it conforms. current_scale
/// multiplies the second column (1e-3 for files recorded in milliamperes).
VICurve parse_curve_file(const std::string& path, std::string_view contents,
                         double current_scale = 1.0);

VICurve read_curve_file(const std::string& path, double current_scale = 1.0);

/// Integral of I dV over the sweep, composite Simpson. Needs >= 4 samples.
double average_power(const Eigen::VectorXd& voltages,
                     const Eigen::VectorXd& currents);
double average_power(const VICurve& curve);

/// Mean over intervals of (dI/dV) * (l/A). Needs >= 2 samples.
double conductivity(const Eigen::VectorXd& voltages,
                    const Eigen::VectorXd& currents,
                    const CellGeometry& geometry = {});
double conductivity(const VICurve& curve, const CellGeometry& geometry = {});

/// The constant multiplying each current increment when conductivity is
/// written as one sum: l / (dv * A * n_intervals). At the default geometry
/// with 50 mV steps and 100 intervals this is 71.42857...
double interval_coefficient(const CellGeometry& geometry, double dv,
                            int n_intervals);

}  // namespace soilml::curves
