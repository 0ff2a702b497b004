#include "soilml/curves.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "soilml/csv.hpp"
#include "soilml/errors.hpp"
#include "soilml/quadrature.hpp"

namespace soilml::curves {

void CellGeometry::validate() const {
  if (!(electrode_separation_l > 0.0) || !std::isfinite(electrode_separation_l))
    throw ValidationError("electrode separation must be > 0");
  if (!(electrode_area_A > 0.0) || !std::isfinite(electrode_area_A))
    throw ValidationError("electrode area must be > 0");
}

std::optional<SweepLabel> parse_label(std::string_view stem) {
  // Split from the right so exactly three separators remain in play. The
  // tokens carry no sign characters by construction, which is what makes
  // right-splitting unambiguous.
  std::array<std::string_view, 4> tok;
  std::string_view rest = stem;
  for (int slot = 3; slot > 0; --slot) {
    std::size_t pos = rest.rfind('-');
    if (pos == std::string_view::npos) return std::nullopt;
    tok[slot] = rest.substr(pos + 1);
    rest = rest.substr(0, pos);
  }
  tok[0] = rest;

  double v[4];
  for (int i = 0; i < 4; ++i) {
    try {
      v[i] = csv::parse_double(tok[i]);
    } catch (const ValidationError&) {
      return std::nullopt;
    }
    if (!std::isfinite(v[i]) || v[i] < 0.0) return std::nullopt;
  }
  return SweepLabel{v[0], v[1], v[2], v[3]};
}

VICurve::VICurve(Eigen::VectorXd voltages, Eigen::VectorXd currents,
                 std::optional<SweepLabel> label)
    : voltages_(std::move(voltages)),
      currents_(std::move(currents)),
      label_(std::move(label)) {
  const Eigen::Index n = voltages_.size();
  if (currents_.size() != n)
    throw ValidationError("curve: voltage and current lengths differ");
  if (n < 2) throw InsufficientDataError("curve: need at least 2 samples");
  if (std::abs(voltages_(0)) > kStepTolerance)
    throw ValidationError("curve: sweep must start at 0 V");
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    double dv = voltages_(i + 1) - voltages_(i);
    if (dv <= 0.0)
      throw ValidationError("curve: voltages not strictly increasing at row " +
                            std::to_string(i + 2));
    if (std::abs(dv - kVoltageStep) > kStepTolerance)
      throw ValidationError("curve: voltage step off the 50 mV grid at row " +
                            std::to_string(i + 2));
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(currents_(i)))
      throw ValidationError("curve: non-finite current at row " +
                            std::to_string(i + 1));
}

VICurve parse_curve_file(const std::string& path, std::string_view contents,
                         double current_scale) {
  std::vector<double> volts, amps;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? contents.substr(pos)
                                : contents.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? contents.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = csv::split(line);
    if (fields.size() != 2)
      throw ParseError(path, line_no,
                       "expected 2 columns, got " + std::to_string(fields.size()));
    try {
      volts.push_back(csv::parse_double(fields[0]));
      amps.push_back(csv::parse_double(fields[1]) * current_scale);
    } catch (const ValidationError& e) {
      throw ParseError(path, line_no, e.what());
    }
  }

  auto stem = std::filesystem::path(path).stem().string();
  Eigen::Map<const Eigen::VectorXd> v(volts.data(),
                                      static_cast<Eigen::Index>(volts.size()));
  Eigen::Map<const Eigen::VectorXd> a(amps.data(),
                                      static_cast<Eigen::Index>(amps.size()));
  return VICurve(v, a, parse_label(stem));
}

VICurve read_curve_file(const std::string& path, double current_scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_curve_file(path, ss.str(), current_scale);
}

double average_power(const Eigen::VectorXd& voltages,
                     const Eigen::VectorXd& currents) {
  if (voltages.size() != currents.size())
    throw ValidationError("average_power: length mismatch");
  if (voltages.size() < 4)
    throw InsufficientDataError("average_power: need at least 4 samples");
  const Eigen::Index n = voltages.size() - 1;
  const double h = (voltages(n) - voltages(0)) / static_cast<double>(n);
  if (!(h > 0.0))
    throw ValidationError("average_power: voltages must increase");
  return quad::integrate_uniform(currents, h);
}

double average_power(const VICurve& curve) {
  return average_power(curve.voltages(), curve.currents());
}

double conductivity(const Eigen::VectorXd& voltages,
                    const Eigen::VectorXd& currents,
                    const CellGeometry& geometry) {
  geometry.validate();
  if (voltages.size() != currents.size())
    throw ValidationError("conductivity: length mismatch");
  if (voltages.size() < 2)
    throw InsufficientDataError("conductivity: need at least 2 samples");
  const double cell = geometry.electrode_separation_l / geometry.electrode_area_A;
  double acc = 0.0;
  const Eigen::Index n = voltages.size() - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    double dv = voltages(i + 1) - voltages(i);
    if (!(dv > 0.0))
      throw ValidationError("conductivity: voltages must increase");
    acc += (currents(i + 1) - currents(i)) / dv * cell;
  }
  return acc / static_cast<double>(n);
}

double conductivity(const VICurve& curve, const CellGeometry& geometry) {
  return conductivity(curve.voltages(), curve.currents(), geometry);
}

double interval_coefficient(const CellGeometry& geometry, double dv,
                            int n_intervals) {
  geometry.validate();
  if (!(dv > 0.0)) throw ValidationError("interval_coefficient: dv must be > 0");
  if (n_intervals < 1)
    throw ValidationError("interval_coefficient: need at least one interval");
  return geometry.electrode_separation_l /
         (dv * geometry.electrode_area_A * static_cast<double>(n_intervals));
}

}  // namespace soilml::curves
