#include "soilml/agronomy.hpp"

#include <cmath>
#include <fstream>

#include "soilml/csv.hpp"
#include "soilml/errors.hpp"

namespace soilml::agronomy {

std::string nutrient_name(Nutrient n) {
  return n == Nutrient::P2O5 ? "p2o5" : "k2o";
}

Nutrient parse_nutrient(const std::string& name) {
  if (name == "p2o5") return Nutrient::P2O5;
  if (name == "k2o") return Nutrient::K2O;
  throw ValidationError("unknown nutrient '" + name + "'");
}

void SoilSample::validate() const {
  if (id.empty()) throw ValidationError("soil sample: empty id");
  if (!std::isfinite(ph) || !std::isfinite(conductivity) ||
      !std::isfinite(avg_power))
    throw ValidationError("soil sample " + id + ": non-finite feature");
  for (const auto& lab : {lab_p2o5, lab_k2o})
    if (lab && (!(*lab > 0.0) || !std::isfinite(*lab)))
      throw ValidationError("soil sample " + id + ": lab value must be > 0");
}

namespace {

const std::vector<std::string> kSoilHeader = {
    "sample_id", "ph", "conductivity_s_per_m", "avg_power_w"};
const std::vector<std::string> kSoilHeaderLab = {
    "sample_id", "ph",           "conductivity_s_per_m",
    "avg_power_w", "lab_p2o5_kg_ha", "lab_k2o_kg_ha"};

}  // namespace

std::vector<SoilSample> read_soil_csv(const std::string& path) {
  auto t = csv::read_file(path, /*has_header=*/true);
  bool with_lab;
  if (t.header == kSoilHeader)
    with_lab = false;
  else if (t.header == kSoilHeaderLab)
    with_lab = true;
  else
    throw ValidationError(path + ": unexpected header for a soil CSV");

  std::vector<SoilSample> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    SoilSample s;
    s.id = row[0];
    try {
      s.ph = csv::parse_double(row[1]);
      s.conductivity = csv::parse_double(row[2]);
      s.avg_power = csv::parse_double(row[3]);
      if (with_lab) {
        if (!row[4].empty()) s.lab_p2o5 = csv::parse_double(row[4]);
        if (!row[5].empty()) s.lab_k2o = csv::parse_double(row[5]);
      }
      s.validate();
    } catch (const ValidationError& e) {
      throw ParseError(path, r + 2, e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string soil_to_csv(const std::vector<SoilSample>& samples) {
  bool with_lab = false;
  for (const auto& s : samples)
    if (s.lab_p2o5 || s.lab_k2o) with_lab = true;
  csv::Table t;
  t.header = with_lab ? kSoilHeaderLab : kSoilHeader;
  for (const auto& s : samples) {
    std::vector<std::string> row{s.id, csv::format_double(s.ph),
                                 csv::format_double(s.conductivity),
                                 csv::format_double(s.avg_power)};
    if (with_lab) {
      row.push_back(s.lab_p2o5 ? csv::format_double(*s.lab_p2o5) : "");
      row.push_back(s.lab_k2o ? csv::format_double(*s.lab_k2o) : "");
    }
    t.rows.push_back(std::move(row));
  }
  return csv::to_string(t);
}

void write_soil_csv(const std::string& path,
                    const std::vector<SoilSample>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << soil_to_csv(samples);
  if (!out) throw ValidationError("write failed for " + path);
}

void ConversionConstants::validate() const {
  for (double v : {bulk_density_g_cm3, depth_m, area_ha, molar_mass_hno3,
                   molar_mass_h3po4, molar_mass_koh, molar_mass_k2o,
                   molar_mass_p2o5})
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError("conversion constants must all be > 0");
}

double ConversionConstants::soil_mass_kg_per_ha() const {
  validate();
  // g/cm^3 -> kg/m^3 is *1000; a hectare is 1e4 m^2.
  return bulk_density_g_cm3 * 1000.0 * depth_m * 1.0e4 * area_ha;
}

double ConversionConstants::kg_per_ha_factor() const {
  // mg per kg of soil times soil kg/ha, then mg -> kg.
  return soil_mass_kg_per_ha() / 1.0e6;
}

double mmol_to_ppm(double conc_mmol, double molar_mass) {
  if (!(conc_mmol >= 0.0) || !std::isfinite(conc_mmol))
    throw ValidationError("mmol_to_ppm: concentration must be >= 0");
  if (!(molar_mass > 0.0) || !std::isfinite(molar_mass))
    throw ValidationError("mmol_to_ppm: molar mass must be > 0");
  return conc_mmol * molar_mass;
}

double ppm_to_kg_per_ha(double ppm, const ConversionConstants& constants) {
  if (!(ppm >= 0.0) || !std::isfinite(ppm))
    throw ValidationError("ppm_to_kg_per_ha: concentration must be >= 0");
  return ppm * constants.kg_per_ha_factor();
}

double compound_to_oxide(double conc_mmol, phantom::Compound compound) {
  if (!(conc_mmol >= 0.0) || !std::isfinite(conc_mmol))
    throw ValidationError("compound_to_oxide: concentration must be >= 0");
  if (compound != phantom::Compound::KOH &&
      compound != phantom::Compound::H3PO4)
    throw ValidationError("compound_to_oxide: no oxide mapping for " +
                          phantom::compound_name(compound));
  return conc_mmol / 2.0;
}

std::string CalibrationSet::key(models::ModelKind kind, Nutrient n) {
  return models::kind_name(kind) + "." + nutrient_name(n);
}

bool CalibrationSet::has(models::ModelKind kind, Nutrient n) const {
  return factors.count(key(kind, n)) > 0;
}

double CalibrationSet::get(models::ModelKind kind, Nutrient n) const {
  auto it = factors.find(key(kind, n));
  if (it == factors.end())
    throw CalibrationMissingError("no calibration factor for " + key(kind, n));
  return it->second;
}

void CalibrationSet::set(models::ModelKind kind, Nutrient n, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw ValidationError("calibration factor must be > 0");
  factors[key(kind, n)] = factor;
}

CalibrationSet load_calibration(const std::string& path) {
  CalibrationSet cs;
  for (const auto& [key, value] : csv::read_keyvalue_file(path)) {
    if (key == "samples") {
      for (auto& id : csv::split(value)) {
        if (!id.empty()) cs.sample_ids.push_back(id);
      }
      continue;
    }
    auto dot = key.find('.');
    if (dot == std::string::npos)
      throw ValidationError(path + ": calibration key '" + key +
                            "' is not model.nutrient");
    models::ModelKind kind = models::parse_kind(key.substr(0, dot));
    Nutrient n = parse_nutrient(key.substr(dot + 1));
    cs.set(kind, n, csv::parse_double(value));
  }
  return cs;
}

std::string calibration_to_string(const CalibrationSet& cs) {
  std::string out;
  for (const auto& [key, factor] : cs.factors)
    out += key + " = " + csv::format_double(factor) + "\n";
  if (!cs.sample_ids.empty()) {
    out += "samples = ";
    for (std::size_t i = 0; i < cs.sample_ids.size(); ++i) {
      if (i) out += ",";
      out += cs.sample_ids[i];
    }
    out += "\n";
  }
  return out;
}

void save_calibration(const std::string& path, const CalibrationSet& cs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << calibration_to_string(cs);
  if (!out) throw ValidationError("write failed for " + path);
}

namespace {

Eigen::MatrixXd feature_matrix(const std::vector<SoilSample>& samples) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].validate();
    X(static_cast<Eigen::Index>(i), 0) = samples[i].ph;
    X(static_cast<Eigen::Index>(i), 1) = samples[i].conductivity;
    X(static_cast<Eigen::Index>(i), 2) = samples[i].avg_power;
  }
  return X;
}

}  // namespace

std::vector<SoilPrediction> predict_uncalibrated(
    const models::Bundle& bundle, const std::vector<SoilSample>& samples,
    const ConversionConstants& constants) {
  constants.validate();
  if (samples.empty()) throw ValidationError("predict: no samples");
  Eigen::MatrixXd Z = bundle.pipeline.transform(feature_matrix(samples));
  Eigen::MatrixXd pred = models::predict(bundle.model, Z);  // mmol/L, 3 cols
  if (pred.cols() != 3)
    throw ValidationError("predict: model does not emit 3 concentrations");

  std::vector<SoilPrediction> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    const double h3po4 = std::max(0.0, pred(r, 1));
    const double koh = std::max(0.0, pred(r, 2));
    SoilPrediction p;
    p.id = samples[i].id;
    p.p2o5_kg_ha = ppm_to_kg_per_ha(
        mmol_to_ppm(compound_to_oxide(h3po4, phantom::Compound::H3PO4),
                    constants.molar_mass_p2o5),
        constants);
    p.k2o_kg_ha = ppm_to_kg_per_ha(
        mmol_to_ppm(compound_to_oxide(koh, phantom::Compound::KOH),
                    constants.molar_mass_k2o),
        constants);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SoilPrediction> predict_soil(const models::Bundle& bundle,
                                         const std::vector<SoilSample>& samples,
                                         const CalibrationSet& calibration,
                                         const ConversionConstants& constants) {
  const models::ModelKind kind = models::kind_of(bundle.model);
  const double f_p = calibration.get(kind, Nutrient::P2O5);
  const double f_k = calibration.get(kind, Nutrient::K2O);
  auto out = predict_uncalibrated(bundle, samples, constants);
  for (auto& p : out) {
    p.p2o5_kg_ha *= f_p;
    p.k2o_kg_ha *= f_k;
  }
  return out;
}

CalibrationSet calibrate(const models::Bundle& bundle,
                         const std::vector<SoilSample>& samples,
                         std::size_t first_m,
                         const ConversionConstants& constants, RatioMode mode) {
  if (first_m < 1 || first_m > samples.size())
    throw ValidationError("calibrate: sample split out of range");
  std::vector<SoilSample> head(samples.begin(),
                               samples.begin() + static_cast<std::ptrdiff_t>(first_m));
  auto uncal = predict_uncalibrated(bundle, head, constants);

  CalibrationSet cs;
  const models::ModelKind kind = models::kind_of(bundle.model);
  for (Nutrient n : {Nutrient::P2O5, Nutrient::K2O}) {
    double ratio_sum = 0.0, lab_sum = 0.0, pred_sum = 0.0;
    for (std::size_t i = 0; i < head.size(); ++i) {
      const auto& lab_opt =
          (n == Nutrient::P2O5) ? head[i].lab_p2o5 : head[i].lab_k2o;
      if (!lab_opt)
        throw ValidationError("calibrate: sample " + head[i].id +
                              " lacks a lab value for " + nutrient_name(n));
      const double pred =
          (n == Nutrient::P2O5) ? uncal[i].p2o5_kg_ha : uncal[i].k2o_kg_ha;
      if (!(pred > 0.0))
        throw CalibrationDegenerateError(
            "calibrate: zero prediction for sample " + head[i].id + ", " +
            nutrient_name(n));
      ratio_sum += *lab_opt / pred;
      lab_sum += *lab_opt;
      pred_sum += pred;
    }
    const double factor = (mode == RatioMode::MeanOfRatios)
                              ? ratio_sum / static_cast<double>(head.size())
                              : lab_sum / pred_sum;
    cs.set(kind, n, factor);
  }
  for (const auto& s : head) cs.sample_ids.push_back(s.id);
  return cs;
}

double mape(const std::vector<double>& predictions,
            const std::vector<double>& lab, ErrorDenominator denom) {
  if (predictions.size() != lab.size())
    throw ValidationError("mape: length mismatch");
  if (predictions.empty()) throw ValidationError("mape: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d =
        denom == ErrorDenominator::Lab ? lab[i] : predictions[i];
    if (!(d > 0.0))
      throw ValidationError("mape: denominator must be > 0 at sample " +
                            std::to_string(i));
    acc += std::abs(predictions[i] - lab[i]) / d;
  }
  return acc / static_cast<double>(predictions.size()) * 100.0;
}

}  // namespace soilml::agronomy
