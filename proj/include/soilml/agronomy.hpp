#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soilml/models.hpp"
#include "soilml/phantom.hpp"

namespace soilml::agronomy {

enum class Nutrient { P2O5, K2O };

std::string nutrient_name(Nutrient n);  // "p2o5" / "k2o"
Nutrient parse_nutrient(const std::string& name);

/// One field sample: the three measured features plus optional lab truth.
struct SoilSample {
  std::string id;
  double ph = 0.0;
  double conductivity = 0.0;  // S/m
  double avg_power = 0.0;     // W
  std::optional<double> lab_p2o5;  // kg/ha
  std::optional<double> lab_k2o;   // kg/ha

  void validate() const;
};

/// CSV schema: sample_id,ph,conductivity_s_per_m,avg_power_w with the two
/// lab columns optional (all-or-none in the header; blank fields allowed).
std::vector<SoilSample> read_soil_csv(const std::string& path);
std::string soil_to_csv(const std::vector<SoilSample>& samples);
void write_soil_csv(const std::string& path,
                    const std::vector<SoilSample>& samples);

struct ConversionConstants {
  double bulk_density_g_cm3 = 1.5;
  double depth_m = 0.15;
  double area_ha = 1.0;
  double molar_mass_hno3 = 63.0;
  double molar_mass_h3po4 = 98.0;
  double molar_mass_koh = 56.1;
  double molar_mass_k2o = 94.2;
  double molar_mass_p2o5 = 141.94;

  void validate() const;

  /// Plow-layer soil mass over the area: 2.25e6 kg/ha at defaults.
  double soil_mass_kg_per_ha() const;

  /// mg/L (= mg/kg of soil) to kg/ha: 2.25 at defaults. Always recomputed
  /// from the constants.
  double kg_per_ha_factor() const;
};

/// conc (mmol/L) times molar mass (g/mol) is mg/L, i.e. ppm.
double mmol_to_ppm(double conc_mmol, double molar_mass);

double ppm_to_kg_per_ha(double ppm, const ConversionConstants& constants = {});

/// Stoichiometric halving: 2 KOH -> K2O, 2 H3PO4 -> P2O5.
double compound_to_oxide(double conc_mmol, phantom::Compound compound);

/// Per-model, per-nutrient multiplicative factors.
struct CalibrationSet {
  std::map<std::string, double> factors;  // key "<model>.<nutrient>"
  std::vector<std::string> sample_ids;    // samples the factors came from

  static std::string key(models::ModelKind kind, Nutrient n);
  bool has(models::ModelKind kind, Nutrient n) const;
  double get(models::ModelKind kind, Nutrient n) const;
  void set(models::ModelKind kind, Nutrient n, double factor);
};

/// File format: one `model.nutrient = factor` line per entry, plus an
/// optional `samples = id1,id2,...` line.
CalibrationSet load_calibration(const std::string& path);
std::string calibration_to_string(const CalibrationSet& cs);
void save_calibration(const std::string& path, const CalibrationSet& cs);

struct SoilPrediction {
  std::string id;
  double p2o5_kg_ha = 0.0;
  double k2o_kg_ha = 0.0;
};

/// Factor-free pipeline: transform features, predict mmol/L, clamp negatives
/// to zero, halve to the oxide, convert through the oxide molar mass and the
/// kg/ha factor. Nitrogen is dropped on purpose.
std::vector<SoilPrediction> predict_uncalibrated(
    const models::Bundle& bundle, const std::vector<SoilSample>& samples,
    const ConversionConstants& constants = {});

/// Same chain with the model's calibration factors applied.
std::vector<SoilPrediction> predict_soil(const models::Bundle& bundle,
                                         const std::vector<SoilSample>& samples,
                                         const CalibrationSet& calibration,
                                         const ConversionConstants& constants = {});

enum class RatioMode { MeanOfRatios, RatioOfMeans };

/// Factors from the first `first_m` samples, which must carry lab values:
/// per nutrient, the mean of lab/prediction ratios (or the ratio of means).
CalibrationSet calibrate(const models::Bundle& bundle,
                         const std::vector<SoilSample>& samples,
                         std::size_t first_m,
                         const ConversionConstants& constants = {},
                         RatioMode mode = RatioMode::MeanOfRatios);

enum class ErrorDenominator { Lab, Prediction };

/// Mean absolute percentage error over paired samples.
double mape(const std::vector<double>& predictions,
            const std::vector<double>& lab,
            ErrorDenominator denom = ErrorDenominator::Lab);

}  // namespace soilml::agronomy
