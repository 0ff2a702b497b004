#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soilml/curves.hpp"
#include "soilml/dataset.hpp"

namespace soilml::phantom {

inline constexpr double kKohMolarMass = 56.1;  // g/mol

enum class Compound { HNO3, H3PO4, KOH };

std::string compound_name(Compound c);

/// One prepared working solution.
struct StockSolution {
  Compound compound = Compound::HNO3;
  double molarity = 0.0;   // mol/L
  double volume_mL = 0.0;  // prepared volume

  void validate() const;
};

/// Final concentrations of one 40 mL phantom mixture, in mmol/L.
struct SolutionComposition {
  double c_hno3 = 0.0;
  double c_h3po4 = 0.0;
  double c_koh = 0.0;
  double total_volume_mL = 40.0;

  void validate() const;
};

/// The three working solutions the mixtures are poured from. Molarities are
/// the prepared values: 0.08 M acid, 0.005 M acid, 0.535 M base.
struct Stocks {
  StockSolution hno3{Compound::HNO3, 0.08, 210.7};
  StockSolution h3po4{Compound::H3PO4, 0.005, 210.0};
  StockSolution koh{Compound::KOH, 0.535, 210.0};

  void validate() const;
};

/// Electrochemical constants of the forward model. Limiting molar
/// conductivities in S*cm^2/mol; Ka1 is the first dissociation constant of
/// H3PO4; Kw the water autoionization product.
struct IonModel {
  double lambda_h = 349.8;
  double lambda_oh = 198.0;
  double lambda_k = 73.5;
  double lambda_no3 = 71.4;
  double lambda_h2po4 = 33.0;
  double ka1 = 7.1e-3;
  double kw = 1e-14;

  void validate() const;
};

/// Load overrides for IonModel fields from a `key = value` file. Unknown
/// keys are rejected. Missing keys keep their defaults.
IonModel load_ion_model(const std::string& path);

/// Volume of stock needed to hit target_molarity in target_volume_mL.
double dilute(const StockSolution& stock, double target_molarity,
              double target_volume_mL);

/// Molarity of mass_g of KOH dissolved to final_volume_mL.
double koh_molarity(double mass_g, double final_volume_mL);

/// Every way to fill total_mL from the three stocks in step_mL increments.
/// 2 mL steps into 40 mL give the canonical 231 compositions.
std::vector<SolutionComposition> enumerate_mixtures(double step_mL,
                                                    double total_mL,
                                                    const Stocks& stocks);

/// Equilibrium pH from the charge balance
///   [H+] + [K+] = [OH-] + [NO3-] + [H2PO4-]
/// with both strong electrolytes fully dissociated and H3PO4 restricted to
/// its first dissociation. The balance is strictly monotone in [H+], so
/// bisection on log10[H+] always converges to the unique root.
double forward_ph(const SolutionComposition& comp, const IonModel& ions = {});

/// Model conductivity in S/m: sum of lambda_i * c_i over the five ions at
/// equilibrium.
double sigma_model(const SolutionComposition& comp, const IonModel& ions = {});

/// Synthesize an ohmic sweep on the canonical grid: I(V) = sigma*(A/l)*V
/// with per-sample multiplicative Gaussian noise of the given relative SD.
curves::VICurve forward_sweep(const SolutionComposition& comp,
                              const IonModel& ions,
                              const curves::CellGeometry& geometry,
                              double noise_sd, std::uint64_t seed);

/// The full synthetic table: every enumerated mixture featurized through the
/// forward model and the curves module. Row order follows enumeration order;
/// per-row noise streams are split from the master seed, so the result does
/// not depend on evaluation order.
dataset::FeatureTable generate_dataset(const Stocks& stocks = {},
                                       const IonModel& ions = {},
                                       const curves::CellGeometry& geometry = {},
                                       double noise_sd = 0.01,
                                       std::uint64_t seed = 0,
                                       double step_mL = 2.0,
                                       double total_mL = 40.0);

}  // namespace soilml::phantom
