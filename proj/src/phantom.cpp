#include "soilml/phantom.hpp"

#include <cmath>

#include "soilml/csv.hpp"
#include "soilml/errors.hpp"
#include "soilml/rng.hpp"

namespace soilml::phantom {

std::string compound_name(Compound c) {
  switch (c) {
    case Compound::HNO3: return "HNO3";
    case Compound::H3PO4: return "H3PO4";
    case Compound::KOH: return "KOH";
  }
  throw ValidationError("unknown compound");
}

void StockSolution::validate() const {
  if (!(molarity > 0.0) || !std::isfinite(molarity))
    throw ValidationError("stock: molarity must be > 0");
  if (!(volume_mL > 0.0) || !std::isfinite(volume_mL))
    throw ValidationError("stock: volume must be > 0");
}

void SolutionComposition::validate() const {
  if (!(c_hno3 >= 0.0) || !(c_h3po4 >= 0.0) || !(c_koh >= 0.0) ||
      !std::isfinite(c_hno3) || !std::isfinite(c_h3po4) || !std::isfinite(c_koh))
    throw ValidationError("composition: concentrations must be >= 0");
  if (!(total_volume_mL > 0.0) || !std::isfinite(total_volume_mL))
    throw ValidationError("composition: total volume must be > 0");
}

void Stocks::validate() const {
  hno3.validate();
  h3po4.validate();
  koh.validate();
  if (hno3.compound != Compound::HNO3 || h3po4.compound != Compound::H3PO4 ||
      koh.compound != Compound::KOH)
    throw ValidationError("stocks: compound slots mislabeled");
}

void IonModel::validate() const {
  for (double l : {lambda_h, lambda_oh, lambda_k, lambda_no3, lambda_h2po4})
    if (!(l > 0.0) || !std::isfinite(l))
      throw ValidationError("ion model: conductivities must be > 0");
  if (!(ka1 > 0.0) || !(ka1 < 1.0))
    throw ValidationError("ion model: Ka1 must lie in (0, 1)");
  if (!(kw > 0.0) || !(kw < 1e-7))
    throw ValidationError("ion model: Kw outside plausible range");
}

IonModel load_ion_model(const std::string& path) {
  IonModel m;
  for (const auto& [key, value] : csv::read_keyvalue_file(path)) {
    double v = csv::parse_double(value);
    if (key == "lambda_h") m.lambda_h = v;
    else if (key == "lambda_oh") m.lambda_oh = v;
    else if (key == "lambda_k") m.lambda_k = v;
    else if (key == "lambda_no3") m.lambda_no3 = v;
    else if (key == "lambda_h2po4") m.lambda_h2po4 = v;
    else if (key == "ka1") m.ka1 = v;
    else if (key == "kw") m.kw = v;
    else throw ValidationError(path + ": unknown ion-model key '" + key + "'");
  }
  m.validate();
  return m;
}

double dilute(const StockSolution& stock, double target_molarity,
              double target_volume_mL) {
  stock.validate();
  if (!(target_molarity >= 0.0) || !std::isfinite(target_molarity))
    throw ValidationError("dilute: target molarity must be >= 0");
  if (!(target_volume_mL > 0.0) || !std::isfinite(target_volume_mL))
    throw ValidationError("dilute: target volume must be > 0");
  if (target_molarity >= stock.molarity)
    throw InfeasibleDilutionError(
        "dilute: target molarity not below stock molarity");
  return target_molarity * target_volume_mL / stock.molarity;
}

double koh_molarity(double mass_g, double final_volume_mL) {
  if (!(mass_g >= 0.0) || !std::isfinite(mass_g))
    throw ValidationError("koh_molarity: mass must be >= 0");
  if (!(final_volume_mL > 0.0) || !std::isfinite(final_volume_mL))
    throw ValidationError("koh_molarity: volume must be > 0");
  return mass_g / (kKohMolarMass * final_volume_mL) * 1000.0;
}

std::vector<SolutionComposition> enumerate_mixtures(double step_mL,
                                                    double total_mL,
                                                    const Stocks& stocks) {
  stocks.validate();
  if (!(step_mL > 0.0) || !(total_mL > 0.0))
    throw ValidationError("enumerate: step and total must be > 0");
  const double ratio = total_mL / step_mL;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9)
    throw ValidationError("enumerate: total volume must be a multiple of step");

  std::vector<SolutionComposition> out;
  out.reserve(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
  for (long i = 0; i <= n; ++i) {
    for (long j = 0; j <= n - i; ++j) {
      const long k = n - i - j;
      SolutionComposition c;
      c.total_volume_mL = total_mL;
      // mmol/L = (mol/L * 1000) * v / total
      c.c_hno3 = stocks.hno3.molarity * 1000.0 * (static_cast<double>(i) * step_mL) / total_mL;
      c.c_h3po4 = stocks.h3po4.molarity * 1000.0 * (static_cast<double>(j) * step_mL) / total_mL;
      c.c_koh = stocks.koh.molarity * 1000.0 * (static_cast<double>(k) * step_mL) / total_mL;
      out.push_back(c);
    }
  }
  return out;
}

namespace {

// Net charge imbalance as a function of h = [H+] in mol/L. Strictly
// increasing in h.
double charge_balance(double h, double n, double p, double k,
                      const IonModel& ions) {
  return h + k - ions.kw / h - n - p * ions.ka1 / (ions.ka1 + h);
}

double solve_h(const SolutionComposition& comp, const IonModel& ions) {
  const double n = comp.c_hno3 / 1000.0;
  const double p = comp.c_h3po4 / 1000.0;
  const double k = comp.c_koh / 1000.0;
  double lo = -16.0, hi = 2.0;  // log10 of [H+]
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    if (charge_balance(std::pow(10.0, mid), n, p, k, ions) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::pow(10.0, 0.5 * (lo + hi));
}

}  // namespace

double forward_ph(const SolutionComposition& comp, const IonModel& ions) {
  comp.validate();
  ions.validate();
  return -std::log10(solve_h(comp, ions));
}

double sigma_model(const SolutionComposition& comp, const IonModel& ions) {
  comp.validate();
  ions.validate();
  const double h = solve_h(comp, ions);
  const double oh = ions.kw / h;
  const double k = comp.c_koh / 1000.0;
  const double no3 = comp.c_hno3 / 1000.0;
  const double h2po4 =
      (comp.c_h3po4 / 1000.0) * ions.ka1 / (ions.ka1 + h);
  // lambda [S*cm^2/mol] * c [mol/L] / 10 gives S/m
  return (ions.lambda_h * h + ions.lambda_oh * oh + ions.lambda_k * k +
          ions.lambda_no3 * no3 + ions.lambda_h2po4 * h2po4) /
         10.0;
}

curves::VICurve forward_sweep(const SolutionComposition& comp,
                              const IonModel& ions,
                              const curves::CellGeometry& geometry,
                              double noise_sd, std::uint64_t seed) {
  geometry.validate();
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    throw ValidationError("forward_sweep: noise SD must be >= 0");
  const double sigma = sigma_model(comp, ions);
  const double gain =
      sigma * geometry.electrode_area_A / geometry.electrode_separation_l;

  Rng rng(seed);
  Eigen::VectorXd volts(curves::kCanonicalSamples);
  Eigen::VectorXd amps(curves::kCanonicalSamples);
  for (int i = 0; i < curves::kCanonicalSamples; ++i) {
    const double v = static_cast<double>(i) * curves::kVoltageStep;
    volts(i) = v;
    amps(i) = gain * v * (1.0 + noise_sd * rng.normal());
  }
  const double ph = forward_ph(comp, ions);
  return curves::VICurve(
      std::move(volts), std::move(amps),
      curves::SweepLabel{comp.c_hno3, comp.c_h3po4, comp.c_koh, ph});
}

dataset::FeatureTable generate_dataset(const Stocks& stocks,
                                       const IonModel& ions,
                                       const curves::CellGeometry& geometry,
                                       double noise_sd, std::uint64_t seed,
                                       double step_mL, double total_mL) {
  auto mixtures = enumerate_mixtures(step_mL, total_mL, stocks);
  const Eigen::Index n = static_cast<Eigen::Index>(mixtures.size());
  dataset::FeatureTable table;
  table.X.resize(n, 3);
  table.Y.resize(n, 3);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& comp = mixtures[static_cast<std::size_t>(r)];
    auto curve = forward_sweep(comp, ions, geometry, noise_sd,
                               derive_seed(seed, "phantom.sweep",
                                           static_cast<std::uint64_t>(r)));
    table.X(r, 0) = curve.label()->ph;
    table.X(r, 1) = curves::conductivity(curve, geometry);
    table.X(r, 2) = curves::average_power(curve);
    table.Y(r, 0) = comp.c_hno3;
    table.Y(r, 1) = comp.c_h3po4;
    table.Y(r, 2) = comp.c_koh;
  }
  table.validate();
  return table;
}

}  // namespace soilml::phantom
