#include "sppqm/units.hpp"

#include <cmath>
#include <string>

#include "sppqm/errors.hpp"

namespace sppqm {

namespace {

enum class Dimension { kDensity, kDipole, kSpectral };

Dimension dimension_of(Unit u) {
  switch (u) {
    case Unit::kPerCubicCentimetre:
    case Unit::kPerCubicMetre:
      return Dimension::kDensity;
    case Unit::kElectronBohr:
    case Unit::kCoulombMetre:
      return Dimension::kDipole;
    case Unit::kWavelengthInDielectric:
    case Unit::kAngularFrequency:
      return Dimension::kSpectral;
  }
  return Dimension::kDensity;
}

// Factor taking the unit to its SI representative (m^-3, C m).
double si_factor(Unit u) {
  switch (u) {
    case Unit::kPerCubicCentimetre:
      return 1e6;
    case Unit::kElectronBohr:
      return constants::kElementaryCharge * constants::kBohrRadius;
    default:
      return 1.0;
  }
}

}  // namespace

Unit parse_unit(std::string_view name) {
  if (name == "cm^-3") return Unit::kPerCubicCentimetre;
  if (name == "m^-3") return Unit::kPerCubicMetre;
  if (name == "e*a0") return Unit::kElectronBohr;
  if (name == "C*m") return Unit::kCoulombMetre;
  if (name == "m") return Unit::kWavelengthInDielectric;
  if (name == "rad/s") return Unit::kAngularFrequency;
  throw DomainError("unknown unit '" + std::string(name) + "'");
}

std::string_view unit_name(Unit unit) {
  switch (unit) {
    case Unit::kPerCubicCentimetre: return "cm^-3";
    case Unit::kPerCubicMetre: return "m^-3";
    case Unit::kElectronBohr: return "e*a0";
    case Unit::kCoulombMetre: return "C*m";
    case Unit::kWavelengthInDielectric: return "m";
    case Unit::kAngularFrequency: return "rad/s";
  }
  return "?";
}

double convert_units(double value, Unit from, Unit to, double index_squared) {
  if (dimension_of(from) != dimension_of(to)) {
    throw DomainError("unsupported unit pair " + std::string(unit_name(from)) + " -> " +
                      std::string(unit_name(to)));
  }
  if (from == to) return value;
  if (dimension_of(from) != Dimension::kSpectral) {
    return value * si_factor(from) / si_factor(to);
  }
  if (!(value > 0.0)) throw DomainError("wavelength/frequency must be positive");
  if (!(index_squared > 0.0)) throw DomainError("eps1*mu1 must be positive");
  // Same expression both ways: x -> 2 pi c / (x n).
  return 2.0 * constants::kPi * constants::kSpeedOfLight / (value * std::sqrt(index_squared));
}

double angular_frequency_from_wavelength(double lambda_o, double eps1, double mu1) {
  return convert_units(lambda_o, Unit::kWavelengthInDielectric, Unit::kAngularFrequency,
                       eps1 * mu1);
}

double wavelength_from_angular_frequency(double omega, double eps1, double mu1) {
  return convert_units(omega, Unit::kAngularFrequency, Unit::kWavelengthInDielectric,
                       eps1 * mu1);
}

}  // namespace sppqm
