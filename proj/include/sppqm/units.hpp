#pragma once

#include <string_view>

namespace sppqm {

// CODATA 2018 exact / recommended values, SI.
namespace constants {
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kElementaryCharge = 1.602176634e-19;      // C
inline constexpr double kBohrRadius = 5.29177210903e-11;          // m
inline constexpr double kSpeedOfLight = 2.99792458e8;             // m/s
inline constexpr double kHbar = 1.054571817e-34;                  // J s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;   // F/m
}  // namespace constants

enum class Unit {
  kPerCubicCentimetre,
  kPerCubicMetre,
  kElectronBohr,            // e * a0
  kCoulombMetre,
  kWavelengthInDielectric,  // metres, free light in a medium with index sqrt(eps1 mu1)
  kAngularFrequency,        // rad/s
};

Unit parse_unit(std::string_view name);
std::string_view unit_name(Unit unit);

// Converts between the supported unit pairs. `index_squared` is eps1 * mu1 and
// only matters for the wavelength <-> angular frequency pair, where
// omega = 2 pi c / (lambda sqrt(eps1 mu1)). Throws DomainError for unsupported
// pairs or non-positive wavelength/frequency.
double convert_units(double value, Unit from, Unit to, double index_squared = 1.0);

// Shorthands used throughout.
double angular_frequency_from_wavelength(double lambda_o, double eps1, double mu1);
double wavelength_from_angular_frequency(double omega, double eps1, double mu1);

}  // namespace sppqm
