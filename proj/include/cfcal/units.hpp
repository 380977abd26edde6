#pragma once

#include <string_view>

namespace cfcal {

// Internal quantities are always feet and seconds. Conversions happen at I/O.
enum class Unit {
  FeetPerSecond,
  MilesPerHour,
  MetersPerSecond,
  Feet,
  Meters,
  FeetPerSecondSquared,
  MetersPerSecondSquared,
};

inline constexpr double kFeetPerMile = 5280.0;
inline constexpr double kMetersPerFoot = 0.3048;

Unit parse_unit(std::string_view name);
std::string_view unit_name(Unit unit);

/// Converts between compatible units. Mixing dimensions (e.g. ft -> ft/s)
/// raises a domain error.
double convert_units(double value, Unit from, Unit to);
double convert_units(double value, std::string_view from, std::string_view to);

}  // namespace cfcal
