#include "cfcal/units.hpp"

#include <array>
#include <string>
#include <utility>

#include "cfcal/error.hpp"

namespace cfcal {

namespace {

enum class Dimension { Speed, Length, Acceleration };

struct UnitInfo {
  Unit unit;
  std::string_view name;
  Dimension dim;
  double to_base;  // multiply to get ft, ft/s or ft/s^2
};

constexpr std::array<UnitInfo, 7> kUnits{{
    {Unit::FeetPerSecond, "ft/s", Dimension::Speed, 1.0},
    {Unit::MilesPerHour, "mi/h", Dimension::Speed, kFeetPerMile / 3600.0},
    {Unit::MetersPerSecond, "m/s", Dimension::Speed, 1.0 / kMetersPerFoot},
    {Unit::Feet, "ft", Dimension::Length, 1.0},
    {Unit::Meters, "m", Dimension::Length, 1.0 / kMetersPerFoot},
    {Unit::FeetPerSecondSquared, "ft/s2", Dimension::Acceleration, 1.0},
    {Unit::MetersPerSecondSquared, "m/s2", Dimension::Acceleration, 1.0 / kMetersPerFoot},
}};

const UnitInfo& info(Unit unit) {
  for (const auto& u : kUnits) {
    if (u.unit == unit) return u;
  }
  fail(ErrorKind::Domain, "unknown unit");
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Ordering: return "ordering";
    case ErrorKind::Pairing: return "pairing";
    case ErrorKind::NoCarFollowing: return "no-car-following-found";
    case ErrorKind::Split: return "split";
    case ErrorKind::UndefinedStatistic: return "undefined-statistic";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Unit parse_unit(std::string_view name) {
  // Accept the superscript and caret spellings used in tables.
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 6> kAliases{{
      {"ft/s^2", "ft/s2"},
      {"ft/s²", "ft/s2"},
      {"m/s^2", "m/s2"},
      {"m/s²", "m/s2"},
      {"mph", "mi/h"},
      {"feet", "ft"},
  }};
  for (const auto& [alias, canonical] : kAliases) {
    if (name == alias) name = canonical;
  }
  for (const auto& u : kUnits) {
    if (u.name == name) return u.unit;
  }
  fail(ErrorKind::Domain, "unknown unit '" + std::string(name) + "'");
}

std::string_view unit_name(Unit unit) { return info(unit).name; }

double convert_units(double value, Unit from, Unit to) {
  const auto& f = info(from);
  const auto& t = info(to);
  if (f.dim != t.dim) {
    fail(ErrorKind::Domain, "cannot convert " + std::string(f.name) + " to " + std::string(t.name));
  }
  if (from == to) return value;
  return value * f.to_base / t.to_base;
}

double convert_units(double value, std::string_view from, std::string_view to) {
  return convert_units(value, parse_unit(from), parse_unit(to));
}

}  // namespace cfcal
