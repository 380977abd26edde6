#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfcal/cleaning.hpp"

namespace cfcal::stats {

struct DescriptiveStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1)
  double min = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

/// Jerk comfort limits, ft/s^3.
struct ComfortThresholds {
  double excellent = 0.92;
  double upper_excellent = 4.03;
  double expected = 4.82;

  void validate() const;
};

/// Acceleration comfort limit for seated/standing passengers, ft/s^2.
/// Reported as an annotation only.
inline constexpr double kAccelComfortLimit = 2.96;
inline constexpr double kJerkComfortLimit = 1.97;

struct ShapiroWilk {
  double w = 0.0;
  double p = 0.0;
};

/// Quantile by linear interpolation between order statistics, h = (n-1)q.
/// `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double q);

DescriptiveStats describe(std::span<const double> series);

/// Royston's AS R94 approximation; valid for 3 <= n <= 5000.
ShapiroWilk shapiro_wilk(std::span<const double> series);

/// Average (mid) ranks, 1-based.
std::vector<double> midranks(std::span<const double> x);

double spearman(std::span<const double> x, std::span<const double> y);

double coefficient_of_variation(std::span<const double> series);

double iqr_outlier_share(std::span<const double> series);

/// Shares of |jerk| strictly above each threshold, in threshold order.
std::array<double, 3> jerk_comfort_shares(std::span<const double> jerk, const ComfortThresholds& th = {});

// ---------------------------------------------------------------------------
// Segment-level exploratory report.

struct VariableSummary {
  std::string name;
  std::string unit;
  DescriptiveStats stats;
  std::optional<ShapiroWilk> normality;  // empty when n is outside [3, 5000]
};

/// Mean per-trip coefficient of variation and outlier share for one
/// vehicle/variable/regime cell. Trips whose statistic is undefined are
/// skipped and not counted.
struct VariabilityCell {
  std::string vehicle;   // "av" (follower) or "car" (leader)
  std::string variable;  // speed | accel | jerk
  std::string regime;    // all | acc+ | acc-
  std::optional<double> mean_cv;
  std::optional<double> mean_outlier_share;
  std::size_t trips_cv = 0;
  std::size_t trips_outlier = 0;
};

struct Histogram {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;  // equal-width bins over [lo, hi]
};

/// Equal-width histogram; the last bin is closed on the right.
Histogram histogram(std::string name, std::span<const double> values, std::size_t bins = 30);

struct StatsReport {
  std::size_t segments = 0;
  std::size_t samples = 0;
  std::vector<VariableSummary> variables;  // speed, accel, jerk, spacing
  std::vector<std::string> correlation_names;
  std::vector<std::vector<std::optional<double>>> spearman_matrix;
  std::vector<VariabilityCell> variability;
  ComfortThresholds comfort;
  std::array<double, 3> comfort_shares{};
  double max_abs_accel = 0.0;
  double max_abs_jerk = 0.0;
  std::vector<Histogram> histograms;  // speed, accel, jerk, spacing
};

StatsReport analyze_segments(const std::vector<cleaning::FollowingSegment>& segments,
                             const ComfortThresholds& th = {});

}  // namespace cfcal::stats
