#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cfcal/ingest.hpp"

namespace cfcal::cleaning {

/// Per-vehicle columns of a paired or segmented series.
struct VehicleSeries {
  std::vector<double> pos;
  std::vector<double> speed;
  std::vector<double> accel;
  std::vector<double> jerk;
};

/// Leader and follower sampled on the follower's timestamps.
struct PairedSeries {
  double dt = 1.0;
  std::vector<double> t;  // follower elapsed time, s
  VehicleSeries leader;
  VehicleSeries follower;
  std::vector<double> spacing;  // leader.pos - follower.pos, ft

  std::size_t size() const { return t.size(); }
};

struct FollowingSegment {
  std::string id;
  std::vector<double> t;
  VehicleSeries leader;
  VehicleSeries follower;
  std::vector<double> spacing;

  std::size_t size() const { return t.size(); }
};

struct CleaningRules {
  double max_accel = 18.0;                   // ft/s^2, either vehicle
  double max_follower_speed = 22.0;          // ft/s (15 mi/h)
  double min_follower_speed_exclusive = 0.0;  // ft/s; speeds at or below are dropped
  double max_spacing = 656.0;                // ft, sensor range
  std::size_t min_segment_len = 10;          // samples

  void validate() const;
};

PairedSeries pair_trajectories(const ingest::Trajectory& leader, const ingest::Trajectory& follower);

/// True when the sample at index i passes every rule.
bool sample_passes(const PairedSeries& paired, std::size_t i, const CleaningRules& rules);

std::vector<FollowingSegment> clean_segments(const PairedSeries& paired, const CleaningRules& rules = {});

struct SplitResult {
  std::vector<FollowingSegment> calibration;
  std::vector<FollowingSegment> validation;
};

/// Segment-level split; calibration gets the shuffled prefix whose sample
/// count is closest to fraction * total, with at least one segment on each
/// side.
SplitResult split_segments(const std::vector<FollowingSegment>& segments, double fraction,
                           std::uint64_t seed);

/// Checks the segment invariants (aligned lengths, positive spacing,
/// minimum length). Throws a domain error naming the offending segment.
void validate_segment(const FollowingSegment& seg, std::size_t min_len = 2);

}  // namespace cfcal::cleaning
