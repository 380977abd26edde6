#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfcal::ingest {

/// Mean Earth radius used for the spherical (haversine) distance.
inline constexpr double kEarthRadiusMeters = 6371008.8;

struct GpsFix {
  double t = 0.0;    // epoch seconds
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
};

struct TrajectoryPoint {
  double t = 0.0;      // s, elapsed from the first fix
  double pos = 0.0;    // ft, cumulative arc length
  double speed = 0.0;  // ft/s
  double accel = 0.0;  // ft/s^2
  double jerk = 0.0;   // ft/s^3
};

struct Trajectory {
  std::string vehicle_id;
  double dt = 1.0;
  // Absolute time of points[0] (epoch seconds). Needed to pair two logs.
  double t0 = 0.0;
  // Position of points[0] along the shared route axis, ft. Zero for a lone
  // trajectory; set on the leader by reference_pair so that spacing can be
  // taken as a plain position difference.
  double pos_offset = 0.0;
  std::vector<TrajectoryPoint> points;
};

/// Great-circle distance in feet. Throws a domain error on out-of-range
/// coordinates.
double geodesic_distance(const GpsFix& a, const GpsFix& b);

/// Cumulative haversine distance, then backward differences for speed,
/// acceleration and jerk. Index 0 of each derived series copies index 1.
Trajectory derive_kinematics(std::span<const GpsFix> fixes, std::string vehicle_id = "vehicle",
                             double dt = 1.0);

/// Same differencing as derive_kinematics but starting from known positions
/// (ft) at elapsed times (s).
Trajectory kinematics_from_positions(std::span<const double> t, std::span<const double> pos,
                                     std::string vehicle_id = "vehicle", double dt = 1.0);

/// Indices i (>= 1) where t[i] - t[i-1] falls outside dt +/- 10%.
std::vector<std::size_t> find_gaps(const Trajectory& traj);

/// Parses an epoch-seconds number or an ISO-8601 timestamp
/// (YYYY-MM-DD[T ]hh:mm:ss[.fff][Z|+hh:mm|-hh:mm]) into epoch seconds.
double parse_timestamp(std::string_view text);

/// Reads a CSV with header exactly `t,lat,lon`.
std::vector<GpsFix> read_gps_csv(const std::string& path);
std::vector<GpsFix> parse_gps_csv(std::string_view content, std::string_view origin = "<memory>");

struct TrajectoryPair {
  Trajectory leader;
  Trajectory follower;
};

/// Derives both trajectories and places the leader on the follower's
/// position axis: at the first common timestamp the spacing equals the
/// direct geodesic distance between the two fixes.
TrajectoryPair reference_pair(std::span<const GpsFix> leader_fixes,
                              std::span<const GpsFix> follower_fixes, double dt = 1.0);

}  // namespace cfcal::ingest
