#pragma once

#include <cstddef>
#include <vector>

#include "cfcal/cleaning.hpp"
#include "cfcal/models.hpp"

namespace cfcal::sim {

/// Output clamps, ft/s^2 and ft/s.
struct SimLimits {
  double a_min = -26.0;
  double a_max = 10.0;
  double v_max = 19.5;
  double v_min = 0.0;

  void validate() const;
};

/// Spacing used in place of a non-positive simulated gap, ft.
inline constexpr double kCollisionFloor = 0.01;

struct SimResult {
  std::string segment_id;
  std::vector<double> t;
  std::vector<double> follower_pos;
  std::vector<double> follower_speed;
  std::vector<double> follower_accel;
  std::vector<double> spacing;  // floored at kCollisionFloor
  // Observation samples at which the raw simulated spacing was <= 0.
  std::size_t collision_events = 0;
};

struct FollowerState {
  double x = 0.0;
  double v = 0.0;
};

struct LeaderState {
  double x = 0.0;
  double v = 0.0;
  double a = 0.0;
};

struct StepResult {
  FollowerState next;
  double accel = 0.0;  // effective acceleration over the step
  bool collision = false;
};

/// One ballistic step: acceleration clamped, then speed clamped, then the
/// effective acceleration recomputed from the speed change.
StepResult step_follower(const models::ModelParams& model, const FollowerState& follower,
                         const LeaderState& leader, const SimLimits& limits, double dt);

/// Replays the recorded leader and simulates the follower from its first
/// observed state. `dt` must divide every observation interval.
SimResult simulate_follower(const models::ModelParams& model, const cleaning::FollowingSegment& seg,
                            const SimLimits& limits = {}, double dt = 1.0);

/// Independent per-segment simulation; `threads` > 1 runs segments
/// concurrently with identical results.
std::vector<SimResult> simulate_all(const models::ModelParams& model,
                                    const std::vector<cleaning::FollowingSegment>& segments,
                                    const SimLimits& limits = {}, double dt = 1.0, unsigned threads = 1);

}  // namespace cfcal::sim
