#include "cfcal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cfcal/error.hpp"

namespace cfcal::sim {

void SimLimits::validate() const {
  if (!(a_min < 0.0 && a_max > 0.0)) fail(ErrorKind::Config, "limits need a_min < 0 < a_max");
  if (!(v_min >= 0.0 && v_min < v_max)) fail(ErrorKind::Config, "limits need 0 <= v_min < v_max");
}

StepResult step_follower(const models::ModelParams& model, const FollowerState& f, const LeaderState& l,
                         const SimLimits& limits, double dt) {
  StepResult out;
  const double raw_gap = l.x - f.x;
  out.collision = raw_gap <= 0.0;
  models::CfState st;
  st.s = out.collision ? kCollisionFloor : raw_gap;
  st.v = f.v;
  st.v_l = l.v;
  st.a_l = l.a;
  st.x_l = l.x;
  st.x_f = f.x;

  double a = models::model_accel(model, st);
  if (std::isnan(a)) a = limits.a_min;
  a = std::clamp(a, limits.a_min, limits.a_max);
  const double v_next = std::clamp(f.v + a * dt, limits.v_min, limits.v_max);
  out.accel = (v_next - f.v) / dt;
  // x + v dt + a_eff dt^2 / 2, written as the trapezoid so it is exact for
  // the clamped speed change.
  out.next.x = f.x + 0.5 * (f.v + v_next) * dt;
  out.next.v = v_next;
  return out;
}

SimResult simulate_follower(const models::ModelParams& model, const cleaning::FollowingSegment& seg,
                            const SimLimits& limits, double dt) {
  limits.validate();
  cleaning::validate_segment(seg, 1);
  if (!(dt > 0.0)) fail(ErrorKind::Domain, "dt must be positive");

  const std::size_t n = seg.size();
  SimResult r;
  r.segment_id = seg.id;
  r.t = seg.t;
  r.follower_pos.resize(n);
  r.follower_speed.resize(n);
  r.follower_accel.resize(n);
  r.spacing.resize(n);

  FollowerState f{seg.follower.pos[0], std::clamp(seg.follower.speed[0], limits.v_min, limits.v_max)};
  auto record = [&](std::size_t i, const FollowerState& at, double accel) {
    const double gap = seg.leader.pos[i] - at.x;
    if (gap <= 0.0) ++r.collision_events;
    r.follower_pos[i] = at.x;
    r.follower_speed[i] = at.v;
    r.follower_accel[i] = accel;
    r.spacing[i] = std::max(gap, kCollisionFloor);
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double interval = seg.t[i + 1] - seg.t[i];
    const double substeps_real = interval / dt;
    const auto substeps = static_cast<std::size_t>(std::llround(substeps_real));
    if (substeps == 0 || std::abs(substeps_real - static_cast<double>(substeps)) > 1e-9 * std::max(1.0, substeps_real)) {
      fail(ErrorKind::Domain, "dt=" + std::to_string(dt) + " does not divide observation interval " +
                                  std::to_string(interval) + " in segment '" + seg.id + "'");
    }
    const FollowerState start = f;
    for (std::size_t k = 0; k < substeps; ++k) {
      const double w = static_cast<double>(k) / static_cast<double>(substeps);
      const LeaderState l{seg.leader.pos[i] + w * (seg.leader.pos[i + 1] - seg.leader.pos[i]),
                          seg.leader.speed[i] + w * (seg.leader.speed[i + 1] - seg.leader.speed[i]),
                          seg.leader.accel[i] + w * (seg.leader.accel[i + 1] - seg.leader.accel[i])};
      f = step_follower(model, f, l, limits, dt).next;
    }
    record(i, start, (f.v - start.v) / interval);
  }
  const LeaderState last{seg.leader.pos[n - 1], seg.leader.speed[n - 1], seg.leader.accel[n - 1]};
  record(n - 1, f, step_follower(model, f, last, limits, dt).accel);
  return r;
}

std::vector<SimResult> simulate_all(const models::ModelParams& model,
                                    const std::vector<cleaning::FollowingSegment>& segments,
                                    const SimLimits& limits, double dt, unsigned threads) {
  std::vector<SimResult> out(segments.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(segments.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < segments.size(); ++i) out[i] = simulate_follower(model, segments[i], limits, dt);
    return out;
  }
  std::vector<std::exception_ptr> errors(segments.size());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < segments.size(); i += threads) {
        try {
          out[i] = simulate_follower(model, segments[i], limits, dt);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace cfcal::sim
