#include "cfcal/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cfcal/error.hpp"
#include "cfcal/rng.hpp"

namespace cfcal::cleaning {

namespace {

constexpr double kPairTolerance = 0.1;  // s

void push_sample(VehicleSeries& dst, const VehicleSeries& src, std::size_t i) {
  dst.pos.push_back(src.pos[i]);
  dst.speed.push_back(src.speed[i]);
  dst.accel.push_back(src.accel[i]);
  dst.jerk.push_back(src.jerk[i]);
}

void push_point(VehicleSeries& dst, const ingest::TrajectoryPoint& p, double offset) {
  dst.pos.push_back(p.pos + offset);
  dst.speed.push_back(p.speed);
  dst.accel.push_back(p.accel);
  dst.jerk.push_back(p.jerk);
}

std::string segment_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seg-%04zu", n);
  return buf;
}

}  // namespace

void CleaningRules::validate() const {
  if (!(max_accel > 0.0) || !(max_follower_speed > 0.0) || !(max_spacing > 0.0)) {
    fail(ErrorKind::Config, "cleaning thresholds must be positive");
  }
  if (!(min_follower_speed_exclusive >= 0.0) || min_follower_speed_exclusive >= max_follower_speed) {
    fail(ErrorKind::Config, "min follower speed must lie in [0, max_follower_speed)");
  }
  if (min_segment_len < 1) fail(ErrorKind::Config, "min_segment_len must be at least 1");
}

PairedSeries pair_trajectories(const ingest::Trajectory& leader, const ingest::Trajectory& follower) {
  PairedSeries out;
  out.dt = follower.dt;
  const auto& lp = leader.points;
  std::size_t li = 0;
  for (const auto& fp : follower.points) {
    const double tf = follower.t0 + fp.t;
    while (li + 1 < lp.size() && leader.t0 + lp[li + 1].t <= tf) ++li;
    // Nearest of the two bracketing leader samples.
    std::size_t best = lp.size();
    double best_gap = kPairTolerance;
    for (std::size_t cand : {li, li + 1}) {
      if (cand >= lp.size()) continue;
      const double gap = std::abs(leader.t0 + lp[cand].t - tf);
      if (gap <= best_gap) {
        best_gap = gap;
        best = cand;
      }
    }
    if (best == lp.size()) continue;
    out.t.push_back(fp.t);
    push_point(out.leader, lp[best], leader.pos_offset);
    push_point(out.follower, fp, follower.pos_offset);
    out.spacing.push_back(out.leader.pos.back() - out.follower.pos.back());
  }
  if (out.t.empty()) {
    fail(ErrorKind::Pairing, "leader '" + leader.vehicle_id + "' and follower '" + follower.vehicle_id +
                                 "' have no overlapping timestamps");
  }
  return out;
}

bool sample_passes(const PairedSeries& p, std::size_t i, const CleaningRules& rules) {
  const double vf = p.follower.speed[i];
  const double s = p.spacing[i];
  return vf > rules.min_follower_speed_exclusive && vf <= rules.max_follower_speed && s > 0.0 &&
         s <= rules.max_spacing && std::abs(p.follower.accel[i]) <= rules.max_accel &&
         std::abs(p.leader.accel[i]) <= rules.max_accel;
}

std::vector<FollowingSegment> clean_segments(const PairedSeries& paired, const CleaningRules& rules) {
  rules.validate();
  if (paired.size() == 0) fail(ErrorKind::InsufficientData, "paired series is empty");

  std::vector<FollowingSegment> segments;
  FollowingSegment run;
  auto flush = [&] {
    if (run.size() >= rules.min_segment_len) {
      run.id = segment_id(segments.size());
      segments.push_back(std::move(run));
    }
    run = FollowingSegment{};
  };

  for (std::size_t i = 0; i < paired.size(); ++i) {
    if (!sample_passes(paired, i, rules)) {
      flush();
      continue;
    }
    if (run.size() > 0) {
      const double step = paired.t[i] - run.t.back();
      if (std::abs(step - paired.dt) > 0.1 * paired.dt) flush();
    }
    run.t.push_back(paired.t[i]);
    push_sample(run.leader, paired.leader, i);
    push_sample(run.follower, paired.follower, i);
    run.spacing.push_back(paired.spacing[i]);
  }
  flush();

  if (segments.empty()) {
    fail(ErrorKind::NoCarFollowing, "no car-following interval of at least " +
                                        std::to_string(rules.min_segment_len) + " samples survived cleaning");
  }
  return segments;
}

SplitResult split_segments(const std::vector<FollowingSegment>& segments, double fraction,
                           std::uint64_t seed) {
  if (segments.size() < 2) fail(ErrorKind::Split, "need at least 2 segments to split");
  if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorKind::Split, "split fraction must be in (0, 1)");

  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  auto eng = rng::stream(seed, 0x5117);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng::index(eng, i + 1)]);
  }

  std::size_t total = 0;
  for (const auto& s : segments) total += s.size();
  const double target = fraction * static_cast<double>(total);

  std::size_t best_k = 1;
  double best_err = INFINITY;
  std::size_t prefix = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    prefix += segments[order[k - 1]].size();
    const double err = std::abs(static_cast<double>(prefix) - target);
    if (err < best_err) {
      best_err = err;
      best_k = k;
    }
  }

  // Keep the original relative order within each side.
  std::vector<std::size_t> calib(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_k));
  std::vector<std::size_t> valid(order.begin() + static_cast<std::ptrdiff_t>(best_k), order.end());
  std::sort(calib.begin(), calib.end());
  std::sort(valid.begin(), valid.end());

  SplitResult out;
  for (auto i : calib) out.calibration.push_back(segments[i]);
  for (auto i : valid) out.validation.push_back(segments[i]);
  return out;
}

void validate_segment(const FollowingSegment& seg, std::size_t min_len) {
  const std::size_t n = seg.size();
  auto same = [n](const VehicleSeries& v) {
    return v.pos.size() == n && v.speed.size() == n && v.accel.size() == n &&
           (v.jerk.empty() || v.jerk.size() == n);
  };
  if (!same(seg.leader) || !same(seg.follower) || seg.spacing.size() != n) {
    fail(ErrorKind::Domain, "segment '" + seg.id + "': column lengths differ");
  }
  if (n < min_len) {
    fail(ErrorKind::InsufficientData, "segment '" + seg.id + "' has " + std::to_string(n) + " samples");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(seg.spacing[i] > 0.0)) {
      fail(ErrorKind::Domain, "segment '" + seg.id + "': non-positive spacing at sample " + std::to_string(i));
    }
    if (i > 0 && !(seg.t[i] > seg.t[i - 1])) {
      fail(ErrorKind::Ordering, "segment '" + seg.id + "': time not increasing at sample " + std::to_string(i));
    }
  }
}

}  // namespace cfcal::cleaning
