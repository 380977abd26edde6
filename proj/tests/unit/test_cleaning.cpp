#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cfcal/cleaning.hpp"
#include "cfcal/error.hpp"
#include "cfcal/io.hpp"

using namespace cfcal;
using namespace cfcal::cleaning;

namespace {

ingest::Trajectory traj(std::size_t n, double pos0, double speed, double t_start = 0.0) {
  ingest::Trajectory t;
  t.t0 = 1000.0 + t_start;
  for (std::size_t i = 0; i < n; ++i) {
    t.points.push_back({double(i), pos0 + speed * double(i), speed, 0.0, 0.0});
  }
  return t;
}

// Independent scan of the rules: returns the kept (index) runs.
std::vector<std::vector<std::size_t>> oracle_runs(const PairedSeries& p, const CleaningRules& r) {
  std::vector<std::vector<std::size_t>> runs;
  std::vector<std::size_t> cur;
  auto close = [&] {
    if (cur.size() >= r.min_segment_len) runs.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    const bool ok = p.follower.speed[i] > r.min_follower_speed_exclusive &&
                    p.follower.speed[i] <= r.max_follower_speed && p.spacing[i] > 0 && p.spacing[i] <= r.max_spacing &&
                    std::fabs(p.follower.accel[i]) <= r.max_accel && std::fabs(p.leader.accel[i]) <= r.max_accel;
    if (!ok) {
      close();
      continue;
    }
    if (!cur.empty() && std::fabs(p.t[i] - p.t[cur.back()] - p.dt) > 0.1 * p.dt) close();
    cur.push_back(i);
  }
  close();
  return runs;
}

std::vector<FollowingSegment> equal_segments(std::size_t count, std::size_t len) {
  std::vector<FollowingSegment> out;
  for (std::size_t k = 0; k < count; ++k) {
    FollowingSegment s;
    s.id = "s" + std::to_string(k);
    for (std::size_t i = 0; i < len; ++i) {
      s.t.push_back(double(i));
      s.leader.pos.push_back(100.0 + i);
      s.leader.speed.push_back(1.0);
      s.leader.accel.push_back(0.0);
      s.follower.pos.push_back(double(i));
      s.follower.speed.push_back(1.0);
      s.follower.accel.push_back(0.0);
      s.spacing.push_back(100.0);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Pairing, IdenticalGrids) {
  const auto p = pair_trajectories(traj(100, 150, 10), traj(100, 50, 10));
  EXPECT_EQ(p.size(), 100u);
  for (double s : p.spacing) EXPECT_DOUBLE_EQ(s, 100.0);
}

TEST(Pairing, LeaderStartsEarlierKeepsOverlapOnly) {
  const auto p = pair_trajectories(traj(100, 150, 10, -10.0), traj(100, 50, 10));
  EXPECT_EQ(p.size(), 90u);
}

TEST(Pairing, NoOverlapIsAnError) {
  try {
    pair_trajectories(traj(10, 0, 1, 500.0), traj(10, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Pairing);
  }
}

TEST(Cleaning, FixtureCountsMatch) {
  const auto pair = io::pair_from_json(io::read_json_file(CFCAL_TEST_DATA "/cleaning_pair.json"));
  const auto paired = pair_trajectories(pair.leader, pair.follower);
  ASSERT_EQ(paired.size(), 6433u);
  const auto segs = clean_segments(paired);
  std::size_t kept = 0;
  for (const auto& s : segs) kept += s.size();
  EXPECT_EQ(kept, 4427u);

  const auto runs = oracle_runs(paired, CleaningRules{});
  ASSERT_EQ(runs.size(), segs.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    ASSERT_EQ(runs[k].size(), segs[k].size());
    EXPECT_EQ(paired.t[runs[k].front()], segs[k].t.front());
  }
}

TEST(Cleaning, AllStoppedIsNoCarFollowing) {
  auto f = traj(50, 0, 0.0);
  try {
    clean_segments(pair_trajectories(traj(50, 100, 0.0), f));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCarFollowing);
  }
}

TEST(Cleaning, AccelSpikeSplitsRun) {
  auto f = traj(30, 0, 10);
  f.points[14].accel = 19.0;
  const auto paired = pair_trajectories(traj(30, 80, 10), f);
  const auto segs = clean_segments(paired);
  const auto runs = oracle_runs(paired, CleaningRules{});
  ASSERT_EQ(segs.size(), runs.size());
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].size(), 14u);
  EXPECT_EQ(segs[1].size(), 15u);
  for (const auto& s : segs) EXPECT_EQ(std::count(s.t.begin(), s.t.end(), 14.0), 0);
}

TEST(Cleaning, RetainedSamplesPassAndSegmentsAreContiguous) {
  const auto pair = io::pair_from_json(io::read_json_file(CFCAL_TEST_DATA "/cleaning_pair.json"));
  const auto segs = clean_segments(pair_trajectories(pair.leader, pair.follower));
  const CleaningRules r;
  double last_end = -1e300;
  for (const auto& s : segs) {
    EXPECT_GE(s.size(), r.min_segment_len);
    EXPECT_GT(s.t.front(), last_end);
    last_end = s.t.back();
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_GT(s.follower.speed[i], 0.0);
      EXPECT_LE(s.follower.speed[i], r.max_follower_speed);
      EXPECT_GT(s.spacing[i], 0.0);
      EXPECT_LE(s.spacing[i], r.max_spacing);
      EXPECT_LE(std::fabs(s.follower.accel[i]), r.max_accel);
      EXPECT_LE(std::fabs(s.leader.accel[i]), r.max_accel);
      if (i > 0) EXPECT_NEAR(s.t[i] - s.t[i - 1], 1.0, 0.1);
    }
  }
}

TEST(Cleaning, InvalidRulesRejected) {
  CleaningRules r;
  r.max_spacing = -1;
  EXPECT_ANY_THROW(r.validate());
}

TEST(Split, TenEqualSegments) {
  const auto r = split_segments(equal_segments(10, 20), 0.8, 7);
  EXPECT_EQ(r.calibration.size(), 8u);
  EXPECT_EQ(r.validation.size(), 2u);
}

TEST(Split, TwoSegmentsOneEach) {
  const auto r = split_segments(equal_segments(2, 20), 0.8, 1);
  EXPECT_EQ(r.calibration.size(), 1u);
  EXPECT_EQ(r.validation.size(), 1u);
}

TEST(Split, DeterministicDisjointAndComplete) {
  const auto segs = equal_segments(9, 15);
  const auto a = split_segments(segs, 0.7, 42);
  const auto b = split_segments(segs, 0.7, 42);
  std::vector<std::string> ia, ib;
  for (const auto& s : a.calibration) ia.push_back(s.id);
  for (const auto& s : b.calibration) ib.push_back(s.id);
  EXPECT_EQ(ia, ib);
  std::set<std::string> all;
  for (const auto& s : a.calibration) all.insert(s.id);
  for (const auto& s : a.validation) EXPECT_TRUE(all.insert(s.id).second);
  EXPECT_EQ(all.size(), segs.size());
}

TEST(Split, NeedsTwoSegmentsAndValidFraction) {
  EXPECT_ANY_THROW(split_segments(equal_segments(1, 20), 0.8, 0));
  EXPECT_ANY_THROW(split_segments(equal_segments(4, 20), 1.0, 0));
}
