#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfcal/error.hpp"
#include "cfcal/ingest.hpp"
#include "cfcal/units.hpp"

using namespace cfcal;
using namespace cfcal::ingest;

namespace {

constexpr double kFeetPerDegree = 6371008.8 / 0.3048 * 3.14159265358979323846 / 180.0;

ErrorKind kind_of_failure(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::Io;
}

std::vector<GpsFix> meridian(std::vector<double> feet) {
  std::vector<GpsFix> out;
  for (std::size_t i = 0; i < feet.size(); ++i) out.push_back({double(i), 28.37 + feet[i] / kFeetPerDegree, -81.25});
  return out;
}

}  // namespace

TEST(Units, MilesPerHourToFeetPerSecond) { EXPECT_NEAR(convert_units(15.0, "mi/h", "ft/s"), 22.0, 1e-12); }

TEST(Units, ZeroStaysZero) {
  EXPECT_EQ(convert_units(0.0, Unit::MetersPerSecond, Unit::MilesPerHour), 0.0);
  EXPECT_EQ(convert_units(0.0, Unit::Meters, Unit::Feet), 0.0);
}

TEST(Units, MetersPerSecondToFeetPerSecond) { EXPECT_NEAR(convert_units(1.0, "m/s", "ft/s"), 3.2808, 1e-4); }

TEST(Units, RoundTripAndDimensionMismatch) {
  EXPECT_NEAR(convert_units(convert_units(7.3, "ft/s^2", "m/s^2"), "m/s^2", "ft/s^2"), 7.3, 1e-12);
  EXPECT_EQ(kind_of_failure([] { convert_units(1.0, "ft", "ft/s"); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of_failure([] { parse_unit("furlong"); }), ErrorKind::Domain);
}

TEST(Geodesy, IdentityIsZero) { EXPECT_EQ(geodesic_distance({0, 28.37, -81.25}, {0, 28.37, -81.25}), 0.0); }

TEST(Geodesy, OneDegreeOfMeridian) {
  const double d = geodesic_distance({0, 0, 0}, {0, 1, 0});
  EXPECT_NEAR(d, 364320.0, 364320.0 * 0.002);
  EXPECT_NEAR(d, 364813.2553593599, 1e-6);
}

TEST(Geodesy, Symmetric) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-179, 179);
  for (int k = 0; k < 200; ++k) {
    GpsFix a{0, lat(gen), lon(gen)}, b{0, lat(gen), lon(gen)};
    EXPECT_EQ(geodesic_distance(a, b), geodesic_distance(b, a));
  }
}

TEST(Geodesy, RejectsOutOfRange) {
  EXPECT_EQ(kind_of_failure([] { geodesic_distance({0, 91, 0}, {0, 0, 0}); }), ErrorKind::Domain);
}

TEST(Kinematics, IdenticalFixesGiveZeroMotion) {
  const auto tr = derive_kinematics(meridian({0, 0, 0, 0, 0}));
  for (const auto& p : tr.points) {
    EXPECT_EQ(p.speed, 0.0);
    EXPECT_EQ(p.accel, 0.0);
    EXPECT_EQ(p.jerk, 0.0);
  }
}

TEST(Kinematics, ConstantStepsGiveConstantSpeed) {
  std::vector<double> ft;
  for (int i = 0; i < 10; ++i) ft.push_back(14.39 * i);
  const auto tr = derive_kinematics(meridian(ft));
  for (const auto& p : tr.points) {
    EXPECT_NEAR(p.speed, 14.39, 1e-6);
    EXPECT_NEAR(p.accel, 0.0, 1e-6);
  }
}

TEST(Kinematics, SquaresGiveConstantAcceleration) {
  const std::vector<double> t{0, 1, 2, 3, 4}, pos{0, 1, 4, 9, 16};
  const auto tr = kinematics_from_positions(t, pos);
  for (std::size_t i = 2; i + 1 < t.size(); ++i) EXPECT_DOUBLE_EQ(tr.points[i].accel, 2.0);
  EXPECT_EQ(tr.points[0].speed, tr.points[1].speed);
  EXPECT_EQ(tr.points[0].accel, tr.points[1].accel);
  EXPECT_EQ(tr.points[0].jerk, tr.points[1].jerk);
}

TEST(Kinematics, PositionsAreCumulativeGeodesicDistances) {
  const auto fixes = meridian({0, 3, 3, 10, 18, 30, 31});
  const auto tr = derive_kinematics(fixes);
  for (std::size_t i = 1; i < fixes.size(); ++i) {
    EXPECT_GE(tr.points[i].pos, tr.points[i - 1].pos);
    EXPECT_NEAR(tr.points[i].pos - tr.points[i - 1].pos, geodesic_distance(fixes[i - 1], fixes[i]), 1e-9);
  }
}

TEST(Kinematics, RederivingFromPositionsIsIdentical) {
  const auto tr = derive_kinematics(meridian({0, 5, 11, 18, 26, 33, 41, 48}));
  std::vector<double> t, pos;
  for (const auto& p : tr.points) {
    t.push_back(p.t);
    pos.push_back(p.pos);
  }
  const auto again = kinematics_from_positions(t, pos);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(again.points[i].speed, tr.points[i].speed);
    EXPECT_EQ(again.points[i].accel, tr.points[i].accel);
    EXPECT_EQ(again.points[i].jerk, tr.points[i].jerk);
  }
}

TEST(Kinematics, ConstantAccelerationGroundTruth) {
  std::vector<double> t, pos;
  for (int i = 0; i < 30; ++i) {
    t.push_back(i);
    pos.push_back(3.0 + 4.0 * i + 0.5 * 1.5 * i * i);
  }
  const auto tr = kinematics_from_positions(t, pos);
  for (std::size_t i = 2; i < t.size(); ++i) EXPECT_NEAR(tr.points[i].accel, 1.5, 1e-9);
}

TEST(Kinematics, RejectsShortOrUnorderedInput) {
  EXPECT_EQ(kind_of_failure([] { derive_kinematics(meridian({0, 1, 2})); }), ErrorKind::InsufficientData);
  auto fixes = meridian({0, 1, 2, 3, 4});
  fixes[3].t = fixes[2].t;
  EXPECT_EQ(kind_of_failure([&] { derive_kinematics(fixes); }), ErrorKind::Ordering);
}

TEST(Kinematics, ElapsedTimeFromFirstFixAndGaps) {
  std::vector<GpsFix> fixes = meridian({0, 10, 20, 30, 40, 50});
  for (auto& f : fixes) f.t += 1700000000.0;
  fixes[4].t += 2.0;
  fixes[5].t += 2.0;
  const auto tr = derive_kinematics(fixes);
  EXPECT_EQ(tr.t0, 1700000000.0);
  EXPECT_EQ(tr.points[0].t, 0.0);
  EXPECT_EQ(find_gaps(tr), std::vector<std::size_t>{4});
}

TEST(Timestamps, EpochAndIso) {
  EXPECT_EQ(parse_timestamp("1700000000"), 1700000000.0);
  EXPECT_EQ(parse_timestamp("2023-11-14T22:13:20Z"), 1700000000.0);
  EXPECT_EQ(parse_timestamp("2023-11-14 23:13:20.5+01:00"), 1700000000.5);
  EXPECT_EQ(kind_of_failure([] { parse_timestamp("yesterday"); }), ErrorKind::Domain);
}

TEST(Csv, HeaderMustBeExact) {
  const auto fixes = parse_gps_csv("t,lat,lon\n0,28.0,-81.0\n1,28.00001,-81.0\n");
  ASSERT_EQ(fixes.size(), 2u);
  EXPECT_EQ(fixes[1].lat, 28.00001);
  EXPECT_ANY_THROW(parse_gps_csv("time,lat,lon\n0,28,-81\n"));
  EXPECT_ANY_THROW(parse_gps_csv("t,lat,lon\n0,28\n"));
}

TEST(Csv, MissingFileNamesThePath) {
  try {
    read_gps_csv("/nonexistent/leader.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/leader.csv"), std::string::npos);
  }
}

TEST(Pairing, ReferencePairUsesDirectDistance) {
  auto follower = meridian({0, 10, 20, 30, 40});
  auto leader = meridian({60, 70, 80, 90, 100});
  const auto pair = reference_pair(leader, follower);
  const double first = pair.leader.points[0].pos + pair.leader.pos_offset - pair.follower.points[0].pos -
                       pair.follower.pos_offset;
  EXPECT_NEAR(first, geodesic_distance(leader[0], follower[0]), 1e-9);
  EXPECT_NEAR(first, 60.0, 1e-6);
}
