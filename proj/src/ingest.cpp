#include "cfcal/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cfcal/error.hpp"
#include "cfcal/units.hpp"

namespace cfcal::ingest {

namespace {

constexpr double kEarthRadiusFeet = kEarthRadiusMeters / kMetersPerFoot;

void check_fix(const GpsFix& f) {
  if (!(f.lat >= -90.0 && f.lat <= 90.0) || !(f.lon >= -180.0 && f.lon <= 180.0)) {
    fail(ErrorKind::Domain, "GPS fix out of range: lat=" + std::to_string(f.lat) +
                                " lon=" + std::to_string(f.lon));
  }
}

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

// Backward difference with the first element copied from the second.
std::vector<double> backward_diff(std::span<const double> y, std::span<const double> t) {
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i) {
    out[i] = (y[i] - y[i - 1]) / (t[i] - t[i - 1]);
  }
  if (out.size() > 1) out[0] = out[1];
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorKind::Domain, "cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  }
  return value;
}

int parse_int_field(std::string_view s, std::size_t pos, std::size_t len, std::string_view full) {
  if (pos + len > s.size()) fail(ErrorKind::Domain, "malformed timestamp '" + std::string(full) + "'");
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc{} || ptr != s.data() + pos + len) {
    fail(ErrorKind::Domain, "malformed timestamp '" + std::string(full) + "'");
  }
  return value;
}

}  // namespace

double geodesic_distance(const GpsFix& a, const GpsFix& b) {
  check_fix(a);
  check_fix(b);
  const double phi1 = radians(a.lat);
  const double phi2 = radians(b.lat);
  const double dphi = phi2 - phi1;
  const double dlambda = radians(b.lon - a.lon);
  const double sin_dphi = std::sin(dphi / 2.0);
  const double sin_dlambda = std::sin(dlambda / 2.0);
  double h = sin_dphi * sin_dphi + std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusFeet * std::asin(std::sqrt(h));
}

Trajectory kinematics_from_positions(std::span<const double> t, std::span<const double> pos,
                                     std::string vehicle_id, double dt) {
  if (t.size() != pos.size()) fail(ErrorKind::Domain, "time and position lengths differ");
  if (t.size() < 4) {
    fail(ErrorKind::InsufficientData,
         "need at least 4 samples to derive jerk, got " + std::to_string(t.size()));
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      fail(ErrorKind::Ordering, "timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
  if (!(dt > 0.0)) fail(ErrorKind::Domain, "dt must be positive");

  const auto speed = backward_diff(pos, t);
  const auto accel = backward_diff(speed, t);
  const auto jerk = backward_diff(accel, t);

  Trajectory traj;
  traj.vehicle_id = std::move(vehicle_id);
  traj.dt = dt;
  traj.points.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    traj.points.push_back({t[i], pos[i], speed[i], accel[i], jerk[i]});
  }
  return traj;
}

Trajectory derive_kinematics(std::span<const GpsFix> fixes, std::string vehicle_id, double dt) {
  if (fixes.size() < 4) {
    fail(ErrorKind::InsufficientData,
         "need at least 4 fixes to derive jerk, got " + std::to_string(fixes.size()));
  }
  for (const auto& f : fixes) check_fix(f);

  std::vector<double> t(fixes.size());
  std::vector<double> pos(fixes.size(), 0.0);
  const double t0 = fixes.front().t;
  for (std::size_t i = 0; i < fixes.size(); ++i) {
    t[i] = fixes[i].t - t0;
    if (i > 0) pos[i] = pos[i - 1] + geodesic_distance(fixes[i - 1], fixes[i]);
  }
  auto traj = kinematics_from_positions(t, pos, std::move(vehicle_id), dt);
  traj.t0 = t0;
  return traj;
}

std::vector<std::size_t> find_gaps(const Trajectory& traj) {
  std::vector<std::size_t> gaps;
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    const double step = traj.points[i].t - traj.points[i - 1].t;
    if (std::abs(step - traj.dt) > 0.1 * traj.dt) gaps.push_back(i);
  }
  return gaps;
}

double parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) fail(ErrorKind::Domain, "empty timestamp");
  // Plain number: epoch seconds.
  if (text.size() < 10 || text[4] != '-') return parse_number(text, "timestamp");

  const int year = parse_int_field(text, 0, 4, text);
  const int month = parse_int_field(text, 5, 2, text);
  const int day = parse_int_field(text, 8, 2, text);
  if (text[7] != '-') fail(ErrorKind::Domain, "malformed timestamp '" + std::string(text) + "'");

  double seconds_of_day = 0.0;
  std::size_t cursor = 10;
  if (cursor < text.size()) {
    if (text[cursor] != 'T' && text[cursor] != ' ') {
      fail(ErrorKind::Domain, "malformed timestamp '" + std::string(text) + "'");
    }
    const int hh = parse_int_field(text, cursor + 1, 2, text);
    const int mm = parse_int_field(text, cursor + 4, 2, text);
    if (text[cursor + 3] != ':') fail(ErrorKind::Domain, "malformed timestamp '" + std::string(text) + "'");
    cursor += 6;
    double ss = 0.0;
    if (cursor < text.size() && text[cursor] == ':') {
      std::size_t end = cursor + 1;
      while (end < text.size() && (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.')) ++end;
      ss = parse_number(text.substr(cursor + 1, end - cursor - 1), "seconds");
      cursor = end;
    }
    if (hh > 23 || mm > 59 || ss >= 61.0) {
      fail(ErrorKind::Domain, "time of day out of range in '" + std::string(text) + "'");
    }
    seconds_of_day = hh * 3600.0 + mm * 60.0 + ss;
  }

  double offset = 0.0;
  if (cursor < text.size()) {
    const char c = text[cursor];
    if (c == 'Z' && cursor + 1 == text.size()) {
      offset = 0.0;
    } else if ((c == '+' || c == '-') && cursor + 6 == text.size() && text[cursor + 3] == ':') {
      const int oh = parse_int_field(text, cursor + 1, 2, text);
      const int om = parse_int_field(text, cursor + 4, 2, text);
      offset = (c == '+' ? 1.0 : -1.0) * (oh * 3600.0 + om * 60.0);
    } else {
      fail(ErrorKind::Domain, "malformed timestamp '" + std::string(text) + "'");
    }
  }

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) fail(ErrorKind::Domain, "invalid date in '" + std::string(text) + "'");
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days_since_epoch) * 86400.0 + seconds_of_day - offset;
}

std::vector<GpsFix> parse_gps_csv(std::string_view content, std::string_view origin) {
  std::vector<GpsFix> fixes;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!content.empty()) {
    const auto nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "t,lat,lon") {
        fail(ErrorKind::Domain, std::string(origin) + ": header must be exactly 't,lat,lon'");
      }
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      fail(ErrorKind::Domain, std::string(origin) + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    GpsFix fix;
    fix.t = parse_timestamp(line.substr(0, c1));
    fix.lat = parse_number(line.substr(c1 + 1, c2 - c1 - 1), "lat");
    fix.lon = parse_number(line.substr(c2 + 1), "lon");
    check_fix(fix);
    if (!fixes.empty() && !(fix.t > fixes.back().t)) {
      fail(ErrorKind::Ordering, std::string(origin) + ":" + std::to_string(line_no) +
                                    ": timestamps not strictly increasing");
    }
    fixes.push_back(fix);
  }
  if (!header_seen) fail(ErrorKind::Domain, std::string(origin) + ": empty file");
  return fixes;
}

std::vector<GpsFix> read_gps_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_gps_csv(ss.str(), path);
}

TrajectoryPair reference_pair(std::span<const GpsFix> leader_fixes,
                              std::span<const GpsFix> follower_fixes, double dt) {
  TrajectoryPair pair{derive_kinematics(leader_fixes, "leader", dt),
                      derive_kinematics(follower_fixes, "follower", dt)};
  // First follower fix with a leader fix within 0.1 s.
  std::size_t li = 0;
  for (std::size_t fi = 0; fi < follower_fixes.size(); ++fi) {
    const double tf = follower_fixes[fi].t;
    while (li + 1 < leader_fixes.size() && leader_fixes[li + 1].t <= tf) ++li;
    for (std::size_t cand : {li, li + 1}) {
      if (cand >= leader_fixes.size()) continue;
      if (std::abs(leader_fixes[cand].t - tf) <= 0.1) {
        const double direct = geodesic_distance(leader_fixes[cand], follower_fixes[fi]);
        pair.leader.pos_offset =
            direct + pair.follower.points[fi].pos - pair.leader.points[cand].pos;
        return pair;
      }
    }
  }
  fail(ErrorKind::Pairing, "leader and follower logs share no timestamp within 0.1 s");
}

}  // namespace cfcal::ingest
