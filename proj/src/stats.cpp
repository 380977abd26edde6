#include "cfcal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cfcal/error.hpp"

namespace cfcal::stats {

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Horner evaluation, c[0] is the constant term.
template <std::size_t N>
double poly(const std::array<double, N>& c, double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
  return r;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Inverse standard normal CDF. Rational starting point (AS 111) polished by
// Newton steps on erfc, which is accurate to double precision.
double normal_quantile(double p) {
  const double q = p - 0.5;
  double z = 0.0;
  if (std::abs(q) <= 0.42) {
    const double r = q * q;
    z = q * (((-25.44106049637 * r + 41.39119773534) * r - 18.61500062529) * r + 2.50662823884) /
        ((((3.13082909833 * r - 21.06224101826) * r + 23.08336743743) * r - 8.47351093090) * r + 1.0);
  } else {
    double r = q > 0.0 ? 1.0 - p : p;
    r = std::sqrt(-std::log(r));
    z = (((2.32121276858 * r + 4.85014127135) * r - 2.29796479134) * r - 2.78718931138) /
        ((1.63706781897 * r + 3.54388924762) * r + 1.0);
    if (q < 0.0) z = -z;
  }
  for (int iter = 0; iter < 3; ++iter) {
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf <= 0.0) break;
    z -= (cdf - p) / pdf;
  }
  return z;
}

}  // namespace

void ComfortThresholds::validate() const {
  if (!(excellent > 0.0 && excellent < upper_excellent && upper_excellent < expected)) {
    fail(ErrorKind::Config, "comfort thresholds must be positive and strictly increasing");
  }
}

double quantile_sorted(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DescriptiveStats describe(std::span<const double> series) {
  if (series.size() < 2) {
    fail(ErrorKind::InsufficientData, "describe needs at least 2 values, got " + std::to_string(series.size()));
  }
  const auto s = sorted_copy(series);
  DescriptiveStats d;
  d.count = s.size();
  // Sum in sorted order so the result does not depend on input order.
  d.mean = mean_of(s);
  d.std = sample_std(s, d.mean);
  d.min = s.front();
  d.q25 = quantile_sorted(s, 0.25);
  d.q50 = quantile_sorted(s, 0.50);
  d.q75 = quantile_sorted(s, 0.75);
  d.max = s.back();
  return d;
}

ShapiroWilk shapiro_wilk(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 3 || n > 5000) {
    fail(ErrorKind::Domain, "Shapiro-Wilk requires 3 <= n <= 5000, got " + std::to_string(n));
  }
  static constexpr std::array<double, 6> c1{0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
  static constexpr std::array<double, 6> c2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr std::array<double, 4> c3{0.5440, -0.39978, 0.025054, -6.714e-4};
  static constexpr std::array<double, 4> c4{1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr std::array<double, 4> c5{-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr std::array<double, 3> c6{-0.4803, -0.082676, 0.0030302};
  static constexpr std::array<double, 2> g{-2.273, 0.459};
  constexpr double kSmall = 1e-19;

  const auto x = sorted_copy(series);
  const double range = x.back() - x.front();
  if (range < kSmall) fail(ErrorKind::UndefinedStatistic, "Shapiro-Wilk undefined for zero-range data");

  const double an = static_cast<double>(n);
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
  } else {
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - m[0] / ssumm2;
    std::size_t first = 1;
    double fac = 0.0;
    if (n > 5) {
      first = 2;
      const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  }

  // Antisymmetric coefficient vector over the sorted sample.
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    coef[i] = -a[i];
    coef[n - 1 - i] = a[i];
  }
  const double ca = mean_of(coef);
  double cx = 0.0;
  for (double v : x) cx += v / range;
  cx /= an;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = coef[i] - ca;
    const double dx = x[i] / range - cx;
    ssa += da * da;
    ssx += dx * dx;
    sax += da * dx;
  }
  // 1 - W, computed directly to limit cancellation when W is near 1.
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  ShapiroWilk out;
  out.w = 1.0 - w1;

  if (n == 3) {
    constexpr double kPi6 = 6.0 / std::numbers::pi;
    constexpr double kStqr = std::numbers::pi / 3.0;
    out.p = std::max(0.0, kPi6 * (std::asin(std::sqrt(out.w)) - kStqr));
    return out;
  }
  double y = std::log(w1);
  const double xx = std::log(an);
  double mu = 0.0;
  double sigma = 1.0;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (y >= gamma) {
      out.p = kSmall;
      return out;
    }
    y = -std::log(gamma - y);
    mu = poly(c3, an);
    sigma = std::exp(poly(c4, an));
  } else {
    mu = poly(c5, xx);
    sigma = std::exp(poly(c6, xx));
  }
  out.p = normal_upper_tail((y - mu) / sigma);
  return out;
}

std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i + 1;
    while (j < idx.size() && x[idx[j]] == x[idx[i]]) ++j;
    // Positions i..j-1 share the average of ranks i+1..j.
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorKind::Domain, "spearman: length mismatch " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
  if (x.size() < 3) fail(ErrorKind::InsufficientData, "spearman needs at least 3 pairs");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  // Mean rank is exactly (n + 1) / 2 regardless of ties.
  const double mr = 0.5 * (static_cast<double>(x.size()) + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mr;
    const double dy = ry[i] - mr;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorKind::UndefinedStatistic, "spearman: zero rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double coefficient_of_variation(std::span<const double> series) {
  if (series.size() < 2) fail(ErrorKind::InsufficientData, "coefficient of variation needs n >= 2");
  const double m = mean_of(series);
  if (m == 0.0) fail(ErrorKind::UndefinedStatistic, "coefficient of variation undefined for zero mean");
  return sample_std(series, m) / std::abs(m);
}

double iqr_outlier_share(std::span<const double> series) {
  if (series.size() < 4) fail(ErrorKind::InsufficientData, "IQR outlier share needs n >= 4");
  const auto s = sorted_copy(series);
  const double q1 = quantile_sorted(s, 0.25);
  const double q3 = quantile_sorted(s, 0.75);
  const double iqr = q3 - q1;
  const double lo = q1 - 1.5 * iqr;
  const double hi = q3 + 1.5 * iqr;
  const auto outside = std::count_if(s.begin(), s.end(), [&](double v) { return v < lo || v > hi; });
  return static_cast<double>(outside) / static_cast<double>(s.size());
}

std::array<double, 3> jerk_comfort_shares(std::span<const double> jerk, const ComfortThresholds& th) {
  th.validate();
  if (jerk.empty()) fail(ErrorKind::InsufficientData, "jerk series is empty");
  std::array<std::size_t, 3> above{};
  const std::array<double, 3> limits{th.excellent, th.upper_excellent, th.expected};
  for (double j : jerk) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (std::abs(j) > limits[k]) ++above[k];
    }
  }
  std::array<double, 3> shares{};
  for (std::size_t k = 0; k < 3; ++k) {
    shares[k] = static_cast<double>(above[k]) / static_cast<double>(jerk.size());
  }
  return shares;
}

Histogram histogram(std::string name, std::span<const double> values, std::size_t bins) {
  Histogram h;
  h.name = std::move(name);
  if (values.empty() || bins == 0) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t k = width > 0.0 ? static_cast<std::size_t>((v - h.lo) / width) : 0;
    ++h.counts[std::min(k, bins - 1)];
  }
  return h;
}

// ---------------------------------------------------------------------------

namespace {

template <class F>
std::optional<double> try_stat(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::nullopt;
  }
}

const std::vector<double>& column(const cleaning::VehicleSeries& v, const std::string& variable) {
  if (variable == "speed") return v.speed;
  if (variable == "accel") return v.accel;
  return v.jerk;
}

}  // namespace

StatsReport analyze_segments(const std::vector<cleaning::FollowingSegment>& segments,
                             const ComfortThresholds& th) {
  th.validate();
  StatsReport rep;
  rep.comfort = th;
  rep.segments = segments.size();

  std::vector<double> speed, accel, jerk, spacing, dv;
  for (const auto& seg : segments) {
    if (seg.follower.jerk.size() != seg.size()) {
      fail(ErrorKind::Domain, "segment '" + seg.id + "' has no follower jerk column");
    }
    speed.insert(speed.end(), seg.follower.speed.begin(), seg.follower.speed.end());
    accel.insert(accel.end(), seg.follower.accel.begin(), seg.follower.accel.end());
    jerk.insert(jerk.end(), seg.follower.jerk.begin(), seg.follower.jerk.end());
    spacing.insert(spacing.end(), seg.spacing.begin(), seg.spacing.end());
    for (std::size_t i = 0; i < seg.size(); ++i) dv.push_back(seg.follower.speed[i] - seg.leader.speed[i]);
  }
  rep.samples = speed.size();
  if (rep.samples < 2) fail(ErrorKind::InsufficientData, "need at least 2 samples for a report");

  auto summarize = [](std::string name, std::string unit, const std::vector<double>& v) {
    VariableSummary s{std::move(name), std::move(unit), describe(v), std::nullopt};
    if (v.size() >= 3 && v.size() <= 5000) {
      try {
        s.normality = shapiro_wilk(v);
      } catch (const Error&) {
      }
    }
    return s;
  };
  rep.variables.push_back(summarize("speed", "ft/s", speed));
  rep.variables.push_back(summarize("accel", "ft/s^2", accel));
  rep.variables.push_back(summarize("jerk", "ft/s^3", jerk));
  rep.variables.push_back(summarize("spacing", "ft", spacing));

  rep.correlation_names = {"speed", "accel", "jerk", "spacing", "delta_speed"};
  const std::array<const std::vector<double>*, 5> cols{&speed, &accel, &jerk, &spacing, &dv};
  rep.spearman_matrix.assign(cols.size(), std::vector<std::optional<double>>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i; j < cols.size(); ++j) {
      const auto r = try_stat([&] { return spearman(*cols[i], *cols[j]); });
      rep.spearman_matrix[i][j] = r;
      rep.spearman_matrix[j][i] = r;
    }
  }

  for (const std::string vehicle : {"av", "car"}) {
    for (const std::string variable : {"speed", "accel", "jerk"}) {
      for (const std::string regime : {"all", "acc+", "acc-"}) {
        VariabilityCell cell{vehicle, variable, regime, std::nullopt, std::nullopt, 0, 0};
        double cv_sum = 0.0, out_sum = 0.0;
        for (const auto& seg : segments) {
          const auto& veh = vehicle == "av" ? seg.follower : seg.leader;
          const auto& col = column(veh, variable);
          if (col.size() != seg.size()) continue;
          std::vector<double> trip;
          for (std::size_t i = 0; i < seg.size(); ++i) {
            const double a = veh.accel[i];
            if (regime == "all" || (regime == "acc+" && a > 0.0) || (regime == "acc-" && a < 0.0)) {
              trip.push_back(col[i]);
            }
          }
          if (auto cv = try_stat([&] { return coefficient_of_variation(trip); })) {
            cv_sum += *cv;
            ++cell.trips_cv;
          }
          if (auto o = try_stat([&] { return iqr_outlier_share(trip); })) {
            out_sum += *o;
            ++cell.trips_outlier;
          }
        }
        if (cell.trips_cv > 0) cell.mean_cv = cv_sum / static_cast<double>(cell.trips_cv);
        if (cell.trips_outlier > 0) cell.mean_outlier_share = out_sum / static_cast<double>(cell.trips_outlier);
        rep.variability.push_back(std::move(cell));
      }
    }
  }

  rep.histograms = {histogram("speed", speed), histogram("accel", accel), histogram("jerk", jerk),
                    histogram("spacing", spacing)};
  rep.comfort_shares = jerk_comfort_shares(jerk, th);
  for (double a : accel) rep.max_abs_accel = std::max(rep.max_abs_accel, std::abs(a));
  for (double j : jerk) rep.max_abs_jerk = std::max(rep.max_abs_jerk, std::abs(j));
  return rep;
}

}  // namespace cfcal::stats
