#include "cfcal/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfcal/error.hpp"

namespace cfcal::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Config, std::string("missing field '") + key + "'");
  return j.at(key);
}

double num(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) fail(ErrorKind::Config, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double num_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? num(j, key) : fallback;
}

std::vector<double> nums(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) fail(ErrorKind::Config, std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) fail(ErrorKind::Config, std::string("non-numeric entry in '") + key + "'");
    out.push_back(x.get<double>());
  }
  return out;
}

Json vehicle_json(const cleaning::VehicleSeries& v) {
  Json j;
  j["pos"] = v.pos;
  j["speed"] = v.speed;
  j["accel"] = v.accel;
  if (!v.jerk.empty()) j["jerk"] = v.jerk;
  return j;
}

cleaning::VehicleSeries vehicle_from_json(const Json& j) {
  cleaning::VehicleSeries v;
  v.pos = nums(j, "pos");
  v.speed = nums(j, "speed");
  v.accel = nums(j, "accel");
  if (j.contains("jerk")) v.jerk = nums(j, "jerk");
  return v;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Config, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path() && !fs::exists(target.parent_path())) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::Io, "cannot rename onto '" + path + "': " + ec.message());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

Json to_json(const ingest::Trajectory& t) {
  Json j;
  j["vehicle_id"] = t.vehicle_id;
  j["dt"] = t.dt;
  j["t0"] = t.t0;
  j["pos_offset"] = t.pos_offset;
  Json pts = Json::array();
  for (const auto& p : t.points) {
    pts.push_back({{"t", p.t}, {"pos", p.pos}, {"speed", p.speed}, {"accel", p.accel}, {"jerk", p.jerk}});
  }
  j["points"] = std::move(pts);
  return j;
}

ingest::Trajectory trajectory_from_json(const Json& j) {
  ingest::Trajectory t;
  t.vehicle_id = j.value("vehicle_id", std::string("vehicle"));
  t.dt = num_or(j, "dt", 1.0);
  t.t0 = num_or(j, "t0", 0.0);
  t.pos_offset = num_or(j, "pos_offset", 0.0);
  const auto& pts = field(j, "points");
  if (!pts.is_array()) fail(ErrorKind::Config, "'points' must be an array");
  for (const auto& p : pts) {
    t.points.push_back({num(p, "t"), num(p, "pos"), num(p, "speed"), num(p, "accel"), num(p, "jerk")});
  }
  return t;
}

Json to_json(const ingest::TrajectoryPair& p) {
  return Json{{"leader", to_json(p.leader)}, {"follower", to_json(p.follower)}};
}

ingest::TrajectoryPair pair_from_json(const Json& j) {
  return {trajectory_from_json(field(j, "leader")), trajectory_from_json(field(j, "follower"))};
}

Json to_json(const std::vector<cleaning::FollowingSegment>& segments) {
  Json arr = Json::array();
  for (const auto& s : segments) {
    Json j;
    j["id"] = s.id;
    j["t"] = s.t;
    j["leader"] = vehicle_json(s.leader);
    j["follower"] = vehicle_json(s.follower);
    j["spacing"] = s.spacing;
    arr.push_back(std::move(j));
  }
  return Json{{"segments", std::move(arr)}};
}

std::vector<cleaning::FollowingSegment> segments_from_json(const Json& j) {
  const auto& arr = field(j, "segments");
  if (!arr.is_array()) fail(ErrorKind::Config, "'segments' must be an array");
  std::vector<cleaning::FollowingSegment> out;
  for (const auto& s : arr) {
    cleaning::FollowingSegment seg;
    seg.id = s.value("id", "seg-" + std::to_string(out.size()));
    seg.t = nums(s, "t");
    seg.leader = vehicle_from_json(field(s, "leader"));
    seg.follower = vehicle_from_json(field(s, "follower"));
    if (s.contains("spacing")) {
      seg.spacing = nums(s, "spacing");
    } else {
      for (std::size_t i = 0; i < seg.leader.pos.size() && i < seg.follower.pos.size(); ++i) {
        seg.spacing.push_back(seg.leader.pos[i] - seg.follower.pos[i]);
      }
    }
    cleaning::validate_segment(seg, 1);
    out.push_back(std::move(seg));
  }
  return out;
}

Json to_json(const cleaning::CleaningRules& r) {
  return Json{{"max_accel", r.max_accel},
              {"max_follower_speed", r.max_follower_speed},
              {"min_follower_speed_exclusive", r.min_follower_speed_exclusive},
              {"max_spacing", r.max_spacing},
              {"min_segment_len", r.min_segment_len}};
}

cleaning::CleaningRules rules_from_json(const Json& j) {
  cleaning::CleaningRules r;
  r.max_accel = num_or(j, "max_accel", r.max_accel);
  r.max_follower_speed = num_or(j, "max_follower_speed", r.max_follower_speed);
  r.min_follower_speed_exclusive = num_or(j, "min_follower_speed_exclusive", r.min_follower_speed_exclusive);
  r.max_spacing = num_or(j, "max_spacing", r.max_spacing);
  r.min_segment_len = static_cast<std::size_t>(num_or(j, "min_segment_len", static_cast<double>(r.min_segment_len)));
  r.validate();
  return r;
}

Json to_json(const models::ModelParams& p) {
  struct Visitor {
    Json operator()(const models::IdmParams& m) const {
      return Json{{"model", "idm"}, {"a", m.a}, {"delta", m.delta}, {"v0", m.v0},
                  {"s0", m.s0},     {"T", m.T}, {"b", m.b}};
    }
    Json operator()(const models::BlendParams& m) const {
      Json j = (*this)(m.idm);
      j["model"] = "blend";
      j["c"] = m.c;
      j["improved"] = m.improved;
      return j;
    }
    Json operator()(const models::AccParams& m) const {
      return Json{{"model", "linear_acc"}, {"k1", m.k1}, {"k2", m.k2}, {"t_des", m.t_des}, {"d0", m.d0}};
    }
  };
  return std::visit(Visitor{}, p);
}

models::ModelParams params_from_json(const Json& j) {
  const auto& kind_field = field(j, "model");
  if (!kind_field.is_string()) fail(ErrorKind::Config, "'model' must be a string");
  const auto kind = models::parse_kind(kind_field.get<std::string>());
  auto idm = [&] {
    const double delta = num(j, "delta");
    if (delta != std::round(delta)) fail(ErrorKind::Config, "'delta' must be an integer");
    return models::IdmParams{num(j, "a"), static_cast<int>(delta), num(j, "v0"), num(j, "s0"), num(j, "T"), num(j, "b")};
  };
  models::ModelParams out;
  switch (kind) {
    case models::ModelKind::Idm:
      out = idm();
      break;
    case models::ModelKind::Blend: {
      models::BlendParams p;
      p.idm = idm();
      p.c = num(j, "c");
      p.improved = j.value("improved", false);
      out = p;
      break;
    }
    case models::ModelKind::LinearAcc: {
      models::AccParams p;
      p.k1 = num(j, "k1");
      p.k2 = num(j, "k2");
      p.t_des = j.contains("t_des") ? num(j, "t_des") : num(j, "t_hw");
      p.d0 = num_or(j, "d0", p.d0);
      out = p;
      break;
    }
  }
  models::validate(out);
  return out;
}

Json to_json(const sim::SimLimits& l) {
  return Json{{"a_min", l.a_min}, {"a_max", l.a_max}, {"v_max", l.v_max}, {"v_min", l.v_min}};
}

sim::SimLimits limits_from_json(const Json& j) {
  sim::SimLimits l;
  l.a_min = num_or(j, "a_min", l.a_min);
  l.a_max = num_or(j, "a_max", l.a_max);
  l.v_max = num_or(j, "v_max", l.v_max);
  l.v_min = num_or(j, "v_min", l.v_min);
  l.validate();
  return l;
}

Json to_json(const std::vector<sim::SimResult>& results) {
  Json arr = Json::array();
  for (const auto& r : results) {
    arr.push_back({{"segment_id", r.segment_id},
                   {"t", r.t},
                   {"follower_pos", r.follower_pos},
                   {"follower_speed", r.follower_speed},
                   {"follower_accel", r.follower_accel},
                   {"spacing", r.spacing},
                   {"collision_events", r.collision_events}});
  }
  return Json{{"results", std::move(arr)}};
}

std::vector<sim::SimResult> sim_results_from_json(const Json& j) {
  std::vector<sim::SimResult> out;
  for (const auto& r : field(j, "results")) {
    sim::SimResult s;
    s.segment_id = r.value("segment_id", std::string());
    s.t = nums(r, "t");
    s.follower_pos = nums(r, "follower_pos");
    s.follower_speed = nums(r, "follower_speed");
    s.follower_accel = nums(r, "follower_accel");
    s.spacing = nums(r, "spacing");
    s.collision_events = static_cast<std::size_t>(num_or(r, "collision_events", 0.0));
    out.push_back(std::move(s));
  }
  return out;
}

Json to_json(const calib::GaConfig& c, models::ModelKind kind) {
  Json bounds = Json::object();
  for (const auto& g : c.genes_for(kind)) bounds[g.name] = Json::array({g.lo, g.hi});
  return Json{{"population", c.population},
              {"max_generations", c.max_generations},
              {"mutation_prob", c.mutation_prob},
              {"mutation_operator", calib::mutation_operator_name(c.mutation_operator)},
              {"crossover_operator", calib::crossover_operator_name(c.crossover_operator)},
              {"crossover_prob", c.crossover_prob},
              {"elitism_ratio", c.elitism_ratio},
              {"seeds", c.seeds},
              {"stall_generations", c.stall_generations},
              {"bounds", std::move(bounds)}};
}

calib::GaConfig ga_config_from_json(const Json& j, models::ModelKind kind) {
  calib::GaConfig c;
  auto count = [&](const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const double v = num(j, key);
    if (v < 0 || v != std::floor(v)) fail(ErrorKind::Config, std::string("'") + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  c.population = count("population", c.population);
  c.max_generations = count("max_generations", c.max_generations);
  c.stall_generations = count("stall_generations", c.stall_generations);
  c.mutation_prob = num_or(j, "mutation_prob", c.mutation_prob);
  if (j.contains("mutation_operator")) {
    const auto& m = j.at("mutation_operator");
    if (!m.is_string()) fail(ErrorKind::Config, "'mutation_operator' must be a string");
    c.mutation_operator = calib::parse_mutation_operator(m.get<std::string>());
  }
  if (j.contains("crossover_operator")) {
    const auto& x = j.at("crossover_operator");
    if (!x.is_string()) fail(ErrorKind::Config, "'crossover_operator' must be a string");
    c.crossover_operator = calib::parse_crossover_operator(x.get<std::string>());
  }
  c.crossover_prob = num_or(j, "crossover_prob", c.crossover_prob);
  c.elitism_ratio = num_or(j, "elitism_ratio", c.elitism_ratio);
  if (j.contains("seeds")) {
    c.seeds.clear();
    for (const auto& s : j.at("seeds")) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) fail(ErrorKind::Config, "seeds must be non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  auto genes = models::default_genes(kind);
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    for (auto it = b.begin(); it != b.end(); ++it) {
      auto g = std::find_if(genes.begin(), genes.end(), [&](const auto& x) { return x.name == it.key(); });
      if (g == genes.end()) fail(ErrorKind::Config, "unknown gene '" + it.key() + "' for model '" + std::string(models::kind_name(kind)) + "'");
      if (!it->is_array() || it->size() != 2) fail(ErrorKind::Config, "bounds for '" + it.key() + "' must be [lo, hi]");
      g->lo = (*it)[0].get<double>();
      g->hi = (*it)[1].get<double>();
    }
    c.bounds = genes;
  }
  c.validate(kind);
  return c;
}

Json to_json(const calib::GofReport& g) {
  return Json{{"nrmse_spacing", g.nrmse_spacing}, {"mae_spacing", g.mae_spacing}, {"rmse_spacing", g.rmse_spacing},
              {"nrmse_speed", g.nrmse_speed},     {"mae_speed", g.mae_speed},     {"rmse_speed", g.rmse_speed}};
}

calib::GofReport gof_from_json(const Json& j) {
  return {num(j, "nrmse_spacing"), num(j, "mae_spacing"), num(j, "rmse_spacing"),
          num(j, "nrmse_speed"),   num(j, "mae_speed"),   num(j, "rmse_speed")};
}

Json to_json(const calib::CalibrationReport& r) {
  Json per_seed = Json::array();
  for (const auto& s : r.result.per_seed) {
    per_seed.push_back({{"seed", s.seed},
                        {"fitness", s.fitness},
                        {"generations_run", s.generations_run},
                        {"params", to_json(s.params)}});
  }
  Json result{{"model", models::kind_name(r.result.kind)},
              {"best_params", to_json(r.result.best_params)},
              {"fitness", r.result.fitness},
              {"generations_run", r.result.generations_run},
              {"per_seed", std::move(per_seed)},
              {"trace", r.result.trace}};
  return Json{{"calibration_result", std::move(result)},
              {"gof",
               {{"calibration", to_json(r.calibration)}, {"validation", to_json(r.validation)}}},
              {"split",
               {{"calibration_segments", r.calibration_ids}, {"validation_segments", r.validation_ids}}}};
}

Json to_json(const stats::StatsReport& r) {
  Json vars = Json::array();
  for (const auto& v : r.variables) {
    const auto& d = v.stats;
    Json jv{{"name", v.name},
            {"unit", v.unit},
            {"count", d.count},
            {"mean", d.mean},
            {"std", d.std},
            {"min", d.min},
            {"q25", d.q25},
            {"q50", d.q50},
            {"q75", d.q75},
            {"max", d.max}};
    if (v.normality) {
      jv["shapiro_wilk"] = {{"w", v.normality->w}, {"p", v.normality->p}, {"normal_at_5pct", v.normality->p >= 0.05}};
    } else {
      jv["shapiro_wilk"] = nullptr;
    }
    vars.push_back(std::move(jv));
  }
  Json matrix = Json::array();
  for (const auto& row : r.spearman_matrix) {
    Json jr = Json::array();
    for (const auto& c : row) jr.push_back(optional_json(c));
    matrix.push_back(std::move(jr));
  }
  Json variability = Json::array();
  for (const auto& c : r.variability) {
    variability.push_back({{"vehicle", c.vehicle},
                           {"variable", c.variable},
                           {"regime", c.regime},
                           {"mean_cv", optional_json(c.mean_cv)},
                           {"mean_outlier_share", optional_json(c.mean_outlier_share)},
                           {"trips_cv", c.trips_cv},
                           {"trips_outlier", c.trips_outlier}});
  }
  Json hists = Json::array();
  for (const auto& h : r.histograms) {
    hists.push_back({{"name", h.name}, {"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}});
  }
  return Json{{"kind", "stats_report"},
              {"segments", r.segments},
              {"samples", r.samples},
              {"descriptive", std::move(vars)},
              {"spearman", {{"variables", r.correlation_names}, {"matrix", std::move(matrix)}}},
              {"variability", std::move(variability)},
              {"comfort",
               {{"thresholds",
                 {{"excellent", r.comfort.excellent},
                  {"upper_excellent", r.comfort.upper_excellent},
                  {"expected", r.comfort.expected}}},
                {"shares_above", {r.comfort_shares[0], r.comfort_shares[1], r.comfort_shares[2]}},
                {"max_abs_accel", r.max_abs_accel},
                {"max_abs_jerk", r.max_abs_jerk},
                {"accel_comfort_limit", stats::kAccelComfortLimit},
                {"jerk_comfort_limit", stats::kJerkComfortLimit},
                {"exceeds_accel_comfort_limit", r.max_abs_accel > stats::kAccelComfortLimit},
                {"exceeds_jerk_comfort_limit", r.max_abs_jerk > stats::kJerkComfortLimit}}},
              {"histograms", std::move(hists)}};
}

}  // namespace cfcal::io
