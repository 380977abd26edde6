#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cfcal/calib.hpp"
#include "cfcal/cleaning.hpp"
#include "cfcal/ingest.hpp"
#include "cfcal/models.hpp"
#include "cfcal/sim.hpp"
#include "cfcal/stats.hpp"

namespace cfcal::io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
Json read_json_file(const std::string& path);

/// Writes via a temporary sibling and rename, so readers never see a
/// partial file.
void write_file_atomic(const std::string& path, const std::string& content);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

Json to_json(const ingest::Trajectory& t);
ingest::Trajectory trajectory_from_json(const Json& j);

Json to_json(const ingest::TrajectoryPair& p);
ingest::TrajectoryPair pair_from_json(const Json& j);

Json to_json(const std::vector<cleaning::FollowingSegment>& segments);
std::vector<cleaning::FollowingSegment> segments_from_json(const Json& j);

Json to_json(const cleaning::CleaningRules& r);
cleaning::CleaningRules rules_from_json(const Json& j);

Json to_json(const models::ModelParams& p);
models::ModelParams params_from_json(const Json& j);

Json to_json(const sim::SimLimits& l);
sim::SimLimits limits_from_json(const Json& j);

Json to_json(const std::vector<sim::SimResult>& results);
std::vector<sim::SimResult> sim_results_from_json(const Json& j);

Json to_json(const calib::GaConfig& c, models::ModelKind kind);
calib::GaConfig ga_config_from_json(const Json& j, models::ModelKind kind);

Json to_json(const calib::GofReport& g);
calib::GofReport gof_from_json(const Json& j);

Json to_json(const calib::CalibrationReport& r);

Json to_json(const stats::StatsReport& r);

}  // namespace cfcal::io
