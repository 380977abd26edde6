#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "cfcal/cli.hpp"
#include "cfcal/error.hpp"
#include "cfcal/io.hpp"
#include "cfcal/report.hpp"

using namespace cfcal;
namespace fs = std::filesystem;

namespace {

const std::string kData = CFCAL_TEST_DATA;
const std::string kParams = CFCAL_PARAMS_DIR;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("cfcal_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

int run(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "cfcal");
  ::testing::internal::CaptureStdout();
  ::testing::internal::CaptureStderr();
  const int code = cli::cli_dispatch(args);
  ::testing::internal::GetCapturedStdout();
  const auto e = ::testing::internal::GetCapturedStderr();
  if (err) *err = e;
  return code;
}

std::string slurp(const std::string& path) { return io::read_file(path); }

void write_small_config(const std::string& path) {
  io::write_file_atomic(path, R"({"population": 12, "max_generations": 5, "seeds": [4, 9]})");
}

}  // namespace

TEST(Io, SegmentsRoundTrip) {
  const auto j = io::read_json_file(kData + "/synthetic_idm_segments.json");
  const auto segs = io::segments_from_json(j);
  ASSERT_EQ(segs.size(), 4u);
  const auto again = io::segments_from_json(io::to_json(segs));
  ASSERT_EQ(again.size(), segs.size());
  for (std::size_t k = 0; k < segs.size(); ++k) {
    EXPECT_EQ(again[k].id, segs[k].id);
    EXPECT_EQ(again[k].t, segs[k].t);
    EXPECT_EQ(again[k].spacing, segs[k].spacing);
    EXPECT_EQ(again[k].follower.speed, segs[k].follower.speed);
    EXPECT_EQ(again[k].leader.accel, segs[k].leader.accel);
  }
}

TEST(Io, ParamsRoundTripAllKinds) {
  const models::ModelParams all[] = {models::IdmParams{}, models::BlendParams{}, models::AccParams{}};
  for (const auto& p : all) {
    const auto back = io::params_from_json(io::to_json(p));
    EXPECT_EQ(io::dump(io::to_json(back)), io::dump(io::to_json(p)));
  }
}

TEST(Io, BundledParameterFilesHoldReferenceValues) {
  const auto idm = std::get<models::IdmParams>(io::params_from_json(io::read_json_file(kParams + "/idm_reference.json")));
  EXPECT_EQ(idm.a, 2.76);
  EXPECT_EQ(idm.delta, 1);
  EXPECT_EQ(idm.v0, 20.0);
  EXPECT_EQ(idm.s0, 9.89);
  EXPECT_EQ(idm.T, 2.79);
  EXPECT_EQ(idm.b, 24.58);
  const auto acc = std::get<models::AccParams>(io::params_from_json(io::read_json_file(kParams + "/linear_acc_reference.json")));
  EXPECT_EQ(acc.t_des, 4.96);
  EXPECT_EQ(acc.k1, 0.01);
  EXPECT_EQ(acc.k2, 0.43);
  const auto bl = std::get<models::BlendParams>(io::params_from_json(io::read_json_file(kParams + "/blend_reference.json")));
  EXPECT_EQ(bl.idm.a, 1.214);
  EXPECT_EQ(bl.idm.delta, 3);
  EXPECT_EQ(bl.idm.v0, 18.742);
  EXPECT_EQ(bl.idm.s0, 9.892);
  EXPECT_EQ(bl.idm.T, 2.98);
  EXPECT_EQ(bl.idm.b, 24.846);
  EXPECT_EQ(bl.c, 0.959);
}

TEST(Io, GaConfigRoundTripAndUnknownKeys) {
  calib::GaConfig c;
  c.seeds = {7, 8};
  c.crossover_operator = calib::CrossoverOperator::Line;
  c.mutation_operator = calib::MutationOperator::Creep;
  const auto j = io::to_json(c, models::ModelKind::Idm);
  const auto back = io::ga_config_from_json(j, models::ModelKind::Idm);
  EXPECT_EQ(back.seeds, c.seeds);
  EXPECT_EQ(back.crossover_operator, c.crossover_operator);
  EXPECT_EQ(back.mutation_operator, c.mutation_operator);
  EXPECT_EQ(io::dump(io::to_json(back, models::ModelKind::Idm)), io::dump(j));
  EXPECT_ANY_THROW(io::ga_config_from_json(io::Json{{"mutation_operator", "gaussian"}}, models::ModelKind::Idm));
}

TEST(Io, MissingFileNamesPath) {
  try {
    io::read_file("/nonexistent/cfcal/file.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/cfcal/file.json"), std::string::npos);
  }
}

TEST(Report, EmptyInputWritesStub) {
  TempDir dir;
  const auto files = report::emit_report({}, report::Format::All, dir.path().string());
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(slurp(files[0]), "no data\n");
}

TEST(Report, DescriptiveTableHasSevenRowsPerVariable) {
  TempDir dir;
  ASSERT_EQ(run({"stats", "--segments", kData + "/synthetic_idm_segments.json", "--out", dir / "stats.json"}), 0);
  const auto rep = io::read_json_file(dir / "stats.json");
  const auto n_vars = rep.at("descriptive").size();
  EXPECT_EQ(n_vars, 4u);
  const auto table = report::descriptive_table(rep);
  for (const char* row : {"mean", "std", "min", "25%", "50%", "75%", "max"}) {
    std::istringstream is(table);
    std::string line;
    bool found = false;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      std::string head;
      ls >> head;
      if (head != row) continue;
      found = true;
      std::size_t cells = 0;
      std::string cell;
      while (ls >> cell) ++cells;
      EXPECT_EQ(cells, n_vars) << line;
      break;
    }
    EXPECT_TRUE(found) << row;
  }
}

TEST(Report, SvgIsDeterministicAndWellFormed) {
  const std::vector<std::size_t> counts{1, 4, 9, 4, 1};
  const auto a = report::svg_histogram("Speed & <stuff>", "speed", 0.0, 20.0, counts);
  const auto b = report::svg_histogram("Speed & <stuff>", "speed", 0.0, 20.0, counts);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("<svg"), std::string::npos);
  EXPECT_NE(a.find("&amp;"), std::string::npos);
  EXPECT_NE(a.find("&lt;stuff&gt;"), std::string::npos);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  const std::vector<double> t{0, 1, 2}, o{1, 2, 3}, s{1, 2.5, 2.9};
  EXPECT_EQ(report::svg_series("x", "y", t, o, s), report::svg_series("x", "y", t, o, s));
}

TEST(Report, UnknownInputShapeRejected) {
  TempDir dir;
  const std::vector<io::Json> in{io::Json{{"hello", 1}}};
  EXPECT_ANY_THROW(report::emit_report(in, report::Format::Text, dir.path().string()));
}

TEST(Cli, IngestWritesPairAndManifest) {
  TempDir dir;
  ASSERT_EQ(run({"ingest", "--leader", kData + "/gps_leader.csv", "--follower", kData + "/gps_follower.csv", "--out",
                 dir / "pair.json"}),
            0);
  const auto pair = io::pair_from_json(io::read_json_file(dir / "pair.json"));
  EXPECT_EQ(pair.leader.points.size(), 120u);
  EXPECT_EQ(pair.follower.points.size(), 120u);
  const auto manifest = io::read_json_file(dir / "pair.json.manifest.json");
  EXPECT_EQ(manifest.at("command"), "ingest");
  EXPECT_EQ(manifest.at("inputs").size(), 2u);
  EXPECT_EQ(manifest.at("outputs").at(0).at("sha256"), cli::sha256_hex(slurp(dir / "pair.json")));
}

TEST(Cli, MissingInputExitsOneAndNamesPath) {
  TempDir dir;
  std::string err;
  EXPECT_EQ(run({"stats", "--segments", "/no/such/segments.json", "--out", dir / "x.json"}, &err), 1);
  EXPECT_NE(err.find("/no/such/segments.json"), std::string::npos);
  EXPECT_EQ(err.rfind("error: io:", 0), 0u) << err;
  EXPECT_FALSE(fs::exists(dir / "x.json"));
}

TEST(Cli, UsageErrorsExitTwo) {
  std::string err;
  EXPECT_EQ(run({"stats", "--bogus"}, &err), 2);
  EXPECT_EQ(err.rfind("error: usage:", 0), 0u) << err;
  EXPECT_EQ(run({"calibrate", "--model", "gipps", "--segments", "a", "--out", "b"}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
}

TEST(Cli, CalibrateIsReproducibleAndLeavesInputsAlone) {
  TempDir dir;
  const std::string segs = kData + "/synthetic_idm_segments.json";
  const auto before = slurp(segs);
  write_small_config(dir / "ga.json");
  const std::vector<std::string> base{"calibrate", "--model", "idm", "--segments", segs, "--config", dir / "ga.json",
                                      "--split", "0.75"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", dir / "a.json"});
  b.insert(b.end(), {"--out", dir / "b.json", "--threads", "3"});
  ASSERT_EQ(run(a), 0);
  ASSERT_EQ(run(b), 0);
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(slurp(segs), before);
  const auto res = io::read_json_file(dir / "a.json");
  EXPECT_EQ(res.at("calibration_result").at("per_seed").size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "a.json.manifest.json"));

  auto c = base;
  c.insert(c.end(), {"--out", dir / "c.json", "--seed", "4"});
  ASSERT_EQ(run(c), 0);
  EXPECT_EQ(io::read_json_file(dir / "c.json").at("calibration_result").at("per_seed").size(), 1u);
}

TEST(Cli, PipelineThroughReport) {
  TempDir dir;
  ASSERT_EQ(run({"clean", "--pair", kData + "/cleaning_pair.json", "--out", dir / "segs.json"}), 0);
  EXPECT_EQ(io::segments_from_json(io::read_json_file(dir / "segs.json")).size(), 29u);
  ASSERT_EQ(run({"simulate", "--model", kParams + "/idm_reference.json", "--segments",
                 kData + "/synthetic_idm_segments.json", "--out", dir / "sim.json"}),
            0);
  ASSERT_EQ(run({"validate", "--model", kParams + "/idm_reference.json", "--segments",
                 kData + "/synthetic_idm_segments.json", "--out", dir / "gof.json"}),
            0);
  EXPECT_LT(io::read_json_file(dir / "gof.json").at("gof").at("nrmse_spacing").get<double>(), 1e-12);
  ASSERT_EQ(run({"stats", "--segments", kData + "/jerk_segments.json", "--out", dir / "stats.json"}), 0);
  ASSERT_EQ(run({"report", "--input", dir / "stats.json", "--input", dir / "sim.json", "--format", "all", "--out-dir",
                 dir / "rep"}),
            0);
  const auto text = slurp(dir / "rep/report.txt");
  EXPECT_NE(text.find("16.00%"), std::string::npos);
  EXPECT_NE(text.find("3.57%"), std::string::npos);
  EXPECT_NE(text.find("2.24%"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "rep/sim_idm-0_spacing.svg"));
  EXPECT_TRUE(fs::exists(dir / "rep/report.manifest.json"));
}

TEST(Cli, Sha256KnownVector) {
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
