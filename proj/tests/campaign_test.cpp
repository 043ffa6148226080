#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "earforge/campaign.hpp"
#include "support.hpp"

using namespace earforge;
namespace fs = std::filesystem;

namespace {

CampaignState run_through(const fs::path& dir, Stage last, CampaignConfig config = {}) {
  CampaignState s = new_campaign(config);
  const auto plant = make_plant(s.config);
  if (last >= Stage::designed) run_design_stage(s);
  if (last >= Stage::simulated) run_simulate_stage(s, dir, *plant);
  if (last >= Stage::fitted) run_fit_stage(s);
  if (last >= Stage::optimized) run_optimize_stage(s);
  if (last >= Stage::verified) verify_optimum(s, dir, *plant);
  save_state(dir, s);
  return s;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Campaign, StagesAdvanceInOrder) {
  fixtures::TempDir dir;
  CampaignState s = new_campaign();
  EXPECT_EQ(s.stage(), Stage::configured);
  EXPECT_THROW(run_fit_stage(s), LifecycleError);
  EXPECT_THROW(run_optimize_stage(s), LifecycleError);
  const auto plant = make_plant(s.config);
  EXPECT_THROW(run_simulate_stage(s, dir.path(), *plant), LifecycleError);
  run_design_stage(s);
  EXPECT_EQ(s.stage(), Stage::designed);
  run_simulate_stage(s, dir.path(), *plant);
  EXPECT_EQ(s.stage(), Stage::simulated);
  ASSERT_EQ(s.runs.size(), 15u);
  EXPECT_EQ(s.runs[0].profile.file, "runs/run_01.csv");
  EXPECT_TRUE(fs::exists(dir.path() / "runs/run_15.csv"));
  run_fit_stage(s);
  run_optimize_stage(s);
  verify_optimum(s, dir.path(), *plant);
  EXPECT_EQ(s.stage(), Stage::verified);

  run_design_stage(s);  // redoing a stage drops everything after it
  EXPECT_EQ(s.stage(), Stage::designed);
  EXPECT_TRUE(s.runs.empty());
  EXPECT_FALSE(s.optimum);
}

TEST(Campaign, VerifiesSurrogateDefaults) {
  fixtures::TempDir dir;
  const auto s = run_through(dir.path(), Stage::verified);
  const auto& v = *s.verification;
  EXPECT_LE(v.ear_amplitude, 0.2);
  ASSERT_TRUE(v.reduction_factor);
  EXPECT_GE(*v.reduction_factor, 10.0);
  EXPECT_NEAR(v.baseline_blank.diameter, initial_blank_diameter({66.03, 35.0}), 1e-12);
  EXPECT_NEAR(v.baseline_amplitude, 1.72, 1e-6);
}

TEST(Campaign, DefectFreePlantHasNoReductionFactor) {
  fixtures::TempDir dir;
  CampaignConfig config;
  config.material = MaterialAnisotropy::isotropic();
  config.surrogate.c8 = 0.0;
  const auto s = run_through(dir.path(), Stage::verified, config);
  EXPECT_FALSE(s.verification->reduction_factor);
  EXPECT_NEAR(s.verification->ear_amplitude, 0.0, 1e-9);
  const auto j = Json::parse(read_file(dir.path() / "campaign.json"));
  EXPECT_TRUE(j["verification"]["reduction_factor"].is_null());
}

TEST(Campaign, SaveLoadSaveIsByteIdentical) {
  fixtures::TempDir dir;
  run_through(dir.path(), Stage::verified);
  const std::string first = read_file(dir.path() / "campaign.json");
  const auto loaded = load_state(dir.path());
  save_state(dir.path(), loaded);
  EXPECT_EQ(read_file(dir.path() / "campaign.json"), first);
}

TEST(Campaign, FittedModelsRoundTripFieldByField) {
  fixtures::TempDir dir;
  const auto s = run_through(dir.path(), Stage::fitted);
  const auto loaded = load_state(dir.path());
  ASSERT_EQ(loaded.models.size(), s.models.size());
  for (std::size_t i = 0; i < s.models.size(); ++i) EXPECT_EQ(loaded.models[i], s.models[i]);
  EXPECT_EQ(loaded.design, s.design);
  EXPECT_EQ(loaded.config.factor_space, s.config.factor_space);
  EXPECT_EQ(loaded.config.surrogate, s.config.surrogate);
}

TEST(Campaign, DeterministicAcrossRuns) {
  fixtures::TempDir a;
  fixtures::TempDir b;
  auto sa = run_through(a.path(), Stage::verified);
  auto sb = run_through(b.path(), Stage::verified);
  sa.meta["updated_at"] = "first";
  sb.meta["updated_at"] = "second";
  auto ja = state_to_json(sa);
  auto jb = state_to_json(sb);
  ja.erase("meta");
  jb.erase("meta");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(read_file(a.path() / "runs/optimum.csv"), read_file(b.path() / "runs/optimum.csv"));
}

TEST(Campaign, DeletedProfileNamesTheRun) {
  fixtures::TempDir dir;
  run_through(dir.path(), Stage::simulated);
  fs::remove(dir.path() / "runs/run_04.csv");
  try {
    load_state(dir.path());
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("run 4"), std::string::npos) << e.what();
  }
}

TEST(Campaign, TamperedProfileFailsHashCheck) {
  fixtures::TempDir dir;
  run_through(dir.path(), Stage::simulated);
  std::ofstream(dir.path() / "runs/run_02.csv", std::ios::app) << "0,0\n";
  EXPECT_THROW(load_state(dir.path()), IntegrityError);
}

TEST(Campaign, EmptyDirectoryAsksForInit) {
  fixtures::TempDir dir;
  try {
    load_state(dir.path());
    FAIL() << "expected FreshStateError";
  } catch (const FreshStateError& e) {
    EXPECT_NE(std::string(e.what()).find("init"), std::string::npos);
  }
}

TEST(Campaign, SchemaMismatchNeedsMigration) {
  fixtures::TempDir dir;
  run_through(dir.path(), Stage::designed);
  auto j = Json::parse(read_file(dir.path() / "campaign.json"));
  j["schema_version"] = 0;
  csv::write_text(dir.path() / "campaign.json", j.dump(2));
  EXPECT_THROW(load_state(dir.path()), MigrationNeededError);
  j.erase("schema_version");
  csv::write_text(dir.path() / "campaign.json", j.dump(2));
  EXPECT_THROW(load_state(dir.path()), MigrationNeededError);
}

TEST(Campaign, InconsistentLifecycleIsRejected) {
  fixtures::TempDir dir;
  run_through(dir.path(), Stage::fitted);
  auto j = Json::parse(read_file(dir.path() / "campaign.json"));
  j.erase("runs");
  csv::write_text(dir.path() / "campaign.json", j.dump(2));
  EXPECT_THROW(load_state(dir.path()), LifecycleError);
}

TEST(Campaign, MalformedFileIsAValidationError) {
  fixtures::TempDir dir;
  csv::write_text(dir.path() / "campaign.json", "{not json");
  EXPECT_THROW(load_state(dir.path()), ValidationError);
  csv::write_text(dir.path() / "campaign.json", R"({"schema_version": 1, "config": {}})");
  EXPECT_THROW(load_state(dir.path()), ValidationError);
}

TEST(Campaign, LockIsExclusive) {
  fixtures::TempDir dir;
  CampaignLock first(dir.path());
  EXPECT_THROW(CampaignLock second(dir.path()), ValidationError);
}

TEST(Campaign, Sha256KnownVector) {
  fixtures::TempDir dir;
  csv::write_text(dir.path() / "abc.txt", "abc");
  EXPECT_EQ(sha256_file(dir.path() / "abc.txt"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Reports, OnlyPlotsBackedByData) {
  fixtures::TempDir dir;
  const auto fitted = run_through(dir.path(), Stage::fitted);
  const auto partial = write_reports(fitted, dir.path());
  EXPECT_EQ(partial.written, (std::vector<std::string>{"reports/modal_runs.svg", "reports/influence.svg"}));
  EXPECT_EQ(partial.missing.size(), 4u);
  EXPECT_FALSE(fs::exists(dir.path() / "reports/overlay.svg"));

  const auto verified = run_through(dir.path(), Stage::verified);
  const auto full = write_reports(verified, dir.path());
  EXPECT_TRUE(full.missing.empty());
  EXPECT_EQ(full.written.size(), 6u);
  const std::string svg = read_file(dir.path() / "reports/deviation_polar.svg");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_NE(read_file(dir.path() / "reports/summary.txt").find("reduction factor"), std::string::npos);
}

TEST(Campaign, StarSpreadCalibrationLeavesSixLobeEars) {
  // A large six-lobe coupling cannot be cancelled by the four-lobe parameter,
  // so the closed loop stalls well short of a tenfold reduction.
  fixtures::TempDir dir;
  CampaignConfig config;
  config.surrogate = SurrogateParams::star_spread_calibration();
  const auto s = run_through(dir.path(), Stage::verified, config);
  ASSERT_TRUE(s.verification->reduction_factor);
  EXPECT_GT(*s.verification->reduction_factor, 5.0);
  EXPECT_LT(*s.verification->reduction_factor, 10.0);
  EXPECT_GT(s.verification->ear_amplitude, 0.2);
}
