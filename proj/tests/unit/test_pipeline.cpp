#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "ldbm/error.hpp"
#include "ldbm/pipeline.hpp"

using namespace ldbm;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const std::string& dir, double gamma) {
  RunConfig c = validate_config({{"gamma", std::to_string(gamma)},
                                 {"level", "3"},
                                 {"horizon", "0.5"},
                                 {"dt", "0.001"},
                                 {"ensemble", "2"},
                                 {"z_points", "101"}});
  c.output_dir = (fs::temp_directory_path() / dir).string();
  fs::remove_all(c.output_dir);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool has_note(const PipelineResult& r, const std::string& note) {
  return std::find(r.notes.begin(), r.notes.end(), note) != r.notes.end();
}

}  // namespace

TEST(Pipeline, GammaZeroIsIdentityTimeChange) {
  const RunConfig c = small_config("ldbm_pipeline_g0", 0.0);
  const PipelineResult r = run_pipeline(c);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(has_note(r, "identity time change verified"));
  const auto manifest = nlohmann::json::parse(slurp(r.manifest));
  EXPECT_TRUE(manifest.at("complete").get<bool>());
  EXPECT_EQ(manifest.at("input_hash").get<std::string>(), input_hash(c));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "field.ldg"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "path_0000.csv"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "clock_0001.csv"));
  fs::remove_all(c.output_dir);
}

TEST(Pipeline, RerunIsByteIdentical) {
  const RunConfig c = small_config("ldbm_pipeline_rerun", 0.5);
  const PipelineResult a = run_pipeline(c);
  ASSERT_TRUE(a.passed);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(c.output_dir)) first[e.path().filename()] = slurp(e.path());
  const PipelineResult b = run_pipeline(c);
  EXPECT_FALSE(b.resumed);
  for (const auto& e : fs::directory_iterator(c.output_dir))
    EXPECT_EQ(first.at(e.path().filename()), slurp(e.path())) << e.path();
  fs::remove_all(c.output_dir);
}

TEST(Pipeline, ResumeSkipsCompletedRun) {
  RunConfig c = small_config("ldbm_pipeline_resume", 0.5);
  const PipelineResult a = run_pipeline(c);
  const PipelineResult b = run_pipeline(c, PipelineOptions{true});
  EXPECT_TRUE(b.resumed);
  EXPECT_EQ(a.input_hash, b.input_hash);
  EXPECT_EQ(a.passed, b.passed);
  c.seed = 99;
  const PipelineResult d = run_pipeline(c, PipelineOptions{true});
  EXPECT_FALSE(d.resumed);
  EXPECT_NE(d.input_hash, a.input_hash);
  fs::remove_all(c.output_dir);
}

TEST(Pipeline, InputHashTracksConfig) {
  RunConfig a = validate_config({});
  RunConfig b = a;
  EXPECT_EQ(input_hash(a), input_hash(b));
  EXPECT_EQ(input_hash(a).size(), 16u);
  b.gamma = 0.25;
  EXPECT_NE(input_hash(a), input_hash(b));
}

TEST(Pipeline, RejectsSupercriticalBeforeWork) {
  EXPECT_THROW(validate_config({{"gamma", "2.5"}}), ConfigError);
  RunConfig c = small_config("ldbm_pipeline_bad", 0.5);
  c.gamma = 2.5;
  EXPECT_THROW(run_pipeline(c), DomainError);
  EXPECT_FALSE(fs::exists(fs::path(c.output_dir) / "manifest.json"));
}
