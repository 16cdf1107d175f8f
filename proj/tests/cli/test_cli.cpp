#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "ldbm/grid_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "ldbm_cli_tests";
  fs::create_directories(dir);
  return dir;
}

Invocation run(const std::string& args) {
  const fs::path err_file = scratch() / "stderr.txt";
  const std::string cmd = std::string(LDBM_CLI_PATH) + " " + args + " 2>" + err_file.string();
  Invocation r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  r.err.assign(std::istreambuf_iterator<char>(in), {});
  return r;
}

const std::string kSmall = " --level 3 --grid-half-width 3.5 --grid-cells 28 --output-dir " + (scratch() / "out").string();

}  // namespace

TEST(Cli, KernelTableCsv) {
  const Invocation r = run("kernel-table --count 5 --method bessel");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("r,", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  EXPECT_EQ(json::parse(r.err).at("command"), "kernel-table");
}

TEST(Cli, SampleFieldThenBuildMeasure) {
  const fs::path field = scratch() / "f.ldg";
  const Invocation a = run("sample-field" + kSmall + " -o " + field.string());
  ASSERT_EQ(a.code, 0) << a.err;
  const json ra = json::parse(a.out);
  EXPECT_EQ(ra.at("level"), 3);
  EXPECT_EQ(ldbm::read_grid(field).values.size(), 28u * 28u);
  const Invocation b = run("build-measure" + kSmall + " --field " + field.string() + " -o " + (scratch() / "d.ldg").string());
  ASSERT_EQ(b.code, 0) << b.err;
  const json rb = json::parse(b.out);
  EXPECT_GT(rb.at("total_mass").get<double>(), rb.at("central_box_mass").get<double>());
  EXPECT_GT(rb.at("min_density").get<double>(), 0.0);
}

TEST(Cli, SimulateDbm) {
  const fs::path out = scratch() / "p.csv";
  const Invocation r = run("simulate-dbm --horizon 0.5 --dt 0.001 -o " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("guard_flags"), 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x,y");
}

TEST(Cli, LiouvilleRunAndResume) {
  const std::string args = "liouville-run" + kSmall + " --gamma 0 --horizon 0.5 --dt 0.001 --ensemble 2 --z-points 51";
  const Invocation a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const json ja = json::parse(a.out);
  EXPECT_TRUE(ja.at("passed").get<bool>());
  EXPECT_FALSE(ja.at("resumed").get<bool>());
  const Invocation b = run(args + " --resume");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_TRUE(json::parse(b.out).at("resumed").get<bool>());
}

TEST(Cli, ConsistencyTest) {
  const Invocation r = run("consistency-test" + kSmall + " --horizon 1 --dt 0.001 --ensemble 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("failures"), 0);
  EXPECT_EQ(j.at("checks"), 6);
}

TEST(Cli, EstimateResolvent) {
  const Invocation r = run("estimate-resolvent" + kSmall + " --ensemble 200");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("sup_finite").get<bool>());
  EXPECT_EQ(j.at("potential").at("probes").size(), 25u);
}

TEST(Cli, ConfigFileAndOverride) {
  const fs::path cfg = scratch() / "run.cfg";
  std::ofstream(cfg) << "gamma = 2.5\nlevel = 3\n";
  const Invocation bad = run("sample-field -c " + cfg.string());
  EXPECT_EQ(bad.code, 2);
  const json e = json::parse(bad.err);
  EXPECT_EQ(e.at("error").at("type"), "config");
  EXPECT_NE(e.at("error").at("message").get<std::string>().find("γ ∈ [0, 2)"), std::string::npos);
  const Invocation ok = run("sample-field -c " + cfg.string() + kSmall + " --gamma 0.5 -o " + (scratch() / "g.ldg").string());
  EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST(Cli, AlphaBelowTwoNeedsRelaxedFlag) {
  const Invocation a = run("simulate-dbm --alpha 1 --horizon 0.1 --dt 0.001 -o " + (scratch() / "q.csv").string());
  EXPECT_EQ(a.code, 2);
  EXPECT_NE(a.err.find("allow_relaxed_alpha"), std::string::npos);
  const Invocation b = run("simulate-dbm --alpha 1 --allow-relaxed-alpha --horizon 0.1 --dt 0.001 -o " +
                    (scratch() / "q.csv").string());
  EXPECT_EQ(b.code, 0) << b.err;
}

TEST(Cli, UnknownSubcommand) { EXPECT_NE(run("frobnicate").code, 0); }
