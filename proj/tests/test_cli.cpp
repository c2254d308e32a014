#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fcf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CliResult run(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(FCF_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

const std::string kDrive = R"('{"family":"plus","omega":1,"A":[1.9548]}')";

}  // namespace

TEST(Cli, RatesWritesJson) {
  const fs::path dir = scratch("rates");
  const CliResult r = run("rates --drive " + kDrive + " --j0 0.1 --out " + dir.string(), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string out = slurp(dir / "rates.json");
  EXPECT_NE(out.find("\"delta_shift\""), std::string::npos);
  EXPECT_NE(out.find("\"harmonics\""), std::string::npos);
}

TEST(Cli, MalformedJsonIsConfigError) {
  const fs::path dir = scratch("malformed");
  const CliResult r = run(R"(rates --drive '{"family":"plus",,}' --out )" + dir.string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("\"error\":\"config\""), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("malformed JSON"), std::string::npos) << r.err;
}

TEST(Cli, BadRangeAndUnknownOptionAreConfigErrors) {
  const fs::path dir = scratch("range");
  EXPECT_EQ(run("phase-map --A1 1:0:0.1 --out " + dir.string(), dir).code, 2);
  EXPECT_EQ(run("phase-map --nonsense --out " + dir.string(), dir).code, 2);
  EXPECT_EQ(run("optimize --family sideways --out " + dir.string(), dir).code, 2);
  EXPECT_EQ(run("validate --drive " + kDrive + " --steps 100 --out " + dir.string(), dir).code, 2);
}

TEST(Cli, MissingDriveFileIsConfigError) {
  const fs::path dir = scratch("missing");
  const CliResult r = run("rates --drive /nonexistent/drive.json --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/nonexistent/drive.json"), std::string::npos);
}

TEST(Cli, UnconvergedPropagatorIsNumericalError) {
  const fs::path dir = scratch("numerical");
  const CliResult r = run("validate --drive " + kDrive + " --j0-over-omega 2 --steps 256 --richardson --kgrid 2 --out " +
                        dir.string(),
                    dir);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("\"error\":\"numerical\""), std::string::npos) << r.err;
}

TEST(Cli, PhaseMapOutputs) {
  const fs::path dir = scratch("phase_map");
  const CliResult r = run("phase-map --A1 0:1:0.5 --A2 0:1:0.5 --svg --out " + dir.string(), dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "phase_map.csv");
  EXPECT_EQ(csv.rfind("A1,A2,phi,phi_defined,j1_over_j0,R\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
  EXPECT_TRUE(fs::exists(dir / "phase_map.svg"));
  EXPECT_TRUE(fs::exists(dir / "phase_map_summary.json"));
}
