#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

// Runs the installed binary with `args`, returning the exit code and filling
// `out` with everything written to stdout.
int run_cli(const std::string& args, std::string* out) {
  const fs::path dir = fs::path(::testing::TempDir()) / "torus-fpras-cli";
  fs::create_directories(dir);
  const fs::path out_path = dir / "stdout.txt";
  const std::string cmd = std::string(TORUS_FPRAS_BIN) + " " + args + " > " +
                          out_path.string() + " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  if (out != nullptr) {
    std::ifstream in(out_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    *out = buf.str();
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string write_file(const std::string& name, const std::string& content) {
  const fs::path dir = fs::path(::testing::TempDir()) / "torus-fpras-cli";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream f(path);
  f << content;
  return path.string();
}

std::string phase_rotation_file() {
  return write_file("phase-rotation.json", R"({"ansatz": {"type": "phase-rotation"}})");
}

TEST(Cli, HelpExitsZero) {
  std::string out;
  EXPECT_EQ(run_cli("--help", &out), 0);
  EXPECT_NE(out.find("run"), std::string::npos);
  EXPECT_NE(out.find("gap-decide"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(run_cli("run --no-such-flag", nullptr), 2);
}

TEST(Cli, MissingSubcommandIsUsageError) {
  EXPECT_EQ(run_cli("", nullptr), 2);
}

TEST(Cli, OracleReportsExactMinimum) {
  std::string out;
  const int code = run_cli("oracle --instance " + phase_rotation_file(), &out);
  ASSERT_EQ(code, 0);
  const nlohmann::json doc = nlohmann::json::parse(out);
  EXPECT_NEAR(doc.at("minimum").get<double>(), -1.0, 1e-9);
  EXPECT_EQ(doc.at("degrees")[0].get<int>(), 2);
  // cos(2 theta) has exactly the frequencies -2, 0(absent), +2.
  EXPECT_EQ(doc.at("surrogate").at("coeffs").size(), 2u);
}

TEST(Cli, AcquireEmitsGridEvaluations) {
  std::string out;
  const int code =
      run_cli("acquire --instance " + phase_rotation_file() + " --mode exact", &out);
  ASSERT_EQ(code, 0);
  const nlohmann::json doc = nlohmann::json::parse(out);
  EXPECT_EQ(doc.at("grid").at("sizes")[0].get<int>(), 5);
  EXPECT_EQ(doc.at("evals").size(), 5u);
  EXPECT_EQ(doc.at("mode").get<std::string>(), "exact");
}

TEST(Cli, RunEndToEnd) {
  std::string out;
  const int code =
      run_cli("run --instance " + phase_rotation_file() + " --mode exact", &out);
  ASSERT_EQ(code, 0);
  const nlohmann::json doc = nlohmann::json::parse(out);
  EXPECT_NEAR(doc.at("estimate").get<double>(), -1.0, 1e-5);
  EXPECT_NEAR(doc.at("evaluation").at("true_value").get<double>(), -1.0, 1e-6);
}

TEST(Cli, RunsAreByteDeterministic) {
  const std::string args = "run --instance " + phase_rotation_file() +
                           " --mode shots --epsilon 0.5 --delta 0.25 --seed 3";
  std::string out_a;
  std::string out_b;
  ASSERT_EQ(run_cli(args, &out_a), 0);
  ASSERT_EQ(run_cli(args, &out_b), 0);
  nlohmann::json a = nlohmann::json::parse(out_a);
  nlohmann::json b = nlohmann::json::parse(out_b);
  a.erase("timings");
  b.erase("timings");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, OptimizeSweepsSavedSurrogate) {
  const std::string surrogate = write_file(
      "cosine-surrogate.json",
      R"({"M": 1, "coeffs": [{"alpha": [-1], "re": 0.5, "im": 0.0},
                             {"alpha": [1], "re": 0.5, "im": 0.0}]})");
  std::string out;
  const int code = run_cli("optimize --surrogate " + surrogate + " --levels 1..2", &out);
  ASSERT_EQ(code, 0);
  const nlohmann::json doc = nlohmann::json::parse(out);
  EXPECT_NEAR(doc.at("best_lower_bound").get<double>(), -1.0, 1e-5);
  EXPECT_EQ(doc.at("best_solution").at("M").get<int>(), 1);
}

TEST(Cli, ExtractRejectsNonAtomicSolution) {
  const std::string solution = write_file(
      "off-torus-solution.json",
      R"({"M": 1, "level": 2, "lower_bound": -1.0, "status": "converged",
          "y": [{"gamma": [0], "re": 1.0, "im": 0.0},
                {"gamma": [1], "re": 0.8, "im": 0.0},
                {"gamma": [2], "re": 0.64, "im": 0.0}]})");
  const std::string surrogate = write_file(
      "cos2-surrogate.json",
      R"({"M": 1, "coeffs": [{"alpha": [-2], "re": 0.5, "im": 0.0},
                             {"alpha": [2], "re": 0.5, "im": 0.0}]})");
  EXPECT_EQ(run_cli("extract --solution " + solution + " --surrogate " + surrogate,
                    nullptr),
            4);
}

TEST(Cli, MissingInstanceFileIsValidationError) {
  EXPECT_EQ(run_cli("run --instance /nonexistent/nope.json", nullptr), 2);
}

TEST(Cli, EpsilonOutOfRangeIsValidationError) {
  EXPECT_EQ(run_cli("run --instance " + phase_rotation_file() + " --epsilon 2.0",
                    nullptr),
            2);
}

TEST(Cli, ShotCapViolationIsResourceError) {
  EXPECT_EQ(run_cli("run --instance " + phase_rotation_file() +
                        " --mode shots --epsilon 0.5 --delta 0.25 --shot-cap 10",
                    nullptr),
            3);
}

TEST(Cli, GapDecideAnswersNoForZeroObservable) {
  const std::string inst = write_file(
      "zero-observable.json",
      R"({"ansatz": {"type": "phase-rotation"}, "observable": {"diagonal": [0.0, 0.0]}})");
  std::string out;
  const int code =
      run_cli("gap-decide --instance " + inst + " --a -2.0 --b -1.0 --mode exact", &out);
  ASSERT_EQ(code, 0);
  const nlohmann::json doc = nlohmann::json::parse(out);
  EXPECT_EQ(doc.at("verdict").get<std::string>(), "NO");
  EXPECT_FALSE(doc.at("off_promise_warning").get<bool>());
}

TEST(Cli, GapDecideAnswersYesForLowMinimum) {
  std::string out;
  const int code = run_cli(
      "gap-decide --instance " + phase_rotation_file() + " --a -1.0 --b 0.0 --mode exact",
      &out);
  ASSERT_EQ(code, 0);
  const nlohmann::json doc = nlohmann::json::parse(out);
  EXPECT_EQ(doc.at("verdict").get<std::string>(), "YES");
  EXPECT_NEAR(doc.at("estimate").get<double>(), -1.0, 1e-4);
}

TEST(Cli, ArtifactsLandInOutDir) {
  const fs::path out_dir = fs::path(::testing::TempDir()) / "torus-fpras-cli" / "arts";
  fs::remove_all(out_dir);
  std::string out;
  const int code = run_cli("run --instance " + phase_rotation_file() +
                               " --mode exact --out " + out_dir.string(),
                           &out);
  ASSERT_EQ(code, 0);
  const nlohmann::json doc = nlohmann::json::parse(out);
  ASSERT_TRUE(doc.contains("artifacts"));
  EXPECT_TRUE(fs::exists(doc.at("artifacts").at("report").get<std::string>()));
}

}  // namespace
