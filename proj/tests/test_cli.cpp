#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "runner.hpp"
#include "scenario.hpp"
#include "singlab/errors.hpp"

using namespace singlab;
using namespace singlab::app;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SINGLAB_CLI;
const fs::path kScenarios = SINGLAB_SCENARIOS;

Json minimal() {
    return Json::parse(R"({
      "name": "mini",
      "nonlinearity": {"kind": "PurePower", "gamma": 3, "c_sing": 1},
      "domain": {"L": 1, "lambda": 1, "nx": 4, "ny": 24, "q": 2},
      "boundary": {"top": {"kind": "profile", "M": 0}, "sides": {"kind": "periodic"}},
      "checks": [{"name": "monotone_xn"}]
    })");
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliBinary : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("singlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const Json& doc) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << doc.dump(2);
        return p;
    }

    int run(const std::string& args, const fs::path& out = {}) {
        const fs::path target = out.empty() ? dir_ / "out" : out;
        const std::string cmd = "SINGLAB_OUTPUT_DIR='" + target.string() + "' '" + kCli + "' " + args +
                                " > '" + (dir_ / "stdout.txt").string() + "' 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

}  // namespace

TEST(Scenario, ParsesMinimalDocumentWithDefaults) {
    const Scenario s = parse_scenario(minimal());
    EXPECT_EQ(s.name, "mini");
    ASSERT_TRUE(s.domain);
    EXPECT_EQ(s.domain->q, 2.0);
    EXPECT_EQ(s.solver.newton_tol, SolverConfig{}.newton_tol);
    ASSERT_EQ(s.checks.size(), 1u);
}

TEST(Scenario, DefaultGradingFollowsGamma) {
    Json doc = minimal();
    doc["domain"].erase("q");
    doc["nonlinearity"]["gamma"] = 5;
    EXPECT_EQ(parse_scenario(doc).domain->q, 3.0);
}

TEST(Scenario, UnknownKeysAreErrors) {
    Json doc = minimal();
    doc["domian"] = Json::object();
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal();
    doc["domain"]["nxx"] = 3;
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal();
    doc["checks"][0]["tolerence"] = 1;
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal();
    doc["checks"][0]["name"] = "no_such_check";
    EXPECT_THROW(parse_scenario(doc), ConfigError);
}

TEST(Scenario, BlockRequirements) {
    Json doc = minimal();
    doc["checks"].push_back({{"name", "first_integral"}});
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal();
    doc.erase("boundary");
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal();
    doc["domain"]["ny"] = 2;
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal();
    doc["nonlinearity"]["kind"] = "Custom";
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal();
    doc["name"] = "a/b";
    EXPECT_THROW(parse_scenario(doc), ConfigError);
}

TEST(Scenario, ShippedScenariosParse) {
    for (const auto& entry : fs::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
    }
}

TEST(Scenario, ReferenceMPrefersSides) {
    Json doc = minimal();
    doc["boundary"]["sides"] = {{"kind", "profile"}, {"M", 2}};
    doc["boundary"]["top"] = {{"kind", "profile"}};
    const Scenario s = parse_scenario(doc);
    ASSERT_TRUE(reference_M(s));
    EXPECT_EQ(*reference_M(s), 2.0);
    EXPECT_EQ(s.boundary->top.M.value_or(s.boundary->sides.M), 2.0);
}

TEST(SetPath, NestedKeysAndIndices) {
    Json doc = minimal();
    set_path(doc, "domain.lambda", 0.5);
    set_path(doc, "checks.0.fraction", 0.8);
    EXPECT_EQ(doc["domain"]["lambda"], 0.5);
    EXPECT_EQ(doc["checks"][0]["fraction"], 0.8);
    EXPECT_THROW(set_path(doc, "nowhere.lambda", 1), ConfigError);
    EXPECT_THROW(set_path(doc, "checks.7.fraction", 1), ConfigError);
    EXPECT_THROW(set_path(doc, "", 1), ConfigError);
}

TEST(SetPath, AxisValues) {
    EXPECT_EQ(parse_axis_value("1.5"), Json(1.5));
    EXPECT_EQ(parse_axis_value("true"), Json(true));
    EXPECT_EQ(parse_axis_value("profile"), Json("profile"));
}

TEST(Runner, VerifyWritesArtifactsDeterministically) {
    const fs::path out = fs::temp_directory_path() / "singlab_runner_test";
    fs::remove_all(out);
    const Scenario s = parse_scenario(minimal());
    RunOptions options;
    options.output_dir = out;
    const auto first = verify_scenario(s, options);
    const std::string bytes = slurp(out / "mini_reports.json");
    const std::string field = slurp(out / "mini_field.csv");
    verify_scenario(s, options);
    EXPECT_EQ(slurp(out / "mini_reports.json"), bytes);
    EXPECT_EQ(slurp(out / "mini_field.csv"), field);
    EXPECT_EQ(field.rfind("x1,xN,u\n", 0), 0u);
    ASSERT_EQ(first.size(), 1u);
    EXPECT_TRUE(first[0].passed);
    fs::remove_all(out);
}

TEST(Runner, MakeReportListsEveryScenario) {
    const fs::path out = fs::temp_directory_path() / "singlab_report_test";
    fs::remove_all(out);
    RunOptions options;
    options.output_dir = out;
    verify_scenario(parse_scenario(minimal()), options);
    const std::string md = make_report(out);
    EXPECT_NE(md.find("mini"), std::string::npos);
    EXPECT_NE(md.find("monotone_xn"), std::string::npos);
    fs::remove_all(out);
}

TEST_F(CliBinary, VerifyPassesWithExitZero) {
    EXPECT_EQ(run("verify '" + write("mini.json", minimal()).string() + "'"), 0);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "mini_reports.json"));
}

TEST_F(CliBinary, ProfileSubcommand) {
    Json doc = minimal();
    doc.erase("domain");
    doc.erase("boundary");
    doc["profile"] = {{"M", 0.5}, {"t_max", 5}, {"n_samples", 101}};
    doc["checks"] = Json::array({{{"name", "closed_form"}}, {{"name", "first_integral"}}});
    EXPECT_EQ(run("profile '" + write("prof.json", doc).string() + "'"), 0);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "mini_profile.csv"));
}

TEST_F(CliBinary, MissingProfileBlockIsConfigError) {
    EXPECT_EQ(run("profile '" + write("mini.json", minimal()).string() + "'"), 3);
}

TEST_F(CliBinary, InfeasibleMeshIsConfigError) {
    Json doc = minimal();
    doc["domain"]["ny"] = 2;
    EXPECT_EQ(run("solve '" + write("bad.json", doc).string() + "'"), 3);
}

TEST_F(CliBinary, UnreadableFileIsConfigError) {
    EXPECT_EQ(run("verify '" + (dir_ / "missing.json").string() + "'"), 3);
}

TEST_F(CliBinary, SolverFailureExitsTwo) {
    Json doc = minimal();
    doc["solver"] = {{"max_iters", 1}};
    EXPECT_EQ(run("solve '" + write("fail.json", doc).string() + "'"), 2);
}

TEST_F(CliBinary, InjectedNonMonotoneFieldFailsVerify) {
    const auto scenario = write("mini.json", minimal());
    ASSERT_EQ(run("solve '" + scenario.string() + "'"), 0);
    const fs::path csv = dir_ / "out" / "mini_field.csv";
    std::istringstream in(slurp(csv));
    std::ostringstream bumped;
    std::string line;
    std::getline(in, line);
    bumped << line << '\n';
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double xn = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        double u = std::stod(line.substr(c2 + 1));
        if (xn > 0.3 && xn < 0.6) u = 2.0;
        bumped << line.substr(0, c2 + 1) << u << '\n';
    }
    const fs::path injected = dir_ / "injected.csv";
    std::ofstream(injected) << bumped.str();
    EXPECT_EQ(run("verify '" + scenario.string() + "' --field '" + injected.string() + "'"), 1);
    EXPECT_NE(slurp(dir_ / "stdout.txt").find("FAIL monotone_xn"), std::string::npos);
}

TEST_F(CliBinary, SweepWritesOneRowPerCell) {
    Json doc = minimal();
    doc["checks"] = Json::array({{{"name", "boundary_exponent"}}});
    const auto path = write("tmpl.json", doc);
    EXPECT_EQ(run("sweep '" + path.string() + "' --axis nonlinearity.gamma=2,3"), 0);
    const std::string csv = slurp(dir_ / "out" / "mini_sweep.csv");
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    EXPECT_EQ(lines, 3u);
    EXPECT_EQ(csv.rfind("nonlinearity.gamma,status,checks_passed,checks_failed", 0), 0u);
}

TEST_F(CliBinary, ReportSubcommand) {
    ASSERT_EQ(run("verify '" + write("mini.json", minimal()).string() + "'"), 0);
    EXPECT_EQ(run("report '" + (dir_ / "out").string() + "'"), 0);
    EXPECT_NE(slurp(dir_ / "stdout.txt").find("mini"), std::string::npos);
}

TEST_F(CliBinary, SeedIsAcceptedAndIgnored) {
    const auto path = write("mini.json", minimal());
    ASSERT_EQ(run("--seed 7 verify '" + path.string() + "'", dir_ / "a"), 0);
    ASSERT_EQ(run("verify '" + path.string() + "'", dir_ / "b"), 0);
    EXPECT_EQ(slurp(dir_ / "a" / "mini_field.csv"), slurp(dir_ / "b" / "mini_field.csv"));
}
