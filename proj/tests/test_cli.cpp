#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adapted_ot/cli.hpp"
#include "adapted_ot/io.hpp"

namespace fs = std::filesystem;
using aot::io::json;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("aot_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static int run(std::vector<std::string> args) {
        args.insert(args.begin(), "adapted-ot");
        return aot::cli::run(args);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, IdenticalLatticesHaveZeroDistance) {
    ASSERT_EQ(run({"lattice", "--n-steps", "4", "--out", path("l.json")}), 0);
    ASSERT_EQ(run({"aw-distance", "--lattice-x", path("l.json"), "--lattice-y", path("l.json"), "--out",
                   path("r.json")}),
              0);
    const json r = aot::io::read_json_file(path("r.json"));
    EXPECT_EQ(r["value"].get<double>(), 0.0);
    EXPECT_TRUE(r["fosd_certified"].get<bool>());
    EXPECT_TRUE(fs::exists(aot::cli::sidecar_path(path("r.json"))));
}

TEST_F(CliTest, SidecarReplayReproducesOutput) {
    ASSERT_EQ(run({"rho-scan", "--preset", "vol-gap", "--rho", "0,1", "--samples", "400", "--n-steps", "16",
                   "--threads", "1", "--out", path("a.csv")}),
              0);
    const std::string first = slurp(path("a.csv"));
    const json meta = aot::io::read_json_file(aot::cli::sidecar_path(path("a.csv")));
    EXPECT_EQ(meta["command"], "rho-scan");
    EXPECT_EQ(meta["seed"], 1);
    EXPECT_EQ(meta["config"]["substeps"], "16");
    auto args = meta["command_line"].get<std::vector<std::string>>();
    fs::remove(path("a.csv"));
    ASSERT_EQ(aot::cli::run(args), 0);
    EXPECT_EQ(slurp(path("a.csv")), first);
    EXPECT_EQ(first.substr(0, first.find('\n')), "rho,estimate,stderr,closed_form");
}

TEST_F(CliTest, ConvergenceCsvColumns) {
    ASSERT_EQ(run({"convergence", "--preset", "drift-gap", "--n-list", "2,4", "--samples", "200", "--substeps", "1",
                   "--out", path("c.csv")}),
              0);
    const std::string csv = slurp(path("c.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,h,dp_scaled,kr_cost,mc_sync,mc_stderr");
    const json meta = aot::io::read_json_file(aot::cli::sidecar_path(path("c.csv")));
    EXPECT_EQ(meta["results"]["fosd"].size(), 2u);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run({"--help"}), aot::cli::kExitOk);
    EXPECT_EQ(run({}), aot::cli::kExitConfig);
    EXPECT_EQ(run({"simulate", "--bogus"}), aot::cli::kExitConfig);
    EXPECT_EQ(run({"rho-scan", "--preset", "missing", "--out", path("x.csv")}), aot::cli::kExitConfig);
    EXPECT_EQ(run({"rho-scan", "--preset", "vol-gap", "--rho", "2", "--out", path("x.csv")}), aot::cli::kExitConfig);
    EXPECT_EQ(run({"aw-distance", "--lattice-x", path("none.json"), "--lattice-y", path("none.json"), "--out",
                   path("r.json")}),
              aot::cli::kExitConfig);
    EXPECT_EQ(run({"simulate", "--drift", "kind=affine,a=0,slope=100000", "--x0", "1", "--scheme", "em",
                   "--samples", "5", "--n-steps", "8", "--out", path("p.csv")}),
              aot::cli::kExitDivergence);
}

TEST_F(CliTest, SimulateWritesLongFormat) {
    ASSERT_EQ(run({"simulate", "--samples", "3", "--n-steps", "4", "--out", path("p.csv")}), 0);
    std::ifstream in(path("p.csv"));
    std::string line;
    int rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line, "replicate,t,value");
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3 * 5);
}
