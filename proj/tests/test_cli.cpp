#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace leadlag;
using namespace leadlag::cli;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("leadlag_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
                std::to_string(::getpid()));
        fs::create_directories(dir_);
        ::unsetenv("LEADLAG_THREADS");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path(name)) << text;
    }

    int invoke(std::vector<std::string> args)
    {
        args.insert(args.begin(), "leadlag");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return main_entry(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    RunConfig parse(std::vector<std::string> args)
    {
        args.insert(args.begin(), "leadlag");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return parse_args(static_cast<int>(argv.size()), argv.data());
    }

    std::vector<fs::path> files() const
    {
        std::vector<fs::path> v;
        for (const auto& e : fs::directory_iterator(dir_)) v.push_back(e.path().filename());
        return v;
    }

    void write_benchmark_model(const std::string& name, std::size_t n, double pi = 0.0) const
    {
        const auto mf = benchmark_model(pi, n);
        std::ofstream(path(name)) << model_to_json(mf.model, mf.scheme).dump(2);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

std::string slurp(const std::string& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_F(CliTest, GainConfigIsValid)
{
    const auto cfg = parse({"gain", "--family", "haar", "--level", "1"});
    EXPECT_EQ(cfg.subcommand, "gain");
    EXPECT_EQ(cfg.family, "haar");
    EXPECT_EQ(cfg.level, 1);
    EXPECT_EQ(cfg.points, 1024);
}

TEST_F(CliTest, MissingModelFlagNamed)
{
    try {
        parse({"simulate", "--seed", "1", "--out", path("x.csv")});
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("--model"), std::string::npos) << e.what();
    }
    EXPECT_EQ(invoke({"simulate", "--out", path("x.csv")}), kUsage);
    EXPECT_NE(err_.str().find("--model"), std::string::npos);
}

TEST_F(CliTest, DistinctUsageMessages)
{
    std::string unknown, missing, unreadable;
    try {
        parse({"gain", "--family", "haar", "--level", "1", "--bogus"});
    } catch (const UsageError& e) {
        unknown = e.what();
    }
    try {
        parse({"gain", "--level", "1"});
    } catch (const UsageError& e) {
        missing = e.what();
    }
    try {
        parse({"model-check", "--model", path("absent.json")});
    } catch (const UsageError& e) {
        unreadable = e.what();
    }
    EXPECT_NE(unknown.find("--bogus"), std::string::npos) << unknown;
    EXPECT_NE(missing.find("--family"), std::string::npos) << missing;
    EXPECT_NE(unreadable.find("cannot read"), std::string::npos) << unreadable;
    EXPECT_NE(unknown, missing);
    EXPECT_NE(missing, unreadable);
    EXPECT_THROW(parse({}), UsageError);
    EXPECT_THROW(parse({"gain", "--family", "db4", "--level", "1"}), UsageError);
}

TEST_F(CliTest, InfeasibleLevelsRejectedBeforeWork)
{
    write("a.csv", "timestamp,price\n0,1\n1,2\n");
    try {
        parse({"estimate", "--in1", path("a.csv"), "--in2", path("a.csv"), "--levels", "30", "--n", "1000", "--out",
               path("r.json")});
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("largest feasible level"), std::string::npos) << e.what();
    }
    // without --n the check runs once the grid length is known, still before any transform
    EXPECT_EQ(invoke({"estimate", "--in1", path("a.csv"), "--in2", path("a.csv"), "--levels", "30", "--out",
                      path("r.json")}),
              kUsage);
    EXPECT_NE(err_.str().find("infeasible"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(CliTest, ThreadsFlagAndEnvironment)
{
    EXPECT_EQ(parse({"--threads", "3", "gain", "--family", "la8", "--level", "2"}).threads, 3u);
    EXPECT_EQ(parse({"gain", "--family", "la8", "--level", "2", "--threads", "2"}).threads, 2u);
    ::setenv("LEADLAG_THREADS", "5", 1);
    EXPECT_EQ(parse({"--threads", "3", "gain", "--family", "la8", "--level", "2"}).threads, 5u);
    ::setenv("LEADLAG_THREADS", "zero", 1);
    EXPECT_THROW(parse({"gain", "--family", "la8", "--level", "2"}), UsageError);
    ::unsetenv("LEADLAG_THREADS");
}

TEST_F(CliTest, HelpDocumentsUnits)
{
    for (std::string sub : {"simulate", "estimate", "mc", "model-check"}) {
        EXPECT_EQ(invoke({sub, "--help"}), kOk) << sub;
        const auto text = out_.str();
        EXPECT_TRUE(text.find("seconds") != std::string::npos || text.find("grid units") != std::string::npos)
            << sub << ":\n" << text;
    }
    EXPECT_EQ(invoke({"estimate", "--help"}), kOk);
    EXPECT_NE(out_.str().find("grid units"), std::string::npos);
    EXPECT_NE(out_.str().find("seconds"), std::string::npos);
    EXPECT_EQ(invoke({"gain", "--help"}), kOk);
    EXPECT_NE(out_.str().find("radians"), std::string::npos);
    EXPECT_EQ(invoke({"--help"}), kOk);
    EXPECT_NE(out_.str().find("model-check"), std::string::npos);
}

TEST_F(CliTest, GainWritesCsv)
{
    ASSERT_EQ(invoke({"gain", "--family", "la20", "--level", "3", "--points", "64", "--out", path("g.csv")}), kOk)
        << err_.str();
    std::istringstream in(slurp(path("g.csv")));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# schema_version=1", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "lambda,H_jL,empirical_gain");
    int rows = 0;
    while (std::getline(in, line)) {
        double lambda, h, e;
        char c1, c2;
        std::istringstream(line) >> lambda >> c1 >> h >> c2 >> e;
        EXPECT_NEAR(h, e, 1e-10);
        ++rows;
    }
    EXPECT_EQ(rows, 64);
    EXPECT_EQ(files().size(), 1u);
}

TEST_F(CliTest, GainToStdout)
{
    ASSERT_EQ(invoke({"gain", "--family", "haar", "--level", "1", "--points", "3"}), kOk);
    EXPECT_NE(out_.str().find("lambda,H_jL,empirical_gain"), std::string::npos);
}

TEST_F(CliTest, ModelCheckRejectsLargeCorrelation)
{
    write("bad.json", R"({"J": 3, "n": 256, "levels": [{"j": 1, "R": 1.2, "theta_over_tau": -1}]})");
    EXPECT_EQ(invoke({"model-check", "--model", path("bad.json")}), kData);
    EXPECT_NE(err_.str().find("admissibility"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ModelCheckReport)
{
    write_benchmark_model("m.json", 4096);
    ASSERT_EQ(invoke({"model-check", "--model", path("m.json"), "--delta", "0.01", "--out", path("r.json")}), kOk)
        << err_.str();
    const auto j = nlohmann::json::parse(slurp(path("r.json")));
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_TRUE(j.at("admissible").get<bool>());
    EXPECT_GT(j.at("embedding").at("min_eigenvalue_over_tau").get<double>(), 0.0);
    EXPECT_LE(j.at("sup_abs_f").get<double>(), 1.0);
    // delta below the largest lag (10 tau)
    EXPECT_EQ(invoke({"model-check", "--model", path("m.json"), "--delta", "0.0001"}), kData);
}

TEST_F(CliTest, MalformedModelIsDataError)
{
    write("m.json", "{ not json");
    EXPECT_EQ(invoke({"model-check", "--model", path("m.json")}), kData);
}

TEST_F(CliTest, SimulateWritesCsvAndTicks)
{
    write_benchmark_model("m.json", 512, 0.5);
    ASSERT_EQ(invoke({"simulate", "--model", path("m.json"), "--seed", "42", "--out", path("p.csv"), "--ticks1",
                      path("t1.csv"), "--ticks2", path("t2.csv")}),
              kOk)
        << err_.str();
    const auto text = slurp(path("p.csv"));
    EXPECT_EQ(text.rfind("# schema_version=1", 0), 0u);
    EXPECT_NE(text.find("\nk,r1,r2,miss1,miss2\n0,"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2 + 512);
    const auto t1 = read_csv(path("t1.csv"));
    EXPECT_GT(t1.size(), 150u);
    EXPECT_LT(t1.size(), 400u);
    EXPECT_EQ(t1.timestamps.front(), 0.0);

    // byte-identical rerun
    ASSERT_EQ(invoke({"simulate", "--model", path("m.json"), "--seed", "42", "--out", path("q.csv")}), kOk);
    EXPECT_EQ(slurp(path("q.csv")), text);
}

TEST_F(CliTest, EstimateRecoversSimulatedLags)
{
    write_benchmark_model("m.json", 15000);
    ASSERT_EQ(invoke({"simulate", "--model", path("m.json"), "--seed", "7", "--out", path("p.csv"), "--ticks1",
                      path("t1.csv"), "--ticks2", path("t2.csv")}),
              kOk)
        << err_.str();
    const std::string tau = std::to_string(std::ldexp(1.0, -14));
    ASSERT_EQ(invoke({"estimate", "--in1", path("t1.csv"), "--in2", path("t2.csv"), "--family", "la20", "--levels",
                      "3", "--maxlag", "60", "--tau", "0.00006103515625", "--out", path("r.json")}),
              kOk)
        << err_.str();
    const auto j = nlohmann::json::parse(slurp(path("r.json")));
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(j.at("n"), 15000);
    const int configured[] = {-1, -1, -2};
    ASSERT_EQ(j.at("levels").size(), 3u);
    for (int lv = 0; lv < 3; ++lv) {
        const auto& level = j.at("levels")[static_cast<std::size_t>(lv)];
        EXPECT_EQ(level.at("j"), lv + 1);
        EXPECT_NEAR(level.at("theta_hat_grid").get<int>(), configured[lv], 1) << "j=" << lv + 1;
        EXPECT_DOUBLE_EQ(level.at("theta_hat_seconds").get<double>(),
                         level.at("theta_hat_grid").get<int>() * std::ldexp(1.0, -14));
        EXPECT_EQ(level.at("curve").size(), 121u);
        EXPECT_TRUE(level.at("curve")[0].contains("rho_norm"));
    }
    EXPECT_EQ(j.at("hry").at("theta_hat_grid"), -1);
}

TEST_F(CliTest, FailedEstimateLeavesNoOutput)
{
    write("good.csv", "timestamp,price\n0,100\n1,101\n2,102\n");
    write("bad.csv", "timestamp,price\n0,100\n2,101\n1,102\n");
    EXPECT_EQ(invoke({"estimate", "--in1", path("good.csv"), "--in2", path("bad.csv"), "--family", "haar", "--levels",
                      "1", "--maxlag", "0", "--out", path("r.json")}),
              kData);
    EXPECT_NE(err_.str().find("row 3"), std::string::npos) << err_.str();
    EXPECT_EQ(files().size(), 2u);
}

TEST_F(CliTest, WriteAtomicallyCleansUpOnFailure)
{
    EXPECT_THROW(write_atomically(path("o.txt"),
                                  [](std::ostream& os) {
                                      os << "partial";
                                      throw NumericError("boom");
                                  }),
                 NumericError);
    EXPECT_TRUE(files().empty());
    write_atomically(path("o.txt"), [](std::ostream& os) { os << "done"; });
    EXPECT_EQ(slurp(path("o.txt")), "done");
    EXPECT_EQ(files().size(), 1u);
}

TEST_F(CliTest, OutputDirectoryMustExist)
{
    EXPECT_THROW(parse({"gain", "--family", "haar", "--level", "1", "--out", path("missing/dir/g.csv")}), UsageError);
}

TEST_F(CliTest, McSmoke)
{
    write_benchmark_model("m.json", 4096);
    write("mc.json", R"({"model": "m.json", "families": ["haar", "la20"], "j_max": 3, "lmax": 30,
                         "replications": 50, "seed": 3, "pi1": 0.5, "pi2": 0.5})");
    ASSERT_EQ(invoke({"mc", "--config", path("mc.json"), "--reps", "2", "--out", path("t2.csv"), "--threads", "2"}),
              kOk)
        << err_.str();
    const auto text = slurp(path("t2.csv"));
    EXPECT_NE(text.find("replications=2 "), std::string::npos) << text;
    EXPECT_NE(text.find("pi1=0.5"), std::string::npos);
    EXPECT_NE(text.find("family,statistic,j1,j2,j3\n"), std::string::npos);
    EXPECT_NE(text.find("HRY,median,"), std::string::npos);
    EXPECT_NE(text.find("LA(20),mad,"), std::string::npos);
    EXPECT_EQ(text.find("LA(8)"), std::string::npos);

    // the same run with an inline model and a different thread count is identical
    const auto mf = benchmark_model(0.5, 4096);
    nlohmann::json cfg{{"model", model_to_json(mf.model, mf.scheme)}, {"families", {"haar", "la20"}},
                       {"j_max", 3}, {"lmax", 30}, {"replications", 2}, {"seed", 3}};
    write("mc2.json", cfg.dump());
    ASSERT_EQ(invoke({"--threads", "1", "mc", "--config", path("mc2.json"), "--out", path("t3.csv")}), kOk)
        << err_.str();
    EXPECT_EQ(slurp(path("t3.csv")), text);
}

TEST_F(CliTest, McInfeasibleLevels)
{
    write_benchmark_model("m.json", 1024);
    write("mc.json", R"({"model": "m.json", "families": ["la20"], "j_max": 8, "lmax": 60})");
    EXPECT_EQ(invoke({"mc", "--config", path("mc.json"), "--out", path("t.csv")}), kUsage);
    EXPECT_FALSE(fs::exists(path("t.csv")));
}

TEST_F(CliTest, BinaryExitCodes)
{
    const std::string bin = LEADLAG_BIN;
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status(bin + " gain --family haar --level 1 --points 4"), 0);
    EXPECT_EQ(status(bin + " gain --level 1"), 1);
    write("bad.json", R"({"J": 2, "levels": [{"j": 1, "R": -3}]})");
    EXPECT_EQ(status(bin + " model-check --model " + path("bad.json")), 2);
}
