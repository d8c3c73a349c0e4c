#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "genmetrics/cli.hpp"

namespace fs = std::filesystem;
using genmetrics::cli::run;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
    json status() const {
        const auto last = out.find_last_of('\n', out.size() - 2);
        return json::parse(out.substr(last == std::string::npos ? 0 : last + 1));
    }
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("genmetrics_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string gen_mixture(const std::string& name, int n, int seed, double offset = 0.0) {
        const std::string params = R"({"dim": 8, "components": 2, "spread": 1.0, "offset": )" + std::to_string(offset) + "}";
        const auto r = call({"gen", "--kind", "gaussian-mixture", "--params", params, "--n", std::to_string(n),
                             "--seed", std::to_string(seed), "--out", path(name)});
        EXPECT_EQ(r.code, 0) << r.err;
        return path(name);
    }

    void write_text(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenMixtureWritesRequestedShape) {
    const auto f = gen_mixture("a.fset", 100, 1);
    const auto set = genmetrics::load_feature_file(f);
    EXPECT_EQ(set.rows(), 100u);
    EXPECT_EQ(set.cols(), 8u);
    const auto again = gen_mixture("b.fset", 100, 1);
    EXPECT_EQ(slurp(f), slurp(again));
    EXPECT_NE(slurp(f), slurp(gen_mixture("c.fset", 100, 2)));
}

TEST_F(Cli, GenToyPixel) {
    const auto r = call({"gen", "--kind", "toy-images", "--params", R"({"height":16,"width":16})", "--n", "10",
                         "--feature", "pixel", "--out", path("toy.fset")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.status()["d"], 256);
    EXPECT_EQ(r.status()["space"], "pixel");
    EXPECT_EQ(genmetrics::load_feature_file(path("toy.fset")).space(), genmetrics::SpaceTag::pixel);
}

TEST_F(Cli, GenRejectsBadParams) {
    EXPECT_EQ(call({"gen", "--kind", "toy-images", "--params", R"({"height":8})", "--n", "1", "--out", path("x")}).code, 2);
    EXPECT_EQ(call({"gen", "--kind", "toy-images", "--params", R"({"depth":8})", "--n", "1", "--out", path("x")}).code, 2);
    EXPECT_EQ(call({"gen", "--kind", "gaussian-mixture", "--feature", "pixel", "--n", "1", "--out", path("x")}).code, 2);
}

TEST_F(Cli, ComputeMmdOfSetWithItselfIsZero) {
    const auto a = gen_mixture("a.fset", 50, 1);
    const auto r = call({"compute", "--metric", "mmd", "--real", a, "--gen", a});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = r.status()["report"];
    EXPECT_EQ(report["score"], 0.0);
    EXPECT_EQ(report["n"], 50);
    EXPECT_EQ(report["kernel"], "gaussian/median");
}

TEST_F(Cli, ComputeWritesReportFile) {
    const auto a = gen_mixture("a.fset", 30, 1);
    const auto b = gen_mixture("b.fset", 30, 2, 1.0);
    ASSERT_EQ(call({"compute", "--metric", "wd", "--real", a, "--gen", b, "--out", path("r.json")}).code, 0);
    const auto report = json::parse(slurp(path("r.json")));
    EXPECT_EQ(report["metric"], "wd");
    EXPECT_GT(report["score"].get<double>(), 0.0);
    ASSERT_EQ(call({"compute", "--metric", "fid", "--real", a, "--gen", b, "--out", path("r.csv"), "--format", "csv"}).code, 0);
    EXPECT_EQ(lines(slurp(path("r.csv"))), 2u);
}

TEST_F(Cli, ComputeNnUnequalSizes) {
    const auto a = gen_mixture("a.fset", 20, 1);
    const auto b = gen_mixture("b.fset", 21, 2);
    const auto r = call({"compute", "--metric", "nn", "--real", a, "--gen", b});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("equal set sizes"), std::string::npos) << r.err;
    EXPECT_EQ(r.status()["status"], "error");
}

TEST_F(Cli, ComputeIsOnFeaturesIsPrecondition) {
    const auto a = gen_mixture("a.fset", 20, 1);
    EXPECT_EQ(call({"compute", "--metric", "is", "--gen", a}).code, 4);
}

TEST_F(Cli, ComputeIsOnSoftmaxCsv) {
    write_text("p.csv", "1,0\n0,1\n");
    // CSV loads as feature space; the check is on the space tag.
    EXPECT_EQ(call({"compute", "--metric", "is", "--gen", path("p.csv")}).code, 4);
}

TEST_F(Cli, FileErrors) {
    EXPECT_EQ(call({"compute", "--metric", "mmd", "--real", path("missing"), "--gen", path("missing")}).code, 3);
    write_text("bad.fset", "NOTAFILE_NOTAFILE_NOTAFILE");
    EXPECT_EQ(call({"compute", "--metric", "mmd", "--real", path("bad.fset"), "--gen", path("bad.fset")}).code, 3);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"frobnicate"}).code, 2);
    EXPECT_EQ(call({"compute", "--metric", "kid", "--gen", "x"}).code, 2);
    EXPECT_EQ(call({"compute", "--metric", "mmd"}).code, 2);
    EXPECT_EQ(call({"compute", "--metric", "mmd", "--gen", "x", "--sigma", "1", "--median"}).code, 2);
    EXPECT_EQ(call({"compute", "--metric", "mmd", "--gen", "x", "--sigma", "-1"}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(Cli, ExperimentMixingCsvAndDeterminism) {
    write_text("mix.json", R"({
      "real": {"kind": "mixture", "dim": 4, "components": 3, "spread": 2.0, "structure_seed": 1},
      "other": {"kind": "mixture", "dim": 4, "components": 1, "spread": 0.0, "offset": 2.0},
      "metrics": ["mmd", "wd"],
      "n": 60,
      "seeds": [0, 1, 2, 3, 4]
    })");
    const auto r = call({"experiment", "--protocol", "mixing", "--config", path("mix.json"), "--out", path("o1")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = slurp(path("o1/mixing.csv"));
    EXPECT_EQ(lines(csv), 23u);  // header + 11 values x 2 metrics
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "sweep_value,metric,mean,std,seed_count,space");
    const auto resolved = json::parse(slurp(path("o1/mixing.config.json")));
    EXPECT_EQ(resolved["grid"].size(), 11u);

    ASSERT_EQ(call({"experiment", "--protocol", "mixing", "--config", path("mix.json"), "--out", path("o2")}).code, 0);
    EXPECT_EQ(csv, slurp(path("o2/mixing.csv")));
}

TEST_F(Cli, ExperimentConfigErrors) {
    write_text("c.json", R"({"real": {"kind": "mixture", "dim": 2}, "metrics": ["mmd"], "n": 20})");
    EXPECT_EQ(call({"experiment", "--protocol", "warp", "--config", path("c.json"), "--out", path("o")}).code, 2);
    write_text("bad.json", R"({"real": {"kind": "mixture", "dim": 2}, "metrics": ["mmd"], "colour": 1})");
    EXPECT_EQ(call({"experiment", "--protocol", "collapse", "--config", path("bad.json"), "--out", path("o")}).code, 2);
    write_text("empty.json", R"({"real": {"kind": "mixture", "dim": 2}, "metrics": ["mmd"], "seeds": []})");
    EXPECT_EQ(call({"experiment", "--protocol", "collapse", "--config", path("empty.json"), "--out", path("o")}).code, 2);
    write_text("nojson.json", "{");  // unparseable: a format error
    EXPECT_EQ(call({"experiment", "--protocol", "collapse", "--config", path("nojson.json"), "--out", path("o")}).code, 3);
    EXPECT_EQ(call({"experiment", "--protocol", "collapse", "--config", path("nothere.json"), "--out", path("o")}).code, 3);
}

TEST_F(Cli, ExperimentPartialSweep) {
    // 30 rows cannot feed two disjoint sets of 20: every seed fails.
    gen_mixture("small.fset", 30, 1);
    write_text("p.json", R"({"real": {"kind": "file", "path": "small.fset"}, "metrics": ["mmd"], "n": 20, "k": 2,
                             "grid": [0, 1], "seeds": [0, 1]})");
    const auto r = call({"experiment", "--protocol", "collapse", "--config", path("p.json"), "--out", path("o")});
    EXPECT_EQ(r.code, 5) << r.err;
    EXPECT_TRUE(fs::exists(path("o/collapse.csv.partial")));
    EXPECT_FALSE(fs::exists(path("o/collapse.csv")));
    const auto resolved = json::parse(slurp(path("o/collapse.config.json")));
    EXPECT_EQ(resolved["failures"].size(), 2u);
}

TEST_F(Cli, BenchRows) {
    const auto r = call({"bench", "--metrics", "mmd,wd", "--sizes", "100,200", "--repeats", "1", "--out", path("b.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(slurp(path("b.csv"))), 5u);
}
