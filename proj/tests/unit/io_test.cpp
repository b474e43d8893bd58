#include <algorithm>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rwl/config.hpp"
#include "rwl/data.hpp"
#include "rwl/report.hpp"

using namespace rwl;
namespace fs = std::filesystem;

namespace {

const Params p7 = make_params(7.0, Sign::focusing);

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rwl_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text, {}, "cfg.toml");
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        return e.what();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return {};
}

} // namespace

TEST(Data, BumpProfile) {
    EXPECT_DOUBLE_EQ(bump(0.0), 1.0);
    EXPECT_EQ(bump(1.0), 0.0);
    EXPECT_EQ(bump(-1.2), 0.0);
    EXPECT_NEAR(bump(0.5), std::exp(1.0 - 4.0 / 3.0), 1e-15);
}

TEST(Data, BumpSumRangesAndSupport) {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const BumpSum s = random_bump_sum(rng, 3.0);
        for (const auto* comp : {&s.position, &s.velocity}) {
            EXPECT_GE(comp->size(), 3u);
            EXPECT_LE(comp->size(), 6u);
            for (const auto& b : *comp) {
                EXPECT_GE(b.width, 0.2);
                EXPECT_LT(b.width, 0.6);
                EXPECT_GE(b.center, 0.0);
                EXPECT_LE(b.center + b.width, 3.0);
                EXPECT_LE(std::fabs(b.amplitude), 1.0);
            }
        }
        EXPECT_EQ(s.w0(3.0), 0.0);
        EXPECT_EQ(s.w1(3.5), 0.0);
    }
}

TEST(Data, SeedReproducible) {
    const RadialGrid g(8.0, 400);
    DataSpec spec;
    spec.family = Family::bump_sum;
    spec.seed = 99;
    const RadialState a = make_data(spec, p7, g), b = make_data(spec, p7, g);
    EXPECT_TRUE(std::ranges::equal(a.w.values(), b.w.values()));
    spec.seed = 100;
    EXPECT_FALSE(std::ranges::equal(make_data(spec, p7, g).w.values(), a.w.values()));
}

TEST(Data, GaussianAndPlateau) {
    const RadialGrid g(8.0, 800);
    DataSpec spec;
    spec.amplitude = 2.0;
    spec.width = 0.5;
    spec.velocity = -1.0;
    const RadialState s = make_data(spec, p7, g);
    EXPECT_DOUBLE_EQ(s.w[0], 2.0);
    EXPECT_NEAR(s.w[50], 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(s.wt[50], -std::exp(-1.0), 1e-15);
    spec.family = Family::plateau;
    spec.rho = 2.0;
    const RadialState q = make_data(spec, p7, g);
    EXPECT_EQ(q.w[100], 2.0);
    EXPECT_EQ(q.w[200], 0.0);
    EXPECT_NEAR(q.w[150], 1.0, 1e-15);
}

TEST(Data, SamplesFile) {
    const fs::path dir = temp_dir("samples");
    const fs::path file = dir / "s.csv";
    std::ofstream(file) << "r,w0,w1\n0,1,0\n1,0,2\n";
    DataSpec spec;
    spec.family = Family::samples;
    spec.path = file.string();
    const RadialGrid g(2.0, 20);
    const RadialState s = make_data(spec, p7, g);
    EXPECT_NEAR(s.w[5], 0.5, 1e-15);
    EXPECT_NEAR(s.wt[5], 1.0, 1e-15);
    EXPECT_EQ(s.w[15], 0.0);
    std::ofstream(file) << "r,w0,w1\n0,1,0\n1,x,2\n";
    try {
        make_data(spec, p7, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("s.csv:3:"), std::string::npos);
    }
}

TEST(Data, FamilyNames) {
    for (Family f : {Family::zero, Family::gaussian, Family::bump_sum, Family::plateau, Family::samples})
        EXPECT_EQ(family_from_string(to_string(f)), f);
    EXPECT_THROW(family_from_string("cosine"), Error);
}

TEST(Config, ParsesAllTables) {
    const RunConfig c = parse_config(R"(# comment
command = "simulate"
[params]
p = 9
iota = "defocusing"
[grid]
r_max = 12.5
n = 1250
dt_ratio = 0.5
t_end = 3
record_stride = 4
[data]
family = "bump_sum"
support = 2.5
seed = 17
[experiment]
R = [0.5, 1, 2e0]
times = []
trials = 7
seed = 18446744073709551615
[output]
directory = "out dir"
formats = ["csv"]
)");
    EXPECT_EQ(c.command, "simulate");
    EXPECT_EQ(c.p, 9.0);
    EXPECT_EQ(c.iota, Sign::defocusing);
    EXPECT_EQ(c.grid.n, 1250u);
    EXPECT_EQ(c.grid.dt_ratio, 0.5);
    EXPECT_EQ(c.grid.record_stride, 4u);
    EXPECT_EQ(c.data.family, Family::bump_sum);
    EXPECT_EQ(c.data.seed, 17u);
    EXPECT_EQ(c.experiment.R, (std::vector<double>{0.5, 1.0, 2.0}));
    EXPECT_EQ(c.experiment.seed, 18446744073709551615ULL);
    EXPECT_EQ(c.output.directory, "out dir");
    EXPECT_FALSE(c.output.wants("json"));
    EXPECT_TRUE(c.output.wants("csv"));
}

TEST(Config, LineAnchoredErrors) {
    EXPECT_NE(config_error("[grid]\nn = -3\n").find("cfg.toml:2:"), std::string::npos);
    EXPECT_NE(config_error("[grid]\nbogus = 1\n").find("cfg.toml:2:"), std::string::npos);
    EXPECT_NE(config_error("\n\n[nope]\n").find("cfg.toml:3:"), std::string::npos);
    EXPECT_NE(config_error("[data]\nfamily = \"cosine\"\n").find("cfg.toml:2:"), std::string::npos);
    EXPECT_NE(config_error("[params]\np = 1.0.0\n").find("cfg.toml:2:"), std::string::npos);
    EXPECT_NE(config_error("[params]\niota = 0\n").find("cfg.toml:2:"), std::string::npos);
    EXPECT_NE(config_error("[data]\nfamily = \"samples\"\npath = \"/no/such/file.csv\"\n").find("cfg.toml:3:"),
              std::string::npos);
    config_error("[params]\np = 5\n");
    config_error("[output]\nformats = [\"xml\"]\n");
    config_error("[experiment]\nR = [1, \"a\"]\n");
    config_error("[grid]\nr_max = \"big\"\n");
}

TEST(Config, RoundTrip) {
    RunConfig c;
    c.command = "huygens";
    c.p = 7.25;
    c.iota = Sign::defocusing;
    c.grid = {48.0, 4800, 0.75, 12.0, 3};
    c.data.family = Family::plateau;
    c.data.amplitude = 0.1;
    c.data.seed = 12345;
    c.experiment.R = {0.1, 1.0 / 3.0, 1e-7};
    c.experiment.lambdas = {2.0, 4.0};
    c.experiment.trials = 5;
    c.experiment.seed = 42;
    c.output.directory = "a \"quoted\" dir";
    c.output.formats = {"json"};
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_config(back), text);
    const RunConfig once = parse_config("[grid]\nn = 300\n");
    EXPECT_EQ(parse_config(serialize_config(once)), once);
}

TEST(Config, RelativeSamplePath) {
    const fs::path dir = temp_dir("relpath");
    std::ofstream(dir / "d.csv") << "0,1,0\n1,0,0\n";
    std::ofstream(dir / "c.toml") << "[data]\nfamily = \"samples\"\npath = \"d.csv\"\n";
    const RunConfig c = load_config(dir / "c.toml");
    EXPECT_EQ(fs::path(c.data.path), dir / "d.csv");
    EXPECT_THROW(load_config(dir / "missing.toml"), Error);
}

TEST(Report, PassIsPureFunctionOfMetrics) {
    ExperimentReport r;
    r.experiment = "conservation";
    r.set("surrogate_drift", 1e-9);
    r.set("ratio_min", 0.4);
    r.set("ratio_max", 1.0);
    r.set("ratio_lower", 0.25);
    r.set("ratio_upper", 4.4);
    EXPECT_TRUE(finalize(r).pass);
    r.set("ratio_min", 0.2);
    EXPECT_FALSE(finalize(r).pass);
    ExperimentReport missing;
    missing.experiment = "conservation";
    EXPECT_FALSE(finalize(missing).pass);
}

TEST(Report, FiniteRule) {
    ExperimentReport r;
    r.experiment = "hardy";
    for (const auto& rule : rules_for("hardy")) r.set(std::string(rule.metric), 0.5);
    r.set("utov_m2_mismatch", 0.0);
    EXPECT_TRUE(finalize(r).pass);
    r.set("utov_K", INFINITY);
    EXPECT_FALSE(finalize(r).pass);
}

TEST(Report, EveryRuleNamesKnownExperiment) {
    const std::vector<std::string_view> known = {"simulate", "linear", "stationary", "channel", "huygens", "conservation",
                                                 "smalldata", "exterior_decay", "blowup_ode", "hardy", "operators", "norms"};
    for (const auto& rule : threshold_table())
        EXPECT_NE(std::find(known.begin(), known.end(), rule.experiment), known.end()) << rule.experiment;
}

TEST(Report, JsonRoundTripWithNonFinite) {
    ExperimentReport r;
    r.experiment = "norms";
    r.name = "norms_p7";
    r.params = p7;
    r.set("nonfinite_count", 0.0);
    r.set("a", INFINITY);
    r.set("b", -INFINITY);
    r.set("c", 0.1);
    finalize(r);
    const auto j = to_json(r);
    EXPECT_EQ(j["metrics"]["a"], "inf");
    EXPECT_EQ(j["schema_version"], "1.0.0");
    const ExperimentReport back = from_json(nlohmann::ordered_json::parse(j.dump()));
    EXPECT_EQ(back.get("a"), INFINITY);
    EXPECT_EQ(back.get("b"), -INFINITY);
    EXPECT_EQ(back.get("c"), 0.1);
    EXPECT_EQ(back.pass, r.pass);
    EXPECT_EQ(evaluate(back), r.pass);
}

TEST(Csv, WriterContract) {
    Series empty{"e", {"t", "E_m", "E_2_total", "nonlinear_total", "ext_E_m_R", "max_abs_w"}, {}};
    EXPECT_EQ(csv_string(empty), "t,E_m,E_2_total,nonlinear_total,ext_E_m_R,max_abs_w\n");
    Series one{"o", {"t", "x"}, {}};
    one.add({0.1, 1.0 / 3.0});
    EXPECT_EQ(csv_string(one), "t,x\n0.1,0.3333333333333333\n");
    EXPECT_THROW(one.add({1.0}), Error);
    EXPECT_EQ(format_double(1e300), "1e+300");
    EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Csv, WriteReportFiles) {
    const fs::path dir = temp_dir("report");
    ExperimentReport r;
    r.experiment = "norms";
    r.name = "n";
    r.params = p7;
    r.series.push_back(Series{"n_table", {"a"}, {{1.0}}});
    write_report(r, dir / "nested");
    EXPECT_EQ(read(dir / "nested" / "n_table.csv"), "a\n1\n");
    EXPECT_TRUE(fs::exists(dir / "nested" / "n.json"));
    EXPECT_THROW(write_series(r.series[0], dir / "no" / "such" / "x.csv"), Error);
}
