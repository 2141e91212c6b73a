#include <gtest/gtest.h>

#include <cfloat>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <arisim/export.hpp>

namespace {

using namespace arisim;
using nlohmann::json;

std::string temp_path(const std::string& name) {
    return std::string(::testing::TempDir()) + name;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream is(path);
    EXPECT_TRUE(is.good()) << path;
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

sweep::MetricRow sample_row(const std::string& variable, double value,
                            const std::string& mode) {
    sweep::MetricRow r;
    r.sweep_variable = variable;
    r.sweep_value = value;
    r.mode = mode;
    r.policy = "fixed";
    r.fairness = "Off";
    r.mean_sum_rate = 1.0 / 3.0;
    r.ci_half_width = 0.1;
    r.ci_defined = true;
    r.outage = 0.25;
    r.mean_ee = 1234.5678;
    r.mean_jain = 0.875;
    r.n = 50;
    return r;
}

}  // namespace

TEST(Fmt, SeventeenDigitsRoundTripEveryDouble) {
    for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 158.4893192461113485, 1e-308,
                     -DBL_MAX, 2.2250738585072014e-308, 1.0, -0.0}) {
        const std::string s = exporter::fmt(v);
        // strtod rather than stod: the latter throws out_of_range on the
        // subnormal case even though the conversion is exact.
        const double back = std::strtod(s.c_str(), nullptr);
        EXPECT_EQ(back, v) << s;
        EXPECT_EQ(std::signbit(back), std::signbit(v)) << s;
    }
    EXPECT_EQ(exporter::fmt(1.0), "1");
    EXPECT_EQ(exporter::fmt(0.1), "0.10000000000000001");
}

TEST(EnsureDir, CreatesNestedDirectories) {
    const std::string dir = temp_path("export_nested/a/b");
    exporter::ensure_dir(dir);
    EXPECT_TRUE(std::filesystem::is_directory(dir));
    exporter::ensure_dir(dir);  // idempotent
}

TEST(OpenOut, ThrowsWhenParentIsMissing) {
    EXPECT_THROW(exporter::open_out(temp_path("no_such_dir/file.csv")),
                 std::runtime_error);
}

TEST(MetricsCsv, WriteReadRoundTripIsBitExact) {
    const std::string path = temp_path("metrics_roundtrip.csv");
    std::vector<sweep::MetricRow> rows;
    rows.push_back(sample_row("p_t_dbm", -10.0, "ARIS_NOMA"));
    sweep::MetricRow single = sample_row("k_elements", 32.0, "PRIS_OMA");
    single.ci_defined = false;
    single.ci_half_width = std::numeric_limits<double>::quiet_NaN();
    single.n = 1;
    rows.push_back(single);

    exporter::write_metrics_csv(path, rows);

    const auto lines = read_lines(path);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], exporter::kMetricsHeader);
    // The undefined interval round-trips as an empty field.
    EXPECT_NE(lines[2].find(",,"), std::string::npos);

    const auto back = exporter::read_metrics_csv(path);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].sweep_variable, rows[i].sweep_variable);
        EXPECT_EQ(back[i].sweep_value, rows[i].sweep_value);
        EXPECT_EQ(back[i].mode, rows[i].mode);
        EXPECT_EQ(back[i].policy, rows[i].policy);
        EXPECT_EQ(back[i].fairness, rows[i].fairness);
        EXPECT_EQ(back[i].mean_sum_rate, rows[i].mean_sum_rate);
        EXPECT_EQ(back[i].ci_defined, rows[i].ci_defined);
        EXPECT_EQ(back[i].outage, rows[i].outage);
        EXPECT_EQ(back[i].mean_ee, rows[i].mean_ee);
        EXPECT_EQ(back[i].mean_jain, rows[i].mean_jain);
        EXPECT_EQ(back[i].n, rows[i].n);
    }
    EXPECT_EQ(back[0].ci_half_width, rows[0].ci_half_width);
    EXPECT_TRUE(std::isnan(back[1].ci_half_width));
}

TEST(MetricsCsv, RejectsMissingFileAndForeignHeader) {
    EXPECT_THROW(exporter::read_metrics_csv(temp_path("missing.csv")),
                 std::runtime_error);

    const std::string path = temp_path("bad_header.csv");
    { exporter::open_out(path) << "a,b,c\n1,2,3\n"; }
    EXPECT_THROW(exporter::read_metrics_csv(path), std::runtime_error);

    const std::string ragged = temp_path("ragged.csv");
    { exporter::open_out(ragged) << exporter::kMetricsHeader << "\n1,2\n"; }
    EXPECT_THROW(exporter::read_metrics_csv(ragged), std::runtime_error);
}

TEST(CurveCsv, WriteReadRoundTrip) {
    const std::string path = temp_path("curve_roundtrip.csv");
    std::vector<hppo::IterationStats> curve(2);
    curve[0].iteration = 0;
    curve[0].mean_ep_reward = 1.5;
    curve[0].loss_d = -0.25;
    curve[0].loss_c = 0.125;
    curve[0].value_loss = 2.0 / 3.0;
    curve[0].entropy = 4.25;
    curve[1].iteration = 1;
    curve[1].mean_ep_reward = 2.5;

    exporter::write_curve_csv(path, curve, "ARIS_NOMA", "On");

    const auto lines = read_lines(path);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], exporter::kCurveHeader);

    const auto back = exporter::read_curve_csv(path);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].iteration, 0);
    EXPECT_EQ(back[0].mode, "ARIS_NOMA");
    EXPECT_EQ(back[0].fairness, "On");
    EXPECT_EQ(back[0].mean_ep_reward, 1.5);
    EXPECT_EQ(back[0].loss_d, -0.25);
    EXPECT_EQ(back[0].loss_c, 0.125);
    EXPECT_EQ(back[0].value_loss, 2.0 / 3.0);
    EXPECT_EQ(back[0].entropy, 4.25);
    EXPECT_EQ(back[1].iteration, 1);
    EXPECT_EQ(back[1].mean_ep_reward, 2.5);

    const std::string bad = temp_path("curve_bad.csv");
    { exporter::open_out(bad) << "nope\n"; }
    EXPECT_THROW(exporter::read_curve_csv(bad), std::runtime_error);
}

TEST(TracesCsv, EncodesFlagsAsBinaryColumns) {
    const std::string path = temp_path("traces.csv");
    std::vector<sweep::TraceRow> traces(2);
    traces[0].episode = 0;
    traces[0].slot = 3;
    traces[0].uav_x = -5.0;
    traces[0].uav_y = 2.5;
    traces[0].move = 4;
    traces[0].reward = 1.25;
    traces[0].r_total = 3.5;
    traces[0].worst = 0.5;
    traces[0].oob = true;
    traces[1].episode = 1;
    traces[1].no_fly = true;
    traces[1].qos = true;

    exporter::write_traces_csv(path, traces);

    const auto lines = read_lines(path);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], exporter::kTraceHeader);
    EXPECT_EQ(lines[1], "0,3,-5,2.5,4,1.25,3.5,0.5,1,0,0");
    const auto f = exporter::split_csv_line(lines[2]);
    ASSERT_EQ(f.size(), 11u);
    EXPECT_EQ(f[0], "1");
    EXPECT_EQ(f[8], "0");
    EXPECT_EQ(f[9], "1");
    EXPECT_EQ(f[10], "1");
}

TEST(Manifest, EmbedsVersionSeedHashAndFullConfig) {
    const auto xc = cfg::ExperimentConfig::from_json(json{{"seed", 7}});
    const std::string path = temp_path("manifest.json");

    exporter::write_manifest(path, xc, "train");
    const json m = exporter::read_manifest(path);

    EXPECT_EQ(m.at("version").get<std::string>(), kVersion);
    EXPECT_EQ(m.at("command").get<std::string>(), "train");
    EXPECT_EQ(m.at("seed").get<std::uint64_t>(), 7u);

    char expected[24];
    std::snprintf(expected, sizeof(expected), "%016llx", (unsigned long long)xc.hash());
    EXPECT_EQ(m.at("config_hash").get<std::string>(), expected);
    EXPECT_EQ(m.at("config"), xc.j);

    // The embedded config reproduces the run's identity.
    const auto back = cfg::ExperimentConfig::from_json(m.at("config"));
    EXPECT_EQ(back.hash(), xc.hash());

    EXPECT_THROW(exporter::read_manifest(temp_path("no_manifest.json")),
                 std::runtime_error);
}

TEST(FigureSeries, RoutesRowsByVariableAndMetric) {
    const std::string dir = temp_path("figures");
    std::vector<sweep::MetricRow> rows;
    rows.push_back(sample_row("p_t_dbm", -10.0, "ARIS_NOMA"));
    rows.push_back(sample_row("p_t_dbm", 0.0, "PRIS_NOMA"));
    rows.push_back(sample_row("k_elements", 32.0, "ARIS_NOMA"));

    std::vector<exporter::CurveRow> curves(2);
    curves[0].iteration = 0;
    curves[0].mode = "ARIS_NOMA";
    curves[0].fairness = "Off";
    curves[0].mean_ep_reward = 10.5;
    curves[1].iteration = 1;
    curves[1].mode = "ARIS_NOMA";
    curves[1].fairness = "Off";
    curves[1].mean_ep_reward = 11.5;

    const auto written = exporter::write_figure_series(dir, rows, curves);
    ASSERT_EQ(written.size(), 6u);

    const auto fig2a = read_lines(dir + "/fig2a.csv");
    ASSERT_EQ(fig2a.size(), 3u);  // header + the two power-sweep rows
    EXPECT_EQ(fig2a[0], "p_t_dbm,mode,policy,fairness,mean_sum_rate,ci_half_width");
    EXPECT_EQ(exporter::split_csv_line(fig2a[1])[1], "ARIS_NOMA");
    EXPECT_EQ(exporter::split_csv_line(fig2a[2])[1], "PRIS_NOMA");

    const auto fig2b = read_lines(dir + "/fig2b.csv");
    ASSERT_EQ(fig2b.size(), 3u);
    EXPECT_EQ(std::stod(exporter::split_csv_line(fig2b[1])[4]), rows[0].mean_ee);

    const auto fig2c = read_lines(dir + "/fig2c.csv");
    EXPECT_EQ(std::stod(exporter::split_csv_line(fig2c[1])[4]), rows[0].outage);

    const auto fig3b = read_lines(dir + "/fig3b.csv");
    ASSERT_EQ(fig3b.size(), 2u);  // only the element-count row
    EXPECT_EQ(exporter::split_csv_line(fig3b[1])[0], "32");

    const auto fig3c = read_lines(dir + "/fig3c.csv");
    EXPECT_EQ(std::stod(exporter::split_csv_line(fig3c[1])[4]), rows[0].mean_jain);

    const auto fig3a = read_lines(dir + "/fig3a.csv");
    ASSERT_EQ(fig3a.size(), 3u);
    EXPECT_EQ(fig3a[0], "iteration,mode,fairness,mean_ep_reward");
    EXPECT_EQ(fig3a[1], "0,ARIS_NOMA,Off,10.5");
    EXPECT_EQ(fig3a[2], "1,ARIS_NOMA,Off,11.5");
}

TEST(ExportRunDir, GathersEveryMetricsAndCurveFile) {
    const std::string dir = temp_path("run_dir");
    exporter::ensure_dir(dir);

    exporter::write_metrics_csv(dir + "/metrics_sweep_b.csv",
                                {sample_row("k_elements", 64.0, "ARIS_NOMA")});
    exporter::write_metrics_csv(dir + "/metrics_sweep_a.csv",
                                {sample_row("p_t_dbm", 20.0, "ARIS_NOMA")});
    std::vector<hppo::IterationStats> curve(3);
    for (int i = 0; i < 3; ++i) curve[i].iteration = i;
    exporter::write_curve_csv(dir + "/learning_curve_ARIS_NOMA_fairOff.csv", curve,
                              "ARIS_NOMA", "Off");
    { exporter::open_out(dir + "/notes.txt") << "ignored\n"; }

    const auto written = exporter::export_run_dir(dir);
    ASSERT_EQ(written.size(), 6u);

    EXPECT_EQ(read_lines(dir + "/fig2a.csv").size(), 2u);
    EXPECT_EQ(read_lines(dir + "/fig3b.csv").size(), 2u);
    EXPECT_EQ(read_lines(dir + "/fig3a.csv").size(), 4u);  // header + 3 iterations
}
