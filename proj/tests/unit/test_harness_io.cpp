#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtbandit/harness/commands.hpp"
#include "mtbandit/harness/plot.hpp"
#include "mtbandit/harness/trace_io.hpp"
#include "mtbandit/harness/validate.hpp"

using namespace mtbandit;
using namespace mtbandit::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mtbandit_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::size_t count(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

std::size_t lines(const std::string& text) { return count(text, "\n"); }

const char* kSmallConfig =
    "[experiment]\n"
    "name = \"tiny\"\n"
    "trials = 1\n"
    "master_seed = 3\n"
    "[kernel]\n"
    "tasks = 2\n"
    "[algorithm.mtkb]\n"
    "eta = 0.1\n"
    "delta = 0.1\n"
    "horizon = 5\n"
    "[algorithm.mtbkb]\n"
    "eta = 0.1\n"
    "delta = 0.1\n"
    "epsilon = 0.5\n"
    "horizon = 5\n";

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "exp.conf";
    write_file(p.string(), text);
    return p;
}

}  // namespace

TEST(Sha256, KnownDigests) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(SummaryCsv, RoundTrips) {
    const std::vector<SummaryRow> rows{{"a", 1, 0.5, 0.1, 0.5, 1.2, 30.0, 0.9}, {"a", 2, 0.25, 0.0, 0.5, 1.5, 40.0, 1.1}};
    const auto back = parse_summary_csv(summary_csv(rows));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].algorithm, "a");
    EXPECT_EQ(back[1].t, 2u);
    EXPECT_EQ(back[1].mean_avg_regret, 0.25);
    EXPECT_EQ(back[0].bound_value, 30.0);
}

TEST(SummaryCsv, RejectsMalformedInput) {
    EXPECT_THROW(parse_summary_csv(""), ValidationError);
    EXPECT_THROW(parse_summary_csv("x,y\n"), ValidationError);
    EXPECT_THROW(parse_summary_csv("algorithm,t,mean_avg_regret,std_avg_regret\n"), ValidationError);
    EXPECT_THROW(parse_summary_csv("algorithm,t,mean_avg_regret,std_avg_regret\na,1,0.5\n"), ValidationError);
    EXPECT_THROW(parse_summary_csv("algorithm,t,mean_avg_regret,std_avg_regret\na,1,nope,0\n"), ValidationError);
    EXPECT_THROW(parse_summary_csv("algorithm,t,mean_avg_regret,std_avg_regret\na,0,0.5,0\n"), ValidationError);
    EXPECT_THROW(parse_summary_csv("algorithm,t,mean_avg_regret,std_avg_regret\na,1,0.5,-1\n"), ValidationError);
    EXPECT_EQ(parse_summary_csv("algorithm,t,mean_avg_regret,std_avg_regret\r\na,1,0.5,0\r\n").size(), 1u);
}

TEST(Plot, OneSeriesOnePolylineOneBand) {
    const std::vector<SummaryRow> rows{{"mtkb", 1, 0.5, 0.1}, {"mtkb", 2, 0.4, 0.1}, {"mtkb", 3, 0.3, 0.05}};
    const std::string svg = render_svg(rows);
    EXPECT_EQ(count(svg, "<polyline"), 1u);
    EXPECT_EQ(count(svg, "<polygon"), 1u);
    EXPECT_NE(svg.find("data-name=\"mtkb\""), std::string::npos);
    EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(Plot, EmptyInputIsAnError) { EXPECT_THROW(render_svg({}), ValidationError); }

TEST(Plot, NamesAreEscaped) {
    const std::string svg = render_svg({{"a<b&c", 1, 0.1, 0.0}});
    EXPECT_NE(svg.find("a&lt;b&amp;c"), std::string::npos);
    EXPECT_EQ(svg.find("a<b"), std::string::npos);
}

TEST(Plot, MatchesGoldenFile) {
    const std::string dir = MTBANDIT_TEST_DATA;
    const std::string svg = render_svg(read_summary(dir + "/two_series_summary.csv"));
    EXPECT_EQ(svg, read_file(dir + "/two_series.svg"));
}

TEST(PlotCommand, ExitCodes) {
    const fs::path dir = scratch("plot");
    write_file((dir / "empty.csv").string(), "algorithm,t,mean_avg_regret,std_avg_regret\n");
    std::ostringstream err;
    EXPECT_EQ(cmd_plot((dir / "empty.csv").string(), (dir / "x.svg").string(), err), kExitUsage);
    EXPECT_FALSE(err.str().empty());
    EXPECT_EQ(cmd_plot((dir / "missing.csv").string(), (dir / "x.svg").string(), err), kExitUsage);
    write_file((dir / "ok.csv").string(), "algorithm,t,mean_avg_regret,std_avg_regret\na,1,0.5,0\n");
    EXPECT_EQ(cmd_plot((dir / "ok.csv").string(), (dir / "x.svg").string(), err), kExitOk);
    EXPECT_TRUE(fs::exists(dir / "x.svg"));
}

TEST(Validate, AllSuitesPass) {
    const auto results = run_all_suites({});
    ASSERT_EQ(results.size(), 5u);
    for (const auto& r : results) {
        EXPECT_TRUE(r.passed) << r.name << " " << r.max_error;
        EXPECT_GT(r.checks, 0u);
    }
    const std::string report = format_report(results);
    EXPECT_NE(report.find("max_error"), std::string::npos);
    EXPECT_NE(report.find("variance_geometry"), std::string::npos);
}

TEST(Validate, CatchesASignFlippedCovariance) {
    ValidateOptions o;
    o.instances = 6;
    o.covariance = [](const ExactPosterior& s, const Point& x) {
        return dense_posterior_cov(s.kernel(), s.points(), s.eta(), x, -1.0);
    };
    const SuiteResult broken = variance_geometry(o);
    EXPECT_FALSE(broken.passed);
    EXPECT_GT(broken.max_error, 1e-3);

    o.covariance = [](const ExactPosterior& s, const Point& x) {
        return dense_posterior_cov(s.kernel(), s.points(), s.eta(), x, 1.0);
    };
    EXPECT_TRUE(variance_geometry(o).passed);
}

TEST(RunCommand, WritesTracesSummaryAndManifest) {
    const fs::path dir = scratch("run");
    RunArgs args{write_config(dir, kSmallConfig).string(), {}, (dir / "out").string(), 2};
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(args, out, err), kExitOk) << err.str();

    const std::string trace = read_file((dir / "out" / "mtkb_trial0_trace.csv").string());
    EXPECT_EQ(lines(trace), 6u);
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "t,lambda,x,y,beta,m_t,inst_regret,cum_regret,micros");
    EXPECT_TRUE(fs::exists(dir / "out" / "mtbkb_trial0_dictionary.csv"));
    EXPECT_FALSE(fs::exists(dir / "out" / "mtkb_trial0_dictionary.csv"));
    EXPECT_EQ(read_summary((dir / "out" / "summary.csv").string()).size(), 10u);

    const auto manifest = nlohmann::json::parse(read_file((dir / "out" / "manifest.json").string()));
    EXPECT_EQ(manifest["name"], "tiny");
    EXPECT_EQ(manifest["runs"].size(), 2u);
    std::set<std::string> listed;
    for (const auto& f : manifest["files"]) {
        const std::string path = f["path"];
        listed.insert(path);
        EXPECT_EQ(f["sha256"], sha256_hex(read_file((dir / "out" / path).string()))) << path;
    }
    std::set<std::string> present;
    for (const auto& e : fs::directory_iterator(dir / "out")) present.insert(e.path().filename().string());
    present.erase("manifest.json");
    EXPECT_EQ(listed, present);
}

TEST(RunCommand, IsDeterministicAcrossThreadCounts) {
    const fs::path dir = scratch("determinism");
    const std::string cfg = write_config(dir, kSmallConfig).string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run({cfg, {}, (dir / "a").string(), 1}, out, err), kExitOk);
    ASSERT_EQ(cmd_run({cfg, {}, (dir / "b").string(), 4}, out, err), kExitOk);
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        const auto name = e.path().filename();
        EXPECT_EQ(read_file(e.path().string()), read_file((dir / "b" / name).string())) << name;
    }
}

TEST(RunCommand, MissingKeyExitsWithUsageError) {
    const fs::path dir = scratch("missing");
    const std::string cfg = write_config(dir, "[algorithm.mtkb]\ndelta = 0.1\nhorizon = 5\n").string();
    std::ostringstream out, err;
    EXPECT_EQ(cmd_run({cfg, {}, (dir / "out").string(), 1}, out, err), kExitUsage);
    EXPECT_NE(err.str().find("algorithm.mtkb.eta"), std::string::npos) << err.str();
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(RunCommand, OverridesApply) {
    const fs::path dir = scratch("override");
    const std::string cfg = write_config(dir, kSmallConfig).string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run({cfg, {"algorithm.mtkb.horizon=3"}, (dir / "out").string(), 1}, out, err), kExitOk);
    EXPECT_EQ(lines(read_file((dir / "out" / "mtkb_trial0_trace.csv").string())), 4u);
    EXPECT_EQ(cmd_run({cfg, {"algorithm.mtkb.horizon"}, (dir / "bad").string(), 1}, out, err), kExitUsage);
}

TEST(ParetoCommand, WritesNonDominatedPoints) {
    const fs::path dir = scratch("pareto");
    const std::string cfg = write_config(dir, kSmallConfig).string();
    std::ostringstream err;
    ASSERT_EQ(cmd_pareto({cfg, {}, (dir / "front.csv").string(), 0}, err), kExitOk) << err.str();
    const std::string text = read_file((dir / "front.csv").string());
    EXPECT_EQ(text.substr(0, 10), "index,x,f\n");
    EXPECT_GE(lines(text), 2u);
}
