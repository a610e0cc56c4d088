#include "ffkyp/cli.hpp"
#include "ffkyp/reports.hpp"
#include "ffkyp/system_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ffkyp;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ffkyp");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ffkyp_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(SystemIo, ShippedFileMatchesBuiltIn) {
  const LpvSystem a = load_system(std::string(FFKYP_DATA_DIR) + "/example1.json");
  const LpvSystem b = example1_system();
  const Vector p = Vector::Constant(1, 0.13);
  EXPECT_TRUE(a.A()(p).isApprox(b.A()(p)));
  EXPECT_TRUE(a.B()(p).isApprox(b.B()(p)));
  EXPECT_TRUE(a.C()(p).isApprox(b.C()(p)));
  EXPECT_TRUE(a.D()(p).isApprox(b.D()(p)));
  EXPECT_TRUE(a.box().rate_upper.isApprox(b.box().rate_upper));
}

TEST(SystemIo, RoundTrip) {
  const LpvSystem s = example1_system();
  const LpvSystem t = system_from_json(Json::parse(system_to_json(s, "x").dump()));
  const Vector p = Vector::Constant(1, 0.2);
  EXPECT_EQ(t.A()(p), s.A()(p));
  EXPECT_EQ(t.D()(p), s.D()(p));
  EXPECT_EQ(t.box().p_lower, s.box().p_lower);
}

TEST(SystemIo, FlatAndNestedMatrices) {
  const Matrix a = matrix_from_json(Json::parse("[[1, 2], [3, 4]]"), 2, 2, "A");
  const Matrix b = matrix_from_json(Json::parse("[1, 2, 3, 4]"), 2, 2, "A");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a(0, 1), 2.0);
  EXPECT_THROW(matrix_from_json(Json::parse("[1, 2, 3]"), 2, 2, "A"), std::invalid_argument);
}

TEST(SystemIo, RejectsUnknownKeys) {
  Json j = system_to_json(example1_system());
  j["Ax"] = 1;
  EXPECT_THROW(system_from_json(j), std::invalid_argument);
}

TEST(Config, ParsesAndRejects) {
  const AnalysisConfig c = config_from_json(Json::parse(R"({"range": "mid:1:2", "mode": "gkyp", "t_end": 5})"));
  EXPECT_EQ(c.range, "mid:1:2");
  EXPECT_EQ(c.mode, "gkyp");
  EXPECT_EQ(c.t_end, 5.0);
  EXPECT_EQ(c.system, "example1");
  EXPECT_THROW(config_from_json(Json::parse(R"({"rnage": "low:1"})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"range": "low:-1"})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"mode": "hinf"})")), std::invalid_argument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"step": 0})")), std::invalid_argument);
}

TEST(Config, DefaultSchedule) {
  const ScheduleTrajectory t = default_schedule(example1_system().box());
  const ScheduleTrajectory e = ScheduleTrajectory::example1_default();
  for (double s : {0.0, 0.4, 3.3}) {
    EXPECT_NEAR(t.p(s)(0), e.p(s)(0), 1e-15);
    EXPECT_NEAR(t.pdot(s)(0), e.pdot(s)(0), 1e-15);
  }
}

TEST(ReferenceTable, SharedBands) {
  EXPECT_EQ(reference("delta_squared").rel_tol, 0.005);
  EXPECT_EQ(reference("enlarged_cutoff").rel_tol, 0.001);
  EXPECT_EQ(reference("gap_squared").rel_tol, 0.02);
  EXPECT_EQ(reference("rho_unif").rel_tol, 0.01);
  EXPECT_EQ(reference("gamma_e").value, 5.2445);
  EXPECT_THROW(reference("nope"), std::out_of_range);
  EXPECT_TRUE(compare("delta_squared", 34.47).pass);
  EXPECT_FALSE(compare("delta_squared", 35.0).pass);
  EXPECT_FALSE(compare("gamma_f", std::nan("")).pass);
  const std::string table = format_table({compare("gap_squared", 163.6)});
  EXPECT_NE(table.find("PASS"), std::string::npos);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  const fs::path d = scratch("usage");
  EXPECT_EQ(cli({"--out", d.string(), "analyze", "--system", "/nonexistent/system.json"}).code, 1);
  EXPECT_EQ(cli({"--out", d.string(), "analyze", "--range", "low:0"}).code, 1);
  EXPECT_EQ(cli({"--out", d.string(), "reproduce", "example3"}).code, 1);
  write(d / "bad.json", R"({"range": "low:1", "colour": "blue"})");
  const CliRun r = cli({"--out", d.string(), "--config", (d / "bad.json").string(), "analyze"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("colour"), std::string::npos);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, InfeasibleExitsTwo) {
  const fs::path d = scratch("infeasible");
  Json s = Json::parse(R"({"n": 1, "inputs": 1, "outputs": 1, "params": 0, "A0": [[1.0]], "A": [], "B0": [[1.0]],
      "B": [], "C0": [[1.0]], "C": [], "D0": [[0.0]], "D": [], "p_lower": [], "p_upper": [], "rate_lower": [],
      "rate_upper": []})");
  save_json(s, (d / "unstable.json").string());
  const CliRun r = cli({"--out", d.string(), "analyze", "--system", (d / "unstable.json").string(), "--mode", "lpv_ef"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("finite bound"), std::string::npos);
  EXPECT_EQ(cli({"--out", d.string(), "certify-uas", "--system", (d / "unstable.json").string()}).code, 2);
}

TEST(Cli, AnalyzeWritesCertificate) {
  const fs::path d = scratch("analyze");
  const CliRun r = cli({"--out", d.string(), "analyze", "--mode", "lpv_ef"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("gamma*: 4.42"), std::string::npos);
  const Json j = load_json((d / "certificate.json").string());
  EXPECT_EQ(j["mode"], "lpv_ef");
  EXPECT_NEAR(j["gamma_star"].get<double>(), 4.4229, 2e-3);
  EXPECT_EQ(j["P"].size(), 2u);
  EXPECT_FALSE(j["conditional"].get<bool>());
}

TEST(Cli, AnalyzeLpvFfIsLabelledConditional) {
  const fs::path d = scratch("conditional");
  const fs::path sys = d / "sys.json";
  save_json(system_to_json(example1_consistent_system()), sys.string());
  const CliRun r = cli({"--out", d.string(), "analyze", "--system", sys.string(), "--range", "low:1", "--mode", "lpv_ff"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("conditional"), std::string::npos);
  EXPECT_TRUE(load_json((d / "certificate.json").string())["conditional"].get<bool>());
}

TEST(Cli, OutputsAreDeterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const fs::path& d : {a, b}) {
    ASSERT_EQ(cli({"--out", d.string(), "analyze", "--mode", "kyp", "--p", "0.15"}).code, 0);
    ASSERT_EQ(cli({"--out", d.string(), "certify-uas", "--c1", "0.5", "--c2", "0.6"}).code, 0);
    ASSERT_EQ(cli({"--out", d.string(), "enlarge", "--c1", "0.5", "--c2", "0.6", "--grid", "5", "--nodes", "51"}).code, 0);
    ASSERT_EQ(cli({"--out", d.string(), "simulate", "--t-end", "5", "--range", "low:1"}).code, 0);
    ASSERT_EQ(cli({"--out", d.string(), "gramians", "--p", "0.15", "--t", "2", "--nodes", "51"}).code, 0);
  }
  for (const char* f : {"certificate.json", "uas.json", "enlarge.json", "simulation.json", "simulation.csv",
                        "gramians.json"}) {
    const std::string x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
    if (fs::path(f).extension() == ".json") EXPECT_NO_THROW(Json::parse(x)) << f;
  }
}

TEST(Cli, JsonReportsReparse) {
  const fs::path d = scratch("reparse");
  ASSERT_EQ(cli({"--out", d.string(), "certify-uas", "--c1", "0.5", "--c2", "0.6", "--c3", "7.4"}).code, 0);
  const Json u = load_json((d / "uas.json").string());
  EXPECT_NEAR(u["alpha"].get<double>(), 1.2, 1e-12);
  EXPECT_NEAR(u["beta"].get<double>(), 6.1667, 1e-4);
  ASSERT_EQ(cli({"--out", d.string(), "enlarge", "--grid", "5", "--nodes", "51", "--c1", "0.5", "--c2", "0.6"}).code, 0);
  const Json e = load_json((d / "enlarge.json").string());
  EXPECT_EQ(FrequencyRange::parse(e["original"]["spec"].get<std::string>()), FrequencyRange::low(1.0));
  const FrequencyRange enl = FrequencyRange::parse(e["enlarged"]["spec"].get<std::string>());
  EXPECT_TRUE(FrequencyRange::low(1.0).subset_of(enl));
  EXPECT_EQ(e["trace_source"], "lyapunov_bound");
  ASSERT_EQ(cli({"--out", d.string(), "gramians", "--p", "0.15", "--range", "low:1", "--nodes", "51", "--t", "1"}).code, 0);
  const Json g = load_json((d / "gramians.json").string());
  EXPECT_EQ(g["normalization"], "unit");
  EXPECT_GT(g["W_p"]["trace"].get<double>(), 0.0);
  EXPECT_EQ(g["W_p"]["eigenvalues"].size(), 2u);
}

TEST(Cli, SimulateCsvColumns) {
  const fs::path d = scratch("csv");
  ASSERT_EQ(cli({"--out", d.string(), "simulate", "--t-end", "1", "--range", "low:1", "--range", "low:5.955",
                 "--signal", "cos:1:8,cos:1:10,cos:1:20"})
                .code,
            0);
  std::ifstream f(d / "simulation.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "t,u1,x1,x2,xdot1,xdot2,y1,gamma_R,S_low:1,S_low:5.955");
  int rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  EXPECT_EQ(rows, 1001);
}

TEST(Cli, EnlargeLtiHasZeroDelta) {
  const fs::path d = scratch("lti");
  Json s = Json::parse(R"({"n": 1, "inputs": 1, "outputs": 1, "params": 0, "A0": [[-3.0]], "A": [], "B0": [[1.0]],
      "B": [], "C0": [[1.0]], "C": [], "D0": [[0.0]], "D": [], "p_lower": [], "p_upper": [], "rate_lower": [],
      "rate_upper": []})");
  save_json(s, (d / "lti.json").string());
  ASSERT_EQ(cli({"--out", d.string(), "enlarge", "--system", (d / "lti.json").string(), "--range", "low:1"}).code, 0);
  const Json e = load_json((d / "enlarge.json").string());
  EXPECT_GT(e["gap_squared"].get<double>(), 0.0);
  EXPECT_EQ(e["delta_squared"].get<double>(), 0.0);
}

TEST(Cli, ReproduceExample2WritesComparisonTable) {
  const fs::path d = scratch("repro2");
  const CliRun r = cli({"--out", d.string(), "reproduce", "example2"});
  EXPECT_TRUE(r.code == 0 || r.code == 2) << r.err;
  const Json j = load_json((d / "reproduce_example2.json").string());
  std::set<std::string> keys;
  for (const auto& row : j["comparisons"]) keys.insert(row["key"].get<std::string>());
  for (const char* k : {"gap_squared", "trace_w_p", "trace_w_dot_p", "delta_squared", "enlarged_cutoff", "gamma_fu"})
    EXPECT_TRUE(keys.count(k)) << k;
  for (const auto& c : j["checks"]) {
    if (c["check"] == "iqc_nonnegative_on_low_5.955") EXPECT_TRUE(c["pass"].get<bool>());
  }
}

TEST(Cli, ReproduceExample1ReportsNegativeIqc) {
  const fs::path d = scratch("repro1");
  const CliRun r = cli({"--out", d.string(), "reproduce", "example1"});
  EXPECT_TRUE(r.code == 0 || r.code == 2) << r.err;
  EXPECT_NE(r.out.find("PASS iqc_negative_on_low_1"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "reproduce_example1.json"));
}

TEST(Cli, ExecutableRuns) {
  const fs::path d = scratch("exe");
  const std::string cmd = std::string(FFKYP_CLI_PATH) + " --out " + d.string() + " certify-uas --c1 0.5 --c2 0.6 > " +
                          (d / "stdout.txt").string();
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NE(slurp(d / "stdout.txt").find("alpha = 1.2"), std::string::npos);
}
