#include "ffkyp/cli.hpp"

#include "ffkyp/enlargement.hpp"
#include "ffkyp/gramians.hpp"
#include "ffkyp/lmi.hpp"
#include "ffkyp/reports.hpp"
#include "ffkyp/simulation.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace ffkyp {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Globals {
  std::string out;
  bool out_set = false;
  long long seed = 0;
  bool json = false;
  std::string config_path;
};

std::string out_dir(const Globals& g, const AnalysisConfig& c) {
  const std::string dir = g.out_set ? g.out : c.out;
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::string& dir, const std::string& name, const Json& j) {
  save_json(j, (std::filesystem::path(dir) / name).string());
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::vector<FrequencyRange> parse_ranges(const std::vector<std::string>& specs) {
  std::vector<FrequencyRange> out;
  for (const auto& s : specs) out.push_back(FrequencyRange::parse(s));
  return out;
}

Json provenance(const Globals& g, const std::string& command) {
  return Json{{"command", command}, {"seed", g.seed}};
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

Json checks_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) a.push_back(Json{{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return a;
}

std::string checks_text(const std::vector<Check>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Globals& g, const AnalysisConfig& c, std::ostream& out) {
  const LpvSystem sys = resolve_system(c.system);
  GammaOptions o;
  o.bisect_tol = c.bisect_tol;
  o.verify_density = c.verify_density;
  if (c.frozen_p) o.frozen_p = Eigen::Map<const Vector>(c.frozen_p->data(), static_cast<Eigen::Index>(c.frozen_p->size()));
  const AnalysisMode mode = parse_mode(c.mode);
  const GammaResult r = min_gamma(sys, FrequencyRange::parse(c.range), mode, o);
  Json j = to_json(r);
  j["provenance"] = provenance(g, "analyze");
  write_file(out_dir(g, c), "certificate.json", j);
  if (g.json) {
    out << j.dump(2) << '\n';
  } else {
    out << "mode: " << to_string(r.mode) << '\n';
    out << "range: " << r.range.to_string() << '\n';
    out << "gamma*: " << fmt(r.gamma_star, 8) << (mode == AnalysisMode::kLpvFf ? " (conditional on the IQC hypothesis)" : "")
        << '\n';
    out << "relaxation gap: " << (r.relaxation_gap_flag ? "yes" : "no") << '\n';
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  }
  return 0;
}

EnlargementOptions enlargement_options(const AnalysisConfig& c, const LpvSystem& sys, const std::string& stability,
                                       const std::string& source, std::optional<double> c1, std::optional<double> c2,
                                       double c3, double t_eval, double safety) {
  EnlargementOptions eo;
  eo.mode = parse_stability_mode(stability);
  eo.p_grid_density = c.grid_density;
  eo.gramian.quad_nodes = c.quad_nodes;
  eo.gramian.time_step = c.step;
  eo.bound.grid_density = c.grid_density;
  eo.bound.quad_nodes = c.quad_nodes;
  if (source == "bound") {
    eo.trace_source = TraceSource::kBound;
  } else if (source == "quadrature") {
    eo.trace_source = TraceSource::kQuadrature;
  } else {
    throw UsageError("--trace-source must be 'bound' or 'quadrature'");
  }
  eo.trajectory = c.schedule.empty() ? default_schedule(sys.box()) : ScheduleTrajectory::parse(c.schedule);
  eo.evaluation_time = t_eval;
  eo.c1 = c1;
  eo.c2 = c2;
  eo.c3 = c3;
  eo.safety_factor = safety;
  return eo;
}

int cmd_enlarge(const Globals& g, const AnalysisConfig& c, const EnlargementOptions& eo, std::ostream& out) {
  const LpvSystem sys = resolve_system(c.system);
  const EnlargementResult r = recommend_range(sys, FrequencyRange::parse(c.range), eo);
  Json j = to_json(r);
  j["provenance"] = provenance(g, "enlarge");
  write_file(out_dir(g, c), "enlarge.json", j);
  if (g.json) {
    out << j.dump(2) << '\n';
  } else {
    out << "gap^2: " << fmt(r.gap_squared, 8) << '\n';
    out << "tr W_p (grid min): " << fmt(r.trace_w_p_min, 8) << '\n';
    out << "tr W_hat_p: " << fmt(r.trace_w_hat_p, 8) << '\n';
    out << "tr W_dot_p: " << fmt(r.trace_w_dot_p, 8) << " [" << to_string(r.trace_source) << "]\n";
    out << "delta^2: " << fmt(r.delta_squared, 8) << " (" << to_string(r.mode) << ")\n";
    out << "range: " << r.original.to_string() << " -> " << r.enlarged.to_string() << '\n';
    out << "rho_unif: " << fmt(r.rho_unif, 8) << " (sup sigma_max: " << fmt(r.sigma_unif, 8) << ")\n";
    if (r.spectral_radius_shortcut) out << "no enlargement needed: cutoff above rho_unif and zero gap\n";
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  }
  return 0;
}

void write_simulation_csv(const std::string& path, const SimulationResult& r, const std::vector<FrequencyRange>& ranges) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  const std::vector<double> gamma = performance_ratio(r);
  std::vector<IqcReport> iqc;
  for (const auto& rg : ranges) iqc.push_back(iqc_value(r, frequency_weight(rg)));
  f << "t";
  for (Eigen::Index i = 0; i < r.u.cols(); ++i) f << ",u" << (i + 1);
  for (Eigen::Index i = 0; i < r.x.cols(); ++i) f << ",x" << (i + 1);
  for (Eigen::Index i = 0; i < r.x_dot.cols(); ++i) f << ",xdot" << (i + 1);
  for (Eigen::Index i = 0; i < r.y.cols(); ++i) f << ",y" << (i + 1);
  f << ",gamma_R";
  for (const auto& rg : ranges) f << ",S_" << rg.to_string();
  f << '\n';
  f << std::setprecision(12);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    f << r.times[k];
    for (Eigen::Index c = 0; c < r.u.cols(); ++c) f << ',' << r.u(i, c);
    for (Eigen::Index c = 0; c < r.x.cols(); ++c) f << ',' << r.x(i, c);
    for (Eigen::Index c = 0; c < r.x_dot.cols(); ++c) f << ',' << r.x_dot(i, c);
    for (Eigen::Index c = 0; c < r.y.cols(); ++c) f << ',' << r.y(i, c);
    f << ',';
    if (std::isfinite(gamma[k])) f << gamma[k];
    for (const auto& rep : iqc) f << ',' << rep.s_curve[k];
    f << '\n';
  }
}

int cmd_simulate(const Globals& g, const AnalysisConfig& c, const std::string& signal_spec, double lambda,
                 const std::vector<std::string>& range_specs, std::ostream& out) {
  const LpvSystem sys = resolve_system(c.system);
  const ScheduleTrajectory traj = c.schedule.empty() ? default_schedule(sys.box()) : ScheduleTrajectory::parse(c.schedule);
  const BandLimitedSignal sig = BandLimitedSignal::parse(signal_spec, lambda);
  const SimulationResult r = simulate(sys, traj, sig, c.t_end, c.step);
  std::vector<FrequencyRange> ranges = parse_ranges(range_specs.empty() ? std::vector<std::string>{c.range} : range_specs);
  const std::string dir = out_dir(g, c);
  write_simulation_csv((std::filesystem::path(dir) / "simulation.csv").string(), r, ranges);
  Json j = simulation_summary(r, ranges);
  j["signal"] = sig.to_string();
  j["schedule"] = traj.to_string();
  j["provenance"] = provenance(g, "simulate");
  write_file(dir, "simulation.json", j);
  if (g.json) {
    out << j.dump(2) << '\n';
  } else {
    out << "gamma_R(final): " << fmt(j["gamma_R_final"].get<double>(), 8) << '\n';
    for (const auto& e : j["iqc"]) {
      out << "IQC " << e["range"].get<std::string>() << ": " << fmt(e["final_value"].get<double>(), 8) << " ("
          << e["verdict"].get<std::string>() << ")\n";
    }
    out << "wrote " << (std::filesystem::path(dir) / "simulation.csv").string() << '\n';
  }
  return 0;
}

int cmd_gramians(const Globals& g, const AnalysisConfig& c, double t, bool classical, std::ostream& out) {
  const LpvSystem sys = resolve_system(c.system);
  GramianOptions go;
  go.quad_nodes = c.quad_nodes;
  go.classical_normalization = classical;
  go.time_step = c.step;
  const FrequencyRange range = FrequencyRange::parse(c.range);
  ScheduleTrajectory traj = c.schedule.empty() ? default_schedule(sys.box()) : ScheduleTrajectory::parse(c.schedule);
  if (c.frozen_p && c.schedule.empty()) {
    traj = ScheduleTrajectory::constant(
        Eigen::Map<const Vector>(c.frozen_p->data(), static_cast<Eigen::Index>(c.frozen_p->size())));
  }
  const GramianSet set = gramian_set(sys, traj, t, range, go);
  const FrozenTraceSummary fz = frozen_trace_summary(sys, range, c.grid_density, go, traj.p(t));
  Json j = to_json(set, go);
  j["schedule"] = traj.to_string();
  j["frozen_trace"] = Json{{"at_p", vector_to_json(fz.point)}, {"trace", fz.at_point},
                           {"grid_min", fz.min},          {"argmin", vector_to_json(fz.argmin)},
                           {"grid_max", fz.max},          {"argmax", vector_to_json(fz.argmax)}};
  j["provenance"] = provenance(g, "gramians");
  write_file(out_dir(g, c), "gramians.json", j);
  if (g.json) {
    out << j.dump(2) << '\n';
  } else {
    out << "range: " << range.to_string() << ", t = " << t << ", normalization: "
        << (classical ? "classical (1/2pi)" : "unit") << '\n';
    out << "tr W_p: " << fmt(set.trace_w_p, 8) << " (grid min " << fmt(fz.min, 8) << ", max " << fmt(fz.max, 8) << ")\n";
    out << "tr W_hat_p: " << fmt(set.trace_w_hat_p, 8) << '\n';
    out << "tr W_dot_p^1: " << fmt(set.trace_w_dot_p_1, 8) << '\n';
    out << "tr W_dot_p^2: " << fmt(set.trace_w_dot_p_2, 8) << '\n';
  }
  return 0;
}

int cmd_certify(const Globals& g, const AnalysisConfig& c, double c3, std::optional<double> c1,
                std::optional<double> c2, std::ostream& out) {
  const LpvSystem sys = resolve_system(c.system);
  UasOptions uo;
  uo.c1 = c1;
  uo.c2 = c2;
  const UasCertificate u = uas_certificate(sys, c3, uo);
  Json j = to_json(u);
  j["requested_c3"] = c3;
  j["provenance"] = provenance(g, "certify-uas");
  write_file(out_dir(g, c), "uas.json", j);
  if (g.json) {
    out << j.dump(2) << '\n';
  } else {
    out << "c1 = " << fmt(u.c1, 8) << ", c2 = " << fmt(u.c2, 8) << ", c3 = " << fmt(u.c3, 8) << '\n';
    out << "alpha = " << fmt(u.alpha, 8) << ", beta = " << fmt(u.beta, 8) << " 1/s\n";
    if (u.c3 < c3) out << "warning: c3 reduced from " << c3 << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce

double gamma_or_nan(const LpvSystem& sys, const FrequencyRange& r, AnalysisMode m, Json& diag, const std::string& key) {
  try {
    const GammaResult g = min_gamma(sys, r, m);
    diag[key] = Json{{"gamma_star", g.gamma_star}, {"feasible_at_zero", g.feasible_at_zero},
                     {"relaxation_gap_flag", g.relaxation_gap_flag}};
    return g.gamma_star;
  } catch (const InfeasibleError& e) {
    diag[key] = Json{{"error", e.what()}};
    return std::nan("");
  }
}

int reproduce_example1(const Globals& g, const AnalysisConfig& c, std::ostream& out) {
  const LpvSystem sys = example1_system();
  const LpvSystem consistent = example1_consistent_system();
  const FrequencyRange omega_f = FrequencyRange::low(1.0);
  Json diag = Json::object();
  std::string stage = "gamma";
  std::vector<ComparisonRow> rows;
  std::vector<Check> checks;
  try {
    const double gf = gamma_or_nan(sys, omega_f, AnalysisMode::kLpvFf, diag, "lpv_ff_published_box");
    const double ge = gamma_or_nan(sys, omega_f, AnalysisMode::kLpvEf, diag, "lpv_ef_published_box");
    const double gf_c = gamma_or_nan(consistent, omega_f, AnalysisMode::kLpvFf, diag, "lpv_ff_rate_box_pm0.2");
    const double ge_c = gamma_or_nan(consistent, omega_f, AnalysisMode::kLpvEf, diag, "lpv_ef_rate_box_pm0.2");
    rows.push_back(compare("gamma_f", gf, diag["lpv_ff_published_box"].value("feasible_at_zero", false)
                                              ? "LMI feasible at gamma = 0 on the published rate box"
                                              : ""));
    rows.push_back(compare("gamma_e", ge));

    stage = "simulation";
    const SimulationResult sim =
        simulate(sys, default_schedule(sys.box()), BandLimitedSignal::example1(), c.t_end, c.step);
    const double gamma_r = performance_ratio(sim).back();
    const IqcReport iqc = iqc_value(sim, frequency_weight(omega_f));
    diag["simulation"] = simulation_summary(sim, {omega_f});
    checks.push_back({"iqc_negative_on_low_1", iqc.verdict == IqcVerdict::kNegative,
                      "S(T) = " + fmt(iqc.final_value, 8) + " (" + to_string(iqc.verdict) + ")"});
    checks.push_back({"gamma_R_below_published_gamma_e", gamma_r < reference("gamma_e").value,
                      "gamma_R = " + fmt(gamma_r, 6) + " vs 5.2445"});
    checks.push_back({"gamma_R_below_certified_gamma_e", std::isfinite(ge_c) && gamma_r <= ge_c,
                      "gamma_R = " + fmt(gamma_r, 6) + " vs lpv_ef on rate box [-0.2, 0.2] = " + fmt(ge_c, 6)});
    diag["gamma_R_final"] = gamma_r;
    diag["lpv_ff_consistent"] = gf_c;
  } catch (const std::exception& e) {
    throw std::runtime_error("reproduce example1 failed at stage '" + stage + "': " + e.what());
  }
  Json j = Json::object();
  j["example"] = "example1";
  j["comparisons"] = to_json(rows);
  j["checks"] = checks_json(checks);
  j["diagnostics"] = diag;
  j["provenance"] = provenance(g, "reproduce example1");
  write_file(out_dir(g, c), "reproduce_example1.json", j);
  if (g.json) {
    out << j.dump(2) << '\n';
  } else {
    out << format_table(rows) << checks_text(checks);
  }
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.pass;
  for (const auto& ch : checks) ok = ok && ch.pass;
  return ok ? 0 : 2;
}

int reproduce_example2(const Globals& g, const AnalysisConfig& c, std::ostream& out) {
  const LpvSystem sys = example1_system();
  const LpvSystem consistent = example1_consistent_system();
  const FrequencyRange omega_f = FrequencyRange::low(1.0);
  Json diag = Json::object();
  std::vector<ComparisonRow> rows;
  std::vector<Check> checks;
  std::string stage = "gap";
  try {
    const double gap = gap_squared(sys, omega_f, c.grid_density);
    rows.push_back(compare("gap_squared", gap));
    const double rho = uniform_spectral_radius(sys, c.grid_density);
    const double sig = uniform_spectral_norm(sys, c.grid_density);
    rows.push_back(compare("rho_unif", rho, "sup sigma_max(A) = " + fmt(sig, 6)));

    stage = "gramians";
    GramianOptions go;
    go.quad_nodes = c.quad_nodes;
    const FrozenTraceSummary fz = frozen_trace_summary(sys, omega_f, c.grid_density, go);
    rows.push_back(compare("trace_w_p", fz.min, "grid minimum; midpoint " + fmt(fz.at_point, 6)));
    GramianOptions classical = go;
    classical.classical_normalization = true;
    diag["trace_w_p_classical_min"] = frozen_trace_summary(sys, omega_f, c.grid_density, classical).min;

    stage = "uas";
    UasOptions uo;
    uo.c1 = 0.5;
    uo.c2 = 0.6;
    const UasCertificate uas = uas_certificate(sys, 7.4, uo);
    rows.push_back(compare("uas_alpha", uas.alpha));
    rows.push_back(compare("uas_beta", uas.beta));
    checks.push_back({"uas_c_values_feasible", uas.c3 == 7.4, "c = (0.5, 0.6, " + fmt(uas.c3, 6) + ")"});

    stage = "trace_bound";
    TraceBoundOptions to;
    to.grid_density = c.grid_density;
    to.quad_nodes = c.quad_nodes;
    const ShiftedTraceBound tb = shifted_trace_bound(sys, omega_f, uas, to);
    rows.push_back(compare("trace_bound_1", tb.bound_1, "parameter-variation term"));
    rows.push_back(compare("trace_bound_2", tb.bound_2, "input-derivative term"));
    rows.push_back(compare("trace_w_dot_p", tb.bound_1 + tb.bound_2));
    diag["trace_bound"] = to_json(tb);

    stage = "delta";
    const double d2_ref = delta_squared(164.62, {0.4858, 0.0, 0.1017}, StabilityMode::kUas);
    const FrequencyRange enl_ref = enlarge_range(omega_f, d2_ref).range;
    rows.push_back(compare("delta_squared", d2_ref, "published ingredients"));
    rows.push_back(compare("enlarged_cutoff", enl_ref.low_cutoff(), "published ingredients"));
    const double d2 = delta_squared(gap, {fz.min, 0.0, tb.bound_1 + tb.bound_2}, StabilityMode::kUas);
    const FrequencyRange enl = enlarge_range(omega_f, d2).range;
    rows.push_back(compare("delta_squared", d2, "computed ingredients"));
    rows.push_back(compare("enlarged_cutoff", enl.low_cutoff(), "computed ingredients"));

    stage = "gamma";
    const FrequencyRange published_enlarged = FrequencyRange::low(reference("enlarged_cutoff").value);
    const FrequencyRange at_rho = FrequencyRange::low(reference("rho_unif").value);
    const double gfu = gamma_or_nan(sys, published_enlarged, AnalysisMode::kTheorem2, diag, "theorem2_low5.955_published_box");
    const double gnew = gamma_or_nan(sys, at_rho, AnalysisMode::kTheorem2, diag, "theorem2_low12.8306_published_box");
    rows.push_back(compare("gamma_fu", gfu,
                           diag["theorem2_low5.955_published_box"].value("feasible_at_zero", false)
                               ? "LMI feasible at gamma = 0 on the published rate box"
                               : ""));
    rows.push_back(compare("gamma_f_new", gnew));
    gamma_or_nan(consistent, published_enlarged, AnalysisMode::kTheorem2, diag, "theorem2_low5.955_rate_box_pm0.2");
    gamma_or_nan(consistent, at_rho, AnalysisMode::kTheorem2, diag, "theorem2_low12.8306_rate_box_pm0.2");
    gamma_or_nan(consistent, enl, AnalysisMode::kTheorem2, diag, "theorem2_computed_range_rate_box_pm0.2");

    stage = "simulation";
    const SimulationResult sim =
        simulate(sys, default_schedule(sys.box()), BandLimitedSignal::example1(), c.t_end, c.step);
    diag["simulation"] = simulation_summary(sim, {omega_f, published_enlarged, enl});
    const IqcReport on_f = iqc_value(sim, frequency_weight(omega_f));
    const IqcReport on_enl = iqc_value(sim, frequency_weight(published_enlarged));
    checks.push_back({"iqc_negative_on_low_1", on_f.verdict == IqcVerdict::kNegative, "S(T) = " + fmt(on_f.final_value, 8)});
    checks.push_back({"iqc_nonnegative_on_low_5.955", on_enl.verdict == IqcVerdict::kNonnegative,
                      "S(T) = " + fmt(on_enl.final_value, 8)});
  } catch (const std::exception& e) {
    throw std::runtime_error("reproduce example2 failed at stage '" + stage + "': " + e.what());
  }
  Json j = Json::object();
  j["example"] = "example2";
  j["comparisons"] = to_json(rows);
  j["checks"] = checks_json(checks);
  j["diagnostics"] = diag;
  j["provenance"] = provenance(g, "reproduce example2");
  write_file(out_dir(g, c), "reproduce_example2.json", j);
  if (g.json) {
    out << j.dump(2) << '\n';
  } else {
    out << format_table(rows) << checks_text(checks);
  }
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.pass;
  for (const auto& ch : checks) ok = ok && ch.pass;
  return ok ? 0 : 2;
}

}  // namespace

AnalysisConfig config_from_json(const Json& j, AnalysisConfig c) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  static const std::set<std::string> known = {"system",   "range",      "mode",  "bisect_tol", "verify_density",
                                              "grid_density", "quad_nodes", "schedule", "t_end", "step",
                                              "out",      "frozen_p"};
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) throw UsageError("config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("system")) c.system = j.at("system").get<std::string>();
    if (j.contains("range")) c.range = j.at("range").get<std::string>();
    if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
    if (j.contains("bisect_tol")) c.bisect_tol = j.at("bisect_tol").get<double>();
    if (j.contains("verify_density")) c.verify_density = j.at("verify_density").get<int>();
    if (j.contains("grid_density")) c.grid_density = j.at("grid_density").get<int>();
    if (j.contains("quad_nodes")) c.quad_nodes = j.at("quad_nodes").get<int>();
    if (j.contains("schedule")) c.schedule = j.at("schedule").get<std::string>();
    if (j.contains("t_end")) c.t_end = j.at("t_end").get<double>();
    if (j.contains("step")) c.step = j.at("step").get<double>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("frozen_p")) c.frozen_p = j.at("frozen_p").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  FrequencyRange::parse(c.range);
  parse_mode(c.mode);
  if (!(c.bisect_tol > 0.0)) throw UsageError("config: bisect_tol must be > 0");
  if (c.verify_density < 1 || c.grid_density < 1 || c.quad_nodes < 1) throw UsageError("config: densities must be >= 1");
  if (!(c.step > 0.0) || !(c.t_end >= 0.0)) throw UsageError("config: need step > 0 and t_end >= 0");
  return c;
}

LpvSystem resolve_system(const std::string& spec) {
  if (spec == "example1") return example1_system();
  if (!std::filesystem::exists(spec)) throw UsageError("system file '" + spec + "' does not exist");
  return load_system(spec);
}

ScheduleTrajectory default_schedule(const ParameterBox& box) {
  if (box.size() == 0) return ScheduleTrajectory::constant(Vector(0));
  return ScheduleTrajectory::sinusoid(box.midpoint(), 0.5 * (box.p_upper - box.p_lower), 4.0);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-frequency performance analysis of LTI and LPV systems"};
  app.name(args.empty() ? "ffkyp" : args.front());
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out, "Output directory")->each([&](const std::string&) { g.out_set = true; });
  app.add_option("--seed", g.seed, "Seed recorded with randomized runs");
  app.add_flag("--json", g.json, "Print JSON instead of text");
  app.add_option("--config", g.config_path, "JSON config file (AnalysisConfig keys)");

  AnalysisConfig cfg;
  std::optional<std::string> sys_opt, range_opt, mode_opt, schedule_opt;
  std::optional<double> tol_opt, t_end_opt, step_opt;
  std::optional<int> verify_opt, grid_opt, nodes_opt;
  std::vector<double> p_opt;

  auto add_system = [&](CLI::App* s) { s->add_option("--system", sys_opt, "System JSON file or 'example1'"); };
  auto add_range = [&](CLI::App* s) { s->add_option("--range", range_opt, "low:<w>, mid:<w1>:<w2>, high:<w> or entire"); };
  auto add_schedule = [&](CLI::App* s) {
    s->add_option("--schedule", schedule_opt, "const:<p>, sin:<c>:<a>:<rate>[:<phase>] or pwl:<t>=<p>,...");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Minimal gamma for one LMI family");
  add_system(analyze);
  add_range(analyze);
  analyze->add_option("--mode", mode_opt, "kyp, gkyp, lpv_ff, lpv_ef or theorem2");
  analyze->add_option("--tol", tol_opt, "Bisection tolerance");
  analyze->add_option("--verify-density", verify_opt, "Grid points per axis for certificate checks");
  analyze->add_option("--p", p_opt, "Frozen parameter for kyp/gkyp");

  CLI::App* enlarge = app.add_subcommand("enlarge", "Gap, delta^2 and the enlarged frequency range");
  std::string stability = "uas", source = "bound";
  std::optional<double> c1, c2;
  double c3 = 7.4, t_eval = 20.0, safety = 1.0;
  add_system(enlarge);
  add_range(enlarge);
  add_schedule(enlarge);
  enlarge->add_option("--stability", stability, "uas or bibs");
  enlarge->add_option("--trace-source", source, "bound or quadrature");
  enlarge->add_option("--c1", c1, "Fixed UAS c1");
  enlarge->add_option("--c2", c2, "Fixed UAS c2");
  enlarge->add_option("--c3", c3, "UAS c3");
  enlarge->add_option("--t", t_eval, "Evaluation time for time-dependent Gramians (s)");
  enlarge->add_option("--grid", grid_opt, "Grid points per parameter axis");
  enlarge->add_option("--nodes", nodes_opt, "Quadrature nodes per band");
  enlarge->add_option("--safety", safety, "Multiplier on the minimal delta^2");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Time-domain run with IQC and realized gain");
  std::string signal = "cos:1:8,cos:1:10,cos:1:20";
  double lambda = 0.0;
  std::vector<std::string> sim_ranges;
  add_system(simulate_cmd);
  add_schedule(simulate_cmd);
  simulate_cmd->add_option("--signal", signal, "cos:<amp>:<phase>[@<freq>],...");
  simulate_cmd->add_option("--lambda", lambda, "Input discount factor (1/s)");
  simulate_cmd->add_option("--t-end", t_end_opt, "Horizon (s)");
  simulate_cmd->add_option("--step", step_opt, "RK4 step (s)");
  simulate_cmd->add_option("--range", sim_ranges, "Ranges for IQC values (repeatable)");

  CLI::App* gram = app.add_subcommand("gramians", "Finite-frequency controllability Gramians");
  double gram_t = 20.0;
  bool classical = false;
  add_system(gram);
  add_range(gram);
  add_schedule(gram);
  gram->add_option("--p", p_opt, "Frozen parameter (constant schedule)");
  gram->add_option("--t", gram_t, "Evaluation time (s)");
  gram->add_option("--nodes", nodes_opt, "Quadrature nodes per band");
  gram->add_option("--step", step_opt, "Time step for transition matrices (s)");
  gram->add_flag("--classical", classical, "Include the 1/(2 pi) factor");

  CLI::App* cert = app.add_subcommand("certify-uas", "Parameter-dependent Lyapunov certificate");
  double cert_c3 = 7.4;
  std::optional<double> cert_c1, cert_c2;
  add_system(cert);
  cert->add_option("--c3", cert_c3, "Target c3");
  cert->add_option("--c1", cert_c1, "Fixed c1");
  cert->add_option("--c2", cert_c2, "Fixed c2");

  CLI::App* repro = app.add_subcommand("reproduce", "Re-run a reference example");
  std::string which;
  repro->add_option("which", which, "example1 or example2")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("ffkyp");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (!g.config_path.empty()) cfg = config_from_json(load_json(g.config_path), cfg);
    if (sys_opt) cfg.system = *sys_opt;
    if (range_opt) cfg.range = *range_opt;
    if (mode_opt) cfg.mode = *mode_opt;
    if (schedule_opt) cfg.schedule = *schedule_opt;
    if (tol_opt) cfg.bisect_tol = *tol_opt;
    if (t_end_opt) cfg.t_end = *t_end_opt;
    if (step_opt) cfg.step = *step_opt;
    if (verify_opt) cfg.verify_density = *verify_opt;
    if (grid_opt) cfg.grid_density = *grid_opt;
    if (nodes_opt) cfg.quad_nodes = *nodes_opt;
    if (!p_opt.empty()) cfg.frozen_p = p_opt;
    cfg = config_from_json(Json::object(), cfg);

    if (analyze->parsed()) return cmd_analyze(g, cfg, out);
    if (enlarge->parsed()) {
      const LpvSystem sys = resolve_system(cfg.system);
      return cmd_enlarge(g, cfg, enlargement_options(cfg, sys, stability, source, c1, c2, c3, t_eval, safety), out);
    }
    if (simulate_cmd->parsed()) return cmd_simulate(g, cfg, signal, lambda, sim_ranges, out);
    if (gram->parsed()) return cmd_gramians(g, cfg, gram_t, classical, out);
    if (cert->parsed()) return cmd_certify(g, cfg, cert_c3, cert_c1, cert_c2, out);
    if (repro->parsed()) {
      if (which == "example1") return reproduce_example1(g, cfg, out);
      if (which == "example2") return reproduce_example2(g, cfg, out);
      err << "error: unknown example '" << which << "' (expected example1 or example2)\n";
      return 1;
    }
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace ffkyp
