#include "ffkyp/reports.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ffkyp {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json sym_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return vector_to_json(es.eigenvalues());
}

}  // namespace

Json to_json(const FrequencyRange& range) {
  Json j = Json::object();
  j["spec"] = range.to_string();
  j["kind"] = to_string(range.kind());
  switch (range.kind()) {
    case FrequencyRange::Kind::kLow:
      j["cutoff"] = range.low_cutoff();
      break;
    case FrequencyRange::Kind::kMiddle:
      j["lower"] = range.band_lower();
      j["upper"] = range.band_upper();
      break;
    case FrequencyRange::Kind::kHigh:
      j["cutoff"] = range.high_cutoff();
      break;
    case FrequencyRange::Kind::kEntire:
      break;
  }
  return j;
}

Json to_json(const GammaResult& r) {
  Json j = Json::object();
  j["mode"] = to_string(r.mode);
  j["range"] = to_json(r.range);
  j["gamma_star"] = r.gamma_star;
  j["bracket"] = Json::array({r.bracket_lower, r.bracket_upper});
  j["feasible_at_zero"] = r.feasible_at_zero;
  j["conditional"] = r.mode == AnalysisMode::kLpvFf;
  j["relaxation_gap_flag"] = r.relaxation_gap_flag;
  j["controllable"] = r.controllable;
  Json p = Json::array();
  Json q = Json::array();
  if (r.certificate.size() == r.layout.num_vars()) {
    for (int i = 0; i < r.layout.p_count; ++i) p.push_back(matrix_to_json(r.layout.p_matrix(r.certificate, i)));
    for (int i = 0; i < r.layout.q_count; ++i) q.push_back(matrix_to_json(r.layout.q_matrix(r.certificate, i)));
  }
  j["P"] = p;
  j["Q"] = q;
  Json trace = Json::array();
  for (const auto& [g, ok] : r.bisection_trace) trace.push_back(Json{{"gamma", g}, {"feasible", ok}});
  j["bisection_trace"] = trace;
  Json viol = Json::array();
  for (const auto& v : r.violations) {
    viol.push_back(Json{{"p", vector_to_json(v.p)}, {"rate", vector_to_json(v.rate)}, {"max_eig", v.max_eig}});
  }
  j["grid_violations"] = viol;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const UasCertificate& c) {
  Json j = Json::object();
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["c3"] = c.c3;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  Json ps = Json::array();
  for (const Matrix& m : c.ps) ps.push_back(matrix_to_json(m));
  j["P_s"] = ps;
  j["achieved_margin"] = c.achieved_margin;
  return j;
}

Json to_json(const ShiftedTraceBound& b) {
  Json j = Json::object();
  j["method"] = to_string(b.method);
  j["bound_1"] = number_or_null(b.bound_1);
  j["bound_2"] = number_or_null(b.bound_2);
  j["m_1"] = b.m_1;
  j["m_2"] = b.m_2;
  j["uas_bound_1"] = b.uas_bound_1;
  j["uas_bound_2"] = b.uas_bound_2;
  j["lmi_bound_1"] = number_or_null(b.lmi_bound_1);
  j["lmi_bound_2"] = number_or_null(b.lmi_bound_2);
  return j;
}

Json to_json(const EnlargementResult& r) {
  Json j = Json::object();
  j["mode"] = to_string(r.mode);
  j["original"] = to_json(r.original);
  j["enlarged"] = to_json(r.enlarged);
  j["gap_squared"] = r.gap_squared;
  j["delta_squared"] = r.delta_squared;
  j["trace_W_p_min"] = r.trace_w_p_min;
  j["trace_W_hat_p"] = r.trace_w_hat_p;
  j["trace_W_dot_p"] = r.trace_w_dot_p;
  j["trace_source"] = to_string(r.trace_source);
  j["rho_unif"] = r.rho_unif;
  j["sigma_unif"] = r.sigma_unif;
  j["spectral_radius_shortcut"] = r.spectral_radius_shortcut;
  j["uas"] = r.uas ? to_json(*r.uas) : Json(nullptr);
  j["trace_bound"] = r.trace_bound ? to_json(*r.trace_bound) : Json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const GramianSet& g, const GramianOptions& o) {
  Json j = Json::object();
  j["range"] = to_json(g.range);
  j["time"] = g.time;
  j["normalization"] = o.classical_normalization ? "classical_1_over_2pi" : "unit";
  j["quad_nodes"] = o.quad_nodes;
  j["time_step"] = o.time_step;
  auto entry = [&](const Matrix& m, double tr) {
    return Json{{"trace", tr}, {"eigenvalues", sym_eigenvalues(m)}, {"matrix", matrix_to_json(m)}};
  };
  j["W_p"] = entry(g.w_p, g.trace_w_p);
  j["W_hat_p"] = entry(g.w_hat_p, g.trace_w_hat_p);
  j["W_dot_p_1"] = entry(g.w_dot_p_1, g.trace_w_dot_p_1);
  j["W_dot_p_2"] = entry(g.w_dot_p_2, g.trace_w_dot_p_2);
  return j;
}

Json simulation_summary(const SimulationResult& result, const std::vector<FrequencyRange>& ranges) {
  Json j = Json::object();
  j["t_end"] = result.times.empty() ? 0.0 : result.times.back();
  j["step"] = result.step;
  j["samples"] = result.times.size();
  const std::vector<double> g = performance_ratio(result);
  j["gamma_R_final"] = g.back();
  Json iqc = Json::array();
  for (const auto& r : ranges) {
    const IqcReport rep = iqc_value(result, frequency_weight(r));
    iqc.push_back(Json{{"range", r.to_string()},
                       {"final_value", rep.final_value},
                       {"tolerance", rep.tolerance},
                       {"verdict", to_string(rep.verdict)}});
  }
  j["iqc"] = iqc;
  return j;
}

const std::vector<ReferenceValue>& reference_values() {
  static const std::vector<ReferenceValue> table = {
      {"gap_squared", 164.62, 0.02, "gap² on [-1, 1]"},
      {"rho_unif", 12.8306, 0.01, "uniform spectral radius"},
      {"trace_w_p", 0.4858, 0.05, "tr W_p on [-1, 1]"},
      {"trace_bound_1", 0.075351, 0.10, "shifted trace bound 1"},
      {"trace_bound_2", 0.026327, 0.10, "shifted trace bound 2"},
      {"trace_w_dot_p", 0.1017, 0.10, "tr W_ṗ (sum of bounds)"},
      {"delta_squared", 34.4624, 0.005, "δ²"},
      {"enlarged_cutoff", 5.955, 0.001, "enlarged low cutoff"},
      {"uas_alpha", 1.2, 1e-3, "α = c2/c1"},
      {"uas_beta", 6.1667, 1e-3, "β = c3/(2 c2)"},
      {"gamma_f", 3.7767, 0.05, "γ lpv_ff on [-1, 1]"},
      {"gamma_e", 5.2445, 0.05, "γ lpv_ef"},
      {"gamma_fu", 5.0313, 0.05, "γ theorem2 on the enlarged range"},
      {"gamma_f_new", 5.0313, 0.05, "γ theorem2 with cutoff ρ_unif"},
  };
  return table;
}

const ReferenceValue& reference(const std::string& key) {
  for (const auto& r : reference_values()) {
    if (r.key == key) return r;
  }
  throw std::out_of_range("no reference value '" + key + "'");
}

bool within_band(const ReferenceValue& ref, double computed) {
  return std::isfinite(computed) && std::abs(computed - ref.value) <= ref.rel_tol * std::abs(ref.value);
}

ComparisonRow compare(const std::string& key, double computed, const std::string& note) {
  const ReferenceValue& ref = reference(key);
  return {ref.key, ref.label, ref.value, computed, ref.rel_tol, within_band(ref, computed), note};
}

Json to_json(const std::vector<ComparisonRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back(Json{{"key", r.key},
                     {"label", r.label},
                     {"reference", r.reference},
                     {"computed", number_or_null(r.computed)},
                     {"rel_tol", r.rel_tol},
                     {"pass", r.pass},
                     {"note", r.note}});
  }
  return a;
}

std::string format_table(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "quantity" << std::right << std::setw(12) << "reference" << std::setw(14)
     << "computed" << std::setw(9) << "band" << "  result\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(18) << r.key << std::right << std::setw(12) << std::setprecision(6) << r.reference
       << std::setw(14) << std::setprecision(6) << r.computed << std::setw(8) << std::setprecision(3)
       << 100.0 * r.rel_tol << "%  " << (r.pass ? "PASS" : "FAIL");
    if (!r.note.empty()) os << "  (" << r.note << ")";
    os << '\n';
  }
  return os.str();
}

}  // namespace ffkyp
