#include "ffkyp/enlargement.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ffkyp {

const char* to_string(StabilityMode mode) { return mode == StabilityMode::kUas ? "UAS" : "BIBS"; }

StabilityMode parse_stability_mode(const std::string& s) {
  if (s == "uas" || s == "UAS") return StabilityMode::kUas;
  if (s == "bibs" || s == "BIBS") return StabilityMode::kBibs;
  throw std::invalid_argument("unknown stability mode '" + s + "' (expected uas or bibs)");
}

const char* to_string(TraceSource source) { return source == TraceSource::kBound ? "lyapunov_bound" : "quadrature"; }

double gap_squared_at(const Matrix& A, const FrequencyRange& range) {
  const FrequencyWeight w = frequency_weight(range);
  if (w.is_zero()) return 0.0;
  const auto n = A.rows();
  const CMatrix Ac = A.cast<Complex>();
  const CMatrix I = CMatrix::Identity(n, n);
  const Eigen::Matrix2cd& psi = w.psi;
  CMatrix X = psi(0, 0) * Ac.adjoint() * Ac + psi(0, 1) * Ac.adjoint() + psi(1, 0) * Ac + psi(1, 1) * I;
  X = 0.5 * (X + X.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(-X, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

double gap_squared(const LpvSystem& system, const FrequencyRange& range, int p_grid_density) {
  double g = 0.0;
  for (const Vector& p : parameter_grid(system.box(), p_grid_density)) {
    g = std::max(g, gap_squared_at(system.A()(p), range));
  }
  return g;
}

double delta_squared(double gap_sq, const TraceInputs& traces, StabilityMode mode, double safety_factor) {
  if (!(traces.trace_w_p_min > 0.0)) throw std::invalid_argument("system not finite-frequency controllable on Ω_f");
  if (gap_sq < 0.0) throw std::invalid_argument("delta_squared: gap² must be >= 0");
  if (traces.trace_w_dot_p < 0.0 || traces.trace_w_hat_p < 0.0) throw std::invalid_argument("delta_squared: traces must be >= 0");
  if (gap_sq == 0.0) return 0.0;
  const double numer = mode == StabilityMode::kUas ? traces.trace_w_dot_p : traces.trace_w_dot_p - traces.trace_w_hat_p;
  return std::max(0.0, safety_factor * gap_sq * numer / traces.trace_w_p_min);
}

EnlargedRange enlarge_range(const FrequencyRange& range, double delta_sq) {
  if (!(delta_sq >= 0.0)) throw std::invalid_argument("enlarge_range: δ² must be >= 0");
  EnlargedRange out;
  if (delta_sq == 0.0) {
    out.range = range;
    return out;
  }
  switch (range.kind()) {
    case FrequencyRange::Kind::kLow: {
      const double wl = range.low_cutoff();
      out.range = FrequencyRange::low(std::sqrt(wl * wl + delta_sq));
      break;
    }
    case FrequencyRange::Kind::kHigh: {
      const double wh = range.high_cutoff();
      const double r = wh * wh - delta_sq;
      if (r <= 0.0) {
        out.range = FrequencyRange::entire();
        out.warnings.push_back("high-range cutoff fell below zero after enlargement; using the entire axis");
      } else {
        out.range = FrequencyRange::high(std::sqrt(r));
      }
      break;
    }
    case FrequencyRange::Kind::kMiddle: {
      const double w1 = range.band_lower();
      const double w2 = range.band_upper();
      const double c = range.center();
      const double h = 0.5 * std::sqrt((w2 - w1) * (w2 - w1) + 4.0 * delta_sq);
      if (c - h <= 0.0) {
        out.range = FrequencyRange::low(c + h);
        out.warnings.push_back("middle-range lower edge reached zero after enlargement; using a low range");
      } else {
        out.range = FrequencyRange::middle(c - h, c + h);
      }
      break;
    }
    case FrequencyRange::Kind::kEntire:
      out.range = range;
      break;
  }
  return out;
}

double uniform_spectral_radius(const LpvSystem& system, int p_grid_density) {
  double rho = 0.0;
  for (const Vector& p : parameter_grid(system.box(), p_grid_density)) {
    Eigen::EigenSolver<Matrix> es(system.A()(p), false);
    rho = std::max(rho, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return rho;
}

double uniform_spectral_norm(const LpvSystem& system, int p_grid_density) {
  double s = 0.0;
  for (const Vector& p : parameter_grid(system.box(), p_grid_density)) {
    s = std::max(s, sigma_max(system.A()(p).cast<Complex>()));
  }
  return s;
}

EnlargementResult recommend_range(const LpvSystem& system, const FrequencyRange& range,
                                  const EnlargementOptions& options) {
  EnlargementResult res;
  res.mode = options.mode;
  res.original = range;
  res.trace_source = options.trace_source;
  res.gap_squared = gap_squared(system, range, options.p_grid_density);
  res.rho_unif = uniform_spectral_radius(system, options.p_grid_density);
  res.sigma_unif = uniform_spectral_norm(system, options.p_grid_density);

  if (res.gap_squared == 0.0) {
    res.spectral_radius_shortcut = range.kind() == FrequencyRange::Kind::kLow && range.low_cutoff() >= res.rho_unif;
    res.enlarged = range;
    return res;
  }
  if (range.kind() == FrequencyRange::Kind::kLow && range.low_cutoff() >= res.rho_unif) {
    res.warnings.push_back("cutoff exceeds the uniform spectral radius but the gap is nonzero (non-normal A)");
  }

  const FrozenTraceSummary fz = frozen_trace_summary(system, range, options.p_grid_density, options.gramian);
  res.trace_w_p_min = fz.min;

  const ScheduleTrajectory traj =
      options.trajectory ? *options.trajectory : ScheduleTrajectory::constant(system.box().midpoint());
  if (options.mode == StabilityMode::kBibs) {
    res.trace_w_hat_p = gramian_lpv_weighted(system, traj, options.evaluation_time, range, options.gramian).trace();
  }

  if (system.is_lti()) {
    res.trace_w_dot_p = 0.0;
  } else if (options.trace_source == TraceSource::kBound) {
    UasOptions uo;
    uo.c1 = options.c1;
    uo.c2 = options.c2;
    res.uas = uas_certificate(system, options.c3, uo);
    if (res.uas->c3 < options.c3) res.warnings.push_back("UAS certificate needed a smaller c3 than requested");
    res.trace_bound = shifted_trace_bound(system, range, *res.uas, options.bound);
    res.trace_w_dot_p = res.trace_bound->bound_1 + res.trace_bound->bound_2;
  } else {
    const ShiftedGramians sh = gramian_lpv_shifted(system, traj, options.evaluation_time, range, options.gramian);
    res.trace_w_dot_p = sh.w1.trace() + sh.w2.trace();
  }

  res.delta_squared = delta_squared(res.gap_squared, {res.trace_w_p_min, res.trace_w_hat_p, res.trace_w_dot_p},
                                    options.mode, options.safety_factor);
  EnlargedRange er = enlarge_range(range, res.delta_squared);
  res.enlarged = er.range;
  res.warnings.insert(res.warnings.end(), er.warnings.begin(), er.warnings.end());
  return res;
}

}  // namespace ffkyp
