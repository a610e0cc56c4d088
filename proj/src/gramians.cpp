#include "ffkyp/gramians.hpp"

#include "ffkyp/quadrature.hpp"
#include "ffkyp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ffkyp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double normalization(const GramianOptions& o) { return o.classical_normalization ? 0.5 / std::numbers::pi : 1.0; }

// Re(V V^*) for complex V.
Matrix outer_real(const CMatrix& V) {
  const Matrix re = V.real();
  const Matrix im = V.imag();
  return re * re.transpose() + im * im.transpose();
}

Matrix symmetrize(const Matrix& M) { return 0.5 * (M + M.transpose()); }

// Frequency integral of V(ω)V(ω)^* over the range for a real-data V with
// V(-ω) = conj(V(ω)).
template <typename VFn>
Matrix frequency_integral(const FrequencyRange& range, const GramianOptions& o, const Matrix& A, VFn v_of) {
  const int n = static_cast<int>(A.rows());
  const QuadratureRule rule = frequency_rule(range, o.quad_nodes, resonance_breakpoints(A));
  std::vector<Matrix> terms;
  terms.reserve(rule.nodes.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    terms.push_back(2.0 * rule.weights[k] * outer_real(v_of(rule.nodes[k])));
  }
  if (terms.empty()) return Matrix::Zero(n, n);
  return symmetrize(normalization(o) * pairwise_sum(terms));
}

int steps_for(double span, double step) {
  require(step > 0.0, "time step must be > 0");
  require(span >= 0.0, "time interval must be non-negative");
  if (span == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(span / step - 1e-9)));
}

std::vector<double> trapezoid_weights(int steps, double h) {
  std::vector<double> w(static_cast<std::size_t>(steps + 1), h);
  if (steps == 0) {
    w[0] = 0.0;
    return w;
  }
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

}  // namespace

StateTransition state_transition(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t0,
                                 double t_end, double step) {
  require(trajectory.size() == system.num_params(), "state_transition: trajectory/system parameter mismatch");
  const int N = steps_for(t_end - t0, step);
  const double h = N == 0 ? 0.0 : (t_end - t0) / N;
  const auto n = system.states();
  auto A = [&](double t) { return system.A()(trajectory.p(t)); };

  StateTransition st;
  st.box_excursion = system.num_params() == 0 ? 0.0 : trajectory.box_excursion(system.box(), t_end, 2000, false);
  Matrix phi = Matrix::Identity(n, n);
  st.times.push_back(t0);
  st.phi.push_back(phi);
  for (int k = 0; k < N; ++k) {
    const double t = t0 + k * h;
    const Matrix Am = A(t + 0.5 * h);
    const Matrix k1 = A(t) * phi;
    const Matrix k2 = Am * (phi + 0.5 * h * k1);
    const Matrix k3 = Am * (phi + 0.5 * h * k2);
    const Matrix k4 = A(t + h) * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    st.times.push_back(t0 + (k + 1) * h);
    st.phi.push_back(phi);
  }
  return st;
}

StateTransition backward_transition(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                                    double step) {
  require(trajectory.size() == system.num_params(), "backward_transition: trajectory/system parameter mismatch");
  const int N = steps_for(t, step);
  const double h = N == 0 ? 0.0 : t / N;
  const auto n = system.states();
  auto A = [&](double s) { return system.A()(trajectory.p(t - s)); };

  std::vector<Matrix> phis{Matrix::Identity(n, n)};
  Matrix phi = phis.front();
  for (int k = 0; k < N; ++k) {
    const double s = k * h;
    const Matrix Am = A(s + 0.5 * h);
    const Matrix k1 = phi * A(s);
    const Matrix k2 = (phi + 0.5 * h * k1) * Am;
    const Matrix k3 = (phi + 0.5 * h * k2) * Am;
    const Matrix k4 = (phi + h * k3) * A(s + h);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    phis.push_back(phi);
  }
  StateTransition st;
  st.phi.assign(phis.rbegin(), phis.rend());
  for (int k = 0; k <= N; ++k) st.times.push_back(k * h);
  st.box_excursion = system.num_params() == 0 ? 0.0 : trajectory.box_excursion(system.box(), t, 2000, false);
  return st;
}

Matrix gramian_lti_ff(const Matrix& A, const Matrix& B, const FrequencyRange& range, const GramianOptions& options) {
  require(A.rows() == A.cols() && B.rows() == A.rows(), "gramian: A/B dimension mismatch");
  const CMatrix Bc = B.cast<Complex>();
  return frequency_integral(range, options, A, [&](double w) { return resolvent_times(A, w, Bc); });
}

Matrix gramian_lpv_frozen(const LpvSystem& system, const Vector& p, const FrequencyRange& range,
                          const GramianOptions& options) {
  const StateSpace ss = system.frozen(p);
  return gramian_lti_ff(ss.A, ss.B, range, options);
}

Matrix gramian_lpv_weighted(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                            const FrequencyRange& range, const GramianOptions& options) {
  require(t >= 0.0, "gramian_lpv_weighted: t must be >= 0");
  const Matrix At = system.A()(trajectory.p(t));
  const CMatrix B0 = system.B()(trajectory.p(0.0)).cast<Complex>();
  const Matrix inner = frequency_integral(range, options, At, [&](double w) { return resolvent_times(At, w, B0); });
  const Matrix phi = t == 0.0 ? Matrix::Identity(At.rows(), At.cols())
                              : state_transition(system, trajectory, 0.0, t, options.time_step).phi.back();
  return symmetrize(phi * inner * phi.transpose());
}

ShiftedGramians gramian_lpv_shifted(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                                    const FrequencyRange& range, const GramianOptions& options) {
  require(t >= 0.0, "gramian_lpv_shifted: t must be >= 0");
  const auto n = system.states();
  const StateTransition bt = backward_transition(system, trajectory, t, options.time_step);
  const int N = static_cast<int>(bt.times.size()) - 1;
  const double h = N == 0 ? 0.0 : t / N;
  const std::vector<double> tw = trapezoid_weights(N, h);
  const Matrix At = system.A()(trajectory.p(t));

  std::vector<Matrix> g1(static_cast<std::size_t>(N + 1));
  std::vector<Matrix> b(static_cast<std::size_t>(N + 1));
  std::vector<Matrix> bdot(static_cast<std::size_t>(N + 1));
  for (int k = 0; k <= N; ++k) {
    const double tau = bt.times[static_cast<std::size_t>(k)];
    const Vector pk = trajectory.p(tau);
    const std::size_t i = static_cast<std::size_t>(k);
    g1[i] = bt.phi[i] * (At - system.A()(pk));
    b[i] = system.B()(pk);
    bdot[i] = system.B().rate(trajectory.pdot(tau));
  }
  const CMatrix I = CMatrix::Identity(n, n);
  auto v_pair = [&](double w) {
    const CMatrix R = resolvent_times(At, w, I);
    CMatrix v1 = CMatrix::Zero(n, system.inputs());
    CMatrix v2 = CMatrix::Zero(n, system.inputs());
    for (int k = 0; k <= N; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      const Complex e = tw[i] * std::exp(Complex(0.0, w * bt.times[i]));
      const CMatrix Rb = R * b[i].cast<Complex>();
      v1 -= e * (g1[i].cast<Complex>() * Rb);
      v2 -= e * (bt.phi[i].cast<Complex>() * (R * bdot[i].cast<Complex>()));
    }
    return std::make_pair(v1, v2);
  };

  const QuadratureRule rule = frequency_rule(range, options.quad_nodes, resonance_breakpoints(At));
  std::vector<Matrix> t1, t2;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const auto [v1, v2] = v_pair(rule.nodes[k]);
    t1.push_back(2.0 * rule.weights[k] * outer_real(v1));
    t2.push_back(2.0 * rule.weights[k] * outer_real(v2));
  }
  ShiftedGramians out;
  const double c = normalization(options);
  out.w1 = t1.empty() ? Matrix::Zero(n, n) : symmetrize(c * pairwise_sum(t1));
  out.w2 = t2.empty() ? Matrix::Zero(n, n) : symmetrize(c * pairwise_sum(t2));
  return out;
}

FrozenTraceSummary frozen_trace_summary(const LpvSystem& system, const FrequencyRange& range, int grid_density,
                                        const GramianOptions& options, std::optional<Vector> point) {
  FrozenTraceSummary s;
  s.point = point ? *point : system.box().midpoint();
  s.at_point = gramian_lpv_frozen(system, s.point, range, options).trace();
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (const Vector& p : parameter_grid(system.box(), grid_density)) {
    const double tr = gramian_lpv_frozen(system, p, range, options).trace();
    if (tr < s.min) {
      s.min = tr;
      s.argmin = p;
    }
    if (tr > s.max) {
      s.max = tr;
      s.argmax = p;
    }
  }
  return s;
}

GramianSet gramian_set(const LpvSystem& system, const ScheduleTrajectory& trajectory, double t,
                       const FrequencyRange& range, const GramianOptions& options) {
  GramianSet g;
  g.range = range;
  g.time = t;
  g.w_p = gramian_lpv_frozen(system, trajectory.p(t), range, options);
  g.w_hat_p = gramian_lpv_weighted(system, trajectory, t, range, options);
  const ShiftedGramians sh = gramian_lpv_shifted(system, trajectory, t, range, options);
  g.w_dot_p_1 = sh.w1;
  g.w_dot_p_2 = sh.w2;
  g.trace_w_p = g.w_p.trace();
  g.trace_w_hat_p = g.w_hat_p.trace();
  g.trace_w_dot_p_1 = g.w_dot_p_1.trace();
  g.trace_w_dot_p_2 = g.w_dot_p_2.trace();
  return g;
}

const char* to_string(TraceBoundMethod method) {
  return method == TraceBoundMethod::kUasDecay ? "uas_decay" : "lyapunov_lmi";
}

namespace {

std::vector<double> bound_frequencies(const FrequencyRange& range, int nodes) {
  std::vector<double> ws = frequency_rule(range, nodes).nodes;
  for (const auto& [a, b] : range.positive_bands()) {
    ws.push_back(a);
    if (std::isfinite(b)) ws.push_back(b);
  }
  return ws;
}

// min tr X s.t. (A(p)+sI) X + X (A(p)+sI)^T + m I <= 0 at the p-vertices.
double lyapunov_trace_bound(const LpvSystem& system, double m, double shift) {
  if (m == 0.0) return 0.0;
  const int n = static_cast<int>(system.states());
  const int sym = sym_dim(n);
  const Matrix I = Matrix::Identity(n, n);
  auto build = [&](std::optional<double> cap) {
    AffineSymmetricForm form(sym);
    for (const Vector& p : parameter_vertices(system.box())) {
      const Matrix As = system.A()(p) + shift * I;
      std::vector<std::pair<int, Matrix>> terms;
      for (int c = 0; c < sym; ++c) {
        const Matrix E = sym_basis(n, c);
        terms.emplace_back(c, -(As * E + E * As.transpose()));
      }
      form.add_block(-m * I, terms);
    }
    std::vector<std::pair<int, Matrix>> pos;
    for (int c = 0; c < sym; ++c) pos.emplace_back(c, sym_basis(n, c));
    form.add_block(Matrix::Zero(n, n), pos);
    if (cap) {
      std::vector<std::pair<int, Matrix>> tr;
      for (int i = 0; i < n; ++i) tr.emplace_back(sym_index(n, i, i), -Matrix::Ones(1, 1));
      form.add_block(Matrix::Constant(1, 1, *cap), tr);
    }
    return form;
  };
  auto solve = [&](std::optional<double> cap, const std::optional<Vector>& warm) {
    const AffineSymmetricForm form = build(cap);
    SolverOptions so;
    so.margin = 1e-9 * form.scale();
    so.warm_start = warm;
    return solve_feasibility(form, so);
  };
  FeasibilityResult fr = solve(std::nullopt, std::nullopt);
  if (!fr.feasible) return std::numeric_limits<double>::quiet_NaN();
  double hi = sym_from_vector(n, fr.x).trace();
  double lo = 0.0;
  Vector best = fr.x;
  for (int i = 0; i < 40 && hi - lo > 1e-5 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    FeasibilityResult t = solve(mid, best);
    if (t.feasible) {
      hi = sym_from_vector(n, t.x).trace();
      best = t.x;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

ShiftedTraceBound shifted_trace_bound(const LpvSystem& system, const FrequencyRange& range, const UasCertificate& uas,
                                      const TraceBoundOptions& options) {
  require(uas.c1 > 0.0 && uas.c2 >= uas.c1 && uas.c3 > 0.0, "shifted_trace_bound: invalid UAS certificate");
  const auto n = system.states();
  const std::vector<double> ws = bound_frequencies(range, options.quad_nodes);
  const std::vector<Vector> grid = parameter_grid(system.box(), options.grid_density);
  std::vector<Vector> rates;
  for (const auto& v : box_vertices(system.box())) rates.push_back(v.rate);

  double m1 = 0.0, m2 = 0.0;
  const CMatrix I = CMatrix::Identity(n, n);
  for (const Vector& pt : grid) {
    const Matrix At = system.A()(pt);
    std::vector<double> ws_pt = ws;
    for (double w : resonance_breakpoints(At)) {
      if (range.contains(w)) ws_pt.push_back(w);
    }
    for (double w : ws_pt) {
      const CMatrix R = resolvent_times(At, w, I);
      for (const Vector& ptau : grid) {
        const Matrix dA = At - system.A()(ptau);
        if (dA.cwiseAbs().maxCoeff() == 0.0) continue;
        const double s = sigma_max(dA.cast<Complex>() * R * system.B()(ptau).cast<Complex>());
        m1 = std::max(m1, s * s);
      }
      for (const Vector& r : rates) {
        const Matrix bd = system.B().rate(r);
        if (bd.cwiseAbs().maxCoeff() == 0.0) continue;
        const double s = sigma_max(R * bd.cast<Complex>());
        m2 = std::max(m2, s * s);
      }
    }
  }

  ShiftedTraceBound out;
  out.method = options.method;
  out.m_1 = m1;
  out.m_2 = m2;
  out.m_bar_1 = m1 * Matrix::Identity(n, n);
  out.m_bar_2 = m2 * Matrix::Identity(n, n);
  const double k = uas.alpha * uas.alpha / (2.0 * uas.beta);
  out.uas_bound_1 = k * m1;
  out.uas_bound_2 = k * m2;
  out.lmi_bound_1 = lyapunov_trace_bound(system, m1, options.lyapunov_shift);
  out.lmi_bound_2 = lyapunov_trace_bound(system, m2, options.lyapunov_shift);
  if (options.method == TraceBoundMethod::kUasDecay) {
    out.bound_1 = out.uas_bound_1;
    out.bound_2 = out.uas_bound_2;
  } else {
    if (std::isnan(out.lmi_bound_1) || std::isnan(out.lmi_bound_2)) {
      throw InfeasibleError("Lyapunov trace-bound LMIs are infeasible; try a larger c3 or a smaller frequency range");
    }
    out.bound_1 = out.lmi_bound_1;
    out.bound_2 = out.lmi_bound_2;
  }
  return out;
}

}  // namespace ffkyp
