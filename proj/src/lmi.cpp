#include "ffkyp/lmi.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ffkyp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool is_ff_mode(AnalysisMode m) { return m == AnalysisMode::kGkyp || m == AnalysisMode::kLpvFf || m == AnalysisMode::kTheorem2; }
bool is_frozen_mode(AnalysisMode m) { return m == AnalysisMode::kKyp || m == AnalysisMode::kGkyp; }

Matrix emit(const CMatrix& H, bool complex_form) {
  return complex_form ? real_embedding(H) : Matrix(H.real());
}

// -L(x) at one (p, pdot), with
// L = M^T (Θ⊗P + Θ_d⊗Pdot + Ψ⊗Q) M + N^T Π N.
void add_performance_block(AffineSymmetricForm& form, const DecisionLayout& lay, const StateSpace& ss,
                           const Vector& p, const Vector& rate, const FrequencyWeight& w, const Matrix& pi) {
  const Eigen::Index n = ss.A.rows();
  const Eigen::Index m = ss.B.cols();
  const Eigen::Index q = ss.C.rows();
  require(ss.A.cols() == n && ss.B.rows() == n && ss.C.cols() == n && ss.D.rows() == q && ss.D.cols() == m,
          "LMI assembly: state-space dimension mismatch");
  require(pi.rows() == q + m && pi.cols() == q + m, "LMI assembly: performance index must be (q+m) x (q+m)");
  require(n == lay.n, "LMI assembly: layout/state dimension mismatch");
  const Eigen::Index k = n + m;
  const bool cplx = !w.is_real();

  Matrix M1(n, k), M2 = Matrix::Zero(n, k);
  M1 << ss.A, ss.B;
  M2.leftCols(n).setIdentity();
  Matrix N = Matrix::Zero(q + m, k);
  N.topLeftCorner(q, n) = ss.C;
  N.topRightCorner(q, m) = ss.D;
  N.bottomRightCorner(m, m).setIdentity();

  const CMatrix L0 = (N.transpose() * pi * N).cast<Complex>();
  std::vector<std::pair<int, Matrix>> terms;
  for (int j = 0; j < lay.p_count; ++j) {
    const double wp = j == 0 ? 1.0 : p(j - 1);
    const double wr = j == 0 ? 0.0 : rate(j - 1);
    if (wp == 0.0 && wr == 0.0) continue;
    for (int c = 0; c < lay.sym; ++c) {
      const Matrix E = sym_basis(static_cast<int>(n), c);
      const Matrix T = wp * (M1.transpose() * E * M2 + M2.transpose() * E * M1) + wr * (M2.transpose() * E * M2);
      terms.emplace_back(lay.p_var(j, c), emit(-T.cast<Complex>(), cplx));
    }
  }
  const Eigen::Matrix2cd& psi = w.psi;
  for (int j = 0; j < lay.q_count; ++j) {
    const double wq = j == 0 ? 1.0 : p(j - 1);
    if (wq == 0.0) continue;
    for (int c = 0; c < lay.sym; ++c) {
      const CMatrix E = sym_basis(static_cast<int>(n), c).cast<Complex>();
      const CMatrix C1 = M1.cast<Complex>(), C2 = M2.cast<Complex>();
      const CMatrix T = wq * (psi(0, 0) * C1.transpose() * E * C1 + psi(0, 1) * C1.transpose() * E * C2 +
                              psi(1, 0) * C2.transpose() * E * C1 + psi(1, 1) * C2.transpose() * E * C2);
      terms.emplace_back(lay.q_var(j, c), emit(-T, cplx));
    }
  }
  form.add_block(emit(-L0, cplx), terms);
}

// X(p) >= 0 for an affine symmetric unknown stored at `var(j, c)`.
template <typename VarFn>
void add_affine_psd_block(AffineSymmetricForm& form, int n, int count, int sym, const Vector& p, VarFn var) {
  std::vector<std::pair<int, Matrix>> terms;
  for (int j = 0; j < count; ++j) {
    const double wj = j == 0 ? 1.0 : p(j - 1);
    if (wj == 0.0) continue;
    for (int c = 0; c < sym; ++c) terms.emplace_back(var(j, c), wj * sym_basis(n, c));
  }
  form.add_block(Matrix::Zero(n, n), terms);
}

void add_positivity_blocks(AffineSymmetricForm& form, const LmiProblem& pr, const Vector& p) {
  const DecisionLayout& lay = pr.layout;
  switch (pr.mode) {
    case AnalysisMode::kKyp:
      break;
    case AnalysisMode::kGkyp:
    case AnalysisMode::kLpvFf:
    case AnalysisMode::kTheorem2:
      if (lay.q_count > 0) {
        add_affine_psd_block(form, lay.n, lay.q_count, lay.sym, p, [&](int j, int c) { return lay.q_var(j, c); });
      }
      break;
    case AnalysisMode::kLpvEf:
      add_affine_psd_block(form, lay.n, lay.p_count, lay.sym, p, [&](int j, int c) { return lay.p_var(j, c); });
      break;
  }
}

StateSpace state_space_at(const LmiProblem& pr, const Vector& p) {
  return is_frozen_mode(pr.mode) ? pr.system.frozen(pr.frozen_p) : pr.system.frozen(p);
}

Vector layout_p(const LmiProblem& pr, const Vector& p) {
  return pr.layout.num_params == 0 ? Vector(0) : p;
}

std::vector<Vector> unique_parameter_points(const std::vector<VertexPair>& vs) {
  std::vector<Vector> out;
  for (const auto& v : vs) {
    bool seen = false;
    for (const auto& u : out) {
      if (u.size() == v.p.size() && (u - v.p).cwiseAbs().maxCoeff() == 0.0) seen = true;
    }
    if (!seen) out.push_back(v.p);
  }
  return out;
}

}  // namespace

const char* to_string(AnalysisMode mode) {
  switch (mode) {
    case AnalysisMode::kKyp: return "kyp";
    case AnalysisMode::kGkyp: return "gkyp";
    case AnalysisMode::kLpvFf: return "lpv_ff";
    case AnalysisMode::kLpvEf: return "lpv_ef";
    case AnalysisMode::kTheorem2: return "theorem2";
  }
  return "?";
}

AnalysisMode parse_mode(const std::string& s) {
  for (AnalysisMode m : {AnalysisMode::kKyp, AnalysisMode::kGkyp, AnalysisMode::kLpvFf, AnalysisMode::kLpvEf,
                         AnalysisMode::kTheorem2}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown analysis mode '" + s + "' (expected kyp, gkyp, lpv_ff, lpv_ef, theorem2)");
}

DecisionLayout DecisionLayout::for_mode(AnalysisMode mode, int n, int num_params, bool weight_is_zero) {
  DecisionLayout lay;
  lay.n = n;
  lay.num_params = is_frozen_mode(mode) ? 0 : num_params;
  lay.sym = sym_dim(n);
  lay.p_count = 1 + lay.num_params;
  if (!is_ff_mode(mode) || weight_is_zero) {
    lay.q_count = 0;
  } else if (mode == AnalysisMode::kTheorem2) {
    lay.q_count = 1 + lay.num_params;
  } else {
    lay.q_count = 1;
  }
  return lay;
}

Matrix DecisionLayout::p_matrix(const Vector& x, int matrix) const {
  return sym_from_vector(n, x.segment(p_var(matrix, 0), sym));
}

Matrix DecisionLayout::q_matrix(const Vector& x, int matrix) const {
  return sym_from_vector(n, x.segment(q_var(matrix, 0), sym));
}

Matrix DecisionLayout::p_at(const Vector& x, const Vector& p) const {
  Matrix P = p_matrix(x, 0);
  for (int i = 1; i < p_count; ++i) P += p(i - 1) * p_matrix(x, i);
  return P;
}

Matrix DecisionLayout::p_rate(const Vector& x, const Vector& pdot) const {
  Matrix P = Matrix::Zero(n, n);
  for (int i = 1; i < p_count; ++i) P += pdot(i - 1) * p_matrix(x, i);
  return P;
}

Matrix DecisionLayout::q_at(const Vector& x, const Vector& p) const {
  if (q_count == 0) return Matrix::Zero(n, n);
  Matrix Q = q_matrix(x, 0);
  for (int i = 1; i < q_count; ++i) Q += p(i - 1) * q_matrix(x, i);
  return Q;
}

LmiProblem make_problem(const LpvSystem& system, const FrequencyRange& range, AnalysisMode mode,
                        const PerformanceIndex& pi, std::optional<Vector> frozen_p) {
  LmiProblem pr;
  pr.system = system;
  pr.range = is_ff_mode(mode) ? range : FrequencyRange::entire();
  pr.mode = mode;
  pr.pi = pi;
  const FrequencyWeight w = frequency_weight(pr.range);
  pr.layout = DecisionLayout::for_mode(mode, static_cast<int>(system.states()), static_cast<int>(system.num_params()),
                                       w.is_zero());
  if (is_frozen_mode(mode)) {
    pr.frozen_p = frozen_p ? *frozen_p : system.box().midpoint();
    require(static_cast<std::size_t>(pr.frozen_p.size()) == system.num_params(), "frozen parameter has wrong length");
    pr.vertices = {VertexPair{pr.frozen_p, Vector::Zero(pr.frozen_p.size())}};
  } else {
    pr.vertices = box_vertices(system.box());
  }
  return pr;
}

AffineSymmetricForm assemble_at(const LmiProblem& pr, const VertexPair& point) {
  AffineSymmetricForm form(pr.layout.num_vars());
  const FrequencyWeight w = frequency_weight(pr.range);
  add_performance_block(form, pr.layout, state_space_at(pr, point.p), layout_p(pr, point.p), layout_p(pr, point.rate),
                        w, pr.pi.pi);
  add_positivity_blocks(form, pr, layout_p(pr, point.p));
  return form;
}

AffineSymmetricForm assemble(const LmiProblem& pr) {
  AffineSymmetricForm form(pr.layout.num_vars());
  const FrequencyWeight w = frequency_weight(pr.range);
  for (const auto& v : pr.vertices) {
    if (!is_frozen_mode(pr.mode)) {
      require(pr.system.box().contains(v.p) && pr.system.box().contains_rate(v.rate), "LMI vertex outside parameter box");
    }
    add_performance_block(form, pr.layout, state_space_at(pr, v.p), layout_p(pr, v.p), layout_p(pr, v.rate), w,
                          pr.pi.pi);
  }
  for (const auto& p : unique_parameter_points(pr.vertices)) add_positivity_blocks(form, pr, layout_p(pr, p));
  return form;
}

AffineSymmetricForm assemble_kyp_lti(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                                     const PerformanceIndex& pi) {
  return assemble(make_problem(LpvSystem::lti(A, B, C, D), FrequencyRange::entire(), AnalysisMode::kKyp, pi));
}

AffineSymmetricForm assemble_gkyp_lti(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                                      const FrequencyRange& range, const PerformanceIndex& pi) {
  return assemble(make_problem(LpvSystem::lti(A, B, C, D), range, AnalysisMode::kGkyp, pi));
}

namespace {

AffineSymmetricForm single_vertex(const LpvSystem& system, const FrequencyRange& range, AnalysisMode mode,
                                  const PerformanceIndex& pi, const VertexPair& vertex) {
  require(system.box().contains(vertex.p) && system.box().contains_rate(vertex.rate),
          "LMI vertex outside parameter box");
  return assemble_at(make_problem(system, range, mode, pi), vertex);
}

}  // namespace

AffineSymmetricForm assemble_lpv_ff(const LpvSystem& system, const FrequencyRange& range, const PerformanceIndex& pi,
                                    const VertexPair& vertex) {
  return single_vertex(system, range, AnalysisMode::kLpvFf, pi, vertex);
}

AffineSymmetricForm assemble_lpv_ef(const LpvSystem& system, const PerformanceIndex& pi, const VertexPair& vertex) {
  return single_vertex(system, FrequencyRange::entire(), AnalysisMode::kLpvEf, pi, vertex);
}

AffineSymmetricForm assemble_theorem2(const LpvSystem& system, const FrequencyRange& enlarged_range,
                                      const PerformanceIndex& pi, const VertexPair& vertex) {
  return single_vertex(system, enlarged_range, AnalysisMode::kTheorem2, pi, vertex);
}

double performance_margin(const LmiProblem& pr, const AffineSymmetricForm& form, double margin_rel) {
  const Eigen::Index m = pr.system.inputs();
  const double level = m > 0 ? pr.pi.pi.bottomRightCorner(m, m).cwiseAbs().maxCoeff() : 0.0;
  const double s = form.scale();
  return margin_rel * std::min(s, std::max(level, 1e-6 * s));
}

std::vector<GridViolation> verify_on_grid(const LmiProblem& pr, const Vector& certificate, int grid_density) {
  require(grid_density >= 1, "verify_on_grid: density must be >= 1");
  require(certificate.size() == pr.layout.num_vars(), "verify_on_grid: certificate length mismatch");
  const double tol = 0.5 * performance_margin(pr, assemble(pr));
  std::vector<VertexPair> grid;
  if (is_frozen_mode(pr.mode)) {
    grid = pr.vertices;
  } else {
    grid = box_grid(pr.system.box(), grid_density);
  }
  std::vector<GridViolation> out;
  for (const auto& g : grid) {
    const double lam = max_eig_neg(assemble_at(pr, g), certificate);
    if (lam > -tol) out.push_back({g.p, g.rate, lam});
  }
  return out;
}

bool is_controllable(const Matrix& A, const Matrix& B, double tol) {
  const Eigen::Index n = A.rows();
  if (n == 0) return true;
  Matrix K(n, n * B.cols());
  Matrix blk = B;
  for (Eigen::Index i = 0; i < n; ++i) {
    K.middleCols(i * B.cols(), B.cols()) = blk;
    blk = A * blk;
  }
  Eigen::JacobiSVD<Matrix> svd(K);
  const Vector s = svd.singularValues();
  if (s.size() < n || s(0) == 0.0) return false;
  return s(n - 1) > tol * s(0);
}

FeasibilityResult gamma_feasible(const LpvSystem& system, const FrequencyRange& range, AnalysisMode mode, double gamma,
                                 const GammaOptions& options, std::optional<Vector> warm_start) {
  const auto pi = PerformanceIndex::hinf(system.outputs(), system.inputs(), gamma);
  const LmiProblem pr = make_problem(system, range, mode, pi, options.frozen_p);
  const AffineSymmetricForm form = assemble(pr);
  SolverOptions so = options.solver;
  so.margin = performance_margin(pr, form, options.margin_rel);
  if (warm_start && warm_start->size() == form.num_vars()) so.warm_start = warm_start;
  return solve_feasibility(form, so);
}

GammaResult min_gamma(const LpvSystem& system, const FrequencyRange& range, AnalysisMode mode,
                      const GammaOptions& options) {
  require(options.bisect_tol > 0.0, "min_gamma: bisect_tol must be > 0");
  GammaResult res;
  res.mode = mode;
  res.range = is_ff_mode(mode) ? range : FrequencyRange::entire();

  const LmiProblem base = make_problem(system, range, mode, PerformanceIndex::hinf(system.outputs(), system.inputs(), 1.0),
                                       options.frozen_p);
  res.layout = base.layout;
  for (const auto& p : unique_parameter_points(base.vertices)) {
    const StateSpace ss = state_space_at(base, p);
    if (!is_controllable(ss.A, ss.B)) res.controllable = false;
  }
  if (!res.controllable) res.warnings.push_back("(A, B) is not controllable at some vertex; the certificate may be conservative");

  std::optional<Vector> warm;
  Vector best_x;
  auto probe = [&](double g) {
    FeasibilityResult fr = gamma_feasible(system, range, mode, g, options, warm);
    res.bisection_trace.emplace_back(g, fr.feasible);
    if (fr.feasible) {
      warm = fr.x;
      best_x = fr.x;
    }
    return fr.feasible;
  };

  double lo = 0.0;
  double hi = 0.0;
  if (probe(0.0)) {
    res.feasible_at_zero = true;
    res.warnings.push_back("LMI is feasible at gamma = 0; the bound carries no information");
    res.gamma_star = 0.0;
    res.certificate = best_x;
  } else {
    hi = 1.0;
    while (!probe(hi)) {
      lo = hi;
      hi *= 2.0;
      if (lo >= options.gamma_cap) {
        throw InfeasibleError("system appears not to admit a finite bound under this relaxation");
      }
    }
    while (hi - lo > options.bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      if (probe(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    res.gamma_star = 0.5 * (lo + hi);
    res.certificate = best_x;
  }
  res.bracket_lower = lo;
  res.bracket_upper = hi;

  const LmiProblem final_pr = make_problem(system, range, mode,
                                           PerformanceIndex::hinf(system.outputs(), system.inputs(), hi), options.frozen_p);
  res.violations = verify_on_grid(final_pr, res.certificate, options.verify_density);
  res.relaxation_gap_flag = !res.violations.empty();
  if (res.relaxation_gap_flag) {
    std::ostringstream os;
    os << "certificate violates the LMI at " << res.violations.size() << " grid point(s)";
    res.warnings.push_back(os.str());
  }
  return res;
}

// ---------------------------------------------------------------------------
// UAS certificate

UasCertificate UasCertificate::from_constants(double c1, double c2, double c3) {
  require(c1 > 0.0 && c2 >= c1 && c3 > 0.0, "UAS constants need 0 < c1 <= c2 and c3 > 0");
  UasCertificate u;
  u.c1 = c1;
  u.c2 = c2;
  u.c3 = c3;
  u.alpha = c2 / c1;
  u.beta = c3 / (2.0 * c2);
  return u;
}

namespace {

// Unknowns: P_s0..P_sl, then c1 (unless fixed), then c2 (only when free).
struct UasSetup {
  int n = 0;
  int l = 0;
  int sym = 0;
  enum class Scalars { kFixed, kFree, kRatio } scalars = Scalars::kFree;
  double c1 = 0.0, c2 = 0.0;  // kFixed
  double kappa = 1.0;         // kRatio: c2 = kappa * c1
  std::optional<double> c2_cap;

  int num_vars() const {
    const int base = (1 + l) * sym;
    switch (scalars) {
      case Scalars::kFixed: return base;
      case Scalars::kRatio: return base + 1;
      case Scalars::kFree: return base + 2;
    }
    return base;
  }
  int c1_var() const { return (1 + l) * sym; }
  int c2_var() const { return (1 + l) * sym + 1; }
};

AffineSymmetricForm uas_form(const LpvSystem& sys, const UasSetup& s, double c3) {
  AffineSymmetricForm form(s.num_vars());
  const int n = s.n;
  const Matrix I = Matrix::Identity(n, n);
  const std::vector<VertexPair> verts = box_vertices(sys.box());

  auto ps_terms = [&](const Vector& p, double sign) {
    std::vector<std::pair<int, Matrix>> t;
    for (int j = 0; j <= s.l; ++j) {
      const double wj = j == 0 ? 1.0 : p(j - 1);
      if (wj == 0.0) continue;
      for (int c = 0; c < s.sym; ++c) t.emplace_back(j * s.sym + c, sign * wj * sym_basis(n, c));
    }
    return t;
  };

  for (const auto& p : unique_parameter_points(verts)) {
    // P_s(p) - c1 I >= 0
    auto lower = ps_terms(p, 1.0);
    Matrix lower_const = Matrix::Zero(n, n);
    // c2 I - P_s(p) >= 0
    auto upper = ps_terms(p, -1.0);
    Matrix upper_const = Matrix::Zero(n, n);
    switch (s.scalars) {
      case UasSetup::Scalars::kFixed:
        lower_const = -s.c1 * I;
        upper_const = s.c2 * I;
        break;
      case UasSetup::Scalars::kFree:
        lower.emplace_back(s.c1_var(), -I);
        upper.emplace_back(s.c2_var(), I);
        break;
      case UasSetup::Scalars::kRatio:
        lower.emplace_back(s.c1_var(), -I);
        upper.emplace_back(s.c1_var(), s.kappa * I);
        break;
    }
    form.add_block(lower_const, lower);
    form.add_block(upper_const, upper);
  }

  for (const auto& v : verts) {
    const Matrix A = sys.A()(v.p);
    std::vector<std::pair<int, Matrix>> t;
    for (int j = 0; j <= s.l; ++j) {
      const double wp = j == 0 ? 1.0 : v.p(j - 1);
      const double wr = j == 0 ? 0.0 : v.rate(j - 1);
      for (int c = 0; c < s.sym; ++c) {
        const Matrix E = sym_basis(n, c);
        const Matrix T = wp * (A.transpose() * E + E * A) + wr * E;
        if (T.cwiseAbs().maxCoeff() > 0.0) t.emplace_back(j * s.sym + c, -T);
      }
    }
    form.add_block(-c3 * I, t);
  }

  if (s.scalars != UasSetup::Scalars::kFixed) {
    form.add_block(Matrix::Zero(1, 1), {{s.c1_var(), Matrix::Ones(1, 1)}});
  }
  if (s.c2_cap) {
    if (s.scalars == UasSetup::Scalars::kRatio) {
      form.add_block(Matrix::Constant(1, 1, *s.c2_cap), {{s.c1_var(), Matrix::Constant(1, 1, -s.kappa)}});
    } else if (s.scalars == UasSetup::Scalars::kFree) {
      form.add_block(Matrix::Constant(1, 1, *s.c2_cap), {{s.c2_var(), Matrix::Constant(1, 1, -1.0)}});
    }
  }
  return form;
}

std::optional<FeasibilityResult> uas_solve(const LpvSystem& sys, const UasSetup& s, double c3, const UasOptions& o,
                                           const std::optional<Vector>& warm) {
  const AffineSymmetricForm form = uas_form(sys, s, c3);
  SolverOptions so = o.solver;
  so.margin = o.margin_rel * form.scale();
  if (warm && warm->size() == form.num_vars()) so.warm_start = warm;
  FeasibilityResult fr = solve_feasibility(form, so);
  if (!fr.feasible) return std::nullopt;
  return fr;
}

UasCertificate extract(const UasSetup& s, double c3, const FeasibilityResult& fr) {
  double c1 = s.c1, c2 = s.c2;
  if (s.scalars == UasSetup::Scalars::kFree) {
    c1 = fr.x(s.c1_var());
    c2 = fr.x(s.c2_var());
  } else if (s.scalars == UasSetup::Scalars::kRatio) {
    c1 = fr.x(s.c1_var());
    c2 = s.kappa * c1;
  }
  UasCertificate u;
  u.c1 = c1;
  u.c2 = c2;
  u.c3 = c3;
  u.alpha = c2 / c1;
  u.beta = c3 / (2.0 * c2);
  for (int j = 0; j <= s.l; ++j) u.ps.push_back(sym_from_vector(s.n, fr.x.segment(j * s.sym, s.sym)));
  u.achieved_margin = fr.achieved_margin;
  return u;
}

}  // namespace

UasCertificate uas_certificate(const LpvSystem& system, double c3_target, const UasOptions& options) {
  require(c3_target > 0.0, "uas_certificate: c3 must be > 0");
  require(options.c1.has_value() == options.c2.has_value(), "uas_certificate: give both c1 and c2 or neither");
  UasSetup s;
  s.n = static_cast<int>(system.states());
  s.l = static_cast<int>(system.num_params());
  s.sym = sym_dim(s.n);
  if (options.c1) {
    require(*options.c1 > 0.0 && *options.c2 >= *options.c1, "uas_certificate: need 0 < c1 <= c2");
    s.scalars = UasSetup::Scalars::kFixed;
    s.c1 = *options.c1;
    s.c2 = *options.c2;
  }

  // Largest workable c3 <= c3_target.
  double c3 = c3_target;
  std::optional<FeasibilityResult> fr = uas_solve(system, s, c3, options, std::nullopt);
  if (!fr) {
    double bad = c3_target;
    double good = 0.0;
    std::optional<FeasibilityResult> good_fr;
    for (int i = 0; i < 12 && !good_fr; ++i) {
      c3 = 0.5 * bad;
      good_fr = uas_solve(system, s, c3, options, std::nullopt);
      if (good_fr) {
        good = c3;
      } else {
        bad = c3;
      }
    }
    if (!good_fr) throw InfeasibleError("no UAS certificate found under affine P_s");
    for (int i = 0; i < 20; ++i) {
      const double mid = 0.5 * (good + bad);
      auto r = uas_solve(system, s, mid, options, good_fr->x);
      if (r) {
        good = mid;
        good_fr = r;
      } else {
        bad = mid;
      }
    }
    c3 = good;
    fr = good_fr;
  }
  if (s.scalars == UasSetup::Scalars::kFixed) return extract(s, c3, *fr);

  // Minimize kappa = c2 / c1.
  UasCertificate cert = extract(s, c3, *fr);
  UasSetup r = s;
  r.scalars = UasSetup::Scalars::kRatio;
  double k_hi = std::max(1.0, cert.alpha);
  double k_lo = 1.0;
  r.kappa = k_hi;
  std::optional<FeasibilityResult> best = uas_solve(system, r, c3, options, std::nullopt);
  if (!best) {
    r.kappa = k_hi * (1.0 + 1e-3);
    best = uas_solve(system, r, c3, options, std::nullopt);
    if (!best) return cert;
    k_hi = r.kappa;
  }
  for (int i = 0; i < options.bisection_steps && k_hi - k_lo > 1e-4 * k_hi; ++i) {
    r.kappa = 0.5 * (k_lo + k_hi);
    auto t = uas_solve(system, r, c3, options, best->x);
    if (t) {
      k_hi = r.kappa;
      best = t;
    } else {
      k_lo = r.kappa;
    }
  }
  r.kappa = k_hi;

  // Then minimize c2 at that ratio.
  cert = extract(r, c3, *best);
  double c_hi = cert.c2;
  double c_lo = 0.0;
  for (int i = 0; i < options.bisection_steps && c_hi - c_lo > 1e-5 * c_hi; ++i) {
    r.c2_cap = 0.5 * (c_lo + c_hi);
    auto t = uas_solve(system, r, c3, options, best->x);
    if (t) {
      best = t;
      c_hi = r.kappa * t->x(r.c1_var());
    } else {
      c_lo = *r.c2_cap;
    }
  }
  r.c2_cap.reset();
  return extract(r, c3, *best);
}

}  // namespace ffkyp
