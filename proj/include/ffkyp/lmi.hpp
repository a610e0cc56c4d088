#pragma once

#include "ffkyp/core_model.hpp"
#include "ffkyp/sdp.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ffkyp {

/// Which LMI family a performance analysis uses.
///  - kyp:      entire-frequency LTI condition (P sign-free)
///  - gkyp:     finite-frequency LTI condition with (P, Q >= 0)
///  - lpv_ff:   finite-frequency LPV condition, affine P(p), constant Q
///  - lpv_ef:   entire-frequency LPV condition, affine P(p) > 0
///  - theorem2: finite-frequency LPV condition on an enlarged range, affine Q(p) > 0
enum class AnalysisMode { kKyp, kGkyp, kLpvFf, kLpvEf, kTheorem2 };

const char* to_string(AnalysisMode mode);
AnalysisMode parse_mode(const std::string& s);

/// Raised when no finite bound or certificate can be found.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Offsets of the symmetric matrix unknowns inside the decision vector.
/// P and Q are affine in p: index 0 is the constant term, index i the
/// coefficient of p_i.
struct DecisionLayout {
  int n = 0;
  int num_params = 0;
  int p_count = 0;  // number of P matrices (1 or 1 + l)
  int q_count = 0;  // number of Q matrices (0, 1 or 1 + l)
  int sym = 0;      // entries per symmetric matrix

  static DecisionLayout for_mode(AnalysisMode mode, int n, int num_params, bool weight_is_zero);

  int num_vars() const { return (p_count + q_count) * sym; }
  int p_var(int matrix, int coord) const { return matrix * sym + coord; }
  int q_var(int matrix, int coord) const { return (p_count + matrix) * sym + coord; }

  Matrix p_matrix(const Vector& x, int matrix) const;
  Matrix q_matrix(const Vector& x, int matrix) const;
  Matrix p_at(const Vector& x, const Vector& p) const;
  Matrix p_rate(const Vector& x, const Vector& pdot) const;
  Matrix q_at(const Vector& x, const Vector& p) const;
};

struct LmiProblem {
  LpvSystem system;
  FrequencyRange range = FrequencyRange::entire();
  AnalysisMode mode = AnalysisMode::kKyp;
  PerformanceIndex pi;
  DecisionLayout layout;
  std::vector<VertexPair> vertices;
  /// Parameter value at which kyp/gkyp freeze an LPV system.
  Vector frozen_p;
};

/// Builds the problem for `mode`; kyp/gkyp freeze the system at `frozen_p`
/// (default: box midpoint) and use a single vertex.
LmiProblem make_problem(const LpvSystem& system, const FrequencyRange& range, AnalysisMode mode,
                        const PerformanceIndex& pi, std::optional<Vector> frozen_p = std::nullopt);

/// Vertex-stacked form F(x) >= 0 for the problem (all vertices plus the
/// positivity blocks that the mode requires).
AffineSymmetricForm assemble(const LmiProblem& problem);
/// Form restricted to one (p, pdot) point, same decision layout.
AffineSymmetricForm assemble_at(const LmiProblem& problem, const VertexPair& point);

AffineSymmetricForm assemble_kyp_lti(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                                     const PerformanceIndex& pi);
AffineSymmetricForm assemble_gkyp_lti(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                                      const FrequencyRange& range, const PerformanceIndex& pi);
AffineSymmetricForm assemble_lpv_ff(const LpvSystem& system, const FrequencyRange& range,
                                    const PerformanceIndex& pi, const VertexPair& vertex);
AffineSymmetricForm assemble_lpv_ef(const LpvSystem& system, const PerformanceIndex& pi, const VertexPair& vertex);
AffineSymmetricForm assemble_theorem2(const LpvSystem& system, const FrequencyRange& enlarged_range,
                                      const PerformanceIndex& pi, const VertexPair& vertex);

/// Strictness margin: margin_rel times the form scale, capped at the size of
/// the input block of Π (γ² for the H∞ index) and floored at 1e-6 of the scale.
double performance_margin(const LmiProblem& problem, const AffineSymmetricForm& form, double margin_rel = 1e-6);

struct GridViolation {
  Vector p;
  Vector rate;
  double max_eig = 0.0;  // λ_max(-F) at the point
};

/// Evaluates the LMI of `problem` with a fixed certificate on a tensor grid
/// of (p, pdot) and lists points where it fails.
std::vector<GridViolation> verify_on_grid(const LmiProblem& problem, const Vector& certificate, int grid_density);

struct GammaOptions {
  double bisect_tol = 1e-4;
  double gamma_cap = 1e6;
  int verify_density = 11;
  double margin_rel = 1e-6;
  SolverOptions solver;
  std::optional<Vector> frozen_p;
};

struct GammaResult {
  AnalysisMode mode = AnalysisMode::kKyp;
  FrequencyRange range = FrequencyRange::entire();
  double gamma_star = 0.0;
  double bracket_lower = 0.0;
  double bracket_upper = 0.0;
  Vector certificate;
  DecisionLayout layout;
  std::vector<std::pair<double, bool>> bisection_trace;
  /// Grid verification failed somewhere away from the vertices.
  bool relaxation_gap_flag = false;
  std::vector<GridViolation> violations;
  /// The LMI was already feasible at γ = 0, so it gives no positive bound.
  bool feasible_at_zero = false;
  bool controllable = true;
  std::vector<std::string> warnings;
};

/// Smallest γ (to bisect_tol) for which the Π = diag(I, -γ²I) LMI of `mode`
/// is feasible. Throws InfeasibleError if no γ below the cap works.
GammaResult min_gamma(const LpvSystem& system, const FrequencyRange& range, AnalysisMode mode,
                      const GammaOptions& options = {});

/// Feasibility of the mode's LMI at one γ (used by probes and tests).
FeasibilityResult gamma_feasible(const LpvSystem& system, const FrequencyRange& range, AnalysisMode mode,
                                 double gamma, const GammaOptions& options = {},
                                 std::optional<Vector> warm_start = std::nullopt);

/// Kalman controllability rank test, singular values > tol * sigma_max.
bool is_controllable(const Matrix& A, const Matrix& B, double tol = 1e-8);

struct UasCertificate {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double alpha = 0.0;  // c2 / c1
  double beta = 0.0;   // c3 / (2 c2), 1/s
  /// P_s(p) = Ps[0] + sum_i p_i Ps[i].
  std::vector<Matrix> ps;
  double achieved_margin = 0.0;

  static UasCertificate from_constants(double c1, double c2, double c3);
};

struct UasOptions {
  /// Check a given (c1, c2) instead of optimizing them.
  std::optional<double> c1;
  std::optional<double> c2;
  int bisection_steps = 30;
  double margin_rel = 1e-6;
  SolverOptions solver;
};

/// Affine P_s(p) with c1 I <= P_s <= c2 I and A^T P_s + P_s A + dP_s <= -c3 I
/// at every vertex. With free c1, c2 the ratio c2/c1 is minimized first and
/// c2 second. If c3 is infeasible it is reduced by bisection.
UasCertificate uas_certificate(const LpvSystem& system, double c3_target, const UasOptions& options = {});

}  // namespace ffkyp
