#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffkyp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Raised when a resolvent (jωI - A) is singular, i.e. jω is a pole.
class PoleOnAxisError : public std::runtime_error {
 public:
  PoleOnAxisError(double omega, const std::string& what)
      : std::runtime_error(what), omega_(omega) {}
  double omega() const { return omega_; }

 private:
  double omega_;
};

/// M(p) = M0 + sum_i p_i M_i with every term sharing one shape.
class AffineMatrixFunction {
 public:
  AffineMatrixFunction() = default;
  AffineMatrixFunction(Matrix constant_term, std::vector<Matrix> coefficients);

  /// Parameter-independent map with `num_params` zero coefficients.
  static AffineMatrixFunction constant(Matrix value, std::size_t num_params);

  Matrix operator()(const Vector& p) const;
  /// Derivative along a parameter rate: sum_i pdot_i M_i.
  Matrix rate(const Vector& pdot) const;

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  std::size_t num_params() const { return coefficients_.size(); }
  const Matrix& constant_term() const { return constant_; }
  const Matrix& coefficient(std::size_t i) const { return coefficients_.at(i); }
  const std::vector<Matrix>& coefficients() const { return coefficients_; }
  bool is_parameter_independent() const;

 private:
  Matrix constant_;
  std::vector<Matrix> coefficients_;
};

Matrix eval_affine(const AffineMatrixFunction& m, const Vector& p);

/// Bounds on the scheduling parameter and on its rate of change (1/s).
struct ParameterBox {
  Vector p_lower;
  Vector p_upper;
  Vector rate_lower;
  Vector rate_upper;

  static ParameterBox frozen(const Vector& p);
  static ParameterBox empty() { return frozen(Vector(0)); }

  std::size_t size() const { return static_cast<std::size_t>(p_lower.size()); }
  void validate() const;
  Vector midpoint() const { return 0.5 * (p_lower + p_upper); }
  bool contains(const Vector& p, double tol = 1e-12) const;
  bool contains_rate(const Vector& pdot, double tol = 1e-12) const;
};

struct VertexPair {
  Vector p;
  Vector rate;
};

/// All 2^l x 2^l combinations of parameter and rate bounds. A collapsed
/// interval contributes a single value.
std::vector<VertexPair> box_vertices(const ParameterBox& box);
/// The 2^l corners of the parameter interval only.
std::vector<Vector> parameter_vertices(const ParameterBox& box);
/// Tensor grid with `density` points per parameter axis (endpoints included).
std::vector<Vector> parameter_grid(const ParameterBox& box, int density);
/// Tensor grid over (p, pdot) with `density` points on every axis.
std::vector<VertexPair> box_grid(const ParameterBox& box, int density);

/// A frozen (LTI) state-space quadruple.
struct StateSpace {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
};

class LpvSystem {
 public:
  LpvSystem() = default;
  LpvSystem(AffineMatrixFunction A, AffineMatrixFunction B, AffineMatrixFunction C,
            AffineMatrixFunction D, ParameterBox box);

  /// LTI system embedded with zero parameters.
  static LpvSystem lti(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D);

  const AffineMatrixFunction& A() const { return A_; }
  const AffineMatrixFunction& B() const { return B_; }
  const AffineMatrixFunction& C() const { return C_; }
  const AffineMatrixFunction& D() const { return D_; }
  const ParameterBox& box() const { return box_; }

  Eigen::Index states() const { return A_.rows(); }
  Eigen::Index inputs() const { return B_.cols(); }
  Eigen::Index outputs() const { return C_.rows(); }
  std::size_t num_params() const { return A_.num_params(); }

  StateSpace frozen(const Vector& p) const;
  /// True when every coefficient matrix is zero.
  bool is_lti() const;
  LpvSystem with_box(ParameterBox box) const;
  /// Same system with all parameter coefficients dropped (frozen at p = 0).
  LpvSystem constant_part() const;

 private:
  AffineMatrixFunction A_, B_, C_, D_;
  ParameterBox box_;
};

/// Low [-wl, wl], middle +-[w1, w2], high |w| >= wh, or the whole axis.
class FrequencyRange {
 public:
  enum class Kind { kLow, kMiddle, kHigh, kEntire };

  static FrequencyRange low(double wl);
  static FrequencyRange middle(double w1, double w2);
  static FrequencyRange high(double wh);
  static FrequencyRange entire();
  /// Parses `low:<wl>`, `mid:<w1>:<w2>`, `high:<wh>` or `entire`.
  static FrequencyRange parse(const std::string& spec);

  Kind kind() const { return kind_; }
  double low_cutoff() const;
  double band_lower() const;
  double band_upper() const;
  double center() const { return 0.5 * (w1_ + w2_); }
  double high_cutoff() const;

  /// Membership of a (signed) frequency; middle bands are symmetric in ω.
  bool contains(double omega) const;
  /// Interval inclusion (this ⊆ other).
  bool subset_of(const FrequencyRange& other, double tol = 1e-12) const;
  /// Non-negative frequency intervals, upper bound may be +inf.
  std::vector<std::pair<double, double>> positive_bands() const;

  std::string to_string() const;
  bool operator==(const FrequencyRange& other) const = default;

 private:
  FrequencyRange(Kind kind, double w1, double w2) : kind_(kind), w1_(w1), w2_(w2) {}
  Kind kind_ = Kind::kEntire;
  double w1_ = 0.0;
  double w2_ = 0.0;
};

const char* to_string(FrequencyRange::Kind kind);

/// 2x2 Hermitian weight whose quadratic form [jω 1]^* Ψ [jω 1] is
/// non-negative on the band.
struct FrequencyWeight {
  Eigen::Matrix2cd psi = Eigen::Matrix2cd::Zero();

  bool is_real(double tol = 0.0) const { return psi.imag().cwiseAbs().maxCoeff() <= tol; }
  bool is_zero() const { return psi.cwiseAbs().maxCoeff() == 0.0; }
  /// f(ω) = [jω 1]^* Ψ [jω 1].
  double evaluate(double omega) const;
};

FrequencyWeight frequency_weight(const FrequencyRange& range);

/// Hermitian performance index Π of size (q + m).
struct PerformanceIndex {
  Matrix pi;

  /// diag(I_q, -γ² I_m).
  static PerformanceIndex hinf(Eigen::Index outputs, Eigen::Index inputs, double gamma);
};

/// Θ = [[0, 1], [1, 0]].
const Eigen::Matrix2d& theta();
/// Θ_d = [[0, 0], [0, 1]].
const Eigen::Matrix2d& theta_d();

/// G(jω) = C (jωI - A)^{-1} B + D. Throws PoleOnAxisError on a singular resolvent.
CMatrix transfer_function(const StateSpace& sys, double omega);
/// (jωI - A)^{-1} X, throwing PoleOnAxisError on a singular resolvent.
CMatrix resolvent_times(const Matrix& A, double omega, const CMatrix& X);

/// Largest singular value of a complex matrix.
double sigma_max(const CMatrix& m);

}  // namespace ffkyp
