#include "ffkyp/core_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ffkyp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// AffineMatrixFunction

AffineMatrixFunction::AffineMatrixFunction(Matrix constant_term, std::vector<Matrix> coefficients)
    : constant_(std::move(constant_term)), coefficients_(std::move(coefficients)) {
  for (const auto& c : coefficients_) {
    require(c.rows() == constant_.rows() && c.cols() == constant_.cols(),
            "affine matrix function: coefficient shape differs from constant term");
  }
}

AffineMatrixFunction AffineMatrixFunction::constant(Matrix value, std::size_t num_params) {
  std::vector<Matrix> coeffs(num_params, Matrix::Zero(value.rows(), value.cols()));
  return AffineMatrixFunction(std::move(value), std::move(coeffs));
}

Matrix AffineMatrixFunction::operator()(const Vector& p) const {
  require(static_cast<std::size_t>(p.size()) == coefficients_.size(),
          "affine matrix function: parameter vector has length " + std::to_string(p.size()) +
              ", expected " + std::to_string(coefficients_.size()));
  Matrix out = constant_;
  for (std::size_t i = 0; i < coefficients_.size(); ++i) out += p(static_cast<Eigen::Index>(i)) * coefficients_[i];
  return out;
}

Matrix AffineMatrixFunction::rate(const Vector& pdot) const {
  require(static_cast<std::size_t>(pdot.size()) == coefficients_.size(),
          "affine matrix function: rate vector length mismatch");
  Matrix out = Matrix::Zero(rows(), cols());
  for (std::size_t i = 0; i < coefficients_.size(); ++i) out += pdot(static_cast<Eigen::Index>(i)) * coefficients_[i];
  return out;
}

bool AffineMatrixFunction::is_parameter_independent() const {
  for (const auto& c : coefficients_) {
    if (c.size() > 0 && c.cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

Matrix eval_affine(const AffineMatrixFunction& m, const Vector& p) { return m(p); }

// ---------------------------------------------------------------------------
// ParameterBox

ParameterBox ParameterBox::frozen(const Vector& p) {
  return ParameterBox{p, p, Vector::Zero(p.size()), Vector::Zero(p.size())};
}

void ParameterBox::validate() const {
  const auto l = p_lower.size();
  require(p_upper.size() == l && rate_lower.size() == l && rate_upper.size() == l,
          "parameter box: bound vectors must share one length");
  for (Eigen::Index i = 0; i < l; ++i) {
    require(p_lower(i) <= p_upper(i), "parameter box: p_lower > p_upper on axis " + std::to_string(i));
    require(rate_lower(i) <= rate_upper(i),
            "parameter box: rate_lower > rate_upper on axis " + std::to_string(i));
  }
}

bool ParameterBox::contains(const Vector& p, double tol) const {
  if (p.size() != p_lower.size()) return false;
  return ((p - p_lower).array() >= -tol).all() && ((p_upper - p).array() >= -tol).all();
}

bool ParameterBox::contains_rate(const Vector& pdot, double tol) const {
  if (pdot.size() != rate_lower.size()) return false;
  return ((pdot - rate_lower).array() >= -tol).all() && ((rate_upper - pdot).array() >= -tol).all();
}

namespace {

// Cartesian product of per-axis sample lists.
std::vector<Vector> tensor(const std::vector<std::vector<double>>& axes) {
  std::vector<Vector> out{Vector(0)};
  for (const auto& axis : axes) {
    std::vector<Vector> next;
    next.reserve(out.size() * axis.size());
    for (const auto& prefix : out) {
      for (double v : axis) {
        Vector e(prefix.size() + 1);
        e.head(prefix.size()) = prefix;
        e(prefix.size()) = v;
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (lo == hi) return {lo};
  if (n <= 1) return {0.5 * (lo + hi)};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> corners(double lo, double hi) {
  return lo == hi ? std::vector<double>{lo} : std::vector<double>{lo, hi};
}

}  // namespace

std::vector<Vector> parameter_vertices(const ParameterBox& box) {
  box.validate();
  std::vector<std::vector<double>> axes;
  for (Eigen::Index i = 0; i < box.p_lower.size(); ++i) axes.push_back(corners(box.p_lower(i), box.p_upper(i)));
  return tensor(axes);
}

std::vector<VertexPair> box_vertices(const ParameterBox& box) {
  box.validate();
  std::vector<std::vector<double>> rate_axes;
  for (Eigen::Index i = 0; i < box.rate_lower.size(); ++i) rate_axes.push_back(corners(box.rate_lower(i), box.rate_upper(i)));
  std::vector<VertexPair> out;
  const auto rates = tensor(rate_axes);
  for (const auto& p : parameter_vertices(box)) {
    for (const auto& r : rates) out.push_back({p, r});
  }
  return out;
}

std::vector<Vector> parameter_grid(const ParameterBox& box, int density) {
  box.validate();
  std::vector<std::vector<double>> axes;
  for (Eigen::Index i = 0; i < box.p_lower.size(); ++i) axes.push_back(linspace(box.p_lower(i), box.p_upper(i), density));
  return tensor(axes);
}

std::vector<VertexPair> box_grid(const ParameterBox& box, int density) {
  box.validate();
  std::vector<std::vector<double>> rate_axes;
  for (Eigen::Index i = 0; i < box.rate_lower.size(); ++i)
    rate_axes.push_back(linspace(box.rate_lower(i), box.rate_upper(i), density));
  const auto rates = tensor(rate_axes);
  std::vector<VertexPair> out;
  for (const auto& p : parameter_grid(box, density)) {
    for (const auto& r : rates) out.push_back({p, r});
  }
  return out;
}

// ---------------------------------------------------------------------------
// LpvSystem

LpvSystem::LpvSystem(AffineMatrixFunction A, AffineMatrixFunction B, AffineMatrixFunction C,
                     AffineMatrixFunction D, ParameterBox box)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)), box_(std::move(box)) {
  require(A_.rows() == A_.cols(), "system: A must be square");
  require(B_.rows() == A_.rows(), "system: B must have n rows");
  require(C_.cols() == A_.rows(), "system: C must have n columns");
  require(D_.rows() == C_.rows() && D_.cols() == B_.cols(), "system: D must be outputs x inputs");
  const auto l = A_.num_params();
  require(B_.num_params() == l && C_.num_params() == l && D_.num_params() == l,
          "system: A, B, C, D must share the parameter dimension");
  require(box_.size() == l, "system: parameter box dimension differs from coefficient count");
  box_.validate();
}

LpvSystem LpvSystem::lti(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D) {
  return LpvSystem(AffineMatrixFunction::constant(A, 0), AffineMatrixFunction::constant(B, 0),
                   AffineMatrixFunction::constant(C, 0), AffineMatrixFunction::constant(D, 0),
                   ParameterBox::empty());
}

StateSpace LpvSystem::frozen(const Vector& p) const { return {A_(p), B_(p), C_(p), D_(p)}; }

bool LpvSystem::is_lti() const {
  return A_.is_parameter_independent() && B_.is_parameter_independent() && C_.is_parameter_independent() &&
         D_.is_parameter_independent();
}

LpvSystem LpvSystem::with_box(ParameterBox box) const { return LpvSystem(A_, B_, C_, D_, std::move(box)); }

LpvSystem LpvSystem::constant_part() const {
  const auto l = num_params();
  return LpvSystem(AffineMatrixFunction::constant(A_.constant_term(), l),
                   AffineMatrixFunction::constant(B_.constant_term(), l),
                   AffineMatrixFunction::constant(C_.constant_term(), l),
                   AffineMatrixFunction::constant(D_.constant_term(), l), box_);
}

// ---------------------------------------------------------------------------
// FrequencyRange

FrequencyRange FrequencyRange::low(double wl) {
  require(std::isfinite(wl) && wl > 0.0, "low range: threshold must be positive");
  return {Kind::kLow, 0.0, wl};
}

FrequencyRange FrequencyRange::middle(double w1, double w2) {
  require(std::isfinite(w1) && std::isfinite(w2) && w1 >= 0.0 && w1 < w2,
          "middle range: require 0 <= w1 < w2");
  return {Kind::kMiddle, w1, w2};
}

FrequencyRange FrequencyRange::high(double wh) {
  require(std::isfinite(wh) && wh > 0.0, "high range: threshold must be positive");
  return {Kind::kHigh, wh, std::numeric_limits<double>::infinity()};
}

FrequencyRange FrequencyRange::entire() {
  return {Kind::kEntire, 0.0, std::numeric_limits<double>::infinity()};
}

FrequencyRange FrequencyRange::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == s.size() && !s.empty(), "range spec '" + spec + "': '" + s + "' is not a number");
    return v;
  };
  require(!parts.empty(), "empty range spec");
  const auto& k = parts[0];
  if (k == "low" && parts.size() == 2) return low(number(parts[1]));
  if (k == "mid" && parts.size() == 3) return middle(number(parts[1]), number(parts[2]));
  if (k == "high" && parts.size() == 2) return high(number(parts[1]));
  if (k == "entire" && parts.size() == 1) return entire();
  throw std::invalid_argument("range spec '" + spec + "': expected low:<wl>, mid:<w1>:<w2>, high:<wh> or entire");
}

double FrequencyRange::low_cutoff() const {
  require(kind_ == Kind::kLow, "low_cutoff on a non-low range");
  return w2_;
}
double FrequencyRange::band_lower() const {
  require(kind_ == Kind::kMiddle, "band_lower on a non-middle range");
  return w1_;
}
double FrequencyRange::band_upper() const {
  require(kind_ == Kind::kMiddle, "band_upper on a non-middle range");
  return w2_;
}
double FrequencyRange::high_cutoff() const {
  require(kind_ == Kind::kHigh, "high_cutoff on a non-high range");
  return w1_;
}

bool FrequencyRange::contains(double omega) const {
  const double w = std::abs(omega);
  switch (kind_) {
    case Kind::kLow: return w <= w2_;
    case Kind::kMiddle: return w >= w1_ && w <= w2_;
    case Kind::kHigh: return w >= w1_;
    case Kind::kEntire: return true;
  }
  return false;
}

std::vector<std::pair<double, double>> FrequencyRange::positive_bands() const {
  switch (kind_) {
    case Kind::kLow: return {{0.0, w2_}};
    case Kind::kMiddle: return {{w1_, w2_}};
    case Kind::kHigh: return {{w1_, std::numeric_limits<double>::infinity()}};
    case Kind::kEntire: return {{0.0, std::numeric_limits<double>::infinity()}};
  }
  return {};
}

bool FrequencyRange::subset_of(const FrequencyRange& other, double tol) const {
  for (const auto& [a, b] : positive_bands()) {
    bool covered = false;
    for (const auto& [c, d] : other.positive_bands()) {
      if (a >= c - tol && b <= d + tol * std::max(1.0, std::abs(d))) covered = true;
    }
    if (!covered) return false;
  }
  return true;
}

std::string FrequencyRange::to_string() const {
  switch (kind_) {
    case Kind::kLow: return "low:" + format_number(w2_);
    case Kind::kMiddle: return "mid:" + format_number(w1_) + ":" + format_number(w2_);
    case Kind::kHigh: return "high:" + format_number(w1_);
    case Kind::kEntire: return "entire";
  }
  return "?";
}

const char* to_string(FrequencyRange::Kind kind) {
  switch (kind) {
    case FrequencyRange::Kind::kLow: return "low";
    case FrequencyRange::Kind::kMiddle: return "mid";
    case FrequencyRange::Kind::kHigh: return "high";
    case FrequencyRange::Kind::kEntire: return "entire";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Weights and constants

double FrequencyWeight::evaluate(double omega) const {
  Eigen::Vector2cd v(Complex(0.0, omega), Complex(1.0, 0.0));
  return (v.adjoint() * psi * v)(0, 0).real();
}

FrequencyWeight frequency_weight(const FrequencyRange& range) {
  FrequencyWeight w;
  const Complex j(0.0, 1.0);
  switch (range.kind()) {
    case FrequencyRange::Kind::kLow: {
      const double wl = range.low_cutoff();
      w.psi << -1.0, 0.0, 0.0, wl * wl;
      break;
    }
    case FrequencyRange::Kind::kMiddle: {
      const double wc = range.center();
      w.psi << -1.0, j * wc, -j * wc, -range.band_lower() * range.band_upper();
      break;
    }
    case FrequencyRange::Kind::kHigh: {
      const double wh = range.high_cutoff();
      w.psi << 1.0, 0.0, 0.0, -wh * wh;
      break;
    }
    case FrequencyRange::Kind::kEntire: break;
  }
  return w;
}

PerformanceIndex PerformanceIndex::hinf(Eigen::Index outputs, Eigen::Index inputs, double gamma) {
  PerformanceIndex idx;
  idx.pi = Matrix::Zero(outputs + inputs, outputs + inputs);
  idx.pi.topLeftCorner(outputs, outputs).setIdentity();
  idx.pi.bottomRightCorner(inputs, inputs) = -gamma * gamma * Matrix::Identity(inputs, inputs);
  return idx;
}

const Eigen::Matrix2d& theta() {
  static const Eigen::Matrix2d m = (Eigen::Matrix2d() << 0.0, 1.0, 1.0, 0.0).finished();
  return m;
}

const Eigen::Matrix2d& theta_d() {
  static const Eigen::Matrix2d m = (Eigen::Matrix2d() << 0.0, 0.0, 0.0, 1.0).finished();
  return m;
}

// ---------------------------------------------------------------------------
// Frequency response

CMatrix resolvent_times(const Matrix& A, double omega, const CMatrix& X) {
  const auto n = A.rows();
  CMatrix M = Complex(0.0, omega) * CMatrix::Identity(n, n) - A.cast<Complex>();
  Eigen::PartialPivLU<CMatrix> lu(M);
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (n > 0 && (lu.rcond() < 1e-13 || !std::isfinite(lu.rcond()) ||
                std::abs(lu.determinant()) < 1e-300 * scale)) {
    throw PoleOnAxisError(omega, "resolvent (jωI - A) is singular at ω = " + format_number(omega) +
                                     " rad/s: jω is a pole of the system");
  }
  return lu.solve(X);
}

CMatrix transfer_function(const StateSpace& sys, double omega) {
  return sys.C.cast<Complex>() * resolvent_times(sys.A, omega, sys.B.cast<Complex>()) + sys.D.cast<Complex>();
}

double sigma_max(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace ffkyp
