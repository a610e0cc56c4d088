#pragma once

#include "ffkyp/core_model.hpp"

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ffkyp {

/// F(x) = F0 + sum_i x_i F_i, stored block-diagonally. Every block is
/// symmetric; a coefficient block that is absent is zero.
class AffineSymmetricForm {
 public:
  explicit AffineSymmetricForm(int num_vars = 0) : num_vars_(num_vars) {}

  /// Appends a block. `terms` lists (variable index, coefficient block).
  /// Repeated indices accumulate.
  int add_block(Matrix constant, const std::vector<std::pair<int, Matrix>>& terms = {});

  int num_vars() const { return num_vars_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  std::vector<int> block_sizes() const;
  int total_size() const;

  const Matrix& constant_block(int b) const { return blocks_.at(static_cast<std::size_t>(b)).constant; }
  /// Coefficient of variable `var` in block `b`; nullptr when zero.
  const Matrix* coefficient_block(int b, int var) const;

  Matrix block_value(int b, const Vector& x) const;
  /// Largest Frobenius norm over constant and coefficient blocks.
  double scale() const;

 private:
  struct Block {
    Matrix constant;
    std::vector<std::pair<int, Matrix>> terms;
  };
  int num_vars_;
  std::vector<Block> blocks_;
};

/// λ_max(-F(x)), evaluated blockwise.
double max_eig_neg(const AffineSymmetricForm& form, const Vector& x);

/// Default strictness margin: 1e-6 relative to the largest block norm.
double default_margin(const AffineSymmetricForm& form);

struct SolverOptions {
  double margin = 0.0;
  int max_iters = 4000;
  std::optional<Vector> warm_start;
  /// Smoothing temperature schedule: doubling from beta_start to beta_end.
  double beta_start = 1.0;
  double beta_end = 1024.0;
  double armijo = 1e-4;
  /// Second stage: log-det barrier path following on max t s.t. F(x) >= tI.
  bool barrier_refinement = true;
  /// Decision vector is confined to ||x|| <= radius (in normalized units).
  double radius = 1e6;
};

struct FeasibilityResult {
  bool feasible = false;
  Vector x;
  /// -λ_max(-F(x)) at the returned point.
  double achieved_margin = 0.0;
  int iterations = 0;
  /// Upper estimate of the best attainable margin when the barrier stage
  /// proved the margin out of reach (NaN otherwise).
  double margin_upper_bound = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostics;
};

/// Looks for x with F(x) >= margin I. A false verdict means "no such point
/// found"; it carries no dual certificate.
FeasibilityResult solve_feasibility(const AffineSymmetricForm& form, const SolverOptions& options = {});

/// [[Re H, -Im H], [Im H, Re H]]; throws on non-Hermitian input.
Matrix real_embedding(const CMatrix& H, double tol = 1e-10);

/// Symmetric coordinates: index of entry (i, j), i <= j, of an n x n matrix.
int sym_index(int n, int i, int j);
int sym_dim(int n);
/// Basis matrix E_ij (+ E_ji) for symmetric coordinate k.
Matrix sym_basis(int n, int k);
Matrix sym_from_vector(int n, const Eigen::Ref<const Vector>& v);

}  // namespace ffkyp
