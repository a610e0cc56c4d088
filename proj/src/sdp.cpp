#include "ffkyp/sdp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ffkyp {

// ---------------------------------------------------------------------------
// Symmetric coordinates

int sym_dim(int n) { return n * (n + 1) / 2; }

int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // row-major upper triangle
  return i * n - i * (i - 1) / 2 + (j - i);
}

Matrix sym_basis(int n, int k) {
  Matrix E = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (sym_index(n, i, j) == k) {
        E(i, j) = 1.0;
        E(j, i) = 1.0;
        return E;
      }
    }
  }
  throw std::out_of_range("sym_basis: coordinate out of range");
}

Matrix sym_from_vector(int n, const Eigen::Ref<const Vector>& v) {
  if (v.size() != sym_dim(n)) throw std::invalid_argument("sym_from_vector: length mismatch");
  Matrix M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      M(i, j) = v(sym_index(n, i, j));
      M(j, i) = M(i, j);
    }
  }
  return M;
}

// ---------------------------------------------------------------------------
// AffineSymmetricForm

int AffineSymmetricForm::add_block(Matrix constant, const std::vector<std::pair<int, Matrix>>& terms) {
  if (constant.rows() != constant.cols()) throw std::invalid_argument("form block must be square");
  Block block;
  block.constant = 0.5 * (constant + constant.transpose());
  for (const auto& [var, coeff] : terms) {
    if (var < 0 || var >= num_vars_) throw std::out_of_range("form block: variable index out of range");
    if (coeff.rows() != constant.rows() || coeff.cols() != constant.cols())
      throw std::invalid_argument("form block: coefficient shape mismatch");
    Matrix sym = 0.5 * (coeff + coeff.transpose());
    auto it = std::find_if(block.terms.begin(), block.terms.end(), [v = var](const auto& t) { return t.first == v; });
    if (it != block.terms.end()) {
      it->second += sym;
    } else {
      block.terms.emplace_back(var, std::move(sym));
    }
  }
  std::sort(block.terms.begin(), block.terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  blocks_.push_back(std::move(block));
  return static_cast<int>(blocks_.size()) - 1;
}

std::vector<int> AffineSymmetricForm::block_sizes() const {
  std::vector<int> s;
  for (const auto& b : blocks_) s.push_back(static_cast<int>(b.constant.rows()));
  return s;
}

int AffineSymmetricForm::total_size() const {
  int n = 0;
  for (const auto& b : blocks_) n += static_cast<int>(b.constant.rows());
  return n;
}

const Matrix* AffineSymmetricForm::coefficient_block(int b, int var) const {
  for (const auto& [v, m] : blocks_.at(static_cast<std::size_t>(b)).terms) {
    if (v == var) return &m;
  }
  return nullptr;
}

Matrix AffineSymmetricForm::block_value(int b, const Vector& x) const {
  if (x.size() != num_vars_) throw std::invalid_argument("form: decision vector has wrong length");
  const auto& block = blocks_.at(static_cast<std::size_t>(b));
  Matrix out = block.constant;
  for (const auto& [v, m] : block.terms) out += x(v) * m;
  return out;
}

double AffineSymmetricForm::scale() const {
  double s = 0.0;
  for (const auto& b : blocks_) {
    s = std::max(s, b.constant.norm());
    for (const auto& t : b.terms) s = std::max(s, t.second.norm());
  }
  return s > 0.0 ? s : 1.0;
}

double max_eig_neg(const AffineSymmetricForm& form, const Vector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < form.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(-form.block_value(b, x), Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().maxCoeff());
  }
  return worst;
}

double default_margin(const AffineSymmetricForm& form) { return 1e-6 * form.scale(); }

Matrix real_embedding(const CMatrix& H, double tol) {
  if (H.rows() != H.cols()) throw std::invalid_argument("real_embedding: matrix must be square");
  const double herm_err = (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > tol * std::max(1.0, H.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("real_embedding: matrix is not Hermitian");
  const auto n = H.rows();
  Matrix E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  E.bottomRightCorner(n, n) = H.real();
  return 0.5 * (E + E.transpose());
}

// ---------------------------------------------------------------------------
// Solver

namespace {

// Form divided by its scale so temperatures and tolerances are unitless.
struct NormalizedForm {
  const AffineSymmetricForm& form;
  double scale;

  Matrix value(int b, const Vector& x) const { return form.block_value(b, x) / scale; }
  Matrix coeff(int b, int v) const {
    const Matrix* m = form.coefficient_block(b, v);
    return m ? Matrix(*m / scale) : Matrix();
  }
};

struct SpectralState {
  double lam_max = 0.0;  // max eigenvalue of -G(x)
  double smooth = 0.0;   // log-sum-exp value
  Vector grad;
};

SpectralState spectral_eval(const NormalizedForm& nf, const Vector& x, double beta, bool with_grad) {
  const int nb = nf.form.num_blocks();
  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> solvers;
  solvers.reserve(static_cast<std::size_t>(nb));
  double m = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < nb; ++b) {
    solvers.emplace_back(-nf.value(b, x), with_grad ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    m = std::max(m, solvers.back().eigenvalues().maxCoeff());
  }
  double sum = 0.0;
  for (const auto& es : solvers) sum += (beta * (es.eigenvalues().array() - m)).exp().sum();
  SpectralState st;
  st.lam_max = m;
  st.smooth = m + std::log(sum) / beta;
  if (!with_grad) return st;
  st.grad = Vector::Zero(x.size());
  for (int b = 0; b < nb; ++b) {
    const auto& es = solvers[static_cast<std::size_t>(b)];
    const Vector w = (beta * (es.eigenvalues().array() - m)).exp() / sum;
    // d/dx_i of sum_k w_k v_k^T (-G_i) v_k
    Matrix weighted = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    for (int v = 0; v < nf.form.num_vars(); ++v) {
      const Matrix* c = nf.form.coefficient_block(b, v);
      if (!c) continue;
      st.grad(v) -= (weighted.cwiseProduct(*c)).sum() / nf.scale;
    }
  }
  return st;
}

struct BarrierPoint {
  bool ok = false;
  double value = 0.0;
  std::vector<Eigen::LLT<Matrix>> chol;
};

class BarrierProblem {
 public:
  BarrierProblem(const NormalizedForm& nf, double radius, double cap)
      : nf_(nf), radius2_(radius * radius), cap_(cap), nvars_(nf.form.num_vars()) {
    for (int b = 0; b < nf.form.num_blocks(); ++b) {
      std::vector<std::pair<int, Matrix>> coeffs;
      for (int v = 0; v < nvars_; ++v) {
        Matrix c = nf.coeff(b, v);
        if (c.size() > 0) coeffs.emplace_back(v, std::move(c));
      }
      coeffs_.push_back(std::move(coeffs));
    }
  }

  int degree() const { return nf_.form.total_size() + 2; }

  // phi = -tau t - sum log det(G_b(x) - t I) - log(R^2 - |x|^2) - log(cap - t)
  BarrierPoint evaluate(const Vector& x, double t, double tau) const {
    BarrierPoint bp;
    const double r = radius2_ - x.squaredNorm();
    const double c = cap_ - t;
    if (!(r > 0.0) || !(c > 0.0)) return bp;
    double val = -tau * t - std::log(r) - std::log(c);
    for (int b = 0; b < nf_.form.num_blocks(); ++b) {
      Matrix S = nf_.value(b, x);
      S.diagonal().array() -= t;
      Eigen::LLT<Matrix> llt(S);
      if (llt.info() != Eigen::Success) return bp;
      const Matrix& L = llt.matrixL();
      const double logdet = 2.0 * L.diagonal().array().log().sum();
      if (!std::isfinite(logdet)) return bp;
      val -= logdet;
      bp.chol.push_back(std::move(llt));
    }
    bp.ok = true;
    bp.value = val;
    return bp;
  }

  // Newton system in z = (x, t).
  void derivatives(const Vector& x, double t, double tau, const BarrierPoint& bp, Vector& g, Matrix& H) const {
    const int k = nvars_;
    g = Vector::Zero(k + 1);
    H = Matrix::Zero(k + 1, k + 1);
    for (int b = 0; b < nf_.form.num_blocks(); ++b) {
      const auto& llt = bp.chol[static_cast<std::size_t>(b)];
      const auto nbk = nf_.form.constant_block(b).rows();
      const Matrix Sinv = llt.solve(Matrix::Identity(nbk, nbk));
      const auto& cs = coeffs_[static_cast<std::size_t>(b)];
      std::vector<Matrix> T;
      T.reserve(cs.size());
      for (const auto& [v, c] : cs) {
        T.push_back(Sinv * c);
        g(v) -= T.back().trace();
      }
      g(k) += Sinv.trace();
      for (std::size_t a = 0; a < cs.size(); ++a) {
        for (std::size_t e = a; e < cs.size(); ++e) {
          const double h = (T[a].cwiseProduct(T[e].transpose())).sum();
          H(cs[a].first, cs[e].first) += h;
          if (a != e) H(cs[e].first, cs[a].first) += h;
        }
        const double ht = -(T[a].cwiseProduct(Sinv.transpose())).sum();
        H(cs[a].first, k) += ht;
        H(k, cs[a].first) += ht;
      }
      H(k, k) += (Sinv.cwiseProduct(Sinv.transpose())).sum();
    }
    const double r = radius2_ - x.squaredNorm();
    g.head(k) += 2.0 * x / r;
    H.topLeftCorner(k, k) += (2.0 / r) * Matrix::Identity(k, k) + (4.0 / (r * r)) * x * x.transpose();
    const double c = cap_ - t;
    g(k) += -tau + 1.0 / c;
    H(k, k) += 1.0 / (c * c);
  }

 private:
  const NormalizedForm& nf_;
  double radius2_;
  double cap_;
  int nvars_;
  std::vector<std::vector<std::pair<int, Matrix>>> coeffs_;
};

double min_eig(const NormalizedForm& nf, const Vector& x) {
  double lo = std::numeric_limits<double>::infinity();
  for (int b = 0; b < nf.form.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(nf.value(b, x), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace

FeasibilityResult solve_feasibility(const AffineSymmetricForm& form, const SolverOptions& options) {
  if (!(options.margin >= 0.0)) throw std::invalid_argument("solve_feasibility: margin must be >= 0");
  const int k = form.num_vars();
  FeasibilityResult result;
  const NormalizedForm nf{form, form.scale()};
  const double target = options.margin / nf.scale;

  Vector x = Vector::Zero(k);
  if (options.warm_start) {
    if (options.warm_start->size() != k) throw std::invalid_argument("solve_feasibility: warm start length mismatch");
    x = *options.warm_start;
  }

  auto finish = [&](const Vector& xv, int iters, const std::string& note) {
    result.x = xv;
    result.achieved_margin = -max_eig_neg(form, xv);
    result.iterations = iters;
    result.feasible = result.achieved_margin >= options.margin;
    result.diagnostics = note;
    return result;
  };

  if (form.num_blocks() == 0) return finish(x, 0, "empty form");

  // Stage 1: smoothed spectral descent with a doubling temperature.
  Vector best = x;
  double best_lam = spectral_eval(nf, x, 1.0, false).lam_max;
  int iters = 0;
  if (best_lam <= -target) return finish(best, iters, "initial point feasible");

  const int stages = std::max(1, static_cast<int>(std::round(std::log2(options.beta_end / options.beta_start))) + 1);
  const int smooth_budget = options.barrier_refinement ? options.max_iters / 4 : options.max_iters;
  const int per_stage = std::max(1, smooth_budget / stages);
  double step = 1.0;
  for (int s = 0; s < stages && k > 0; ++s) {
    const double beta = options.beta_start * std::pow(2.0, s);
    SpectralState st = spectral_eval(nf, x, beta, true);
    for (int it = 0; it < per_stage; ++it, ++iters) {
      const double gnorm2 = st.grad.squaredNorm();
      if (gnorm2 < 1e-20) break;
      step *= 2.0;
      Vector trial;
      SpectralState next;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial = x - step * st.grad;
        next = spectral_eval(nf, trial, beta, true);
        if (next.smooth <= st.smooth - options.armijo * step * gnorm2) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      const double progress = st.smooth - next.smooth;
      x = trial;
      st = next;
      if (st.lam_max < best_lam) {
        best_lam = st.lam_max;
        best = x;
      }
      if (best_lam <= -target) return finish(best, iters, "smoothed spectral descent");
      if (progress < 1e-13 * std::max(1.0, std::abs(st.smooth))) break;
    }
  }
  if (!options.barrier_refinement || k == 0) return finish(best, iters, "smoothed spectral descent exhausted");

  // Stage 2: maximize t subject to G(x) - tI >= 0 by barrier path following.
  const double radius = options.radius;
  x = best;
  if (x.norm() >= 0.9 * radius) x *= 0.5 * radius / x.norm();
  const double lam0 = min_eig(nf, x);
  if (lam0 >= target) return finish(x, iters, "smoothed spectral descent");
  const double cap = std::max({1.0, 10.0 * target, lam0 + 1.0});
  double t = lam0 - 1e-2 * (1.0 + std::abs(lam0));
  BarrierProblem prob(nf, radius, cap);
  const double nu = prob.degree();
  double tau = nu / (1.0 + std::abs(t) + std::abs(lam0));
  const int barrier_budget = options.max_iters - iters;
  int newton = 0;
  std::ostringstream note;
  while (newton < barrier_budget) {
    BarrierPoint bp = prob.evaluate(x, t, tau);
    if (!bp.ok) {
      note << "barrier lost strict feasibility";
      break;
    }
    bool centered = false;
    for (int inner = 0; inner < 80 && newton < barrier_budget; ++inner, ++newton) {
      Vector g;
      Matrix H;
      prob.derivatives(x, t, tau, bp, g, H);
      Eigen::LDLT<Matrix> ldlt(H);
      Vector d = ldlt.solve(-g);
      if (!d.allFinite()) {
        d = -g;
      }
      const double decrement2 = -g.dot(d);
      if (decrement2 < 2e-9) {
        centered = true;
        break;
      }
      double alpha = 1.0;
      BarrierPoint trial;
      Vector xt;
      double tt = t;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        xt = x + alpha * d.head(k);
        tt = t + alpha * d(k);
        trial = prob.evaluate(xt, tt, tau);
        if (trial.ok && trial.value <= bp.value - 0.25 * alpha * decrement2) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        centered = true;  // numerically converged at this tau
        break;
      }
      x = xt;
      t = tt;
      bp = std::move(trial);
      if (t >= target && min_eig(nf, x) >= target) {
        return finish(x, iters + newton + 1, "barrier path following");
      }
    }
    if (centered) {
      const double upper = t + nu / tau;
      if (upper < target) {
        result.margin_upper_bound = upper * nf.scale;
        note << "margin unattainable within radius: best attainable <= " << result.margin_upper_bound;
        break;
      }
      if (tau > 1e14) {
        note << "barrier parameter exhausted near the feasibility boundary";
        break;
      }
    }
    tau *= 8.0;
  }
  if (newton >= barrier_budget) note << "iteration budget exhausted";
  const double bound = result.margin_upper_bound;
  // keep whichever point is better
  Vector final_x = (-max_eig_neg(form, x) > -max_eig_neg(form, best)) ? x : best;
  finish(final_x, iters + newton, note.str());
  result.margin_upper_bound = bound;
  return result;
}

}  // namespace ffkyp
