#pragma once

#include "ffkyp/core_model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace ffkyp::testing {

inline Matrix random_matrix(std::mt19937& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

inline double max_real_eig(const Matrix& A) { return Eigen::EigenSolver<Matrix>(A).eigenvalues().real().maxCoeff(); }

// Hurwitz A with eigenvalue real parts in [-hi, -lo].
inline Matrix random_stable(std::mt19937& rng, Eigen::Index n, double lo = 0.2, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (;;) {
    Matrix A = random_matrix(rng, n, n);
    const double shift = max_real_eig(A) + u(rng);
    A -= shift * Matrix::Identity(n, n);
    const auto ev = Eigen::EigenSolver<Matrix>(A).eigenvalues();
    if (ev.real().minCoeff() >= -hi - 3.0) return A;
  }
}

inline StateSpace random_lti(std::mt19937& rng, Eigen::Index n, Eigen::Index m = 1, Eigen::Index q = 1) {
  return {random_stable(rng, n), random_matrix(rng, n, m), random_matrix(rng, q, n), random_matrix(rng, q, m, 0.3)};
}

// Grid sup of σ_max(G(jω)) over the band, polished by golden-section search
// around the best grid point. Unbounded bands use ω = a + tan θ.
inline double brute_force_sup(const StateSpace& s, const FrequencyRange& range, int points = 2001) {
  double best = 0.0;
  for (const auto& [a, b] : range.positive_bands()) {
    const bool finite = std::isfinite(b);
    auto omega = [&](double u) { return finite ? a + (b - a) * u : a + std::tan(u * 0.5 * M_PI); };
    auto g = [&](double u) { return sigma_max(transfer_function(s, omega(u))); };
    const int last = finite ? points - 1 : points;
    int arg = 0;
    double top = -1.0;
    for (int k = 0; k <= (finite ? last : last - 1); ++k) {
      const double v = g(static_cast<double>(k) / last);
      if (v > top) top = v, arg = k;
    }
    double lo = std::max(0.0, (arg - 1.0) / last);
    double hi = std::min(finite ? 1.0 : 1.0 - 1e-9, (arg + 1.0) / last);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
      if (g(m1) < g(m2)) lo = m1; else hi = m2;
    }
    best = std::max({best, top, g(0.5 * (lo + hi))});
  }
  return best;
}

}  // namespace ffkyp::testing
