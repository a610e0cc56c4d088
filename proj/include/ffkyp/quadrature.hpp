#pragma once

#include "ffkyp/core_model.hpp"

#include <vector>

namespace ffkyp {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Rule over the non-negative part of a frequency range: for an integrand g,
/// ∫_Ω g(ω) dω ≈ Σ w_k (g(ω_k) + g(-ω_k)). Unbounded bands are mapped onto
/// finite intervals (ω = ϖh/s for high, ω = tan θ for the whole axis).
/// Breakpoints inside a band split it into panels that share the node budget
/// (at least 24 nodes each).
QuadratureRule frequency_rule(const FrequencyRange& range, int nodes_per_band,
                              const std::vector<double>& breakpoints = {});

/// Panel edges around the resonances of A: |Im λ| and |Im λ| ± |Re λ|·4^k.
std::vector<double> resonance_breakpoints(const Matrix& A);

/// Order-independent pairwise reduction of equally shaped matrices.
Matrix pairwise_sum(const std::vector<Matrix>& terms);

}  // namespace ffkyp
