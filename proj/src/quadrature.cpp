#include "ffkyp/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ffkyp {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

namespace {

constexpr int kMinPanelNodes = 24;

void append_interval(QuadratureRule& out, const QuadratureRule& gl, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    out.nodes.push_back(mid + half * gl.nodes[k]);
    out.weights.push_back(half * gl.weights[k]);
  }
}

// Composite rule on [u0, u1] split at the given interior points.
QuadratureRule panels(double u0, double u1, std::vector<double> cuts, int nodes) {
  std::vector<double> edges{u0};
  std::sort(cuts.begin(), cuts.end());
  const double tol = 1e-9 * (u1 - u0);
  for (double c : cuts) {
    if (c > edges.back() + tol && c < u1 - tol) edges.push_back(c);
  }
  edges.push_back(u1);
  const int count = static_cast<int>(edges.size()) - 1;
  const int per = count == 1 ? nodes : std::max(kMinPanelNodes, (nodes + count - 1) / count);
  const QuadratureRule gl = gauss_legendre(per);
  QuadratureRule out;
  for (int i = 0; i < count; ++i) append_interval(out, gl, edges[i], edges[i + 1]);
  return out;
}

}  // namespace

QuadratureRule frequency_rule(const FrequencyRange& range, int nodes_per_band, const std::vector<double>& breakpoints) {
  if (nodes_per_band < 1) throw std::invalid_argument("frequency_rule: need at least one node");
  QuadratureRule out;
  switch (range.kind()) {
    case FrequencyRange::Kind::kLow:
    case FrequencyRange::Kind::kMiddle: {
      const double a = range.kind() == FrequencyRange::Kind::kLow ? 0.0 : range.band_lower();
      const double b = range.kind() == FrequencyRange::Kind::kLow ? range.low_cutoff() : range.band_upper();
      out = panels(a, b, breakpoints, nodes_per_band);
      break;
    }
    case FrequencyRange::Kind::kHigh: {
      const double wh = range.high_cutoff();
      std::vector<double> cuts;
      for (double w : breakpoints) {
        if (w > wh) cuts.push_back(wh / w);
      }
      const QuadratureRule s = panels(0.0, 1.0, cuts, nodes_per_band);
      for (std::size_t k = 0; k < s.nodes.size(); ++k) {
        out.nodes.push_back(wh / s.nodes[k]);
        out.weights.push_back(s.weights[k] * wh / (s.nodes[k] * s.nodes[k]));
      }
      break;
    }
    case FrequencyRange::Kind::kEntire: {
      std::vector<double> cuts;
      for (double w : breakpoints) {
        if (w > 0.0) cuts.push_back(std::atan(w));
      }
      const QuadratureRule th = panels(0.0, 0.5 * std::numbers::pi, cuts, nodes_per_band);
      for (std::size_t k = 0; k < th.nodes.size(); ++k) {
        const double c = std::cos(th.nodes[k]);
        out.nodes.push_back(std::tan(th.nodes[k]));
        out.weights.push_back(th.weights[k] / (c * c));
      }
      break;
    }
  }
  return out;
}

std::vector<double> resonance_breakpoints(const Matrix& A) {
  std::vector<double> out;
  if (A.rows() == 0) return out;
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(A, false).eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double nu = std::abs(ev(i).imag());
    const double d = std::max(std::abs(ev(i).real()), 1e-12 * std::abs(ev(i)));
    if (!(d > 0.0) || !std::isfinite(nu)) continue;
    if (nu > 0.0) out.push_back(nu);
    double step = d;
    for (int k = 0; k <= 8; ++k, step *= 4.0) {
      out.push_back(nu + step);
      if (nu - step > 0.0) out.push_back(nu - step);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

Matrix pairwise(const std::vector<Matrix>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return terms[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(terms, lo, mid) + pairwise(terms, mid, hi);
}

}  // namespace

Matrix pairwise_sum(const std::vector<Matrix>& terms) {
  if (terms.empty()) throw std::invalid_argument("pairwise_sum: no terms");
  return pairwise(terms, 0, terms.size());
}

}  // namespace ffkyp
