#pragma once

#include "ffkyp/core_model.hpp"
#include "ffkyp/trajectory.hpp"

#include <string>
#include <vector>

namespace ffkyp {

/// u(t) = e^{-λt} Σ a_i cos(ω_i t + φ_i) for t >= 0 and 0 before. Every
/// input channel receives the same signal.
class BandLimitedSignal {
 public:
  struct Component {
    double amplitude = 1.0;
    double frequency = 1.0;  // rad/s
    double phase = 0.0;      // rad
  };

  BandLimitedSignal() = default;
  explicit BandLimitedSignal(std::vector<Component> components, double discount_lambda = 0.0);
  /// Same, but every frequency must lie in `range`.
  static BandLimitedSignal in_band(std::vector<Component> components, const FrequencyRange& range,
                                   double discount_lambda = 0.0);
  /// Comma-separated `cos:<amp>:<phase>[@<freq>]`, frequency defaulting to 1 rad/s.
  static BandLimitedSignal parse(const std::string& spec, double discount_lambda = 0.0);
  /// cos(t+8) + cos(t+10) + cos(t+20).
  static BandLimitedSignal example1();

  double sample(double t) const;
  const std::vector<Component>& components() const { return components_; }
  double discount_lambda() const { return lambda_; }
  double max_frequency() const;
  std::string to_string() const;

 private:
  std::vector<Component> components_;
  double lambda_ = 0.0;
};

/// Rows are time samples.
struct SimulationResult {
  std::vector<double> times;
  Matrix u;
  Matrix x;
  Matrix x_dot;
  Matrix y;
  Matrix p;
  double step = 0.0;
};

/// RK4 from x(0) = 0 with u and p evaluated at the stage times. x_dot is the
/// right-hand side at the sample times.
SimulationResult simulate(const LpvSystem& system, const ScheduleTrajectory& trajectory,
                          const BandLimitedSignal& signal, double t_end, double step);

/// √(∫ y^T y / ∫ u^T u) with trapezoidal running integrals; NaN while the
/// input energy is still zero.
std::vector<double> performance_ratio(const SimulationResult& result);

enum class IqcVerdict { kNonnegative, kNegative };

const char* to_string(IqcVerdict v);

struct IqcReport {
  std::vector<double> s_curve;
  double final_value = 0.0;
  IqcVerdict verdict = IqcVerdict::kNonnegative;
  /// Dead-band half-width used for the verdict.
  double tolerance = 0.0;
};

/// Running ∫ He([ẋ; x]^* (Ψ⊗I) [ẋ; x]) dτ.
IqcReport iqc_value(const SimulationResult& result, const FrequencyWeight& weight);

/// Share of Hann-windowed DFT energy whose bin frequency lies in `range`
/// (1 for an all-zero signal). Columns of `samples` are channels.
double spectrum_fraction(const Matrix& samples, double dt, const FrequencyRange& range);

/// dt/N Σ_k |X_k|² with a rectangular window (Parseval counterpart of dt Σ x_n²).
double dft_energy(const Matrix& samples, double dt);

/// Trapezoidal ∫ of the summed squared channels.
double time_energy(const Matrix& samples, double dt);

}  // namespace ffkyp
