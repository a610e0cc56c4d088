#pragma once

#include "ffkyp/core_model.hpp"

#include <string>
#include <vector>

namespace ffkyp {

/// Scheduling parameter curve p(t) with its exact derivative.
class ScheduleTrajectory {
 public:
  enum class Kind { kConstant, kSinusoid, kPiecewiseLinear };

  static ScheduleTrajectory constant(Vector p0);
  /// p(t) = center + amplitude * sin(rate * t + phase), componentwise.
  static ScheduleTrajectory sinusoid(Vector center, Vector amplitude, double rate, double phase = 0.0);
  /// Linear interpolation through (times[k], values[k]); held constant outside.
  static ScheduleTrajectory piecewise_linear(std::vector<double> times, std::vector<Vector> values);
  /// Parses `const:<p>`, `sin:<center>:<amplitude>:<rate>[:<phase>]` or
  /// `pwl:<t0>=<p0>,<t1>=<p1>,...` (scalar parameter).
  static ScheduleTrajectory parse(const std::string& spec);
  /// 0.15 + 0.05 sin(4t), the schedule of the built-in example simulations.
  static ScheduleTrajectory example1_default();

  Kind kind() const { return kind_; }
  std::size_t size() const { return static_cast<std::size_t>(center_.size()); }
  Vector p(double t) const;
  Vector pdot(double t) const;
  std::string to_string() const;

  /// Largest violation of the parameter box (and of its rate box when
  /// `check_rate`) over uniformly sampled times; 0 means inside.
  double box_excursion(const ParameterBox& box, double t_end, int samples, bool check_rate) const;

 private:
  Kind kind_ = Kind::kConstant;
  Vector center_;
  Vector amplitude_;
  double rate_ = 0.0;
  double phase_ = 0.0;
  std::vector<double> times_;
  std::vector<Vector> values_;
};

}  // namespace ffkyp
