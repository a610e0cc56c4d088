#include "ffkyp/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ffkyp {

namespace {

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("schedule: bad number '" + s + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

ScheduleTrajectory ScheduleTrajectory::constant(Vector p0) {
  ScheduleTrajectory s;
  s.kind_ = Kind::kConstant;
  s.center_ = std::move(p0);
  s.amplitude_ = Vector::Zero(s.center_.size());
  return s;
}

ScheduleTrajectory ScheduleTrajectory::sinusoid(Vector center, Vector amplitude, double rate, double phase) {
  if (center.size() != amplitude.size()) throw std::invalid_argument("schedule: center/amplitude size mismatch");
  ScheduleTrajectory s;
  s.kind_ = Kind::kSinusoid;
  s.center_ = std::move(center);
  s.amplitude_ = std::move(amplitude);
  s.rate_ = rate;
  s.phase_ = phase;
  return s;
}

ScheduleTrajectory ScheduleTrajectory::piecewise_linear(std::vector<double> times, std::vector<Vector> values) {
  if (times.empty() || times.size() != values.size()) throw std::invalid_argument("schedule: need matching, non-empty samples");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("schedule: sample times must increase");
    if (values[k].size() != values[0].size()) throw std::invalid_argument("schedule: sample size mismatch");
  }
  ScheduleTrajectory s;
  s.kind_ = Kind::kPiecewiseLinear;
  s.center_ = values.front();
  s.amplitude_ = Vector::Zero(s.center_.size());
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

ScheduleTrajectory ScheduleTrajectory::example1_default() {
  return sinusoid(Vector::Constant(1, 0.15), Vector::Constant(1, 0.05), 4.0);
}

ScheduleTrajectory ScheduleTrajectory::parse(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw std::invalid_argument("schedule: empty spec");
  const std::string& head = parts[0];
  if (head == "const" && parts.size() == 2) {
    return constant(Vector::Constant(1, to_double(parts[1], spec)));
  }
  if (head == "sin" && (parts.size() == 4 || parts.size() == 5)) {
    const double phase = parts.size() == 5 ? to_double(parts[4], spec) : 0.0;
    return sinusoid(Vector::Constant(1, to_double(parts[1], spec)), Vector::Constant(1, to_double(parts[2], spec)),
                    to_double(parts[3], spec), phase);
  }
  if (head == "pwl" && parts.size() == 2) {
    std::vector<double> ts;
    std::vector<Vector> vs;
    for (const auto& item : split(parts[1], ',')) {
      const auto kv = split(item, '=');
      if (kv.size() != 2) throw std::invalid_argument("schedule: expected t=p in '" + item + "'");
      ts.push_back(to_double(kv[0], spec));
      vs.push_back(Vector::Constant(1, to_double(kv[1], spec)));
    }
    return piecewise_linear(std::move(ts), std::move(vs));
  }
  throw std::invalid_argument("schedule: cannot parse '" + spec +
                              "' (expected const:<p>, sin:<c>:<a>:<rate>[:<phase>], pwl:<t>=<p>,...)");
}

Vector ScheduleTrajectory::p(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return center_;
    case Kind::kSinusoid:
      return center_ + amplitude_ * std::sin(rate_ * t + phase_);
    case Kind::kPiecewiseLinear: {
      if (t <= times_.front()) return values_.front();
      if (t >= times_.back()) return values_.back();
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - times_.begin());
      const double s = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
      return (1.0 - s) * values_[k - 1] + s * values_[k];
    }
  }
  return center_;
}

Vector ScheduleTrajectory::pdot(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return Vector::Zero(center_.size());
    case Kind::kSinusoid:
      return amplitude_ * (rate_ * std::cos(rate_ * t + phase_));
    case Kind::kPiecewiseLinear: {
      if (t < times_.front() || t >= times_.back()) return Vector::Zero(center_.size());
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - times_.begin());
      return (values_[k] - values_[k - 1]) / (times_[k] - times_[k - 1]);
    }
  }
  return Vector::Zero(center_.size());
}

std::string ScheduleTrajectory::to_string() const {
  std::ostringstream os;
  os.precision(10);
  switch (kind_) {
    case Kind::kConstant:
      os << "const:" << center_(0);
      break;
    case Kind::kSinusoid:
      os << "sin:" << center_(0) << ':' << amplitude_(0) << ':' << rate_;
      if (phase_ != 0.0) os << ':' << phase_;
      break;
    case Kind::kPiecewiseLinear:
      os << "pwl:";
      for (std::size_t k = 0; k < times_.size(); ++k) os << (k ? "," : "") << times_[k] << '=' << values_[k](0);
      break;
  }
  return os.str();
}

double ScheduleTrajectory::box_excursion(const ParameterBox& box, double t_end, int samples, bool check_rate) const {
  if (box.size() != size()) throw std::invalid_argument("schedule: box dimension mismatch");
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = samples == 0 ? 0.0 : t_end * k / samples;
    const Vector pv = p(t);
    worst = std::max({worst, (box.p_lower - pv).maxCoeff(), (pv - box.p_upper).maxCoeff()});
    if (check_rate) {
      const Vector r = pdot(t);
      worst = std::max({worst, (box.rate_lower - r).maxCoeff(), (r - box.rate_upper).maxCoeff()});
    }
  }
  return worst;
}

}  // namespace ffkyp
