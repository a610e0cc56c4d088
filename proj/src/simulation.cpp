#include "ffkyp/simulation.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ffkyp {

namespace {

double to_double(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw std::invalid_argument("signal: bad number '" + s + "' in '" + spec + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

BandLimitedSignal::BandLimitedSignal(std::vector<Component> components, double discount_lambda)
    : components_(std::move(components)), lambda_(discount_lambda) {
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("signal: discount must be >= 0");
  for (const auto& c : components_) {
    if (!std::isfinite(c.amplitude) || !std::isfinite(c.frequency) || !std::isfinite(c.phase)) {
      throw std::invalid_argument("signal: non-finite component");
    }
    if (c.frequency < 0.0) throw std::invalid_argument("signal: frequencies must be >= 0");
  }
  if (lambda_ > 0.0) {
    double wmin = std::numeric_limits<double>::infinity();
    for (const auto& c : components_) wmin = std::min(wmin, c.frequency);
    if (!(lambda_ < wmin / 10.0)) throw std::invalid_argument("signal: discount must stay below a tenth of the lowest frequency");
  }
}

BandLimitedSignal BandLimitedSignal::in_band(std::vector<Component> components, const FrequencyRange& range,
                                             double discount_lambda) {
  for (const auto& c : components) {
    if (!range.contains(c.frequency)) {
      std::ostringstream os;
      os << "signal: component at " << c.frequency << " rad/s lies outside " << range.to_string();
      throw std::invalid_argument(os.str());
    }
  }
  return BandLimitedSignal(std::move(components), discount_lambda);
}

BandLimitedSignal BandLimitedSignal::parse(const std::string& spec, double discount_lambda) {
  std::vector<Component> comps;
  if (spec.empty() || spec == "zero") return BandLimitedSignal({}, discount_lambda);
  for (const auto& item : split(spec, ',')) {
    Component c;
    std::string body = item;
    const std::size_t at = item.find('@');
    if (at != std::string::npos) {
      c.frequency = to_double(item.substr(at + 1), spec);
      body = item.substr(0, at);
    }
    const auto parts = split(body, ':');
    if (parts.size() != 3 || parts[0] != "cos") {
      throw std::invalid_argument("signal: expected cos:<amp>:<phase>[@<freq>], got '" + item + "'");
    }
    c.amplitude = to_double(parts[1], spec);
    c.phase = to_double(parts[2], spec);
    comps.push_back(c);
  }
  return BandLimitedSignal(std::move(comps), discount_lambda);
}

BandLimitedSignal BandLimitedSignal::example1() {
  return BandLimitedSignal({{1.0, 1.0, 8.0}, {1.0, 1.0, 10.0}, {1.0, 1.0, 20.0}});
}

double BandLimitedSignal::sample(double t) const {
  if (t < 0.0) return 0.0;
  double s = 0.0;
  for (const auto& c : components_) s += c.amplitude * std::cos(c.frequency * t + c.phase);
  return lambda_ > 0.0 ? std::exp(-lambda_ * t) * s : s;
}

double BandLimitedSignal::max_frequency() const {
  double w = 0.0;
  for (const auto& c : components_) w = std::max(w, c.frequency);
  return w;
}

std::string BandLimitedSignal::to_string() const {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    os << (i ? "," : "") << "cos:" << c.amplitude << ':' << c.phase;
    if (c.frequency != 1.0) os << '@' << c.frequency;
  }
  return os.str();
}

SimulationResult simulate(const LpvSystem& system, const ScheduleTrajectory& trajectory,
                          const BandLimitedSignal& signal, double t_end, double step) {
  if (!(step > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("simulate: need step > 0 and t_end >= 0");
  if (trajectory.size() != system.num_params()) throw std::invalid_argument("simulate: trajectory/system parameter mismatch");
  const double wmax = signal.max_frequency();
  if (wmax > 0.0 && step > 1.0 / (10.0 * wmax)) {
    throw std::invalid_argument("simulate: step must not exceed 1/(10 * highest input frequency)");
  }
  const int N = t_end == 0.0 ? 0 : std::max(1, static_cast<int>(std::llround(t_end / step)));
  const double h = N == 0 ? step : t_end / N;
  const auto n = system.states();
  const auto m = system.inputs();
  const auto q = system.outputs();

  auto uvec = [&](double t) { return Vector::Constant(m, signal.sample(t)); };
  auto rhs = [&](double t, const Vector& x) -> Vector {
    const Vector p = trajectory.p(t);
    return system.A()(p) * x + system.B()(p) * uvec(t);
  };

  SimulationResult r;
  r.step = h;
  r.u.resize(N + 1, m);
  r.x.resize(N + 1, n);
  r.x_dot.resize(N + 1, n);
  r.y.resize(N + 1, q);
  r.p.resize(N + 1, static_cast<Eigen::Index>(system.num_params()));
  Vector x = Vector::Zero(n);
  for (int k = 0; k <= N; ++k) {
    const double t = k * h;
    const Vector p = trajectory.p(t);
    const Vector u = uvec(t);
    r.times.push_back(t);
    r.u.row(k) = u.transpose();
    r.x.row(k) = x.transpose();
    r.x_dot.row(k) = (system.A()(p) * x + system.B()(p) * u).transpose();
    r.y.row(k) = (system.C()(p) * x + system.D()(p) * u).transpose();
    if (p.size() > 0) r.p.row(k) = p.transpose();
    if (k == N) break;
    const Vector k1 = rhs(t, x);
    const Vector k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = rhs(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw std::runtime_error("integration diverged");
  }
  return r;
}

std::vector<double> performance_ratio(const SimulationResult& result) {
  const std::size_t N = result.times.size();
  std::vector<double> g(N, std::numeric_limits<double>::quiet_NaN());
  double eu = 0.0, ey = 0.0;
  for (std::size_t k = 1; k < N; ++k) {
    const double dt = result.times[k] - result.times[k - 1];
    const auto i = static_cast<Eigen::Index>(k);
    eu += 0.5 * dt * (result.u.row(i - 1).squaredNorm() + result.u.row(i).squaredNorm());
    ey += 0.5 * dt * (result.y.row(i - 1).squaredNorm() + result.y.row(i).squaredNorm());
    if (eu > 0.0) g[k] = std::sqrt(ey / eu);
  }
  if (N == 0 || !(eu > 0.0)) throw std::invalid_argument("performance_ratio: input energy is zero");
  return g;
}

const char* to_string(IqcVerdict v) { return v == IqcVerdict::kNonnegative ? "nonnegative" : "negative"; }

IqcReport iqc_value(const SimulationResult& result, const FrequencyWeight& weight) {
  const Eigen::Matrix2cd& psi = weight.psi;
  // For real signals He(z) = 2 Re z.
  auto integrand = [&](Eigen::Index i) {
    const auto xd = result.x_dot.row(i);
    const auto x = result.x.row(i);
    const Complex z = psi(0, 0) * xd.squaredNorm() + (psi(0, 1) + psi(1, 0)) * xd.dot(x) + psi(1, 1) * x.squaredNorm();
    return 2.0 * z.real();
  };
  auto magnitude = [&](Eigen::Index i) {
    return 2.0 * (std::abs(psi(0, 0)) * result.x_dot.row(i).squaredNorm() +
                  std::abs(psi(1, 1)) * result.x.row(i).squaredNorm());
  };
  IqcReport rep;
  const std::size_t N = result.times.size();
  rep.s_curve.assign(N, 0.0);
  double s = 0.0, scale = 0.0;
  for (std::size_t k = 1; k < N; ++k) {
    const double dt = result.times[k] - result.times[k - 1];
    const auto i = static_cast<Eigen::Index>(k);
    s += 0.5 * dt * (integrand(i - 1) + integrand(i));
    scale += 0.5 * dt * (magnitude(i - 1) + magnitude(i));
    rep.s_curve[k] = s;
  }
  rep.final_value = s;
  rep.tolerance = 1e-9 * scale;
  rep.verdict = s >= -rep.tolerance ? IqcVerdict::kNonnegative : IqcVerdict::kNegative;
  return rep;
}

double spectrum_fraction(const Matrix& samples, double dt, const FrequencyRange& range) {
  const Eigen::Index N = samples.rows();
  if (N == 0 || samples.cwiseAbs().maxCoeff() == 0.0) return 1.0;
  Eigen::FFT<double> fft;
  double inside = 0.0, total = 0.0;
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    std::vector<double> buf(static_cast<std::size_t>(N));
    for (Eigen::Index k = 0; k < N; ++k) {
      const double w = N == 1 ? 1.0 : 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / (N - 1));
      buf[static_cast<std::size_t>(k)] = w * samples(k, c);
    }
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, buf);
    for (Eigen::Index k = 0; k < N; ++k) {
      const Eigen::Index kk = k <= N / 2 ? k : k - N;
      const double omega = 2.0 * std::numbers::pi * static_cast<double>(kk) / (N * dt);
      const double e = std::norm(spec[static_cast<std::size_t>(k)]);
      total += e;
      if (range.contains(omega)) inside += e;
    }
  }
  return total > 0.0 ? inside / total : 1.0;
}

double dft_energy(const Matrix& samples, double dt) {
  const Eigen::Index N = samples.rows();
  if (N == 0) return 0.0;
  Eigen::FFT<double> fft;
  double e = 0.0;
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    std::vector<double> buf(samples.col(c).data(), samples.col(c).data() + N);
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, buf);
    for (const auto& z : spec) e += std::norm(z);
  }
  return dt * e / static_cast<double>(N);
}

double time_energy(const Matrix& samples, double dt) {
  double e = 0.0;
  for (Eigen::Index k = 1; k < samples.rows(); ++k) {
    e += 0.5 * dt * (samples.row(k - 1).squaredNorm() + samples.row(k).squaredNorm());
  }
  return e;
}

}  // namespace ffkyp
