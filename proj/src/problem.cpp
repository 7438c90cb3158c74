#include "stwave/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stwave {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double WaveSpeedModel::speed_at(double x) const {
  size_t i = 0;
  while (i < interfaces.size() && x >= interfaces[i]) ++i;
  return speeds[i];
}

void WaveSpeedModel::validate() const {
  if (speeds.size() != interfaces.size() + 1) {
    throw std::invalid_argument("wave speed model: need one speed per layer");
  }
  for (double c : speeds) {
    if (!(c > 0.0)) throw std::invalid_argument("wave speed model: speeds must be positive");
  }
  for (size_t i = 0; i < interfaces.size(); ++i) {
    if (!(interfaces[i] > 0.0 && interfaces[i] < 1.0)) {
      throw std::invalid_argument("wave speed model: interfaces must lie inside (0,1)");
    }
    if (i > 0 && !(interfaces[i] > interfaces[i - 1])) {
      throw std::invalid_argument("wave speed model: interfaces must be increasing");
    }
  }
}

WaveSpeedModel WaveSpeedModel::single_interface(double c1, double c2) {
  WaveSpeedModel m;
  m.interfaces = {0.5};
  m.speeds = {c1, c2};
  m.validate();
  return m;
}

WaveSpeedModel WaveSpeedModel::three_layer(double p1, double p2, double c1, double c2) {
  WaveSpeedModel m;
  m.interfaces = {p1, p2};
  m.speeds = {c1, c2, c1};
  m.validate();
  return m;
}

SingleInterfaceSolution::SingleInterfaceSolution(double c1, double c2)
    : c1_(c1), c2_(c2), w1_(3.0 * kPi), w2_(3.0 * kPi * c1 / c2) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw std::invalid_argument("SingleInterfaceSolution: speeds must be positive");
  }
}

double SingleInterfaceSolution::value(double x, double, double t) const {
  if (x < 0.5) return std::cos(w1_ * c1_ * t) * std::cos(w1_ * (x - 0.5));
  return std::cos(w2_ * c2_ * t) * std::cos(w2_ * (x - 0.5));
}

double SingleInterfaceSolution::dt(double x, double, double t) const {
  if (x < 0.5) return -w1_ * c1_ * std::sin(w1_ * c1_ * t) * std::cos(w1_ * (x - 0.5));
  return -w2_ * c2_ * std::sin(w2_ * c2_ * t) * std::cos(w2_ * (x - 0.5));
}

ThreeLayerSolution::ThreeLayerSolution(double p1, int n, double c1, double c2)
    : p1_(p1), c1_(c1), c2_(c2), w1_(3.0 * kPi), w2_(3.0 * kPi * c1 / c2), w3_(3.0 * kPi) {
  p2_ = (2.0 * kPi * n + w2_ * p1) / w2_;
  if (!(p2_ > p1_ && p2_ < 1.0)) {
    throw std::invalid_argument("ThreeLayerSolution: derived p2 = " +
                                std::to_string(p2_) + " not inside (p1, 1)");
  }
}

double ThreeLayerSolution::value(double x, double, double t) const {
  if (x < p1_) return std::cos(w1_ * c1_ * t) * std::cos(w1_ * (x - p1_));
  if (x < p2_) return std::cos(w2_ * c2_ * t) * std::cos(w2_ * (x - p1_));
  return std::cos(w3_ * c1_ * t) * std::cos(w3_ * (x - p2_));
}

double ThreeLayerSolution::dt(double x, double, double t) const {
  if (x < p1_) return -w1_ * c1_ * std::sin(w1_ * c1_ * t) * std::cos(w1_ * (x - p1_));
  if (x < p2_) return -w2_ * c2_ * std::sin(w2_ * c2_ * t) * std::cos(w2_ * (x - p1_));
  return -w3_ * c1_ * std::sin(w3_ * c1_ * t) * std::cos(w3_ * (x - p2_));
}

RampSolution::RampSolution(const WaveSpeedModel& speed, double a0, double a1,
                           double p_left, double slope_left)
    : a0_(a0), a1_(a1) {
  breaks_ = speed.interfaces;
  values_.resize(breaks_.size() + 1);
  slopes_.resize(breaks_.size() + 1);
  values_[0] = p_left;
  slopes_[0] = slope_left;
  // continuity of the value and of the flux c^2 p' at every interface
  for (size_t i = 0; i < breaks_.size(); ++i) {
    const double x_prev = i == 0 ? 0.0 : breaks_[i - 1];
    values_[i + 1] = values_[i] + slopes_[i] * (breaks_[i] - x_prev);
    const double c2a = speed.speeds[i] * speed.speeds[i];
    const double c2b = speed.speeds[i + 1] * speed.speeds[i + 1];
    slopes_[i + 1] = slopes_[i] * c2a / c2b;
  }
}

double RampSolution::shape(double x) const {
  size_t i = 0;
  while (i < breaks_.size() && x >= breaks_[i]) ++i;
  const double x0 = i == 0 ? 0.0 : breaks_[i - 1];
  return values_[i] + slopes_[i] * (x - x0);
}

double RampSolution::value(double x, double, double t) const {
  return (a0_ + a1_ * t) * shape(x);
}

double RampSolution::dt(double x, double, double) const { return a1_ * shape(x); }

bool DataDomain::contains(double x, double y) const {
  for (const auto& b : boxes) {
    if (x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1) return true;
  }
  return false;
}

DataDomain DataDomain::intervals_1d(std::span<const std::pair<double, double>> iv) {
  DataDomain d;
  for (const auto& [a, b] : iv) d.boxes.push_back({a, b, 0.0, 1.0});
  return d;
}

DataDomain DataDomain::frame_2d() {
  DataDomain d;
  d.boxes.push_back({0.0, 0.25, 0.0, 1.0});
  d.boxes.push_back({0.75, 1.0, 0.0, 1.0});
  d.boxes.push_back({0.25, 0.75, 0.0, 0.25});
  d.boxes.push_back({0.25, 0.75, 0.75, 1.0});
  return d;
}

namespace {

// Piecewise-linear travel time from 0 to x: integral of 1/c.
struct TravelTime {
  std::vector<double> breaks;  // 0, interfaces..., 1
  std::vector<double> tau;     // cumulative travel time at each break
  std::vector<double> inv_c;   // per segment

  explicit TravelTime(const WaveSpeedModel& m) {
    breaks.push_back(0.0);
    for (double p : m.interfaces) breaks.push_back(p);
    breaks.push_back(1.0);
    tau.resize(breaks.size(), 0.0);
    inv_c.resize(breaks.size() - 1);
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
      inv_c[i] = 1.0 / m.speeds[i];
      tau[i + 1] = tau[i] + (breaks[i + 1] - breaks[i]) * inv_c[i];
    }
  }
  double operator()(double x) const {
    size_t i = 0;
    while (i + 2 < breaks.size() && x >= breaks[i + 1]) ++i;
    return tau[i] + (x - breaks[i]) * inv_c[i];
  }
};

std::vector<std::pair<double, double>> merged_intervals(const DataDomain& omega) {
  std::vector<std::pair<double, double>> iv;
  for (const auto& b : omega.boxes) {
    iv.emplace_back(std::clamp(b.x0, 0.0, 1.0), std::clamp(b.x1, 0.0, 1.0));
  }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& [a, b] : iv) {
    if (!(b > a)) continue;
    if (!merged.empty() && a <= merged.back().second + 1e-14) {
      merged.back().second = std::max(merged.back().second, b);
    } else {
      merged.emplace_back(a, b);
    }
  }
  return merged;
}

}  // namespace

double gcc_threshold(const WaveSpeedModel& speed, const DataDomain& omega) {
  speed.validate();
  const auto iv = merged_intervals(omega);
  if (iv.empty()) throw std::invalid_argument("gcc_threshold: empty data domain");
  const TravelTime tau(speed);
  // dist(x, omega) is piecewise linear in tau(x) and vanishes on omega; its
  // maximum is one of: the margin before the first interval, after the last,
  // or half of a gap between consecutive intervals.
  double worst = tau(iv.front().first) - tau(0.0);
  worst = std::max(worst, tau(1.0) - tau(iv.back().second));
  for (size_t i = 0; i + 1 < iv.size(); ++i) {
    worst = std::max(worst, 0.5 * (tau(iv[i + 1].first) - tau(iv[i].second)));
  }
  return 2.0 * worst;
}

}  // namespace stwave
