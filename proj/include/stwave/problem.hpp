#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stwave/mesh.hpp"

namespace stwave {

/// Piecewise-constant wave speed on (0,1), constant in y for 2D problems.
/// speeds[i] applies between interfaces[i-1] and interfaces[i].
struct WaveSpeedModel {
  std::vector<double> interfaces;  // sorted, strictly inside (0,1)
  std::vector<double> speeds;      // size interfaces.size()+1, all > 0

  double speed_at(double x) const;
  double csq_at(double x) const { double c = speed_at(x); return c * c; }
  void validate() const;

  static WaveSpeedModel single_interface(double c1, double c2 = 1.0);
  static WaveSpeedModel three_layer(double p1, double p2, double c1,
                                    double c2 = 1.0);
};

/// Reference solution interface. 1D solutions ignore y.
class ExactSolution {
 public:
  virtual ~ExactSolution() = default;
  virtual double value(double x, double y, double t) const = 0;
  virtual double dt(double x, double y, double t) const = 0;
};

/// Standing wave with one interface at x=0.5, matched so that value and
/// flux c^2 u_x are continuous there. Frequencies: w1 = 3*pi, w2 = w1*c1/c2.
class SingleInterfaceSolution final : public ExactSolution {
 public:
  explicit SingleInterfaceSolution(double c1, double c2 = 1.0);
  double value(double x, double y, double t) const override;
  double dt(double x, double y, double t) const override;
  double c1() const { return c1_; }

 private:
  double c1_, c2_, w1_, w2_;
};

/// Three-layer standing wave with interfaces at p1 and the derived
/// p2 = (2*pi*n + w2*p1)/w2, which makes the middle branch close a full
/// period: cos(w2*(p2-p1)) = 1. Speeds (c1, c2, c1), frequencies
/// (w1, w1*c1/c2, w1) with w1 = 3*pi.
class ThreeLayerSolution final : public ExactSolution {
 public:
  ThreeLayerSolution(double p1, int n, double c1, double c2 = 1.0);
  double value(double x, double y, double t) const override;
  double dt(double x, double y, double t) const override;
  double p1() const { return p1_; }
  double p2() const { return p2_; }

 private:
  double p1_, p2_, c1_, c2_, w1_, w2_, w3_;
};

class ZeroSolution final : public ExactSolution {
 public:
  double value(double, double, double) const override { return 0.0; }
  double dt(double, double, double) const override { return 0.0; }
};

/// (a0 + a1*t) * p(x) with p continuous piecewise linear and flux-matched:
/// c^2 p' constant across interfaces. Solves the wave equation exactly and
/// lies in every tensor space with k,q >= 1, which makes it a reproduction
/// test for the whole pipeline.
class RampSolution final : public ExactSolution {
 public:
  RampSolution(const WaveSpeedModel& speed, double a0, double a1,
               double p_left, double slope_left);
  double value(double x, double y, double t) const override;
  double dt(double x, double y, double t) const override;

 private:
  double shape(double x) const;
  std::vector<double> breaks_, values_, slopes_;
  double a0_, a1_;
};

/// Axis-aligned box; 1D domains use the x extent with y spanning [0,1].
struct DataBox {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 1.0;
};

/// Union of closed boxes describing the measurement region (or an error
/// region). Meshes must be fitted to the box boundaries.
struct DataDomain {
  std::vector<DataBox> boxes;

  bool empty() const { return boxes.empty(); }
  bool contains(double x, double y = 0.5) const;
  static DataDomain intervals_1d(std::span<const std::pair<double, double>> iv);
  /// The 2D frame: unit square minus the open box (0.25,0.75)^2.
  static DataDomain frame_2d();
};

/// Measurement functional: exact-solution values restricted to the data
/// region (exact data, no noise).
struct DataSampler {
  const ExactSolution* solution = nullptr;
  const DataDomain* window = nullptr;

  bool covers(double x, double y = 0.5) const { return window->contains(x, y); }
  double operator()(double x, double y, double t) const {
    return solution->value(x, y, t);
  }
};

/// Minimal time 2*sup_x dist_c(x, omega) with dist_c the travel time of the
/// shortest path, i.e. the integral of 1/c. 1D only; omega is read as the
/// union of the x extents of the boxes. Throws if omega is empty.
double gcc_threshold(const WaveSpeedModel& speed, const DataDomain& omega);

}  // namespace stwave
