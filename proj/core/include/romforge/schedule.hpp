#pragma once

#include <map>
#include <string>
#include <vector>

#include "romforge/mesh.hpp"

namespace romforge {

/// Piecewise-linear vector-valued function of time, held constant outside
/// its knot range.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> times, std::vector<Vec2> values);
  static PiecewiseLinear constant(Vec2 v) { return PiecewiseLinear({0.0}, {v}); }

  Vec2 value(double t) const;
  /// Slope of the segment (t_k, t_{k+1}] containing t; zero outside.
  Vec2 derivative(double t) const;
  double first_time() const { return times_.front(); }
  double last_time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec2>& values() const { return values_; }

 private:
  std::vector<double> times_;
  std::vector<Vec2> values_;
};

/// Boundary velocity for each Dirichlet patch, by patch name.
using BcSchedule = std::map<std::string, PiecewiseLinear>;

}  // namespace romforge
