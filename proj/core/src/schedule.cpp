#include "romforge/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace romforge {

PiecewiseLinear::PiecewiseLinear(std::vector<double> times, std::vector<Vec2> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size())
    throw std::invalid_argument("piecewise-linear schedule needs matching, non-empty knots and values");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) throw std::invalid_argument("schedule knot times must be strictly increasing");
}

Vec2 PiecewiseLinear::value(double t) const {
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto k = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
  return values_[k - 1] * (1.0 - w) + values_[k] * w;
}

Vec2 PiecewiseLinear::derivative(double t) const {
  if (times_.size() < 2 || t <= times_.front() || t > times_.back()) return {};
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto k = static_cast<std::size_t>(it - times_.begin());
  return (values_[k] - values_[k - 1]) * (1.0 / (times_[k] - times_[k - 1]));
}

}  // namespace romforge
