#include "sree/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sree {

std::vector<double> SpaceTimeField::column(std::size_t j) const {
  std::vector<double> out(n_time_);
  for (std::size_t i = 0; i < n_time_; ++i) out[i] = (*this)(i, j);
  return out;
}

void SpaceTimeField::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != n_time_) throw std::invalid_argument("set_column: length mismatch");
  for (std::size_t i = 0; i < n_time_; ++i) (*this)(i, j) = values[i];
}

double SpaceTimeField::sup_abs() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::abs(v));
  return s;
}

double SpaceTimeField::min() const {
  double s = std::numeric_limits<double>::infinity();
  for (double v : data_) s = std::min(s, v);
  return s;
}

double SpaceTimeField::max() const {
  double s = -std::numeric_limits<double>::infinity();
  for (double v : data_) s = std::max(s, v);
  return s;
}

bool SpaceTimeField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (a.n_time() != b.n_time() || a.n_space() != b.n_space())
    throw std::invalid_argument("difference: shape mismatch");
  SpaceTimeField out(a.n_time(), a.n_space());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = x[n] - y[n];
  return out;
}

}  // namespace sree
