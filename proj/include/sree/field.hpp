#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sree {

/// Values over (time node, location), stored time-major.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(std::size_t n_time, std::size_t n_space, double fill = 0.0)
      : n_time_(n_time), n_space_(n_space), data_(n_time * n_space, fill) {}

  std::size_t n_time() const { return n_time_; }
  std::size_t n_space() const { return n_space_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_space_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_space_ + j]; }

  std::span<double> slice(std::size_t i) { return {data_.data() + i * n_space_, n_space_}; }
  std::span<const double> slice(std::size_t i) const { return {data_.data() + i * n_space_, n_space_}; }

  /// Trajectory of one location over time (copied; storage is time-major).
  std::vector<double> column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double sup_abs() const;
  double min() const;
  double max() const;
  bool all_finite() const;

 private:
  std::size_t n_time_ = 0;
  std::size_t n_space_ = 0;
  std::vector<double> data_;
};

/// Entrywise a - b.
SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b);

}  // namespace sree
