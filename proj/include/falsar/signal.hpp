#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace falsar {

// A uniformly sampled, time-bounded multi-channel trace. Row j holds the
// values at t = j*step; the horizon is (rows-1)*step. Values between grid
// points follow a left-continuous piecewise-constant hold. Immutable by
// convention once built: every operation below returns a fresh Signal.
class Signal {
 public:
  Signal(std::vector<std::string> channels, double step,
         std::vector<double> samples_row_major);

  static Signal constant(std::vector<std::string> channels, double step,
                         std::size_t rows, std::span<const double> values);

  const std::vector<std::string>& channels() const { return channels_; }
  double step() const { return step_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return channels_.size(); }
  double horizon() const { return static_cast<double>(rows_ - 1) * step_; }

  std::span<const double> row(std::size_t j) const {
    return {data_.data() + j * cols(), cols()};
  }
  double at(std::size_t row, std::size_t col) const {
    return data_[row * cols() + col];
  }
  const std::vector<double>& data() const { return data_; }

  // Index of a named channel; throws std::invalid_argument if absent.
  std::size_t channel_index(const std::string& name) const;
  bool has_channel(const std::string& name) const;

  // Contiguous copy of one channel, one value per grid point.
  std::vector<double> column(std::size_t col) const;

  // Value vector at time t in [0, horizon] under the hold convention.
  std::vector<double> value_at(double t) const;

  // Grid index of the sample governing time t (floor with tolerance).
  std::size_t index_at(double t) const;

 private:
  std::vector<std::string> channels_;
  double step_;
  std::size_t rows_;
  std::vector<double> data_;  // row-major, rows_ x channels_.size()
};

// w followed by w2; the boundary instant belongs to w, so w2's first row
// is dropped. Channels and step must match.
Signal concat(const Signal& w, const Signal& w2);

// The slice [t1, t2] of w re-based to start at 0. Bounds must lie on the
// grid; there is no resampling.
Signal restrict_signal(const Signal& w, double t1, double t2);

// The tail of w from grid-aligned time t onward, re-based to 0.
Signal shift(const Signal& w, double t);

// Membership flags over a signal's grid indices.
struct TimeSet {
  std::vector<bool> member;

  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

}  // namespace falsar
