#include "falsar/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace falsar {

namespace {

// Grid times are compared with a small relative slack so that values like
// 220*0.05 still count as on-grid.
constexpr double kGridTol = 1e-9;

std::size_t grid_index_checked(double t, double step, const char* what) {
  const double q = t / step;
  const double r = std::round(q);
  if (std::abs(q - r) > kGridTol * std::max(1.0, std::abs(q))) {
    throw std::domain_error(std::string(what) + ": time " + std::to_string(t) +
                            " is not on the sample grid");
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

Signal::Signal(std::vector<std::string> channels, double step,
               std::vector<double> samples_row_major)
    : channels_(std::move(channels)), step_(step) {
  if (channels_.empty()) throw std::invalid_argument("signal: no channels");
  if (!(step_ > 0.0)) throw std::invalid_argument("signal: step must be > 0");
  if (samples_row_major.empty() || samples_row_major.size() % channels_.size() != 0) {
    throw std::invalid_argument("signal: sample count not a multiple of channel count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& c : channels_) {
    if (!seen.insert(c).second) {
      throw std::invalid_argument("signal: duplicate channel '" + c + "'");
    }
  }
  data_ = std::move(samples_row_major);
  rows_ = data_.size() / channels_.size();
}

Signal Signal::constant(std::vector<std::string> channels, double step,
                        std::size_t rows, std::span<const double> values) {
  if (values.size() != channels.size()) {
    throw std::invalid_argument("signal: constant value count mismatch");
  }
  std::vector<double> data;
  data.reserve(rows * values.size());
  for (std::size_t j = 0; j < rows; ++j) {
    data.insert(data.end(), values.begin(), values.end());
  }
  return Signal(std::move(channels), step, std::move(data));
}

std::size_t Signal::channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i] == name) return i;
  }
  throw std::invalid_argument("signal: unknown channel '" + name + "'");
}

bool Signal::has_channel(const std::string& name) const {
  return std::find(channels_.begin(), channels_.end(), name) != channels_.end();
}

std::vector<double> Signal::column(std::size_t col) const {
  std::vector<double> out(rows_);
  for (std::size_t j = 0; j < rows_; ++j) out[j] = data_[j * cols() + col];
  return out;
}

std::size_t Signal::index_at(double t) const {
  if (t < -kGridTol * step_ || t > horizon() + kGridTol * std::max(1.0, horizon())) {
    throw std::domain_error("signal: time " + std::to_string(t) +
                            " outside [0, " + std::to_string(horizon()) + "]");
  }
  const auto j = static_cast<std::size_t>(std::floor(t / step_ + kGridTol));
  return std::min(j, rows_ - 1);
}

std::vector<double> Signal::value_at(double t) const {
  const std::size_t j = index_at(t);
  const auto r = row(j);
  return {r.begin(), r.end()};
}

Signal concat(const Signal& w, const Signal& w2) {
  if (w.channels() != w2.channels()) {
    throw std::invalid_argument("concat: channel mismatch");
  }
  if (w.step() != w2.step()) {
    throw std::invalid_argument("concat: step mismatch");
  }
  std::vector<double> data = w.data();
  // w owns the boundary instant, so w2's row 0 is not copied.
  data.insert(data.end(), w2.data().begin() + static_cast<std::ptrdiff_t>(w2.cols()),
              w2.data().end());
  return Signal(w.channels(), w.step(), std::move(data));
}

Signal restrict_signal(const Signal& w, double t1, double t2) {
  const std::size_t i1 = grid_index_checked(t1, w.step(), "restrict");
  const std::size_t i2 = grid_index_checked(t2, w.step(), "restrict");
  if (!(i1 < i2) || i2 > w.rows() - 1) {
    throw std::domain_error("restrict: need 0 <= t1 < t2 <= horizon");
  }
  std::vector<double> data(w.data().begin() + static_cast<std::ptrdiff_t>(i1 * w.cols()),
                           w.data().begin() + static_cast<std::ptrdiff_t>((i2 + 1) * w.cols()));
  return Signal(w.channels(), w.step(), std::move(data));
}

Signal shift(const Signal& w, double t) {
  const std::size_t j = grid_index_checked(t, w.step(), "shift");
  if (j == 0) return w;
  if (j > w.rows() - 1) throw std::domain_error("shift: need t <= horizon");
  std::vector<double> data(w.data().begin() + static_cast<std::ptrdiff_t>(j * w.cols()),
                           w.data().end());
  return Signal(w.channels(), w.step(), std::move(data));
}

std::size_t TimeSet::count() const {
  return static_cast<std::size_t>(std::count(member.begin(), member.end(), true));
}

}  // namespace falsar
