#pragma once

#include <cmath>
#include <numbers>

#include "specest/errors.hpp"

namespace specest {

/// Uniform grid on the unit circle: theta_k = -pi + 2*pi*k/N, weight 1/N.
/// The plain average over this grid integrates trigonometric polynomials of
/// degree < N/2 exactly (w.r.t. the normalized Lebesgue measure).
class CircleGrid {
 public:
  static constexpr int kDefaultSize = 2048;

  explicit CircleGrid(int n = kDefaultSize) : n_(n) {
    if (n < 2 || (n & (n - 1)) != 0) {
      raise(ErrorCode::DimensionMismatch, "grid size must be a power of two >= 2");
    }
  }

  int size() const { return n_; }
  double weight() const { return 1.0 / n_; }
  double angle(int k) const { return -std::numbers::pi + 2.0 * std::numbers::pi * k / n_; }

  CircleGrid refined() const { return CircleGrid(2 * n_); }

  friend bool operator==(const CircleGrid& a, const CircleGrid& b) { return a.n_ == b.n_; }

 private:
  int n_;
};

}  // namespace specest
