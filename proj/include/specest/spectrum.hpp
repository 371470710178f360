#pragma once

#include <optional>
#include <vector>

#include "specest/grid.hpp"
#include "specest/hermitian.hpp"

namespace specest {

/// A bounded, coercive m x m Hermitian-PD-valued density on the unit circle.
///
/// Three representations:
///   Constant        a single PD matrix C, the density C for every theta;
///   GridSamples     PD samples pinned to one CircleGrid;
///   RationalFactor  a stable state-space factor N(z) = C(zI-A)^{-1}B + D with
///                   density N N^*, square and nonsingular on the circle.
class SpectrumInput {
 public:
  enum class Kind { Constant, GridSamples, RationalFactor };

  struct StateSpace {
    Mat a, b, c, d;
    int order() const { return static_cast<int>(a.rows()); }
    Mat eval(double theta) const;  // N(e^{j theta})
  };

  static SpectrumInput constant(HermMat c);
  static SpectrumInput grid_samples(CircleGrid grid, std::vector<Mat> samples);
  static SpectrumInput rational_factor(Mat a, Mat b, Mat c, Mat d);
  /// Moving-average factor N(z) = sum_k coeffs[k] z^{-k}, realized on a shift
  /// register. Coefficient list is kept so an ARMA model can be read back.
  static SpectrumInput ma_polynomial(std::vector<Mat> coeffs);

  Kind kind() const { return kind_; }
  int m() const { return m_; }

  /// Density value at an arbitrary angle. GridSamples only supports angles of
  /// its own grid (looked up by index via samples()).
  bool evaluable_off_grid() const { return kind_ != Kind::GridSamples; }
  Mat eval(double theta) const;

  /// Samples on `grid`, in grid index order. For GridSamples inputs the grid
  /// must be the one the samples were pinned to (GridMismatch otherwise).
  std::vector<Mat> samples(const CircleGrid& grid) const;

  const StateSpace* factor() const { return factor_ ? &*factor_ : nullptr; }
  const std::vector<Mat>* ma_coeffs() const { return ma_coeffs_ ? &*ma_coeffs_ : nullptr; }
  const CircleGrid* sample_grid() const { return sample_grid_ ? &*sample_grid_ : nullptr; }

 private:
  SpectrumInput() = default;

  Kind kind_ = Kind::Constant;
  int m_ = 0;
  std::optional<Mat> constant_;
  std::optional<CircleGrid> sample_grid_;
  std::vector<Mat> samples_;
  std::optional<StateSpace> factor_;
  std::optional<std::vector<Mat>> ma_coeffs_;
};

}  // namespace specest
