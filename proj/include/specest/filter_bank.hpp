#pragma once

#include <vector>

#include "specest/grid.hpp"
#include "specest/hermitian.hpp"

namespace specest {

/// The bank of filters G(z) = (zI - A)^{-1} B.
///
/// Standing assumptions, all verified at construction: A Schur stable, B of
/// full column rank, (A, B) reachable, n >= m.
class FilterBank {
 public:
  static FilterBank create(Mat a, Mat b);

  /// Companion-form bank: A the block shift with identity super-diagonal
  /// blocks, B = [0; ...; 0; I_m], n = m*(p+1). G stacks z^{-p-1}I .. z^{-1}I.
  static FilterBank covext(int m, int p);

  int n() const { return static_cast<int>(a_.rows()); }
  int m() const { return static_cast<int>(b_.cols()); }
  const Mat& A() const { return a_; }
  const Mat& B() const { return b_; }

  /// G(e^{j theta}) via a direct linear solve; always well defined on the
  /// circle since A is Schur stable.
  Mat evaluate(double theta) const;

  std::vector<Mat> evaluate_grid(const CircleGrid& grid) const;

 private:
  FilterBank(Mat a, Mat b) : a_(std::move(a)), b_(std::move(b)) {}

  Mat a_;
  Mat b_;
};

/// True when (A, B) is exactly the covext companion pair for some (m, p).
bool is_covext_companion(const FilterBank& bank, int m);

}  // namespace specest
