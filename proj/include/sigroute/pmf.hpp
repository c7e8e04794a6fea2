#pragma once

#include <span>
#include <vector>

namespace sigroute {

// Finitely supported probability mass function over {0, 1, 2, ...}.
//
// Conceptually a dense vector indexed by queue length; stored as the window
// [min_support, max_support] so that translating a belief is O(1). Both ends
// of the window carry structurally non-zero mass. Tiny masses are never
// pruned: only exact zeros count as outside the support.
class Pmf {
 public:
  // Point mass at 0.
  Pmf() : offset_(0), mass_{1.0} {}

  static Pmf point(int x);
  // Dense probabilities indexed from 0. Throws InvalidPmf unless entries are
  // finite, non-negative and sum to 1 within 1e-12.
  static Pmf from_dense(std::vector<double> probs);
  // Window starting at `offset`; trims exact zeros at both ends and does not
  // check normalization (operations that preserve mass use this).
  static Pmf from_window(int offset, std::vector<double> window);

  int min_support() const { return offset_; }
  int max_support() const { return offset_ + static_cast<int>(mass_.size()) - 1; }
  double operator[](int x) const;

  std::span<const double> window() const { return mass_; }
  std::vector<double> dense() const;

  // Smallest x with P(X <= x) > u, for u in [0,1); inverse-CDF sampling.
  int quantile(double u) const;

  double total() const;
  double mean() const;
  bool is_point() const { return mass_.size() == 1; }

  // Non-negative entries summing to 1 within `tol`.
  bool is_normalized(double tol = 1e-12) const;

  // Shift the whole law by `delta`; throws NegativeSupport if mass would land
  // below 0.
  void translate(int delta);

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  Pmf(int offset, std::vector<double> mass) : offset_(offset), mass_(std::move(mass)) {}

  int offset_;
  std::vector<double> mass_;
};

}  // namespace sigroute
