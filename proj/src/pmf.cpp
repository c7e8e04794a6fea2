#include "sigroute/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sigroute/errors.hpp"

namespace sigroute {

Pmf Pmf::point(int x) {
  if (x < 0) throw NegativeSupport("point mass at negative length " + std::to_string(x));
  return Pmf(x, {1.0});
}

Pmf Pmf::from_dense(std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidPmf("pmf entries must be finite and non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidPmf("pmf entries sum to " + std::to_string(sum) + ", expected 1");
  }
  return from_window(0, std::move(probs));
}

Pmf Pmf::from_window(int offset, std::vector<double> window) {
  std::size_t first = 0;
  while (first < window.size() && window[first] == 0.0) ++first;
  if (first == window.size()) throw InvalidPmf("pmf has no mass");
  std::size_t last = window.size();
  while (window[last - 1] == 0.0) --last;
  if (first > 0 || last < window.size()) {
    window = std::vector<double>(window.begin() + static_cast<std::ptrdiff_t>(first),
                                 window.begin() + static_cast<std::ptrdiff_t>(last));
  }
  const int lo = offset + static_cast<int>(first);
  if (lo < 0) throw NegativeSupport("pmf support below 0");
  return Pmf(lo, std::move(window));
}

double Pmf::operator[](int x) const {
  if (x < offset_ || x > max_support()) return 0.0;
  return mass_[static_cast<std::size_t>(x - offset_)];
}

std::vector<double> Pmf::dense() const {
  std::vector<double> out(static_cast<std::size_t>(max_support()) + 1, 0.0);
  std::copy(mass_.begin(), mass_.end(), out.begin() + offset_);
  return out;
}

int Pmf::quantile(double u) const {
  double cdf = 0.0;
  for (std::size_t k = 0; k + 1 < mass_.size(); ++k) {
    cdf += mass_[k];
    if (u < cdf) return offset_ + static_cast<int>(k);
  }
  return max_support();
}

double Pmf::total() const { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

double Pmf::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < mass_.size(); ++k) m += mass_[k] * static_cast<double>(offset_ + static_cast<int>(k));
  return m;
}

bool Pmf::is_normalized(double tol) const {
  for (double p : mass_) {
    if (!(p >= 0.0)) return false;
  }
  return std::abs(total() - 1.0) <= tol;
}

void Pmf::translate(int delta) {
  if (offset_ + delta < 0) throw NegativeSupport("translation would put mass below 0");
  offset_ += delta;
}

}  // namespace sigroute
