#ifndef NUEDGE_MODELS_LATTICE_HPP
#define NUEDGE_MODELS_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"

namespace nuedge {

/// Probability mass function supported on offset + k * step, k = 0..size-1.
///
/// `pruned_mass` records probability dropped by the exact engines when
/// they discard negligible states; masses then sum to 1 - pruned_mass.
class LatticeDistribution {
 public:
  static constexpr double kMassTolerance = 1e-12;

  LatticeDistribution() : LatticeDistribution(0.0, 1.0, {1.0}) {}

  LatticeDistribution(double offset, double step, std::vector<double> masses, double pruned_mass = 0.0)
      : offset_(offset), step_(step), masses_(std::move(masses)), pruned_(pruned_mass) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) throw InputError("lattice step must be positive");
    if (masses_.empty()) throw InputError("lattice distribution needs at least one mass");
    for (auto& m : masses_) {
      if (m < 0.0) {
        if (m < -kMassTolerance) throw InputError("negative lattice mass");
        m = 0.0;
      }
    }
    trim();
    const double total = std::accumulate(masses_.begin(), masses_.end(), 0.0);
    if (std::abs(total + pruned_ - 1.0) > kMassTolerance)
      throw InputError("lattice masses sum to " + std::to_string(total) + ", expected 1");
    prefix_.resize(masses_.size());
    suffix_.resize(masses_.size());
    std::partial_sum(masses_.begin(), masses_.end(), prefix_.begin());
    double acc = 0.0;
    for (std::size_t k = masses_.size(); k-- > 0;) {
      acc += masses_[k];
      suffix_[k] = acc;
    }
    mean_ = 0.0;
    for (std::size_t k = 0; k < masses_.size(); ++k) mean_ += masses_[k] * value(k);
    mean_ /= total;
    variance_ = 0.0;
    for (std::size_t k = 0; k < masses_.size(); ++k) {
      const double d = value(k) - mean_;
      variance_ += masses_[k] * d * d;
    }
    variance_ /= total;
  }

  static LatticeDistribution point_mass(double x) { return LatticeDistribution(x, 1.0, {1.0}); }

  double offset() const noexcept { return offset_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return masses_.size(); }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double mass(std::size_t k) const noexcept { return masses_[k]; }
  double value(std::size_t k) const noexcept { return offset_ + static_cast<double>(k) * step_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  double pruned_mass() const noexcept { return pruned_; }

  /// P(S <= x_k).
  double cdf_at_index(std::size_t k) const noexcept {
    if (k + 1 >= masses_.size()) return 1.0;
    return prefix_[k] > 0.5 ? 1.0 - suffix_[k + 1] : prefix_[k];
  }
  /// P(S < x_k).
  double cdf_before_index(std::size_t k) const noexcept { return k == 0 ? 0.0 : cdf_at_index(k - 1); }

  /// P(S > x_k) without cancellation.
  double sf_at_index(std::size_t k) const noexcept {
    if (k + 1 >= masses_.size()) return 0.0;
    return prefix_[k] > 0.5 ? suffix_[k + 1] : 1.0 - prefix_[k];
  }

  /// P(S <= s); points within 1e-9 steps of a lattice site count as that site.
  double cdf(double s) const noexcept {
    const double pos = (s - offset_) / step_;
    if (pos < -1e-9) return 0.0;
    const double k = std::floor(pos + 1e-9);
    if (k >= static_cast<double>(masses_.size() - 1)) return 1.0;
    return cdf_at_index(static_cast<std::size_t>(k));
  }

  /// P(S < s).
  double cdf_left(double s) const noexcept {
    const double pos = (s - offset_) / step_;
    if (pos <= 1e-9) return 0.0;
    const double k = std::ceil(pos - 1e-9) - 1.0;
    if (k >= static_cast<double>(masses_.size() - 1)) return 1.0;
    return cdf_at_index(static_cast<std::size_t>(k));
  }

  /// P(S > s).
  double sf(double s) const noexcept {
    const double pos = (s - offset_) / step_;
    if (pos < -1e-9) return 1.0;
    const double k = std::floor(pos + 1e-9);
    if (k >= static_cast<double>(masses_.size() - 1)) return 0.0;
    return sf_at_index(static_cast<std::size_t>(k));
  }

  /// P(S >= s).
  double sf_left(double s) const noexcept {
    const double pos = (s - offset_) / step_;
    if (pos <= 1e-9) return 1.0;
    const double k = std::ceil(pos - 1e-9) - 1.0;
    if (k >= static_cast<double>(masses_.size() - 1)) return 0.0;
    return sf_at_index(static_cast<std::size_t>(k));
  }

  /// E[(S - center)^q] for integer q >= 0.
  double central_moment(int q, double center) const noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < masses_.size(); ++k) acc += masses_[k] * std::pow(value(k) - center, q);
    return acc;
  }

  /// E[|S|^q] for real q >= 0.
  double absolute_moment(double q) const noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < masses_.size(); ++k) acc += masses_[k] * std::pow(std::abs(value(k)), q);
    return acc;
  }

  /// Law of the sum of independent draws; steps must agree to 1e-12 relative.
  LatticeDistribution convolve(const LatticeDistribution& o) const {
    if (std::abs(step_ - o.step_) > 1e-12 * step_) throw InputError("convolution needs a common lattice step");
    std::vector<double> r(masses_.size() + o.masses_.size() - 1, 0.0);
    for (std::size_t i = 0; i < masses_.size(); ++i)
      for (std::size_t j = 0; j < o.masses_.size(); ++j) r[i + j] += masses_[i] * o.masses_[j];
    return LatticeDistribution(offset_ + o.offset_, step_, std::move(r), pruned_ + o.pruned_);
  }

  /// Same law shifted by -c.
  LatticeDistribution shifted(double c) const { return LatticeDistribution(offset_ - c, step_, masses_, pruned_); }

 private:
  void trim() {
    std::size_t lo = 0;
    while (lo + 1 < masses_.size() && masses_[lo] == 0.0) ++lo;
    std::size_t hi = masses_.size();
    while (hi > lo + 1 && masses_[hi - 1] == 0.0) --hi;
    if (lo > 0 || hi < masses_.size()) {
      masses_ = std::vector<double>(masses_.begin() + static_cast<std::ptrdiff_t>(lo),
                                    masses_.begin() + static_cast<std::ptrdiff_t>(hi));
      offset_ += static_cast<double>(lo) * step_;
    }
  }

  double offset_;
  double step_;
  std::vector<double> masses_;
  double pruned_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

}  // namespace nuedge

#endif  // NUEDGE_MODELS_LATTICE_HPP
