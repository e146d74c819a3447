#ifndef NUEDGE_EDGEWORTH_TUPLES_HPP
#define NUEDGE_EDGEWORTH_TUPLES_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"

namespace nuedge {

inline constexpr int kMaxTupleWeight = 8;

/// Tuple (k_1, ..., k_s) with k_s != 0. Equivalently a partition of
/// weight() in which the part l occurs k_l times.
class TupleIndex {
 public:
  explicit TupleIndex(std::vector<int> k) : k_(std::move(k)) {
    if (k_.empty() || k_.back() == 0) throw InputError("tuple must end in a nonzero entry");
    for (int v : k_)
      if (v < 0) throw InputError("tuple entries must be non-negative");
  }

  const std::vector<int>& k() const noexcept { return k_; }
  int s() const noexcept { return static_cast<int>(k_.size()); }
  /// k_l for l = 1..s, zero beyond.
  int operator[](int l) const noexcept { return l >= 1 && l <= s() ? k_[static_cast<std::size_t>(l - 1)] : 0; }

  /// sum_l l k_l
  int weight() const noexcept {
    int w = 0;
    for (int l = 1; l <= s(); ++l) w += l * (*this)[l];
    return w;
  }
  /// sum_l (l+2) k_l
  int order() const noexcept {
    int o = 0;
    for (int l = 1; l <= s(); ++l) o += (l + 2) * (*this)[l];
    return o;
  }
  /// sum_l k_l
  int count() const noexcept {
    int c = 0;
    for (int v : k_) c += v;
    return c;
  }

  friend bool operator==(const TupleIndex&, const TupleIndex&) = default;

 private:
  std::vector<int> k_;
};

/// All tuples of weight j, ordered by length s, then lexicographically
/// descending within a length: j=3 gives (3), (1,1), (0,0,1).
inline std::vector<TupleIndex> enumerate_tuples(int j) {
  if (j < 1 || j > kMaxTupleWeight)
    throw CapabilityError("tuple weight " + std::to_string(j) + " outside [1, " + std::to_string(kMaxTupleWeight) + "]");
  std::vector<std::vector<int>> out;
  std::vector<int> k(static_cast<std::size_t>(j), 0);
  // Choose k_l for l = j down to 1 with the remaining weight.
  auto rec = [&](auto&& self, int l, int remaining) -> void {
    if (l == 0) {
      if (remaining == 0) {
        std::size_t s = k.size();
        while (k[s - 1] == 0) --s;
        out.emplace_back(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(s));
      }
      return;
    }
    for (int c = remaining / l; c >= 0; --c) {
      k[static_cast<std::size_t>(l - 1)] = c;
      self(self, l - 1, remaining - c * l);
    }
    k[static_cast<std::size_t>(l - 1)] = 0;
  };
  rec(rec, j, j);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a > b;
  });
  std::vector<TupleIndex> res;
  res.reserve(out.size());
  for (auto& v : out) res.emplace_back(std::move(v));
  return res;
}

}  // namespace nuedge

#endif  // NUEDGE_EDGEWORTH_TUPLES_HPP
