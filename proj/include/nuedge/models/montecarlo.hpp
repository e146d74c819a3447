#ifndef NUEDGE_MODELS_MONTECARLO_HPP
#define NUEDGE_MODELS_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/models/chain.hpp"

namespace nuedge {

/// SplitMix64 finalizer.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: draw c of stream s under seed k is
/// splitmix64(splitmix64(splitmix64(k) ^ s) + c), so every value depends only
/// on (seed, stream, counter) and runs are reproducible on any platform.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : key_(splitmix64(splitmix64(seed) ^ stream)) {}
  std::uint64_t next() noexcept { return splitmix64(key_ + counter_++); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Sorted Monte Carlo sample of S_n with a DKW confidence band.
struct MonteCarloECDF {
  long n = 0;
  std::uint64_t seed = 0;
  double delta = 0.01;
  /// sqrt(ln(2/delta) / (2 N)): sup_x |ECDF - F| exceeds this with probability <= delta.
  double dkw_halfwidth = 0.0;
  std::vector<double> sample;

  std::size_t size() const noexcept { return sample.size(); }
  /// Fraction of samples <= x.
  double cdf(double x) const noexcept {
    return static_cast<double>(std::upper_bound(sample.begin(), sample.end(), x) - sample.begin()) /
           static_cast<double>(sample.size());
  }
  /// Fraction of samples < x.
  double cdf_left(double x) const noexcept {
    return static_cast<double>(std::lower_bound(sample.begin(), sample.end(), x) - sample.begin()) /
           static_cast<double>(sample.size());
  }
  double mean() const noexcept {
    double s = 0.0;
    for (double v : sample) s += v;
    return s / static_cast<double>(sample.size());
  }
};

inline constexpr double kDkwDelta = 0.01;

inline double dkw_halfwidth(std::size_t samples, double delta = kDkwDelta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples)));
}

/// Generic form: sample i is sampler(rng_i) with rng_i = CounterRng(seed, i).
inline MonteCarloECDF monte_carlo_ecdf(const std::function<double(CounterRng&)>& sampler, long n, std::size_t samples,
                                       std::uint64_t seed) {
  if (samples < 1) throw InputError("Monte Carlo needs at least one sample");
  MonteCarloECDF r;
  r.n = n;
  r.seed = seed;
  r.delta = kDkwDelta;
  r.dkw_halfwidth = dkw_halfwidth(samples);
  r.sample.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    r.sample[i] = sampler(rng);
  }
  std::sort(r.sample.begin(), r.sample.end());
  return r;
}

namespace detail {

inline std::size_t draw_index(const double* p, std::size_t k, double u) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Skip trailing zero-probability states when rounding lands past the sum.
  std::size_t last = k - 1;
  while (last > 0 && p[last] == 0.0) --last;
  return last;
}

}  // namespace detail

/// Samples of S_n = sum_{j<=n} (Y_j - E Y_j) along simulated chain paths.
inline MonteCarloECDF monte_carlo_ecdf(const MarkovChainSpec& spec, long n, std::size_t samples, std::uint64_t seed) {
  spec.validate();
  spec.require_steps(n);
  const auto means = spec.step_means(n);
  double centering = 0.0;
  for (double m : means) centering += m;
  auto sampler = [&](CounterRng& rng) {
    std::size_t x = detail::draw_index(spec.initial.data(), spec.initial.size(), rng.uniform());
    double s = 0.0;
    for (long j = 1; j <= n; ++j) {
      const Matrix& P = spec.kernel(j);
      const std::size_t y = detail::draw_index(&P.a[x * P.cols], P.cols, rng.uniform());
      s += spec.observable(j)(x, y);
      x = y;
    }
    return s - centering;
  };
  return monte_carlo_ecdf(sampler, n, samples, seed);
}

}  // namespace nuedge

#endif  // NUEDGE_MODELS_MONTECARLO_HPP
