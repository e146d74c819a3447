#ifndef NUEDGE_MODELS_CHAIN_HPP
#define NUEDGE_MODELS_CHAIN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"

namespace nuedge {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double v = 0.0) : rows(r), cols(c), a(r * c, v) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = init.size();
    cols = rows ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols) throw InputError("ragged matrix literal");
      a.insert(a.end(), row.begin(), row.end());
    }
  }
  double& operator()(std::size_t i, std::size_t j) noexcept { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a[i * cols + j]; }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw InputError("matrix dimensions do not match");
    Matrix r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k)
        for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
    return r;
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Finite-state inhomogeneous Markov chain X_1, X_2, ... with observables
/// Y_j = f_j(X_j, X_{j+1}).
///
/// Step j uses kernels[(j-1) mod L] and observables[(j-1) mod L]. The list is
/// traversed `repeat` times, so the chain has L * repeat steps; repeat = 0
/// means the list cycles forever.
struct MarkovChainSpec {
  std::vector<double> initial;
  std::vector<Matrix> kernels;
  std::vector<Matrix> observables;
  long repeat = 0;
  std::map<std::string, std::string> meta;

  static constexpr double kRowTolerance = 1e-12;

  std::size_t period() const noexcept { return kernels.size(); }
  bool unlimited() const noexcept { return repeat == 0; }
  long max_steps() const noexcept {
    return unlimited() ? std::numeric_limits<long>::max() : repeat * static_cast<long>(period());
  }
  const Matrix& kernel(long j) const { return kernels[index(j)]; }
  const Matrix& observable(long j) const { return observables[index(j)]; }
  /// |X_j|
  std::size_t states(long j) const { return j == 1 ? initial.size() : kernel(j - 1).cols; }

  std::string name() const {
    auto it = meta.find("name");
    return it == meta.end() ? std::string("chain") : it->second;
  }

  void validate() const {
    if (kernels.empty()) throw InputError("chain needs at least one kernel");
    if (kernels.size() != observables.size()) throw InputError("chain needs one observable per kernel");
    if (repeat < 0) throw InputError("repeat count must be non-negative");
    if (initial.empty()) throw InputError("chain needs an initial law");
    double total = 0.0;
    for (double p : initial) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw InputError("initial law has a negative or non-finite entry");
      total += p;
    }
    if (std::abs(total - 1.0) > kRowTolerance) throw InputError("initial law does not sum to 1");
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      const Matrix& P = kernels[i];
      const Matrix& f = observables[i];
      const std::string where = "kernel." + std::to_string(i + 1);
      const std::size_t in = i == 0 ? initial.size() : kernels[i - 1].cols;
      if (P.rows != in) throw InputError(where + ": row count does not match the previous state space");
      if (P.cols == 0) throw InputError(where + ": empty state space");
      if (f.rows != P.rows || f.cols != P.cols) throw InputError("observable." + std::to_string(i + 1) + ": shape differs from its kernel");
      for (std::size_t r = 0; r < P.rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < P.cols; ++c) {
          const double p = P(r, c);
          if (!(p >= 0.0) || !std::isfinite(p)) throw InputError(where + ": negative or non-finite entry");
          s += p;
          if (!std::isfinite(f(r, c))) throw InputError("observable." + std::to_string(i + 1) + ": non-finite value");
        }
        if (std::abs(s - 1.0) > kRowTolerance) throw InputError(where + ": row " + std::to_string(r + 1) + " does not sum to 1");
      }
    }
    if ((unlimited() || repeat > 1) && kernels.back().cols != initial.size())
      throw InputError("repeated kernel list must return to the initial state space");
  }

  /// sup_j max_{x,y} |f_j(x, y)| over one period.
  double max_abs_observable() const noexcept {
    double m = 0.0;
    for (const auto& f : observables)
      for (double v : f.a) m = std::max(m, std::abs(v));
    return m;
  }

  void require_steps(long n) const {
    if (n < 1) throw InputError("number of steps must be >= 1");
    if (n > max_steps()) throw InputError("chain '" + name() + "' has only " + std::to_string(max_steps()) + " steps");
  }

  /// Laws of X_1..X_{n+1}.
  std::vector<std::vector<double>> marginals(long n) const {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(initial);
    for (long j = 1; j <= n; ++j) out.push_back(propagate(out.back(), kernel(j)));
    return out;
  }

  /// E[Y_j], j = 1..n (index 0 holds E[Y_1]).
  std::vector<double> step_means(long n) const {
    std::vector<double> mu(static_cast<std::size_t>(n));
    std::vector<double> pi = initial;
    for (long j = 1; j <= n; ++j) {
      const Matrix& P = kernel(j);
      const Matrix& f = observable(j);
      double m = 0.0;
      for (std::size_t x = 0; x < P.rows; ++x)
        for (std::size_t y = 0; y < P.cols; ++y) m += pi[x] * P(x, y) * f(x, y);
      mu[static_cast<std::size_t>(j - 1)] = m;
      pi = propagate(pi, P);
    }
    return mu;
  }

  static std::vector<double> propagate(const std::vector<double>& pi, const Matrix& P) {
    std::vector<double> r(P.cols, 0.0);
    for (std::size_t x = 0; x < P.rows; ++x)
      for (std::size_t y = 0; y < P.cols; ++y) r[y] += pi[x] * P(x, y);
    return r;
  }

 private:
  std::size_t index(long j) const {
    if (j < 1) throw InputError("chain steps are numbered from 1");
    return static_cast<std::size_t>((j - 1) % static_cast<long>(period()));
  }
};

}  // namespace nuedge

#endif  // NUEDGE_MODELS_CHAIN_HPP
