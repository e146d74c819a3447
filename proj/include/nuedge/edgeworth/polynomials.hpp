#ifndef NUEDGE_EDGEWORTH_POLYNOMIALS_HPP
#define NUEDGE_EDGEWORTH_POLYNOMIALS_HPP

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "nuedge/cumulants/moments.hpp"
#include "nuedge/cumulants/stationary.hpp"
#include "nuedge/edgeworth/tuples.hpp"
#include "nuedge/errors.hpp"
#include "nuedge/special/gaussian.hpp"
#include "nuedge/special/polynomial.hpp"

namespace nuedge {

/// Polynomial stored in the probabilists' Hermite basis: sum_i c[i] He_i(x).
class HermiteSeries {
 public:
  HermiteSeries() = default;
  explicit HermiteSeries(std::vector<double> c) : c_(std::move(c)) { trim(); }

  const std::vector<double>& coeffs() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }

  void add(int i, double v) {
    if (static_cast<std::size_t>(i) >= c_.size()) c_.resize(static_cast<std::size_t>(i) + 1, 0.0);
    c_[static_cast<std::size_t>(i)] += v;
  }

  HermiteSeries& operator+=(const HermiteSeries& o) {
    for (std::size_t i = 0; i < o.c_.size(); ++i) add(static_cast<int>(i), o.c_[i]);
    trim();
    return *this;
  }
  HermiteSeries scaled(double s) const {
    auto c = c_;
    for (auto& v : c) v *= s;
    return HermiteSeries(std::move(c));
  }

  /// Forward three-term recurrence; no monomial expansion.
  double operator()(double x) const noexcept {
    double acc = 0.0, prev = 1.0, cur = x;
    if (!c_.empty()) acc += c_[0];
    for (std::size_t i = 1; i < c_.size(); ++i) {
      acc += c_[i] * cur;
      const double next = x * cur - static_cast<double>(i) * prev;
      prev = cur;
      cur = next;
    }
    return acc;
  }

  /// sum_i c[i] He_{i+1}(x): the density counterpart of a CDF correction.
  double shifted_up(double x) const noexcept {
    double acc = 0.0, prev = 1.0, cur = x;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      acc += c_[i] * cur;
      const double next = x * cur - static_cast<double>(i + 1) * prev;
      prev = cur;
      cur = next;
    }
    return acc;
  }

  DensePolynomial to_dense() const {
    DensePolynomial p;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0.0) p += hermite(static_cast<int>(i)) * c_[i];
    return p;
  }

  friend bool operator==(const HermiteSeries&, const HermiteSeries&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }
  std::vector<double> c_;
};

/// C_k = prod_l 1 / (k_l! ((l+2)!)^{k_l}).
inline double tuple_coefficient(const TupleIndex& t) {
  double c = 1.0;
  for (int l = 1; l <= t.s(); ++l) c /= factorial(t[l]) * std::pow(factorial(l + 2), t[l]);
  return c;
}

namespace detail {

inline void require_orders(const CumulantSequence& cs, int m) {
  if (m < 3) throw InputError("polynomial construction needs m >= 3");
  if (m - 2 > kMaxTupleWeight) throw CapabilityError("expansion parameter m above 10 is not supported");
  if (cs.jmax() < m) throw InputError("cumulant sequence lacks order " + std::to_string(m));
}

}  // namespace detail

/// H_{j,n}, j = 1..m-2, in the Hermite basis:
/// H_{j,n} = sum_{k in A_j} C_k prod_l (gamma_{l+2}(S_n) / sigma_n^2)^{k_l} He_{order(k)-1}.
/// Index 0 of the result is unused.
inline std::vector<HermiteSeries> build_hermite_polynomials(const CumulantSequence& cs, int m) {
  detail::require_orders(cs, m);
  const double s2 = cs.sigma() * cs.sigma();
  std::vector<HermiteSeries> H(static_cast<std::size_t>(m - 1));
  for (int j = 1; j <= m - 2; ++j) {
    HermiteSeries h;
    for (const auto& t : enumerate_tuples(j)) {
      double c = tuple_coefficient(t);
      for (int l = 1; l <= t.s(); ++l) c *= std::pow(cs.gamma(l + 2) / s2, t[l]);
      h.add(t.order() - 1, c);
    }
    H[static_cast<std::size_t>(j)] = HermiteSeries(h.coeffs());
  }
  return H;
}

/// Same polynomials as a map j -> dense polynomial.
inline std::map<int, DensePolynomial> build_polynomials(const CumulantSequence& cs, int m) {
  const auto H = build_hermite_polynomials(cs, m);
  std::map<int, DensePolynomial> out;
  for (int j = 1; j <= m - 2; ++j) out.emplace(j, H[static_cast<std::size_t>(j)].to_dense());
  return out;
}

/// P_{m,n}(z) = sum over tuples with 1 <= sum_j j k_j <= m-2 of
/// prod_j (gamma_{j+2}(W_n)/(j+2)!)^{k_j} / k_j! z^{sum_j (j+2) k_j}.
inline DensePolynomial build_P(const CumulantSequence& cs, int m) {
  detail::require_orders(cs, m);
  DensePolynomial P;
  for (int w = 1; w <= m - 2; ++w) {
    for (const auto& t : enumerate_tuples(w)) {
      double c = 1.0;
      for (int l = 1; l <= t.s(); ++l)
        c *= std::pow(cs.gamma_normalized(l + 2) / factorial(l + 2), t[l]) / factorial(t[l]);
      P += DensePolynomial::monomial(t.order(), c);
    }
  }
  return P;
}

/// p(z) at complex z by Horner's rule.
inline std::complex<double> evaluate(const DensePolynomial& p, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  const auto c = p.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

/// n-independent H_r, r = 1..m-2, from the asymptotic cumulants.
///
/// With beta_l = p_{l+2}/p_2 and alpha_l = q_{l+2} - q_2 beta_l one has
/// gamma_{l+2}(S_n)/sigma_n^2 = beta_l + alpha_l sigma_n^{-2} up to O(delta^n),
/// so sum_j sigma^{-j} H_{j,n} regroups by powers of sigma^{-1}. H_r collects
/// the tuples of weight j = r - 2u with u factors alpha chosen among them.
inline std::vector<HermiteSeries> stationary_polynomials(const StationaryCumulantFit& fit, int m) {
  if (m < 3) throw InputError("stationary polynomials need m >= 3");
  if (m - 2 > kMaxTupleWeight) throw CapabilityError("expansion parameter m above 10 is not supported");
  if (fit.kmax < m) throw InputError("stationary fit lacks order " + std::to_string(m));
  if (!(fit.p[2] > 0.0)) throw DegeneracyError("stationary fit needs p_2 > 0");
  const double p2 = fit.p[2], q2 = fit.q[2];
  std::vector<double> alpha(static_cast<std::size_t>(m - 1), 0.0), beta(alpha.size(), 0.0);
  for (int l = 1; l <= m - 2; ++l) {
    beta[static_cast<std::size_t>(l)] = fit.p[static_cast<std::size_t>(l + 2)] / p2;
    alpha[static_cast<std::size_t>(l)] = fit.q[static_cast<std::size_t>(l + 2)] - q2 * beta[static_cast<std::size_t>(l)];
  }
  std::vector<HermiteSeries> H(static_cast<std::size_t>(m - 1));
  for (int r = 1; r <= m - 2; ++r) {
    HermiteSeries h;
    for (int u = 0; r - 2 * u >= 1; ++u) {
      for (const auto& t : enumerate_tuples(r - 2 * u)) {
        // Sum over (c_l) with sum c_l = u and 0 <= c_l <= k_l.
        double inner = 0.0;
        auto rec = [&](auto&& self, int l, int left, double prod) -> void {
          if (l > t.s()) {
            if (left == 0) inner += prod;
            return;
          }
          const int kl = t[l];
          for (int c = 0; c <= std::min(kl, left); ++c) {
            const double f = binomial(kl, c) * std::pow(alpha[static_cast<std::size_t>(l)], c) *
                             std::pow(beta[static_cast<std::size_t>(l)], kl - c);
            self(self, l + 1, left - c, prod * f);
          }
        };
        rec(rec, 1, u, 1.0);
        h.add(t.order() - 1, tuple_coefficient(t) * inner);
      }
    }
    H[static_cast<std::size_t>(r)] = HermiteSeries(h.coeffs());
  }
  return H;
}

}  // namespace nuedge

#endif  // NUEDGE_EDGEWORTH_POLYNOMIALS_HPP
