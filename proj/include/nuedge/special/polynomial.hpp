#ifndef NUEDGE_SPECIAL_POLYNOMIAL_HPP
#define NUEDGE_SPECIAL_POLYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nuedge {

/// Real polynomial in dense, ascending-degree storage.
///
/// The zero polynomial is stored with no coefficients and reports degree -1.
/// Every mutating operation renormalizes so that the leading stored
/// coefficient is nonzero.
class DensePolynomial {
 public:
  DensePolynomial() = default;
  explicit DensePolynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { normalize(); }
  DensePolynomial(std::initializer_list<double> coeffs) : c_(coeffs) { normalize(); }

  static DensePolynomial constant(double v) { return DensePolynomial({v}); }
  static DensePolynomial monomial(int degree, double coeff = 1.0) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
    c.back() = coeff;
    return DensePolynomial(std::move(c));
  }

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  std::span<const double> coeffs() const noexcept { return c_; }

  /// Coefficient of x^k; zero beyond the degree.
  double operator[](int k) const noexcept {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : 0.0;
  }

  double operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  DensePolynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return DensePolynomial(std::move(d));
  }

  /// Antiderivative vanishing at 0.
  DensePolynomial antiderivative() const {
    if (c_.empty()) return {};
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return DensePolynomial(std::move(a));
  }

  DensePolynomial& operator+=(const DensePolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    normalize();
    return *this;
  }
  DensePolynomial& operator-=(const DensePolynomial& o) { return *this += o * -1.0; }
  DensePolynomial& operator*=(double s) {
    for (auto& v : c_) v *= s;
    normalize();
    return *this;
  }

  friend DensePolynomial operator+(DensePolynomial a, const DensePolynomial& b) { return a += b; }
  friend DensePolynomial operator-(DensePolynomial a, const DensePolynomial& b) { return a -= b; }
  friend DensePolynomial operator*(DensePolynomial a, double s) { return a *= s; }
  friend DensePolynomial operator*(double s, DensePolynomial a) { return a *= s; }

  friend DensePolynomial operator*(const DensePolynomial& a, const DensePolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return DensePolynomial(std::move(r));
  }

  /// x -> p(scale * x + shift), evaluated by Horner's rule on polynomials.
  DensePolynomial compose_affine(double scale, double shift) const {
    DensePolynomial lin({shift, scale});
    DensePolynomial acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + DensePolynomial::constant(*it);
    return acc;
  }

  friend bool operator==(const DensePolynomial&, const DensePolynomial&) = default;

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

}  // namespace nuedge

#endif  // NUEDGE_SPECIAL_POLYNOMIAL_HPP
