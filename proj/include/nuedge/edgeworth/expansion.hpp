#ifndef NUEDGE_EDGEWORTH_EXPANSION_HPP
#define NUEDGE_EDGEWORTH_EXPANSION_HPP

#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nuedge/cumulants/moments.hpp"
#include "nuedge/edgeworth/polynomials.hpp"
#include "nuedge/errors.hpp"
#include "nuedge/special/gaussian.hpp"

namespace nuedge {

/// W_n = (S_n - A_n) / B_n. Self-normalized: A_n = 0, B_n = sigma_n.
struct NormalizationSpec {
  double A = 0.0;
  double B = 1.0;
  double sigma = 1.0;

  static NormalizationSpec self_normalized(double sigma_n) { return {0.0, sigma_n, sigma_n}; }
  void validate() const {
    if (!(B > 0.0)) throw PreconditionError("normalization needs B_n > 0");
    if (!(sigma > 0.0)) throw PreconditionError("normalization needs sigma_n > 0");
  }
  /// a_n = B_n / sigma_n
  double a() const noexcept { return B / sigma; }
  /// v_n = A_n / sigma_n
  double v() const noexcept { return A / sigma; }
};

/// Beyond this |x| the expansion is reported as its limits; the omitted mass
/// is below 1e-9 for the polynomial degrees used here.
inline constexpr double kExpansionClamp = 12.0;

/// Generalized distribution Psi_{r,n}(x) = Phi(x) - phi(x) sum_{j<=r} sigma_n^{-j} H_{j,n}(x)
/// of the self-normalized sum, built once for parameter m (r <= m - 2).
///
/// The stored normalization is applied only by affine_rebase; evaluation here
/// is always in the self-normalized coordinate.
class EdgeworthExpansion {
 public:
  EdgeworthExpansion() = default;

  /// Full build with r = m - 2. m = 2 gives the plain normal law.
  EdgeworthExpansion(const CumulantSequence& cs, int m)
      : EdgeworthExpansion(cs, m, NormalizationSpec::self_normalized(cs.sigma())) {}

  EdgeworthExpansion(const CumulantSequence& cs, int m, NormalizationSpec norm)
      : m_(m), r_(m - 2), n_(cs.n()), sigma_(cs.sigma()), norm_(norm) {
    if (m < 2) throw InputError("expansion parameter m must be >= 2");
    norm_.validate();
    if (m >= 3) H_ = build_hermite_polynomials(cs, m);
    H_.resize(static_cast<std::size_t>(std::max(1, m - 1)));
    for (int j = 2; j <= std::min(cs.jmax(), kMaxCumulantOrder); ++j) gamma_.push_back(cs.gamma(j));
    combine();
  }

  /// Expansion from explicit H_j (Hermite basis, index 0 unused) with the
  /// weights sigma^{-j}; used for stationary polynomials and deserialization.
  static EdgeworthExpansion from_polynomials(int m, int n, double sigma, std::vector<HermiteSeries> H,
                                             NormalizationSpec norm, std::vector<double> gamma = {}) {
    if (m < 2) throw InputError("expansion parameter m must be >= 2");
    if (!(sigma > 0.0)) throw DegeneracyError("expansion needs sigma_n > 0");
    norm.validate();
    EdgeworthExpansion e;
    e.m_ = m;
    e.r_ = m - 2;
    e.n_ = n;
    e.sigma_ = sigma;
    e.norm_ = norm;
    e.H_ = std::move(H);
    e.H_.resize(static_cast<std::size_t>(std::max(1, m - 1)));
    e.gamma_ = std::move(gamma);
    e.combine();
    return e;
  }

  int m() const noexcept { return m_; }
  int r() const noexcept { return r_; }
  int n() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  const NormalizationSpec& normalization() const noexcept { return norm_; }
  /// gamma_j(S_n) for j = 2.. as supplied at build time (may be empty).
  const std::vector<double>& gammas() const noexcept { return gamma_; }

  /// H_{j,n} in the Hermite basis, 1 <= j <= r.
  const HermiteSeries& hermite_polynomial(int j) const {
    if (j < 1 || j > r_) throw InputError("no polynomial H_" + std::to_string(j) + " in this expansion");
    return H_[static_cast<std::size_t>(j)];
  }
  DensePolynomial polynomial(int j) const { return hermite_polynomial(j).to_dense(); }
  std::map<int, DensePolynomial> polynomials() const {
    std::map<int, DensePolynomial> out;
    for (int j = 1; j <= r_; ++j) out.emplace(j, polynomial(j));
    return out;
  }

  /// sum_{j<=r} sigma^{-j} H_{j,n}, the full CDF correction in the Hermite basis.
  const HermiteSeries& correction() const noexcept { return combined_; }

  /// Same family with only j <= r kept.
  EdgeworthExpansion truncated(int r) const {
    if (r < 0 || r > r_) throw InputError("truncation order outside [0, " + std::to_string(r_) + "]");
    EdgeworthExpansion e = *this;
    e.r_ = r;
    e.combine();
    return e;
  }

  double cdf(double x) const {
    detail::require_finite(x, "expansion cdf");
    if (x < -kExpansionClamp) return 0.0;
    if (x > kExpansionClamp) return 1.0;
    const double corr = normal_pdf(x) * combined_(x);
    return x < 0.0 ? normal_cdf(x) - corr : 1.0 - (normal_sf(x) + corr);
  }

  /// 1 - cdf(x), accurate in the upper tail.
  double sf(double x) const {
    detail::require_finite(x, "expansion sf");
    if (x < -kExpansionClamp) return 1.0;
    if (x > kExpansionClamp) return 0.0;
    const double corr = normal_pdf(x) * combined_(x);
    return x < 0.0 ? 1.0 - (normal_cdf(x) - corr) : normal_sf(x) + corr;
  }

  double pdf(double x) const {
    detail::require_finite(x, "expansion pdf");
    if (std::abs(x) > kExpansionClamp) return 0.0;
    return normal_pdf(x) * (1.0 + combined_.shifted_up(x));
  }

  /// Fourier transform of pdf: e^{-t^2/2} (1 + sum_i a_i (it)^{i+1}).
  std::complex<double> charfn(double t) const {
    const std::complex<double> it(0.0, t);
    std::complex<double> acc = 0.0;
    const auto& a = combined_.coeffs();
    for (std::size_t i = a.size(); i-- > 0;) acc = (acc + a[i]) * it;
    return std::exp(-0.5 * t * t) * (1.0 + acc);
  }

  /// Text record: header, scalars, then one line per j with Hermite-basis
  /// coefficients, all reals at 17 significant digits.
  void write(std::ostream& os) const {
    const auto prec = os.precision(17);
    os << "edgeworth-expansion 1\n";
    os << "m " << m_ << "\nr " << r_ << "\nn " << n_ << "\n";
    os << "sigma " << sigma_ << "\n";
    os << "normalization " << norm_.A << ' ' << norm_.B << ' ' << norm_.sigma << "\n";
    os << "gamma " << gamma_.size();
    for (double g : gamma_) os << ' ' << g;
    os << "\n";
    for (int j = 1; j <= m_ - 2; ++j) {
      const auto& c = H_[static_cast<std::size_t>(j)].coeffs();
      os << "H " << j << ' ' << c.size();
      for (double v : c) os << ' ' << v;
      os << "\n";
    }
    os << "end\n";
    os.precision(prec);
  }

  std::string to_string() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  static EdgeworthExpansion read(std::istream& is) {
    auto expect = [&](const std::string& key) {
      std::string k;
      if (!(is >> k) || k != key) throw InputError("expansion record: expected '" + key + "'");
    };
    expect("edgeworth-expansion");
    int version = 0;
    if (!(is >> version) || version != 1) throw InputError("expansion record: unsupported version");
    int m = 0, r = 0, n = 0;
    double sigma = 0.0;
    NormalizationSpec norm;
    expect("m");
    is >> m;
    expect("r");
    is >> r;
    expect("n");
    is >> n;
    expect("sigma");
    is >> sigma;
    expect("normalization");
    is >> norm.A >> norm.B >> norm.sigma;
    expect("gamma");
    std::size_t ng = 0;
    is >> ng;
    std::vector<double> gamma(ng);
    for (auto& g : gamma) is >> g;
    if (!is || m < 2 || r < 0 || r > m - 2) throw InputError("expansion record: malformed header");
    std::vector<HermiteSeries> H(static_cast<std::size_t>(std::max(1, m - 1)));
    for (int j = 1; j <= m - 2; ++j) {
      expect("H");
      int jj = 0;
      std::size_t len = 0;
      is >> jj >> len;
      if (!is || jj != j || len > 64) throw InputError("expansion record: malformed H line");
      std::vector<double> c(len);
      for (auto& v : c) is >> v;
      H[static_cast<std::size_t>(j)] = HermiteSeries(std::move(c));
    }
    expect("end");
    if (!is) throw InputError("expansion record: truncated");
    return from_polynomials(m, n, sigma, std::move(H), norm, std::move(gamma)).truncated(r);
  }

  static EdgeworthExpansion parse(const std::string& text) {
    std::istringstream is(text);
    return read(is);
  }

 private:
  void combine() {
    combined_ = HermiteSeries();
    for (int j = 1; j <= r_; ++j) combined_ += H_[static_cast<std::size_t>(j)].scaled(std::pow(sigma_, -j));
  }

  int m_ = 2;
  int r_ = 0;
  int n_ = 0;
  double sigma_ = 1.0;
  NormalizationSpec norm_;
  std::vector<HermiteSeries> H_ = std::vector<HermiteSeries>(1);
  std::vector<double> gamma_;
  HermiteSeries combined_;
};

/// x -> Phi_{m,n}(a_n x + v_n): the expansion for (S_n - A_n)/B_n obtained by
/// exact composition rather than re-expansion.
class RebasedExpansion {
 public:
  RebasedExpansion(EdgeworthExpansion e, NormalizationSpec norm) : e_(std::move(e)), norm_(norm) {
    norm_.validate();
    if (std::abs(norm_.sigma - e_.sigma()) > 1e-12 * e_.sigma())
      throw PreconditionError("normalization sigma_n differs from the expansion's sigma_n");
  }
  double cdf(double x) const { return e_.cdf(norm_.a() * x + norm_.v()); }
  double sf(double x) const { return e_.sf(norm_.a() * x + norm_.v()); }
  double pdf(double x) const { return norm_.a() * e_.pdf(norm_.a() * x + norm_.v()); }
  const NormalizationSpec& normalization() const noexcept { return norm_; }
  const EdgeworthExpansion& base() const noexcept { return e_; }

 private:
  EdgeworthExpansion e_;
  NormalizationSpec norm_;
};

inline RebasedExpansion affine_rebase(const EdgeworthExpansion& e, const NormalizationSpec& norm) {
  return RebasedExpansion(e, norm);
}

}  // namespace nuedge

#endif  // NUEDGE_EDGEWORTH_EXPANSION_HPP
