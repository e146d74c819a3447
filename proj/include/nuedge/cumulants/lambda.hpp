#ifndef NUEDGE_CUMULANTS_LAMBDA_HPP
#define NUEDGE_CUMULANTS_LAMBDA_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nuedge/cumulants/charfn.hpp"
#include "nuedge/errors.hpp"

namespace nuedge {

/// Lambda_n(t) = ln E[e^{itS_n/sigma_n}] + t^2/2 and its derivatives on a
/// symmetric grid over [-eps*sigma_n, eps*sigma_n].
struct LambdaProfile {
  int n = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  int jmax = 0;
  bool degenerate = false;        ///< sigma_n == 0: everything is reported as 0.
  std::vector<double> t;          ///< ascending, contains 0
  std::vector<cplx> value;        ///< Lambda_n(t_i)
  std::vector<ComplexVec> deriv;  ///< deriv[j][i] = Lambda_n^{(j)}(t_i), j = 0..jmax

  std::size_t zero_index() const noexcept { return t.size() / 2; }
  cplx at_zero(int j) const { return deriv[static_cast<std::size_t>(j)][zero_index()]; }
  double sup_abs(int j) const {
    double s = 0.0;
    for (const auto& v : deriv[static_cast<std::size_t>(j)]) s = std::max(s, std::abs(v));
    return s;
  }
};

inline constexpr double kBranchFloor = 1e-12;

/// |f_n(eps sigma_n)| ~ exp(-eps^2 sigma_n^2 / 2) must stay well above the
/// branch floor up to sigma_n^2 ~ 512; 0.25 keeps it near 1e-7.
inline constexpr double kDefaultLambdaEpsilon = 0.25;

/// Builds the profile from an exact characteristic function.
///
/// The logarithm is unwound continuously outward from t = 0; a modulus below
/// 1e-12 anywhere on the grid aborts with BranchError.
inline LambdaProfile lambda_profile(const CharFnSource& src, int jmax, double epsilon = kDefaultLambdaEpsilon,
                                    int half_points = 100) {
  if (jmax < 3 || jmax > kMaxCumulantOrder) throw CapabilityError("lambda_profile supports 3 <= jmax <= 9");
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
  LambdaProfile prof;
  prof.n = src.n;
  prof.sigma = src.sigma;
  prof.epsilon = epsilon;
  prof.jmax = jmax;
  const std::size_t N = 2 * static_cast<std::size_t>(half_points) + 1;
  prof.t.resize(N);
  prof.value.assign(N, cplx(0.0, 0.0));
  prof.deriv.assign(static_cast<std::size_t>(jmax) + 1, ComplexVec(N, cplx(0.0, 0.0)));
  if (src.degenerate()) {
    prof.degenerate = true;
    for (std::size_t i = 0; i < N; ++i) prof.t[i] = 0.0;
    return prof;
  }
  const double tmax = epsilon * src.sigma;
  for (std::size_t i = 0; i < N; ++i)
    prof.t[i] = tmax * (static_cast<double>(i) - half_points) / half_points;
  prof.t[static_cast<std::size_t>(half_points)] = 0.0;

  std::vector<ComplexVec> f(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto psi = src.derivs(prof.t[i] / src.sigma, jmax);
    // f_n^{(k)}(t) = sigma^{-k} psi_n^{(k)}(t / sigma)
    double s = 1.0;
    for (auto& v : psi) {
      v *= s;
      s /= src.sigma;
    }
    if (std::abs(psi[0]) < kBranchFloor)
      throw BranchError("characteristic function vanishes at t = " + std::to_string(prof.t[i]), prof.t[i]);
    f[i] = std::move(psi);
  }

  const std::size_t mid = static_cast<std::size_t>(half_points);
  auto unwind = [&](std::size_t from, std::size_t to) {
    double arg = std::arg(f[from][0]);
    prof.value[from] = cplx(std::log(std::abs(f[from][0])), arg);
    const long step = to > from ? 1 : -1;
    for (long i = static_cast<long>(from) + step; i != static_cast<long>(to) + step; i += step) {
      const auto iu = static_cast<std::size_t>(i), ip = static_cast<std::size_t>(i - step);
      arg += std::arg(f[iu][0] / f[ip][0]);
      prof.value[iu] = cplx(std::log(std::abs(f[iu][0])), arg);
    }
  };
  unwind(mid, N - 1);
  unwind(mid, 0);

  for (std::size_t i = 0; i < N; ++i) {
    const double t = prof.t[i];
    prof.value[i] += 0.5 * t * t;
    const auto L = log_derivatives(f[i]);
    prof.deriv[0][i] = prof.value[i];
    for (int j = 1; j <= jmax; ++j) prof.deriv[static_cast<std::size_t>(j)][i] = L[static_cast<std::size_t>(j)];
    prof.deriv[1][i] += t;
    if (jmax >= 2) prof.deriv[2][i] += 1.0;
  }
  return prof;
}

}  // namespace nuedge

#endif  // NUEDGE_CUMULANTS_LAMBDA_HPP
