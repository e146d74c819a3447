#ifndef NUEDGE_TRANSPORT_COUPLING_HPP
#define NUEDGE_TRANSPORT_COUPLING_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/models/lattice.hpp"
#include "nuedge/transport/cdf.hpp"
#include "nuedge/transport/distances.hpp"
#include "nuedge/trend.hpp"

namespace nuedge {

/// Marginal cost of coupling S_n with a sum of independent centered normals
/// of total variance B_n^2: the quantile coupling attains W_p(F_{S_n}, N(0, B_n^2)).
struct CouplingReport {
  double p = 2.0;
  std::vector<long> n;
  std::vector<double> B;
  std::vector<double> cost;
  std::vector<double> cost_error;
  double sup = 0.0;
  /// max cost <= 1.5 x median cost
  bool bounded = false;
};

inline CouplingReport gaussian_coupling(const std::vector<GeneralizedCDF>& dists, const std::vector<long>& n,
                                        const std::vector<double>& B, double p, const TrendRule& rule = {}) {
  if (dists.size() != B.size() || dists.size() != n.size() || dists.empty())
    throw InputError("gaussian_coupling needs one scale B_n and one n per distribution");
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (!(B[i] > 0.0)) throw PreconditionError("gaussian_coupling needs B_n > 0");
    if (i > 0 && B[i] < B[i - 1]) throw PreconditionError("gaussian_coupling needs B_n non-decreasing");
    if (i > 0 && n[i] <= n[i - 1]) throw InputError("gaussian_coupling needs increasing n");
  }
  CouplingReport r;
  r.p = p;
  r.n = n;
  r.B = B;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto e = wasserstein_p_estimate(dists[i], cdfs::normal(0.0, B[i]), p);
    r.cost.push_back(e.value);
    r.cost_error.push_back(e.error);
    r.sup = std::max(r.sup, e.value);
  }
  r.bounded = bounded_max(r.cost, rule);
  return r;
}

/// Same for exact lattice laws of S_n.
inline CouplingReport gaussian_coupling(const std::vector<LatticeDistribution>& laws, const std::vector<long>& n,
                                        const std::vector<double>& B, double p, const TrendRule& rule = {}) {
  std::vector<GeneralizedCDF> d;
  for (const auto& l : laws) d.push_back(cdfs::lattice(l));
  return gaussian_coupling(d, n, B, p, rule);
}

}  // namespace nuedge

#endif  // NUEDGE_TRANSPORT_COUPLING_HPP
