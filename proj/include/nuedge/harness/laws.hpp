#ifndef NUEDGE_HARNESS_LAWS_HPP
#define NUEDGE_HARNESS_LAWS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nuedge/cumulants.hpp"
#include "nuedge/errors.hpp"
#include "nuedge/models.hpp"
#include "nuedge/transport/cdf.hpp"

namespace nuedge {

/// Runs f(i) for i < count on up to hardware_concurrency threads. Each index
/// writes only its own output slot, so results do not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) f(i);
    }));
  // get() rethrows the first failure after all workers have stopped.
  for (auto& j : jobs) j.wait();
  for (auto& j : jobs) j.get();
}

struct LawOptions {
  /// Fall back to Monte Carlo when no exact engine applies.
  bool allow_monte_carlo = true;
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 1;
};

/// Law of S_n and of its self-normalized form W_n = (S_n - E S_n) / sigma_n.
struct SumLaw {
  long n = 0;
  double sigma = 0.0;
  bool exact = true;
  bool lattice = false;
  /// DKW half-width of the Monte Carlo band; 0 for exact laws.
  double band = 0.0;
  GeneralizedCDF W;
  CumulantSequence cumulants;
  /// E[W^q] and E|W|^q.
  std::function<double(int)> moment;
  std::function<double(int)> abs_moment;
  /// Exact characteristic function of S_n - E S_n, when available.
  std::optional<CharFnSource> charfn;
};

namespace detail {

inline SumLaw lattice_sum_law(const LatticeDistribution& d, long n, int jmax) {
  SumLaw L;
  L.n = n;
  L.sigma = std::sqrt(d.variance());
  L.lattice = true;
  const double mu = d.mean(), sd = L.sigma;
  L.W = cdfs::lattice(d, mu, sd);
  L.cumulants = cumulants_of(d, static_cast<int>(n), jmax);
  auto dp = std::make_shared<LatticeDistribution>(d);
  L.moment = [dp, mu, sd](int q) { return dp->central_moment(q, mu) / std::pow(sd, q); };
  L.abs_moment = [dp, mu, sd](int q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dp->size(); ++k) acc += dp->mass(k) * std::pow(std::abs(dp->value(k) - mu) / sd, q);
    return acc;
  };
  L.charfn = charfn_source(d, static_cast<int>(n));
  return L;
}

/// Cumulants of n iid copies: gamma_j(S_n) = n gamma_j(X).
inline CumulantSequence iid_cumulants(const PiecewisePolyCDF& base, long n, int jmax) {
  const auto one = cumulants_of(base, 1, jmax);
  std::vector<double> g(static_cast<std::size_t>(jmax) + 1, 0.0);
  for (int j = 2; j <= jmax; ++j) g[static_cast<std::size_t>(j)] = static_cast<double>(n) * one.gamma(j);
  const double sd = std::sqrt(g[2]);
  return CumulantSequence(static_cast<int>(n), sd, std::move(g));
}

inline SumLaw monte_carlo_sum_law(const MonteCarloECDF& mc, const CumulantSequence& cs, bool lattice) {
  SumLaw L;
  L.n = mc.n;
  L.exact = false;
  L.lattice = lattice;
  L.band = mc.dkw_halfwidth;
  L.cumulants = cs;
  L.sigma = cs.sigma();
  const double sd = L.sigma;
  L.W = cdfs::empirical(mc, 0.0, sd);
  auto sample = std::make_shared<std::vector<double>>(mc.sample);
  L.moment = [sample, sd](int q) {
    double acc = 0.0;
    for (double v : *sample) acc += std::pow(v / sd, q);
    return acc / static_cast<double>(sample->size());
  };
  L.abs_moment = [sample, sd](int q) {
    double acc = 0.0;
    for (double v : *sample) acc += std::pow(std::abs(v) / sd, q);
    return acc / static_cast<double>(sample->size());
  };
  return L;
}

/// Cumulants of a centered sample, from its standardized moments.
inline CumulantSequence sample_cumulants(const MonteCarloECDF& mc, int jmax) {
  const double N = static_cast<double>(mc.size());
  const double mu = mc.mean();
  double var = 0.0;
  for (double v : mc.sample) var += (v - mu) * (v - mu);
  const double sd = std::sqrt(var / N);
  if (!(sd > 0.0)) throw DegeneracyError("Monte Carlo sample has zero variance");
  std::vector<double> zmom(static_cast<std::size_t>(jmax), 0.0);
  for (double v : mc.sample) {
    const double z = (v - mu) / sd;
    double p = 1.0;
    for (int j = 0; j < jmax; ++j) {
      p *= z;
      zmom[static_cast<std::size_t>(j)] += p;
    }
  }
  for (double& m : zmom) m /= N;
  return cumulants_from_standardized(static_cast<int>(mc.n), sd, std::move(zmom));
}

/// Inverse-CDF draw from a piecewise law by bisection.
inline double draw_piecewise(const PiecewisePolyCDF& d, double u) {
  double lo = d.lower(), hi = d.upper();
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (d.cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Laws of S_n for every n in `ns`, exact when an engine applies.
///
/// Chains use the lattice dynamic program; iid continuous models use exact
/// convolution up to n = 64 with exact cumulants at any n. Otherwise, when
/// allowed, a Monte Carlo sample with a DKW band stands in for the CDF.
inline std::vector<SumLaw> sum_laws(const Model& model, const std::vector<long>& ns, int jmax,
                                    const LawOptions& opt = {}) {
  if (ns.empty()) throw InputError("empty n-range");
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] < 1 || (i > 0 && ns[i] <= ns[i - 1])) throw InputError("n values must be positive and increasing");
  std::vector<SumLaw> out(ns.size());
  if (const auto* spec = std::get_if<MarkovChainSpec>(&model)) {
    std::vector<LatticeDistribution> laws;
    try {
      laws = exact_distributions(*spec, ns);
    } catch (const CapabilityError&) {
      if (!opt.allow_monte_carlo) throw;
    } catch (const ResourceError&) {
      if (!opt.allow_monte_carlo) throw;
    }
    if (!laws.empty()) {
      parallel_for(ns.size(), [&](std::size_t i) { out[i] = detail::lattice_sum_law(laws[i], ns[i], jmax); });
      return out;
    }
    parallel_for(ns.size(), [&](std::size_t i) {
      const auto mc = monte_carlo_ecdf(*spec, ns[i], opt.mc_samples, opt.seed + static_cast<std::uint64_t>(ns[i]));
      out[i] = detail::monte_carlo_sum_law(mc, detail::sample_cumulants(mc, jmax), false);
    });
    return out;
  }
  const auto& iid = std::get<IidContinuousModel>(model);
  const PiecewisePolyCDF centered = iid.base.shifted(iid.base.mean());
  parallel_for(ns.size(), [&](std::size_t i) {
    const long n = ns[i];
    const auto cs = detail::iid_cumulants(iid.base, n, jmax);
    if (n <= 64) {
      const auto d = iid_continuous_distribution(iid.base, static_cast<int>(n));
      SumLaw L;
      L.n = n;
      L.sigma = cs.sigma();
      const double sd = L.sigma;
      L.W = cdfs::piecewise(d, 0.0, sd);
      L.cumulants = cs;
      auto dp = std::make_shared<PiecewisePolyCDF>(d);
      L.moment = [dp, sd](int q) { return dp->raw_moment(q) / std::pow(sd, q); };
      L.abs_moment = [dp, sd](int q) { return dp->absolute_moment(q) / std::pow(sd, q); };
      L.charfn = charfn_source_iid(iid.base, static_cast<int>(n));
      out[i] = std::move(L);
      return;
    }
    if (!opt.allow_monte_carlo) throw CapabilityError("exact iid convolution supports n <= 64; use Monte Carlo");
    auto sampler = [&](CounterRng& rng) {
      double s = 0.0;
      for (long k = 0; k < n; ++k) s += detail::draw_piecewise(centered, rng.uniform());
      return s;
    };
    const auto mc = monte_carlo_ecdf(sampler, n, opt.mc_samples, opt.seed + static_cast<std::uint64_t>(n));
    out[i] = detail::monte_carlo_sum_law(mc, cs, false);
    out[i].charfn = charfn_source_iid(iid.base, static_cast<int>(n));
  });
  return out;
}

/// Model from "builtin:<name>" or a chain file path.
inline Model resolve_model(const std::string& source) {
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_model(source.substr(prefix.size()));
  return load_chain_spec(source);
}

/// Dyadic n-range 2^lo .. 2^hi.
inline std::vector<long> dyadic_range(int lo = 3, int hi = 9) {
  std::vector<long> ns;
  for (int k = lo; k <= hi; ++k) ns.push_back(1L << k);
  return ns;
}

}  // namespace nuedge

#endif  // NUEDGE_HARNESS_LAWS_HPP
