#ifndef NUEDGE_MODELS_BUILTIN_HPP
#define NUEDGE_MODELS_BUILTIN_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/models/chain.hpp"
#include "nuedge/models/piecewise.hpp"

namespace nuedge {

/// Sums of n iid copies of a continuous piecewise-polynomial law.
struct IidContinuousModel {
  std::string name;
  PiecewisePolyCDF base;
};

using Model = std::variant<MarkovChainSpec, IidContinuousModel>;

inline std::string model_name(const Model& m) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, MarkovChainSpec>)
          return v.name();
        else
          return v.name;
      },
      m);
}

namespace builtin {

/// iid fair signs as a 2-state chain with uniform kernels; Y_j = -1 or +1 by X_{j+1}.
inline MarkovChainSpec rademacher() {
  MarkovChainSpec s;
  s.initial = {0.5, 0.5};
  s.kernels = {Matrix{{0.5, 0.5}, {0.5, 0.5}}};
  s.observables = {Matrix{{-1.0, 1.0}, {-1.0, 1.0}}};
  s.meta["name"] = "rademacher";
  return s;
}

/// Inhomogeneous 2-state chain alternating two kernels;
/// f(x, y) = 1{y = 1} + 0.5 * 1{x = 1}.
inline MarkovChainSpec elliptic() {
  MarkovChainSpec s;
  s.initial = {0.5, 0.5};
  s.kernels = {Matrix{{0.7, 0.3}, {0.6, 0.4}}, Matrix{{0.5, 0.5}, {0.2, 0.8}}};
  const Matrix f{{0.0, 1.0}, {0.5, 1.5}};
  s.observables = {f, f};
  s.meta["name"] = "elliptic";
  return s;
}

/// Homogeneous 2-state chain started from its stationary law; Y_j = 1{X_{j+1} = 1}.
inline MarkovChainSpec stationary2() {
  MarkovChainSpec s;
  s.initial = {2.0 / 3.0, 1.0 / 3.0};
  s.kernels = {Matrix{{0.95, 0.05}, {0.1, 0.9}}};
  s.observables = {Matrix{{0.0, 1.0}, {0.0, 1.0}}};
  s.meta["name"] = "stationary2";
  return s;
}

/// State (Z, e) with Z a sticky binary chain (stay 0.8) and e a fresh fair
/// sign each step; Y_j = e_{j+1} v(Z_{j+1}) with v = (1, 0.37). Flipping all
/// signs preserves the law, so every odd cumulant of S_n vanishes.
inline MarkovChainSpec symmetric4() {
  // state index = 2 z + (e > 0)
  const double v[2] = {1.0, 0.37};
  Matrix P(4, 4), f(4, 4);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y) {
      const std::size_t z = x / 2, z2 = y / 2;
      P(x, y) = (z == z2 ? 0.8 : 0.2) * 0.5;
      f(x, y) = (y % 2 == 1 ? 1.0 : -1.0) * v[z2];
    }
  MarkovChainSpec s;
  s.initial = {0.25, 0.25, 0.25, 0.25};
  s.kernels = {P};
  s.observables = {f};
  s.meta["name"] = "symmetric4";
  return s;
}

inline IidContinuousModel uniform() { return {"uniform", PiecewisePolyCDF::uniform(-1.0, 1.0)}; }

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"rademacher", "elliptic", "stationary2", "symmetric4", "uniform"};
  return n;
}

}  // namespace builtin

inline Model builtin_model(const std::string& name) {
  if (name == "rademacher") return builtin::rademacher();
  if (name == "elliptic") return builtin::elliptic();
  if (name == "stationary2") return builtin::stationary2();
  if (name == "symmetric4") return builtin::symmetric4();
  if (name == "uniform") return builtin::uniform();
  std::string known;
  for (const auto& n : builtin::names()) known += (known.empty() ? "" : ", ") + n;
  throw InputError("unknown built-in model '" + name + "' (known: " + known + ")");
}

/// Elliptic chain with observables f_j = j^{-beta} g, g as in builtin::elliptic.
///
/// meta["predicted_order"] holds the admissible expansion orders for this
/// decay: "all" at beta = 1/2, otherwise "r < 1/(1 - 2 beta)" evaluated.
inline MarkovChainSpec scenario_theorem46(double beta, long n) {
  if (!(beta > 0.0 && beta <= 0.5)) throw InputError("beta must lie in (0, 1/2]");
  if (n < 1) throw InputError("number of steps must be >= 1");
  const MarkovChainSpec base = builtin::elliptic();
  MarkovChainSpec s;
  s.initial = base.initial;
  s.repeat = 1;
  for (long j = 1; j <= n; ++j) {
    s.kernels.push_back(base.kernel(j));
    Matrix f = base.observable(j);
    const double scale = std::pow(static_cast<double>(j), -beta);
    for (double& v : f.a) v *= scale;
    s.observables.push_back(std::move(f));
  }
  std::ostringstream b;
  b.precision(17);
  b << beta;
  s.meta["name"] = "decay-" + b.str();
  s.meta["beta"] = b.str();
  if (beta == 0.5) {
    s.meta["predicted_order"] = "all";
  } else {
    std::ostringstream r;
    r.precision(17);
    r << 1.0 / (1.0 - 2.0 * beta);
    s.meta["predicted_order"] = "r < " + r.str();
    s.meta["predicted_bound"] = r.str();
  }
  return s;
}

/// Largest integer r admitted by the decay rate (r < 1/(1-2 beta)); -1 means all.
inline long predicted_max_order(double beta) {
  if (!(beta > 0.0 && beta <= 0.5)) throw InputError("beta must lie in (0, 1/2]");
  if (beta == 0.5) return -1;
  const double bound = 1.0 / (1.0 - 2.0 * beta);
  // Strict inequality; bounds within rounding of an integer count as that integer.
  const double k = std::round(bound);
  return std::abs(bound - k) <= 1e-9 * k ? static_cast<long>(k) - 1 : static_cast<long>(std::floor(bound));
}

}  // namespace nuedge

#endif  // NUEDGE_MODELS_BUILTIN_HPP
