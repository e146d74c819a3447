// Acceptance gate: one line per criterion, exit code 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nuedge/harness.hpp"

using namespace nuedge;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criterion 1 oracle -------------------------------------------------

std::map<long long, double> enumerate_paths(const MarkovChainSpec& spec, long n, double step) {
  double centering = 0.0;
  for (double m : spec.step_means(n)) centering += m;
  std::map<long long, double> law;
  std::vector<std::size_t> path(static_cast<std::size_t>(n) + 1, 0);
  auto rec = [&](auto&& self, long j, double prob, double sum) -> void {
    if (prob == 0.0) return;
    if (j > n) {
      law[std::llround((sum - centering) / step)] += prob;
      return;
    }
    const Matrix& P = spec.kernel(j);
    const std::size_t x = path[static_cast<std::size_t>(j - 1)];
    for (std::size_t y = 0; y < P.cols; ++y) {
      path[static_cast<std::size_t>(j)] = y;
      self(self, j + 1, prob * P(x, y), sum + spec.observable(j)(x, y));
    }
  };
  for (std::size_t x = 0; x < spec.initial.size(); ++x) {
    path[0] = x;
    rec(rec, 1, spec.initial[x], 0.0);
  }
  return law;
}

Matrix random_kernel(std::mt19937_64& g, std::size_t r, std::size_t c, bool sparse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix P(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      P(i, j) = sparse && u(g) < 0.3 ? 0.0 : u(g);
      s += P(i, j);
    }
    if (s == 0.0) {
      P(i, 0) = 1.0;
      s = 1.0;
    }
    for (std::size_t j = 0; j < c; ++j) P(i, j) /= s;
  }
  return P;
}

// 2- and 3-state chains, homogeneous and periodic, some with sparse kernels
// and quarter-step observables.
std::vector<MarkovChainSpec> chain_corpus() {
  std::mt19937_64 g(20240611);
  std::uniform_int_distribution<int> k(-3, 3);
  std::vector<MarkovChainSpec> out;
  for (int c = 0; c < 24; ++c) {
    const std::size_t s0 = c % 2 ? 3 : 2;
    const std::size_t L = 1 + c % 3;
    std::vector<std::size_t> sizes{s0};
    for (std::size_t j = 1; j < L; ++j) sizes.push_back(2 + (c + j) % 2);
    sizes.push_back(s0);
    MarkovChainSpec s;
    s.initial = random_kernel(g, 1, s0, false).a;
    const double unit = c % 4 == 3 ? 0.25 : 1.0;
    for (std::size_t j = 0; j < L; ++j) {
      s.kernels.push_back(random_kernel(g, sizes[j], sizes[j + 1], c % 5 == 0));
      Matrix f(sizes[j], sizes[j + 1]);
      for (double& v : f.a) v = unit * k(g);
      s.observables.push_back(f);
    }
    out.push_back(std::move(s));
  }
  for (const char* name : {"rademacher", "elliptic", "stationary2"})
    out.push_back(std::get<MarkovChainSpec>(builtin_model(name)));
  return out;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t chains = 0;
  for (const auto& spec : chain_corpus()) {
    ++chains;
    const auto snap = snap_to_lattice(spec);
    for (long n = 1; n <= 8; ++n) {
      const auto d = exact_distribution(spec, n);
      const auto law = enumerate_paths(spec, n, snap.step);
      std::map<long long, double> dp;
      for (std::size_t k = 0; k < d.size(); ++k)
        if (d.mass(k) > 0.0) dp[std::llround(d.value(k) / snap.step)] += d.mass(k);
      for (const auto& [k, m] : law) worst = std::max(worst, std::abs(dp[k] - m));
      for (const auto& [k, m] : dp) worst = std::max(worst, std::abs((law.count(k) ? law.at(k) : 0.0) - m));
    }
  }
  const double secs = seconds_since(t0);
  o.detail << chains << " chains, n <= 8, max mass diff " << worst << ", " << secs << " s";
  o.require(worst <= 1e-12, "mass diff <= 1e-12");
  o.require(secs < 5.0, "runtime < 5 s");
  return o;
}

// ---- criterion 2 ----------------------------------------------------------

double weighted_sup(const GeneralizedCDF& F, const std::function<double(double)>& G, int power) {
  double s = 0.0;
  for (double x : linspace(-8.0, 8.0, 401)) s = std::max(s, std::pow(1.0 + std::abs(x), power) * std::abs(F.F(x) - G(x)));
  return s;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<long> ns{4, 8, 16, 32};
  const auto laws = sum_laws(builtin::uniform(), ns, 5);
  std::vector<double> scaled1;
  double d1 = 0.0, d2 = 0.0;
  for (const auto& L : laws) {
    const EdgeworthExpansion e(L.cumulants, 4);
    const auto psi1 = e.truncated(1), psi2 = e.truncated(2);
    const double s1 = weighted_sup(L.W, [&](double x) { return psi1.cdf(x); }, 3);
    scaled1.push_back(L.sigma * s1);
    if (L.n == 32) {
      d1 = s1;
      d2 = weighted_sup(L.W, [&](double x) { return psi2.cdf(x); }, 3);
    }
  }
  // Classical coefficients of H_1 and H_2 against Hermite polynomials.
  const double sigma = 3.0, g3 = 1.7, g4 = -2.3, s2 = sigma * sigma;
  const auto H = build_polynomials(CumulantSequence(5, sigma, {0, 0, s2, g3, g4}), 4);
  const DensePolynomial h1 = hermite(2) * (g3 / s2 / 6.0);
  const DensePolynomial h2 = hermite(3) * (g4 / s2 / 24.0) + hermite(5) * ((g3 / s2) * (g3 / s2) / 72.0);
  double coef = 0.0;
  for (double x : linspace(-4.0, 4.0, 33))
    coef = std::max({coef, std::abs(H.at(1)(x) - h1(x)), std::abs(H.at(2)(x) - h2(x)) / (1.0 + std::abs(h2(x)))});
  const double secs = seconds_since(t0);
  const double drop = 1.0 - scaled1.back() / scaled1.front();
  o.detail << "sigma*D1: n=4 " << scaled1.front() << " -> n=32 " << scaled1.back() << " (drop " << 100 * drop
           << "%), D2/D1 at n=32 " << d2 / d1 << ", coefficient error " << coef << ", " << secs << " s";
  o.require(drop >= 0.5, "r=1 decrease >= 50%");
  o.require(d2 <= 0.7 * d1, "Psi_2 beats Psi_1 by >= 30%");
  o.require(coef <= 1e-12, "1/6, 1/24, 1/72 coefficients");
  o.require(secs < 30.0, "runtime < 30 s");
  return o;
}

// ---- criteria 3-5 -----------------------------------------------------------

std::string series(const std::vector<double>& v) {
  std::ostringstream s;
  s.precision(4);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
  return s.str();
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ns = dyadic_range(4, 9);
  for (const char* name : {"elliptic", "rademacher"}) {
    const auto rep = scan_nonuniform(builtin_model(name), 3, 0, ns);
    o.detail << name << " sigma*D: " << series(rep.scaled) << "; ";
    o.require(rep.verdict.pass && rep.verdict.label == "bounded", std::string(name) + " bounded");
  }
  const double secs = seconds_since(t0);
  o.detail << secs << " s";
  o.require(secs < 60.0, "runtime < 60 s");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ns = dyadic_range(4, 9);
  std::size_t pairs = 0;
  for (const char* name : {"elliptic", "rademacher"}) {
    // m = 4 puts p = 2 inside the guaranteed range p < m - 1.
    const auto rep = scan_transport(builtin_model(name), 4, 0, {1.0, 2.0}, ns);
    for (std::size_t k = 0; k < rep.p.size(); ++k) {
      std::vector<double> s;
      for (const auto& row : rep.rows)
        if (row.p == rep.p[k]) s.push_back(row.scaled_normal);
      o.detail << name << " sigma*W" << rep.p[k] << ": " << series(s) << "; ";
      o.require(rep.normal[k].pass && !rep.normal[k].flagged, std::string(name) + " W_p bounded");
    }
    for (const auto& row : rep.rows) {
      ++pairs;
      o.require(row.w_normal <= row.bobkov_normal + kBobkovTolerance, "W_p <= Bobkov bound");
    }
    o.require(rep.bobkov_ok, "Bobkov check");
  }
  const double secs = seconds_since(t0);
  o.detail << pairs << " pairs checked against the Bobkov bound, " << secs << " s";
  o.require(secs < 60.0, "runtime < 60 s");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto rep = scan_transport(builtin::symmetric4(), 4, 0, {1.0}, dyadic_range(5, 9));
  const double first = rep.rows.front().scaled_normal, last = rep.rows.back().scaled_normal;
  const auto d = exact_distribution(builtin::symmetric4(), 512);
  const double g3 = cumulants_of(d, 512, 3).gamma(3);
  o.detail << "symmetric4 sigma*W1: n=32 " << first << ", n=512 " << last << " (ratio " << last / first
           << "), gamma_3(S_512) = " << g3;
  o.require(last <= 0.5 * first, "ratio <= 0.5");
  o.require(std::abs(g3) <= 1e-8, "gamma_3 = 0");
  return o;
}

// ---- criterion 6 ------------------------------------------------------------

Outcome criterion6() {
  Outcome o;
  const auto rep = scan_coupling(builtin::elliptic(), dyadic_range(4, 9), 2.0);
  const auto& dec = rep.decomposition;
  bool monotone = true;
  for (std::size_t k = 1; k < dec.a.size(); ++k) monotone = monotone && dec.a[k] >= dec.a[k - 1];
  double bmax = 0.0;
  for (double b : dec.b) bmax = std::max(bmax, std::abs(b));
  o.detail << "elliptic W2(S_n, N(0, a_n)): " << series(rep.coupling.cost) << "; A = " << dec.A << ", sup|b_n| = " << bmax << ", overshoot " << dec.overshoot;
  o.require(rep.verdict.pass, "coupling cost bounded (1.5x median)");
  o.require(monotone && dec.monotone, "a_n non-decreasing");
  o.require(dec.remainder_bounded && bmax <= 2.0 * dec.A + dec.overshoot + 1e-9, "|b_n| <= 2A + overshoot");
  return o;
}

// ---- criterion 7 ------------------------------------------------------------

Outcome criterion7() {
  Outcome o;
  const auto rep = scan_moments(builtin::uniform(), 5, 2, {4}, {4, 8, 16, 32});
  std::vector<double> gaps;
  for (const auto& row : rep.rows) gaps.push_back(row.scaled_gap);
  o.detail << "uniform sigma^2|E W^4 - int x^4 dPsi_2|: " << series(gaps) << " (" << rep.signed_verdicts[0].label << "); ";
  o.require(rep.signed_verdicts[0].pass && rep.signed_verdicts[0].label == "vanishing", "fourth-moment gap vanishing");
  // E[W_n^2] = 1 on every exact model.
  double worst = 0.0;
  for (const auto& name : builtin::names()) {
    const Model model = builtin_model(name);
    const std::vector<long> ns = std::holds_alternative<IidContinuousModel>(model) ? std::vector<long>{4, 8, 16, 32, 64}
                                                                                  : dyadic_range(4, 9);
    LawOptions opt;
    opt.allow_monte_carlo = false;
    for (const auto& L : sum_laws(model, ns, 4, opt)) worst = std::max(worst, std::abs(L.moment(2) - 1.0));
  }
  o.detail << "max |E W_n^2 - 1| over exact models " << worst;
  o.require(worst <= 1e-8, "E W^2 = 1 to 1e-8");
  return o;
}

// ---- criterion 8 ------------------------------------------------------------

Outcome criterion8() {
  Outcome o;
  for (const auto& name : builtin::names()) {
    const Model model = builtin_model(name);
    const auto ns = std::holds_alternative<IidContinuousModel>(model) ? std::vector<long>{4, 8, 16, 32, 64}
                                                                     : dyadic_range(4, 9);
    const auto rep = check_assumptions(model, 4, ns);
    o.detail << name << " A3 " << (rep.a3.bounded ? "bounded" : "unbounded") << " (eps " << rep.a3.epsilon << "); ";
    o.require(rep.a3.bounded, name + " A3 bounded");
  }
  const auto rad = check_assumptions(builtin::rademacher(), 3, dyadic_range(4, 7));
  const auto uni = check_assumptions(builtin::uniform(), 3, {4, 8, 16, 32});
  o.detail << "A6 rademacher " << rad.v6.label << ", uniform " << uni.v6.label << "; ";
  o.require(!rad.a6->vanishing, "A6 non-vanishing for Rademacher");
  o.require(uni.a6->vanishing, "A6 vanishing for uniform");
  const auto scan = scan_nonuniform(builtin::rademacher(), 3, 1, dyadic_range(4, 7));
  o.detail << "r=1 lattice scan flagged: " << (scan.verdict.flagged ? "yes" : "no");
  o.require(scan.verdict.flagged && rad.v6.flagged, "lattice auto-flag");
  return o;
}

// ---- criterion 9 ------------------------------------------------------------

Outcome criterion9() {
  Outcome o;
  const auto rep = scan_stationarity(builtin::stationary2(), 4, dyadic_range(5, 9));
  const auto& fit = rep.fit;
  auto residual_at = [&](int n) {
    for (std::size_t i = 0; i < fit.n.size(); ++i)
      if (fit.n[i] == n) return std::abs(fit.residuals[2][i]);
    return std::nan("");
  };
  const double r32 = residual_at(32), r256 = residual_at(256);
  o.detail << "|r_2|: n=32 " << r32 << ", n=256 " << r256 << " (ratio " << r256 / r32
           << "); sigma^2 sup phi|H_1n - H_1|: " << series(rep.scaled_first);
  o.require(rep.applicable, "stationary fit accepted");
  o.require(r256 <= 0.1 * r32, "residual ratio <= 0.1");
  o.require(rep.verdict.pass && rep.verdict.label == "bounded", "first correction bounded");
  return o;
}

// ---- criterion 10 -----------------------------------------------------------

// k-th derivative of phi by a Cauchy-integral stencil; never touches Hermite.
double stencil_derivative(int k, double x, double r = 1.5, int N = 128) {
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::complex<double> acc = 0.0;
  for (int s = 0; s < N; ++s) {
    const double th = 2.0 * std::numbers::pi * s / N;
    const std::complex<double> z = x + std::polar(r, th);
    acc += c * std::exp(-0.5 * z * z) * std::polar(std::pow(r, -k), -k * th);
  }
  double kf = 1.0;
  for (int i = 2; i <= k; ++i) kf *= i;
  return kf * acc.real() / N;
}

int brute_force_tuples(int j) {
  int count = 0;
  std::vector<int> k(static_cast<std::size_t>(j), 0);
  while (true) {
    int w = 0;
    for (int l = 1; l <= j; ++l) w += l * k[static_cast<std::size_t>(l - 1)];
    if (w == j) ++count;
    int pos = 0;
    while (pos < j) {
      if (++k[static_cast<std::size_t>(pos)] <= j / (pos + 1)) break;
      k[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == j) break;
  }
  return count;
}

Outcome criterion10() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double herm = 0.0;
  for (int k = 0; k <= 12; ++k)
    for (double x = -6.0; x <= 6.0; x += 0.25)
      herm = std::max(herm, std::abs(gaussian_derivative(k, x) - stencil_derivative(k, x)) / std::pow(1.0 + std::abs(x), k));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), s(2.0, 20.0);
  double fourier = 0.0;
  QuadOptions qopt;
  qopt.rel_tol = 1e-12;
  const auto pts = linspace(-40.0, 40.0, 161);
  for (int m = 3; m <= 6; ++m) {
    std::vector<double> gw;
    for (int j = 3; j <= m; ++j) gw.push_back(u(rng));
    const auto cs = CumulantSequence::from_normalized(10, s(rng), gw);
    const EdgeworthExpansion e(cs, m);
    const auto P = build_P(cs, m);
    for (double t : {0.5, 1.0, 2.0}) {
      // Closed form exp(-t^2/2)(1 + P(it)) against the transform of the density.
      const auto g = std::exp(-0.5 * t * t) * (1.0 + evaluate(P, {0.0, t}));
      const double re = integrate_panels([&](double x) { return std::cos(t * x) * e.pdf(x); }, pts, qopt).value;
      const double im = integrate_panels([&](double x) { return std::sin(t * x) * e.pdf(x); }, pts, qopt).value;
      fourier = std::max({fourier, std::abs(std::complex<double>(re, im) - g), std::abs(e.charfn(t) - g)});
    }
  }

  double round_trip = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> kappa(9);
    for (auto& v : kappa) v = u(rng);
    const auto back = moments_to_cumulants(cumulants_to_moments(kappa));
    for (std::size_t i = 0; i < kappa.size(); ++i) round_trip = std::max(round_trip, std::abs(back[i] - kappa[i]) / (1 + std::abs(kappa[i])));
  }

  bool counts = true;
  for (int j = 1; j <= 8; ++j) counts = counts && static_cast<int>(enumerate_tuples(j).size()) == brute_force_tuples(j);

  const double secs = seconds_since(t0);
  o.detail << "Hermite/derivative " << herm << ", Fourier " << fourier << ", round trip " << round_trip << ", tuple counts "
           << (counts ? "match" : "differ") << ", " << secs << " s";
  o.require(herm <= 1e-6, "Gaussian-derivative identity 1e-6");
  o.require(fourier <= 1e-6, "Fourier consistency 1e-6");
  o.require(round_trip <= 1e-12, "moment/cumulant round trip 1e-12");
  o.require(counts, "tuple counts");
  o.require(secs < 10.0, "runtime < 10 s");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"C1  exact distribution vs path enumeration", criterion1},
      {"C2  classical Edgeworth anchor (uniform sums)", criterion2},
      {"C3  non-uniform Berry-Esseen, power 3", criterion3},
      {"C4  transport rate and Bobkov bound", criterion4},
      {"C5  symmetric chain W1 improvement", criterion5},
      {"C6  Gaussian coupling", criterion6},
      {"C7  moment expansions", criterion7},
      {"C8  assumption checkers", criterion8},
      {"C9  stationary polynomials", criterion9},
      {"C10 identity suite", criterion10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
