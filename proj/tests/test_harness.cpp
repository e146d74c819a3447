#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "nuedge/harness.hpp"

using namespace nuedge;

namespace {

// P(S_n <= s) for n fair signs, from log-binomial terms.
double binomial_sign_cdf(long n, long s) {
  double acc = 0.0;
  for (long k = 0; k <= n; ++k) {
    if (2 * k - n > s) break;
    acc += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
  }
  return std::min(acc, 1.0);
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("nuedge_harness_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(cell);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST(ScanNonuniform, RademacherBerryEsseenMatchesBinomialOracle) {
  const std::vector<long> ns{16, 32, 64, 128, 256};
  const auto rep = scan_nonuniform(builtin::rademacher(), 3, 0, ns);
  EXPECT_EQ(rep.verdict.label, "bounded");
  EXPECT_TRUE(rep.verdict.pass);
  EXPECT_FALSE(rep.verdict.flagged);
  ASSERT_EQ(rep.n, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const long n = ns[i];
    const double sd = std::sqrt(static_cast<double>(n));
    // Sup over atoms (both one-sided limits) and the uniform grid.
    double D = 0.0;
    for (long s = -n; s <= n; s += 2) {
      const double x = s / sd;
      if (std::abs(x) > 8.0) continue;
      const double w = std::pow(1.0 + std::abs(x), 3);
      D = std::max(D, w * std::abs(binomial_sign_cdf(n, s) - normal_cdf(x)));
      D = std::max(D, w * std::abs(binomial_sign_cdf(n, s - 2) - normal_cdf(x)));
    }
    for (int k = 0; k <= 400; ++k) {
      const double x = -8.0 + 16.0 * k / 400.0;
      const long s = static_cast<long>(std::floor((x * sd + n) / 2.0 + 1e-9)) * 2 - n;
      D = std::max(D, std::pow(1.0 + std::abs(x), 3) * std::abs(binomial_sign_cdf(n, s) - normal_cdf(x)));
    }
    EXPECT_NEAR(rep.D[i], D, 1e-10 * std::max(1.0, D)) << "n=" << n;
    EXPECT_NEAR(rep.scaled[i], sd * rep.D[i], 1e-12);
    EXPECT_GE(rep.grid_size[i], 401u);
  }
}

TEST(ScanNonuniform, GridHasAllJumpsInsideTheWindow) {
  const auto rep = scan_nonuniform(builtin::rademacher(), 3, 0, {16});
  // 401 uniform points plus the 17 atoms (+-4 included) minus the coincident ones.
  std::size_t coincide = 0;
  for (long s = -16; s <= 16; s += 2) {
    const double x = s / 4.0;
    const double k = (x + 8.0) / 16.0 * 400.0;
    if (std::abs(k - std::round(k)) < 1e-12) ++coincide;
  }
  EXPECT_EQ(rep.grid_size[0], 401u + 17u - coincide);
  for (double d : rep.D) EXPECT_GE(d, 0.0);
}

TEST(ScanNonuniform, LatticeFirstOrderIsFlagged) {
  const auto rep = scan_nonuniform(builtin::rademacher(), 3, 1, {16, 32, 64, 128});
  EXPECT_TRUE(rep.verdict.flagged);
  EXPECT_FALSE(rep.verdict.failed());
  EXPECT_NE(rep.verdict.note.find("expected failure"), std::string::npos);
}

TEST(ScanNonuniform, UniformSumsFirstOrderVanishes) {
  const auto rep = scan_nonuniform(builtin::uniform(), 3, 1, {4, 8, 16, 32});
  EXPECT_EQ(rep.verdict.label, "vanishing");
  EXPECT_TRUE(rep.verdict.pass);
  EXPECT_FALSE(rep.lattice);
  EXPECT_LE(rep.scaled.back(), 0.8 * rep.scaled.front());
}

TEST(ScanNonuniform, TruncationReproducesLowerOrderBuild) {
  // Psi_1 from a build at m = 5 truncated to r = 1 equals a direct build at m = 3.
  const auto law = sum_laws(builtin::uniform(), {12}, 6).front();
  const EdgeworthExpansion full(law.cumulants, 5), direct(law.cumulants, 3);
  const auto t = full.truncated(1);
  for (double x = -6.0; x <= 6.0; x += 0.125) EXPECT_NEAR(t.cdf(x), direct.cdf(x), 1e-12);
}

TEST(ScanNonuniform, VerdictRecomputableFromCsvRows) {
  const auto rep = scan_nonuniform(builtin::elliptic(), 3, 0, {16, 32, 64, 128});
  std::ostringstream os;
  rep.table().write_csv(os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,sigma,D,scaled,sup,argmax,band,grid_points");
  std::vector<double> scaled;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < 4; ++k) std::getline(ss, cell, ',');
    scaled.push_back(std::stod(cell));
  }
  EXPECT_EQ(bounded_max(scaled), rep.verdict.pass);
  for (std::size_t i = 0; i < scaled.size(); ++i) EXPECT_EQ(scaled[i], rep.scaled[i]);
}

TEST(ScanNonuniform, MonteCarloFallbackIsBandLimited) {
  // Unrelated irrational steps defeat the lattice engine.
  auto spec = builtin::rademacher();
  spec.observables[0] = Matrix{{0.0, 1.0}, {std::sqrt(2.0), M_PI}};
  ScanOptions opt;
  opt.law.mc_samples = 20000;
  opt.law.seed = 7;
  const auto rep = scan_nonuniform(spec, 3, 0, {8, 16, 32}, opt);
  EXPECT_FALSE(rep.exact);
  for (double b : rep.band) EXPECT_NEAR(b, dkw_halfwidth(20000), 1e-15);
  EXPECT_TRUE(rep.verdict.label == "inconclusive" || rep.verdict.note.find("band-limited") != std::string::npos);
  // Same seed, same numbers.
  const auto again = scan_nonuniform(spec, 3, 0, {8, 16, 32}, opt);
  EXPECT_EQ(rep.D, again.D);
}

TEST(ScanNonuniform, RejectsBadOrders) {
  EXPECT_THROW(scan_nonuniform(builtin::rademacher(), 2, 0, {16}), UsageError);
  EXPECT_THROW(scan_nonuniform(builtin::rademacher(), 4, 3, {16}), UsageError);
  EXPECT_THROW(scan_nonuniform(builtin::rademacher(), 3, 0, {32, 16}), InputError);
}

TEST(ScanTransport, RademacherW1Bounded) {
  const auto rep = scan_transport(builtin::rademacher(), 3, 0, {1.0}, {16, 32, 64, 128, 256});
  ASSERT_EQ(rep.normal.size(), 1u);
  EXPECT_TRUE(rep.normal[0].pass);
  EXPECT_TRUE(rep.bobkov_ok);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.guaranteed);
    // W_1 is the L1 distance of the CDFs, which is also the Bobkov bound at p = 1.
    EXPECT_NEAR(row.w_normal, row.bobkov_normal, 1e-9);
  }
}

TEST(ScanTransport, SymmetricChainW1DecreasesTowardZero) {
  const auto rep = scan_transport(builtin::symmetric4(), 4, 0, {1.0}, {32, 64, 128, 256, 512});
  std::vector<double> s;
  for (const auto& row : rep.rows) s.push_back(row.scaled_normal);
  EXPECT_LE(s.back(), 0.5 * s.front());
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i], s[i - 1]);
}

TEST(ScanTransport, UniformFirstOrderBobkovRateDecreases) {
  const auto rep = scan_transport(builtin::uniform(), 4, 1, {2.0}, {4, 8, 16, 32});
  ASSERT_EQ(rep.psi.size(), 1u);
  EXPECT_EQ(rep.psi[0].label, "vanishing");
  EXPECT_TRUE(rep.psi[0].pass);
  EXPECT_FALSE(rep.psi[0].flagged);
  // Rows against Phi are reported but do not decide an r >= 1 scan.
  EXPECT_TRUE(rep.normal[0].flagged);
}

TEST(ScanTransport, OrdersOutsideGuaranteeAreFlagged) {
  const auto rep = scan_transport(builtin::rademacher(), 3, 0, {1.0, 2.0}, {16, 32, 64});
  EXPECT_FALSE(rep.normal[0].flagged);
  EXPECT_TRUE(rep.normal[1].flagged);
}

TEST(ScanMoments, SecondMomentAndOddSymmetry) {
  const auto rep = scan_moments(builtin::rademacher(), 4, 0, {2, 3}, {16, 32, 64});
  for (const auto& row : rep.rows) {
    if (row.q == 2) {
      EXPECT_NEAR(row.exact, 1.0, 1e-12);
      EXPECT_NEAR(row.gap, 0.0, 1e-8);
    } else {
      EXPECT_NEAR(row.exact, 0.0, 1e-12);
      EXPECT_NEAR(row.expansion, 0.0, 1e-8);
    }
  }
  for (const auto& v : rep.verdicts()) EXPECT_TRUE(v.pass) << v.note;
}

TEST(ScanMoments, UniformFourthMomentGapVanishes) {
  const auto rep = scan_moments(builtin::uniform(), 5, 2, {4}, {4, 8, 16, 32});
  // Exact fourth moment of W_n: 3 + gamma_4 / sigma^4 with gamma_4(U) = -2/15 per summand.
  for (const auto& row : rep.rows) {
    const double n = static_cast<double>(row.n);
    EXPECT_NEAR(row.exact, 3.0 - (2.0 / 15.0) / (n / 9.0), 1e-12);
  }
  EXPECT_TRUE(rep.signed_verdicts[0].pass);
  EXPECT_EQ(rep.signed_verdicts[0].label, "vanishing");
}

TEST(ScanMoments, RejectsOrderAtOrAboveM) { EXPECT_THROW(scan_moments(builtin::uniform(), 3, 0, {3}, {4, 8}), PreconditionError); }

TEST(ScanStationarity, IidModelMatchesExactly) {
  const auto rep = scan_stationarity(builtin::uniform(), 4, {8, 16, 32, 64});
  ASSERT_TRUE(rep.applicable) << rep.fit.reason;
  for (std::size_t j = 1; j < rep.diff.size(); ++j)
    for (double d : rep.diff[j]) EXPECT_LT(d, 1e-9);
  EXPECT_TRUE(rep.verdict.pass);
}

TEST(ScanStationarity, HomogeneousChainBounded) {
  const auto rep = scan_stationarity(builtin::stationary2(), 4, {32, 64, 128, 256, 512});
  ASSERT_TRUE(rep.applicable) << rep.fit.reason;
  EXPECT_EQ(rep.verdict.label, "bounded");
  // The first correction converges: raw differences shrink.
  EXPECT_LT(rep.diff[1].back(), rep.diff[1].front());
}

TEST(ScanStationarity, RejectsInhomogeneousChain) {
  EXPECT_THROW(scan_stationarity(builtin::elliptic(), 4, {32, 64, 128, 256}), PreconditionError);
}

TEST(ScanCoupling, EllipticBoundedWithDecomposition) {
  const auto rep = scan_coupling(builtin::elliptic(), {16, 32, 64, 128, 256, 512}, 2.0);
  EXPECT_TRUE(rep.verdict.pass);
  EXPECT_TRUE(rep.variance_verdict.pass);
  EXPECT_THROW(scan_coupling(builtin::uniform(), {16, 32}, 2.0), CapabilityError);
}

TEST(Assumptions, LatticeAndContinuousTails) {
  const auto rad = check_assumptions(builtin::rademacher(), 3, {16, 32, 64, 128});
  EXPECT_TRUE(rad.a3.bounded);
  EXPECT_FALSE(rad.a6->vanishing);
  EXPECT_TRUE(rad.v6.flagged);
  const auto uni = check_assumptions(builtin::uniform(), 3, {4, 8, 16, 32});
  EXPECT_TRUE(uni.a6->vanishing);
  EXPECT_TRUE(uni.v6.pass);
  EXPECT_FALSE(uni.v6.flagged);
}

TEST(Assumptions, LambdaRadiusFromDobrushinGap) {
  // Hand values: delta = max row TV distance over kernels, osc = max f - min f.
  EXPECT_DOUBLE_EQ(default_lambda_epsilon(builtin::rademacher()), 0.25);
  EXPECT_DOUBLE_EQ(default_lambda_epsilon(builtin::uniform()), 0.25);
  EXPECT_NEAR(default_lambda_epsilon(builtin::elliptic()), (1.0 - 0.3) / (2.0 * 1.5), 1e-15);
  EXPECT_NEAR(default_lambda_epsilon(builtin::symmetric4()), (1.0 - 0.6) / (2.0 * 2.0), 1e-15);
  EXPECT_NEAR(default_lambda_epsilon(builtin::stationary2()), (1.0 - 0.85) / 2.0, 1e-15);
  const auto rep = check_assumptions(builtin::stationary2(), 4, {32, 64, 128, 256, 512});
  EXPECT_NEAR(rep.a3.epsilon, 0.075, 1e-15);
  EXPECT_TRUE(rep.a3.bounded);
}

TEST(Scenario, ParsesFieldsAndRanges) {
  const auto c = parse_scenario_text(
      "# comment\nname = t\nmodel = builtin:elliptic\nm = 4\nr = 2\nn = 16..128\np = 1, 2.5\nq = 2 3\n"
      "scans = be, moments\ntrend.bounded_factor = 2\n");
  EXPECT_EQ(c.m, 4);
  EXPECT_EQ(c.r, 2);
  EXPECT_EQ(c.n, (std::vector<long>{16, 32, 64, 128}));
  EXPECT_EQ(c.p, (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(c.q, (std::vector<int>{2, 3}));
  EXPECT_EQ(c.rule.bounded_factor, 2.0);
}

TEST(Scenario, UsageErrorsCarryLineAndField) {
  auto message = [](const std::string& text) {
    try {
      parse_scenario_text(text);
    } catch (const UsageError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const auto m2 = message("name = x\nm = 2\n");
  EXPECT_NE(m2.find("line 2"), std::string::npos) << m2;
  EXPECT_NE(m2.find("'m'"), std::string::npos) << m2;
  EXPECT_NE(message("m = 3\nbogus = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("n = 64, 32\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("m = three\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("m = 3\nm = 4\n").find("already set"), std::string::npos);
  EXPECT_NE(message("m = 3\nq = 3\n").find("'q'"), std::string::npos);
}

TEST(Scenario, ShippedFilesMatchBuiltins) {
  for (const auto& [name, text] : builtin_scenarios()) {
    const auto path = std::filesystem::path(NUEDGE_SOURCE_DIR) / "scenarios" / (name + ".conf");
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(load_scenario(path.string()).to_json(), parse_scenario_text(text).to_json()) << name;
  }
}

TEST(Scenario, ShippedRademacherRunsCleanAndDeterministic) {
  auto c = load_scenario("rademacher-be");
  const auto dir = scratch("rad");
  c.out = dir.string();
  const auto res = run_scenario(c);
  EXPECT_EQ(res.exit_code, 0);
  ASSERT_FALSE(res.verdicts.empty());
  EXPECT_EQ(res.verdicts.front().scan, "be");
  EXPECT_EQ(res.verdicts.front().verdict.label, "bounded");
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  std::map<std::string, std::string> first;
  for (const auto& f : res.files) first[f] = slurp(dir / f);
  const auto manifest = slurp(dir / "manifest.json");
  ASSERT_TRUE(first.count("be.csv") && first.count("transport.csv") && first.count("moments.csv"));
  run_scenario(c);
  for (const auto& [f, text] : first) EXPECT_EQ(slurp(dir / f), text) << f;
  EXPECT_EQ(slurp(dir / "manifest.json"), manifest);
  // Verdict table agrees with the manifest.
  const auto rows = read_csv(dir / "verdicts.csv");
  ASSERT_EQ(rows.size(), res.verdicts.size() + 1);
  EXPECT_EQ(rows[1][0], "be");
  EXPECT_EQ(rows[1][2], "true");
  std::filesystem::remove_all(dir);
}

TEST(Scenario, FlaggedFailuresDoNotSetExitCode) {
  ScenarioConfig c;
  c.model = "builtin:rademacher";
  c.m = 3;
  c.r = 1;
  c.n = {16, 32, 64};
  c.scans = {"edgeworth"};
  const auto dir = scratch("flag");
  c.out = dir.string();
  const auto res = run_scenario(c);
  ASSERT_EQ(res.verdicts.size(), 1u);
  EXPECT_TRUE(res.verdicts[0].verdict.flagged);
  EXPECT_EQ(res.exit_code, 0);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, FailingVerdictSetsExitCode) {
  // A zero tolerance for growth makes the bounded rule fail on any non-constant sequence.
  ScenarioConfig c;
  c.model = "builtin:elliptic";
  c.n = {16, 32, 64, 128};
  c.scans = {"be"};
  c.rule.bounded_factor = 0.5;
  const auto dir = scratch("fail");
  c.out = dir.string();
  EXPECT_EQ(run_scenario(c).exit_code, 1);
  std::filesystem::remove_all(dir);
}

TEST(Table, SerializesSeventeenDigitsAndJson) {
  Table t({"a", "b", "c"});
  t.add({0.1, 3L, std::string("x")});
  std::ostringstream os;
  t.write_csv(os);
  EXPECT_EQ(os.str(), "a,b,c\n0.10000000000000001,3,x\n");
  const auto j = t.to_json();
  EXPECT_EQ(j[0]["b"], 3);
  EXPECT_DOUBLE_EQ(j[0]["a"].get<double>(), 0.1);
  EXPECT_THROW(t.add({1.0}), InputError);
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
}
