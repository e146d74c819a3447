#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nuedge/harness.hpp"

using namespace nuedge;

namespace {

// Flags shared by every subcommand. Lists stay as text and go through the
// scenario field parser, so flag errors read like config errors.
struct Flags {
  std::string model = "builtin:rademacher";
  std::optional<std::string> m, r, n, p, q, A, seed, grid_max, mc_samples;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--model", f.model, "chain file or builtin:<name>");
  sub->add_option("--m", f.m, "moment order m (3..8)");
  sub->add_option("--r", f.r, "expansion order r (0..m-2)");
  sub->add_option("--n", f.n, "comma list, or a..b for the powers of two in [a, b]");
  sub->add_option("--p", f.p, "transport orders (comma list)");
  sub->add_option("--q", f.q, "moment orders (comma list)");
  sub->add_option("--A", f.A, "block variance target (0 = default)");
  sub->add_option("--seed", f.seed, "Monte Carlo seed");
  sub->add_option("--grid-max", f.grid_max, "half-width of the uniform scan grid");
  sub->add_option("--mc-samples", f.mc_samples, "Monte Carlo sample size");
  sub->add_option("--out", f.out, "write a report bundle to this directory");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

ScenarioConfig config_from(const Flags& f, const std::string& scan) {
  ScenarioConfig c;
  c.name = scan;
  c.scans = {scan};
  auto set = [&](const char* key, const std::optional<std::string>& v) {
    if (v) detail::apply_field(c, key, *v);
  };
  detail::apply_field(c, "model", f.model);
  set("m", f.m);
  set("r", f.r);
  set("n", f.n);
  set("p", f.p);
  set("q", f.q);
  set("A", f.A);
  set("seed", f.seed);
  set("grid_max", f.grid_max);
  set("mc_samples", f.mc_samples);
  detail::apply_field(c, "format", f.format);
  if (!f.out.empty()) c.out = f.out;
  return c;
}

void print_verdicts(const ScenarioResult& res) {
  for (const auto& v : res.verdicts)
    std::cerr << v.scan << ": " << v.verdict.label << (v.verdict.pass ? " (pass)" : " (fail)")
              << (v.verdict.flagged ? " [flagged]" : "") << (v.verdict.note.empty() ? "" : " - " + v.verdict.note)
              << '\n';
}

// With --out the full bundle goes to disk; otherwise the main table of the
// scan is printed and verdicts go to stderr.
int run_scan(const Flags& f, const std::string& scan) {
  const auto c = config_from(f, scan);
  if (!f.out.empty()) {
    const auto res = run_scenario(c);
    print_verdicts(res);
    res.table().write(std::cout, c.format);
    return res.exit_code;
  }
  const auto res = evaluate_scenario(c);
  std::vector<const NamedTable*> shown;
  for (const auto& t : res.tables)
    if (t.stem.find("_curve") == std::string::npos) shown.push_back(&t);
  for (const auto* t : shown) {
    if (c.format == "csv" && shown.size() > 1) std::cout << "# " << t->stem << '\n';
    t->table.write(std::cout, c.format);
  }
  print_verdicts(res);
  return res.exit_code;
}

void emit(const Table& t, const Flags& f, const std::string& stem) {
  if (f.out.empty()) {
    t.write(std::cout, f.format);
    return;
  }
  std::filesystem::create_directories(f.out);
  const auto path = std::filesystem::path(f.out) / (stem + (f.format == "json" ? ".json" : ".csv"));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path.string() + "'");
  t.write(os, f.format);
}

std::vector<double> uniform_grid(double half_width, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = -half_width + 2.0 * half_width * k / (points - 1);
  return g;
}

// Law of S_n - E S_n: atoms for chains, a CDF grid for iid continuous models.
int cmd_dist(const Flags& f) {
  const auto c = config_from(f, "be");
  const Model model = resolve_model(c.model);
  if (const auto* spec = std::get_if<MarkovChainSpec>(&model)) {
    Table t({"n", "value", "mass", "cdf"});
    const auto laws = exact_distributions(*spec, c.n);
    for (std::size_t i = 0; i < laws.size(); ++i)
      for (std::size_t k = 0; k < laws[i].size(); ++k)
        t.add({c.n[i], laws[i].value(k), laws[i].mass(k), laws[i].cdf_at_index(k)});
    emit(t, f, "dist");
    return 0;
  }
  const auto& iid = std::get<IidContinuousModel>(model);
  Table t({"n", "x", "density", "cdf"});
  for (long n : c.n) {
    const auto d = iid_continuous_distribution(iid.base, static_cast<int>(n));
    const double sd = std::sqrt(d.variance());
    for (double z : uniform_grid(c.grid_max, 401)) {
      const double x = d.mean() + z * sd;
      t.add({n, x, d.density(x), d.cdf(x)});
    }
  }
  emit(t, f, "dist");
  return 0;
}

int cmd_cumulants(const Flags& f) {
  const auto c = config_from(f, "be");
  const Model model = resolve_model(c.model);
  const int jmax = detail::law_order(c.m);
  const auto cs = cumulant_family(model, c.n, jmax);
  Table t({"n", "sigma", "j", "gamma_S", "gamma_W"});
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (int j = 2; j <= jmax; ++j) t.add({c.n[i], cs[i].sigma(), static_cast<long>(j), cs[i].gamma(j), cs[i].gamma_normalized(j)});
  emit(t, f, "cumulants");
  return 0;
}

// Psi_{r,n} of the self-normalized sum on the scan grid.
int cmd_expand(const Flags& f) {
  const auto c = config_from(f, "be");
  const Model model = resolve_model(c.model);
  const auto cs = cumulant_family(model, c.n, detail::law_order(c.m));
  Table t({"n", "r", "x", "normal_cdf", "psi_cdf", "psi_density"});
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto e = EdgeworthExpansion(cs[i], c.m).truncated(c.r);
    for (double x : uniform_grid(c.grid_max, 401))
      t.add({c.n[i], static_cast<long>(c.r), x, normal_cdf(x), e.cdf(x), e.pdf(x)});
  }
  emit(t, f, "expand");
  return 0;
}

int cmd_run(const std::string& scenario, const Flags& f, bool format_given) {
  auto c = load_scenario(scenario);
  if (!f.out.empty()) c.out = f.out;
  if (format_given) c.format = f.format;
  const auto res = run_scenario(c);
  print_verdicts(res);
  std::cout << "wrote " << res.files.size() + 1 << " files to " << c.out << '\n';
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edgeworth expansions and non-uniform error scans for sums of weakly dependent variables"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Flags f;
  std::string scenario;
  struct Sub {
    const char* name;
    const char* help;
    const char* scan;
  };
  const std::vector<Sub> subs{
      {"dist", "export the exact law of the centered sum", nullptr},
      {"cumulants", "cumulants of S_n and W_n", nullptr},
      {"expand", "Edgeworth expansion table", nullptr},
      {"scan-be", "weighted Berry-Esseen scan against the normal law", "be"},
      {"scan-edgeworth", "weighted error scan against the order-r expansion", "edgeworth"},
      {"scan-transport", "Wasserstein distances to the normal law and the expansion", "transport"},
      {"scan-moments", "moments of W_n against expansion moments", "moments"},
      {"scan-stationary", "n-dependent polynomials against their stationary limit", "stationary"},
      {"couple", "Gaussian coupling through the variance decomposition", "coupling"},
      {"check-assumptions", "tail and characteristic-function conditions", "assumptions"},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, f);
    handles.push_back(sub);
  }
  auto* run = app.add_subcommand("run", "run a scenario file or a shipped scenario");
  run->add_option("scenario", scenario, "path or shipped scenario name")->required();
  run->add_option("--out", f.out, "output directory (overrides the file)");
  auto* fmt = run->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other parse failure is a usage error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(scenario, f, fmt->count() > 0);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!handles[i]->parsed()) continue;
      const std::string name = subs[i].name;
      if (name == "dist") return cmd_dist(f);
      if (name == "cumulants") return cmd_cumulants(f);
      if (name == "expand") return cmd_expand(f);
      return run_scan(f, subs[i].scan);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
