#ifndef NUEDGE_HARNESS_SCENARIO_HPP
#define NUEDGE_HARNESS_SCENARIO_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nuedge/errors.hpp"
#include "nuedge/harness/laws.hpp"
#include "nuedge/harness/report.hpp"
#include "nuedge/harness/scans.hpp"
#include "nuedge/version.hpp"

namespace nuedge {

/// One run of the verification scans.
struct ScenarioConfig {
  std::string name = "scenario";
  /// "builtin:<name>" or a chain file path.
  std::string model = "builtin:rademacher";
  int m = 3;
  int r = 0;
  std::vector<long> n = dyadic_range();
  std::vector<double> p{1.0, 2.0};
  std::vector<int> q{2};
  /// Block variance target; 0 selects the default.
  double A = 0.0;
  std::uint64_t seed = 1;
  std::string out = "out";
  /// be, edgeworth, transport, moments, stationary, coupling, assumptions
  std::vector<std::string> scans{"be"};
  double grid_max = 8.0;
  std::size_t mc_samples = 200000;
  TrendRule rule;
  std::string format = "csv";

  void validate() const {
    if (m < 3 || m > 8) throw UsageError("field 'm': must lie in [3, 8]");
    if (r < 0 || r > m - 2) throw UsageError("field 'r': must lie in [0, m - 2]");
    if (n.empty()) throw UsageError("field 'n': empty n-range");
    for (std::size_t i = 0; i < n.size(); ++i)
      if (n[i] < 1 || (i > 0 && n[i] <= n[i - 1])) throw UsageError("field 'n': values must be positive and increasing");
    for (double v : p)
      if (!(v >= 1.0)) throw UsageError("field 'p': values must be >= 1");
    for (int v : q)
      if (v < 1 || v >= m) throw UsageError("field 'q': values must satisfy 1 <= q < m");
    if (A < 0.0) throw UsageError("field 'A': must be >= 0");
    if (!(grid_max > 0.0)) throw UsageError("field 'grid_max': must be positive");
    if (mc_samples < 1) throw UsageError("field 'mc_samples': must be positive");
    if (format != "csv" && format != "json") throw UsageError("field 'format': csv or json");
    static const std::vector<std::string> known{"be",         "edgeworth", "transport",  "moments",
                                                "stationary", "coupling",  "assumptions"};
    if (scans.empty()) throw UsageError("field 'scans': nothing to run");
    for (const auto& s : scans)
      if (std::find(known.begin(), known.end(), s) == known.end())
        throw UsageError("field 'scans': unknown scan '" + s + "'");
  }

  ScanOptions options() const {
    ScanOptions o;
    o.rule = rule;
    o.grid_max = grid_max;
    o.law.mc_samples = mc_samples;
    o.law.seed = seed;
    return o;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["model"] = model;
    j["m"] = m;
    j["r"] = r;
    j["n"] = n;
    j["p"] = p;
    j["q"] = q;
    j["A"] = A;
    j["seed"] = seed;
    j["scans"] = scans;
    j["grid_max"] = grid_max;
    j["mc_samples"] = mc_samples;
    j["trend"] = {{"bounded_factor", rule.bounded_factor},
                  {"vanishing_drop", rule.vanishing_drop},
                  {"zero_floor", rule.zero_floor}};
    j["format"] = format;
    return j;
  }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& field) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) throw UsageError("field '" + field + "': cannot parse '" + s + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& field) {
  std::vector<T> out;
  for (const auto& tok : split_list(s)) out.push_back(parse_number<T>(tok, field));
  if (out.empty()) throw UsageError("field '" + field + "': empty list");
  return out;
}

/// n-range as a comma list or "a..b" for the powers of two in [a, b].
inline std::vector<long> parse_n_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) return parse_list<long>(s, "n");
  const long a = parse_number<long>(trim(s.substr(0, dots)), "n"), b = parse_number<long>(trim(s.substr(dots + 2)), "n");
  std::vector<long> out;
  for (long v = 1; v <= b && v > 0; v *= 2)
    if (v >= a) out.push_back(v);
  if (out.empty()) throw UsageError("field 'n': no power of two in " + s);
  return out;
}

inline void apply_field(ScenarioConfig& c, const std::string& key, const std::string& value) {
  if (key == "name")
    c.name = value;
  else if (key == "model")
    c.model = value;
  else if (key == "m")
    c.m = parse_number<int>(value, key);
  else if (key == "r")
    c.r = parse_number<int>(value, key);
  else if (key == "n")
    c.n = parse_n_range(value);
  else if (key == "p")
    c.p = parse_list<double>(value, key);
  else if (key == "q")
    c.q = parse_list<int>(value, key);
  else if (key == "A")
    c.A = parse_number<double>(value, key);
  else if (key == "seed")
    c.seed = parse_number<std::uint64_t>(value, key);
  else if (key == "out")
    c.out = value;
  else if (key == "scans")
    c.scans = split_list(value);
  else if (key == "grid_max")
    c.grid_max = parse_number<double>(value, key);
  else if (key == "mc_samples")
    c.mc_samples = parse_number<std::size_t>(value, key);
  else if (key == "format")
    c.format = value;
  else if (key == "trend.bounded_factor")
    c.rule.bounded_factor = parse_number<double>(value, key);
  else if (key == "trend.vanishing_drop")
    c.rule.vanishing_drop = parse_number<double>(value, key);
  else if (key == "trend.zero_floor")
    c.rule.zero_floor = parse_number<double>(value, key);
  else
    throw UsageError("unknown field '" + key + "'");
}

}  // namespace detail

/// `key = value` lines; '#' starts a comment. Errors carry the line number.
inline ScenarioConfig parse_scenario(std::istream& in) {
  ScenarioConfig c;
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (seen.count(key))
      throw UsageError("line " + std::to_string(lineno) + ": field '" + key + "' already set on line " +
                       std::to_string(seen[key]));
    seen[key] = lineno;
    try {
      detail::apply_field(c, key, value);
    } catch (const UsageError& e) {
      throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const UsageError& e) {
    // Point at the offending field when it was set explicitly.
    const std::string what = e.what();
    for (const auto& [key, ln] : seen)
      if (what.find("field '" + key + "'") != std::string::npos)
        throw UsageError("line " + std::to_string(ln) + ": " + what);
    throw;
  }
  return c;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

/// Scenario files shipped with the tool, by name.
inline const std::map<std::string, std::string>& builtin_scenarios() {
  static const std::map<std::string, std::string> s{
      {"rademacher-be",
       "name = rademacher-be\nmodel = builtin:rademacher\nm = 3\nr = 0\nn = 16..256\np = 1\nq = 2\n"
       "scans = be, transport, moments\n"},
      {"elliptic-be",
       "name = elliptic-be\nmodel = builtin:elliptic\nm = 3\nr = 0\nn = 16..512\np = 1\nscans = be, transport\n"},
      {"uniform-edgeworth",
       "name = uniform-edgeworth\nmodel = builtin:uniform\nm = 4\nr = 1\nn = 4..32\np = 1, 2\nq = 2, 3\n"
       "scans = edgeworth, transport, moments\n"},
      {"uniform-assumptions",
       "name = uniform-assumptions\nmodel = builtin:uniform\nm = 3\nn = 4..32\nscans = assumptions\n"},
      {"stationary-chain",
       "name = stationary-chain\nmodel = builtin:stationary2\nm = 4\nn = 32..512\nscans = stationary, assumptions\n"},
      {"elliptic-coupling",
       "name = elliptic-coupling\nmodel = builtin:elliptic\nm = 4\nn = 16..512\np = 2\nscans = coupling\n"},
  };
  return s;
}

/// A path to a scenario file, or the name of a shipped scenario.
inline ScenarioConfig load_scenario(const std::string& path_or_name) {
  std::ifstream in(path_or_name);
  if (in) return parse_scenario(in);
  const auto& b = builtin_scenarios();
  if (const auto it = b.find(path_or_name); it != b.end()) return parse_scenario_text(it->second);
  throw UsageError("no scenario file or shipped scenario named '" + path_or_name + "'");
}

struct VerdictRow {
  std::string scan;
  Verdict verdict;
};

/// A named output table; the stem becomes the file name.
struct NamedTable {
  std::string stem;
  Table table;
};

struct ScenarioResult {
  std::vector<VerdictRow> verdicts;
  /// Per-scan tables in emission order, main table of each scan first.
  std::vector<NamedTable> tables;
  /// Files written by run_scenario, relative to config.out.
  std::vector<std::string> files;
  /// 0 iff no non-flagged verdict failed.
  int exit_code = 0;

  Table table() const {
    Table t({"scan", "label", "pass", "flagged", "note"});
    for (const auto& v : verdicts) t.add({v.scan, v.verdict.label, v.verdict.pass, v.verdict.flagged, v.verdict.note});
    return t;
  }
};

/// Runs every scan of the config in memory. Nothing touches the filesystem
/// except a chain file named by config.model.
inline ScenarioResult evaluate_scenario(const ScenarioConfig& c) {
  c.validate();
  const Model model = resolve_model(c.model);
  const auto opt = c.options();
  ScenarioResult res;
  auto record = [&](const std::string& scan, const Verdict& v) { res.verdicts.push_back({scan, v}); };
  auto emit = [&](std::string stem, Table t) { res.tables.push_back({std::move(stem), std::move(t)}); };
  auto has = [&](const char* s) { return std::find(c.scans.begin(), c.scans.end(), s) != c.scans.end(); };

  std::vector<SumLaw> laws;
  auto need_laws = [&]() -> const std::vector<SumLaw>& {
    if (laws.empty()) laws = sum_laws(model, c.n, detail::law_order(c.m), opt.law);
    return laws;
  };
  const std::string name = model_name(model);
  if (has("be")) {
    const auto rep = scan_nonuniform(name, need_laws(), c.m, 0, opt);
    emit("be", rep.table());
    emit("be_curve", rep.curve());
    record("be", rep.verdict);
  }
  if (has("edgeworth")) {
    const int r = std::max(c.r, 1);
    const auto rep = scan_nonuniform(name, need_laws(), c.m, r, opt);
    emit("edgeworth", rep.table());
    emit("edgeworth_curve", rep.curve());
    record("edgeworth", rep.verdict);
  }
  if (has("transport")) {
    const auto rep = scan_transport(name, need_laws(), c.m, c.r, c.p, opt);
    emit("transport", rep.table());
    for (const auto& v : rep.verdicts()) record("transport", v);
  }
  if (has("moments")) {
    const auto rep = scan_moments(name, need_laws(), c.m, c.r, c.q, opt);
    emit("moments", rep.table());
    for (const auto& v : rep.verdicts()) record("moments", v);
  }
  if (has("stationary")) {
    const auto rep = scan_stationarity(model, c.m, c.n, opt);
    emit("stationary", rep.table());
    emit("stationary_fit", rep.fit_table());
    record("stationary", rep.verdict);
  }
  if (has("coupling")) {
    for (double p : c.p) {
      const auto rep = scan_coupling(model, c.n, p, c.A, opt);
      emit("coupling_p" + format_real(p), rep.table());
      for (const auto& v : rep.verdicts()) record("coupling", v);
    }
  }
  if (has("assumptions")) {
    const auto rep = check_assumptions(model, c.m, c.n, 0.0, opt);
    emit("assumptions", rep.table());
    for (const auto& v : rep.verdicts()) record("assumptions", v);
  }
  for (const auto& v : res.verdicts)
    if (v.verdict.failed()) res.exit_code = 1;
  return res;
}

inline nlohmann::ordered_json manifest_json(const ScenarioConfig& c, const ScenarioResult& res) {
  nlohmann::ordered_json man;
  man["tool"] = "nuedge";
  man["version"] = kVersion;
  man["seed"] = c.seed;
  man["config"] = c.to_json();
  man["model"] = c.model;
  man["files"] = res.files;
  auto vs = nlohmann::ordered_json::array();
  for (const auto& v : res.verdicts) {
    auto j = to_json(v.verdict);
    j["scan"] = v.scan;
    vs.push_back(std::move(j));
  }
  man["verdicts"] = vs;
  man["exit_code"] = res.exit_code;
  return man;
}

/// Runs every scan of the config and writes the manifest, one table per scan,
/// the plot data and verdicts under config.out. Deterministic in (config, seed).
inline ScenarioResult run_scenario(const ScenarioConfig& c) {
  auto res = evaluate_scenario(c);
  const std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  auto write = [&](const Table& t, const std::string& stem) {
    const std::string file = stem + (c.format == "json" ? ".json" : ".csv");
    std::ofstream os(dir / file, std::ios::binary);
    if (!os) throw InputError("cannot write '" + (dir / file).string() + "'");
    t.write(os, c.format);
    res.files.push_back(file);
  };
  for (const auto& t : res.tables) write(t.table, t.stem);
  write(res.table(), "verdicts");
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  if (!os) throw InputError("cannot write the manifest under '" + dir.string() + "'");
  os << manifest_json(c, res).dump(2) << '\n';
  return res;
}

}  // namespace nuedge

#endif  // NUEDGE_HARNESS_SCENARIO_HPP
