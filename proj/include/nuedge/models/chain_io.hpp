#ifndef NUEDGE_MODELS_CHAIN_IO_HPP
#define NUEDGE_MODELS_CHAIN_IO_HPP

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/models/chain.hpp"
#include "nuedge/models/lattice.hpp"

namespace nuedge {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_row(const std::string& line, int lineno) {
  std::vector<double> row;
  std::string tok;
  std::istringstream is(line);
  while (is >> tok) {
    std::size_t start = 0;
    while (start <= tok.size()) {
      const auto comma = tok.find(',', start);
      const std::string part = tok.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!part.empty()) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size())
          throw InputError("line " + std::to_string(lineno) + ": '" + part + "' is not a number");
        row.push_back(v);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return row;
}

}  // namespace detail

/// Reads the chain text format:
///
///   [meta]            name = ..., repeat = <count> | forever (default forever)
///   [initial]         probabilities on X_1
///   [kernel.j]        rows of P_j, one per line
///   [observable.j]    rows of f_j, one per line
///
/// Entries are separated by blanks or commas; '#' starts a comment.
inline MarkovChainSpec read_chain_spec(std::istream& in) {
  MarkovChainSpec spec;
  std::map<int, std::vector<std::vector<double>>> kernels, observables;
  std::map<int, int> kernel_line, observable_line;
  enum class Sec { none, meta, initial, kernel, observable } sec = Sec::none;
  int index = 0, lineno = 0;
  bool have_initial = false;
  std::string raw;
  auto fail = [&](const std::string& msg) { throw InputError("line " + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string name = line.substr(1, line.size() - 2);
      auto numbered = [&](const std::string& prefix) -> bool {
        if (name.rfind(prefix, 0) != 0) return false;
        const std::string num = name.substr(prefix.size());
        const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), index);
        if (num.empty() || ec != std::errc() || p != num.data() + num.size() || index < 1)
          fail("section index must be a positive integer");
        return true;
      };
      if (name == "meta") {
        sec = Sec::meta;
      } else if (name == "initial") {
        if (have_initial) fail("duplicate [initial] section");
        have_initial = true;
        sec = Sec::initial;
      } else if (numbered("kernel.")) {
        if (kernels.count(index)) fail("duplicate section [" + name + "]");
        kernels[index];
        kernel_line[index] = lineno;
        sec = Sec::kernel;
      } else if (numbered("observable.")) {
        if (observables.count(index)) fail("duplicate section [" + name + "]");
        observables[index];
        observable_line[index] = lineno;
        sec = Sec::observable;
      } else {
        fail("unknown section [" + name + "]");
      }
      continue;
    }
    switch (sec) {
      case Sec::none:
        fail("content before the first section");
        break;
      case Sec::meta: {
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (key == "repeat") {
          if (value == "forever") {
            spec.repeat = 0;
          } else {
            long r = 0;
            const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), r);
            if (ec != std::errc() || p != value.data() + value.size() || r < 1)
              fail("repeat must be a positive integer or 'forever'");
            spec.repeat = r;
          }
        }
        spec.meta[key] = value;
        break;
      }
      case Sec::initial: {
        const auto row = detail::parse_row(line, lineno);
        spec.initial.insert(spec.initial.end(), row.begin(), row.end());
        break;
      }
      case Sec::kernel:
        kernels[index].push_back(detail::parse_row(line, lineno));
        break;
      case Sec::observable:
        observables[index].push_back(detail::parse_row(line, lineno));
        break;
    }
  }
  lineno = 0;
  if (!have_initial) throw InputError("missing [initial] section");
  if (kernels.empty()) throw InputError("missing [kernel.1] section");
  auto to_matrix = [&](const std::vector<std::vector<double>>& rows, const std::string& where, int line) {
    if (rows.empty()) throw InputError("line " + std::to_string(line) + ": [" + where + "] is empty");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols)
        throw InputError("line " + std::to_string(line) + ": [" + where + "] has rows of different lengths");
      for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  };
  const int L = static_cast<int>(kernels.size());
  for (int j = 1; j <= L; ++j) {
    if (!kernels.count(j)) throw InputError("missing section [kernel." + std::to_string(j) + "]");
    if (!observables.count(j)) throw InputError("missing section [observable." + std::to_string(j) + "]");
    spec.kernels.push_back(to_matrix(kernels[j], "kernel." + std::to_string(j), kernel_line[j]));
    spec.observables.push_back(to_matrix(observables[j], "observable." + std::to_string(j), observable_line[j]));
  }
  if (observables.size() != kernels.size()) throw InputError("observable sections do not match kernel sections");
  spec.validate();
  return spec;
}

inline MarkovChainSpec parse_chain_spec(const std::string& text) {
  std::istringstream is(text);
  return read_chain_spec(is);
}

inline MarkovChainSpec load_chain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open chain file '" + path + "'");
  return read_chain_spec(in);
}

inline void write_chain_spec(const MarkovChainSpec& spec, std::ostream& os) {
  const auto prec = os.precision(17);
  os << "[meta]\n";
  for (const auto& [k, v] : spec.meta)
    if (k != "repeat") os << k << " = " << v << "\n";
  os << "repeat = ";
  if (spec.unlimited())
    os << "forever\n";
  else
    os << spec.repeat << "\n";
  auto row = [&](const double* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << p[i];
    os << "\n";
  };
  os << "[initial]\n";
  row(spec.initial.data(), spec.initial.size());
  for (std::size_t j = 0; j < spec.period(); ++j) {
    os << "[kernel." << j + 1 << "]\n";
    for (std::size_t r = 0; r < spec.kernels[j].rows; ++r) row(&spec.kernels[j].a[r * spec.kernels[j].cols], spec.kernels[j].cols);
    os << "[observable." << j + 1 << "]\n";
    for (std::size_t r = 0; r < spec.observables[j].rows; ++r)
      row(&spec.observables[j].a[r * spec.observables[j].cols], spec.observables[j].cols);
  }
  os.precision(prec);
}

/// Two-column "value,mass" CSV, 17 significant digits, '\n' line endings.
inline void write_distribution_csv(const LatticeDistribution& d, std::ostream& os) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17) << "value,mass\n";
  for (std::size_t k = 0; k < d.size(); ++k) buf << d.value(k) << ',' << d.mass(k) << '\n';
  os << buf.str();
}

}  // namespace nuedge

#endif  // NUEDGE_MODELS_CHAIN_IO_HPP
