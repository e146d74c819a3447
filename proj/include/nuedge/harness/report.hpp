#ifndef NUEDGE_HARNESS_REPORT_HPP
#define NUEDGE_HARNESS_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nuedge/errors.hpp"
#include "nuedge/trend.hpp"

namespace nuedge {

/// Outcome of one finite-n trend decision.
struct Verdict {
  /// "bounded", "unbounded", "vanishing", "not vanishing", "inconclusive",
  /// "not applicable"
  std::string label;
  bool pass = false;
  /// Flagged rows are reported but never count against a run.
  bool flagged = false;
  std::string note;

  /// Counts against the exit code.
  bool failed() const noexcept { return !pass && !flagged; }
};

inline Verdict bounded_verdict(std::span<const double> v, const TrendRule& rule = {}) {
  const bool ok = bounded_max(v, rule);
  return {ok ? "bounded" : "unbounded", ok, false,
          "max <= " + std::to_string(rule.bounded_factor).substr(0, 4) + " x median"};
}

inline Verdict vanishing_verdict(std::span<const double> v, const TrendRule& rule = {}) {
  const bool ok = vanishing(v, rule);
  return {ok ? "vanishing" : "not vanishing", ok, false,
          "last <= (1 - " + std::to_string(rule.vanishing_drop).substr(0, 4) + ") x first"};
}

/// Bounded for r = 0, vanishing for r >= 1.
inline Verdict rate_verdict(std::span<const double> scaled, int r, const TrendRule& rule = {}) {
  return r == 0 ? bounded_verdict(scaled, rule) : vanishing_verdict(scaled, rule);
}

inline void flag_lattice(Verdict& v) {
  v.flagged = true;
  v.note = "expected failure: lattice law with r >= 1 (jumps of order 1/sigma_n)";
}

/// Shortest text with 17 significant digits, '.' decimal point, no locale.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Column-ordered table rendered as CSV ('\n' endings) or JSON records.
class Table {
 public:
  using Cell = std::variant<double, long, std::string, bool>;

  explicit Table(std::vector<std::string> columns) : cols_(std::move(columns)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != cols_.size()) throw InputError("table row has the wrong number of cells");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_.size(); }

  void write_csv(std::ostream& os) const {
    for (std::size_t j = 0; j < cols_.size(); ++j) os << (j ? "," : "") << cols_[j];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << text(r[j]);
      os << '\n';
    }
  }

  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
      nlohmann::ordered_json o;
      for (std::size_t j = 0; j < r.size(); ++j) {
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                // JSON has no inf/nan; keep them as strings.
                if (std::isfinite(v))
                  o[cols_[j]] = v;
                else
                  o[cols_[j]] = format_real(v);
              } else {
                o[cols_[j]] = v;
              }
            },
            r[j]);
      }
      arr.push_back(std::move(o));
    }
    return arr;
  }

  void write_json(std::ostream& os) const { os << to_json().dump(2) << '\n'; }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json")
      write_json(os);
    else if (format == "csv")
      write_csv(os);
    else
      throw UsageError("unknown output format '" + format + "' (csv or json)");
  }

 private:
  static std::string text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>)
            return format_real(v);
          else if constexpr (std::is_same_v<T, long>)
            return std::to_string(v);
          else if constexpr (std::is_same_v<T, bool>)
            return v ? "true" : "false";
          else
            return v;
        },
        c);
  }

  std::vector<std::string> cols_;
  std::vector<std::vector<Cell>> rows_;
};

inline nlohmann::ordered_json to_json(const Verdict& v) {
  return {{"label", v.label}, {"pass", v.pass}, {"flagged", v.flagged}, {"note", v.note}};
}

}  // namespace nuedge

#endif  // NUEDGE_HARNESS_REPORT_HPP
