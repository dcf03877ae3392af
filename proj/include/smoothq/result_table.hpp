#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "smoothq/errors.hpp"

namespace smoothq {

/// Round-trip-exact decimal formatting (17 significant digits).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

}  // namespace detail

/// One tidy observation: which experiment, which scenario, which smoothing
/// level, which estimator, which statistic, and its value.
struct ResultRow {
  std::string experiment;
  std::string scenario;
  double h = 0.0;
  std::string estimator;
  std::string statistic;
  double value = 0.0;
};

/// Long-format result table. Every value must be finite and every
/// (experiment, scenario, h, estimator, statistic) key unique.
class ExperimentResult {
 public:
  void add(ResultRow row) {
    if (!std::isfinite(row.value))
      throw Error("non-finite value for result row " + key_of(row));
    if (!keys_.insert(key_of(row)).second)
      throw Error("duplicate result row " + key_of(row));
    rows_.push_back(std::move(row));
  }

  void add(std::string experiment, std::string scenario, double h, std::string estimator,
           std::string statistic, double value) {
    add(ResultRow{std::move(experiment), std::move(scenario), h, std::move(estimator),
                  std::move(statistic), value});
  }

  void append(const ExperimentResult& other) {
    for (const ResultRow& row : other.rows_) add(row);
  }

  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }
  const std::vector<ResultRow>& rows() const { return rows_; }

  void write_csv(std::ostream& os) const {
    os << "experiment,scenario,h,estimator,statistic,value\n";
    for (const ResultRow& r : rows_) {
      os << detail::csv_field(r.experiment) << ',' << detail::csv_field(r.scenario) << ','
         << format_double(r.h) << ',' << detail::csv_field(r.estimator) << ','
         << detail::csv_field(r.statistic) << ',' << format_double(r.value) << '\n';
    }
  }

  void write_json(std::ostream& os) const {
    os << "[\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const ResultRow& r = rows_[i];
      os << "  {\"experiment\":" << detail::json_string(r.experiment)
         << ",\"scenario\":" << detail::json_string(r.scenario)
         << ",\"h\":" << format_double(r.h)
         << ",\"estimator\":" << detail::json_string(r.estimator)
         << ",\"statistic\":" << detail::json_string(r.statistic)
         << ",\"value\":" << format_double(r.value) << '}';
      if (i + 1 < rows_.size()) os << ',';
      os << '\n';
    }
    os << "]\n";
  }

 private:
  static std::string key_of(const ResultRow& r) {
    return r.experiment + '\x1f' + r.scenario + '\x1f' + format_double(r.h) + '\x1f' +
           r.estimator + '\x1f' + r.statistic;
  }

  std::vector<ResultRow> rows_;
  std::unordered_set<std::string> keys_;
};

}  // namespace smoothq
