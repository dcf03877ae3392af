#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smoothq/errors.hpp"

namespace smoothq {

/// Cleaned daily price series with log returns Y_t = log(P_t) - log(P_{t-1}).
struct ReturnsSeries {
  std::vector<std::string> dates;   // ISO-8601, ascending
  std::vector<double> prices;       // cleaned closes, all positive
  std::vector<double> returns;      // size = prices.size() - 1
  std::size_t filled_count = 0;     // missing closes filled during cleaning
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline bool parse_full_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

inline bool looks_like_iso_date(const std::string& s) {
  if (s.size() < 10) return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return s[4] == '-' && s[7] == '-';
}

}  // namespace detail

/// Parse a `date,close` CSV, sort by date, fill isolated missing closes
/// (runs of at most 3 empty cells) forward then backward, and compute log
/// returns. Longer gaps, non-positive prices, and series with fewer than
/// three valid prices are rejected.
inline ReturnsSeries load_returns(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty prices file");
  const std::vector<std::string> header = detail::split_csv_line(line);
  std::ptrdiff_t date_col = -1, close_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::lower(detail::trim(header[i]));
    if (name == "date") date_col = static_cast<std::ptrdiff_t>(i);
    if (name == "close") close_col = static_cast<std::ptrdiff_t>(i);
  }
  if (date_col < 0 || close_col < 0)
    throw DataError("prices file must have 'date' and 'close' columns");

  struct Row {
    std::string date;
    std::optional<double> close;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    const auto need = static_cast<std::size_t>(std::max(date_col, close_col));
    if (fields.size() <= need)
      throw DataError("row " + std::to_string(line_no) + ": too few fields");
    Row row;
    row.date = detail::trim(fields[static_cast<std::size_t>(date_col)]);
    if (!detail::looks_like_iso_date(row.date))
      throw DataError("row " + std::to_string(line_no) + ": date '" + row.date +
                      "' is not ISO-8601");
    const std::string close_text = detail::trim(fields[static_cast<std::size_t>(close_col)]);
    if (!close_text.empty()) {
      double close;
      if (!detail::parse_full_double(close_text, close))
        throw DataError("row " + std::to_string(line_no) + ": unparseable close '" +
                        close_text + "'");
      if (!(close > 0.0))
        throw DataError("row " + std::to_string(line_no) + ": non-positive price " +
                        close_text);
      row.close = close;
    }
    rows.push_back(std::move(row));
  }

  std::size_t valid = 0;
  for (const Row& r : rows)
    if (r.close) ++valid;
  if (valid < 3) throw InsufficientDataError("fewer than 3 valid prices");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });

  // Reject gaps longer than 3; anything longer would fabricate returns.
  std::size_t run = 0;
  for (std::size_t i = 0; i <= rows.size(); ++i) {
    if (i < rows.size() && !rows[i].close) {
      ++run;
      continue;
    }
    if (run > 3)
      throw DataError("missing run of " + std::to_string(run) + " closes ending before " +
                      (i < rows.size() ? rows[i].date : std::string("end of file")) +
                      " exceeds 3");
    run = 0;
  }

  ReturnsSeries series;
  series.dates.reserve(rows.size());
  series.prices.reserve(rows.size());
  double last = std::numeric_limits<double>::quiet_NaN();
  std::size_t filled = 0;
  for (const Row& r : rows) {
    double price;
    if (r.close) {
      price = *r.close;
      last = price;
    } else if (std::isfinite(last)) {
      price = last;  // forward fill
      ++filled;
    } else {
      price = std::numeric_limits<double>::quiet_NaN();  // leading gap, filled below
    }
    series.dates.push_back(r.date);
    series.prices.push_back(price);
  }
  for (std::size_t i = series.prices.size(); i-- > 0;) {
    if (std::isnan(series.prices[i])) {
      series.prices[i] = series.prices[i + 1];  // backward fill of the leading gap
      ++filled;
    }
  }
  series.filled_count = filled;

  series.returns.reserve(series.prices.size() - 1);
  for (std::size_t i = 1; i < series.prices.size(); ++i)
    series.returns.push_back(std::log(series.prices[i]) - std::log(series.prices[i - 1]));
  return series;
}

inline ReturnsSeries load_returns_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prices file '" + path + "'");
  return load_returns(in);
}

/// Single-column numeric file (optional header line is skipped).
inline std::vector<double> load_values(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    const std::string field = detail::trim(detail::split_csv_line(text).front());
    double v;
    if (!detail::parse_full_double(field, v)) {
      if (line_no == 1 && values.empty()) continue;  // header
      throw DataError("line " + std::to_string(line_no) + ": unparseable value '" + field + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw InsufficientDataError("no numeric values found");
  return values;
}

inline std::vector<double> load_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return load_values(in);
}

}  // namespace smoothq
