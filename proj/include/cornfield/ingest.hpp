#pragma once

// Delimited-text ingestion of aggregated study counts. The accepted format is
// deliberately rigid: a header row naming exposure, outcome, count and
// optionally confounder (case-insensitive, exact names), integer cells, comma
// or tab delimited. Misbinding a column silently would corrupt every
// downstream number, so anything unrecognized is an error, not a warning.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "cornfield/common.hpp"
#include "cornfield/measures.hpp"

namespace cornfield {

struct RecordRow {
  int exposure = 0;                  // 0 or 1
  int outcome = 0;                   // 0 or 1
  std::optional<int> confounder;     // level index, present on all rows or none
  std::int64_t count = 0;            // nonnegative
};

struct ParseOptions {
  char delimiter = ',';
};

using ParsedTable = std::variant<TwoByTwo, StratifiedTable>;

namespace detail {

inline std::string_view trim_field(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Integer cell. Decimal points and signs get their own messages; counts are
// integers by definition and a silent truncation would be worse than a reject.
inline std::int64_t parse_int_cell(std::string_view raw, const char* what, int line) {
  const std::string_view s = trim_field(raw);
  if (s.empty()) throw parse_error(std::string("empty ") + what + " cell", line);
  if (s.find('.') != std::string_view::npos)
    throw parse_error(std::string(what) + " must be an integer, got '" + std::string(s) + "'", line);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw parse_error(std::string("malformed ") + what + " '" + std::string(s) + "'", line);
  return value;
}

inline int parse_binary_cell(std::string_view raw, const char* what, int line) {
  const std::int64_t v = parse_int_cell(raw, what, line);
  if (v != 0 && v != 1)
    throw parse_error(std::string(what) + " must be 0 or 1, got " + std::to_string(v), line);
  return static_cast<int>(v);
}

}  // namespace detail

// Parse delimited text into row records. Header errors carry line 1, row
// errors the offending 1-based line. A UTF-8 BOM and CRLF endings are
// tolerated; only trailing blank lines are.
inline std::vector<RecordRow> parse_rows(std::string_view text, const ParseOptions& opts = {}) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::pair<std::string_view, int>> lines;
  {
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line, ++number);
      start = end + 1;
    }
    while (!lines.empty() && detail::trim_field(lines.back().first).empty()) lines.pop_back();
  }
  if (lines.empty()) throw parse_error("empty input, expected a header row", 1);

  int col_exposure = -1, col_outcome = -1, col_count = -1, col_confounder = -1;
  const auto header = detail::split_fields(lines.front().first, opts.delimiter);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::lower(detail::trim_field(header[i]));
    int* slot = nullptr;
    if (name == "exposure") slot = &col_exposure;
    else if (name == "outcome") slot = &col_outcome;
    else if (name == "count") slot = &col_count;
    else if (name == "confounder") slot = &col_confounder;
    else throw parse_error("unknown column '" + name + "'", 1);
    if (*slot != -1) throw parse_error("duplicate column '" + name + "'", 1);
    *slot = static_cast<int>(i);
  }
  for (const auto& [col, name] : {std::pair{col_exposure, "exposure"},
                                  std::pair{col_outcome, "outcome"},
                                  std::pair{col_count, "count"}})
    if (col == -1) throw parse_error(std::string("missing column '") + name + "'", 1);

  std::vector<RecordRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [line, number] = lines[i];
    if (detail::trim_field(line).empty()) throw parse_error("blank row inside the table", number);
    const auto fields = detail::split_fields(line, opts.delimiter);
    if (fields.size() != header.size())
      throw parse_error("expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()),
                        number);
    RecordRow row;
    row.exposure = detail::parse_binary_cell(fields[col_exposure], "exposure", number);
    row.outcome = detail::parse_binary_cell(fields[col_outcome], "outcome", number);
    row.count = detail::parse_int_cell(fields[col_count], "count", number);
    if (row.count < 0) throw parse_error("negative count " + std::to_string(row.count), number);
    if (col_confounder != -1) {
      const std::int64_t level = detail::parse_int_cell(fields[col_confounder], "confounder", number);
      if (level < 0)
        throw parse_error("negative confounder level " + std::to_string(level), number);
      // Level indices far beyond any plausible cardinality are a misbound
      // column, not data.
      if (level > 1'000'000) throw parse_error("confounder level out of range", number);
      row.confounder = static_cast<int>(level);
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw parse_error("no data rows after the header", lines.front().second);
  return rows;
}

// Aggregate rows into a table, summing duplicates. Confounder levels must be
// exactly 0..K-1; a gap means the file and the analysis disagree about K.
inline ParsedTable table_from_rows(const std::vector<RecordRow>& rows) {
  if (rows.empty()) throw parse_error("no data rows", 0);
  const bool stratified = rows.front().confounder.has_value();
  for (const RecordRow& r : rows)
    if (r.confounder.has_value() != stratified)
      throw parse_error("confounder present on some rows but not all", 0);

  if (!stratified) {
    TwoByTwo t;
    for (const RecordRow& r : rows) {
      std::int64_t& cell = r.exposure ? (r.outcome ? t.exposed_cases : t.exposed_noncases)
                                      : (r.outcome ? t.unexposed_cases : t.unexposed_noncases);
      cell += r.count;
    }
    t.validate();
    return t;
  }

  std::map<int, TwoByTwo> by_level;
  for (const RecordRow& r : rows) {
    TwoByTwo& t = by_level[*r.confounder];
    std::int64_t& cell = r.exposure ? (r.outcome ? t.exposed_cases : t.exposed_noncases)
                                    : (r.outcome ? t.unexposed_cases : t.unexposed_noncases);
    cell += r.count;
  }
  const int k = static_cast<int>(by_level.size());
  if (by_level.begin()->first != 0 || std::prev(by_level.end())->first != k - 1) {
    std::string seen;
    for (const auto& [level, t] : by_level) seen += (seen.empty() ? "" : ",") + std::to_string(level);
    throw parse_error("non-contiguous confounder levels {" + seen + "}, expected 0.." +
                          std::to_string(k - 1),
                      0);
  }
  if (k < 2) throw parse_error("confounder column needs at least two levels", 0);
  StratifiedTable table;
  table.strata.reserve(by_level.size());
  for (const auto& [level, t] : by_level) table.strata.push_back(t);
  table.validate();
  return table;
}

inline ParsedTable parse_table(std::string_view text, const ParseOptions& opts = {}) {
  return table_from_rows(parse_rows(text, opts));
}

inline ParsedTable parse_table(std::istream& in, const ParseOptions& opts = {}) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), opts);
}

inline ParsedTable parse_table_file(const std::string& path, const ParseOptions& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path + "'");
  return parse_table(in, opts);
}

// Canonical serialization: exposure 1 before 0, cases before noncases,
// confounder levels ascending. Re-parsing the output reproduces the table.
inline std::string to_delimited(const TwoByTwo& t, const ParseOptions& opts = {}) {
  const char d = opts.delimiter;
  std::string out = std::string("exposure") + d + "outcome" + d + "count\n";
  const auto row = [&](int e, int o, std::int64_t c) {
    out += std::to_string(e);
    out += d;
    out += std::to_string(o);
    out += d;
    out += std::to_string(c);
    out += '\n';
  };
  row(1, 1, t.exposed_cases);
  row(1, 0, t.exposed_noncases);
  row(0, 1, t.unexposed_cases);
  row(0, 0, t.unexposed_noncases);
  return out;
}

inline std::string to_delimited(const StratifiedTable& table, const ParseOptions& opts = {}) {
  const char d = opts.delimiter;
  std::string out = std::string("confounder") + d + "exposure" + d + "outcome" + d + "count\n";
  for (int level = 0; level < table.k(); ++level) {
    const TwoByTwo& t = table.strata[level];
    const auto row = [&](int e, int o, std::int64_t c) {
      out += std::to_string(level);
      out += d;
      out += std::to_string(e);
      out += d;
      out += std::to_string(o);
      out += d;
      out += std::to_string(c);
      out += '\n';
    };
    row(1, 1, t.exposed_cases);
    row(1, 0, t.exposed_noncases);
    row(0, 1, t.unexposed_cases);
    row(0, 0, t.unexposed_noncases);
  }
  return out;
}

inline std::string to_delimited(const ParsedTable& table, const ParseOptions& opts = {}) {
  return std::visit([&](const auto& t) { return to_delimited(t, opts); }, table);
}

// Per-level confounder-outcome contrasts within each exposure arm, against
// level 0. Entries are empty when an arm has no observations at that level
// (or at the reference). Ratio entries follow the usual conventions: 0/0
// empty, positive over zero infinite.
struct StratifiedMeasures {
  AssociationMeasures pooled;
  int k = 0;
  std::vector<std::optional<double>> rd_ud_e1, rd_ud_e0;  // index = level; entry 0 fixed at 0
  std::vector<std::optional<double>> rr_ud_e1, rr_ud_e0;  // index = level; entry 0 fixed at 1
};

inline AssociationMeasures observed_from_table(const TwoByTwo& t) {
  t.validate();
  return association_measures(t);
}

namespace detail {

inline std::optional<double> arm_risk(std::int64_t cases, std::int64_t total) {
  if (total <= 0) return std::nullopt;
  return static_cast<double>(cases) / static_cast<double>(total);
}

inline std::optional<double> risk_ratio(std::optional<double> num, std::optional<double> den) {
  if (!num || !den) return std::nullopt;
  if (*den == 0.0) return *num == 0.0 ? std::optional<double>{} : std::optional<double>{kInf};
  return *num / *den;
}

inline std::optional<double> risk_diff(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

}  // namespace detail

inline StratifiedMeasures observed_from_table(const StratifiedTable& table) {
  table.validate();
  StratifiedMeasures m;
  m.k = table.k();
  m.pooled = association_measures(table.pooled());

  std::vector<std::optional<double>> risk1(m.k), risk0(m.k);
  for (int j = 0; j < m.k; ++j) {
    const TwoByTwo& t = table.strata[j];
    risk1[j] = detail::arm_risk(t.exposed_cases, t.exposed_total());
    risk0[j] = detail::arm_risk(t.unexposed_cases, t.unexposed_total());
  }
  m.rd_ud_e1.resize(m.k);
  m.rd_ud_e0.resize(m.k);
  m.rr_ud_e1.resize(m.k);
  m.rr_ud_e0.resize(m.k);
  m.rd_ud_e1[0] = 0.0;
  m.rd_ud_e0[0] = 0.0;
  m.rr_ud_e1[0] = 1.0;
  m.rr_ud_e0[0] = 1.0;
  for (int j = 1; j < m.k; ++j) {
    m.rd_ud_e1[j] = detail::risk_diff(risk1[j], risk1[0]);
    m.rd_ud_e0[j] = detail::risk_diff(risk0[j], risk0[0]);
    m.rr_ud_e1[j] = detail::risk_ratio(risk1[j], risk1[0]);
    m.rr_ud_e0[j] = detail::risk_ratio(risk0[j], risk0[0]);
  }

  // With a binary confounder the exposure-confounder association is read off
  // the margins directly.
  if (m.k == 2) {
    const TwoByTwo& u0 = table.strata[0];
    const TwoByTwo& u1 = table.strata[1];
    const auto p_u1 = detail::arm_risk(u1.exposed_total(), u0.exposed_total() + u1.exposed_total());
    const auto p_u0 =
        detail::arm_risk(u1.unexposed_total(), u0.unexposed_total() + u1.unexposed_total());
    m.pooled.rd_eu = detail::risk_diff(p_u1, p_u0);
    m.pooled.rr_eu = detail::risk_ratio(p_u1, p_u0);
    m.pooled.rd_ud_given_e1 = m.rd_ud_e1[1];
    m.pooled.rd_ud_given_e0 = m.rd_ud_e0[1];
  }
  return m;
}

}  // namespace cornfield
