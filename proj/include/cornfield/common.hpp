#pragma once

// Shared error types and locale-independent number formatting.

#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cornfield {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Base class for everything this library throws.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Construction input violates a structural invariant (negative count,
// probability outside [0,1], distribution that does not sum to one, ...).
class validation_error : public error {
 public:
  using error::error;
};

// An operation was asked for outside its domain: empty margin, wrong
// orientation, inapplicable condition tag, unmet numerical precondition.
class precondition_error : public error {
 public:
  using error::error;
};

// Text input could not be parsed. line is 1-based; 0 means "not row-local".
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t line_no)
      : error(line_no ? what + " (line " + std::to_string(line_no) + ")" : what), line(line_no) {}
  std::size_t line = 0;
};

// An assessment could not evaluate any condition from the strengths supplied.
class missing_strength_error : public error {
 public:
  missing_strength_error(const std::string& what, std::vector<std::string> fields)
      : error(what), missing(std::move(fields)) {}
  std::vector<std::string> missing;
};

// Full-precision rendering. 17 significant digits round-trip an IEEE double
// exactly, and snprintf in the default "C" locale is byte-stable across runs.
inline std::string format_full(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  if (x != x) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Human-facing rendering at six significant digits.
inline std::string format_short(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  if (x != x) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace cornfield
