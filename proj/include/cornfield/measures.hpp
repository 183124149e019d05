#pragma once

// Integer-count contingency tables and the association measures read off
// them. Risks are formed by full-precision division at the point of use;
// nothing derived is cached on the tables.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cornfield/common.hpp"

namespace cornfield {

// Counts for a binary exposure E against a binary outcome D.
struct TwoByTwo {
  std::int64_t exposed_cases = 0;       // E=1, D=1
  std::int64_t exposed_noncases = 0;    // E=1, D=0
  std::int64_t unexposed_cases = 0;     // E=0, D=1
  std::int64_t unexposed_noncases = 0;  // E=0, D=0

  std::int64_t exposed_total() const { return exposed_cases + exposed_noncases; }
  std::int64_t unexposed_total() const { return unexposed_cases + unexposed_noncases; }
  std::int64_t total() const { return exposed_total() + unexposed_total(); }

  friend bool operator==(const TwoByTwo&, const TwoByTwo&) = default;

  // Counts must be nonnegative. Empty margins are legal on the table itself;
  // the measure functions reject them where they matter.
  void validate() const {
    if (exposed_cases < 0 || exposed_noncases < 0 || unexposed_cases < 0 ||
        unexposed_noncases < 0)
      throw validation_error("TwoByTwo: counts must be nonnegative");
  }
};

// One TwoByTwo per confounder level; the vector index is the level and level
// 0 is the reference.
struct StratifiedTable {
  std::vector<TwoByTwo> strata;

  int k() const { return static_cast<int>(strata.size()); }

  friend bool operator==(const StratifiedTable&, const StratifiedTable&) = default;

  void validate() const {
    if (strata.size() < 2) throw validation_error("StratifiedTable: at least two levels required");
    for (const TwoByTwo& s : strata) s.validate();
  }

  TwoByTwo pooled() const {
    TwoByTwo t;
    for (const TwoByTwo& s : strata) {
      t.exposed_cases += s.exposed_cases;
      t.exposed_noncases += s.exposed_noncases;
      t.unexposed_cases += s.unexposed_cases;
      t.unexposed_noncases += s.unexposed_noncases;
    }
    return t;
  }
};

// Observed association of E with D, plus the E-with-U measures when the data
// carried a binary confounder. rr_ed is empty exactly when both risks are
// zero; a zero unexposed risk under a positive exposed risk gives +infinity.
struct AssociationMeasures {
  std::optional<double> rr_ed;
  double rd_ed = 0.0;
  std::optional<double> rr_eu;
  std::optional<double> rd_eu;
  std::optional<double> rd_ud_given_e1;
  std::optional<double> rd_ud_given_e0;
};

// pr(D=1 | E=1). The exposed margin must be nonempty.
inline double risk_exposed(const TwoByTwo& t) {
  if (t.exposed_total() <= 0) throw precondition_error("risk_exposed: empty exposed margin");
  return static_cast<double>(t.exposed_cases) / static_cast<double>(t.exposed_total());
}

// pr(D=1 | E=0). The unexposed margin must be nonempty.
inline double risk_unexposed(const TwoByTwo& t) {
  if (t.unexposed_total() <= 0) throw precondition_error("risk_unexposed: empty unexposed margin");
  return static_cast<double>(t.unexposed_cases) / static_cast<double>(t.unexposed_total());
}

inline std::optional<double> relative_risk(const TwoByTwo& t) {
  const double r1 = risk_exposed(t);
  const double r0 = risk_unexposed(t);
  if (r0 == 0.0) {
    if (r1 == 0.0) return std::nullopt;
    return kInf;
  }
  return r1 / r0;
}

inline double risk_difference(const TwoByTwo& t) { return risk_exposed(t) - risk_unexposed(t); }

inline AssociationMeasures association_measures(const TwoByTwo& t) {
  AssociationMeasures m;
  m.rr_ed = relative_risk(t);
  m.rd_ed = risk_difference(t);
  return m;
}

// Recode the exposure as its complement. Ratios invert, differences change
// sign, and measures conditioned on an exposure arm swap arms.
inline AssociationMeasures flip_exposure(const AssociationMeasures& m) {
  AssociationMeasures out;
  if (m.rr_ed) out.rr_ed = 1.0 / *m.rr_ed;
  out.rd_ed = -m.rd_ed;
  if (m.rr_eu) out.rr_eu = 1.0 / *m.rr_eu;
  if (m.rd_eu) out.rd_eu = -*m.rd_eu;
  out.rd_ud_given_e1 = m.rd_ud_given_e0;
  out.rd_ud_given_e0 = m.rd_ud_given_e1;
  return out;
}

// Puts the association into the frame the bound conditions assume, rr_ed >= 1,
// flipping the exposure coding when needed. Returns the oriented measures and
// whether a flip happened. rr_ed must be defined. Already-oriented input is
// returned unchanged, so a second application is a no-op.
inline std::pair<AssociationMeasures, bool> orient_exposure(const AssociationMeasures& m) {
  if (!m.rr_ed) throw precondition_error("orient_exposure: rr_ed undefined (no cases)");
  if (*m.rr_ed >= 1.0) return {m, false};
  return {flip_exposure(m), true};
}

}  // namespace cornfield
