#pragma once

// Necessary-strength thresholds: how strongly an unmeasured confounder must
// be tied to both exposure and outcome before it can, on its own, account
// for an observed association. Every function here takes the association in
// oriented form (ratio >= 1, difference >= 0) and returns lower bounds that
// any explaining confounder must meet. Meeting them never certifies an
// explanation; failing any one refutes it.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cornfield/common.hpp"
#include "cornfield/distribution.hpp"
#include "cornfield/measures.hpp"

namespace cornfield {

enum class Scale { RelativeRisk, RiskDifference };

inline constexpr const char* scale_name(Scale s) {
  return s == Scale::RelativeRisk ? "rr" : "rd";
}

// Stable identifiers used in reports, golden files, and the oracle suites.
enum class ConditionTag {
  C1_RR_EU,       // binary confounder: exposure-confounder relative risk
  C2_RR_UD,       // binary confounder, conditional null: confounder-outcome relative risk
  C_RR_A1_MAXUD,  // binary confounder, average null: worse arm's confounder-outcome relative risk
  LEE_MIN,        // categorical, ratio scale: smaller of U_E and U_D (U_D' under the average null)
  LEE_MAX,        // categorical, ratio scale: larger of the two
  T1_MIN,         // binary confounder, difference scale: smaller of RD_EU and the arm-max RD_UD
  T1_MAX,         // binary confounder, difference scale: larger of the two
  T2_A,           // categorical, difference scale: prevalence-shift maximum A
  T2_B,           // categorical, difference scale: risk-shift maximum B
  T2_MAXAB,       // categorical, difference scale: max(A, B)
  T3_A,           // monotone shift: same A bound
  T3_B,           // monotone shift: B bound strengthened to the full difference
  T3_MAXAB,       // monotone shift: max(A, B)
};

inline constexpr ConditionTag kAllConditionTags[] = {
    ConditionTag::C1_RR_EU, ConditionTag::C2_RR_UD, ConditionTag::C_RR_A1_MAXUD,
    ConditionTag::LEE_MIN,  ConditionTag::LEE_MAX,  ConditionTag::T1_MIN,
    ConditionTag::T1_MAX,   ConditionTag::T2_A,     ConditionTag::T2_B,
    ConditionTag::T2_MAXAB, ConditionTag::T3_A,     ConditionTag::T3_B,
    ConditionTag::T3_MAXAB,
};

inline constexpr std::string_view tag_name(ConditionTag t) {
  switch (t) {
    case ConditionTag::C1_RR_EU: return "C1-RR-EU";
    case ConditionTag::C2_RR_UD: return "C2-RR-UD";
    case ConditionTag::C_RR_A1_MAXUD: return "C-RR-A1-MAXUD";
    case ConditionTag::LEE_MIN: return "LEE-MIN";
    case ConditionTag::LEE_MAX: return "LEE-MAX";
    case ConditionTag::T1_MIN: return "T1-MIN";
    case ConditionTag::T1_MAX: return "T1-MAX";
    case ConditionTag::T2_A: return "T2-A";
    case ConditionTag::T2_B: return "T2-B";
    case ConditionTag::T2_MAXAB: return "T2-MAXAB";
    case ConditionTag::T3_A: return "T3-A";
    case ConditionTag::T3_B: return "T3-B";
    case ConditionTag::T3_MAXAB: return "T3-MAXAB";
  }
  return "?";
}

inline std::optional<ConditionTag> tag_from_name(std::string_view name) {
  for (ConditionTag t : kAllConditionTags)
    if (tag_name(t) == name) return t;
  return std::nullopt;
}

inline constexpr Scale tag_scale(ConditionTag t) {
  switch (t) {
    case ConditionTag::C1_RR_EU:
    case ConditionTag::C2_RR_UD:
    case ConditionTag::C_RR_A1_MAXUD:
    case ConditionTag::LEE_MIN:
    case ConditionTag::LEE_MAX:
      return Scale::RelativeRisk;
    default:
      return Scale::RiskDifference;
  }
}

namespace detail {

inline void require_oriented_rr(double rr_ed) {
  if (!(rr_ed >= 1.0)) throw precondition_error("orientation: rr_ed must be >= 1 (orient the exposure first)");
  if (rr_ed == kInf) throw precondition_error("orientation: rr_ed must be finite");
}

inline void require_oriented_rd(double rd_ed) {
  if (!(rd_ed >= 0.0 && rd_ed <= 1.0))
    throw precondition_error("orientation: rd_ed must lie in [0,1] (orient the exposure first)");
}

}  // namespace detail

// Binary confounder, conditional null. Both the exposure-confounder and the
// confounder-outcome relative risk must reach the observed relative risk.
inline std::pair<double, double> classical_rr_thresholds(double rr_ed) {
  detail::require_oriented_rr(rr_ed);
  return {rr_ed, rr_ed};
}

// Binary confounder, average null. The exposure-confounder bound is
// unchanged; the outcome bound falls on the larger of the two within-arm
// confounder-outcome relative risks.
inline double rr_binary_a1_threshold(double rr_ed) {
  detail::require_oriented_rr(rr_ed);
  return rr_ed;
}

// Categorical confounder, ratio scale: the smaller of U_E and U_D must reach
// the observed relative risk.
inline double lee_min_threshold(double rr_ed) {
  detail::require_oriented_rr(rr_ed);
  return rr_ed;
}

// ... and the larger must reach (sqrt(rr) + sqrt(rr-1))^2.
inline double lee_max_threshold(double rr_ed) {
  detail::require_oriented_rr(rr_ed);
  const double a = std::sqrt(rr_ed) + std::sqrt(rr_ed - 1.0);
  return a * a;
}

struct RdBinaryThresholds {
  double min_threshold;  // on min(RD_EU, RD_UD-side)
  double max_threshold;  // on max(RD_EU, RD_UD-side)
};

// Binary confounder, difference scale. Under the average null the UD side is
// the larger of the two within-arm risk differences; under the conditional
// null the arms agree and it is just RD_UD. The numeric thresholds coincide.
inline RdBinaryThresholds rd_binary_thresholds(double rd_ed) {
  detail::require_oriented_rd(rd_ed);
  return {rd_ed, std::sqrt(rd_ed)};
}

struct RdCategoricalThresholds {
  double a_threshold;
  double b_threshold;
  double max_ab_threshold;
};

// Categorical confounder (k >= 3), difference scale, average null.
inline RdCategoricalThresholds rd_categorical_thresholds(double rd_ed, int k) {
  detail::require_oriented_rd(rd_ed);
  if (k < 3)
    throw precondition_error("rd_categorical_thresholds: k must be >= 3 (use rd_binary_thresholds)");
  const double a = rd_ed / (k - 1);
  const double b = rd_ed / 2.0;
  return {a, b, std::max(std::sqrt(a), b)};
}

// Monotone prevalence shift (k >= 2): the B bound rises from half the
// difference to the full difference.
inline RdCategoricalThresholds rd_monotone_thresholds(double rd_ed, int k) {
  detail::require_oriented_rd(rd_ed);
  if (k < 2) throw precondition_error("rd_monotone_thresholds: k must be >= 2");
  const double a = rd_ed / (k - 1);
  return {a, rd_ed, std::max(std::sqrt(a), rd_ed)};
}

// Single numeric entry point used by reports and the oracle.
inline double threshold_value(ConditionTag tag, double observed, int k) {
  switch (tag) {
    case ConditionTag::C1_RR_EU: return classical_rr_thresholds(observed).first;
    case ConditionTag::C2_RR_UD: return classical_rr_thresholds(observed).second;
    case ConditionTag::C_RR_A1_MAXUD: return rr_binary_a1_threshold(observed);
    case ConditionTag::LEE_MIN: return lee_min_threshold(observed);
    case ConditionTag::LEE_MAX: return lee_max_threshold(observed);
    case ConditionTag::T1_MIN: return rd_binary_thresholds(observed).min_threshold;
    case ConditionTag::T1_MAX: return rd_binary_thresholds(observed).max_threshold;
    case ConditionTag::T2_A: return rd_categorical_thresholds(observed, k).a_threshold;
    case ConditionTag::T2_B: return rd_categorical_thresholds(observed, k).b_threshold;
    case ConditionTag::T2_MAXAB: return rd_categorical_thresholds(observed, k).max_ab_threshold;
    case ConditionTag::T3_A: return rd_monotone_thresholds(observed, k).a_threshold;
    case ConditionTag::T3_B: return rd_monotone_thresholds(observed, k).b_threshold;
    case ConditionTag::T3_MAXAB: return rd_monotone_thresholds(observed, k).max_ab_threshold;
  }
  throw precondition_error("threshold_value: unknown tag");
}

// --- assessment --------------------------------------------------------------

// What the analyst asserts about the data: scale, confounder cardinality,
// granted assumption, and the oriented observed association.
struct ThresholdSpec {
  Scale scale = Scale::RiskDifference;
  int k = 2;
  AssumptionLevel assumption{};
  double observed = 0.0;

  void validate() const {
    if (k < 2) throw validation_error("ThresholdSpec: k must be at least 2");
    if (scale == Scale::RelativeRisk)
      detail::require_oriented_rr(observed);
    else
      detail::require_oriented_rd(observed);
  }
};

// Hypothesized confounder strengths. Every field optional; an assessment uses
// what is present and reports what is missing. Values are expected in the
// oriented frame (ratios >= 1, differences >= 0 where signed).
struct HypothesizedStrengths {
  std::optional<double> rr_eu;      // pr(U=1|E=1) / pr(U=1|E=0), binary U
  std::optional<double> rr_ud;      // confounder-outcome relative risk, conditional null
  std::optional<double> rr_ud_e1;   // within the exposed arm
  std::optional<double> rr_ud_e0;   // within the unexposed arm
  std::optional<double> u_e;        // spread of exposure odds across levels
  std::optional<double> u_d;        // spread of unexposed risks
  std::optional<double> u_d_star;   // spread of exposed risks
  std::optional<double> u_d_prime;  // max(u_d, u_d_star)
  std::optional<double> rd_eu;      // pr(U=1|E=1) - pr(U=1|E=0), binary U
  std::optional<double> rd_ud;      // confounder-outcome risk difference, conditional null
  std::optional<double> rd_ud_e1;
  std::optional<double> rd_ud_e0;
  std::optional<double> a_max;      // A: largest absolute prevalence shift
  std::optional<double> b_max;      // B: largest absolute risk shift
};

enum class ConditionVerdict { NotEvaluated, Satisfied, Violated, Indeterminate };

inline constexpr const char* verdict_name(ConditionVerdict v) {
  switch (v) {
    case ConditionVerdict::NotEvaluated: return "na";
    case ConditionVerdict::Satisfied: return "satisfied";
    case ConditionVerdict::Violated: return "violated";
    case ConditionVerdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct ConditionReportEntry {
  ConditionTag tag;
  std::string lhs;                    // what the threshold constrains
  double threshold;
  std::optional<double> hypothesized; // partial min/max over the supplied strengths
  ConditionVerdict verdict = ConditionVerdict::NotEvaluated;
  std::vector<std::string> missing;   // strengths that would settle an indeterminate entry
};

enum class OverallVerdict { ThresholdsOnly, NecessaryConditionsMet, CannotExplainAway };

inline constexpr const char* overall_name(OverallVerdict v) {
  switch (v) {
    case OverallVerdict::ThresholdsOnly: return "thresholds-only";
    case OverallVerdict::NecessaryConditionsMet: return "necessary-conditions-met";
    case OverallVerdict::CannotExplainAway: return "cannot-explain-away";
  }
  return "?";
}

struct ThresholdReport {
  ThresholdSpec spec;
  std::vector<ConditionReportEntry> entries;
  OverallVerdict overall = OverallVerdict::ThresholdsOnly;
  int evaluated = 0;  // entries with a satisfied/violated verdict
};

// Conditions worth listing for a spec. The ratio-scale spread conditions are
// listed alongside the classical pair for a binary confounder even though
// they constrain different strength measures.
inline std::vector<ConditionTag> report_conditions(const ThresholdSpec& spec) {
  std::vector<ConditionTag> tags;
  const bool avg = spec.assumption.null == NullKind::AverageNull;
  if (spec.scale == Scale::RelativeRisk) {
    if (spec.k == 2) {
      tags.push_back(ConditionTag::C1_RR_EU);
      tags.push_back(avg ? ConditionTag::C_RR_A1_MAXUD : ConditionTag::C2_RR_UD);
    }
    tags.push_back(ConditionTag::LEE_MIN);
    tags.push_back(ConditionTag::LEE_MAX);
  } else {
    if (spec.k == 2) {
      tags.push_back(ConditionTag::T1_MIN);
      tags.push_back(ConditionTag::T1_MAX);
    } else if (spec.assumption.monotone) {
      tags.push_back(ConditionTag::T3_A);
      tags.push_back(ConditionTag::T3_B);
      tags.push_back(ConditionTag::T3_MAXAB);
    } else {
      tags.push_back(ConditionTag::T2_A);
      tags.push_back(ConditionTag::T2_B);
      tags.push_back(ConditionTag::T2_MAXAB);
    }
  }
  return tags;
}

// Conditions an assessment evaluates. For a binary confounder on the ratio
// scale only the classical pair is judged; the spread conditions would demand
// odds-ratio strengths rarely hypothesized in that setting.
inline std::vector<ConditionTag> assess_conditions(const ThresholdSpec& spec) {
  std::vector<ConditionTag> tags = report_conditions(spec);
  if (spec.scale == Scale::RelativeRisk && spec.k == 2)
    std::erase_if(tags, [](ConditionTag t) {
      return t == ConditionTag::LEE_MIN || t == ConditionTag::LEE_MAX;
    });
  return tags;
}

namespace detail {

// Interval arithmetic over partially supplied strengths. Absent values decay
// to their a-priori range [floor, +inf): 1 for ratio terms, 0 for difference
// terms. "shown" reduces over the values actually supplied, which is what the
// report prints when the left side is only partially known.
struct StrengthInterval {
  double lo, hi;
  std::optional<double> shown;
  std::vector<std::string> missing;
};

inline StrengthInterval known(double v) { return {v, v, v, {}}; }

inline StrengthInterval unknown(double floor, std::string name) {
  return {floor, kInf, std::nullopt, {std::move(name)}};
}

inline StrengthInterval term(const std::optional<double>& v, double floor, const char* name) {
  return v ? known(*v) : unknown(floor, name);
}

inline StrengthInterval combine(StrengthInterval a, StrengthInterval b, bool is_min) {
  StrengthInterval out;
  out.lo = is_min ? std::min(a.lo, b.lo) : std::max(a.lo, b.lo);
  out.hi = is_min ? std::min(a.hi, b.hi) : std::max(a.hi, b.hi);
  if (a.shown && b.shown)
    out.shown = is_min ? std::min(*a.shown, *b.shown) : std::max(*a.shown, *b.shown);
  else
    out.shown = a.shown ? a.shown : b.shown;
  out.missing = std::move(a.missing);
  out.missing.insert(out.missing.end(), b.missing.begin(), b.missing.end());
  return out;
}

inline StrengthInterval min_of(StrengthInterval a, StrengthInterval b) {
  return combine(std::move(a), std::move(b), true);
}

inline StrengthInterval max_of(StrengthInterval a, StrengthInterval b) {
  return combine(std::move(a), std::move(b), false);
}

inline std::optional<double> first_of(std::initializer_list<std::optional<double>> vs) {
  for (const auto& v : vs)
    if (v) return v;
  return std::nullopt;
}

// The confounder-outcome ratio under the conditional null, where the arms
// agree and any one of the supplied forms pins it down.
inline StrengthInterval rr_ud_conditional(const HypothesizedStrengths& s) {
  std::optional<double> v = s.rr_ud;
  if (!v && s.rr_ud_e1 && s.rr_ud_e0) v = std::max(*s.rr_ud_e1, *s.rr_ud_e0);
  if (!v) v = first_of({s.rr_ud_e1, s.rr_ud_e0});
  return term(v, 1.0, "rr_ud");
}

inline StrengthInterval rd_ud_conditional(const HypothesizedStrengths& s) {
  std::optional<double> v = s.rd_ud;
  if (!v && s.rd_ud_e1 && s.rd_ud_e0) v = std::max(*s.rd_ud_e1, *s.rd_ud_e0);
  if (!v) v = first_of({s.rd_ud_e1, s.rd_ud_e0});
  return term(v, 0.0, "rd_ud");
}

// Under the average null the two arms may differ and both are required; the
// maximum is taken here rather than trusted from the caller.
inline StrengthInterval u_d_effective(const HypothesizedStrengths& s, bool average) {
  if (!average) {
    const std::optional<double> v = first_of({s.u_d, s.u_d_prime});
    return term(v, 1.0, "u_d");
  }
  std::optional<double> v = s.u_d_prime;
  if (!v && s.u_d && s.u_d_star) v = std::max(*s.u_d, *s.u_d_star);
  return term(v, 1.0, "u_d_prime (or u_d and u_d_star)");
}

inline StrengthInterval condition_lhs_interval(ConditionTag tag, const ThresholdSpec& spec,
                                               const HypothesizedStrengths& s) {
  const bool avg = spec.assumption.null == NullKind::AverageNull;
  switch (tag) {
    case ConditionTag::C1_RR_EU:
      return term(s.rr_eu, 1.0, "rr_eu");
    case ConditionTag::C2_RR_UD:
      return rr_ud_conditional(s);
    case ConditionTag::C_RR_A1_MAXUD:
      return max_of(term(s.rr_ud_e1, 1.0, "rr_ud_e1"), term(s.rr_ud_e0, 1.0, "rr_ud_e0"));
    case ConditionTag::LEE_MIN:
      return min_of(term(s.u_e, 1.0, "u_e"), u_d_effective(s, avg));
    case ConditionTag::LEE_MAX:
      return max_of(term(s.u_e, 1.0, "u_e"), u_d_effective(s, avg));
    case ConditionTag::T1_MIN:
    case ConditionTag::T1_MAX: {
      StrengthInterval ud = avg ? max_of(term(s.rd_ud_e1, 0.0, "rd_ud_e1"),
                                         term(s.rd_ud_e0, 0.0, "rd_ud_e0"))
                                : rd_ud_conditional(s);
      StrengthInterval eu = term(s.rd_eu, 0.0, "rd_eu");
      return tag == ConditionTag::T1_MIN ? min_of(std::move(eu), std::move(ud))
                                         : max_of(std::move(eu), std::move(ud));
    }
    case ConditionTag::T2_A:
    case ConditionTag::T3_A:
      return term(s.a_max, 0.0, "a_max");
    case ConditionTag::T2_B:
    case ConditionTag::T3_B:
      return term(s.b_max, 0.0, "b_max");
    case ConditionTag::T2_MAXAB:
    case ConditionTag::T3_MAXAB:
      return max_of(term(s.a_max, 0.0, "a_max"), term(s.b_max, 0.0, "b_max"));
  }
  throw precondition_error("condition_lhs_interval: unknown tag");
}

inline std::string condition_lhs_text(ConditionTag tag, const ThresholdSpec& spec) {
  const bool avg = spec.assumption.null == NullKind::AverageNull;
  switch (tag) {
    case ConditionTag::C1_RR_EU: return "RR_EU";
    case ConditionTag::C2_RR_UD: return "RR_UD";
    case ConditionTag::C_RR_A1_MAXUD: return "max(RR_UD|E=1, RR_UD|E=0)";
    case ConditionTag::LEE_MIN: return avg ? "min(U_E, U_D')" : "min(U_E, U_D)";
    case ConditionTag::LEE_MAX: return avg ? "max(U_E, U_D')" : "max(U_E, U_D)";
    case ConditionTag::T1_MIN:
      return avg ? "min(RD_EU, max(RD_UD|E=1, RD_UD|E=0))" : "min(RD_EU, RD_UD)";
    case ConditionTag::T1_MAX:
      return avg ? "max(RD_EU, max(RD_UD|E=1, RD_UD|E=0))" : "max(RD_EU, RD_UD)";
    case ConditionTag::T2_A:
    case ConditionTag::T3_A: return "A";
    case ConditionTag::T2_B:
    case ConditionTag::T3_B: return "B";
    case ConditionTag::T2_MAXAB:
    case ConditionTag::T3_MAXAB: return "max(A, B)";
  }
  return "?";
}

}  // namespace detail

// Thresholds alone, no strengths judged.
inline ThresholdReport thresholds_report(const ThresholdSpec& spec) {
  spec.validate();
  ThresholdReport report;
  report.spec = spec;
  for (ConditionTag tag : report_conditions(spec)) {
    ConditionReportEntry e;
    e.tag = tag;
    e.lhs = detail::condition_lhs_text(tag, spec);
    e.threshold = threshold_value(tag, spec.observed, spec.k);
    report.entries.push_back(std::move(e));
  }
  report.overall = OverallVerdict::ThresholdsOnly;
  return report;
}

// Judge the hypothesized strengths against every applicable condition.
//
// A condition violated by the supplied strengths settles the matter: the
// confounder cannot explain the association, whatever the unsupplied
// strengths turn out to be. Otherwise the verdict is "necessary conditions
// met" over the conditions that could be evaluated; entries that could not be
// are reported with the strengths that would settle them. Throws
// missing_strength_error when nothing at all could be evaluated.
inline ThresholdReport assess(const ThresholdSpec& spec, const HypothesizedStrengths& strengths) {
  spec.validate();
  ThresholdReport report;
  report.spec = spec;
  bool any_violated = false;
  std::vector<std::string> wanted;
  for (ConditionTag tag : assess_conditions(spec)) {
    ConditionReportEntry e;
    e.tag = tag;
    e.lhs = detail::condition_lhs_text(tag, spec);
    e.threshold = threshold_value(tag, spec.observed, spec.k);
    detail::StrengthInterval iv = detail::condition_lhs_interval(tag, spec, strengths);
    e.hypothesized = iv.shown;
    if (iv.lo >= e.threshold) {
      e.verdict = ConditionVerdict::Satisfied;
      ++report.evaluated;
    } else if (iv.hi < e.threshold) {
      e.verdict = ConditionVerdict::Violated;
      any_violated = true;
      ++report.evaluated;
    } else {
      e.verdict = ConditionVerdict::Indeterminate;
      e.missing = iv.missing;
      wanted.insert(wanted.end(), iv.missing.begin(), iv.missing.end());
    }
    report.entries.push_back(std::move(e));
  }
  if (report.evaluated == 0) {
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    std::string msg = "assess: no condition evaluable; supply ";
    for (std::size_t i = 0; i < wanted.size(); ++i) msg += (i ? ", " : "") + wanted[i];
    throw missing_strength_error(msg, std::move(wanted));
  }
  // The decisive violated conditions lead the report.
  std::stable_partition(report.entries.begin(), report.entries.end(),
                        [](const ConditionReportEntry& e) {
                          return e.verdict == ConditionVerdict::Violated;
                        });
  report.overall =
      any_violated ? OverallVerdict::CannotExplainAway : OverallVerdict::NecessaryConditionsMet;
  return report;
}

// --- report rendering ---------------------------------------------------------
//
// Machine form: one header block then one tab-separated key=value line per
// condition, every number at full precision. The byte layout is part of the
// toolkit's interface; golden tests pin it.

inline std::string to_machine_text(const ThresholdReport& report) {
  std::string out;
  out += "schema=cornfield.report.v1\n";
  out += std::string("mode=") +
         (report.overall == OverallVerdict::ThresholdsOnly ? "thresholds" : "assess") + "\n";
  out += std::string("scale=") + scale_name(report.spec.scale) + "\n";
  out += "k=" + std::to_string(report.spec.k) + "\n";
  out += std::string("assumption=") + null_kind_name(report.spec.assumption.null) + "\n";
  out += std::string("monotone=") + (report.spec.assumption.monotone ? "1" : "0") + "\n";
  out += "observed=" + format_full(report.spec.observed) + "\n";
  out += std::string("overall=") + overall_name(report.overall) + "\n";
  for (const ConditionReportEntry& e : report.entries) {
    out += "condition_tag=" + std::string(tag_name(e.tag));
    out += "\tlhs=" + e.lhs;
    out += "\tthreshold=" + format_full(e.threshold);
    out += "\thypothesized=" + (e.hypothesized ? format_full(*e.hypothesized) : "na");
    out += std::string("\tverdict=") + verdict_name(e.verdict);
    out += "\tmissing=";
    for (std::size_t i = 0; i < e.missing.size(); ++i) out += (i ? "," : "") + e.missing[i];
    out += "\n";
  }
  return out;
}

inline std::string to_human_text(const ThresholdReport& report) {
  std::string out;
  out += std::string("scale:       ") +
         (report.spec.scale == Scale::RelativeRisk ? "relative risk" : "risk difference") + "\n";
  out += "levels (K):  " + std::to_string(report.spec.k) + "\n";
  out += std::string("assumption:  ") + null_kind_name(report.spec.assumption.null) +
         (report.spec.assumption.monotone ? ", monotone" : "") + "\n";
  out += "observed:    " + format_short(report.spec.observed) + "\n\n";
  for (const ConditionReportEntry& e : report.entries) {
    out += "  " + std::string(tag_name(e.tag)) + ": " + e.lhs + " >= " + format_short(e.threshold);
    if (e.verdict == ConditionVerdict::Satisfied || e.verdict == ConditionVerdict::Violated) {
      out += "   [" + std::string(verdict_name(e.verdict));
      if (e.hypothesized) out += " at " + format_short(*e.hypothesized);
      out += "]";
    } else if (e.verdict == ConditionVerdict::Indeterminate) {
      out += "   [not evaluable; supply ";
      for (std::size_t i = 0; i < e.missing.size(); ++i) out += (i ? ", " : "") + e.missing[i];
      out += "]";
    }
    out += "\n";
  }
  out += "\n";
  switch (report.overall) {
    case OverallVerdict::ThresholdsOnly:
      out += "Necessary strengths an explaining confounder must reach.\n";
      break;
    case OverallVerdict::CannotExplainAway:
      out += "Verdict: cannot explain away the association; a violated condition is decisive.\n";
      break;
    case OverallVerdict::NecessaryConditionsMet:
      out += "Verdict: necessary conditions met; confounding of this strength cannot be ruled out.\n";
      out += "(Meeting necessary conditions never certifies that the confounder explains the association.)\n";
      break;
  }
  return out;
}

}  // namespace cornfield
