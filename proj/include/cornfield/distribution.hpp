#pragma once

// Joint law of (exposure E, confounder U, per-level outcome risks) and the
// summary functionals the bound conditions consume.
//
// The law is parametrized by pr(E=1), the confounder distribution within each
// exposure arm, and two outcome-risk curves over the K confounder levels:
//
//   r_star[j] = pr(D=1 | E=1, U=j)   risks realized with exposure
//   r[j]      = pr(D=1 | E=0, U=j)   risks realized without exposure
//
// "Null" means the exposure itself moves no risk: either level by level
// (r_star == r) or only on average over the confounder's marginal
// distribution. The conditional form implies the average form.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cornfield/common.hpp"
#include "cornfield/measures.hpp"

namespace cornfield {

enum class NullKind { AverageNull, ConditionalNull };

// Which null the analysis grants, plus whether the confounder's prevalence
// shift is monotone (alpha[j] >= 0 for every non-reference level).
struct AssumptionLevel {
  NullKind null = NullKind::ConditionalNull;
  bool monotone = false;
};

inline constexpr const char* null_kind_name(NullKind n) {
  return n == NullKind::AverageNull ? "average-null" : "conditional-null";
}

struct JointLaw {
  int k = 2;                   // confounder levels, >= 2; level 0 is the reference
  double p_e = 0.5;            // pr(E=1), strictly inside (0,1)
  std::vector<double> f1;      // f1[j] = pr(U=j | E=1)
  std::vector<double> f0;      // f0[j] = pr(U=j | E=0)
  std::vector<double> r_star;  // pr(D=1 | E=1, U=j)
  std::vector<double> r;       // pr(D=1 | E=0, U=j)

  // Marginal occupancy pr(U=j).
  double level_mass(int j) const { return p_e * f1[j] + (1.0 - p_e) * f0[j]; }

  // Rejects malformed shapes, probabilities outside [0,1], arm distributions
  // that do not sum to one, and degenerate levels nobody occupies.
  void validate() const {
    if (k < 2) throw validation_error("JointLaw: k must be at least 2");
    if (!(p_e > 0.0 && p_e < 1.0)) throw validation_error("JointLaw: p_e must lie strictly in (0,1)");
    const std::size_t n = static_cast<std::size_t>(k);
    if (f1.size() != n || f0.size() != n || r_star.size() != n || r.size() != n)
      throw validation_error("JointLaw: vector lengths must equal k");
    double s1 = 0.0, s0 = 0.0;
    for (int j = 0; j < k; ++j) {
      for (double v : {f1[j], f0[j], r_star[j], r[j]})
        if (!(v >= 0.0 && v <= 1.0)) throw validation_error("JointLaw: probability outside [0,1]");
      s1 += f1[j];
      s0 += f0[j];
    }
    if (std::abs(s1 - 1.0) > 1e-12 || std::abs(s0 - 1.0) > 1e-12)
      throw validation_error("JointLaw: f1 and f0 must each sum to one");
    for (int j = 0; j < k; ++j)
      if (!(level_mass(j) > 0.0))
        throw validation_error("JointLaw: degenerate level with pr(U=j) = 0");
  }
};

inline JointLaw make_joint_law(int k, double p_e, std::vector<double> f1, std::vector<double> f0,
                               std::vector<double> r_star, std::vector<double> r) {
  JointLaw law{k, p_e, std::move(f1), std::move(f0), std::move(r_star), std::move(r)};
  law.validate();
  return law;
}

// Per-level quantities derived from a law. alpha and the betas are
// differences against reference level 0; the spread ratios treat +infinity as
// a first-class value, so they are always >= 1.
struct ConfounderSummary {
  std::vector<double> p;      // p[j] = pr(E=1 | U=j)
  std::vector<double> q;      // q[j] = p[j] / (1 - p[j]), +inf when p[j] = 1
  std::vector<double> alpha;  // f1[j] - f0[j]
  std::vector<double> beta1;  // r_star[j] - r_star[0]
  std::vector<double> beta0;  // r[j] - r[0]
  double u_e = 1.0;           // max_j q[j] / min_j q[j]
  double u_d = 1.0;           // spread of r
  double u_d_star = 1.0;      // spread of r_star
  double u_d_prime = 1.0;     // max(u_d, u_d_star)
  double a_max = 0.0;         // max_{j>=1} |alpha[j]|
  double b_max = 0.0;         // max_{j>=1} of |beta1[j]| and |beta0[j]|
};

namespace detail {

// max/min over a nonnegative range. Identical values give exactly 1 (even all
// zeros, where the levels are indistinguishable); a zero minimum under a
// positive maximum gives +infinity.
inline double spread_ratio(const double* v, int n) {
  double lo = v[0], hi = v[0];
  for (int j = 1; j < n; ++j) {
    lo = std::min(lo, v[j]);
    hi = std::max(hi, v[j]);
  }
  if (lo == hi) return 1.0;
  if (lo == 0.0) return kInf;
  return hi / lo;
}

}  // namespace detail

inline ConfounderSummary summarize(const JointLaw& law) {
  const int k = law.k;
  ConfounderSummary s;
  s.p.resize(k);
  s.q.resize(k);
  s.alpha.resize(k);
  s.beta1.resize(k);
  s.beta0.resize(k);
  for (int j = 0; j < k; ++j) {
    s.p[j] = law.p_e * law.f1[j] / law.level_mass(j);
    s.q[j] = s.p[j] < 1.0 ? s.p[j] / (1.0 - s.p[j]) : kInf;
    s.alpha[j] = law.f1[j] - law.f0[j];
    s.beta1[j] = law.r_star[j] - law.r_star[0];
    s.beta0[j] = law.r[j] - law.r[0];
    if (j >= 1) {
      s.a_max = std::max(s.a_max, std::abs(s.alpha[j]));
      s.b_max = std::max({s.b_max, std::abs(s.beta1[j]), std::abs(s.beta0[j])});
    }
  }
  s.u_e = detail::spread_ratio(s.q.data(), k);
  s.u_d = detail::spread_ratio(law.r.data(), k);
  s.u_d_star = detail::spread_ratio(law.r_star.data(), k);
  s.u_d_prime = std::max(s.u_d, s.u_d_star);
  return s;
}

// E-on-D association induced by the law. For K=2 the E-on-U measures and the
// within-arm risk differences against level 0 are filled in as well.
inline AssociationMeasures marginal_measures(const JointLaw& law) {
  double risk1 = 0.0, risk0 = 0.0;
  for (int j = 0; j < law.k; ++j) {
    risk1 += law.r_star[j] * law.f1[j];
    risk0 += law.r[j] * law.f0[j];
  }
  AssociationMeasures m;
  m.rd_ed = risk1 - risk0;
  if (risk0 == 0.0)
    m.rr_ed = risk1 == 0.0 ? std::optional<double>{} : std::optional<double>{kInf};
  else
    m.rr_ed = risk1 / risk0;
  if (law.k == 2) {
    if (law.f0[1] == 0.0)
      m.rr_eu = law.f1[1] == 0.0 ? std::optional<double>{} : std::optional<double>{kInf};
    else
      m.rr_eu = law.f1[1] / law.f0[1];
    m.rd_eu = law.f1[1] - law.f0[1];
    m.rd_ud_given_e1 = law.r_star[1] - law.r_star[0];
    m.rd_ud_given_e0 = law.r[1] - law.r[0];
  }
  return m;
}

// Exposure moves no risk averaged over pr(U): |sum_j (r_star[j]-r[j]) pr(U=j)|
// within tol.
inline bool check_average_null(const JointLaw& law, double tol = 1e-9) {
  double acc = 0.0;
  for (int j = 0; j < law.k; ++j) acc += (law.r_star[j] - law.r[j]) * law.level_mass(j);
  return std::abs(acc) <= tol;
}

// Exposure moves no risk within any confounder level.
inline bool check_conditional_null(const JointLaw& law, double tol = 1e-9) {
  for (int j = 0; j < law.k; ++j)
    if (std::abs(law.r_star[j] - law.r[j]) > tol) return false;
  return true;
}

// alpha[j] >= 0 for every level other than the chosen reference.
inline bool check_monotone(const ConfounderSummary& s, int reference = 0) {
  const int k = static_cast<int>(s.alpha.size());
  if (reference < 0 || reference >= k) throw precondition_error("check_monotone: reference out of range");
  for (int j = 0; j < k; ++j)
    if (j != reference && s.alpha[j] < 0.0) return false;
  return true;
}

// Swap two confounder levels in every per-level vector. Marginal quantities
// are unchanged; reference-relative ones follow the new labels.
inline JointLaw swap_levels(const JointLaw& law, int a, int b) {
  if (a < 0 || b < 0 || a >= law.k || b >= law.k)
    throw precondition_error("swap_levels: level out of range");
  JointLaw out = law;
  std::swap(out.f1[a], out.f1[b]);
  std::swap(out.f0[a], out.f0[b]);
  std::swap(out.r_star[a], out.r_star[b]);
  std::swap(out.r[a], out.r[b]);
  return out;
}

// Relabel so new_reference becomes level 0. This is the sanctioned way to
// change the reference; alpha and beta are then reread off the new labels.
inline JointLaw relabel_reference(const JointLaw& law, int new_reference) {
  if (new_reference < 0 || new_reference >= law.k)
    throw precondition_error("relabel_reference: level out of range");
  return swap_levels(law, 0, new_reference);
}

// E' = 1 - E. Arm-conditional curves swap arms; validity and either null are
// preserved.
inline JointLaw flip_exposure(const JointLaw& law) {
  return JointLaw{law.k, 1.0 - law.p_e, law.f0, law.f1, law.r, law.r_star};
}

// D' = 1 - D. Negates both risk differences while keeping alpha, the absolute
// betas, and either null intact.
inline JointLaw flip_outcome(const JointLaw& law) {
  JointLaw out = law;
  for (int j = 0; j < law.k; ++j) {
    out.r_star[j] = 1.0 - law.r_star[j];
    out.r[j] = 1.0 - law.r[j];
  }
  return out;
}

// Under the average null the marginal risk difference collapses onto the
// confounder:
//
//   rd_ed = sum_{j>=1} alpha[j] * (beta1[j]*pr(E=0) + beta0[j]*pr(E=1))
//
// Returns that sum. The law must satisfy the average null within tol.
inline double lemma1_decomposition(const JointLaw& law, double tol = 1e-9) {
  if (!check_average_null(law, tol))
    throw precondition_error("lemma1_decomposition: law is not an average null within tolerance");
  double acc = 0.0;
  for (int j = 1; j < law.k; ++j) {
    const double b1 = law.r_star[j] - law.r_star[0];
    const double b0 = law.r[j] - law.r[0];
    acc += (law.f1[j] - law.f0[j]) * (b1 * (1.0 - law.p_e) + b0 * law.p_e);
  }
  return acc;
}

// --- plain-text serialization ------------------------------------------------
//
// One "key = value" pair per line, lists comma-separated, keys exactly the
// field names, '#' starts a comment. Values are written with 17 significant
// digits so a round trip reproduces the law bit for bit.

inline std::string to_text(const JointLaw& law) {
  std::string out;
  out += "k = " + std::to_string(law.k) + "\n";
  out += "p_e = " + format_full(law.p_e) + "\n";
  const auto list = [&](const char* key, const std::vector<double>& v) {
    out += key;
    out += " = ";
    for (int j = 0; j < law.k; ++j) {
      if (j) out += ", ";
      out += format_full(v[j]);
    }
    out += "\n";
  };
  list("f1", law.f1);
  list("f0", law.f0);
  list("r_star", law.r_star);
  list("r", law.r);
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw parse_error("expected a number, got '" + std::string(s) + "'", line);
  return v;
}

inline std::vector<double> parse_double_list(std::string_view s, std::size_t line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = s.find(',', pos);
    const std::string_view item = s.substr(pos, comma == std::string_view::npos ? comma : comma - pos);
    out.push_back(parse_double(item, line));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

inline JointLaw joint_law_from_text(std::string_view text) {
  std::map<std::string, std::pair<std::string, std::size_t>> fields;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw parse_error("expected 'key = value'", line_no);
    const std::string key{detail::trim(line.substr(0, eq))};
    if (key != "k" && key != "p_e" && key != "f1" && key != "f0" && key != "r_star" && key != "r")
      throw parse_error("unknown key '" + key + "'", line_no);
    if (!fields.emplace(key, std::pair{std::string(line.substr(eq + 1)), line_no}).second)
      throw parse_error("duplicate key '" + key + "'", line_no);
  }
  for (const char* key : {"k", "p_e", "f1", "f0", "r_star", "r"})
    if (!fields.count(key)) throw parse_error(std::string("missing key '") + key + "'", 0);

  const auto& [k_text, k_line] = fields.at("k");
  const double k_val = detail::parse_double(k_text, k_line);
  const int k = static_cast<int>(k_val);
  if (k != k_val || k < 2) throw parse_error("k must be an integer >= 2", k_line);

  JointLaw law;
  law.k = k;
  law.p_e = detail::parse_double(fields.at("p_e").first, fields.at("p_e").second);
  const auto list = [&](const char* key) {
    const auto& [text_v, line_v] = fields.at(key);
    std::vector<double> v = detail::parse_double_list(text_v, line_v);
    if (static_cast<int>(v.size()) != k)
      throw parse_error(std::string("'") + key + "' must list exactly k values", line_v);
    return v;
  };
  law.f1 = list("f1");
  law.f0 = list("f0");
  law.r_star = list("r_star");
  law.r = list("r");
  law.validate();
  return law;
}

}  // namespace cornfield
