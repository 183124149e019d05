#pragma once

// Brute-force verification engine. Two jobs:
//
//   necessity: sample null-effect laws and confirm every applicable condition
//   holds at the law's own observed association (the conditions are claimed
//   necessary; a single violation would be a counterexample);
//
//   sharpness: search for null laws that reproduce a fixed observed
//   association while driving a condition's left side down onto its
//   threshold (the bounds are claimed unimprovable).
//
// Everything is deterministic in the configured seed. Sampling is split into
// fixed-size chunks, each with its own substream seed, and chunk results are
// merged in chunk order; thread count therefore never changes any output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cornfield/common.hpp"
#include "cornfield/conditions.hpp"
#include "cornfield/distribution.hpp"
#include "cornfield/measures.hpp"

namespace cornfield {

inline constexpr std::uint64_t kDefaultSeed = 20140101;

// Uniform doubles from the top 53 bits of a standard-seeded mt19937_64; the
// sequence is fully pinned by the C++ standard, so identical across
// platforms and toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

// Seed for the index-th substream of a run. Distinct indices give unrelated
// streams; the mapping itself is part of the determinism contract.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::splitmix64(seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

struct SamplerConfig {
  std::uint64_t seed = kDefaultSeed;
  std::int64_t n_samples = 100000;
  int k = 2;
  AssumptionLevel assumption{};
  double tol = 1e-9;
  int retry_limit = 1000;   // attempts per law before the sampler gives up
  bool boundary = false;    // stress near-degenerate laws: extreme p_e, thin levels
  int workers = 0;          // 0 = hardware concurrency; never affects results

  void validate() const {
    if (k < 2) throw validation_error("SamplerConfig: k must be at least 2");
    if (n_samples < 1) throw validation_error("SamplerConfig: n_samples must be at least 1");
    if (retry_limit < 1) throw validation_error("SamplerConfig: retry_limit must be at least 1");
    if (!(tol > 0.0)) throw validation_error("SamplerConfig: tol must be positive");
  }
};

namespace detail {

// Flat Dirichlet via normalized exponentials. The tiny floor keeps every
// weight strictly positive so no confounder level can end up unoccupied.
inline void sample_simplex(RandomStream& rng, double* w, int n) {
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    w[j] = 1e-12 - std::log(1.0 - rng.uniform01());
    sum += w[j];
  }
  for (int j = 0; j < n; ++j) w[j] /= sum;
}

// Log-uniform weights spanning four orders of magnitude, for the boundary
// suite where attainability configurations live.
inline void sample_simplex_boundary(RandomStream& rng, double* w, int n) {
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    w[j] = std::pow(10.0, -4.0 * rng.uniform01());
    sum += w[j];
  }
  for (int j = 0; j < n; ++j) w[j] /= sum;
}

}  // namespace detail

// Draw one law satisfying cfg's assumption, overwriting law in place (the
// vectors are resized once and reused across calls). ConditionalNull laws are
// accepted on the first attempt. AverageNull solves the reference level's
// exposed risk from the zero-average constraint and resamples the whole law
// whenever that risk leaves [0,1]; after retry_limit failures this throws.
inline void sample_null_law_into(const SamplerConfig& cfg, RandomStream& rng, JointLaw& law) {
  const int k = cfg.k;
  law.k = k;
  law.f1.resize(k);
  law.f0.resize(k);
  law.r_star.resize(k);
  law.r.resize(k);

  for (int attempt = 0; attempt < cfg.retry_limit; ++attempt) {
    law.p_e = cfg.boundary ? (rng.uniform01() < 0.5 ? 0.001 : 0.999) : rng.uniform(0.05, 0.95);
    if (cfg.boundary) {
      detail::sample_simplex_boundary(rng, law.f0.data(), k);
    } else {
      detail::sample_simplex(rng, law.f0.data(), k);
    }
    if (cfg.assumption.monotone) {
      // f1 dominates f0 off the reference: shift a fraction of the reference
      // level's mass outward, so alpha[j] >= 0 for every j >= 1 by build.
      const double shift = rng.uniform01() * law.f0[0];
      double wsum = 0.0;
      for (int j = 1; j < k; ++j) {
        law.f1[j] = 1e-12 - std::log(1.0 - rng.uniform01());
        wsum += law.f1[j];
      }
      for (int j = 1; j < k; ++j) law.f1[j] = law.f0[j] + shift * (law.f1[j] / wsum);
      law.f1[0] = law.f0[0] - shift;
    } else if (cfg.boundary) {
      detail::sample_simplex_boundary(rng, law.f1.data(), k);
    } else {
      detail::sample_simplex(rng, law.f1.data(), k);
    }
    for (int j = 0; j < k; ++j) law.r[j] = rng.uniform01();

    if (cfg.assumption.null == NullKind::ConditionalNull) {
      for (int j = 0; j < k; ++j) law.r_star[j] = law.r[j];
      return;
    }
    double shifted = 0.0;
    for (int j = 1; j < k; ++j) {
      law.r_star[j] = rng.uniform01();
      shifted += (law.r_star[j] - law.r[j]) * law.level_mass(j);
    }
    const double r0 = law.r[0] - shifted / law.level_mass(0);
    if (r0 >= 0.0 && r0 <= 1.0) {
      law.r_star[0] = r0;
      return;
    }
  }
  throw error("sample_null_law: rejection budget exhausted solving the average-null constraint");
}

inline JointLaw sample_null_law(const SamplerConfig& cfg, RandomStream& rng) {
  cfg.validate();
  JointLaw law;
  sample_null_law_into(cfg, rng, law);
  return law;
}

// --- condition applicability --------------------------------------------------

inline bool condition_applicable(ConditionTag tag, int k, AssumptionLevel assumption) {
  switch (tag) {
    case ConditionTag::C1_RR_EU:
    case ConditionTag::C_RR_A1_MAXUD:
      return k == 2;
    case ConditionTag::C2_RR_UD:
      return k == 2 && assumption.null == NullKind::ConditionalNull;
    case ConditionTag::LEE_MIN:
    case ConditionTag::LEE_MAX:
      return k >= 2;
    case ConditionTag::T1_MIN:
    case ConditionTag::T1_MAX:
      return k == 2;
    case ConditionTag::T2_A:
    case ConditionTag::T2_B:
    case ConditionTag::T2_MAXAB:
      return k >= 3;
    case ConditionTag::T3_A:
    case ConditionTag::T3_B:
    case ConditionTag::T3_MAXAB:
      return k >= 2 && assumption.monotone;
  }
  return false;
}

inline void require_applicable(ConditionTag tag, int k, AssumptionLevel assumption) {
  if (!condition_applicable(tag, k, assumption))
    throw precondition_error(std::string("condition ") + std::string(tag_name(tag)) +
                             " is not applicable at k=" + std::to_string(k) + " under " +
                             null_kind_name(assumption.null) +
                             (assumption.monotone ? " with" : " without") + " monotonicity");
}

// --- condition evaluation on a law ---------------------------------------------

struct TagEvaluation {
  bool usable = false;   // false when the observed ratio is undefined or infinite
  double observed = 0.0; // oriented: rr >= 1 or rd >= 0
  double lhs = 0.0;      // the condition's left side on the oriented law
};

namespace detail {

// num/den over risks in [0,1]: both zero compare equal (ratio 1), a positive
// numerator over zero is +infinity.
inline double ratio01(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 1.0 : kInf;
  return num / den;
}

struct SpreadAcc {
  double lo = kInf, hi = -kInf;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double ratio() const {
    if (lo == hi) return 1.0;
    if (lo == 0.0) return kInf;
    return hi / lo;
  }
};

}  // namespace detail

// Left side of a condition evaluated directly on a law, together with the
// law's own oriented association. Orientation is applied internally: the
// exposure coding is chosen so rr >= 1 (ratio scale), the outcome coding so
// rd >= 0 (difference scale), and for a binary confounder the level coding so
// the exposure-confounder association is nonnegative. Nothing is copied.
inline TagEvaluation evaluate_tag(ConditionTag tag, const JointLaw& law) {
  const int k = law.k;
  switch (tag) {
    case ConditionTag::C1_RR_EU:
    case ConditionTag::C2_RR_UD:
    case ConditionTag::C_RR_A1_MAXUD:
    case ConditionTag::T1_MIN:
    case ConditionTag::T1_MAX:
      if (k != 2) throw precondition_error("evaluate_tag: binary-confounder condition needs k = 2");
      break;
    default:
      break;
  }

  double risk1 = 0.0, risk0 = 0.0;
  for (int j = 0; j < k; ++j) {
    risk1 += law.r_star[j] * law.f1[j];
    risk0 += law.r[j] * law.f0[j];
  }

  TagEvaluation out;
  if (tag_scale(tag) == Scale::RelativeRisk) {
    if (risk1 == 0.0 || risk0 == 0.0) return out;  // rr undefined or infinite either way up
    const bool flip_e = risk1 < risk0;
    out.observed = flip_e ? risk0 / risk1 : risk1 / risk0;
    const std::vector<double>& F1 = flip_e ? law.f0 : law.f1;
    const std::vector<double>& F0 = flip_e ? law.f1 : law.f0;
    const std::vector<double>& R1 = flip_e ? law.r : law.r_star;  // risks in the exposed arm
    const std::vector<double>& R0 = flip_e ? law.r_star : law.r;

    switch (tag) {
      case ConditionTag::C1_RR_EU:
      case ConditionTag::C2_RR_UD:
      case ConditionTag::C_RR_A1_MAXUD: {
        const int u1 = F1[1] >= F0[1] ? 1 : 0;  // level positively tied to exposure
        const int u0 = 1 - u1;
        if (tag == ConditionTag::C1_RR_EU) {
          out.lhs = detail::ratio01(F1[u1], F0[u1]);
        } else {
          out.lhs = std::max(detail::ratio01(R1[u1], R1[u0]), detail::ratio01(R0[u1], R0[u0]));
        }
        break;
      }
      default: {  // LEE_MIN, LEE_MAX
        detail::SpreadAcc odds, d1, d0;
        for (int j = 0; j < k; ++j) {
          odds.add(detail::ratio01(F1[j], F0[j]));
          d1.add(R1[j]);
          d0.add(R0[j]);
        }
        const double u_e = odds.ratio();
        const double u_d_prime = std::max(d1.ratio(), d0.ratio());
        out.lhs = tag == ConditionTag::LEE_MIN ? std::min(u_e, u_d_prime)
                                               : std::max(u_e, u_d_prime);
        break;
      }
    }
    out.usable = true;
    return out;
  }

  const double rd = risk1 - risk0;
  out.observed = std::abs(rd);
  const double s_out = rd < 0.0 ? -1.0 : 1.0;
  switch (tag) {
    case ConditionTag::T1_MIN:
    case ConditionTag::T1_MAX: {
      const double eu_raw = law.f1[1] - law.f0[1];
      const double s_u = eu_raw < 0.0 ? -1.0 : 1.0;
      const double eu = std::abs(eu_raw);
      const double sgn = s_out * s_u;
      const double ud = std::max(sgn * (law.r_star[1] - law.r_star[0]),
                                 sgn * (law.r[1] - law.r[0]));
      out.lhs = tag == ConditionTag::T1_MIN ? std::min(eu, ud) : std::max(eu, ud);
      break;
    }
    default: {  // the A/B family; signs cancel in the absolute values
      double a = 0.0, b = 0.0;
      for (int j = 1; j < k; ++j) {
        a = std::max(a, std::abs(law.f1[j] - law.f0[j]));
        b = std::max({b, std::abs(law.r_star[j] - law.r_star[0]),
                      std::abs(law.r[j] - law.r[0])});
      }
      switch (tag) {
        case ConditionTag::T2_A:
        case ConditionTag::T3_A: out.lhs = a; break;
        case ConditionTag::T2_B:
        case ConditionTag::T3_B: out.lhs = b; break;
        default: out.lhs = std::max(a, b); break;
      }
      break;
    }
  }
  out.usable = true;
  return out;
}

// --- necessity ------------------------------------------------------------------

struct NecessityReport {
  ConditionTag tag{};
  SamplerConfig cfg;
  double threshold_scale = 1.0;
  std::int64_t evaluated = 0;
  std::int64_t skipped = 0;     // laws whose observed ratio was undefined/infinite
  std::int64_t violations = 0;  // slack below -slack_tol
  double slack_tol = 1e-9;
  double worst_slack = kInf;    // min over evaluated laws of lhs - threshold
  double worst_observed = 0.0;
  double worst_lhs = 0.0;
  double worst_threshold = 0.0;
  std::optional<JointLaw> worst_law;
};

namespace detail {

struct NecessityChunk {
  std::int64_t evaluated = 0, skipped = 0, violations = 0;
  double worst_slack = kInf;
  double worst_observed = 0.0, worst_lhs = 0.0, worst_threshold = 0.0;
  std::optional<JointLaw> worst_law;
  std::exception_ptr failure;
};

inline constexpr std::int64_t kChunkSize = 4096;

}  // namespace detail

// Sample cfg.n_samples null laws and check one condition against each law's
// own observed association. threshold_scale inflates every threshold and
// exists so a harness can prove to itself that violations are detectable;
// 1.0 is the honest value.
inline NecessityReport verify_necessity(const SamplerConfig& cfg, ConditionTag tag,
                                        double threshold_scale = 1.0, double slack_tol = 1e-9) {
  cfg.validate();
  require_applicable(tag, cfg.k, cfg.assumption);

  const std::int64_t chunks =
      (cfg.n_samples + detail::kChunkSize - 1) / detail::kChunkSize;
  std::vector<detail::NecessityChunk> results(static_cast<std::size_t>(chunks));

  const auto run_chunk = [&](std::int64_t c) {
    detail::NecessityChunk& out = results[static_cast<std::size_t>(c)];
    try {
      RandomStream rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(c)));
      const std::int64_t begin = c * detail::kChunkSize;
      const std::int64_t end = std::min(cfg.n_samples, begin + detail::kChunkSize);
      JointLaw law;
      for (std::int64_t i = begin; i < end; ++i) {
        sample_null_law_into(cfg, rng, law);
        const TagEvaluation ev = evaluate_tag(tag, law);
        if (!ev.usable) {
          ++out.skipped;
          continue;
        }
        ++out.evaluated;
        const double threshold = threshold_value(tag, ev.observed, cfg.k) * threshold_scale;
        const double slack = ev.lhs - threshold;
        if (slack < -slack_tol) ++out.violations;
        if (slack < out.worst_slack) {
          out.worst_slack = slack;
          out.worst_observed = ev.observed;
          out.worst_lhs = ev.lhs;
          out.worst_threshold = threshold;
          out.worst_law = law;
        }
      }
    } catch (...) {
      out.failure = std::current_exception();
    }
  };

  int workers = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<std::int64_t>(workers, chunks));
  if (workers == 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::int64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    for (std::thread& t : pool) t.join();
  }

  NecessityReport report;
  report.tag = tag;
  report.cfg = cfg;
  report.threshold_scale = threshold_scale;
  report.slack_tol = slack_tol;
  for (const detail::NecessityChunk& c : results) {
    if (c.failure) std::rethrow_exception(c.failure);
    report.evaluated += c.evaluated;
    report.skipped += c.skipped;
    report.violations += c.violations;
    if (c.worst_slack < report.worst_slack) {
      report.worst_slack = c.worst_slack;
      report.worst_observed = c.worst_observed;
      report.worst_lhs = c.worst_lhs;
      report.worst_threshold = c.worst_threshold;
      report.worst_law = c.worst_law;
    }
  }
  return report;
}

// --- sharpness ------------------------------------------------------------------

inline bool has_sharpness_claim(ConditionTag tag) {
  switch (tag) {
    case ConditionTag::C1_RR_EU:
    case ConditionTag::C2_RR_UD:
    case ConditionTag::C_RR_A1_MAXUD:
      return false;
    default:
      return true;
  }
}

// Acceptance tolerance on the relative gap: the difference-scale bounds admit
// exact or epsilon-close equality configurations; the ratio-scale spread
// bounds are approached through near-degenerate laws, so the search gets an
// order more room.
inline double sharpness_tolerance(ConditionTag tag) {
  return tag_scale(tag) == Scale::RiskDifference ? 1e-3 : 1e-2;
}

struct SearchResult {
  ConditionTag tag{};
  int k = 2;
  AssumptionLevel assumption{};
  double target = 0.0;          // the observed association every candidate reproduces
  double bound = 0.0;           // the condition's threshold at that target
  double achieved = kInf;       // best (smallest) left side found
  double relative_gap = kInf;   // (achieved - bound) / bound
  std::int64_t evaluations = 0;
  bool budget_exhausted = false;
  JointLaw best_law;
};

namespace detail {

// Search-space layout. Candidate laws are decoded from a flat box-constrained
// vector; the observed association and, under the average null, the zero-
// average constraint are not searched over but solved exactly inside the
// decode, by pivoting on the best-conditioned coordinate. A candidate whose
// constraints cannot be solved inside [0,1] decodes to nothing and scores
// +infinity.
struct SearchSpace {
  ConditionTag tag{};
  int k = 2;
  AssumptionLevel assumption{};
  double target = 0.0;

  static constexpr double kWeightFloor = 1e-9;

  bool average() const { return assumption.null == NullKind::AverageNull; }
  bool monotone() const { return assumption.monotone; }

  int f0_at() const { return 0; }
  int f1_at() const { return k; }                       // f1 weights or monotone shifts
  int f1_len() const { return monotone() ? k - 1 : k; }
  int r_at() const { return f1_at() + f1_len(); }
  int rstar_at() const { return r_at() + k; }
  int pe_at() const { return rstar_at() + k; }
  int size() const { return average() ? pe_at() + 1 : r_at() + k; }

  void box(int i, double& lo, double& hi) const {
    if (i < f1_at()) {
      lo = kWeightFloor, hi = 1.0;
    } else if (i < r_at()) {
      lo = monotone() ? 0.0 : kWeightFloor, hi = 1.0;
    } else if (!average() || i < rstar_at()) {
      lo = 0.0, hi = 1.0;
    } else if (i < pe_at()) {
      lo = 0.0, hi = 1.0;
    } else {
      lo = 0.01, hi = 0.99;
    }
  }

  bool decode(const std::vector<double>& x, JointLaw& law) const {
    law.k = k;
    law.f1.resize(k);
    law.f0.resize(k);
    law.r_star.resize(k);
    law.r.resize(k);
    law.p_e = average() ? x[pe_at()] : 0.5;

    double s0 = 0.0;
    for (int j = 0; j < k; ++j) s0 += x[f0_at() + j];
    for (int j = 0; j < k; ++j) law.f0[j] = x[f0_at() + j] / s0;
    if (monotone()) {
      double shifted = 0.0;
      for (int j = 1; j < k; ++j) {
        const double d = x[f1_at() + (j - 1)] * law.f0[0] / (k - 1);
        law.f1[j] = law.f0[j] + d;
        shifted += d;
      }
      law.f1[0] = law.f0[0] - shifted;
      if (law.f1[0] < 0.0) law.f1[0] = 0.0;
    } else {
      double s1 = 0.0;
      for (int j = 0; j < k; ++j) s1 += x[f1_at() + j];
      for (int j = 0; j < k; ++j) law.f1[j] = x[f1_at() + j] / s1;
    }
    for (int j = 0; j < k; ++j) law.r[j] = x[r_at() + j];

    const bool ratio = tag_scale(tag) == Scale::RelativeRisk;
    if (!average()) {
      // Solve one unexposed risk so the law reproduces the target exactly:
      //   difference scale: sum_j r[j] (f1[j] - f0[j])          = target
      //   ratio scale:      sum_j r[j] (f1[j] - target * f0[j]) = 0
      int pivot = -1;
      double best = 0.0;
      for (int j = 0; j < k; ++j) {
        const double c = ratio ? law.f1[j] - target * law.f0[j] : law.f1[j] - law.f0[j];
        if (std::abs(c) > std::abs(best)) best = c, pivot = j;
      }
      if (pivot < 0 || std::abs(best) < 1e-12) return false;
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        if (j == pivot) continue;
        const double c = ratio ? law.f1[j] - target * law.f0[j] : law.f1[j] - law.f0[j];
        acc += law.r[j] * c;
      }
      const double solved = ((ratio ? 0.0 : target) - acc) / best;
      if (!(solved >= -1e-12 && solved <= 1.0 + 1e-12)) return false;
      law.r[pivot] = std::clamp(solved, 0.0, 1.0);
      for (int j = 0; j < k; ++j) law.r_star[j] = law.r[j];
      if (ratio) {
        double risk0 = 0.0;
        for (int j = 0; j < k; ++j) risk0 += law.r[j] * law.f0[j];
        if (risk0 < 1e-12) return false;
      }
      return true;
    }

    // Average null: the exposed risks at the reference level and at one
    // pivot level are solved from the pair of linear constraints
    //   sum_j (r_star[j] - r[j]) * mass[j] = 0        (zero average effect)
    //   observed association            = target
    for (int j = 0; j < k; ++j) law.r_star[j] = x[rstar_at() + j];
    double risk0 = 0.0;
    for (int j = 0; j < k; ++j) risk0 += law.r[j] * law.f0[j];
    if (ratio && risk0 < 1e-12) return false;
    const double rhs_target = ratio ? target * risk0 : target + risk0;

    const double m0 = law.level_mass(0);
    int pivot = -1;
    double det = 0.0;
    for (int j = 1; j < k; ++j) {
      const double d = m0 * law.f1[j] - law.level_mass(j) * law.f1[0];
      if (std::abs(d) > std::abs(det)) det = d, pivot = j;
    }
    if (pivot < 0 || std::abs(det) < 1e-12) return false;
    double k1 = 0.0, k2 = rhs_target;
    for (int j = 0; j < k; ++j) k1 += law.r[j] * law.level_mass(j);
    for (int j = 1; j < k; ++j) {
      if (j == pivot) continue;
      k1 -= law.r_star[j] * law.level_mass(j);
      k2 -= law.r_star[j] * law.f1[j];
    }
    const double mp = law.level_mass(pivot);
    const double r0 = (k1 * law.f1[pivot] - mp * k2) / det;
    const double rp = (m0 * k2 - law.f1[0] * k1) / det;
    if (!(r0 >= -1e-12 && r0 <= 1.0 + 1e-12 && rp >= -1e-12 && rp <= 1.0 + 1e-12)) return false;
    law.r_star[0] = std::clamp(r0, 0.0, 1.0);
    law.r_star[pivot] = std::clamp(rp, 0.0, 1.0);
    return true;
  }

  // Inverse of decode up to the solved coordinates, for planting a known law
  // as a search start. Decoding the result re-solves those coordinates and
  // lands back on the law (exactly, when the law meets the constraints).
  std::vector<double> encode(const JointLaw& law) const {
    std::vector<double> x(static_cast<std::size_t>(size()));
    for (int j = 0; j < k; ++j) x[f0_at() + j] = std::max(law.f0[j], kWeightFloor);
    if (monotone()) {
      for (int j = 1; j < k; ++j) {
        const double d = (law.f1[j] - law.f0[j]) * (k - 1) / std::max(law.f0[0], kWeightFloor);
        x[f1_at() + (j - 1)] = std::clamp(d, 0.0, 1.0);
      }
    } else {
      for (int j = 0; j < k; ++j) x[f1_at() + j] = std::max(law.f1[j], kWeightFloor);
    }
    for (int j = 0; j < k; ++j) x[r_at() + j] = law.r[j];
    if (average()) {
      for (int j = 0; j < k; ++j) x[rstar_at() + j] = law.r_star[j];
      x[pe_at()] = std::clamp(law.p_e, 0.01, 0.99);
    }
    return x;
  }
};

// Closed-form equality (or epsilon-close) configurations per condition,
// used as search starts. Each reproduces the target association after the
// decode re-solves its pivot coordinate.
inline std::vector<JointLaw> sharpness_seeds(ConditionTag tag, double t, int k) {
  std::vector<JointLaw> seeds;
  const auto law = [&](std::vector<double> f1, std::vector<double> f0, std::vector<double> r) {
    JointLaw L;
    L.k = k;
    L.p_e = 0.5;
    L.f1 = std::move(f1);
    L.f0 = std::move(f0);
    L.r = std::move(r);
    L.r_star = L.r;
    seeds.push_back(std::move(L));
  };
  const auto filled = [&](double v0, double rest) {
    std::vector<double> v(static_cast<std::size_t>(k), rest);
    v[0] = v0;
    return v;
  };

  switch (tag) {
    case ConditionTag::T1_MIN:
      // Full-strength outcome side, exposure side exactly at the bound.
      law({(1.0 - t) / 2.0, (1.0 + t) / 2.0}, {(1.0 + t) / 2.0, (1.0 - t) / 2.0}, {0.0, 1.0});
      break;
    case ConditionTag::T1_MAX: {
      const double s = std::sqrt(t);
      law({(1.0 - s) / 2.0, (1.0 + s) / 2.0}, {(1.0 + s) / 2.0, (1.0 - s) / 2.0},
          {(1.0 - s) / 2.0, (1.0 + s) / 2.0});
      break;
    }
    case ConditionTag::T2_A:
    case ConditionTag::T3_A: {
      // Every level shifted equally, outcome contrast saturated.
      const double a = t / (k - 1);
      law(filled((1.0 - t) / 2.0, (1.0 - t) / (2.0 * (k - 1)) + a),
          filled((1.0 + t) / 2.0, (1.0 - t) / (2.0 * (k - 1))), filled(0.0, 1.0));
      break;
    }
    case ConditionTag::T2_B: {
      // Disjoint supports off the reference; the reference keeps epsilon mass
      // in both arms, which is what separates the bound from rd/2.
      const double eps = 1e-7;
      std::vector<double> f1(static_cast<std::size_t>(k), eps);
      std::vector<double> f0(static_cast<std::size_t>(k), eps);
      std::vector<double> r(static_cast<std::size_t>(k), 0.5);
      f1[1] = 1.0 - (k - 1) * eps;
      f0[2] = 1.0 - (k - 1) * eps;
      const double b = t / (2.0 * (1.0 - k * eps));
      r[1] = 0.5 + b;
      r[2] = 0.5 - b;
      law(std::move(f1), std::move(f0), std::move(r));
      break;
    }
    case ConditionTag::T2_MAXAB: {
      // Branch 1: prevalence and outcome shifts equal at sqrt(t/(k-1)), all
      // pointing the same way when the exposed arm can hold them.
      const double s = std::sqrt(t / (k - 1));
      if ((k - 1) * s <= 1.0) {
        law(filled(1.0 - (k - 1) * s, s), filled(1.0, 0.0),
            filled((1.0 - s) / 2.0, (1.0 + s) / 2.0));
      } else if (s <= 0.5) {
        // Alternating-sign shifts keep each arm's distribution proper.
        std::vector<double> f1(static_cast<std::size_t>(k), 0.0);
        std::vector<double> f0(static_cast<std::size_t>(k), 0.0);
        std::vector<double> r(static_cast<std::size_t>(k), 0.5);
        double m1 = 0.0, m0 = 0.0;
        for (int j = 1; j < k; ++j) {
          if (j % 2 == 1) {
            f1[j] = s, m1 += s, r[j] = 0.5 + s;
          } else {
            f0[j] = s, m0 += s, r[j] = 0.5 - s;
          }
        }
        f1[0] = 1.0 - m1;
        f0[0] = 1.0 - m0;
        if (f1[0] >= 0.0 && f0[0] >= 0.0) law(std::move(f1), std::move(f0), std::move(r));
      }
      // Branch 2: outcome side at t/2 with the prevalence shifts spread thin.
      if (k >= 3) {
        const double eps = 1e-7;
        const int n_pos = (k - 1) / 2, n_neg = (k - 1) - n_pos;
        const double a_pos = 1.0 / n_pos, a_neg = 1.0 / n_neg;
        std::vector<double> f1(static_cast<std::size_t>(k), eps);
        std::vector<double> f0(static_cast<std::size_t>(k), eps);
        std::vector<double> r(static_cast<std::size_t>(k), 0.5);
        const double b = t / 2.0;
        for (int j = 1; j < k; ++j) {
          if (j <= n_pos) {
            f1[j] = a_pos * (1.0 - k * eps) + eps;
            r[j] = 0.5 + b;
          } else {
            f0[j] = a_neg * (1.0 - k * eps) + eps;
            r[j] = 0.5 - b;
          }
        }
        law(std::move(f1), std::move(f0), std::move(r));
      }
      break;
    }
    case ConditionTag::T3_B: {
      // All mass leaves the reference level under exposure; every outcome
      // contrast equals the full difference.
      const double z = (1.0 - t) / 2.0;
      law(filled(0.0, 1.0 / (k - 1)), filled(1.0, 0.0), filled(z, z + t));
      break;
    }
    case ConditionTag::T3_MAXAB: {
      const double s = std::sqrt(t / (k - 1));
      if ((k - 1) * s <= 1.0)
        law(filled(1.0 - (k - 1) * s, s), filled(1.0, 0.0),
            filled((1.0 - s) / 2.0, (1.0 + s) / 2.0));
      const double z = (1.0 - t) / 2.0;
      law(filled(0.0, 1.0 / (k - 1)), filled(1.0, 0.0), filled(z, z + t));
      break;
    }
    case ConditionTag::LEE_MAX: {
      // Interior optimum: exposure odds spread and risk spread both equal the
      // threshold. Levels past the second replicate the reference level.
      const double m = lee_max_threshold(t);
      const double share = 1.0 / (k - 1);
      std::vector<double> f1(static_cast<std::size_t>(k), 0.5 * share);
      std::vector<double> f0(static_cast<std::size_t>(k), (m / (m + 1.0)) * share);
      std::vector<double> r(static_cast<std::size_t>(k), 0.9 / m);
      f1[1] = 0.5;
      f0[1] = 1.0 / (m + 1.0);
      r[1] = 0.9;
      law(std::move(f1), std::move(f0), std::move(r));
      break;
    }
    case ConditionTag::LEE_MIN: {
      // The exposure-odds spread tends to the threshold as the off-reference
      // mass thins and the risk spread blows up; both knobs are pushed far
      // enough that the residual is inside tolerance.
      const double w = 1e-3, big = 1e8;
      const double v = (t * (1.0 + (big - 1.0) * w) - 1.0) / (big - 1.0);
      if (v > 0.0 && v < 1.0) {
        const double share = 1.0 / (k - 1);
        std::vector<double> f1(static_cast<std::size_t>(k), (1.0 - v) * share);
        std::vector<double> f0(static_cast<std::size_t>(k), (1.0 - w) * share);
        std::vector<double> r(static_cast<std::size_t>(k), 0.9 / big);
        f1[1] = v;
        f0[1] = w;
        r[1] = 0.9;
        law(std::move(f1), std::move(f0), std::move(r));
      }
      break;
    }
    default:
      break;
  }
  return seeds;
}

}  // namespace detail

// Search for a null law that reproduces target_observed while minimizing the
// condition's left side. Closed-form equality configurations are planted as
// starts, then refined by derivative-free coordinate descent with shrinking
// steps; the remaining budget goes to random restarts. budget counts
// objective evaluations (decode attempts included).
inline SearchResult attain_bound(ConditionTag tag, double target_observed, int k,
                                 AssumptionLevel assumption, std::int64_t budget = 100000,
                                 std::uint64_t seed = kDefaultSeed) {
  if (!has_sharpness_claim(tag))
    throw precondition_error(std::string("attain_bound: no sharpness claim for ") +
                             std::string(tag_name(tag)));
  require_applicable(tag, k, assumption);
  if (tag_scale(tag) == Scale::RelativeRisk) {
    if (!(target_observed > 1.0))
      throw precondition_error("attain_bound: ratio-scale target must exceed 1");
  } else if (!(target_observed > 0.0 && target_observed <= 1.0)) {
    throw precondition_error("attain_bound: difference-scale target must lie in (0,1]");
  }

  detail::SearchSpace space{tag, k, assumption, target_observed};
  SearchResult result;
  result.tag = tag;
  result.k = k;
  result.assumption = assumption;
  result.target = target_observed;
  result.bound = threshold_value(tag, target_observed, k);

  std::vector<double> best_x;
  JointLaw scratch;
  std::int64_t used = 0;
  const auto objective = [&](const std::vector<double>& x) {
    ++used;
    if (!space.decode(x, scratch)) return kInf;
    return evaluate_tag(tag, scratch).lhs;
  };
  const auto consider = [&](const std::vector<double>& x, double value) {
    if (value < result.achieved) {
      result.achieved = value;
      best_x = x;
    }
  };

  // Derivative-free refinement: per-coordinate steps proportional to the box,
  // halved whenever a full sweep makes no progress.
  const auto refine = [&](std::vector<double> x, double value, std::int64_t slice) {
    const std::int64_t stop = std::min(budget, used + slice);
    double step = 0.25;
    while (used < stop && step > 1e-10) {
      bool improved = false;
      for (int i = 0; i < space.size() && used < stop; ++i) {
        double lo, hi;
        space.box(i, lo, hi);
        const double h = step * (hi - lo);
        for (const double dir : {+1.0, -1.0}) {
          const double moved = std::clamp(x[static_cast<std::size_t>(i)] + dir * h, lo, hi);
          if (moved == x[static_cast<std::size_t>(i)]) continue;
          const double old = x[static_cast<std::size_t>(i)];
          x[static_cast<std::size_t>(i)] = moved;
          const double trial = objective(x);
          if (trial < value) {
            value = trial;
            improved = true;
            break;
          }
          x[static_cast<std::size_t>(i)] = old;
          if (used >= stop) break;
        }
      }
      if (!improved) step *= 0.5;
    }
    consider(x, value);
  };

  const std::vector<JointLaw> seeds = detail::sharpness_seeds(tag, target_observed, k);
  const std::int64_t seed_slice =
      seeds.empty() ? 0 : std::max<std::int64_t>(budget / (2 * static_cast<std::int64_t>(seeds.size())), 1);
  for (const JointLaw& planted : seeds) {
    if (used >= budget) break;
    const std::vector<double> x = space.encode(planted);
    const double value = objective(x);
    consider(x, value);
    if (value < kInf) refine(x, value, seed_slice);
  }

  RandomStream rng(substream_seed(seed, 0));
  std::vector<double> x(static_cast<std::size_t>(space.size()));
  while (used < budget) {
    for (int i = 0; i < space.size(); ++i) {
      double lo, hi;
      space.box(i, lo, hi);
      x[static_cast<std::size_t>(i)] = rng.uniform(lo, hi);
    }
    const double value = objective(x);
    consider(x, value);
    if (value < kInf && value < result.achieved * 1.5) refine(x, value, 1500);
  }

  result.evaluations = used;
  result.budget_exhausted = used >= budget;
  if (!best_x.empty()) {
    space.decode(best_x, result.best_law);
    result.best_law.validate();
    result.relative_gap = (result.achieved - result.bound) / result.bound;
  }
  return result;
}

// Hunt for a null law permitted by the weaker condition's assumptions that
// breaks the claimed condition's bound; finding one proves the claimed bound
// really needs its extra assumption. cfg fixes what the sampled laws satisfy
// (so a monotone cfg is expected to yield nothing against the monotone
// bounds). Margins are strict on both sides: the returned law's left side
// sits strictly between the weaker and the claimed threshold.
inline std::optional<JointLaw> counterexample_hunt(ConditionTag weaker, ConditionTag claimed,
                                                   const SamplerConfig& cfg) {
  cfg.validate();
  if (weaker == claimed) return std::nullopt;
  require_applicable(weaker, cfg.k, cfg.assumption);
  constexpr double kMargin = 1e-6;

  const auto admissible = [&](const JointLaw& law) -> bool {
    const TagEvaluation claim_ev = evaluate_tag(claimed, law);
    if (!claim_ev.usable) return false;
    const bool ratio = tag_scale(claimed) == Scale::RelativeRisk;
    if (claim_ev.observed < (ratio ? 1.0 + kMargin : kMargin)) return false;
    const double claim_thr = threshold_value(claimed, claim_ev.observed, cfg.k);
    if (!(claim_ev.lhs < claim_thr * (1.0 - kMargin))) return false;
    const TagEvaluation weak_ev = evaluate_tag(weaker, law);
    const double weak_thr = threshold_value(weaker, weak_ev.observed, cfg.k);
    return weak_ev.usable && weak_ev.lhs > weak_thr * (1.0 + kMargin);
  };

  RandomStream rng(substream_seed(cfg.seed, 0));
  JointLaw law;
  for (std::int64_t i = 0; i < cfg.n_samples; ++i) {
    // Interleave constructed candidates among the random draws: disjoint
    // off-reference supports with a thin reference level push the outcome
    // contrast just above half the risk difference, exactly the region where
    // a claimed full-difference bound is most breakable.
    if (i % 8 == 0 && !cfg.assumption.monotone && cfg.k >= 3 &&
        tag_scale(claimed) == Scale::RiskDifference) {
      const double rd = rng.uniform(0.05, 0.9);
      const double eps = rng.uniform(1e-4, 1e-2);
      const double z = rng.uniform(0.45, 0.55);
      JointLaw p;
      p.k = cfg.k;
      p.p_e = rng.uniform(0.2, 0.8);
      p.f1.assign(static_cast<std::size_t>(cfg.k), eps);
      p.f0.assign(static_cast<std::size_t>(cfg.k), eps);
      p.f1[1] = 1.0 - (cfg.k - 1) * eps;
      p.f0[2] = 1.0 - (cfg.k - 1) * eps;
      const double b = rd / (2.0 * (1.0 - cfg.k * eps));
      p.r.assign(static_cast<std::size_t>(cfg.k), z);
      p.r[1] = z + b;
      p.r[2] = z - b;
      p.r_star = p.r;
      if (admissible(p)) return p;
    }
    sample_null_law_into(cfg, rng, law);
    if (admissible(law)) return law;
  }
  return std::nullopt;
}

// --- suite assembly ----------------------------------------------------------

// The canonical (tag, assumption) cells exercised at a given confounder
// cardinality: every applicable tag under each null it claims to cover, with
// monotonicity granted exactly where the tag requires it.
inline std::vector<std::pair<ConditionTag, AssumptionLevel>> necessity_cells(int k) {
  std::vector<std::pair<ConditionTag, AssumptionLevel>> cells;
  for (ConditionTag tag : kAllConditionTags) {
    const bool mono = tag == ConditionTag::T3_A || tag == ConditionTag::T3_B ||
                      tag == ConditionTag::T3_MAXAB;
    for (NullKind null : {NullKind::ConditionalNull, NullKind::AverageNull}) {
      const AssumptionLevel a{null, mono};
      if (condition_applicable(tag, k, a)) cells.emplace_back(tag, a);
    }
  }
  return cells;
}

struct VerifySummary {
  std::uint64_t seed = kDefaultSeed;
  int k = 2;
  std::int64_t n = 0;
  std::int64_t boundary_n = 0;
  std::int64_t budget = 0;
  double threshold_scale = 1.0;
  std::vector<NecessityReport> necessity;
  std::vector<SearchResult> sharpness;

  bool necessity_violated() const {
    for (const NecessityReport& r : necessity)
      if (r.violations > 0) return true;
    return false;
  }
  bool sharpness_gap() const {
    for (const SearchResult& r : sharpness)
      if (!(r.relative_gap <= sharpness_tolerance(r.tag))) return true;
    return false;
  }
  const char* overall() const {
    if (necessity_violated()) return "necessity-violation";
    if (sharpness_gap()) return "sharpness-gap";
    return "ok";
  }
};

struct VerifyConfig {
  std::uint64_t seed = kDefaultSeed;
  int k = 2;
  std::int64_t n = 100000;
  std::int64_t boundary_n = 20000;  // 0 disables the boundary pass
  std::int64_t budget = 100000;
  double threshold_scale = 1.0;
  int workers = 0;

  void validate() const {
    if (k < 2) throw validation_error("VerifyConfig: k must be at least 2");
    if (n < 1) throw validation_error("VerifyConfig: n must be at least 1");
    if (boundary_n < 0) throw validation_error("VerifyConfig: boundary_n must be non-negative");
    if (budget < 1) throw validation_error("VerifyConfig: budget must be at least 1");
    if (!(threshold_scale > 0.0))
      throw validation_error("VerifyConfig: threshold_scale must be positive");
  }
};

// Necessity across every cell at cfg.k (bulk plus boundary sampling), then a
// sharpness search for each bound with an attainability claim. Default
// targets sit inside the branch regime that k itself allows.
inline VerifySummary run_verify_suite(const VerifyConfig& cfg) {
  cfg.validate();
  VerifySummary summary;
  summary.seed = cfg.seed;
  summary.k = cfg.k;
  summary.n = cfg.n;
  summary.boundary_n = cfg.boundary_n;
  summary.budget = cfg.budget;
  summary.threshold_scale = cfg.threshold_scale;

  for (const auto& [tag, assumption] : necessity_cells(cfg.k)) {
    SamplerConfig sampler;
    sampler.seed = cfg.seed;
    sampler.n_samples = cfg.n;
    sampler.k = cfg.k;
    sampler.assumption = assumption;
    sampler.workers = cfg.workers;
    summary.necessity.push_back(verify_necessity(sampler, tag, cfg.threshold_scale));
    if (cfg.boundary_n > 0) {
      sampler.boundary = true;
      sampler.n_samples = cfg.boundary_n;
      summary.necessity.push_back(verify_necessity(sampler, tag, cfg.threshold_scale));
    }
  }

  for (ConditionTag tag : kAllConditionTags) {
    if (!has_sharpness_claim(tag)) continue;
    const bool mono = tag == ConditionTag::T3_A || tag == ConditionTag::T3_B ||
                      tag == ConditionTag::T3_MAXAB;
    const AssumptionLevel assumption{NullKind::ConditionalNull, mono};
    if (!condition_applicable(tag, cfg.k, assumption)) continue;
    const double target = tag_scale(tag) == Scale::RelativeRisk ? 2.0 : 0.2;
    summary.sharpness.push_back(attain_bound(tag, target, cfg.k, assumption, cfg.budget, cfg.seed));
  }
  return summary;
}

// --- rendering ----------------------------------------------------------------

inline std::string to_machine_text(const VerifySummary& s) {
  std::string out;
  out += "schema=cornfield.verify.v1\n";
  out += "seed=" + std::to_string(s.seed) + "\n";
  out += "k=" + std::to_string(s.k) + "\n";
  out += "n=" + std::to_string(s.n) + "\n";
  out += "boundary_n=" + std::to_string(s.boundary_n) + "\n";
  out += "budget=" + std::to_string(s.budget) + "\n";
  out += "threshold_scale=" + format_full(s.threshold_scale) + "\n";
  for (const NecessityReport& r : s.necessity) {
    out += "necessity\ttag=" + std::string(tag_name(r.tag));
    out += std::string("\tassumption=") + null_kind_name(r.cfg.assumption.null);
    out += std::string("\tmonotone=") + (r.cfg.assumption.monotone ? "1" : "0");
    out += std::string("\tboundary=") + (r.cfg.boundary ? "1" : "0");
    out += "\tevaluated=" + std::to_string(r.evaluated);
    out += "\tskipped=" + std::to_string(r.skipped);
    out += "\tviolations=" + std::to_string(r.violations);
    out += "\tworst_slack=" + format_full(r.worst_slack);
    out += "\n";
  }
  for (const SearchResult& r : s.sharpness) {
    out += "sharpness\ttag=" + std::string(tag_name(r.tag));
    out += std::string("\tassumption=") + null_kind_name(r.assumption.null);
    out += std::string("\tmonotone=") + (r.assumption.monotone ? "1" : "0");
    out += "\ttarget=" + format_full(r.target);
    out += "\tbound=" + format_full(r.bound);
    out += "\tachieved=" + format_full(r.achieved);
    out += "\trelative_gap=" + format_full(r.relative_gap);
    out += "\tevaluations=" + std::to_string(r.evaluations);
    out += std::string("\tbudget_exhausted=") + (r.budget_exhausted ? "1" : "0");
    out += "\n";
  }
  out += std::string("overall=") + s.overall() + "\n";
  return out;
}

inline std::string to_human_text(const VerifySummary& s) {
  std::string out;
  out += "verification run: seed " + std::to_string(s.seed) + ", k=" + std::to_string(s.k) +
         ", n=" + std::to_string(s.n) + " per cell";
  if (s.boundary_n > 0) out += " (+" + std::to_string(s.boundary_n) + " boundary)";
  out += "\n\nnecessity (left side >= threshold on every sampled null law):\n";
  for (const NecessityReport& r : s.necessity) {
    out += "  " + std::string(tag_name(r.tag)) + " " + null_kind_name(r.cfg.assumption.null);
    if (r.cfg.assumption.monotone) out += " monotone";
    if (r.cfg.boundary) out += " boundary";
    out += ": " + std::to_string(r.violations) + " violations";
    out += ", worst slack " + format_short(r.worst_slack) + "\n";
  }
  out += "\nsharpness (search drives the left side down to the bound):\n";
  for (const SearchResult& r : s.sharpness) {
    out += "  " + std::string(tag_name(r.tag)) + " at " + format_short(r.target) + ": bound " +
           format_short(r.bound) + ", achieved " + format_short(r.achieved) + ", relative gap " +
           format_short(r.relative_gap) + "\n";
  }
  out += std::string("\noverall: ") + s.overall() + "\n";
  return out;
}

}  // namespace cornfield
