#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "cornfield/oracle.hpp"

using namespace cornfield;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SamplerConfig cfg_of(int k, NullKind null, bool monotone = false) {
  SamplerConfig cfg;
  cfg.k = k;
  cfg.assumption = {null, monotone};
  return cfg;
}

}  // namespace

TEST_CASE("random streams are deterministic and substreams are distinct") {
  RandomStream a(99), b(99), c(100);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    CHECK(u == b.uniform01());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(c.uniform01() != RandomStream(99).uniform01());

  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(substream_seed(42, i));
  CHECK(seeds.size() == 10000);
  CHECK(substream_seed(42, 0) != substream_seed(43, 0));
}

TEST_CASE("sampled laws are valid and satisfy the requested null exactly") {
  for (const NullKind null : {NullKind::ConditionalNull, NullKind::AverageNull}) {
    for (const int k : {2, 3, 5}) {
      for (const bool boundary : {false, true}) {
        SamplerConfig cfg = cfg_of(k, null);
        cfg.boundary = boundary;
        RandomStream rng(substream_seed(7, k + (boundary ? 100 : 0)));
        for (int i = 0; i < 300; ++i) {
          const JointLaw law = sample_null_law(cfg, rng);
          law.validate();
          if (null == NullKind::ConditionalNull)
            CHECK(check_conditional_null(law, 0.0));
          else
            CHECK(check_average_null(law, 1e-12));
        }
      }
    }
  }
}

TEST_CASE("monotone sampling keeps every prevalence shift nonnegative") {
  SamplerConfig cfg = cfg_of(4, NullKind::AverageNull, true);
  RandomStream rng(3);
  for (int i = 0; i < 300; ++i) {
    const JointLaw law = sample_null_law(cfg, rng);
    const ConfounderSummary s = summarize(law);
    for (int j = 1; j < law.k; ++j) CHECK(s.alpha[j] >= 0.0);
    CHECK(check_average_null(law, 1e-12));
  }
}

TEST_CASE("identical configs reproduce identical laws") {
  SamplerConfig cfg = cfg_of(3, NullKind::AverageNull);
  RandomStream r1(11), r2(11);
  for (int i = 0; i < 50; ++i) {
    const JointLaw a = sample_null_law(cfg, r1);
    const JointLaw b = sample_null_law(cfg, r2);
    CHECK(to_text(a) == to_text(b));
  }
}

TEST_CASE("applicability matrix") {
  const AssumptionLevel cond{NullKind::ConditionalNull, false};
  const AssumptionLevel avg{NullKind::AverageNull, false};
  const AssumptionLevel mono{NullKind::AverageNull, true};

  CHECK(condition_applicable(ConditionTag::C1_RR_EU, 2, cond));
  CHECK(condition_applicable(ConditionTag::C1_RR_EU, 2, avg));
  CHECK_FALSE(condition_applicable(ConditionTag::C1_RR_EU, 3, cond));
  CHECK(condition_applicable(ConditionTag::C2_RR_UD, 2, cond));
  CHECK_FALSE(condition_applicable(ConditionTag::C2_RR_UD, 2, avg));
  CHECK(condition_applicable(ConditionTag::C_RR_A1_MAXUD, 2, avg));
  CHECK(condition_applicable(ConditionTag::LEE_MIN, 2, avg));
  CHECK(condition_applicable(ConditionTag::LEE_MAX, 6, cond));
  CHECK(condition_applicable(ConditionTag::T1_MIN, 2, avg));
  CHECK_FALSE(condition_applicable(ConditionTag::T1_MAX, 3, cond));
  CHECK_FALSE(condition_applicable(ConditionTag::T2_B, 2, cond));
  CHECK(condition_applicable(ConditionTag::T2_B, 3, cond));
  CHECK_FALSE(condition_applicable(ConditionTag::T3_B, 3, avg));
  CHECK(condition_applicable(ConditionTag::T3_B, 2, mono));

  CHECK_THROWS_AS(require_applicable(ConditionTag::T2_A, 2, cond), precondition_error);
  RandomStream rng(1);
  const JointLaw three_level = sample_null_law(cfg_of(3, NullKind::ConditionalNull), rng);
  CHECK_THROWS_AS(evaluate_tag(ConditionTag::T1_MIN, three_level), precondition_error);
}

TEST_CASE("evaluate_tag reads hand-computed left sides off a law") {
  // Conditional null, k=2: q = (1/3, 2), u_e = 6; r spreads 0.1 to 0.3.
  const JointLaw law = make_joint_law(2, 0.5, {0.2, 0.8}, {0.6, 0.4}, {0.1, 0.3}, {0.1, 0.3});

  const TagEvaluation c1 = evaluate_tag(ConditionTag::C1_RR_EU, law);
  REQUIRE(c1.usable);
  CHECK_THAT(c1.observed, WithinRel(0.26 / 0.18, 1e-13));
  CHECK_THAT(c1.lhs, WithinRel(2.0, 1e-13));

  const TagEvaluation c2 = evaluate_tag(ConditionTag::C2_RR_UD, law);
  CHECK_THAT(c2.lhs, WithinRel(3.0, 1e-13));

  CHECK_THAT(evaluate_tag(ConditionTag::LEE_MIN, law).lhs, WithinRel(3.0, 1e-13));
  CHECK_THAT(evaluate_tag(ConditionTag::LEE_MAX, law).lhs, WithinRel(6.0, 1e-13));

  const TagEvaluation t1min = evaluate_tag(ConditionTag::T1_MIN, law);
  CHECK_THAT(t1min.observed, WithinAbs(0.08, 1e-15));
  CHECK_THAT(t1min.lhs, WithinAbs(0.2, 1e-15));
  CHECK_THAT(evaluate_tag(ConditionTag::T1_MAX, law).lhs, WithinAbs(0.4, 1e-15));

  // A and B extremes at k=3.
  const JointLaw cat = make_joint_law(3, 0.4, {0.5, 0.3, 0.2}, {0.6, 0.1, 0.3},
                                      {0.2, 0.5, 0.1}, {0.2, 0.5, 0.1});
  CHECK_THAT(evaluate_tag(ConditionTag::T2_A, cat).lhs, WithinAbs(0.2, 1e-15));
  CHECK_THAT(evaluate_tag(ConditionTag::T2_B, cat).lhs, WithinAbs(0.3, 1e-15));
  CHECK_THAT(evaluate_tag(ConditionTag::T2_MAXAB, cat).lhs, WithinAbs(0.3, 1e-15));
}

TEST_CASE("evaluate_tag orients rather than assumes") {
  // rr_ed < 1 as coded: risk1 = 0.18, risk0 = 0.26. The evaluation must flip
  // the exposure, matching the flipped law evaluated without orientation.
  const JointLaw law = make_joint_law(2, 0.5, {0.6, 0.4}, {0.2, 0.8}, {0.1, 0.3}, {0.1, 0.3});
  const JointLaw flipped = flip_exposure(law);
  for (const ConditionTag tag :
       {ConditionTag::C1_RR_EU, ConditionTag::C2_RR_UD, ConditionTag::LEE_MIN,
        ConditionTag::LEE_MAX}) {
    const TagEvaluation raw = evaluate_tag(tag, law);
    const TagEvaluation ref = evaluate_tag(tag, flipped);
    REQUIRE(raw.usable);
    CHECK(raw.observed >= 1.0);
    CHECK_THAT(raw.observed, WithinRel(ref.observed, 1e-13));
    CHECK_THAT(raw.lhs, WithinRel(ref.lhs, 1e-13));
  }

  // Negative risk difference: the outcome is recoded. |rd| and the absolute
  // beta extremes survive the flip.
  const JointLaw neg = make_joint_law(3, 0.5, {0.2, 0.4, 0.4}, {0.6, 0.2, 0.2},
                                      {0.5, 0.2, 0.3}, {0.5, 0.2, 0.3});
  const TagEvaluation ev = evaluate_tag(ConditionTag::T2_B, neg);
  const double rd_raw = marginal_measures(neg).rd_ed;
  REQUIRE(rd_raw < 0.0);
  CHECK_THAT(ev.observed, WithinAbs(-rd_raw, 1e-15));
  CHECK_THAT(ev.lhs, WithinAbs(0.3, 1e-15));

  // No cases at all: the ratio-scale evaluation is unusable, not a throw.
  const JointLaw no_cases = make_joint_law(2, 0.5, {0.5, 0.5}, {0.5, 0.5}, {0.0, 0.0}, {0.0, 0.0});
  CHECK_FALSE(evaluate_tag(ConditionTag::C1_RR_EU, no_cases).usable);
  CHECK(evaluate_tag(ConditionTag::T1_MIN, no_cases).usable);
}

TEST_CASE("necessity holds on bulk samples for every applicable cell") {
  for (const int k : {2, 3}) {
    for (const auto& [tag, assumption] : necessity_cells(k)) {
      SamplerConfig cfg = cfg_of(k, assumption.null, assumption.monotone);
      cfg.n_samples = 3000;
      cfg.seed = substream_seed(2024, static_cast<std::uint64_t>(k * 100 + static_cast<int>(tag)));
      const NecessityReport report = verify_necessity(cfg, tag);
      INFO(tag_name(tag) << " k=" << k << " " << null_kind_name(assumption.null));
      CHECK(report.violations == 0);
      CHECK(report.evaluated + report.skipped == cfg.n_samples);
      CHECK(report.evaluated > 0);
      CHECK(report.worst_slack >= -report.slack_tol);
    }
  }
}

TEST_CASE("necessity results do not depend on the worker count") {
  SamplerConfig cfg = cfg_of(3, NullKind::AverageNull);
  cfg.n_samples = 9000;  // spans multiple chunks
  cfg.seed = 555;
  cfg.workers = 1;
  const NecessityReport serial = verify_necessity(cfg, ConditionTag::T2_MAXAB);
  cfg.workers = 4;
  const NecessityReport parallel = verify_necessity(cfg, ConditionTag::T2_MAXAB);
  CHECK(serial.evaluated == parallel.evaluated);
  CHECK(serial.skipped == parallel.skipped);
  CHECK(serial.violations == parallel.violations);
  CHECK(serial.worst_slack == parallel.worst_slack);
  REQUIRE(serial.worst_law.has_value());
  REQUIRE(parallel.worst_law.has_value());
  CHECK(to_text(*serial.worst_law) == to_text(*parallel.worst_law));
}

TEST_CASE("an inflated threshold is flagged, proving violations are detectable") {
  std::int64_t violations = 0;
  for (const auto& [tag, assumption] : necessity_cells(2)) {
    SamplerConfig cfg = cfg_of(2, assumption.null, assumption.monotone);
    cfg.n_samples = 4000;
    cfg.seed = 7;
    violations += verify_necessity(cfg, tag, 1.5).violations;
  }
  CHECK(violations > 0);
}

TEST_CASE("sharpness searches reach the claimed bounds") {
  const AssumptionLevel cond{NullKind::ConditionalNull, false};
  const AssumptionLevel mono{NullKind::ConditionalNull, true};

  const SearchResult t1max = attain_bound(ConditionTag::T1_MAX, 0.04, 2, cond, 20000);
  CHECK_THAT(t1max.bound, WithinRel(0.2, 1e-12));
  CHECK(t1max.relative_gap <= 1e-3);
  CHECK_THAT(marginal_measures(t1max.best_law).rd_ed, WithinAbs(0.04, 1e-9));

  const SearchResult lee = attain_bound(ConditionTag::LEE_MAX, 2.0, 2, cond, 20000);
  CHECK_THAT(lee.bound, WithinRel(5.82842712474619, 1e-12));
  CHECK(lee.relative_gap <= 1e-2);

  const SearchResult t2a = attain_bound(ConditionTag::T2_A, 0.1, 3, cond, 20000);
  CHECK_THAT(t2a.bound, WithinRel(0.05, 1e-12));
  CHECK(t2a.relative_gap <= 1e-3);

  const SearchResult t3b = attain_bound(ConditionTag::T3_B, 0.3, 3, mono, 20000);
  CHECK_THAT(t3b.bound, WithinRel(0.3, 1e-12));
  CHECK(t3b.relative_gap <= 1e-3);
  CHECK(check_monotone(summarize(t3b.best_law)));

  // The best law is returned intact and reproduces the claimed numbers.
  const TagEvaluation ev = evaluate_tag(ConditionTag::T2_A, t2a.best_law);
  CHECK_THAT(ev.observed, WithinAbs(0.1, 1e-9));
  CHECK_THAT(ev.lhs, WithinAbs(t2a.achieved, 1e-15));
}

TEST_CASE("sharpness search rejects unsupported requests") {
  const AssumptionLevel cond{NullKind::ConditionalNull, false};
  CHECK_THROWS_AS(attain_bound(ConditionTag::C1_RR_EU, 2.0, 2, cond), precondition_error);
  CHECK_THROWS_AS(attain_bound(ConditionTag::LEE_MAX, 0.9, 2, cond), precondition_error);
  CHECK_THROWS_AS(attain_bound(ConditionTag::T1_MAX, 1.5, 2, cond), precondition_error);
  CHECK_THROWS_AS(attain_bound(ConditionTag::T2_A, 0.1, 2, cond), precondition_error);
}

TEST_CASE("a hunt separates the categorical bound from its monotone sharpening") {
  SamplerConfig cfg = cfg_of(3, NullKind::ConditionalNull);
  cfg.n_samples = 20000;
  cfg.seed = 12;
  const auto witness = counterexample_hunt(ConditionTag::T2_B, ConditionTag::T3_B, cfg);
  REQUIRE(witness.has_value());
  witness->validate();
  CHECK(check_conditional_null(*witness, 1e-9));
  const TagEvaluation b = evaluate_tag(ConditionTag::T2_B, *witness);
  const double rd = b.observed;
  CHECK(b.lhs > rd / 2.0);  // the k>=3 bound survives
  CHECK(b.lhs < rd);        // the monotone-only bound fails

  // Under monotone sampling the stronger bound always holds; nothing turns up.
  SamplerConfig mono = cfg;
  mono.assumption.monotone = true;
  CHECK_FALSE(counterexample_hunt(ConditionTag::T2_B, ConditionTag::T3_B, mono).has_value());
  CHECK_FALSE(counterexample_hunt(ConditionTag::T2_B, ConditionTag::T2_B, cfg).has_value());
}

TEST_CASE("the verify suite aggregates cells and renders stably") {
  VerifyConfig cfg;
  cfg.k = 3;
  cfg.n = 500;
  cfg.boundary_n = 100;
  cfg.budget = 4000;
  cfg.seed = 9;
  const VerifySummary summary = run_verify_suite(cfg);
  CHECK(summary.overall() == std::string("ok"));
  CHECK(summary.necessity.size() == 2 * necessity_cells(3).size());
  CHECK(summary.sharpness.size() == 8);  // every claiming tag applicable at k=3
  for (const SearchResult& r : summary.sharpness)
    CHECK(r.relative_gap <= sharpness_tolerance(r.tag));

  const std::string text = to_machine_text(summary);
  CHECK(text.find("schema=cornfield.verify.v1\n") == 0);
  CHECK(text.find("overall=ok") != std::string::npos);
  // Byte-stable across identical runs.
  CHECK(to_machine_text(run_verify_suite(cfg)) == text);
}

TEST_CASE("cell enumeration matches the applicability matrix") {
  CHECK(necessity_cells(2).size() == 19);
  CHECK(necessity_cells(3).size() == 16);
  CHECK(necessity_cells(4).size() == 16);
  for (const auto& [tag, assumption] : necessity_cells(4))
    CHECK(condition_applicable(tag, 4, assumption));
}
