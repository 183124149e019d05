#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cornfield/distribution.hpp"

using namespace cornfield;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Binary confounder, conditional null: exposed shift U toward level 1, level
// 1 triples the risk. p(E=1|U) and spreads are hand-computable.
JointLaw binary_null_law() {
  return make_joint_law(2, 0.5, {0.2, 0.8}, {0.6, 0.4}, {0.1, 0.3}, {0.1, 0.3});
}

}  // namespace

TEST_CASE("law validation catches every malformed shape") {
  JointLaw law = binary_null_law();
  CHECK_NOTHROW(law.validate());

  JointLaw bad = law;
  bad.p_e = 0.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = law;
  bad.p_e = 1.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);

  bad = law;
  bad.f1 = {0.3, 0.3};
  CHECK_THROWS_AS(bad.validate(), validation_error);

  bad = law;
  bad.r[1] = 1.5;
  CHECK_THROWS_AS(bad.validate(), validation_error);

  bad = law;
  bad.r_star.pop_back();
  CHECK_THROWS_AS(bad.validate(), validation_error);

  // A level with zero mass in both arms is degenerate.
  CHECK_THROWS_AS(
      make_joint_law(3, 0.5, {0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}),
      validation_error);
  CHECK_THROWS_AS(make_joint_law(1, 0.5, {1.0}, {1.0}, {0.1}, {0.1}), validation_error);
}

TEST_CASE("summary quantities match hand-worked arithmetic") {
  const JointLaw law = binary_null_law();
  const ConfounderSummary s = summarize(law);

  // pr(U=1) = .5*.8 + .5*.4 = 0.6; p[1] = .5*.8/.6 = 2/3, q[1] = 2.
  CHECK_THAT(law.level_mass(1), WithinAbs(0.6, 1e-15));
  CHECK_THAT(s.p[1], WithinRel(2.0 / 3.0, 1e-14));
  CHECK_THAT(s.q[1], WithinRel(2.0, 1e-14));
  // p[0] = .5*.2/.4 = 1/4, q[0] = 1/3; u_e = 2 / (1/3) = 6.
  CHECK_THAT(s.q[0], WithinRel(1.0 / 3.0, 1e-14));
  CHECK_THAT(s.u_e, WithinRel(6.0, 1e-14));

  CHECK_THAT(s.alpha[1], WithinAbs(0.4, 1e-15));
  CHECK_THAT(s.beta0[1], WithinAbs(0.2, 1e-15));
  CHECK_THAT(s.u_d, WithinRel(3.0, 1e-14));
  CHECK_THAT(s.u_d_star, WithinRel(3.0, 1e-14));
  CHECK(s.u_d_prime == std::max(s.u_d, s.u_d_star));
  CHECK_THAT(s.a_max, WithinAbs(0.4, 1e-15));
  CHECK_THAT(s.b_max, WithinAbs(0.2, 1e-15));
}

TEST_CASE("spread ratios treat ties and zeros as documented") {
  // All-equal risks spread to exactly 1 even when all are zero.
  const JointLaw flat =
      make_joint_law(2, 0.3, {0.5, 0.5}, {0.5, 0.5}, {0.0, 0.0}, {0.0, 0.0});
  const ConfounderSummary s = summarize(flat);
  CHECK(s.u_d == 1.0);
  CHECK(s.u_d_star == 1.0);

  // A zero below a positive risk spreads to infinity.
  const JointLaw zero_low =
      make_joint_law(2, 0.3, {0.5, 0.5}, {0.5, 0.5}, {0.0, 0.2}, {0.0, 0.2});
  CHECK(summarize(zero_low).u_d == kInf);
}

TEST_CASE("marginal measures collapse the law to a 2x2 view") {
  const JointLaw law = binary_null_law();
  const AssociationMeasures m = marginal_measures(law);

  // risk1 = .2*.1 + .8*.3 = 0.26, risk0 = .6*.1 + .4*.3 = 0.18.
  CHECK_THAT(m.rd_ed, WithinAbs(0.08, 1e-15));
  CHECK_THAT(*m.rr_ed, WithinRel(0.26 / 0.18, 1e-14));
  CHECK_THAT(*m.rr_eu, WithinRel(2.0, 1e-14));
  CHECK_THAT(*m.rd_eu, WithinAbs(0.4, 1e-15));
  CHECK(*m.rd_ud_given_e1 == law.r_star[1] - law.r_star[0]);
  CHECK(*m.rd_ud_given_e0 == law.r[1] - law.r[0]);
}

TEST_CASE("null checks distinguish conditional from average") {
  CHECK(check_conditional_null(binary_null_law()));
  CHECK(check_average_null(binary_null_law()));

  // r_star != r level-wise but the mass-weighted average effect is zero.
  // masses: pr(U=0) = pr(U=1) = 0.5, effects +0.1 and -0.1.
  const JointLaw avg =
      make_joint_law(2, 0.5, {0.5, 0.5}, {0.5, 0.5}, {0.3, 0.1}, {0.2, 0.2});
  CHECK_FALSE(check_conditional_null(avg));
  CHECK(check_average_null(avg, 1e-12));

  JointLaw off = avg;
  off.r_star[0] = 0.31;
  CHECK_FALSE(check_average_null(off, 1e-9));
}

TEST_CASE("monotonicity is judged against the chosen reference") {
  // alpha = (-0.4, +0.4): monotone with reference 0, not with reference 1.
  const ConfounderSummary s = summarize(binary_null_law());
  CHECK(check_monotone(s, 0));
  CHECK_FALSE(check_monotone(s, 1));
  CHECK_THROWS_AS(check_monotone(s, 2), precondition_error);
}

TEST_CASE("level relabeling and arm flips preserve the invariants that matter") {
  const JointLaw law =
      make_joint_law(3, 0.4, {0.2, 0.5, 0.3}, {0.5, 0.25, 0.25}, {0.1, 0.2, 0.4}, {0.1, 0.2, 0.4});
  const ConfounderSummary s = summarize(law);

  const JointLaw relabeled = relabel_reference(law, 2);
  CHECK_NOTHROW(relabeled.validate());
  const ConfounderSummary rs = summarize(relabeled);
  // Spreads are label-free; betas move with the reference.
  CHECK_THAT(rs.u_e, WithinRel(s.u_e, 1e-14));
  CHECK_THAT(rs.u_d, WithinRel(s.u_d, 1e-14));
  CHECK_THAT(rs.beta0[2], WithinAbs(-0.3, 1e-15));

  const JointLaw fe = flip_exposure(law);
  CHECK_NOTHROW(fe.validate());
  CHECK(check_conditional_null(fe));
  CHECK_THAT(summarize(fe).u_e, WithinRel(s.u_e, 1e-12));
  CHECK_THAT(marginal_measures(fe).rd_ed, WithinAbs(-marginal_measures(law).rd_ed, 1e-15));

  const JointLaw fo = flip_outcome(law);
  CHECK_NOTHROW(fo.validate());
  CHECK(check_conditional_null(fo));
  CHECK(summarize(fo).a_max == s.a_max);
  CHECK_THAT(summarize(fo).b_max, WithinAbs(s.b_max, 1e-15));
  CHECK_THAT(marginal_measures(fo).rd_ed, WithinAbs(-marginal_measures(law).rd_ed, 1e-15));
}

TEST_CASE("average-null risk difference equals its confounder decomposition") {
  // Hand-built average null at k=3 with distinct arm curves.
  // masses must weight (r_star - r) to zero.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    JointLaw law;
    law.k = 3;
    law.p_e = unif(rng);
    law.f1 = {0.0, 0.0, 0.0};
    law.f0 = {0.0, 0.0, 0.0};
    double s1 = 0.0, s0 = 0.0;
    for (int j = 0; j < 3; ++j) {
      law.f1[j] = unif(rng);
      law.f0[j] = unif(rng);
      s1 += law.f1[j];
      s0 += law.f0[j];
    }
    for (int j = 0; j < 3; ++j) {
      law.f1[j] /= s1;
      law.f0[j] /= s0;
    }
    law.r = {unif(rng), unif(rng), unif(rng)};
    law.r_star = law.r;
    // Perturb two levels against each other to keep the average at zero.
    const double m0 = law.level_mass(0), m1 = law.level_mass(1);
    const double eps = 0.04 * unif(rng);
    law.r_star[0] += eps;
    law.r_star[1] -= eps * m0 / m1;
    if (law.r_star[0] > 1.0 || law.r_star[1] < 0.0) continue;
    law.validate();
    REQUIRE(check_average_null(law, 1e-12));

    const double direct = marginal_measures(law).rd_ed;
    CHECK_THAT(lemma1_decomposition(law, 1e-12), WithinAbs(direct, 1e-13));
  }

  CHECK_THROWS_AS(
      lemma1_decomposition(make_joint_law(2, 0.5, {0.5, 0.5}, {0.5, 0.5}, {0.4, 0.4}, {0.1, 0.1})),
      precondition_error);
}

TEST_CASE("text round trip reproduces a law bit for bit") {
  const JointLaw law = make_joint_law(3, 1.0 / 3.0, {0.125, 0.375, 0.5},
                                      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                                      {0.1, 0.0123456789012345678, 0.99},
                                      {0.1, 0.2, 1.0 / 7.0});
  const std::string text = to_text(law);
  const JointLaw back = joint_law_from_text(text);
  CHECK(back.k == law.k);
  CHECK(back.p_e == law.p_e);
  CHECK(back.f1 == law.f1);
  CHECK(back.f0 == law.f0);
  CHECK(back.r_star == law.r_star);
  CHECK(back.r == law.r);

  // Comments and blank lines are tolerated; junk is not.
  CHECK_NOTHROW(joint_law_from_text("# header\n\n" + text));
  CHECK_THROWS_AS(joint_law_from_text("k = banana\n"), parse_error);
  CHECK_THROWS_AS(joint_law_from_text(text + "mystery = 3\n"), parse_error);
}
