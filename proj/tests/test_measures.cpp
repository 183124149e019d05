#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cornfield/measures.hpp"

using namespace cornfield;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TwoByTwo table(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return TwoByTwo{a, b, c, d};
}

}  // namespace

TEST_CASE("risks and measures from hand-checked counts") {
  // 17/100 exposed cases vs 10/100 unexposed: rr 1.7, rd 0.07.
  const TwoByTwo t = table(17, 83, 10, 90);
  CHECK_THAT(risk_exposed(t), WithinAbs(0.17, 1e-15));
  CHECK_THAT(risk_unexposed(t), WithinAbs(0.10, 1e-15));
  REQUIRE(relative_risk(t).has_value());
  CHECK_THAT(*relative_risk(t), WithinRel(1.7, 1e-12));
  CHECK_THAT(risk_difference(t), WithinAbs(0.07, 1e-12));

  const AssociationMeasures m = association_measures(t);
  CHECK_THAT(*m.rr_ed, WithinRel(1.7, 1e-12));
  CHECK_THAT(m.rd_ed, WithinAbs(0.07, 1e-12));
}

TEST_CASE("degenerate margins and zero-risk cells") {
  CHECK_THROWS_AS(risk_exposed(table(0, 0, 1, 9)), precondition_error);
  CHECK_THROWS_AS(risk_unexposed(table(1, 9, 0, 0)), precondition_error);

  // Cases only among the exposed: ratio is +infinity, difference is finite.
  const TwoByTwo exposed_only = table(5, 5, 0, 10);
  REQUIRE(relative_risk(exposed_only).has_value());
  CHECK(*relative_risk(exposed_only) == kInf);
  CHECK_THAT(risk_difference(exposed_only), WithinAbs(0.5, 1e-15));

  // No cases anywhere: the ratio is undefined, not 1.
  CHECK_FALSE(relative_risk(table(0, 10, 0, 10)).has_value());
  CHECK(association_measures(table(0, 10, 0, 10)).rd_ed == 0.0);
}

TEST_CASE("table validation rejects negative counts") {
  CHECK_THROWS_AS(table(-1, 2, 3, 4).validate(), validation_error);
  CHECK_NOTHROW(table(0, 0, 0, 0).validate());

  StratifiedTable one_level;
  one_level.strata = {table(1, 1, 1, 1)};
  CHECK_THROWS_AS(one_level.validate(), validation_error);
}

TEST_CASE("pooled stratified counts are per-cell sums") {
  StratifiedTable st;
  st.strata = {table(1, 2, 3, 4), table(10, 20, 30, 40)};
  const TwoByTwo p = st.pooled();
  CHECK(p == table(11, 22, 33, 44));
  CHECK(st.k() == 2);
}

TEST_CASE("flipping the exposure inverts ratios and negates differences") {
  AssociationMeasures m;
  m.rr_ed = 2.5;
  m.rd_ed = 0.3;
  m.rr_eu = 4.0;
  m.rd_eu = -0.1;
  m.rd_ud_given_e1 = 0.2;
  m.rd_ud_given_e0 = 0.05;

  const AssociationMeasures f = flip_exposure(m);
  CHECK_THAT(*f.rr_ed, WithinRel(0.4, 1e-15));
  CHECK(f.rd_ed == -0.3);
  CHECK_THAT(*f.rr_eu, WithinRel(0.25, 1e-15));
  CHECK(*f.rd_eu == 0.1);
  CHECK(*f.rd_ud_given_e1 == 0.05);
  CHECK(*f.rd_ud_given_e0 == 0.2);

  // Double flip returns to the start up to floating-point inversion noise.
  const AssociationMeasures ff = flip_exposure(f);
  CHECK_THAT(*ff.rr_ed, WithinRel(*m.rr_ed, 1e-12));
  CHECK(ff.rd_ed == m.rd_ed);
  CHECK(*ff.rd_ud_given_e1 == *m.rd_ud_given_e1);
}

TEST_CASE("orienting puts rr_ed at or above one and is idempotent") {
  std::mt19937_64 rng(91);
  for (int i = 0; i < 500; ++i) {
    const TwoByTwo t = table(1 + static_cast<std::int64_t>(rng() % 50), 1 + rng() % 50,
                             1 + rng() % 50, 1 + rng() % 50);
    const auto [oriented, flipped] = orient_exposure(association_measures(t));
    REQUIRE(oriented.rr_ed.has_value());
    CHECK(*oriented.rr_ed >= 1.0);

    // A second orientation must be a bitwise no-op, flips included.
    const auto [again, flipped_again] = orient_exposure(oriented);
    CHECK_FALSE(flipped_again);
    CHECK(*again.rr_ed == *oriented.rr_ed);
    CHECK(again.rd_ed == oriented.rd_ed);

    // The flip flag tells exactly whether the raw ratio was below one.
    CHECK(flipped == (*association_measures(t).rr_ed < 1.0));
  }
}

TEST_CASE("orientation requires a defined ratio") {
  CHECK_THROWS_AS(orient_exposure(association_measures(table(0, 10, 0, 10))),
                  precondition_error);
}
