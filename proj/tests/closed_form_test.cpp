#include <gtest/gtest.h>

#include <random>

#include "dbounds/closed_form.hpp"
#include "dbounds/error.hpp"
#include "support/instances.hpp"

using namespace dbounds;
using synth::make_problem;

namespace {

const Measure kDD{MeasureKind::DD};
const Measure kTPRD{MeasureKind::TPRD};
const Measure kTNRD{MeasureKind::TNRD};
const Measure kPPVD{MeasureKind::PPVD};
const Measure kNPVD{MeasureKind::NPVD};

TEST(FhBounds, Examples) {
  auto b = fh_bounds(0.5, 0.5);
  EXPECT_DOUBLE_EQ(b.lower, 0.0);
  EXPECT_DOUBLE_EQ(b.upper, 0.5);
  b = fh_bounds(0.9, 0.5);
  EXPECT_NEAR(b.lower, 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(b.upper, 0.5);
  b = fh_bounds(1.0, 0.3);
  EXPECT_NEAR(b.lower, 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(b.upper, 0.3);
}

TEST(FhBounds, OrderedOnGrid) {
  for (int i = 0; i <= 50; ++i) {
    for (int j = 0; j <= 50; ++j) {
      const double s = i / 50.0, t = j / 50.0;
      const auto b = fh_bounds(s, t);
      EXPECT_LE(b.lower, b.upper);
      EXPECT_GE(b.lower, 0.0);
      EXPECT_LE(b.upper, 1.0);
    }
  }
}

TEST(DdIntervalBinary, HandDerived) {
  const auto iv = dd_interval_binary(synth::binary_dd_instance());
  EXPECT_NEAR(iv.lower, -0.5556, 1e-4);
  EXPECT_NEAR(iv.upper, 0.5556, 1e-4);
  // 0.5/0.9 exactly
  EXPECT_NEAR(iv.upper, 5.0 / 9.0, 1e-12);

  const auto id = dd_interval_binary(synth::perfect_class_instance());
  EXPECT_NEAR(id.lower, 0.4, 1e-12);
  EXPECT_NEAR(id.upper, 0.4, 1e-12);

  const auto wide = dd_interval_binary(make_problem({1.0}, {{0.5, 0.5}}, {{0.5, 0.5}}));
  EXPECT_NEAR(wide.lower, -1.0, 1e-12);
  EXPECT_NEAR(wide.upper, 1.0, 1e-12);
}

TEST(DdIntervalBinary, Errors) {
  const auto three = make_problem({1.0}, {{0.5, 0.5}}, {{0.3, 0.3, 0.4}});
  EXPECT_THROW(dd_interval_binary(three), Error);
  try {
    dd_interval_binary(make_problem({1.0}, {{0.5, 0.5}}, {{1.0, 0.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroClassPrior);
  }
}

TEST(ClassificationIntervalBinary, HandDerived) {
  const auto u = classification_interval_binary(synth::uniform_tprd_instance(), kTPRD);
  EXPECT_NEAR(u.lower, -1.0, 1e-12);
  EXPECT_NEAR(u.upper, 1.0, 1e-12);

  const auto id = classification_interval_binary(synth::perfect_outcome_instance(), kTPRD);
  EXPECT_NEAR(id.lower, 0.2, 1e-12);
  EXPECT_NEAR(id.upper, 0.2, 1e-12);
}

TEST(ClassificationIntervalBinary, DecisionOnlyRejected) {
  try {
    classification_interval_binary(synth::binary_dd_instance(), kTPRD);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingColumn);
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
  }
}

TEST(ClassificationIntervalBinary, ZeroDenominatorRisk) {
  // Class b never co-occurs with Y=1.
  const auto p = make_problem({0.5, 0.5}, {{0, 0.5, 0, 0.5}, {1.0, 0, 0, 0}}, {{1.0, 0.0}, {0.0, 1.0}});
  try {
    classification_interval_binary(p, kTPRD);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDenominatorRisk);
  }
}

CombinedProblem complement_outcomes(const CombinedProblem& p) {
  std::vector<std::vector<double>> outcome, classes;
  std::vector<double> mass;
  for (std::size_t z = 0; z < p.num_cells(); ++z) {
    const auto& r = p.outcome().probs[z];
    outcome.push_back({r[3], r[2], r[1], r[0]});
    classes.push_back({p.p_class(z, 0), p.p_class(z, 1)});
    mass.push_back(p.mass(z));
  }
  return make_problem(mass, outcome, classes);
}

TEST(ClassificationIntervalBinary, Symmetries) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto p = synth::random_joint(rng, 2, 1 + i % 4).problem();
    const auto tnrd = classification_interval_binary(p, kTNRD);
    const auto tprd = classification_interval_binary(complement_outcomes(p), kTPRD);
    EXPECT_NEAR(tnrd.lower, tprd.lower, 1e-12);
    EXPECT_NEAR(tnrd.upper, tprd.upper, 1e-12);

    const auto ppvd = classification_interval_binary(p, kPPVD);
    const auto swapped = classification_interval_binary(swap_outcome_roles(p), kTPRD);
    EXPECT_EQ(ppvd.lower, swapped.lower);
    EXPECT_EQ(ppvd.upper, swapped.upper);

    for (Measure m : {kDD, kTPRD, kNPVD}) {
      const auto fwd = m == kDD ? dd_interval_binary(p, {0, 1}) : classification_interval_binary(p, m, {0, 1});
      const auto rev = m == kDD ? dd_interval_binary(p, {1, 0}) : classification_interval_binary(p, m, {1, 0});
      EXPECT_NEAR(fwd.lower, -rev.upper, 1e-12);
      EXPECT_NEAR(fwd.upper, -rev.lower, 1e-12);
    }
  }
}

TEST(ClosedForms, ContainTrueDisparity) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const auto joint = synth::random_joint(rng, 2, 1 + i % 4, i % 3 == 0 ? 0.3 : 0.0);
    const auto p = joint.problem();
    const auto priors = class_priors(p);
    if (priors[0] <= 0.0 || priors[1] <= 0.0) continue;
    EXPECT_TRUE(dd_interval_binary(p).contains(joint.true_dd(), 1e-12));
    for (Measure m : {kTPRD, kTNRD, kPPVD, kNPVD}) {
      const auto truth = joint.true_rate_disparity(m);
      if (!truth) continue;
      EXPECT_TRUE(classification_interval_binary(p, m).contains(*truth, 1e-12)) << measure_name(m) << " " << i;
    }
  }
}

TEST(IsPointIdentified, Examples) {
  EXPECT_TRUE(is_point_identified(synth::perfect_class_instance(), kDD).identified);
  const auto r = is_point_identified(synth::binary_dd_instance(), kDD);
  EXPECT_FALSE(r.identified);
  EXPECT_DOUBLE_EQ(r.violating_mass, 1.0);
  ASSERT_EQ(r.violating_cells.size(), 1u);
  const auto tp = make_problem({0.4, 0.6}, {{0, 0, 0, 1.0}, {0, 0, 0, 1.0}}, {{0.3, 0.7}, {0.6, 0.4}});
  EXPECT_TRUE(is_point_identified(tp, kTPRD).identified);
}

TEST(IsPointIdentified, ImpliesSingletons) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const auto joint = i % 2 ? synth::class_degenerate_joint(rng, 2, 2 + i % 3)
                             : synth::outcome_degenerate_joint(rng, 2, 4 + i % 3);
    const auto p = joint.problem();
    ASSERT_TRUE(is_point_identified(p, kTPRD).identified);
    const auto dd = dd_interval_binary(p);
    EXPECT_LE(dd.width(), 1e-9);
    EXPECT_NEAR(dd.lower, joint.true_dd(), 1e-9);
    const auto tp = classification_interval_binary(p, kTPRD);
    EXPECT_LE(tp.width(), 1e-9);
    EXPECT_NEAR(tp.lower, *joint.true_rate_disparity(kTPRD), 1e-9);
  }
}

TEST(CiPointEstimate, Examples) {
  EXPECT_NEAR(ci_point_estimate(synth::perfect_class_instance(), kDD), 0.4, 1e-12);
  EXPECT_NEAR(ci_point_estimate(synth::binary_dd_instance(), kDD), 0.0, 1e-12);
  EXPECT_NEAR(ci_point_estimate(synth::uniform_tprd_instance(), kTPRD), 0.0, 1e-12);
  const auto p = make_problem({0.5, 0.5}, {{0.4, 0.6}, {0.6, 0.4}}, {{0.8, 0.2}, {0.2, 0.8}});
  EXPECT_NEAR(ci_point_estimate(p, kDD), 0.12, 1e-9);
}

TEST(CiPointEstimate, InsideInterval) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const auto p = synth::random_joint(rng, 2, 1 + i % 4).problem();
    EXPECT_TRUE(dd_interval_binary(p).contains(ci_point_estimate(p, kDD), 1e-12));
    for (Measure m : {kTPRD, kTNRD, kPPVD, kNPVD}) {
      EXPECT_TRUE(classification_interval_binary(p, m).contains(ci_point_estimate(p, m), 1e-12));
    }
  }
}

}  // namespace
