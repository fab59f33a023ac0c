#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "dbounds/distributions.hpp"
#include "dbounds/error.hpp"
#include "support/instances.hpp"

using namespace dbounds;

namespace {

CsvTable csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

Schema two_class_schema() {
  return Schema::from_json(nlohmann::json::parse(R"({"classes": ["a", "b"], "reference_class": "a"})"));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(Csv, QuotesAndWidth) {
  const auto t = csv("x,\"y,z\"\r\n1,\"he said \"\"hi\"\"\"\n");
  ASSERT_EQ(t.header.size(), 2u);
  EXPECT_EQ(t.header[1], "y,z");
  EXPECT_EQ(t.rows[0][1], "he said \"hi\"");
  EXPECT_EQ(code_of([] { csv("a,b\n1\n"); }), ErrorCode::ParseError);
  EXPECT_FALSE(parse_number("1.5x"));
  EXPECT_FALSE(parse_number("nan"));
  EXPECT_DOUBLE_EQ(*parse_number("-2.5e-1"), -0.25);
}

TEST(IngestMain, UniformCounts) {
  const auto side = ingest_main(csv("yhat,y,z_g\n1,1,A\n1,0,A\n0,1,A\n0,0,A\n"), two_class_schema());
  ASSERT_EQ(side.cells.size(), 1u);
  EXPECT_EQ(side.mode, OutcomeMode::Full);
  EXPECT_DOUBLE_EQ(side.cells[0].mass, 1.0);
  for (double p : side.probs[0]) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(IngestMain, Errors) {
  const Schema s = two_class_schema();
  EXPECT_EQ(code_of([&] { ingest_main(csv("yhat,z_g\n2,A\n"), s); }), ErrorCode::NonBinaryOutcome);
  EXPECT_EQ(code_of([&] { ingest_main(csv("yhat,y,z_g\n1,1,A\n1,,A\n"), s); }),
            ErrorCode::MixedOutcomeAvailability);
  EXPECT_EQ(code_of([&] { ingest_main(csv("yhat,z_g\n"), s); }), ErrorCode::EmptyInput);
}

TEST(IngestMain, EmpiricalMasses) {
  const auto side = ingest_main(csv("yhat,z_g\n1,A\n0,A\n1,A\n1,B\n"), two_class_schema());
  EXPECT_EQ(side.mode, OutcomeMode::DecisionOnly);
  ASSERT_EQ(side.cells.size(), 2u);
  EXPECT_DOUBLE_EQ(side.cells[0].mass, 0.75);
  EXPECT_DOUBLE_EQ(side.cells[1].mass, 0.25);
  EXPECT_NEAR(side.probs[0][1], 2.0 / 3.0, 1e-15);
}

TEST(IngestMain, NumericBins) {
  const Schema s = Schema::from_json(nlohmann::json::parse(
      R"({"proxies": [{"column": "z_inc", "kind": "numeric", "bins": [0, 10, 20]}], "classes": ["a", "b"]})"));
  const auto side = ingest_main(csv("yhat,z_inc\n1,3\n0,12\n1,20\n"), s);
  ASSERT_EQ(side.cells.size(), 2u);
  EXPECT_DOUBLE_EQ(side.cells[0].numeric_coord[0], 5.0);
  EXPECT_DOUBLE_EQ(side.cells[1].numeric_coord[0], 15.0);
  EXPECT_EQ(code_of([&] { ingest_main(csv("yhat,z_inc\n1,25\n"), s); }), ErrorCode::ValueOutsideBins);
}

TEST(IngestAux, RecordAndAggregated) {
  const Schema s = two_class_schema();
  const auto rec = ingest_aux(csv("a,z_g\na,X\na,X\nb,X\n"), s);
  EXPECT_NEAR(rec.probs.at(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(rec.probs.at(0, 1), 1.0 / 3.0, 1e-15);

  const auto agg = ingest_aux(csv("z_g,weight,p_a,p_b\nX,10,0.7,0.3\n"), s);
  EXPECT_DOUBLE_EQ(agg.probs.at(0, 0), 0.7);

  EXPECT_EQ(code_of([&] { ingest_aux(csv("z_g,weight,p_a,p_b\nX,10,0.7,0.2\n"), s); }),
            ErrorCode::ProbabilityRowNotNormalized);
  EXPECT_EQ(code_of([&] { ingest_aux(csv("z_g,weight,p_a,p_c\nX,10,0.7,0.3\n"), s); }),
            ErrorCode::UnknownClassColumn);
  EXPECT_EQ(code_of([&] { ingest_aux(csv("a,z_g\nq,X\n"), s); }), ErrorCode::UnknownClass);
}

TEST(IngestAux, ReferenceClassComesFirst) {
  const Schema s = Schema::from_json(nlohmann::json::parse(R"({"classes": ["b", "a"], "reference_class": "a"})"));
  const auto side = ingest_aux(csv("a,z_g\na,X\nb,X\nb,X\n"), s);
  EXPECT_EQ(side.labels[0].name, "a");
  EXPECT_NEAR(side.probs.at(0, 0), 1.0 / 3.0, 1e-15);
}

TEST(Align, Policies) {
  const Schema s = two_class_schema();
  const auto main = ingest_main(csv("yhat,z_g\n1,X\n0,X\n1,X\n0,X\n1,Y\n"), s);
  const auto aux_same = ingest_aux(csv("a,z_g\na,X\nb,Y\n"), s);
  EXPECT_DOUBLE_EQ(align(main, aux_same).dropped_mass(), 0.0);

  const auto aux_x = ingest_aux(csv("a,z_g\na,X\n"), s);
  const auto p = align(main, aux_x);
  ASSERT_EQ(p.num_cells(), 1u);
  EXPECT_DOUBLE_EQ(p.mass(0), 1.0);
  EXPECT_NEAR(p.dropped_mass(), 0.2, 1e-15);
  EXPECT_EQ(code_of([&] { align(main, aux_x, AlignPolicy::ErrorOnMismatch); }), ErrorCode::SupportMismatch);

  const auto aux_z = ingest_aux(csv("a,z_g\na,Z\n"), s);
  EXPECT_EQ(code_of([&] { align(main, aux_z); }), ErrorCode::NoCommonSupport);
}

TEST(Align, Idempotent) {
  std::mt19937_64 rng(3);
  const auto p = synth::random_joint(rng, 3, 5).problem();
  const auto again = align(main_side(p), aux_side(p));
  EXPECT_EQ(again, p);
  EXPECT_EQ(align(main_side(again), aux_side(again)), again);
}

TEST(ClassPriors, Examples) {
  using synth::make_problem;
  auto p1 = make_problem({0.5, 0.5}, {{0.5, 0.5}, {0.5, 0.5}}, {{1, 0}, {0, 1}});
  EXPECT_EQ(class_priors(p1), (std::vector<double>{0.5, 0.5}));
  auto p2 = make_problem({1.0}, {{0.5, 0.5}}, {{0.9, 0.1}});
  EXPECT_NEAR(class_priors(p2)[1], 0.1, 1e-15);
  auto p3 = make_problem({0.3, 0.7}, {{0.5, 0.5}, {0.2, 0.8}}, {{1 / 3.0, 1 / 3.0, 1 / 3.0}, {1 / 3.0, 1 / 3.0, 1 / 3.0}});
  for (double v : class_priors(p3)) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(NegativeEntropy, Examples) {
  using synth::make_problem;
  EXPECT_NEAR(negative_entropy(make_problem({1.0}, {{0.5, 0.5}}, {{0.5, 0.5}}), EntropyTarget::Class), -0.6931, 1e-4);
  EXPECT_EQ(negative_entropy(make_problem({1.0}, {{0.5, 0.5}}, {{1.0, 0.0}}), EntropyTarget::Class), 0.0);
  const double expected = 0.9 * std::log(0.9) + 0.1 * std::log(0.1);
  EXPECT_NEAR(negative_entropy(make_problem({1.0}, {{0.5, 0.5}}, {{0.9, 0.1}}), EntropyTarget::Class), expected, 1e-12);
  EXPECT_NEAR(expected, -0.3251, 1e-4);
  EXPECT_NEAR(negative_entropy(make_problem({1.0}, {{0.25, 0.25, 0.25, 0.25}}, {{0.9, 0.1}}), EntropyTarget::Outcome),
              -std::log(4.0), 1e-12);
}

TEST(NegativeEntropy, NonPositiveAndZeroOnlyWhenDegenerate) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = synth::random_joint(rng, 2 + i % 2, 1 + i % 4, 0.3).problem();
    const double h = negative_entropy(p, EntropyTarget::Class);
    EXPECT_LE(h, 0.0);
    bool all_degenerate = true;
    for (std::size_t z = 0; z < p.num_cells(); ++z) {
      bool d = false;
      for (std::size_t k = 0; k < p.num_classes(); ++k) d = d || p.p_class(z, k) == 1.0;
      all_degenerate = all_degenerate && d;
    }
    EXPECT_EQ(h == 0.0, all_degenerate);
  }
}

TEST(Problem, InvariantsAfterNormalization) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto p = synth::random_joint(rng, 3, 6, 0.2).problem();
    double total = 0.0;
    for (std::size_t z = 0; z < p.num_cells(); ++z) {
      total += p.mass(z);
      double o = 0.0, c = 0.0;
      for (double v : p.outcome().probs[z]) o += v;
      for (std::size_t k = 0; k < 3; ++k) c += p.p_class(z, k);
      EXPECT_NEAR(o, 1.0, 1e-9);
      EXPECT_NEAR(c, 1.0, 1e-9);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    double prior_sum = 0.0;
    for (double v : class_priors(p)) prior_sum += v;
    EXPECT_NEAR(prior_sum, 1.0, 1e-8);
  }
}

TEST(Problem, RejectsCorruptRows) {
  using synth::make_problem;
  EXPECT_EQ(code_of([] { make_problem({1.0}, {{0.5, 0.6}}, {{0.5, 0.5}}); }), ErrorCode::InvalidProblem);
  // Float noise below 1e-6 is renormalized away.
  const auto p = make_problem({1.0}, {{0.5, 0.5000004}}, {{0.5, 0.5}});
  EXPECT_NEAR(p.p_yhat(0, 0) + p.p_yhat(0, 1), 1.0, 1e-15);
}

TEST(IngestMain, SamplerRoundTripConverges) {
  const double table[4] = {0.1, 0.2, 0.3, 0.4};
  const std::size_t N = 100000;
  for (unsigned seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> draw(table, table + 4);
    std::ostringstream text;
    text << "yhat,y,z_g\n";
    for (std::size_t i = 0; i < N; ++i) {
      const int o = draw(rng);
      text << (o / 2) << ',' << (o % 2) << ",A\n";
    }
    const auto side = ingest_main(csv(text.str()), two_class_schema());
    const double bound = 3.0 * std::sqrt(std::log(double(N)) / double(N));
    for (int o = 0; o < 4; ++o) EXPECT_LE(std::abs(side.probs[0][o] - table[o]), bound);
  }
}

TEST(SwapOutcomeRoles, ExchangesAxes) {
  const auto p = synth::make_problem({1.0}, {{0.1, 0.2, 0.3, 0.4}}, {{0.5, 0.5}});
  const auto s = swap_outcome_roles(p);
  EXPECT_DOUBLE_EQ(s.p_joint(0, 0, 1), p.p_joint(0, 1, 0));
  EXPECT_EQ(swap_outcome_roles(s), p);
}

TEST(ProblemDigest, StableAndSensitive) {
  std::mt19937_64 rng(1);
  const auto p = synth::random_joint(rng, 2, 3).problem();
  EXPECT_EQ(problem_digest(p), problem_digest(p));
  EXPECT_EQ(problem_digest(p).size(), 16u);
  EXPECT_NE(problem_digest(p), problem_digest(swap_outcome_roles(p)));
}

}  // namespace
