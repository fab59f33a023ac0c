#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dbounds/error.hpp"
#include "dbounds/lp.hpp"

namespace lp = dbounds::lp;

namespace {

TEST(LpSolve, SingleBoundedVariable) {
  lp::LpProblem p(1, lp::Sense::Maximize);
  p.set_objective(0, 1.0);
  p.add_constraint({1.0}, lp::Relation::LessEqual, 1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
}

TEST(LpSolve, DegenerateFaceOptimum) {
  lp::LpProblem p(2, lp::Sense::Maximize);
  p.set_objective({1.0, 1.0});
  p.add_constraint({1.0, 1.0}, lp::Relation::LessEqual, 1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_NEAR(s.point[0] + s.point[1], 1.0, 1e-12);
}

TEST(LpSolve, Infeasible) {
  lp::LpProblem p(1, lp::Sense::Maximize);
  p.set_objective(0, 1.0);
  p.add_constraint({1.0}, lp::Relation::GreaterEqual, 2.0);
  p.add_constraint({1.0}, lp::Relation::LessEqual, 1.0);
  EXPECT_EQ(lp::solve(p).status, lp::Status::Infeasible);
}

TEST(LpSolve, Unbounded) {
  lp::LpProblem p(2, lp::Sense::Maximize);
  p.set_objective({1.0, 0.0});
  p.add_constraint({1.0, -1.0}, lp::Relation::LessEqual, 1.0);
  EXPECT_EQ(lp::solve(p).status, lp::Status::Unbounded);
}

TEST(LpSolve, BoundsAndMinimize) {
  lp::LpProblem p(2, lp::Sense::Minimize);
  p.set_objective({1.0, 2.0});
  p.set_bounds(0, 0.5, 3.0);
  p.set_bounds(1, 1.0, lp::kInfinity);
  p.add_constraint({1.0, 1.0}, lp::Relation::GreaterEqual, 2.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(s.value, 3.0, 1e-12);
  EXPECT_NEAR(s.point[0], 1.0, 1e-12);
  EXPECT_NEAR(s.point[1], 1.0, 1e-12);
}

TEST(LpSolve, RejectsMalformedRows) {
  lp::LpProblem p(2, lp::Sense::Maximize);
  EXPECT_THROW(p.add_constraint({1.0}, lp::Relation::LessEqual, 1.0), dbounds::Error);
  p.add_constraint({1.0, NAN}, lp::Relation::LessEqual, 1.0);
  EXPECT_THROW(p.validate(), dbounds::Error);
  EXPECT_THROW(lp::solve(p), dbounds::Error);
}

TEST(LpFeasible, Basics) {
  lp::LpProblem ok(1, lp::Sense::Maximize);
  ok.add_constraint({1.0}, lp::Relation::LessEqual, 1.0);
  EXPECT_TRUE(lp::feasible(ok));
  lp::LpProblem bad(1, lp::Sense::Maximize);
  bad.add_constraint({1.0}, lp::Relation::LessEqual, -1.0);
  EXPECT_FALSE(lp::feasible(bad));
  EXPECT_TRUE(lp::feasible(lp::LpProblem(3, lp::Sense::Maximize)));
}

// Brute force over all bases of {A x + s = b, x, s >= 0} for tiny LPs.
double vertex_enumeration_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                              const std::vector<double>& c) {
  const std::size_t m = A.size(), n = c.size(), cols = n + m;
  double best = -INFINITY;
  std::vector<int> pick(cols, 0);
  std::fill(pick.begin(), pick.begin() + m, 1);
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<std::size_t> basis;
    for (std::size_t j = 0; j < cols; ++j)
      if (pick[j]) basis.push_back(j);
    // Gaussian elimination on the m x m basis matrix.
    std::vector<std::vector<double>> M(m, std::vector<double>(m + 1));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = basis[k];
        M[i][k] = j < n ? A[i][j] : (j - n == i ? 1.0 : 0.0);
      }
      M[i][m] = b[i];
    }
    bool singular = false;
    for (std::size_t k = 0; k < m && !singular; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < m; ++i)
        if (std::abs(M[i][k]) > std::abs(M[piv][k])) piv = i;
      if (std::abs(M[piv][k]) < 1e-10) {
        singular = true;
        break;
      }
      std::swap(M[k], M[piv]);
      for (std::size_t i = 0; i < m; ++i) {
        if (i == k) continue;
        const double f = M[i][k] / M[k][k];
        for (std::size_t q = k; q <= m; ++q) M[i][q] -= f * M[k][q];
      }
    }
    if (singular) continue;
    double value = 0.0;
    bool feasible = true;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = M[k][m] / M[k][k];
      if (v < -1e-9) feasible = false;
      if (basis[k] < n) value += c[basis[k]] * v;
    }
    if (feasible) best = std::max(best, value);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

TEST(LpSolve, MatchesVertexEnumeration) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 2.0), rhs(0.5, 3.0), cost(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 4, m = 2 + trial % 3;
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    std::vector<double> b(m), c(n);
    for (auto& row : A)
      for (auto& a : row) a = coef(rng);
    for (auto& v : b) v = rhs(rng);
    for (auto& v : c) v = cost(rng);
    // A row x1 + ... + xn <= 5 keeps the problem bounded.
    A.push_back(std::vector<double>(n, 1.0));
    b.push_back(5.0);
    lp::LpProblem p(n, lp::Sense::Maximize);
    p.set_objective(c);
    for (std::size_t i = 0; i < A.size(); ++i) p.add_constraint(A[i], lp::Relation::LessEqual, b[i]);
    const auto s = lp::solve(p);
    ASSERT_EQ(s.status, lp::Status::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.value, vertex_enumeration_max(A, b, c), 1e-6) << "trial " << trial;
    EXPECT_LE(lp::max_violation(p, s.point), 1e-7);
  }
}

TEST(LpSolve, DeterministicAndScaleInvariantBasis) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  lp::LpProblem p(6, lp::Sense::Maximize);
  std::vector<double> c(6);
  for (auto& v : c) v = u(rng);
  p.set_objective(c);
  for (int r = 0; r < 4; ++r) {
    std::vector<double> row(6);
    for (auto& v : row) v = u(rng);
    p.add_constraint(row, lp::Relation::LessEqual, 1.0 + r);
  }
  const auto s1 = lp::solve(p);
  const auto s2 = lp::solve(p);
  ASSERT_EQ(s1.status, lp::Status::Optimal);
  EXPECT_EQ(s1.point, s2.point);
  EXPECT_EQ(s1.value, s2.value);

  lp::LpProblem scaled = p;
  for (auto& v : c) v *= 8.0;  // power of two keeps pricing comparisons exact
  scaled.set_objective(c);
  const auto s3 = lp::solve(scaled);
  EXPECT_EQ(s3.basis, s1.basis);
  EXPECT_NEAR(s3.value, 8.0 * s1.value, 1e-9);
}

TEST(LpSolve, HandlesRedundantEqualities) {
  lp::LpProblem p(3, lp::Sense::Maximize);
  p.set_objective({1.0, 2.0, 3.0});
  p.add_constraint({1.0, 1.0, 1.0}, lp::Relation::Equal, 1.0);
  p.add_constraint({2.0, 2.0, 2.0}, lp::Relation::Equal, 2.0);
  p.add_constraint({0.0, 0.0, 1.0}, lp::Relation::LessEqual, 0.5);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(s.value, 2.5, 1e-12);
}

}  // namespace
