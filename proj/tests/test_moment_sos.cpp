#include "torusfpras/moment_sos.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "torusfpras/errors.hpp"
#include "torusfpras/rng.hpp"
#include "torusfpras/trig_poly.hpp"

namespace {

using cd = std::complex<double>;
using torusfpras::CoeffMap;
using torusfpras::Htp;
using torusfpras::make_htp;
using torusfpras::make_indexing;
using torusfpras::MomentIndexing;
using torusfpras::MomentSolution;
using torusfpras::validation_error;

Htp cosine_htp() {
  CoeffMap c;
  c[{1}] = {0.5, 0.0};
  c[{-1}] = {0.5, 0.0};
  return make_htp(1, c);
}

Htp separable_2d() {
  CoeffMap c;
  c[{1, 0}] = {0.5, 0.0};
  c[{-1, 0}] = {0.5, 0.0};
  c[{0, 1}] = {0.5, 0.0};
  c[{0, -1}] = {0.5, 0.0};
  return make_htp(2, c);
}

TEST(Indexing, CountsUnivariateLevelTwo) {
  const MomentIndexing idx = make_indexing(1, 2);
  EXPECT_EQ(idx.side, 3);
  EXPECT_EQ(idx.diff_count, 5);
  EXPECT_EQ(idx.reduced_count, 3);
}

TEST(Indexing, CountsBivariate) {
  const MomentIndexing l2 = make_indexing(2, 2);
  EXPECT_EQ(l2.side, 9);
  EXPECT_EQ(l2.diff_count, 25);
  EXPECT_EQ(l2.reduced_count, 13);
  const MomentIndexing l1 = make_indexing(2, 1);
  EXPECT_EQ(l1.side, 4);
  EXPECT_EQ(l1.diff_count, 9);
  EXPECT_EQ(l1.reduced_count, 5);
}

TEST(Indexing, CanonicalGammasLeadWithPositiveEntry) {
  const MomentIndexing idx = make_indexing(2, 1);
  for (const auto& gamma : idx.reduced_gammas) {
    bool zero = true;
    int first = 0;
    for (int v : gamma) {
      if (v != 0) {
        first = v;
        zero = false;
        break;
      }
    }
    EXPECT_TRUE(zero || first > 0);
  }
  EXPECT_EQ(idx.reduced_gammas[static_cast<std::size_t>(idx.zero_slot)],
            (torusfpras::FrequencyVector{0, 0}));
}

TEST(Relaxation, AdjointOfAssembleIsDiagonal) {
  // T*(T(e_s)) = multiplicity[s] * e_s certifies both entry tables at once.
  const Htp h = separable_2d();
  const torusfpras::Relaxation relax = torusfpras::build_relaxation(h, 2);
  const int n = relax.idx.reduced_count;
  Eigen::MatrixXcd work(relax.idx.side, relax.idx.side);
  std::vector<cd> y(static_cast<std::size_t>(n));
  std::vector<cd> out(static_cast<std::size_t>(n));
  torusfpras::RngStream rng(51, "test-adjoint");
  for (int s = 0; s < n; ++s) {
    for (auto& v : y) v = cd(0.0, 0.0);
    y[static_cast<std::size_t>(s)] = rng.complex_normal();
    // Keep the zero slot real (it represents a self-conjugate moment).
    if (s == relax.idx.zero_slot) y[static_cast<std::size_t>(s)].imag(0.0);
    relax.assemble(y, work);
    EXPECT_LE((work - work.adjoint().eval()).norm(), 1e-12);
    relax.adjoint(work, out);
    for (int t = 0; t < n; ++t) {
      const cd expected = (t == s)
                              ? relax.multiplicity[static_cast<std::size_t>(s)] *
                                    y[static_cast<std::size_t>(s)]
                              : cd(0.0, 0.0);
      EXPECT_LE(std::abs(out[static_cast<std::size_t>(t)] - expected), 1e-10);
    }
  }
}

TEST(Relaxation, MultiplicitiesAreBoxCounts) {
  const torusfpras::Relaxation relax = torusfpras::build_relaxation(cosine_htp(), 2);
  // m_gamma = level + 1 - |gamma| in one dimension.
  for (int s = 0; s < relax.idx.reduced_count; ++s) {
    const int g = relax.idx.reduced_gammas[static_cast<std::size_t>(s)][0];
    EXPECT_NEAR(relax.multiplicity[static_cast<std::size_t>(s)], 3.0 - std::abs(g), 1e-12);
  }
}

TEST(Relaxation, LevelMustCoverDegrees) {
  EXPECT_THROW(torusfpras::build_relaxation(cosine_htp(), 0), validation_error);
  CoeffMap c;
  c[{3}] = {0.5, 0.0};
  c[{-3}] = {0.5, 0.0};
  EXPECT_THROW(torusfpras::build_relaxation(make_htp(1, c), 2), validation_error);
}

TEST(LevelFormulas, TruncationFloor) {
  const double s6 = std::sqrt(6.0);
  EXPECT_NEAR(torusfpras::l0(1, 4, 2), 4.0 * s6, 1e-12);
  EXPECT_NEAR(torusfpras::l0(1, 1, 1), s6, 1e-12);
  EXPECT_NEAR(torusfpras::l0(3, 1, 2), s6, 1e-12);
}

// Frozen regression of the epsilon-sufficient level formula, verified by
// independent high-precision evaluation.
TEST(LevelFormulas, RequiredLevelFrozenValue) {
  EXPECT_EQ(torusfpras::required_level(0.5, 2, 2, 6, 3.0), 5092);
}

TEST(LevelFormulas, Validation) {
  EXPECT_THROW(torusfpras::l0(1, 0, 2), validation_error);
  EXPECT_THROW(torusfpras::required_level(0.0, 2, 2, 6, 3.0), validation_error);
  EXPECT_THROW(torusfpras::required_level(1e-12, 8, 9, 40, 1e6),
               torusfpras::resource_limit_error);
}

TEST(Solve, CosineLevelOneIsExact) {
  const MomentSolution sol = torusfpras::solve_relaxation(cosine_htp(), 1);
  EXPECT_EQ(sol.status, "converged");
  EXPECT_NEAR(sol.lower_bound, -1.0, 1e-6);
  EXPECT_NEAR(sol.objective, -1.0, 1e-6);
  EXPECT_NEAR(sol.equivalent_symmetric_degree, 0.5, 1e-12);
}

TEST(Solve, SeparableTwoDimensional) {
  const MomentSolution sol = torusfpras::solve_relaxation(separable_2d(), 1);
  EXPECT_NEAR(sol.lower_bound, -2.0, 1e-5);
}

// Frozen cross-solver regression: univariate degree-2 polynomial with
// f0 = 0.3, f1 = 0.4 - 0.25i, f2 = -0.15 + 0.1i at level 2. Reference
// optimum -0.98404279 from two independent interior-point solves and a
// 2^20-point grid refinement of the (exact at this level) minimum.
TEST(Solve, FrozenInteriorPointReference) {
  CoeffMap c;
  c[{0}] = {0.3, 0.0};
  c[{1}] = {0.4, -0.25};
  c[{-1}] = {0.4, 0.25};
  c[{2}] = {-0.15, 0.1};
  c[{-2}] = {-0.15, -0.1};
  const MomentSolution sol = torusfpras::solve_relaxation(make_htp(1, c), 2);
  EXPECT_NEAR(sol.lower_bound, -0.9840427947, 1e-5);
  EXPECT_NEAR(sol.objective, -0.9840427947, 1e-5);
}

TEST(Solve, UnivariateExactAtDegreeLevel) {
  torusfpras::RngStream rng(52, "test-univariate");
  for (int rep = 0; rep < 6; ++rep) {
    const int degree = 1 + static_cast<int>(rng.uniform01() * 4.0);  // 1..4
    const Htp h = tf_test::random_htp({degree}, rng);
    const MomentSolution sol = torusfpras::solve_relaxation(h, degree);
    const auto [theta, oracle] = torusfpras::grid_minimize(h, 1025);
    EXPECT_NEAR(sol.lower_bound, oracle, 2e-5) << "degree " << degree;
  }
}

TEST(Solve, SoundAndMonotoneOnRandomInstances) {
  torusfpras::RngStream rng(53, "test-monotone");
  for (int rep = 0; rep < 4; ++rep) {
    const int m = rep % 2 == 0 ? 1 : 2;
    std::vector<int> degrees(static_cast<std::size_t>(m));
    for (int& d : degrees) d = 1 + static_cast<int>(rng.uniform01() * 2.0);  // 1..2
    const Htp h = tf_test::random_htp(degrees, rng);
    const int d = *std::max_element(degrees.begin(), degrees.end());
    const auto [theta, oracle] = torusfpras::grid_minimize(h, std::max(2 * d + 1, 65));

    double prev = -1e300;
    const MomentSolution* warm = nullptr;
    std::vector<MomentSolution> kept;
    kept.reserve(3);
    for (int level = d; level < d + 3; ++level) {
      kept.push_back(torusfpras::solve_relaxation(h, level, {}, warm));
      warm = &kept.back();
      EXPECT_GE(kept.back().lower_bound, prev - 2e-7) << "level " << level;
      EXPECT_LE(kept.back().lower_bound, oracle + 1e-5) << "level " << level;
      prev = kept.back().lower_bound;
    }
  }
}

TEST(Sweep, EarlyStopsWhenBoundsSettle) {
  const torusfpras::SweepResult sweep = torusfpras::sweep_levels(cosine_htp(), 6, 0.5);
  EXPECT_TRUE(sweep.early_stopped);
  EXPECT_EQ(sweep.solutions.size(), 2u);
  EXPECT_NEAR(sweep.best_lower_bound, -1.0, 1e-5);
  EXPECT_EQ(sweep.solutions.front().level, 1);
}

TEST(Sweep, HonorsLevelOverride) {
  const torusfpras::SweepResult sweep =
      torusfpras::sweep_levels(cosine_htp(), 4, 0.5, {}, 3);
  EXPECT_EQ(sweep.solutions.front().level, 3);
}

TEST(MomentMatrix, SubLevelIsLeadingPrincipalStructure) {
  const MomentSolution sol = torusfpras::solve_relaxation(cosine_htp(), 2);
  const MomentIndexing idx = make_indexing(1, 2);
  const Eigen::MatrixXcd full = torusfpras::moment_matrix(idx, sol.y, 2);
  const Eigen::MatrixXcd sub = torusfpras::moment_matrix(idx, sol.y, 1);
  EXPECT_EQ(full.rows(), 3);
  EXPECT_EQ(sub.rows(), 2);
  EXPECT_LE((full.topLeftCorner(2, 2) - sub).norm(), 1e-15);
  EXPECT_THROW(torusfpras::moment_matrix(idx, sol.y, 3), validation_error);
}

TEST(SolutionJson, RoundTripBitExact) {
  const MomentSolution sol = torusfpras::solve_relaxation(cosine_htp(), 2);
  const MomentSolution back = torusfpras::solution_from_json(torusfpras::solution_to_json(sol));
  EXPECT_EQ(back.M, sol.M);
  EXPECT_EQ(back.level, sol.level);
  EXPECT_EQ(back.lower_bound, sol.lower_bound);
  EXPECT_EQ(back.objective, sol.objective);
  EXPECT_EQ(back.status, sol.status);
  EXPECT_EQ(back.iterations, sol.iterations);
  ASSERT_EQ(back.y.size(), sol.y.size());
  for (std::size_t i = 0; i < sol.y.size(); ++i) EXPECT_EQ(back.y[i], sol.y[i]);
  EXPECT_LE((back.matrix - sol.matrix).norm(), 1e-15);
}

TEST(SolutionJson, RejectsNonCanonicalGamma) {
  const MomentSolution sol = torusfpras::solve_relaxation(cosine_htp(), 1);
  nlohmann::json j = torusfpras::solution_to_json(sol);
  j["y"][1]["gamma"][0] = -1;
  EXPECT_THROW(torusfpras::solution_from_json(j), validation_error);
}

TEST(Solve, WarmStartAcrossLevelsAgrees) {
  const Htp h = separable_2d();
  const MomentSolution lo = torusfpras::solve_relaxation(h, 1);
  const MomentSolution warm = torusfpras::solve_relaxation(h, 2, {}, &lo);
  const MomentSolution cold = torusfpras::solve_relaxation(h, 2);
  EXPECT_NEAR(warm.lower_bound, cold.lower_bound, 1e-5);
}

}  // namespace
