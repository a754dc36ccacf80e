#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "manifold_langevin/diagnostics.hpp"
#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/fokker_planck.hpp"

using namespace manifold_langevin;

namespace {

double max_abs(const std::vector<double>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

double std_normal(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

}  // namespace

TEST(UniformGrid, EndpointsAndCount) {
  const auto g = uniform_grid(-3.0, 3.0, 0.01);
  ASSERT_EQ(g.size(), 601u);
  EXPECT_DOUBLE_EQ(g.front(), -3.0);
  EXPECT_NEAR(g.back(), 3.0, 1e-12);
}

TEST(FpeResidual, EuclideanLangevinStationary) {
  const auto grid = uniform_grid(-3.0, 3.0, 0.01);
  const auto r = fpe_residual_1d([](double x) { return -0.5 * x; }, [](double) { return 1.0; },
                                 std_normal, [](double) { return 1.0; }, grid);
  EXPECT_EQ(r.size(), grid.size() - 2);
  EXPECT_LT(max_abs(r), 1e-4);
}

TEST(FpeResidual, SecondOrderConvergence) {
  // A drift that is not stationary for the density would give an O(1)
  // residual; here only discretisation error remains, which must shrink by
  // four when h halves.
  auto run = [](double h) {
    const auto grid = uniform_grid(-3.0, 3.0, h);
    return max_abs(fpe_residual_1d([](double x) { return -0.5 * x; },
                                   [](double) { return 1.0; }, std_normal,
                                   [](double) { return 1.0; }, grid));
  };
  const double ratio = run(0.02) / run(0.01);
  EXPECT_NEAR(ratio, 4.0, 0.8);
}

TEST(FpeResidual, DetectsWrongDrift) {
  const auto grid = uniform_grid(-3.0, 3.0, 0.01);
  const auto r = fpe_residual_1d([](double x) { return -x; }, [](double) { return 1.0; },
                                 std_normal, [](double) { return 1.0; }, grid);
  EXPECT_GT(max_abs(r), 1e-2);
}

TEST(FpeResidual, ManifoldFormWithVaryingMetric) {
  // Zero flux sqrt(g) D p' / 2 = p sqrt(g) (a + D gamma / 2) with D = g^-1
  // gives a = 1/2 g^-1 p'/p - 1/2 g^-1 gamma.
  const auto metric = [](double x) { return 1.0 + 0.5 * x * x; };
  const auto dmetric = [](double x) { return x; };
  const auto drift = [&](double x) {
    const double gi = 1.0 / metric(x);
    const double gamma = gi * dmetric(x);
    return 0.5 * gi * (-x) - 0.5 * gi * gamma;
  };
  const auto grid = uniform_grid(-3.0, 3.0, 0.005);
  const auto r = fpe_residual_1d(drift, [&](double x) { return 1.0 / metric(x); }, std_normal,
                                 metric, grid);
  EXPECT_LT(max_abs(r), 1e-4);
}

TEST(FpeResidual, EuclideanAgreesWithManifoldForUnitMetric) {
  // Only for constant D: 1/2 (D p)'' and 1/2 (D p')' differ by 1/2 (D' p)'.
  const auto grid = uniform_grid(-2.0, 2.0, 0.01);
  const auto a = [](double x) { return -0.3 * x + 0.1; };
  const auto d = [](double) { return 1.7; };
  const auto m = fpe_residual_1d(a, d, std_normal, [](double) { return 1.0; }, grid);
  const auto e = euclidean_fpe_residual_1d(a, d, std_normal, grid);
  ASSERT_EQ(m.size(), e.size());
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(m[i], e[i], 1e-9);
}

TEST(FpeResidual, Errors) {
  const std::vector<double> short_grid{0.0, 0.1, 0.2, 0.3};
  const auto one = [](double) { return 1.0; };
  EXPECT_THROW(fpe_residual_1d(one, one, one, one, short_grid), InputError);
  const std::vector<double> uneven{0.0, 0.1, 0.2, 0.35, 0.4};
  EXPECT_THROW(fpe_residual_1d(one, one, one, one, uneven), InputError);
  const auto grid = uniform_grid(-1.0, 1.0, 0.1);
  EXPECT_THROW(fpe_residual_1d(one, one, [](double x) { return std::log(x); }, one, grid),
               NumericError);
}

TEST(FpeStudy, ConstantMetricControlPasses) {
  const FpeStudy s = rayleigh_fpe_study();
  EXPECT_LT(s.constant_residual, 1e-3);
  // printed simplified-MMALA expression vanishes for a constant metric
  EXPECT_LT(s.constant_expression, 1e-12);
}

TEST(FpeStudy, CorrectedExpressionMatchesEuclideanResidual) {
  // The residual of the simplified drift equals +1/2 (G^-1)' pi' + 1/2 pi
  // (G^-1)''; this is an algebraic identity, so only discretisation error
  // remains.
  const FpeStudy s = rayleigh_fpe_study();
  EXPECT_LT(s.smm_corrected_mismatch, 1e-3);
  EXPECT_GT(s.smm_residual, 1e-2);
}
