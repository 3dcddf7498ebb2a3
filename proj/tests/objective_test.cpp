#include <gtest/gtest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "poitour/objective.hpp"

namespace poitour::objective {
namespace {

TEST(Objective, SoftplusAndSigmoidAreStable) {
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(softplus(800.0), 800.0, 1e-12);
  EXPECT_NEAR(softplus(-800.0), 0.0, 1e-300);
  EXPECT_NEAR(sigmoid(0.0), 0.5, 1e-15);
  EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
  EXPECT_TRUE(std::isfinite(sigmoid(1000.0f)));
}

TEST(Objective, ZeroOutputVectorsGiveLog2PerTerm) {
  const std::vector<double> h{0.3, -0.2};
  const std::vector<double> zero{0.0, 0.0};
  const std::vector<Target<double>> t{{zero, true}, {zero, false}, {zero, false}};
  EXPECT_NEAR(negative_sampling<double>(h, t).loss, 3 * std::log(2.0), 1e-12);
}

TEST(Objective, SgnsGradientMatchesFiniteDifferences) {
  EXPECT_LE(testing::sgns_gradient_error(100, 1e-4, 17), 1e-4);
}

TEST(Objective, CbowGradientMatchesFiniteDifferences) {
  EXPECT_LE(testing::cbow_gradient_error(100, 1e-4, 23), 1e-4);
}

TEST(Objective, FloatKernelAgreesWithDouble) {
  const std::vector<float> hf{0.1f, -0.4f, 0.25f};
  const std::vector<float> uf{0.3f, 0.2f, -0.6f};
  const std::vector<double> hd(hf.begin(), hf.end());
  const std::vector<double> ud(uf.begin(), uf.end());
  std::vector<float> gf(3);
  std::vector<double> gd(3);
  float cf = 0;
  double cd = 0;
  const float lf = logistic_term<float>(hf, uf, false, gf, cf);
  const double ld = logistic_term<double>(hd, ud, false, gd, cd);
  EXPECT_NEAR(lf, ld, 1e-6);
  EXPECT_NEAR(cf, cd, 1e-6);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(gf[i], gd[i], 1e-6);
}

}  // namespace
}  // namespace poitour::objective
