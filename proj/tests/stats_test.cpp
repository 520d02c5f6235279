#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <oevo/stats.hpp>

using namespace oevo;

TEST_CASE("normal cdf anchors") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK_THAT(normal_cdf(1.959964), Catch::Matchers::WithinAbs(0.975, 1e-4));
  CHECK_THAT(normal_cdf(-1.959964), Catch::Matchers::WithinAbs(0.025, 1e-4));
  CHECK_THAT(normal_cdf(3.0) + normal_cdf(-3.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("two-proportion z against a hand-worked example") {
  // 18/20 vs 4/20: pooled 0.55, se = sqrt(0.55*0.45*(1/20+1/20)),
  // z = 0.7/0.15732... = 4.4495
  const auto r = two_proportion_test(18, 20, 4, 20);
  CHECK_THAT(r.z, Catch::Matchers::WithinAbs(4.449490, 1e-3));
  CHECK(r.p_value < 1e-4);
  CHECK_THAT(r.p_value, Catch::Matchers::WithinRel(4.31e-6, 0.05));
}

TEST_CASE("two-proportion degenerate and null inputs") {
  CHECK(two_proportion_test(0, 0, 0, 0).p_value == 1.0);
  CHECK(two_proportion_test(0, 10, 0, 10).p_value == 1.0);   // se = 0
  CHECK(two_proportion_test(10, 10, 10, 10).p_value == 1.0); // se = 0
  const auto r = two_proportion_test(5, 10, 5, 10);
  CHECK(r.z == 0.0);
  CHECK(r.p_value == 0.5);
  // one-sided: deficit in the first sample must not look significant
  CHECK(two_proportion_test(2, 20, 18, 20).p_value > 0.999);
}

TEST_CASE("wilcoxon signed rank against a hand-worked example") {
  // diffs {1,2,3,-1}: |1| ties at ranks 1.5, W+ = 1.5+3+4 = 8.5, n=4,
  // mean 5, var 4*5*9/24 - (2^3-2)/48 = 7.375, z = 3/sqrt(7.375) = 1.10469
  const auto r = wilcoxon_signed_rank({1.0, 2.0, 3.0, -1.0});
  CHECK(r.n_used == 4);
  CHECK(r.w_plus == 8.5);
  CHECK_THAT(r.z, Catch::Matchers::WithinAbs(1.104689, 1e-4));
  CHECK_THAT(r.p_value, Catch::Matchers::WithinAbs(0.134664, 1e-4));
}

TEST_CASE("wilcoxon drops zeros and averages tied ranks") {
  // {1,1,1}: all ranks 2, W+ = 6, mean 3, var 3*4*7/24 - (3^3-3)/48 = 3,
  // z = 2.5/sqrt(3) = 1.443376
  const auto r = wilcoxon_signed_rank({1.0, 0.0, 1.0, 1.0, 0.0});
  CHECK(r.n_used == 3);
  CHECK(r.w_plus == 6.0);
  CHECK_THAT(r.z, Catch::Matchers::WithinAbs(1.443376, 1e-4));

  CHECK(wilcoxon_signed_rank({}).p_value == 1.0);
  CHECK(wilcoxon_signed_rank({0.0, 0.0}).p_value == 1.0);
  CHECK(wilcoxon_signed_rank({0.0, 0.0}).n_used == 0);
}

TEST_CASE("wilcoxon direction") {
  std::vector<double> up;
  for (int i = 1; i <= 20; ++i) up.push_back(static_cast<double>(i));
  CHECK(wilcoxon_signed_rank(up).p_value < 1e-4);

  std::vector<double> down;
  for (double d : up) down.push_back(-d);
  CHECK(wilcoxon_signed_rank(down).p_value > 0.999);

  // balanced signs with all magnitudes tied: W+ = 5 = mean, var = 6.25,
  // z = -0.5/2.5 = -0.2, p = 1 - cdf(-0.2) = 0.5793
  const auto r = wilcoxon_signed_rank({1.0, 1.0, -1.0, -1.0});
  CHECK(r.w_plus == 5.0);
  CHECK_THAT(r.p_value, Catch::Matchers::WithinAbs(0.5793, 1e-3));
}
