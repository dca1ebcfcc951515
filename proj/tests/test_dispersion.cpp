#include <gtest/gtest.h>

#include "bo3/dispersion.hpp"
#include "bo3/errors.hpp"
#include "support.hpp"

using namespace bo3;
using bo3::testing::wave;

namespace {

RealField packet(const GridPtr& g, double k0, double w) {
  RealField f = RealField::sample(g, [=](double x) { return std::exp(-x * x / (2 * w * w)) * std::cos(k0 * x); });
  Spectrum c = f.spectrum();
  c[0] = 0.0;
  return RealField::from_spectrum(g, std::move(c));
}

}  // namespace

TEST(JBracket, Examples) {
  EXPECT_NEAR(jbracket(0, 8), 2.0, 1e-14);
  EXPECT_NEAR(jbracket(3, 27), std::sqrt(18.0), 1e-14);
  const double x = 1e3, t = 8;
  EXPECT_LT(std::abs(jbracket(x, t) - x) / x, std::pow(t, 2.0 / 3.0) / (2 * x * x));
  EXPECT_THROW(jbracket(1, 0), PreconditionError);
}

TEST(Classify, Boundaries) {
  auto g = Grid::make(64, 20.0);
  const RegionMask m = classify(g, 1, 1);
  EXPECT_DOUBLE_EQ(m.threshold(), 1.0);
  for (std::size_t j = 0; j < g->size(); ++j) {
    const double x = g->x(j);
    const Region expect = x >= 1 ? Region::hyperbolic : (x <= -1 ? Region::elliptic : Region::self_similar);
    EXPECT_EQ(m.labels[j], expect);
  }
  EXPECT_NEAR(classify(g, 8, 2).threshold(), 4.0, 1e-14);
  EXPECT_EQ(classify(g, 1e6, 1).count(Region::self_similar), g->size());
}

TEST(DecayWeights, ZeroTrajectory) {
  auto g = Grid::make(64, 20.0);
  SolverConfig c;
  c.dt = 0.1;
  c.t_end = 1.0;
  c.snapshot_stride = 5;
  const DecayReport r = decay_weights(integrate(FlowKind::airy(), RealField::zeros(g), c));
  EXPECT_EQ(r.skipped_times.size(), 1u);
  for (const char* ch : {"weighted_phi_sup", "weighted_phix_sup", "elliptic_phi_over_log", "elliptic_phix_over_log"})
    EXPECT_EQ(r.max_channel(ch), 0.0);
  EXPECT_THROW(r.max_channel("other"), PreconditionError);
}

TEST(AiryDecay, PlaneWaveDoesNotDecay) {
  auto g = Grid::make(256, 2 * M_PI);
  const DecayFit f = airy_decay_fit(wave(g, 1, 3), {1, 2, 4, 8, 16});
  EXPECT_NEAR(f.exponent(), 0.0, 1e-3);
}

TEST(AiryDecay, LocalizedBump) {
  const double w = 0.25, xi = 8, tmax = 100;
  auto g = Grid::make(1u << 19, 4 * (4 * w + 3 * xi * xi * tmax));
  RealField f = RealField::sample(g, [=](double x) { return std::exp(-x * x / (2 * w * w)); });
  Spectrum c = f.spectrum();
  c[0] = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= partition_bump(2 * g->wavenumber(m) / xi);
  f = RealField::from_spectrum(g, std::move(c));
  std::vector<double> times;
  for (int i = 0; i < 25; ++i) times.push_back(std::pow(100.0, i / 24.0));
  EXPECT_NEAR(airy_decay_fit(f, times).exponent(), -1.0 / 3.0, 0.02);
}

TEST(AiryDecay, Preconditions) {
  auto g = Grid::make(256, 2 * M_PI);
  EXPECT_THROW(airy_decay_fit(wave(g, 1, 3), {1.0}), PreconditionError);
  EXPECT_THROW(airy_decay_fit(wave(g, 1, 3), {0.0, 1.0}), PreconditionError);
}

TEST(AiryDecay, DetectsWrapAround) {
  auto g = Grid::make(1024, 40.0);
  EXPECT_THROW(airy_decay_fit(packet(g, 3.0, 1.0), {1, 10, 100}), WrapAroundError);
}

TEST(Strichartz, ZeroProjectionAndSymmetry) {
  auto g = Grid::make(4096, 16 * M_PI);
  const RealField f = packet(g, 3.0, 4.0), h = packet(g, 24.0, 0.5);
  EXPECT_EQ(bilinear_strichartz_ratio(1, 4, f, RealField::zeros(g), 0.01), 0.0);
  EXPECT_DOUBLE_EQ(bilinear_strichartz_ratio(1, 4, f, h, 0.01), bilinear_strichartz_ratio(4, 1, h, f, 0.01));
  EXPECT_THROW(bilinear_strichartz_ratio(1, 2, f, h, 0.01), PreconditionError);
}

TEST(Strichartz, BoundedAcrossSeparations) {
  auto g = Grid::make(1u << 14, 16 * M_PI);
  const RealField f = packet(g, 3.0, 4.0);
  std::vector<double> ratios;
  for (int k = 4; k <= 7; ++k) {
    const double s = std::ldexp(1.0, k);
    ratios.push_back(bilinear_strichartz_ratio(1, k, f, packet(g, 1.5 * s, 8.0 / s), g->length() / (24 * std::pow(4.0, k))));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_GT(*lo, 0.0);
  EXPECT_LT(*hi / *lo, 10.0);
}
