#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "bo3/errors.hpp"
#include "bo3/spectral.hpp"
#include "support.hpp"

using namespace bo3;
using bo3::testing::random_field;
using bo3::testing::wave;

namespace {

// From tests/oracles/generate.py.
constexpr double kBesovSin6[] = {1.7724538509055159, 2.5066282746310007};
constexpr double kEnvelopeSin6[] = {1.7724538509055159, 1.49045008942909,    1.2533141373155003,
                                    1.0539073652554058, 0.88622692545275794, 0.74522504471454498};
constexpr double kBesovSin8[] = {1.7724538509055159, 5.0132565492620014};
constexpr double kEnvelopeSin8[] = {1.7724538509055159, 1.49045008942909,   1.49045008942909,
                                    1.7724538509055159, 1.49045008942909,   1.2533141373155003};

GridPtr circle(std::size_t n = 64) { return Grid::make(n, 2.0 * M_PI); }

}  // namespace

TEST(Grid, EightPointWavenumbers) {
  auto g = Grid::make(8, 2.0 * M_PI);
  std::vector<double> xi(g->wavenumbers());
  std::sort(xi.begin(), xi.end());
  const std::vector<double> expect = {-4, -3, -2, -1, 0, 1, 2, 3};
  for (std::size_t i = 0; i < xi.size(); ++i) EXPECT_NEAR(xi[i], expect[i], 1e-14);
  EXPECT_NEAR(g->wavenumber(g->nyquist_index()), -4.0, 1e-14);
}

TEST(Grid, Spacing) { EXPECT_NEAR(Grid::make(1024, 256 * M_PI)->spacing(), M_PI / 4, 1e-15); }

TEST(Grid, RejectsNonPowerOfTwo) {
  EXPECT_THROW(Grid::make(12, 2 * M_PI), PreconditionError);
  EXPECT_THROW(Grid::make(4, 2 * M_PI), PreconditionError);
  EXPECT_THROW(Grid::make(16, -1.0), PreconditionError);
}

TEST(Field, SpectrumIsHermitian) {
  std::mt19937_64 rng(3);
  auto g = circle();
  std::vector<double> v(g->size());
  std::normal_distribution<double> normal;
  for (auto& x : v) x = normal(rng);
  RealField f(g, v);
  for (std::size_t m = 1; m < g->size() / 2; ++m)
    EXPECT_NEAR(std::abs(f.spectrum()[m] - std::conj(f.spectrum()[g->size() - m])), 0.0, 1e-14);
  const RealField back = RealField::from_spectrum(g, f.spectrum());
  EXPECT_LT(max_difference(f, back), 1e-13);
}

TEST(Symbol, Identity) {
  std::mt19937_64 rng(1);
  auto g = circle();
  const RealField f = random_field(g, rng, 20);
  const ComplexField out = apply_symbol(f, [](double) { return Complex(1.0); });
  EXPECT_LT(max_difference(out, ComplexField(f)), 1e-13);
}

TEST(Symbol, DifferentiatesSine) {
  auto g = circle();
  const ComplexField out = apply_symbol(wave(g, 1, 1), [](double xi) { return Complex(0.0, xi); });
  EXPECT_LT(max_difference(out, ComplexField(wave(g, 1, 1, false))), 1e-13);
}

TEST(Symbol, HalfDerivativeOfCos2x) {
  auto g = circle();
  const RealField out = apply_real_symbol(wave(g, 1, 2, false), [](double xi) { return Complex(std::sqrt(std::abs(xi))); });
  EXPECT_LT(max_difference(out, wave(g, std::sqrt(2.0), 2, false)), 1e-13);
}

TEST(Hilbert, SingleModes) {
  auto g = circle();
  for (int k = 1; k <= 5; ++k) {
    EXPECT_LT(max_difference(hilbert(wave(g, 1, k, false)), wave(g, 1, k)), 1e-13);
    EXPECT_LT(max_difference(hilbert(wave(g, 1, k)), wave(g, -1, k, false)), 1e-13);
  }
  const RealField c = RealField::sample(g, [](double) { return 2.5; });
  EXPECT_LT(hilbert(c).sup_norm(), 1e-14);
}

TEST(Hilbert, SquaresToMinusIdentityOffTheMean) {
  std::mt19937_64 rng(2);
  auto g = circle(128);
  for (int trial = 0; trial < 20; ++trial) {
    const RealField f = random_field(g, rng, 40);
    EXPECT_LT(max_difference(hilbert(hilbert(f)), -f), 1e-12);
    const RealField h = random_field(g, rng, 40);
    EXPECT_NEAR(inner(hilbert(f), h), -inner(f, hilbert(h)), 1e-10);
  }
}

TEST(Derivative, Examples) {
  auto g = circle();
  EXPECT_LT(max_difference(derivative(wave(g, 1, 1), 3), wave(g, -1, 1, false)), 1e-11);
  EXPECT_LT(max_difference(derivative(wave(g, 1, 2, false), 2), wave(g, -4, 2, false)), 1e-12);
  const RealField c = RealField::sample(g, [](double) { return 3.0; });
  for (int order = 1; order <= 4; ++order) EXPECT_LT(derivative(c, order).sup_norm(), 1e-14);
}

TEST(Antiderivative, Examples) {
  auto g = circle();
  EXPECT_LT(max_difference(antiderivative(wave(g, 1, 1)), wave(g, -1, 1, false)), 1e-13);
  EXPECT_LT(max_difference(antiderivative(wave(g, 1, 3, false)), wave(g, 1.0 / 3.0, 3)), 1e-13);
  const RealField shifted = RealField::sample(g, [](double x) { return 1.0 + std::sin(x); });
  EXPECT_THROW(antiderivative(shifted), MeanNotZeroError);
}

TEST(Antiderivative, RoundTrip) {
  std::mt19937_64 rng(4);
  auto g = Grid::make(256, 20.0);
  for (int trial = 0; trial < 10; ++trial) {
    const RealField f = random_field(g, rng, 15);
    EXPECT_LT(max_difference(derivative(antiderivative(f)), f), 1e-11);
    EXPECT_LT(max_difference(antiderivative(derivative(f)), f), 1e-11);
  }
}

TEST(LittlewoodPaley, BandSeparation) {
  auto g = circle();
  const RealField f = wave(g, 1, 1) + wave(g, 1, 16);
  EXPECT_LT(max_difference(project_band(f, 4), wave(g, 1, 16)), 1e-13);
}

TEST(LittlewoodPaley, PositiveHalfOfSine) {
  auto g = circle();
  const ComplexField half = project_band(wave(g, 1, 1), DyadicBand{0, Half::plus});
  double worst = 0.0;
  for (std::size_t j = 0; j < g->size(); ++j)
    worst = std::max(worst, std::abs(half[j] - std::exp(Complex(0, g->x(j))) / Complex(0, 2)));
  EXPECT_LT(worst, 1e-13);
}

TEST(LittlewoodPaley, PartitionOfUnity) {
  std::mt19937_64 rng(5);
  auto g = Grid::make(512, 64.0);
  for (int trial = 0; trial < 10; ++trial) {
    const RealField f = random_field(g, rng, g->max_wavenumber() / 2);
    RealField sum = RealField::zeros(g);
    for (int k = 0; k <= g->top_band(); ++k) sum = sum + project_band(f, k);
    EXPECT_LT(max_difference(sum, f), 1e-12 * f.sup_norm());
    for (int k = 1; k <= g->top_band(); ++k)
      EXPECT_LT(max_difference(project_below(f, k) + project_at_or_above(f, k), f), 1e-12 * f.sup_norm());
  }
}

TEST(LittlewoodPaley, Range) {
  auto g = circle();
  const RealField c = wave(g, 1, 1, false);
  const RealField expect = c - project_band(c, 0);
  EXPECT_LT(max_difference(project_range(c, 0, 5), expect), 1e-13);
  const RealField k = RealField::sample(g, [](double) { return 2.0; });
  EXPECT_LT(project_range(k, 0, 5).sup_norm(), 1e-14);
}

TEST(Sobolev, Examples) {
  auto g = circle();
  EXPECT_NEAR(sobolev_norm(wave(g, 1, 1), 0, true), std::sqrt(M_PI), 1e-13);
  EXPECT_NEAR(sobolev_norm(wave(g, 1, 2), 1, true), 2 * std::sqrt(M_PI), 1e-13);
  EXPECT_NEAR(sobolev_norm(wave(g, 1, 1) + wave(g, 1, 4), 0.5, true), std::sqrt(5 * M_PI), 1e-13);
}

TEST(Besov, Oracle) {
  auto g = circle();
  EXPECT_EQ(besov_norm(RealField::zeros(g), 0.5), 0.0);
  const RealField six = wave(g, 1, 1) + wave(g, 1, 6);
  const RealField eight = wave(g, 1, 1) + wave(g, 1, 8);
  EXPECT_NEAR(besov_norm(six, -0.5), kBesovSin6[0], 1e-12);
  EXPECT_NEAR(besov_norm(six, 0.5), kBesovSin6[1], 1e-12);
  EXPECT_NEAR(besov_norm(eight, -0.5), kBesovSin8[0], 1e-12);
  EXPECT_NEAR(besov_norm(eight, 0.5), kBesovSin8[1], 1e-12);
}

TEST(Besov, SingleBandPlateau) {
  auto g = circle();
  const RealField f = wave(g, 1.0 / std::sqrt(M_PI), 8);
  EXPECT_NEAR(besov_norm(f, 0.5), std::pow(2.0, 1.5), 1e-12);
}

TEST(Envelope, Oracle) {
  auto g = circle();
  const FrequencyEnvelope zero = envelope(RealField::zeros(g), 0.25);
  for (double c : zero.c) EXPECT_EQ(c, 0.0);
  const RealField six = wave(g, 1, 1) + wave(g, 1, 6);
  const RealField eight = wave(g, 1, 1) + wave(g, 1, 8);
  const FrequencyEnvelope e6 = envelope(six, 0.25), e8 = envelope(eight, 0.25);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_NEAR(e6.c[k], kEnvelopeSin6[k], 1e-12);
    EXPECT_NEAR(e8.c[k], kEnvelopeSin8[k], 1e-12);
  }
  EXPECT_TRUE(e8.slowly_varying());
  EXPECT_TRUE(e8.majorizes(eight));
  EXPECT_THROW(envelope(six, 0.0), PreconditionError);
}

TEST(Envelope, SingleBandTent) {
  auto g = circle();
  const RealField f = wave(g, 1.0 / std::sqrt(M_PI), 8);
  const FrequencyEnvelope e = envelope(f, 0.5);
  for (std::size_t k = 0; k < e.c.size(); ++k)
    EXPECT_NEAR(e.c[k], std::pow(2.0, -0.5 * std::abs(static_cast<double>(k) - 3.0)), 1e-12);
}

TEST(Snapshot, RoundTrip) {
  std::mt19937_64 rng(6);
  auto g = Grid::make(64, 10.0);
  const RealField f = random_field(g, rng, 8);
  const auto path = std::filesystem::temp_directory_path() / "bo3_snapshot_test.txt";
  write_snapshot(path.string(), f, 1.25);
  const Snapshot s = read_snapshot(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(s.time, 1.25);
  EXPECT_EQ(max_difference(s.field, f), 0.0);
}
