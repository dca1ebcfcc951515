#include <gtest/gtest.h>

#include "bo3/errors.hpp"
#include "bo3/fit.hpp"
#include "bo3/flows.hpp"
#include "bo3/normalform.hpp"
#include "support.hpp"

using namespace bo3;
using bo3::testing::random_field;
using bo3::testing::wave;

namespace {

// From tests/oracles/generate.py (direct Fourier convolution).
const Complex kBkOracle[] = {{0.1108757707717834, 1.0540066018354641e-16},
                             {0.039617758332500169, 0.042702164973375437},
                             {-0.029042606297323581, -0.030104401064227841},
                             {0.065478322357757204, 0.0037307817473595066}};
constexpr std::size_t kBkIndex[] = {0, 9, 21, 40};
constexpr double kB0Oracle[] = {-0.073284833403676114, -0.060031610686297976, -0.079533953927257456,
                                -0.065667893657936932};
constexpr std::size_t kB0Index[] = {0, 13, 37, 90};

GridPtr circle() { return Grid::make(64, 2 * M_PI); }

RealField multiband(const GridPtr& g) {
  RealField f = RealField::sample(g, [](double x) {
    return std::exp(-x * x / 8) * (std::cos(1.5 * x) + std::cos(3 * x) + std::cos(5 * x));
  });
  Spectrum c = f.spectrum();
  c[0] = 0.0;
  return RealField::from_spectrum(g, std::move(c));
}

}  // namespace

TEST(Gauge, Phase) {
  auto g = circle();
  EXPECT_LT(max_difference(gauge_phase(wave(g, 0.4, 1)), wave(g, 0.2, 1, false)), 1e-14);
  EXPECT_EQ(gauge_phase(RealField::zeros(g)).sup_norm(), 0.0);
  std::mt19937_64 rng(1);
  const RealField phi = random_field(g, rng, 12);
  EXPECT_LT(max_difference(-2.0 * derivative(gauge_phase(phi)), phi), 1e-12);
}

TEST(Bk, TrivialCases) {
  auto g = circle();
  EXPECT_EQ(bk(RealField::zeros(g), 2).sup_norm(), 0.0);
  for (int k = 2; k <= 4; ++k) EXPECT_LT(bk(wave(g, 1, 1, false), k).sup_norm(), 1e-15);
  EXPECT_THROW(bk(wave(g, 1, 1), 0), PreconditionError);
  EXPECT_THROW(bk(wave(g, 1, 1), 40), PreconditionError);
}

TEST(Bk, ConvolutionOracle) {
  auto g = circle();
  const ComplexField b = bk(wave(g, 1, 3, false) + wave(g, 1, 5, false), 3);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(std::abs(b[kBkIndex[i]] - kBkOracle[i]), 1e-13);
}

TEST(B0, Cases) {
  auto g = Grid::make(128, 8 * M_PI);
  EXPECT_EQ(b0(RealField::zeros(g)).sup_norm(), 0.0);
  EXPECT_LT(b0(wave(g, 1, 0.5, false)).sup_norm(), 1e-15);
  const RealField phi = wave(g, 1, 0.5, false) + wave(g, 1, 1.25) + wave(g, 1, 1.75, false);
  const RealField out = b0(phi);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out[kB0Index[i]], kB0Oracle[i], 1e-13);
}

TEST(BkLin, Cases) {
  std::mt19937_64 rng(2);
  auto g = Grid::make(128, 40.0);
  const RealField phi = random_field(g, rng, 6), v = random_field(g, rng, 6);
  EXPECT_EQ(bk_lin(phi, RealField::zeros(g), 2).sup_norm(), 0.0);
  EXPECT_EQ(bk_lin(RealField::zeros(g), v, 2).sup_norm(), 0.0);
  for (int k = 1; k <= 3; ++k) {
    const ComplexField lhs = bk_lin(phi, phi, k);
    const ComplexField low = product(antiderivative(project_range(phi, 0, k)),
                                     project_band(phi, DyadicBand{k, Half::plus}));
    const ComplexField rhs = Complex(2.0) * bk(phi, k) + Complex(0.0, 0.5) * low;
    EXPECT_LT(max_difference(lhs, rhs), 1e-13 * lhs.sup_norm());
  }
}

TEST(BandTransform, Properties) {
  auto g = Grid::make(256, 40.0);
  const BandTransform zero = band_transform(RealField::zeros(g), 2);
  EXPECT_EQ(zero.psi.sup_norm(), 0.0);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const RealField phi = random_field(g, rng, 10);
    for (int k = 1; k <= 4; ++k) {
      const BandTransform bt = band_transform(phi, k);
      EXPECT_NEAR(bt.psi.l2_norm(), bt.tilde_phi.l2_norm(), 1e-12 * bt.tilde_phi.l2_norm());
      EXPECT_LT(max_difference(bt.tilde_phi, bt.phi_k_plus + bk(phi, k)), 1e-15 * (1 + bt.tilde_phi.sup_norm()));
    }
  }
}

TEST(BandTransform, SingleBandUsesOracleBk) {
  auto g = circle();
  const RealField phi = wave(g, 1, 3, false) + wave(g, 1, 5, false);
  const BandTransform bt = band_transform(phi, 3);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_LT(std::abs(bt.tilde_phi[kBkIndex[i]] - bt.phi_k_plus[kBkIndex[i]] - kBkOracle[i]), 1e-13);
}

TEST(AiryResidual, ZeroTrajectory) {
  auto g = Grid::make(64, 20.0);
  SolverConfig c;
  c.dt = 0.01;
  c.t_end = 0.05;
  c.snapshot_stride = 1;
  const Trajectory tr = integrate(FlowKind::third_order_bo(), RealField::zeros(g), c);
  const EnergySeries s = airy_residual(tr, 1);
  for (const auto& ch : s.channels)
    for (double v : ch) EXPECT_EQ(v, 0.0);
}

TEST(AiryResidual, StableUnderRefinement) {
  auto g = Grid::make(256, 64 * M_PI);
  const RealField phi = 0.05 * multiband(g);
  std::vector<double> last;
  for (double dt : {2e-3, 1e-3}) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = 0.1;
    c.snapshot_stride = static_cast<std::size_t>(std::lround(0.02 / dt));
    const EnergySeries s = airy_residual(integrate(FlowKind::third_order_bo(), phi, c), 2);
    last.push_back(s.channel("residual_raw").back());
  }
  EXPECT_GT(last[1], 0.0);
  EXPECT_LT(std::abs(last[0] - last[1]), 1e-6 * last[1]);
}

TEST(CubicScaling, LinearFlowIsExact) {
  auto g = Grid::make(1024, 64 * M_PI);
  SolverConfig c;
  c.dt = 1e-3;
  const CubicScalingResult r =
      cubic_scaling_test(multiband(g), {0.01, 0.02, 0.04, 0.08}, 2, 0.2, c, FlowTag::airy);
  EXPECT_TRUE(r.raw_exact);
  EXPECT_FALSE(r.gauged_exact);
}

TEST(CubicScaling, RawQuadraticGaugedCubic) {
  auto g = Grid::make(1024, 64 * M_PI);
  SolverConfig c;
  c.dt = 1e-4;
  const CubicScalingResult r = cubic_scaling_test(multiband(g), {0.01, 0.02, 0.04, 0.08}, 2, 0.1, c);
  EXPECT_NEAR(r.slope_raw, 2.0, 0.2);
  EXPECT_NEAR(r.slope_gauged, 3.0, 0.3);
}

TEST(CubicScaling, Preconditions) {
  auto g = Grid::make(256, 64 * M_PI);
  SolverConfig c;
  EXPECT_THROW(cubic_scaling_test(multiband(g), {0.01, 0.02, 0.04}, 2, 0.0, c), PreconditionError);
  EXPECT_THROW(cubic_scaling_test(multiband(g), {0.01, 0.02, 0.05, 0.08}, 2, 0.0, c), PreconditionError);
}

namespace {

// Gauged band variable built locally, with the paraproduct term of B_k taken
// with sign `para_sign` (+1 reproduces B_k), differentiated along the flow by
// a central difference.
ComplexField local_psi(const RealField& f, int k, double para_sign) {
  const ComplexField p = project_band(f, DyadicBand{k, Half::plus});
  const ComplexField para = Complex(0.0, 0.5 * (1.0 - para_sign)) * product(antiderivative(project_below(f, k)), p);
  const ComplexField tilde = p + bk(f, k) + para;
  const RealField phase = project_below(gauge_phase(f), k);
  std::vector<Complex> out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = tilde[j] * std::exp(Complex(0.0, -phase[j]));
  return ComplexField(f.grid_ptr(), std::move(out));
}

double local_residual(const RealField& phi, int k, double para_sign) {
  const RealField n = tbo_rhs(phi);
  const double h = 1e-4 / n.sup_norm() * phi.sup_norm();
  const ComplexField dpsi =
      Complex(0.5 / h) * (local_psi(phi + h * n, k, para_sign) - local_psi(phi - h * n, k, para_sign));
  return (dpsi - derivative(local_psi(phi, k, para_sign), 3)).l2_norm();
}

}  // namespace

TEST(GaugedResidual, MatchesDirectionalDifference) {
  auto g = Grid::make(1024, 64 * M_PI);
  const RealField phi = 0.04 * multiband(g);
  const double lib = gauged_band_residual(phi, 2).l2_norm();
  EXPECT_NEAR(local_residual(phi, 2, 1.0), lib, 1e-5 * lib);
}

// With the opposite sign on the paraproduct term the gauge no longer removes
// the resonant quadratic interaction and the residual drops to second order.
TEST(GaugedResidual, ParaproductSignDecidesTheOrder) {
  auto g = Grid::make(1024, 64 * M_PI);
  std::vector<double> eps = {0.01, 0.02, 0.04, 0.08}, right, wrong;
  for (double e : eps) {
    const RealField phi = e * multiband(g);
    right.push_back(local_residual(phi, 2, 1.0));
    wrong.push_back(local_residual(phi, 2, -1.0));
  }
  EXPECT_NEAR(fit_loglog(eps, right).slope, 3.0, 0.3);
  EXPECT_NEAR(fit_loglog(eps, wrong).slope, 2.0, 0.2);
}
