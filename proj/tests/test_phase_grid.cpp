#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace cfgqm;

TEST(Grid, SpacingFromBounds) {
  const auto g = make_grid(-10, 10, 8, -5, 5, 8);
  EXPECT_DOUBLE_EQ(g.dx(), 2.5);
  EXPECT_DOUBLE_EQ(g.dv(), 1.25);
  EXPECT_DOUBLE_EQ(g.x(3), -10 + 3 * 2.5);
  EXPECT_DOUBLE_EQ(g.v(7), -5 + 7 * 1.25);
}

TEST(Grid, UnitSquare) {
  const auto g = make_grid(0, 1, 256, 0, 1, 256);
  EXPECT_EQ(g.size(), 65536u);
  EXPECT_DOUBLE_EQ(g.dx(), 1.0 / 256);
  EXPECT_DOUBLE_EQ(g.dv(), 1.0 / 256);
}

TEST(Grid, RejectsOddCount) {
  try {
    make_grid(-10, 10, 7, -5, 5, 8);
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("n_x"), std::string::npos);
  }
  EXPECT_THROW(make_grid(-10, 10, 10, -5, 5, 9), ConfigError);
}

TEST(Grid, RejectsSmallOrReversed) {
  EXPECT_THROW(make_grid(-1, 1, 6, -1, 1, 8), ConfigError);
  EXPECT_THROW(make_grid(1, -1, 8, -1, 1, 8), ConfigError);
  EXPECT_THROW(make_grid(-1, 1, 8, 2, 2, 8), ConfigError);
  EXPECT_THROW(make_grid_1d(0, 1, 9), ConfigError);
}

TEST(Constants, HbarMustBePositive) {
  EXPECT_NO_THROW(PhysicalConstants{}.validate());
  EXPECT_THROW(PhysicalConstants{0.0}.validate(), ConfigError);
  EXPECT_THROW(PhysicalConstants{-1.0}.validate(), ConfigError);
}

TEST(GaussianPacket, CentredUnitPacket) {
  const auto g = test::square_grid(8.0, 128);
  SpectralWorkspace ws(g);
  const auto wf = gaussian_packet(g, {0, 0, 1, 1, 0, 0});
  EXPECT_NEAR(norm(wf), 1.0, 1e-12);
  EXPECT_NEAR(expect(wf, ObservableTag::Position, ws), 0.0, 1e-12);
  EXPECT_NEAR(expect(wf, ObservableTag::Velocity, ws), 0.0, 1e-12);
}

TEST(GaussianPacket, OffsetCentre) {
  const auto g = test::square_grid(8.0, 128);
  SpectralWorkspace ws(g);
  const auto wf = gaussian_packet(g, {2, -1, 0.5, 0.5, 0, 0});
  EXPECT_NEAR(expect(wf, ObservableTag::Position, ws), 2.0, 1e-10);
  EXPECT_NEAR(expect(wf, ObservableTag::Velocity, ws), -1.0, 1e-10);
  EXPECT_NEAR(uncertainty(wf, ObservableTag::Position, ws), 0.5, 1e-10);
  EXPECT_NEAR(uncertainty(wf, ObservableTag::Velocity, ws), 0.5, 1e-10);
}

TEST(GaussianPacket, MomentumFromMomentumSpaceQuadrature) {
  const auto g = test::square_grid(8.0, 128);
  SpectralWorkspace ws(g);
  const auto wf = gaussian_packet(g, {0, 0, 1, 1, 3, 0});
  const auto pv = to_momentum_rep(wf, ws);
  double mean_p = 0.0;
  for (std::size_t q = 0; q < pv.grid.n_x; ++q)
    for (std::size_t j = 0; j < pv.grid.n_v; ++j) mean_p += pv.grid.x(q) * std::norm(pv.at(q, j));
  mean_p *= pv.cell();
  EXPECT_NEAR(mean_p, 3.0, 1e-8);
  EXPECT_NEAR(expect(wf, ObservableTag::Momentum, ws), 3.0, 1e-8);
}

TEST(GaussianPacket, MatchesClosedForm) {
  const auto g = test::square_grid(8.0, 128);
  const PacketParams p{0.7, -1.2, 0.6, 0.9, 1.5, -0.5};
  const auto wf = gaussian_packet(g, p);
  double m = 0.0;
  for (std::size_t i = 0; i < g.n_x; ++i)
    for (std::size_t j = 0; j < g.n_v; ++j)
      m = std::max(m, std::abs(wf.at(i, j) - test::analytic_gaussian(g.x(i), g.v(j), p)));
  EXPECT_LT(m, 1e-12);
}

TEST(GaussianPacket, ResolutionAndDomainErrors) {
  const auto g = test::square_grid(8.0, 128);  // cell 0.125
  EXPECT_THROW(gaussian_packet(g, {0, 0, 0.3, 1, 0, 0}), ResolutionError);
  EXPECT_THROW(gaussian_packet(g, {0, 0, 1, 0.3, 0, 0}), ResolutionError);
  EXPECT_NO_THROW(gaussian_packet(g, {0, 0, 0.3, 1, 0, 0}, {}, 2.0));
  EXPECT_THROW(gaussian_packet(g, {4, 0, 1, 1, 0, 0}), DomainError);
  EXPECT_THROW(gaussian_packet(g, {0, -4.0, 1, 0.9, 0, 0}), DomainError);
  EXPECT_THROW(gaussian_packet(g, {0, 0, -1, 1, 0, 0}), ArgumentError);
}

TEST(GaussianPacket, NormIsOneForRandomParameters) {
  std::mt19937_64 rng(11);
  const auto g = test::square_grid(8.0, 128);
  for (int n = 0; n < 40; ++n) {
    const auto p = test::random_interior_packet(rng, g, 0.375, 1.2, 5.5);
    EXPECT_NEAR(norm(gaussian_packet(g, p)), 1.0, 1e-12);
  }
}

TEST(GaussianPacket, OneDimensional) {
  const auto g = make_grid_1d(-8, 8, 256);
  const auto wf = gaussian_packet_1d(g, 1.0, 0.5, 2.0);
  EXPECT_NEAR(norm(wf), 1.0, 1e-12);
  EXPECT_THROW(gaussian_packet_1d(g, 6.0, 0.5), DomainError);
  EXPECT_THROW(gaussian_packet_1d(g, 0.0, 0.1), ResolutionError);
}

TEST(Norm, Examples) {
  const auto g = test::square_grid(8.0, 64);
  const auto wf = gaussian_packet(g, {0, 0, 1, 1, 0, 0});
  EXPECT_NEAR(norm(wf), 1.0, 1e-12);
  EXPECT_EQ(norm(WaveFunction2D(g)), 0.0);
  EXPECT_NEAR(norm(scaled(wf, 2.0)), 2.0, 1e-12);
  auto bad = wf;
  bad.amps[5] = {std::nan(""), 0.0};
  EXPECT_THROW(norm(bad), DataError);
}

TEST(InnerProduct, Examples) {
  const auto g = test::square_grid(8.0, 128);
  const auto a = gaussian_packet(g, {-2.5, 0, 0.5, 0.5, 0, 0});
  const auto b = gaussian_packet(g, {2.5, 0, 0.5, 0.5, 0, 0});
  EXPECT_NEAR(inner_product(a, a).real(), norm(a) * norm(a), 1e-14);
  EXPECT_NEAR(inner_product(a, b).real(), std::exp(-25.0 / (8 * 0.25)), 1e-12);
  // analytic overlap e^{-d^2 / (8 sigma^2)}
  const auto c = gaussian_packet(g, {-2.0, 0, 0.5, 0.5, 0, 0});
  EXPECT_NEAR(inner_product(a, c).real(), std::exp(-0.25 / (8 * 0.25)), 1e-12);
  auto ia = a;
  for (auto& z : ia.amps) z *= Complex(0, 1);
  const auto ip = inner_product(a, ia);
  EXPECT_NEAR(ip.real(), 0.0, 1e-15);
  EXPECT_NEAR(ip.imag(), 1.0, 1e-12);
  EXPECT_THROW(inner_product(a, WaveFunction2D(test::square_grid(8.0, 64))), ShapeError);
}

TEST(InnerProduct, ConjugateSymmetryIsExact) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const auto g = test::square_grid(4.0, 16);
  for (int n = 0; n < 20; ++n) {
    WaveFunction2D a(g), b(g);
    for (auto& z : a.amps) z = {nd(rng), nd(rng)};
    for (auto& z : b.amps) z = {nd(rng), nd(rng)};
    EXPECT_EQ(inner_product(a, b), std::conj(inner_product(b, a)));
  }
}

TEST(Superpose, WeightsAreProbabilities) {
  const auto g = test::square_grid(8.0, 128);
  std::vector<PacketParams> ps{{-3, 0, 0.5, 0.5, 0, 0}, {3, 0, 0.5, 0.5, 0, 0}};
  std::vector<double> w{0.7, 0.3};
  const auto wf = superpose(g, ps, w);
  EXPECT_NEAR(norm(wf), 1.0, 1e-12);
  SpectralWorkspace ws(g);
  // the overlap of the two packets, e^{-36/2}, enters the normalization
  const double overlap = 2 * std::sqrt(0.7 * 0.3) * std::exp(-18.0);
  EXPECT_NEAR(expect(wf, ObservableTag::Position, ws), (0.7 * -3 + 0.3 * 3) / (1 + overlap), 1e-12);
}

TEST(ForceField, PotentialAndForceAreConsistent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-5, 5);
  const std::vector<ForceField> forces{ForceField::free(1.3), ForceField::uniform(9.81, 2.0),
                                       ForceField::harmonic(1.7, 0.5),
                                       ForceField::polynomial({0.3, -1.0, 0.2, 0.05, -0.01}, 1.5)};
  const double h = 1e-5;
  for (const auto& F : forces)
    for (int n = 0; n < 100; ++n) {
      const double x = ux(rng);
      const double dV = (F.potential(x + h) - F.potential(x - h)) / (2 * h) / F.mass();
      EXPECT_LE(std::abs(F.f(x) + dV), 1e-8 * std::max(1.0, std::abs(dV))) << F.name() << " at " << x;
      const double df = (F.f(x + h) - F.f(x - h)) / (2 * h);
      EXPECT_NEAR(F.fprime(x), df, 1e-6 * std::max(1.0, std::abs(df)));
    }
}

TEST(ForceField, ConstantPolynomialIsUniform) {
  const auto F = ForceField::polynomial({-2.5});
  for (double x : {-3.0, 0.0, 1.7, 40.0}) {
    EXPECT_EQ(F.f(x), -2.5);
    EXPECT_EQ(F.fprime(x), 0.0);
  }
}

TEST(ForceField, Validation) {
  EXPECT_THROW(ForceField::free(0.0), ConfigError);
  EXPECT_THROW(ForceField::harmonic(-1.0), ConfigError);
  EXPECT_THROW(ForceField::polynomial(std::vector<double>(10, 1.0)), ConfigError);
  EXPECT_NO_THROW(ForceField::polynomial(std::vector<double>(9, 1.0)));
}

TEST(Wavenumbers, TransformOrderWithNegativeNyquist) {
  const auto k = wavenumbers({0.0, 2 * std::numbers::pi, 8});
  const std::vector<double> expected{0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t m = 0; m < 8; ++m) EXPECT_DOUBLE_EQ(k[m], expected[m]);
  EXPECT_EQ(odd_derivative_k(k, 4), 0.0);
  EXPECT_EQ(odd_derivative_k(k, 3), 3.0);
}
