#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "qreset/model.hpp"

using namespace qreset;

TEST(Protocol, QuenchIsConstant) {
    const Protocol p = Protocol::quench(1.0, 1.0);
    EXPECT_DOUBLE_EQ(p.omega(0.5), 1.0);
    EXPECT_DOUBLE_EQ(p.omega(0.0), 1.0);
    EXPECT_DOUBLE_EQ(p.omega(1.0), 1.0);
    EXPECT_DOUBLE_EQ(p.omega_initial(), 1.0);
    EXPECT_THROW(p.omega(-0.1), std::domain_error);
    EXPECT_THROW(p.omega(1.1), std::domain_error);
}

TEST(Protocol, LinearVanishesAtOrigin) {
    const Protocol p = Protocol::linear(1.0, 1.0);
    EXPECT_DOUBLE_EQ(p.omega(0.0), 0.0);
    EXPECT_DOUBLE_EQ(p.omega_initial(), 0.0);
    EXPECT_DOUBLE_EQ(p.omega(0.75), 0.75);
}

TEST(Protocol, ExponentialDirectEvaluation) {
    // omega(t) = scale (e^{rate t} - 1); at scale = rate = 1, omega(1) = e - 1.
    const Protocol p = Protocol::exponential(1.0, 1.0, 1.0);
    EXPECT_NEAR(p.omega(1.0), std::exp(1.0) - 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(p.omega(0.0), 0.0);
    EXPECT_DOUBLE_EQ(p.omega_initial(), 0.0);
}

TEST(Protocol, TabulatedInterpolatesLinearly) {
    const Protocol p = Protocol::tabulated({{0.0, 0.3}, {1.0, 2.0}});
    EXPECT_DOUBLE_EQ(p.omega_initial(), 0.3);
    EXPECT_NEAR(p.omega(0.5), 1.15, 1e-15);
    EXPECT_DOUBLE_EQ(p.omega(1.0), 2.0);
    EXPECT_DOUBLE_EQ(p.duration(), 1.0);
}

TEST(Protocol, TabulatedValidation) {
    EXPECT_THROW(Protocol::tabulated({{0.0, 0.3}}), ConfigError);
    EXPECT_THROW(Protocol::tabulated({{0.1, 0.3}, {1.0, 2.0}}), ConfigError);
    EXPECT_THROW(Protocol::tabulated({{0.0, 0.3}, {0.0, 2.0}}), ConfigError);
    EXPECT_THROW(Protocol::tabulated({{0.0, 0.3}, {1.0, -0.1}}), ConfigError);
}

TEST(Protocol, ConstructionGuards) {
    EXPECT_THROW(Protocol::quench(-0.1, 1.0), ConfigError);
    EXPECT_THROW(Protocol::quench(1.0, 0.0), ConfigError);
    EXPECT_THROW(Protocol::linear(-1.0, 1.0), ConfigError);
    EXPECT_THROW(Protocol::exponential(-1.0, 1.0, 1.0), ConfigError);
    EXPECT_THROW(Protocol::exponential(1.0, 0.0, 1.0), ConfigError);
    EXPECT_NO_THROW(Protocol::exponential(0.0, 1.0, 1.0));  // omega stays 0
}

TEST(Protocol, FreeFunctionSurface) {
    const Protocol p = Protocol::quench(2.5, 1.0);
    EXPECT_DOUBLE_EQ(omega_at(p, 0.25), 2.5);
    EXPECT_DOUBLE_EQ(omega_zero_plus(p), 2.5);
    EXPECT_DOUBLE_EQ(omega_zero_plus(Protocol::linear(1.0, 1.0)), 0.0);
    EXPECT_DOUBLE_EQ(omega_zero_plus(Protocol::tabulated({{0.0, 0.3}, {1.0, 2.0}})), 0.3);
}

TEST(Protocol, MonotoneClassification) {
    EXPECT_TRUE(Protocol::quench(1.0, 1.0).monotone_increasing());
    EXPECT_TRUE(Protocol::linear(0.0, 1.0).monotone_increasing());
    EXPECT_TRUE(Protocol::exponential(1.0, 2.0, 1.0).monotone_increasing());
    EXPECT_TRUE(
        Protocol::tabulated({{0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}}).monotone_increasing());
    EXPECT_FALSE(
        Protocol::tabulated({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.5}}).monotone_increasing());
}

TEST(Protocol, ContinuityOnOpenInterval) {
    const SystemParams params{1, 1.0, 1.0, 1.0};
    const Protocol protocols[] = {
        standard_protocol("quench", params), standard_protocol("linear", params),
        standard_protocol("exponential", params),
        Protocol::tabulated({{0.0, 0.0}, {0.3, 0.7}, {1.0, 3.0}})};
    for (const Protocol& p : protocols) {
        for (int i = 1; i < 1000; ++i) {
            const double t = i / 1000.0;
            EXPECT_GE(p.omega(t), 0.0);
            EXPECT_NEAR(p.omega(t), p.omega(t - 1e-9), 1e-6);
        }
    }
}

TEST(Protocol, StandardProtocolsUseBetaAndGamma0) {
    const SystemParams params{1, 2.0, 3.0, 1.5};
    EXPECT_DOUBLE_EQ(standard_protocol("quench", params).quench_value(), 0.5);
    EXPECT_DOUBLE_EQ(standard_protocol("linear", params).linear_slope(), 1.5);
    const Protocol e = standard_protocol("exponential", params);
    EXPECT_DOUBLE_EQ(e.exponential_scale(), 0.5);
    EXPECT_DOUBLE_EQ(e.exponential_growth_rate(), 3.0);
    EXPECT_THROW(standard_protocol("triangle", params), ConfigError);
}

TEST(SystemParams, Validation) {
    EXPECT_NO_THROW((SystemParams{1, 1.0, 1.0, 1.0}).validate());
    EXPECT_THROW((SystemParams{0, 1.0, 1.0, 1.0}).validate(), ConfigError);
    EXPECT_THROW((SystemParams{1, 0.0, 1.0, 1.0}).validate(), ConfigError);
    EXPECT_THROW((SystemParams{1, 1.0, -1.0, 1.0}).validate(), ConfigError);
    EXPECT_THROW((SystemParams{1, 1.0, 1.0, 0.0}).validate(), ConfigError);
}

TEST(BuildRates, SymmetricAtZeroSplitting) {
    const RateSet r = build_rates(SystemParams{2, 1.0, 1.0, 1.0}, 0.0);
    EXPECT_DOUBLE_EQ(r.gamma_down, 0.5);
    EXPECT_DOUBLE_EQ(r.gamma_up, 0.5);
    EXPECT_DOUBLE_EQ(r.gamma_gap, 0.0);
}

TEST(BuildRates, DirectFormulaEvaluation) {
    const RateSet r = build_rates(SystemParams{1, 1.0, 1.0, 1.0}, 1.0);
    EXPECT_NEAR(r.gamma_down, 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
    EXPECT_NEAR(r.gamma_up, std::exp(-1.0) / (1.0 + std::exp(-1.0)), 1e-15);
    EXPECT_NEAR(r.gamma_gap, std::tanh(0.5), 1e-15);
}

TEST(BuildRates, LevelRateCoefficients) {
    // down[n] = n (N-n+1) gamma_down; at N=2, n=1 that is 2 gamma_down.
    const SystemParams params{2, 1.0, 1.0, 1.0};
    const RateSet r = build_rates(params, 1.0);
    EXPECT_NEAR(r.down[1], 2.0 * r.gamma_down, 1e-15);
    EXPECT_NEAR(r.down[1], 1.46211715726, 1e-10);
    EXPECT_DOUBLE_EQ(r.down[0], 0.0);
    EXPECT_DOUBLE_EQ(r.up[2], 0.0);
}

TEST(BuildRates, DetailedBalanceProperty) {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> unit(0.05, 4.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double beta = unit(rng);
        const double gamma0 = unit(rng);
        const double omega = 2.0 * unit(rng);
        const RateSet r = build_rates(SystemParams{3, beta, gamma0, 1.0}, omega);
        EXPECT_NEAR(r.gamma_up / r.gamma_down, std::exp(-beta * omega), 1e-12);
        EXPECT_NEAR(r.gamma_down + r.gamma_up, gamma0, 1e-12 * gamma0);
        EXPECT_NEAR(r.gamma_down - r.gamma_up, r.gamma_gap, 1e-12 * gamma0);
    }
}

TEST(BuildRates, BirthAndDeathShareDegeneracy) {
    const SystemParams params{7, 0.8, 1.3, 1.0};
    const RateSet r = build_rates(params, 0.9);
    for (int n = 1; n <= params.n_qubits; ++n) {
        const double degeneracy = static_cast<double>(n) * (params.n_qubits - n + 1);
        EXPECT_NEAR(r.down[n] / r.gamma_down, degeneracy, 1e-12 * degeneracy);
        EXPECT_NEAR(r.up[n - 1] / r.gamma_up, degeneracy, 1e-12 * degeneracy);
        EXPECT_GE(r.down[n], 0.0);
        EXPECT_GE(r.up[n - 1], 0.0);
    }
}

TEST(BuildRates, RejectsNegativeOmega) {
    EXPECT_THROW(build_rates(SystemParams{1, 1.0, 1.0, 1.0}, -0.5), std::domain_error);
}

TEST(DickeDistribution, UniformInitialState) {
    const DickeDistribution one = initial_state(1);
    EXPECT_DOUBLE_EQ(one[0], 0.5);
    EXPECT_DOUBLE_EQ(one[1], 0.5);
    const DickeDistribution three = initial_state(3);
    for (int n = 0; n <= 3; ++n) EXPECT_DOUBLE_EQ(three[n], 0.25);
    EXPECT_THROW(initial_state(0), ConfigError);
}

TEST(DickeDistribution, InvariantEnforcement) {
    EXPECT_NO_THROW(DickeDistribution(1, {0.5, 0.5}));
    EXPECT_NO_THROW(DickeDistribution(2, {0.5, 0.5 + 1e-13, -1e-13}));
    EXPECT_THROW(DickeDistribution(1, {0.7, 0.5}), InvariantError);
    EXPECT_THROW(DickeDistribution(2, {0.6, 0.4 + 1e-11, -1e-11}), InvariantError);
    EXPECT_THROW(DickeDistribution(2, {0.5, 0.5}), ConfigError);
}
