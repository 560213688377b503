#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "qreset/dynamics.hpp"
#include "qreset/model.hpp"
#include "qreset/thermo.hpp"

using namespace qreset;

TEST(ErrorProbability, UniformStateIsOneHalfForAllSizes) {
    for (int n = 1; n <= 20; ++n) {
        EXPECT_NEAR(error_probability(initial_state(n)), 0.5, 1e-15) << "N=" << n;
    }
}

TEST(ErrorProbability, DirectWeightedSum) {
    EXPECT_DOUBLE_EQ(error_probability(DickeDistribution(2, {1.0, 0.0, 0.0})), 0.0);
    EXPECT_NEAR(error_probability(DickeDistribution(2, {0.5, 0.3, 0.2})), 0.35, 1e-15);
    // N = 1: epsilon is the excited-state population itself.
    EXPECT_DOUBLE_EQ(error_probability(DickeDistribution(1, {0.3, 0.7})), 0.7);
}

TEST(SecondMoment, MatchesEpsilonForSingleQubit) {
    const DickeDistribution d(1, {0.4, 0.6});
    EXPECT_DOUBLE_EQ(excitation_second_moment(d), error_probability(d));
}

TEST(SecondMoment, DirectSums) {
    EXPECT_NEAR(excitation_second_moment(initial_state(2)), 5.0 / 12.0, 1e-15);
    EXPECT_DOUBLE_EQ(excitation_second_moment(DickeDistribution(3, {1.0, 0.0, 0.0, 0.0})),
                     0.0);
}

TEST(OneNormDistance, Examples) {
    const DickeDistribution uniform1 = initial_state(1);
    EXPECT_DOUBLE_EQ(one_norm_distance(uniform1, uniform1), 0.0);
    EXPECT_DOUBLE_EQ(one_norm_distance(DickeDistribution(1, {1.0, 0.0}), uniform1), 1.0);
    EXPECT_NEAR(one_norm_distance(DickeDistribution(2, {1.0, 0.0, 0.0}),
                                  initial_state(2)),
                4.0 / 3.0, 1e-15);
    EXPECT_THROW(one_norm_distance(uniform1, initial_state(2)), std::invalid_argument);
}

TEST(ShannonEntropy, UniformIsLogLevels) {
    for (int n : {1, 3, 7}) {
        EXPECT_NEAR(shannon_entropy(initial_state(n)), std::log(n + 1.0), 1e-12);
    }
    EXPECT_DOUBLE_EQ(shannon_entropy(DickeDistribution(2, {1.0, 0.0, 0.0})), 0.0);
}

TEST(AvgActivity, StationarySymmetricCase) {
    // omega = 0, N = 1: activity rate is exactly gamma0/2.
    const SystemParams params{1, 1.0, 1.0, 1.0};
    const Trajectory traj = integrate(params, Protocol::linear(0.0, 1.0));
    EXPECT_NEAR(avg_dynamical_activity(traj), 0.5, 1e-9);
}

TEST(AvgActivity, SingleQubitQuenchStaysBelowHalfGamma) {
    const SystemParams params{1, 1.0, 1.0, 1.0};
    const Trajectory traj = integrate(params, standard_protocol("quench", params));
    EXPECT_LE(avg_dynamical_activity(traj), 0.5 + 1e-12);
}

TEST(AvgActivity, CollectiveUpperBound) {
    const SystemParams params{3, 1.0, 1.0, 1.0};
    const Trajectory traj = integrate(params, standard_protocol("quench", params));
    EXPECT_LE(avg_dynamical_activity(traj), params.gamma0 * 16.0 / 4.0);
}

TEST(ResetFactor, ClosedFormBenchmark) {
    const double p_eq = 1.0 / (1.0 + std::exp(1.0));
    const double eps = p_eq + (0.5 - p_eq) * std::exp(-1.0);
    const double heat = 1.0 * (0.5 - eps);
    const double f = reset_factor(heat, 1.0, eps);
    EXPECT_NEAR(f, heat / ((1.0 - 2.0 * eps) * (1.0 - 2.0 * eps)), 1e-15);
    EXPECT_NEAR(f, 1.7117, 5e-4);
    EXPECT_GT(f, 1.0);  // single-qubit trade-off
}

TEST(ResetFactor, UndefinedAtHalf) {
    EXPECT_THROW(reset_factor(0.1, 1.0, 0.5), std::domain_error);
}

TEST(Summarize, QuenchBenchmarkValues) {
    const SystemParams params{1, 1.0, 1.0, 1.0};
    const Trajectory traj = integrate(params, standard_protocol("quench", params));
    const ResetSummary s = summarize(traj, params);

    const double p_eq = 1.0 / (1.0 + std::exp(1.0));
    const double eps = p_eq + (0.5 - p_eq) * std::exp(-1.0);
    EXPECT_NEAR(s.epsilon_final, eps, 1e-7);
    EXPECT_NEAR(s.heat_total, 0.5 - eps, 1e-7);
    EXPECT_DOUBLE_EQ(s.heat_per_qubit, s.heat_total);
    // D = 1 - 2 eps is an identity at N = 1, so it is tight against the
    // simulated epsilon and only integration-accurate against the closed form.
    EXPECT_NEAR(s.distance, 1.0 - 2.0 * s.epsilon_final, 1e-12);
    EXPECT_NEAR(s.distance, 1.0 - 2.0 * eps, 3e-7);
    ASSERT_TRUE(s.reset_factor.has_value());
    EXPECT_NEAR(*s.reset_factor, 1.7117, 1e-3);
}

TEST(Summarize, NoProgressRunFlagsResetFactorUndefined) {
    const SystemParams params{2, 1.0, 1.0, 1.0};
    const Trajectory traj = integrate(params, Protocol::linear(0.0, 1.0));
    const ResetSummary s = summarize(traj, params);
    EXPECT_NEAR(s.epsilon_final, 0.5, 1e-10);
    EXPECT_NEAR(s.heat_total, 0.0, 1e-10);
    EXPECT_FALSE(s.reset_factor.has_value());
}

TEST(ZetaHistory, EqualsEpsilonForSingleQubit) {
    const SystemParams params{1, 1.0, 1.0, 1.0};
    const Protocol protocol = standard_protocol("quench", params);
    const Trajectory traj = integrate(params, protocol);
    const PiecewiseCubic zeta = zeta_history(traj, params, protocol);
    for (std::size_t i = 0; i < traj.size(); i += 7) {
        EXPECT_NEAR(zeta(traj.times[i]), error_probability(traj.states[i]), 1e-12);
    }
}

TEST(ZetaBound, PointwiseAlongMonotoneRun) {
    // zeta <= (2/3 + 1/(3N)) eps along monotone-increasing drive, N >= 2.
    const SystemParams params{2, 1.0, 1.0, 1.0};
    const Trajectory traj = integrate(params, standard_protocol("linear", params));
    const double coeff = 2.0 / 3.0 + 1.0 / 6.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        EXPECT_LE(excitation_second_moment(traj.states[i]),
                  coeff * error_probability(traj.states[i]) + 1e-12);
    }
}
