// Acceptance suite: each test is one acceptance criterion, run end to end at
// its stated tolerance, with an explicit [ACCEPTANCE] pass/fail line printed
// for the run log. beta = gamma0 = tau = 1 throughout (the figure defaults).

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qreset/bounds.hpp"
#include "qreset/dynamics.hpp"
#include "qreset/experiments.hpp"
#include "qreset/model.hpp"
#include "qreset/oracle.hpp"
#include "qreset/thermo.hpp"

using namespace qreset;

namespace {

void report(int criterion, const std::string& label) {
    std::printf("[ACCEPTANCE] criterion %d (%s): %s\n", criterion, label.c_str(),
                ::testing::Test::HasFailure() ? "FAIL" : "PASS");
    std::fflush(stdout);
}

// The shared figure sweep: three standard protocols, N = 1..1024 in powers
// of two, beta = gamma0 = tau = 1. Computed once and reused by the criteria
// that read the figure grids.
const std::vector<SweepRow>& figure_sweep() {
    static const std::vector<SweepRow> rows = [] {
        return sweep(SweepSpec::figure_defaults());
    }();
    return rows;
}

const SweepRow& row_for(const std::string& protocol, int n) {
    for (const SweepRow& row : figure_sweep()) {
        if (row.protocol == protocol && row.n_qubits == n) return row;
    }
    throw std::logic_error("missing sweep row");
}

std::vector<double> uniform_grid(double tau, int points) {
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = tau * i / (points - 1);
    }
    return grid;
}

constexpr const char* kProtocols[] = {"quench", "linear", "exponential"};

}  // namespace

TEST(Acceptance, Criterion1_TwoLevelClosedForm) {
    const SystemParams params{1, 1.0, 1.0, 1.0};
    IntegratorOptions opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-15;
    const Trajectory traj = integrate(params, standard_protocol("quench", params), opts);
    const ResetSummary s = summarize(traj, params);

    const double p_eq = 1.0 / (1.0 + std::exp(1.0));
    const double eps_closed = p_eq + (0.5 - p_eq) * std::exp(-1.0);
    const double heat_closed = 0.5 - eps_closed;
    const double f_closed =
        heat_closed / ((1.0 - 2.0 * eps_closed) * (1.0 - 2.0 * eps_closed));

    EXPECT_NEAR(eps_closed, 0.353944, 1e-6);
    EXPECT_NEAR(heat_closed, 0.146056, 1e-6);
    EXPECT_NEAR(f_closed, 1.7117, 1e-4);

    EXPECT_NEAR(s.epsilon_final, eps_closed, 1e-8);
    EXPECT_NEAR(s.heat_total, heat_closed, 1e-8);
    ASSERT_TRUE(s.reset_factor.has_value());
    EXPECT_NEAR(*s.reset_factor, f_closed, 1e-6);
    EXPECT_GT(*s.reset_factor, 1.0);  // beats the single-qubit bound 1/(beta gamma0)

    report(1, "two-level closed form");
}

TEST(Acceptance, Criterion2_OracleEquivalence) {
    const std::vector<double> grid = uniform_grid(1.0, 151);
    for (int n : {2, 3, 4, 5, 6}) {
        const SystemParams params{n, 1.0, 1.0, 1.0};
        for (const char* name : kProtocols) {
            const Protocol protocol = standard_protocol(name, params);
            const FullTrajectory full = integrate_full(params, protocol, grid);
            IntegratorOptions opts;
            opts.output_grid = grid;
            const Trajectory reduced = integrate(params, protocol, opts);
            const DeviationReport dev = compare(full, reduced);
            EXPECT_LE(dev.max_population_deviation, 1e-6) << "N=" << n << " " << name;
            EXPECT_LE(dev.heat_deviation, 1e-6) << "N=" << n << " " << name;
            EXPECT_LE(dev.max_leakage, 1e-8) << "N=" << n << " " << name;
        }
    }
    report(2, "full-Lindblad oracle equivalence, N = 2..6");
}

TEST(Acceptance, Criterion3_ErrorProbabilityScaling) {
    for (const char* name : kProtocols) {
        const ScalingFit fit = scaling_fit(figure_sweep(), name, 128.0, 1024.0);
        EXPECT_NEAR(fit.slope, -1.0, 0.1) << name;

        double previous = 1.0;
        for (int n = 1; n <= 1024; n *= 2) {
            const double eps = row_for(name, n).summary.epsilon_final;
            EXPECT_LT(eps, previous) << name << " N=" << n;
            previous = eps;
        }
    }
    report(3, "epsilon ~ 1/N scaling over N in [128, 1024]");
}

TEST(Acceptance, Criterion4_PerQubitHeatLimits) {
    // Quench: per-qubit heat converges toward omega(0+)/2 = 1/2.
    const double q64 = row_for("quench", 64).summary.heat_per_qubit;
    const double q1024 = row_for("quench", 1024).summary.heat_per_qubit;
    EXPECT_LT(std::abs(q1024 - 0.5), std::abs(q64 - 0.5));
    EXPECT_LT(std::abs(q1024 - 0.5), 0.1);

    // Initially continuous protocols: per-qubit heat drains toward zero.
    for (const char* name : {"linear", "exponential"}) {
        const double h64 = row_for(name, 64).summary.heat_per_qubit;
        const double h1024 = row_for(name, 1024).summary.heat_per_qubit;
        EXPECT_LT(h1024, h64) << name;
        EXPECT_LT(h1024, 0.05) << name;
    }
    report(4, "per-qubit heat limits (quench -> 1/2, continuous -> 0)");
}

TEST(Acceptance, Criterion5_QuasistaticLandauer) {
    const SystemParams base{1, 1.0, 1.0, 1.0};
    for (int n : {1, 2, 3, 4}) {
        const std::vector<QuasistaticPoint> table =
            quasistatic_convergence(n, base, {1e4}, 10.0);
        const double landauer = std::log(n + 1.0);
        EXPECT_NEAR(table[0].heat_total, landauer, 0.02 * landauer) << "N=" << n;
    }
    report(5, "quasistatic heat = ln(N+1)/beta within 2%");
}

TEST(Acceptance, Criterion6_HardInequalities) {
    for (const char* name : kProtocols) {
        for (int n : {1, 2, 4, 8, 16, 64, 256}) {
            const SweepRow& row = row_for(name, n);
            ASSERT_TRUE(row.ok) << row.error;
            for (const BoundReport& report_ : row.bounds) {
                if (!report_.applicable || !report_.hard) continue;
                EXPECT_TRUE(report_.satisfied)
                    << report_.name << " N=" << n << " " << name
                    << " lhs=" << report_.lhs << " rhs=" << report_.rhs;
            }
            if (n == 1) {
                // D = 1 - 2 eps exactly for a single qubit.
                EXPECT_NEAR(row.summary.distance,
                            1.0 - 2.0 * row.summary.epsilon_final, 1e-9)
                    << name;
            }
        }
    }
    report(6, "speed limit, distance, activity, reset-factor, sigma, zeta");
}

TEST(Acceptance, Criterion7_ResetFactorDecreasesWithN) {
    for (const char* name : kProtocols) {
        double previous = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= 1024; n *= 2) {
            const SweepRow& row = row_for(name, n);
            ASSERT_TRUE(row.summary.reset_factor.has_value());
            EXPECT_LT(*row.summary.reset_factor, previous) << name << " N=" << n;
            previous = *row.summary.reset_factor;
        }
    }
    // Large-N collective reset beats the single-qubit bound 1/(beta gamma0).
    EXPECT_LT(*row_for("linear", 1024).summary.reset_factor, 1.0);
    EXPECT_LT(*row_for("exponential", 1024).summary.reset_factor, 1.0);
    report(7, "reset factor decreasing in N; breaks single-qubit bound");
}

TEST(Acceptance, Criterion8_AsymptoticWindow) {
    const auto [lower, upper] = asymptotic_window(1.0, 1.0);
    EXPECT_NEAR(lower, 0.58198, 1e-5);
    EXPECT_NEAR(upper, 1.74594, 1e-5);
    const double n_eps = 1024.0 * row_for("quench", 1024).summary.epsilon_final;
    EXPECT_GE(n_eps, 0.9 * lower);
    EXPECT_LE(n_eps, 1.1 * upper);
    report(8, "N * epsilon inside the widened large-N window");
}

TEST(Acceptance, Criterion9_EpsilonOdeCrossCheck) {
    for (int n : {1, 16, 64}) {
        const SystemParams params{n, 1.0, 1.0, 1.0};
        for (const char* name : kProtocols) {
            const Protocol protocol = standard_protocol(name, params);
            const Trajectory traj = integrate(params, protocol);
            const PiecewiseCubic zeta = zeta_history(traj, params, protocol);
            const PiecewiseCubic eps_ode =
                integrate_error_probability_ode(params, protocol, std::cref(zeta));
            double worst = 0.0;
            for (std::size_t i = 0; i < traj.size(); ++i) {
                worst = std::max(worst, std::abs(eps_ode(traj.times[i]) -
                                                 error_probability(traj.states[i])));
            }
            EXPECT_LE(worst, 1e-6) << "N=" << n << " " << name;
        }
    }
    report(9, "epsilon ODE reproduces the chain to 1e-6");
}
