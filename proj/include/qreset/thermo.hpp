#pragma once

// Scalar observables of states and trajectories: error probability, moments,
// distances, activity, entropy, and the reset factor that scores a run.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qreset/dynamics.hpp"
#include "qreset/errors.hpp"
#include "qreset/interp.hpp"
#include "qreset/model.hpp"

namespace qreset {

/// Fraction of qubits left in the excited state, (1/N) sum_n n p_n.
/// Equals 1/2 for the uniform initial state and the single-qubit excited
/// population at N = 1.
inline double error_probability(const DickeDistribution& d) {
    double acc = 0.0;
    for (int n = 1; n <= d.n_qubits(); ++n) {
        acc += static_cast<double>(n) * d[n];
    }
    return acc / static_cast<double>(d.n_qubits());
}

/// Mean squared excitation fraction, sum_n (n/N)^2 p_n. Reported as "zeta"
/// in trajectory exports; controls the collective term of the
/// error-probability equation.
inline double excitation_second_moment(const DickeDistribution& d) {
    double acc = 0.0;
    const double n_sq = static_cast<double>(d.n_qubits()) * d.n_qubits();
    for (int n = 1; n <= d.n_qubits(); ++n) {
        acc += static_cast<double>(n) * n * d[n] / n_sq;
    }
    return acc;
}

/// 1-norm distance sum_n |a_n - b_n|, in [0, 2].
inline double one_norm_distance(const DickeDistribution& a, const DickeDistribution& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw std::invalid_argument("distributions of different dimension");
    }
    double acc = 0.0;
    for (int n = 0; n <= a.n_qubits(); ++n) {
        acc += std::abs(a[n] - b[n]);
    }
    return acc;
}

/// Shannon entropy -sum p ln p (k_B = 1).
inline double shannon_entropy(const DickeDistribution& d) {
    double acc = 0.0;
    for (int n = 0; n <= d.n_qubits(); ++n) {
        const double p = d[n];
        if (p > 0.0) acc -= p * std::log(p);
    }
    return acc;
}

/// Time-averaged dynamical activity over the run, activity_integral(tau)/tau.
inline double avg_dynamical_activity(const Trajectory& traj) {
    const double span = traj.duration();
    if (!(span > 0.0)) throw std::invalid_argument("trajectory spans zero time");
    return traj.activity_integral.back() / span;
}

/// Reset factor F = Q tau / (1 - 2 eps)^2 (per-qubit heat Q). Smaller is
/// better; undefined when eps = 1/2 because no reset progress was made.
inline double reset_factor(double heat_per_qubit, double tau, double epsilon) {
    const double progress = 1.0 - 2.0 * epsilon;
    if (progress == 0.0) {
        throw std::domain_error("reset factor undefined at epsilon = 1/2");
    }
    return heat_per_qubit * tau / (progress * progress);
}

/// All end-of-run scalars in one record. reset_factor is absent when the
/// run made no progress (eps stayed exactly 1/2).
struct ResetSummary {
    double epsilon_final = 0.0;
    double heat_total = 0.0;
    double heat_per_qubit = 0.0;
    double distance = 0.0;            // 1-norm between final and initial states
    double avg_activity = 0.0;
    double entropy_production = 0.0;
    std::optional<double> reset_factor;
};

inline ResetSummary summarize(const Trajectory& traj, const SystemParams& params) {
    if (traj.size() < 2) throw std::invalid_argument("trajectory has no time span");
    if (traj.n_qubits != params.n_qubits) {
        throw std::invalid_argument("trajectory/params dimension mismatch");
    }
    ResetSummary s;
    s.epsilon_final = error_probability(traj.final());
    s.heat_total = traj.heat_acc.back();
    s.heat_per_qubit = s.heat_total / params.n_qubits;
    s.distance = one_norm_distance(traj.final(), traj.initial());
    s.avg_activity = avg_dynamical_activity(traj);
    s.entropy_production = traj.ep_acc.back();
    // Runs that made no measurable progress (eps pinned at 1/2 up to noise)
    // have no meaningful reset factor; leave it unset rather than report a
    // noise-dominated huge number.
    if (std::abs(1.0 - 2.0 * s.epsilon_final) > 1e-9) {
        s.reset_factor = reset_factor(s.heat_per_qubit, traj.duration(), s.epsilon_final);
    }
    return s;
}

/// C^1 interpolant of zeta(t) along a run, with exact derivatives from the
/// master equation at every sample. This is the zeta source handed to
/// integrate_error_probability_ode for the cross-check.
inline PiecewiseCubic zeta_history(const Trajectory& traj, const SystemParams& params,
                                   const Protocol& protocol) {
    const std::size_t m = traj.size();
    std::vector<double> values(m), derivs(m);
    std::vector<double> dpdt;
    const double n_sq =
        static_cast<double>(params.n_qubits) * static_cast<double>(params.n_qubits);
    for (std::size_t i = 0; i < m; ++i) {
        values[i] = excitation_second_moment(traj.states[i]);
        const RateSet rates = build_rates(params, protocol.omega(traj.times[i]));
        detail::master_rhs_raw(rates, traj.states[i].probabilities(), dpdt);
        double dz = 0.0;
        for (std::size_t n = 1; n < dpdt.size(); ++n) {
            dz += static_cast<double>(n) * static_cast<double>(n) * dpdt[n];
        }
        derivs[i] = dz / n_sq;
    }
    return PiecewiseCubic(std::vector<double>(traj.times), std::move(values),
                          std::move(derivs));
}

}  // namespace qreset
