#pragma once

// Brute-force validator: integrates the full Lindblad equation with the
// collective jump operator L = sum_j |g><e|_j on the 2^N-dimensional space,
// projects onto the Dicke basis, and certifies that the (N+1)-level
// birth-death reduction reproduces it. Verification tool only; the
// dimension guard keeps N <= 8.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "qreset/dynamics.hpp"
#include "qreset/errors.hpp"
#include "qreset/model.hpp"

namespace qreset {

using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

/// Collective operators on the computational basis of N qubits. The
/// Hamiltonian is omega(t) times the excitation-count diagonal.
struct CollectiveOperators {
    int n_qubits = 0;
    long dim = 0;
    Eigen::VectorXd excitations;  // popcount of each basis index
    SparseOperator lowering;      // L
    SparseOperator raising;       // L^dagger
    SparseOperator raise_lower;   // L^dagger L
    SparseOperator lower_raise;   // L L^dagger
};

inline CollectiveOperators build_operators(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 8) {
        throw ConfigError("full-space oracle supports 1 <= N <= 8");
    }
    CollectiveOperators ops;
    ops.n_qubits = n_qubits;
    ops.dim = 1L << n_qubits;
    ops.excitations.resize(ops.dim);
    std::vector<Eigen::Triplet<std::complex<double>>> entries;
    for (long idx = 0; idx < ops.dim; ++idx) {
        ops.excitations[idx] = static_cast<double>(std::popcount(static_cast<unsigned long>(idx)));
        for (int bit = 0; bit < n_qubits; ++bit) {
            if (idx & (1L << bit)) {
                entries.emplace_back(idx & ~(1L << bit), idx, 1.0);
            }
        }
    }
    ops.lowering.resize(ops.dim, ops.dim);
    ops.lowering.setFromTriplets(entries.begin(), entries.end());
    ops.raising = SparseOperator(ops.lowering.adjoint());
    ops.raise_lower = ops.raising * ops.lowering;
    ops.lower_raise = ops.lowering * ops.raising;
    return ops;
}

/// Dense Hamiltonian at splitting omega (diagonal, entry = omega * popcount).
inline Eigen::MatrixXcd hamiltonian(const CollectiveOperators& ops, double omega) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ops.dim, ops.dim);
    for (long idx = 0; idx < ops.dim; ++idx) {
        h(idx, idx) = omega * ops.excitations[idx];
    }
    return h;
}

/// Columns n = 0..N are the Dicke states: uniform amplitude 1/sqrt(C(N,n))
/// over all computational states with n excitations.
inline Eigen::MatrixXd dicke_basis(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 8) {
        throw ConfigError("full-space oracle supports 1 <= N <= 8");
    }
    const long dim = 1L << n_qubits;
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, n_qubits + 1);
    std::vector<double> counts(static_cast<std::size_t>(n_qubits) + 1, 0.0);
    for (long idx = 0; idx < dim; ++idx) {
        counts[static_cast<std::size_t>(std::popcount(static_cast<unsigned long>(idx)))] += 1.0;
    }
    for (long idx = 0; idx < dim; ++idx) {
        const int n = std::popcount(static_cast<unsigned long>(idx));
        basis(idx, n) = 1.0 / std::sqrt(counts[static_cast<std::size_t>(n)]);
    }
    return basis;
}

/// Dicke-level populations and heat from the full-space run.
struct FullTrajectory {
    int n_qubits = 0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> populations;  // <D_n| rho |D_n> per sample
    std::vector<double> heat_acc;
    std::vector<double> leakage;  // 1 - sum_n populations
};

struct DeviationReport {
    double max_population_deviation = 0.0;
    double heat_deviation = 0.0;
    double max_leakage = 0.0;
};

namespace detail {

struct OracleState {
    Eigen::MatrixXcd rho;
    double heat = 0.0;
};

inline OracleState operator+(OracleState a, const OracleState& b) {
    a.rho += b.rho;
    a.heat += b.heat;
    return a;
}

inline OracleState operator*(double s, OracleState a) {
    a.rho *= s;
    a.heat *= s;
    return a;
}

inline OracleState lindblad_rhs(const CollectiveOperators& ops, double omega,
                                double gamma_down, double gamma_up,
                                const Eigen::MatrixXcd& rho) {
    OracleState d;
    d.rho.noalias() = gamma_down * ((ops.lowering * rho) * ops.raising);
    d.rho.noalias() += gamma_up * ((ops.raising * rho) * ops.lowering);
    d.rho.noalias() -= 0.5 * gamma_down * (ops.raise_lower * rho);
    d.rho.noalias() -= 0.5 * gamma_down * (rho * ops.raise_lower);
    d.rho.noalias() -= 0.5 * gamma_up * (ops.lower_raise * rho);
    d.rho.noalias() -= 0.5 * gamma_up * (rho * ops.lower_raise);
    const std::complex<double> minus_i(0.0, -1.0);
    for (long b = 0; b < ops.dim; ++b) {
        for (long a = 0; a < ops.dim; ++a) {
            d.rho(a, b) += minus_i * omega * (ops.excitations[a] - ops.excitations[b]) *
                           rho(a, b);
        }
    }
    double excitation_change = 0.0;
    for (long a = 0; a < ops.dim; ++a) {
        excitation_change += ops.excitations[a] * d.rho(a, a).real();
    }
    d.heat = -omega * excitation_change;
    return d;
}

inline double scaled_max_error(const OracleState& err, const OracleState& y0,
                               const OracleState& y1, double rel, double abs) {
    double worst = 0.0;
    for (long b = 0; b < err.rho.cols(); ++b) {
        for (long a = 0; a < err.rho.rows(); ++a) {
            const double scale =
                abs + rel * std::max(std::abs(y0.rho(a, b)), std::abs(y1.rho(a, b)));
            worst = std::max(worst, std::abs(err.rho(a, b)) / scale);
        }
    }
    const double scale = abs + rel * std::max(std::abs(y0.heat), std::abs(y1.heat));
    return std::max(worst, std::abs(err.heat) / scale);
}

}  // namespace detail

/// Integrates the full master equation from the Dicke-diagonal mixture
/// rho(0) = sum_n |D_n><D_n| / (N+1), sampling at the given grid times.
/// Trace and Hermiticity are verified at every sample to 1e-10; positivity
/// of rho is verified at the final sample.
inline FullTrajectory integrate_full(const SystemParams& params, const Protocol& protocol,
                                     std::vector<double> grid, double rel_tol = 1e-8,
                                     double abs_tol = 1e-12) {
    params.validate();
    const CollectiveOperators ops = build_operators(params.n_qubits);
    const Eigen::MatrixXd basis = dicke_basis(params.n_qubits);

    if (grid.empty()) {
        const int points = 201;
        grid.resize(points);
        for (int i = 0; i < points; ++i) {
            grid[static_cast<std::size_t>(i)] = params.tau * i / (points - 1);
        }
    }
    if (grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
    if (grid.back() < params.tau) grid.push_back(params.tau);

    detail::OracleState y;
    y.rho = (basis * basis.transpose()).cast<std::complex<double>>() /
            (static_cast<double>(params.n_qubits) + 1.0);
    y.heat = 0.0;

    FullTrajectory out;
    out.n_qubits = params.n_qubits;

    auto record = [&](double t, const detail::OracleState& state) {
        const double trace_err = std::abs(state.rho.trace().real() - 1.0) +
                                 std::abs(state.rho.trace().imag());
        if (trace_err > 1e-10) throw InvariantError("oracle: trace drift beyond 1e-10");
        const double herm_err = (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
        if (herm_err > 1e-10) throw InvariantError("oracle: Hermiticity drift beyond 1e-10");
        Eigen::VectorXd pops(params.n_qubits + 1);
        for (int n = 0; n <= params.n_qubits; ++n) {
            const Eigen::VectorXcd col = basis.col(n).cast<std::complex<double>>();
            pops[n] = (col.adjoint() * state.rho * col)(0, 0).real();
        }
        out.times.push_back(t);
        out.populations.push_back(pops);
        out.heat_acc.push_back(state.heat);
        out.leakage.push_back(1.0 - pops.sum());
    };

    auto rhs = [&](double t, const detail::OracleState& state) {
        const double omega = protocol.omega(std::min(t, params.tau));
        const RateSet r = build_rates(params, omega);
        return detail::lindblad_rhs(ops, omega, r.gamma_down, r.gamma_up, state.rho);
    };

    record(0.0, y);
    std::size_t next = (grid.front() == 0.0) ? 1 : 0;

    double t = 0.0;
    double h = params.tau * 1e-3;
    long attempts = 0;
    const long max_steps = 2'000'000;
    while (next < grid.size()) {
        const double target = grid[next];
        if (++attempts > max_steps) {
            throw IntegrationError("oracle: max_steps exceeded", Trajectory{});
        }
        bool hits_target = false;
        if (t + h >= target) {
            h = target - t;
            hits_target = true;
        }

        using detail::operator+;
        using detail::operator*;
        const detail::OracleState k1 = rhs(t, y);
        const detail::OracleState k2 = rhs(t + h / 5.0, y + (h / 5.0) * k1);
        const detail::OracleState k3 =
            rhs(t + 3.0 * h / 10.0, y + (3.0 * h / 40.0) * k1 + (9.0 * h / 40.0) * k2);
        const detail::OracleState k4 =
            rhs(t + 4.0 * h / 5.0, y + (44.0 * h / 45.0) * k1 + (-56.0 * h / 15.0) * k2 +
                                       (32.0 * h / 9.0) * k3);
        const detail::OracleState k5 =
            rhs(t + 8.0 * h / 9.0,
                y + (19372.0 * h / 6561.0) * k1 + (-25360.0 * h / 2187.0) * k2 +
                    (64448.0 * h / 6561.0) * k3 + (-212.0 * h / 729.0) * k4);
        const detail::OracleState k6 =
            rhs(t + h, y + (9017.0 * h / 3168.0) * k1 + (-355.0 * h / 33.0) * k2 +
                           (46732.0 * h / 5247.0) * k3 + (49.0 * h / 176.0) * k4 +
                           (-5103.0 * h / 18656.0) * k5);
        const detail::OracleState y_next =
            y + (35.0 * h / 384.0) * k1 + (500.0 * h / 1113.0) * k3 +
            (125.0 * h / 192.0) * k4 + (-2187.0 * h / 6784.0) * k5 + (11.0 * h / 84.0) * k6;
        const detail::OracleState k7 = rhs(t + h, y_next);
        const detail::OracleState err =
            (71.0 * h / 57600.0) * k1 + (-71.0 * h / 16695.0) * k3 +
            (71.0 * h / 1920.0) * k4 + (-17253.0 * h / 339200.0) * k5 +
            (22.0 * h / 525.0) * k6 + (-h / 40.0) * k7;

        const double err_norm = detail::scaled_max_error(err, y, y_next, rel_tol, abs_tol);
        if (std::isfinite(err_norm) && err_norm <= 1.0) {
            t += h;
            y = y_next;
            if (hits_target) {
                record(target, y);
                t = target;
                ++next;
            }
        }
        double factor = 0.25;  // non-finite error: retreat hard
        if (err_norm == 0.0) {
            factor = 5.0;
        } else if (std::isfinite(err_norm)) {
            factor = 0.9 * std::pow(err_norm, -0.2);
        }
        h *= std::min(5.0, std::max(0.1, factor));
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(t, 1.0)) {
            throw IntegrationError("oracle: step size underflow", Trajectory{});
        }
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigs(
        0.5 * (y.rho + Eigen::MatrixXcd(y.rho.adjoint())));
    if (eigs.eigenvalues().minCoeff() < -1e-10) {
        throw InvariantError("oracle: final density matrix not positive within 1e-10");
    }
    return out;
}

/// Max-over-time, max-over-level population deviation plus the final heat
/// deviation between the full-space run and the reduced chain. Requires the
/// two runs to share their sample grid.
inline DeviationReport compare(const FullTrajectory& full, const Trajectory& reduced) {
    if (full.times.size() != reduced.times.size() || full.n_qubits != reduced.n_qubits) {
        throw std::invalid_argument("oracle comparison requires matching grids");
    }
    DeviationReport report;
    for (std::size_t i = 0; i < full.times.size(); ++i) {
        if (std::abs(full.times[i] - reduced.times[i]) > 1e-12) {
            throw std::invalid_argument("oracle comparison requires matching grids");
        }
        for (int n = 0; n <= full.n_qubits; ++n) {
            report.max_population_deviation =
                std::max(report.max_population_deviation,
                         std::abs(full.populations[i][n] - reduced.states[i][n]));
        }
        report.max_leakage = std::max(report.max_leakage, std::abs(full.leakage[i]));
    }
    report.heat_deviation = std::abs(full.heat_acc.back() - reduced.heat_acc.back());
    return report;
}

}  // namespace qreset
