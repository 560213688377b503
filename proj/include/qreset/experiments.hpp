#pragma once

// Parameter sweeps over qubit number and protocol, the log-log scaling fit,
// the parallel-vs-collective comparison, and the quasistatic convergence
// study toward the collective Landauer cost.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include "qreset/bounds.hpp"
#include "qreset/dynamics.hpp"
#include "qreset/errors.hpp"
#include "qreset/model.hpp"
#include "qreset/thermo.hpp"

namespace qreset {

struct SweepSpec {
    std::vector<int> n_values;                 // sorted, >= 1
    std::vector<std::string> protocol_names;   // resolved via standard_protocol
    SystemParams base;                         // N overridden per point
    IntegratorOptions integrator;

    void validate() const {
        base.validate();
        if (n_values.empty()) throw ConfigError("sweep needs at least one N");
        if (protocol_names.empty()) throw ConfigError("sweep needs at least one protocol");
        for (std::size_t i = 0; i < n_values.size(); ++i) {
            if (n_values[i] < 1) throw ConfigError("sweep N values must be >= 1");
            if (i > 0 && n_values[i] <= n_values[i - 1]) {
                throw ConfigError("sweep N values must be strictly increasing");
            }
        }
    }

    /// The grid behind the fig2a/fig2b/fig3 outputs: three standard
    /// protocols over N = 1..1024 in powers of two at beta = gamma0 = tau = 1.
    static SweepSpec figure_defaults() {
        SweepSpec spec;
        for (int n = 1; n <= 1024; n *= 2) spec.n_values.push_back(n);
        spec.protocol_names = {"quench", "linear", "exponential"};
        spec.base = SystemParams{1, 1.0, 1.0, 1.0};
        return spec;
    }
};

/// One (N, protocol) point of a sweep. Failures are recorded per row so a
/// bad point cannot take down the rest of the table.
struct SweepRow {
    int n_qubits = 0;
    std::string protocol;
    ResetSummary summary;
    std::vector<BoundReport> bounds;
    bool ok = false;
    std::string error;
};

/// Runs every (N, protocol) combination. Rows are shared-nothing and run on
/// `workers` threads (0 = hardware concurrency); assembly order is by
/// (protocol, N) regardless of completion order.
inline std::vector<SweepRow> sweep(const SweepSpec& spec, int workers = 0) {
    spec.validate();
    std::vector<SweepRow> rows(spec.protocol_names.size() * spec.n_values.size());

    auto run_row = [&spec, &rows](std::size_t index) {
        const std::size_t pi = index / spec.n_values.size();
        const std::size_t ni = index % spec.n_values.size();
        SweepRow& row = rows[index];
        row.n_qubits = spec.n_values[ni];
        row.protocol = spec.protocol_names[pi];
        try {
            SystemParams params = spec.base;
            params.n_qubits = row.n_qubits;
            const Protocol protocol = standard_protocol(row.protocol, params);
            const Trajectory traj = integrate(params, protocol, spec.integrator);
            row.summary = summarize(traj, params);
            row.bounds = standard_bound_checks(traj, row.summary, params, protocol);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

    int thread_count = workers > 0 ? workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (thread_count < 1) thread_count = 1;
    thread_count = std::min<int>(thread_count, static_cast<int>(rows.size()));

    if (thread_count == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int w = 0; w < thread_count; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = cursor.fetch_add(1); i < rows.size();
                     i = cursor.fetch_add(1)) {
                    run_row(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return rows;
}

/// Least-squares exponent of a log-log relationship epsilon ~ N^slope.
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;  // ln(epsilon) at ln(N) = 0
    double n_min = 0.0;
    double n_max = 0.0;
    int points = 0;
};

/// Fit over raw (N, value) pairs inside [n_min, n_max]; needs >= 4 points.
inline ScalingFit fit_power_law(const std::vector<double>& n_values,
                                const std::vector<double>& values, double n_min,
                                double n_max) {
    if (n_values.size() != values.size()) {
        throw std::invalid_argument("fit arrays must have equal length");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] < n_min || n_values[i] > n_max) continue;
        if (!(values[i] > 0.0)) throw std::invalid_argument("fit values must be > 0");
        const double x = std::log(n_values[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 4) throw ConfigError("scaling fit needs at least 4 points in window");
    ScalingFit fit;
    const double denom = count * sxx - sx * sx;
    fit.slope = (count * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / count;
    fit.n_min = n_min;
    fit.n_max = n_max;
    fit.points = count;
    return fit;
}

/// Slope of ln(epsilon) vs ln(N) for one protocol of a sweep table.
inline ScalingFit scaling_fit(const std::vector<SweepRow>& rows,
                              const std::string& protocol, double n_min, double n_max) {
    std::vector<double> ns, eps;
    for (const SweepRow& row : rows) {
        if (row.protocol != protocol || !row.ok) continue;
        ns.push_back(static_cast<double>(row.n_qubits));
        eps.push_back(row.summary.epsilon_final);
    }
    return fit_power_law(ns, eps, n_min, n_max);
}

/// Parallel reset of N qubits is N independent single-qubit resets: its heat
/// is N times the single-qubit heat and its error probability is unchanged.
/// The collective numbers come from the N-qubit chain under the same drive.
struct ParallelCollectiveComparison {
    int n_qubits = 0;
    double parallel_heat_total = 0.0;
    double parallel_epsilon = 0.0;
    double collective_heat_total = 0.0;
    double collective_epsilon = 0.0;
    double heat_ratio = 0.0;      // collective / parallel
    double epsilon_ratio = 0.0;   // collective / parallel
};

inline ParallelCollectiveComparison parallel_vs_collective(
    const SystemParams& params, const Protocol& protocol,
    const IntegratorOptions& opts = {}) {
    params.validate();
    SystemParams single = params;
    single.n_qubits = 1;
    const ResetSummary one = summarize(integrate(single, protocol, opts), single);
    const ResetSummary collective = summarize(integrate(params, protocol, opts), params);

    ParallelCollectiveComparison cmp;
    cmp.n_qubits = params.n_qubits;
    cmp.parallel_heat_total = params.n_qubits * one.heat_total;
    cmp.parallel_epsilon = one.epsilon_final;
    cmp.collective_heat_total = collective.heat_total;
    cmp.collective_epsilon = collective.epsilon_final;
    cmp.heat_ratio = cmp.collective_heat_total / cmp.parallel_heat_total;
    cmp.epsilon_ratio = cmp.collective_epsilon / cmp.parallel_epsilon;
    return cmp;
}

struct QuasistaticPoint {
    double tau = 0.0;
    double heat_total = 0.0;
    double epsilon_final = 0.0;
};

/// Heat of a slow linear ramp 0 -> final_omega as a function of the ramp
/// duration. As tau grows the table approaches ln(N+1)/beta from above;
/// final_omega must be >> 1/beta so the target state is nearly pure.
inline std::vector<QuasistaticPoint> quasistatic_convergence(
    int n_qubits, const SystemParams& base, const std::vector<double>& tau_list,
    double final_omega, const IntegratorOptions& opts = {}) {
    if (tau_list.empty()) throw ConfigError("quasistatic study needs tau values");
    for (std::size_t i = 1; i < tau_list.size(); ++i) {
        if (tau_list[i] <= tau_list[i - 1]) {
            throw ConfigError("tau list must be strictly increasing");
        }
    }
    if (!(final_omega > 0.0)) throw ConfigError("final omega must be > 0");

    std::vector<QuasistaticPoint> table;
    table.reserve(tau_list.size());
    for (double tau : tau_list) {
        SystemParams params = base;
        params.n_qubits = n_qubits;
        params.tau = tau;
        params.validate();
        const Protocol ramp = Protocol::linear(final_omega / tau, tau);
        const Trajectory traj = integrate(params, ramp, opts);
        QuasistaticPoint point;
        point.tau = tau;
        point.heat_total = traj.heat_acc.back();
        point.epsilon_final = error_probability(traj.final());
        table.push_back(point);
    }
    return table;
}

}  // namespace qreset
