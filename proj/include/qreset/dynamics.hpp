#pragma once

// Integration of the (N+1)-level birth-death master equation
//
//   dp_n/dt = up[n-1] p_{n-1} + down[n+1] p_{n+1} - (down[n] + up[n]) p_n
//
// with time-dependent rates, plus three quadrature variables advanced under
// the same error control as the state: heat released to the bath, total
// entropy production (Schnakenberg link form), and the dynamical-activity
// integral.
//
// The generator is tridiagonal and its spectral radius grows like
// gamma0 (N+1)^2 / 4, so explicit steppers would be limited to steps of
// order 1/(gamma0 N^2). The stepper here is TR-BDF2 (trapezoid + BDF2 with
// gamma = 2 - sqrt(2)): one-step, L-stable, second order with an embedded
// third-order error estimate, and because the right-hand side is linear in
// p each implicit stage is a single tridiagonal solve, O(N) per step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qreset/errors.hpp"
#include "qreset/interp.hpp"
#include "qreset/model.hpp"

namespace qreset {

struct IntegratorOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    long max_steps = 2'000'000;
    /// Step-size ceiling; 0 means span/64. The cap keeps natural samples
    /// dense enough that cubic Hermite reconstruction between accepted steps
    /// stays at the integration accuracy even where the dynamics has gone
    /// quiescent and the controller would otherwise take huge strides.
    double max_step = 0.0;
    /// Sample times for the returned trajectory. Empty means "record every
    /// accepted step". Endpoints are always included.
    std::vector<double> output_grid;

    void validate(double t_begin, double t_end) const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
            throw ConfigError("tolerances must be > 0");
        }
        if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
        if (max_step < 0.0) throw ConfigError("max_step must be >= 0");
        for (std::size_t i = 0; i < output_grid.size(); ++i) {
            if (output_grid[i] < t_begin || output_grid[i] > t_end) {
                throw ConfigError("output_grid point outside the integration window");
            }
            if (i > 0 && output_grid[i] <= output_grid[i - 1]) {
                throw ConfigError("output_grid must be strictly increasing");
            }
        }
    }
};

/// Time series of states and accumulated integrals over one run.
struct Trajectory {
    int n_qubits = 0;
    std::vector<double> times;
    std::vector<DickeDistribution> states;
    std::vector<double> heat_acc;           // cumulative heat released to the bath
    std::vector<double> ep_acc;             // cumulative entropy production
    std::vector<double> activity_integral;  // cumulative expected jump count

    std::size_t size() const { return times.size(); }
    const DickeDistribution& initial() const { return states.front(); }
    const DickeDistribution& final() const { return states.back(); }
    double duration() const { return times.back() - times.front(); }
};

/// Stepper gave up: step-size underflow or max_steps exhausted. Carries
/// whatever part of the trajectory was completed.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, Trajectory partial_trajectory)
        : std::runtime_error(what), partial(std::move(partial_trajectory)) {}

    Trajectory partial;
};

namespace detail {

inline void master_rhs_raw(const RateSet& r, const std::vector<double>& p,
                           std::vector<double>& dpdt) {
    const std::size_t levels = p.size();
    dpdt.resize(levels);
    for (std::size_t n = 0; n < levels; ++n) {
        double v = -(r.down[n] + r.up[n]) * p[n];
        if (n > 0) v += r.up[n - 1] * p[n - 1];
        if (n + 1 < levels) v += r.down[n + 1] * p[n + 1];
        dpdt[n] = v;
    }
}

inline double heat_rate(double omega, const std::vector<double>& dpdt) {
    double excitation_change = 0.0;
    for (std::size_t n = 1; n < dpdt.size(); ++n) {
        excitation_change += static_cast<double>(n) * dpdt[n];
    }
    return -omega * excitation_change;
}

// Schnakenberg entropy production rate, summed over nearest-neighbor links.
// Each term (J_down - J_up) ln(J_down/J_up) is non-negative; fluxes are
// floored at 1e-300 inside the logs so that a vanishing counter-flux yields
// a large-but-finite term suppressed by its prefactor.
inline double entropy_production_rate(const RateSet& r, const std::vector<double>& p) {
    double rate = 0.0;
    const std::size_t levels = p.size();
    for (std::size_t n = 0; n + 1 < levels; ++n) {
        const double flux_down = r.down[n + 1] * std::max(p[n + 1], 0.0);
        const double flux_up = r.up[n] * std::max(p[n], 0.0);
        if (flux_down <= 0.0 && flux_up <= 0.0) continue;
        rate += (flux_down - flux_up) *
                (std::log(std::max(flux_down, 1e-300)) -
                 std::log(std::max(flux_up, 1e-300)));
    }
    return rate;
}

inline double activity_rate(const RateSet& r, const std::vector<double>& p) {
    double rate = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        rate += (r.down[n] + r.up[n]) * std::max(p[n], 0.0);
    }
    return rate;
}

inline double max_total_rate(const RateSet& r) {
    double m = 0.0;
    for (std::size_t n = 0; n < r.down.size(); ++n) {
        m = std::max(m, r.down[n] + r.up[n]);
    }
    return m;
}

// Solves (I - c A) x = b where A is the master-equation generator built from
// the rate set. The matrix is an M-matrix with unit column sums, so the
// Thomas algorithm needs no pivoting.
class ShiftedTridiagonalSolver {
public:
    void solve(const RateSet& r, double c, const std::vector<double>& b,
               std::vector<double>& x) {
        const std::size_t m = b.size();
        upper_.resize(m);
        rhs_.resize(m);
        x.resize(m);

        double diag = 1.0 + c * (r.down[0] + r.up[0]);
        upper_[0] = -c * r.down[1] / diag;
        rhs_[0] = b[0] / diag;
        for (std::size_t n = 1; n < m; ++n) {
            const double sub = -c * r.up[n - 1];
            diag = 1.0 + c * (r.down[n] + r.up[n]) - sub * upper_[n - 1];
            const double super = (n + 1 < m) ? -c * r.down[n + 1] : 0.0;
            upper_[n] = super / diag;
            rhs_[n] = (b[n] - sub * rhs_[n - 1]) / diag;
        }
        x[m - 1] = rhs_[m - 1];
        for (std::size_t n = m - 1; n-- > 0;) {
            x[n] = rhs_[n] - upper_[n] * x[n + 1];
        }
    }

private:
    std::vector<double> upper_;
    std::vector<double> rhs_;
};

}  // namespace detail

/// Right-hand side of the master equation, with p_{-1} = p_{N+1} = 0.
/// The derivatives sum to zero by construction.
inline std::vector<double> master_equation_rhs(const DickeDistribution& p,
                                               const RateSet& rates) {
    if (rates.n_qubits() != p.n_qubits()) {
        throw std::invalid_argument("rate set and distribution dimension mismatch");
    }
    std::vector<double> dpdt;
    detail::master_rhs_raw(rates, p.probabilities(), dpdt);
    return dpdt;
}

/// Integrates the chain from state p0 at t_begin to t_end, with the protocol
/// supplying omega(t) on the global clock. Accumulators start at zero for
/// the segment, so segment heats are additive under concatenation.
///
/// Delivered states are nonnegative: accepted steps project negative
/// excursions up to 1e3 * abs_tol onto zero (mass moved from the largest
/// level, so the sum is untouched); larger excursions abort the run.
inline Trajectory integrate_from(const SystemParams& params, const Protocol& protocol,
                                 const DickeDistribution& p0, double t_begin,
                                 double t_end, const IntegratorOptions& opts = {}) {
    params.validate();
    opts.validate(t_begin, t_end);
    if (p0.n_qubits() != params.n_qubits) {
        throw std::invalid_argument("initial state dimension mismatch");
    }
    if (!(t_end > t_begin) || t_begin < 0.0 || t_end > protocol.duration()) {
        throw ConfigError("integration window must be inside [0, protocol duration]");
    }

    // TR-BDF2 coefficients, gamma = 2 - sqrt(2). Both stages share the
    // matrix shift d = gamma/2; the quadrature weights b and the embedded
    // third-order weights bh give the error combination (b - bh).
    const double kGamma = 2.0 - std::sqrt(2.0);
    const double kShift = kGamma / 2.0;
    const double kStageMix = 0.5 * (std::sqrt(2.0) + 1.0);  // 1/(gamma(2-gamma))
    const double kB1 = std::sqrt(2.0) / 4.0;
    const double kB3 = kShift;
    const double kE1 = (std::sqrt(2.0) - 1.0) / 3.0;  // b - bh, stage 1
    const double kE2 = -1.0 / 3.0;
    const double kE3 = (2.0 - std::sqrt(2.0)) / 3.0;

    const std::size_t levels = static_cast<std::size_t>(params.n_qubits) + 1;
    const double clip_limit = 1e3 * opts.abs_tol;

    Trajectory traj;
    traj.n_qubits = params.n_qubits;

    std::vector<double> grid = opts.output_grid;
    const bool natural_sampling = grid.empty();
    if (!natural_sampling) {
        if (grid.front() > t_begin) grid.insert(grid.begin(), t_begin);
        if (grid.back() < t_end) grid.push_back(t_end);
    }
    std::size_t next_grid = 0;

    auto record = [&](double t, const std::vector<double>& p, double heat, double ep,
                      double act) {
        double sum = 0.0;
        for (double v : p) sum += v;
        if (std::abs(sum - 1.0) > DickeDistribution::kNormTolerance) {
            throw InvariantError("probability sum drifted beyond 1e-9 at t=" +
                                 std::to_string(t));
        }
        traj.times.push_back(t);
        traj.states.emplace_back(params.n_qubits, p);
        traj.heat_acc.push_back(heat);
        traj.ep_acc.push_back(ep);
        traj.activity_integral.push_back(act);
    };

    std::vector<double> p = p0.probabilities();
    double heat = 0.0, ep = 0.0, act = 0.0;
    double t = t_begin;

    if (natural_sampling) {
        record(t, p, heat, ep, act);
    } else if (grid[next_grid] == t_begin) {
        record(t, p, heat, ep, act);
        ++next_grid;
    }

    detail::ShiftedTridiagonalSolver solver;
    std::vector<double> f_begin(levels), f_mid(levels), f_end(levels);
    std::vector<double> stage_rhs(levels), p_mid(levels), p_end(levels), err(levels);

    const double h_max =
        opts.max_step > 0.0 ? opts.max_step : (t_end - t_begin) / 64.0;
    RateSet rates_begin = build_rates(params, protocol.omega(t));
    double h = std::min({(t_end - t_begin) / 64.0,
                         1e-2 / detail::max_total_rate(rates_begin), h_max});

    auto fail = [&](const char* what) {
        throw IntegrationError(what, std::move(traj));
    };

    long attempts = 0;
    while (t < t_end) {
        if (++attempts > opts.max_steps) fail("max_steps exceeded");
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
            fail("step size underflow");
        }
        const bool final_step = (t + h >= t_end);
        if (final_step) h = t_end - t;
        const double t_mid = t + kGamma * h;
        const double t_next = final_step ? t_end : t + h;

        const RateSet rates_mid = build_rates(params, protocol.omega(std::min(t_mid, t_end)));
        const RateSet rates_end = build_rates(params, protocol.omega(t_next));

        detail::master_rhs_raw(rates_begin, p, f_begin);

        // Trapezoid stage to t + gamma h.
        for (std::size_t n = 0; n < levels; ++n) {
            stage_rhs[n] = p[n] + kShift * h * f_begin[n];
        }
        solver.solve(rates_mid, kShift * h, stage_rhs, p_mid);
        detail::master_rhs_raw(rates_mid, p_mid, f_mid);

        // BDF2 stage to t + h.
        for (std::size_t n = 0; n < levels; ++n) {
            stage_rhs[n] = kStageMix * p_mid[n] - (kStageMix - 1.0) * p[n];
        }
        solver.solve(rates_end, kShift * h, stage_rhs, p_end);
        detail::master_rhs_raw(rates_end, p_end, f_end);

        // Embedded error estimate, filtered through the stiff solve as in
        // Hosea & Shampine so it stays sharp for large h * rates.
        for (std::size_t n = 0; n < levels; ++n) {
            stage_rhs[n] = h * (kE1 * f_begin[n] + kE2 * f_mid[n] + kE3 * f_end[n]);
        }
        solver.solve(rates_end, kShift * h, stage_rhs, err);

        const double omega_begin = protocol.omega(t);
        const double omega_mid = protocol.omega(std::min(t_mid, t_end));
        const double omega_end = protocol.omega(t_next);
        const double g_heat[3] = {detail::heat_rate(omega_begin, f_begin),
                                  detail::heat_rate(omega_mid, f_mid),
                                  detail::heat_rate(omega_end, f_end)};
        const double g_ep[3] = {detail::entropy_production_rate(rates_begin, p),
                                detail::entropy_production_rate(rates_mid, p_mid),
                                detail::entropy_production_rate(rates_end, p_end)};
        const double g_act[3] = {detail::activity_rate(rates_begin, p),
                                 detail::activity_rate(rates_mid, p_mid),
                                 detail::activity_rate(rates_end, p_end)};

        const double heat_next = heat + h * (kB1 * (g_heat[0] + g_heat[1]) + kB3 * g_heat[2]);
        const double ep_next = ep + h * (kB1 * (g_ep[0] + g_ep[1]) + kB3 * g_ep[2]);
        const double act_next = act + h * (kB1 * (g_act[0] + g_act[1]) + kB3 * g_act[2]);

        // Weighted RMS error over levels and accumulators.
        double err_sq = 0.0;
        bool finite = true;
        for (std::size_t n = 0; n < levels; ++n) {
            const double scale =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(p[n]), std::abs(p_end[n]));
            const double ratio = err[n] / scale;
            err_sq += ratio * ratio;
            finite = finite && std::isfinite(p_end[n]);
        }
        const double acc_pairs[3][2] = {
            {heat, heat_next}, {ep, ep_next}, {act, act_next}};
        const double acc_err[3] = {
            h * (kE1 * g_heat[0] + kE2 * g_heat[1] + kE3 * g_heat[2]),
            h * (kE1 * g_ep[0] + kE2 * g_ep[1] + kE3 * g_ep[2]),
            h * (kE1 * g_act[0] + kE2 * g_act[1] + kE3 * g_act[2])};
        for (int i = 0; i < 3; ++i) {
            const double scale =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(acc_pairs[i][0]),
                                                       std::abs(acc_pairs[i][1]));
            const double ratio = acc_err[i] / scale;
            err_sq += ratio * ratio;
            finite = finite && std::isfinite(acc_pairs[i][1]);
        }
        const double err_norm = std::sqrt(err_sq / static_cast<double>(levels + 3));

        if (!finite || !(err_norm <= 1.0)) {
            const double shrink =
                (!finite || !std::isfinite(err_norm))
                    ? 0.25
                    : std::max(0.1, 0.9 * std::pow(err_norm, -1.0 / 3.0));
            h *= shrink;
            continue;
        }

        // Accepted. Project tiny negative excursions back onto the simplex.
        double deficit = 0.0;
        double worst = 0.0;
        std::size_t largest = 0;
        for (std::size_t n = 0; n < levels; ++n) {
            if (p_end[n] < 0.0) {
                worst = std::min(worst, p_end[n]);
                deficit += -p_end[n];
                p_end[n] = 0.0;
            }
            if (p_end[n] > p_end[largest]) largest = n;
        }
        if (worst < -clip_limit) fail("positivity breach beyond projection limit");
        p_end[largest] -= deficit;

        // Emit requested samples inside (t, t_next] by cubic Hermite using
        // the exact derivatives at both ends of the step.
        if (!natural_sampling) {
            while (next_grid < grid.size() && grid[next_grid] <= t_next) {
                const double tg = grid[next_grid];
                if (tg == t_next) {
                    record(t_next, p_end, heat_next, ep_next, act_next);
                } else {
                    const double s = (tg - t) / h;
                    std::vector<double> pg(levels);
                    for (std::size_t n = 0; n < levels; ++n) {
                        pg[n] = PiecewiseCubic::hermite(p[n], h * f_begin[n], p_end[n],
                                                        h * f_end[n], s);
                    }
                    record(tg, pg,
                           PiecewiseCubic::hermite(heat, h * g_heat[0], heat_next,
                                                   h * g_heat[2], s),
                           PiecewiseCubic::hermite(ep, h * g_ep[0], ep_next, h * g_ep[2], s),
                           PiecewiseCubic::hermite(act, h * g_act[0], act_next,
                                                   h * g_act[2], s));
                }
                ++next_grid;
            }
        }

        p.swap(p_end);
        heat = heat_next;
        ep = ep_next;
        act = act_next;
        t = t_next;
        rates_begin = rates_end;

        if (natural_sampling) record(t, p, heat, ep, act);

        const double grow = (err_norm == 0.0)
                                ? 5.0
                                : std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -1.0 / 3.0)));
        h = std::min(h * grow, h_max);
        if (t < t_end) h = std::min(h, t_end - t);
    }

    return traj;
}

/// Full reset run: uniform initial state at t = 0, integrated to t = tau.
inline Trajectory integrate(const SystemParams& params, const Protocol& protocol,
                            const IntegratorOptions& opts = {}) {
    if (std::abs(protocol.duration() - params.tau) >
        1e-12 * std::max(1.0, params.tau)) {
        throw ConfigError("protocol duration must equal params.tau");
    }
    return integrate_from(params, protocol, initial_state(params.n_qubits), 0.0,
                          params.tau, opts);
}

/// Integrates the scalar error-probability equation
///
///   d eps/dt = (gamma0 - gap)/2 - gamma0 eps - N gap (eps - zeta(t))
///
/// from eps(0) = 1/2, with zeta supplied externally (normally interpolated
/// from a full run). Cross-validates the chain integration: the same curve
/// must come out of either route. Returns a C^1 interpolant of eps(t).
inline PiecewiseCubic integrate_error_probability_ode(
    const SystemParams& params, const Protocol& protocol,
    const std::function<double(double)>& zeta_source,
    const IntegratorOptions& opts = {}) {
    params.validate();
    const double n = static_cast<double>(params.n_qubits);
    const double tau = protocol.duration();

    auto rhs = [&](double t, double eps) {
        const double gap = params.gamma0 *
                           std::tanh(0.5 * params.beta * protocol.omega(t));
        return 0.5 * (params.gamma0 - gap) - params.gamma0 * eps -
               n * gap * (eps - zeta_source(t));
    };

    // Classic embedded RK45 (Dormand-Prince) on a scalar; the problem is
    // mildly stiff at worst (decay rate gamma0 + N gap), so small steps are
    // acceptable here in exchange for the high-order dense samples.
    std::vector<double> ts, ys, ds;
    double t = 0.0, y = 0.5, h = tau * 1e-4;
    ts.push_back(t);
    ys.push_back(y);
    ds.push_back(rhs(0.0, y));

    long attempts = 0;
    while (t < tau) {
        if (++attempts > opts.max_steps) {
            throw IntegrationError("epsilon ODE: max_steps exceeded", Trajectory{});
        }
        if (t + h > tau) h = tau - t;
        const double k1 = rhs(t, y);
        const double k2 = rhs(t + h / 5.0, y + h * k1 / 5.0);
        const double k3 = rhs(t + 3.0 * h / 10.0, y + h * (3.0 * k1 + 9.0 * k2) / 40.0);
        const double k4 = rhs(t + 4.0 * h / 5.0,
                              y + h * (44.0 * k1 / 45.0 - 56.0 * k2 / 15.0 + 32.0 * k3 / 9.0));
        const double k5 =
            rhs(t + 8.0 * h / 9.0,
                y + h * (19372.0 * k1 / 6561.0 - 25360.0 * k2 / 2187.0 +
                         64448.0 * k3 / 6561.0 - 212.0 * k4 / 729.0));
        const double k6 = rhs(t + h, y + h * (9017.0 * k1 / 3168.0 - 355.0 * k2 / 33.0 +
                                              46732.0 * k3 / 5247.0 + 49.0 * k4 / 176.0 -
                                              5103.0 * k5 / 18656.0));
        const double y5 = y + h * (35.0 * k1 / 384.0 + 500.0 * k3 / 1113.0 +
                                   125.0 * k4 / 192.0 - 2187.0 * k5 / 6784.0 +
                                   11.0 * k6 / 84.0);
        const double k7 = rhs(t + h, y5);
        const double err = h * (71.0 * k1 / 57600.0 - 71.0 * k3 / 16695.0 +
                                71.0 * k4 / 1920.0 - 17253.0 * k5 / 339200.0 +
                                22.0 * k6 / 525.0 - k7 / 40.0);
        const double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(y), std::abs(y5));
        const double err_norm = std::abs(err) / scale;
        if (std::isfinite(err_norm) && err_norm <= 1.0) {
            t += h;
            y = y5;
            ts.push_back(t);
            ys.push_back(y);
            ds.push_back(k7);
        }
        double factor = 0.25;  // non-finite error: retreat hard
        if (err_norm == 0.0) {
            factor = 5.0;
        } else if (std::isfinite(err_norm)) {
            factor = 0.9 * std::pow(err_norm, -0.2);
        }
        h *= std::min(5.0, std::max(0.1, factor));
        h = std::min(h, tau / 64.0);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(t, 1.0)) {
            throw IntegrationError("epsilon ODE: step size underflow", Trajectory{});
        }
    }
    return PiecewiseCubic(std::move(ts), std::move(ys), std::move(ds));
}

}  // namespace qreset
