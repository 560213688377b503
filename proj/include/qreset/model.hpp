#pragma once

// Physical configuration, driving protocols, and the Dicke-sector state.
//
// Units are natural: hbar = k_B = 1. Energies are therefore measured in
// units of 1/beta and rates in units of gamma0 when reporting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qreset/errors.hpp"

namespace qreset {

/// Physical configuration of a reset run: N qubits coupled with bare rate
/// gamma0 to a bath at inverse temperature beta, driven over [0, tau].
struct SystemParams {
    int n_qubits = 1;
    double beta = 1.0;
    double gamma0 = 1.0;
    double tau = 1.0;

    void validate() const {
        if (n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
        if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
        if (!(gamma0 > 0.0)) throw ConfigError("gamma0 must be > 0");
        if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
    }
};

/// Driving schedule omega(t) >= 0 on [0, duration].
///
/// Four kinds: a quench (constant splitting, discontinuous at t=0), a linear
/// ramp, an exponential ramp, and a tabulated schedule interpolated linearly
/// between knots. The right limit omega(0+) is exposed explicitly because
/// the large-N per-qubit heat depends on it and the quench jumps at t=0.
class Protocol {
public:
    enum class Kind { Quench, Linear, Exponential, Tabulated };

    static Protocol quench(double omega_value, double duration) {
        require(duration > 0.0, "protocol duration must be > 0");
        require(omega_value >= 0.0, "quench splitting must be >= 0");
        Protocol p(Kind::Quench, duration);
        p.a_ = omega_value;
        return p;
    }

    /// omega(t) = slope * t.
    static Protocol linear(double slope, double duration) {
        require(duration > 0.0, "protocol duration must be > 0");
        require(slope >= 0.0, "linear slope must be >= 0");
        Protocol p(Kind::Linear, duration);
        p.a_ = slope;
        return p;
    }

    /// omega(t) = scale * (exp(growth_rate * t) - 1).
    static Protocol exponential(double scale, double growth_rate, double duration) {
        require(duration > 0.0, "protocol duration must be > 0");
        require(scale >= 0.0, "exponential scale must be >= 0");
        require(growth_rate > 0.0, "exponential growth rate must be > 0");
        Protocol p(Kind::Exponential, duration);
        p.a_ = scale;
        p.b_ = growth_rate;
        return p;
    }

    /// Piecewise-linear schedule through (t, omega) knots. Times must be
    /// strictly increasing, start at 0, and the last knot fixes the duration.
    static Protocol tabulated(std::vector<std::pair<double, double>> knots) {
        require(knots.size() >= 2, "tabulated protocol needs at least 2 points");
        require(knots.front().first == 0.0, "tabulated protocol must start at t = 0");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            require(knots[i].second >= 0.0, "tabulated omega values must be >= 0");
            if (i > 0) {
                require(knots[i].first > knots[i - 1].first,
                        "tabulated times must be strictly increasing");
            }
        }
        Protocol p(Kind::Tabulated, knots.back().first);
        p.knots_ = std::move(knots);
        return p;
    }

    Kind kind() const { return kind_; }
    double duration() const { return duration_; }

    /// omega(t); throws outside [0, duration].
    double omega(double t) const {
        if (t < 0.0 || t > duration_) {
            throw std::domain_error("protocol evaluated outside [0, tau]");
        }
        switch (kind_) {
            case Kind::Quench:
                return a_;
            case Kind::Linear:
                return a_ * t;
            case Kind::Exponential:
                return a_ * std::expm1(b_ * t);
            case Kind::Tabulated:
                return interpolate(t);
        }
        return 0.0;  // unreachable
    }

    /// Right limit omega(0+). Equals omega(0) for every kind except the
    /// quench, whose pre-protocol splitting is zero.
    double omega_initial() const {
        switch (kind_) {
            case Kind::Quench:
                return a_;
            case Kind::Linear:
            case Kind::Exponential:
                return 0.0;
            case Kind::Tabulated:
                return knots_.front().second;
        }
        return 0.0;  // unreachable
    }

    double omega_final() const { return omega(duration_); }

    /// True when omega is non-decreasing on [0, duration]. Constant quenches
    /// count as monotone; only tabulated schedules need a scan.
    bool monotone_increasing() const {
        if (kind_ != Kind::Tabulated) return true;
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (knots_[i].second < knots_[i - 1].second) return false;
        }
        return true;
    }

    std::string_view kind_name() const {
        switch (kind_) {
            case Kind::Quench: return "quench";
            case Kind::Linear: return "linear";
            case Kind::Exponential: return "exponential";
            case Kind::Tabulated: return "tabulated";
        }
        return "?";
    }

    // Kind-specific parameters, exposed for serialization.
    double quench_value() const { return a_; }
    double linear_slope() const { return a_; }
    double exponential_scale() const { return a_; }
    double exponential_growth_rate() const { return b_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    Protocol(Kind kind, double duration) : kind_(kind), duration_(duration) {}

    static void require(bool ok, const char* message) {
        if (!ok) throw ConfigError(message);
    }

    double interpolate(double t) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double v, const auto& k) { return v < k.first; });
        if (it == knots_.begin()) return knots_.front().second;
        if (it == knots_.end()) return knots_.back().second;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (t - lo.first) / (hi.first - lo.first);
        return lo.second + w * (hi.second - lo.second);
    }

    Kind kind_;
    double duration_;
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<std::pair<double, double>> knots_;
};

/// omega(t) as a free function, mirroring the protocol surface.
inline double omega_at(const Protocol& protocol, double t) { return protocol.omega(t); }

/// omega(0+) as a free function.
inline double omega_zero_plus(const Protocol& protocol) { return protocol.omega_initial(); }

/// The three named driving schedules used throughout: quench omega = 1/beta,
/// linear omega(t) = gamma0 t / beta, exponential omega(t) = (e^{gamma0 t}-1)/beta.
inline Protocol standard_protocol(std::string_view name, const SystemParams& params) {
    params.validate();
    if (name == "quench") return Protocol::quench(1.0 / params.beta, params.tau);
    if (name == "linear") return Protocol::linear(params.gamma0 / params.beta, params.tau);
    if (name == "exponential") {
        return Protocol::exponential(1.0 / params.beta, params.gamma0, params.tau);
    }
    throw ConfigError("unknown protocol name: " + std::string(name));
}

/// Probability vector over the N+1 Dicke excitation levels.
/// Construction enforces normalization to 1e-9 and entries >= -1e-12;
/// anything worse is an integration failure upstream, not a valid state.
class DickeDistribution {
public:
    static constexpr double kNormTolerance = 1e-9;
    static constexpr double kNegativityTolerance = 1e-12;

    DickeDistribution(int n_qubits, std::vector<double> probabilities)
        : n_qubits_(n_qubits), p_(std::move(probabilities)) {
        if (n_qubits_ < 1) throw ConfigError("n_qubits must be >= 1");
        if (p_.size() != static_cast<std::size_t>(n_qubits_) + 1) {
            throw ConfigError("Dicke distribution needs N+1 entries");
        }
        double sum = 0.0;
        for (double v : p_) {
            if (v < -kNegativityTolerance) {
                throw InvariantError("Dicke level probability below -1e-12");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > kNormTolerance) {
            throw InvariantError("Dicke distribution not normalized within 1e-9");
        }
    }

    /// Maximally mixed Dicke-sector state, p_n = 1/(N+1).
    static DickeDistribution uniform(int n_qubits) {
        if (n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
        return DickeDistribution(
            n_qubits, std::vector<double>(static_cast<std::size_t>(n_qubits) + 1,
                                          1.0 / (n_qubits + 1)));
    }

    int n_qubits() const { return n_qubits_; }
    int levels() const { return n_qubits_ + 1; }
    double operator[](int n) const { return p_[static_cast<std::size_t>(n)]; }
    const std::vector<double>& probabilities() const { return p_; }

    double sum() const {
        double s = 0.0;
        for (double v : p_) s += v;
        return s;
    }

private:
    int n_qubits_;
    std::vector<double> p_;
};

/// The reset benchmark's initial condition: every level equally likely,
/// i.e. each qubit in |g> or |e> with probability 1/2.
inline DickeDistribution initial_state(int n_qubits) {
    return DickeDistribution::uniform(n_qubits);
}

/// Level jump rates of the (N+1)-state birth-death chain at a frozen
/// splitting omega. down[n] is the rate n -> n-1, up[n] the rate n -> n+1;
/// both carry the collective degeneracy factor of the Dicke ladder.
struct RateSet {
    double gamma_down = 0.0;            // single-jump decay rate
    double gamma_up = 0.0;              // single-jump excitation rate
    double gamma_gap = 0.0;             // gamma_down - gamma_up
    std::vector<double> down;           // down[n] = n (N-n+1) gamma_down
    std::vector<double> up;             // up[n]   = (N-n)(n+1) gamma_up

    int n_qubits() const { return static_cast<int>(down.size()) - 1; }
};

/// Bath rates at splitting omega: gamma_down = gamma0 / (1 + e^{-beta omega}),
/// gamma_up = gamma0 e^{-beta omega} / (1 + e^{-beta omega}). They satisfy
/// detailed balance gamma_up/gamma_down = e^{-beta omega} and sum to gamma0.
inline RateSet build_rates(const SystemParams& params, double omega) {
    params.validate();
    if (omega < 0.0) throw std::domain_error("omega must be >= 0");

    RateSet r;
    const double boltzmann = std::exp(-params.beta * omega);
    r.gamma_down = params.gamma0 / (1.0 + boltzmann);
    r.gamma_up = params.gamma0 * boltzmann / (1.0 + boltzmann);
    r.gamma_gap = params.gamma0 * std::tanh(0.5 * params.beta * omega);

    const int n = params.n_qubits;
    r.down.resize(static_cast<std::size_t>(n) + 1);
    r.up.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        r.down[static_cast<std::size_t>(k)] =
            static_cast<double>(k) * static_cast<double>(n - k + 1) * r.gamma_down;
        r.up[static_cast<std::size_t>(k)] =
            static_cast<double>(n - k) * static_cast<double>(k + 1) * r.gamma_up;
    }
    return r;
}

}  // namespace qreset
