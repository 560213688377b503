#pragma once

// File formats: the key-value run/protocol configs consumed by the CLI and
// the CSV/JSON artifacts it writes. Column names and layouts here are a
// stable interface; numbers are printed with 12 significant digits so that
// identical runs produce byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qreset/bounds.hpp"
#include "qreset/dynamics.hpp"
#include "qreset/errors.hpp"
#include "qreset/experiments.hpp"
#include "qreset/model.hpp"
#include "qreset/thermo.hpp"

namespace qreset {

inline std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Key-value configuration documents
//
//   # comment
//   key = value
//   points:
//   0.0  0.0
//   0.5  1.2
//
// A `points:` line starts the two-column (t, omega) block of a tabulated
// protocol; it runs to the end of the document.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_number(const std::string& text, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for '" + key + "': " + text);
    }
}

inline bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("invalid boolean for '" + key + "': " + text);
}

struct KeyValueDocument {
    std::map<std::string, std::string> entries;
    std::vector<std::pair<double, double>> points;
    bool has_points = false;
};

inline KeyValueDocument parse_key_value_document(std::istream& in,
                                                 const std::string& origin) {
    KeyValueDocument doc;
    std::string line;
    bool in_points = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "points:") {
            in_points = true;
            doc.has_points = true;
            continue;
        }
        if (in_points) {
            std::istringstream row(line);
            double t = 0.0, w = 0.0;
            if (!(row >> t >> w)) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": expected 't omega' pair");
            }
            std::string extra;
            if (row >> extra) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": expected exactly two columns");
            }
            doc.points.emplace_back(t, w);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        if (!doc.entries.emplace(key, value).second) {
            throw ConfigError(origin + ": duplicate key '" + key + "'");
        }
    }
    return doc;
}

inline KeyValueDocument parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return parse_key_value_document(in, path);
}

}  // namespace detail

/// Parsed protocol description. Omitted kind parameters default to the
/// standard schedules for the run's beta and gamma0.
struct ProtocolSpec {
    std::string kind = "quench";
    std::optional<double> omega;         // quench splitting
    std::optional<double> slope;         // linear ramp rate
    std::optional<double> scale;         // exponential prefactor
    std::optional<double> growth_rate;   // exponential rate
    std::optional<double> duration;      // optional cross-check against tau
    std::vector<std::pair<double, double>> points;  // tabulated knots

    Protocol build(const SystemParams& params) const {
        if (duration.has_value() &&
            std::abs(*duration - params.tau) > 1e-12 * std::max(1.0, params.tau)) {
            throw ConfigError("protocol duration does not match tau");
        }
        if (kind == "quench") {
            return Protocol::quench(omega.value_or(1.0 / params.beta), params.tau);
        }
        if (kind == "linear") {
            return Protocol::linear(slope.value_or(params.gamma0 / params.beta),
                                    params.tau);
        }
        if (kind == "exponential") {
            return Protocol::exponential(scale.value_or(1.0 / params.beta),
                                         growth_rate.value_or(params.gamma0), params.tau);
        }
        if (kind == "tabulated") {
            Protocol p = Protocol::tabulated(points);
            if (std::abs(p.duration() - params.tau) > 1e-12 * std::max(1.0, params.tau)) {
                throw ConfigError("tabulated protocol must end at t = tau");
            }
            return p;
        }
        throw ConfigError("unknown protocol kind: " + kind);
    }
};

inline ProtocolSpec parse_protocol_file(const std::string& path) {
    const detail::KeyValueDocument doc = detail::parse_key_value_file(path);
    ProtocolSpec spec;
    for (const auto& [key, value] : doc.entries) {
        if (key == "schema_version") {
            if (value != "1") throw ConfigError("unsupported schema_version " + value);
        } else if (key == "kind") {
            spec.kind = value;
        } else if (key == "omega") {
            spec.omega = detail::parse_number(value, key);
        } else if (key == "slope") {
            spec.slope = detail::parse_number(value, key);
        } else if (key == "scale") {
            spec.scale = detail::parse_number(value, key);
        } else if (key == "growth_rate") {
            spec.growth_rate = detail::parse_number(value, key);
        } else if (key == "duration") {
            spec.duration = detail::parse_number(value, key);
        } else {
            throw ConfigError(path + ": unknown key '" + key + "'");
        }
    }
    spec.points = doc.points;
    if (spec.kind == "tabulated" && spec.points.empty()) {
        throw ConfigError(path + ": tabulated protocol needs a points: block");
    }
    return spec;
}

/// Everything one `simulate` invocation needs.
struct RunConfig {
    SystemParams params;
    ProtocolSpec protocol;
    IntegratorOptions integrator;
    std::string out_dir = ".";
    bool emit_states = false;
};

inline RunConfig parse_run_config(const std::string& path) {
    const detail::KeyValueDocument doc = detail::parse_key_value_file(path);
    RunConfig config;
    bool protocol_from_file = false;
    for (const auto& [key, value] : doc.entries) {
        if (key == "schema_version") {
            if (value != "1") throw ConfigError("unsupported schema_version " + value);
        } else if (key == "n_qubits") {
            config.params.n_qubits =
                static_cast<int>(detail::parse_number(value, key));
        } else if (key == "beta") {
            config.params.beta = detail::parse_number(value, key);
        } else if (key == "gamma0") {
            config.params.gamma0 = detail::parse_number(value, key);
        } else if (key == "tau") {
            config.params.tau = detail::parse_number(value, key);
        } else if (key == "protocol") {
            if (value.rfind("file=", 0) == 0) {
                config.protocol = parse_protocol_file(value.substr(5));
                protocol_from_file = true;
            } else {
                config.protocol.kind = value;
            }
        } else if (key == "omega") {
            config.protocol.omega = detail::parse_number(value, key);
        } else if (key == "slope") {
            config.protocol.slope = detail::parse_number(value, key);
        } else if (key == "scale") {
            config.protocol.scale = detail::parse_number(value, key);
        } else if (key == "growth_rate") {
            config.protocol.growth_rate = detail::parse_number(value, key);
        } else if (key == "rel_tol") {
            config.integrator.rel_tol = detail::parse_number(value, key);
        } else if (key == "abs_tol") {
            config.integrator.abs_tol = detail::parse_number(value, key);
        } else if (key == "max_steps") {
            config.integrator.max_steps =
                static_cast<long>(detail::parse_number(value, key));
        } else if (key == "emit_states") {
            config.emit_states = detail::parse_bool(value, key);
        } else if (key == "out") {
            config.out_dir = value;
        } else {
            throw ConfigError(path + ": unknown key '" + key + "'");
        }
    }
    if (!protocol_from_file && doc.has_points) {
        config.protocol.points = doc.points;
        if (config.protocol.kind != "tabulated") {
            throw ConfigError(path + ": points: block requires protocol = tabulated");
        }
    }
    config.params.validate();
    return config;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline nlohmann::json protocol_to_json(const Protocol& protocol) {
    nlohmann::json j;
    j["kind"] = std::string(protocol.kind_name());
    j["duration"] = protocol.duration();
    switch (protocol.kind()) {
        case Protocol::Kind::Quench:
            j["omega"] = protocol.quench_value();
            break;
        case Protocol::Kind::Linear:
            j["slope"] = protocol.linear_slope();
            break;
        case Protocol::Kind::Exponential:
            j["scale"] = protocol.exponential_scale();
            j["growth_rate"] = protocol.exponential_growth_rate();
            break;
        case Protocol::Kind::Tabulated: {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& [t, w] : protocol.knots()) {
                pts.push_back({t, w});
            }
            j["points"] = pts;
            break;
        }
    }
    return j;
}

inline Protocol protocol_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quench") {
        return Protocol::quench(j.at("omega").get<double>(),
                                j.at("duration").get<double>());
    }
    if (kind == "linear") {
        return Protocol::linear(j.at("slope").get<double>(),
                                j.at("duration").get<double>());
    }
    if (kind == "exponential") {
        return Protocol::exponential(j.at("scale").get<double>(),
                                     j.at("growth_rate").get<double>(),
                                     j.at("duration").get<double>());
    }
    if (kind == "tabulated") {
        std::vector<std::pair<double, double>> points;
        for (const auto& pt : j.at("points")) {
            points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
        }
        return Protocol::tabulated(std::move(points));
    }
    throw ConfigError("unknown protocol kind in JSON: " + kind);
}

inline nlohmann::json summary_to_json(const ResetSummary& summary,
                                      const SystemParams& params,
                                      const Protocol& protocol) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["params"] = {{"n_qubits", params.n_qubits},
                   {"beta", params.beta},
                   {"gamma0", params.gamma0},
                   {"tau", params.tau}};
    j["protocol"] = protocol_to_json(protocol);
    nlohmann::json s;
    s["epsilon_final"] = summary.epsilon_final;
    s["heat_total"] = summary.heat_total;
    s["heat_per_qubit"] = summary.heat_per_qubit;
    s["distance"] = summary.distance;
    s["avg_activity"] = summary.avg_activity;
    s["entropy_production"] = summary.entropy_production;
    if (summary.reset_factor.has_value()) {
        s["reset_factor"] = *summary.reset_factor;
    } else {
        s["reset_factor"] = nullptr;
    }
    j["summary"] = s;
    return j;
}

struct RunArtifacts {
    SystemParams params;
    Protocol protocol;
    ResetSummary summary;
};

inline RunArtifacts read_summary_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    try {
        const auto& p = j.at("params");
        SystemParams params{p.at("n_qubits").get<int>(), p.at("beta").get<double>(),
                            p.at("gamma0").get<double>(), p.at("tau").get<double>()};
        Protocol protocol = protocol_from_json(j.at("protocol"));
        const auto& s = j.at("summary");
        ResetSummary summary;
        summary.epsilon_final = s.at("epsilon_final").get<double>();
        summary.heat_total = s.at("heat_total").get<double>();
        summary.heat_per_qubit = s.at("heat_per_qubit").get<double>();
        summary.distance = s.at("distance").get<double>();
        summary.avg_activity = s.at("avg_activity").get<double>();
        summary.entropy_production = s.at("entropy_production").get<double>();
        if (!s.at("reset_factor").is_null()) {
            summary.reset_factor = s.at("reset_factor").get<double>();
        }
        return RunArtifacts{params, std::move(protocol), summary};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": missing or malformed field: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// CSV artifacts
// ---------------------------------------------------------------------------

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

}  // namespace detail

inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const Trajectory& traj, bool emit_states) {
    std::ofstream out = detail::open_output(path);
    out << "t";
    if (emit_states) {
        for (int n = 0; n <= traj.n_qubits; ++n) out << ",p_" << n;
    }
    out << ",epsilon,zeta,heat_acc,ep_acc,activity_integral\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_sig12(traj.times[i]);
        if (emit_states) {
            for (int n = 0; n <= traj.n_qubits; ++n) {
                out << ',' << format_sig12(traj.states[i][n]);
            }
        }
        out << ',' << format_sig12(error_probability(traj.states[i])) << ','
            << format_sig12(excitation_second_moment(traj.states[i])) << ','
            << format_sig12(traj.heat_acc[i]) << ',' << format_sig12(traj.ep_acc[i])
            << ',' << format_sig12(traj.activity_integral[i]) << '\n';
    }
}

/// Minimal columns read back from a trajectory CSV (states not required).
struct TrajectorySeries {
    std::vector<double> t, epsilon, zeta, heat_acc, ep_acc, activity_integral;
};

inline TrajectorySeries read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");

    std::vector<std::string> header;
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw ConfigError(path + ": missing column " + name);
    };
    const std::size_t ct = column("t"), ce = column("epsilon"), cz = column("zeta"),
                      ch = column("heat_acc"), cp = column("ep_acc"),
                      ca = column("activity_integral");

    TrajectorySeries series;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        std::istringstream rs(line);
        while (std::getline(rs, cell, ',')) {
            row.push_back(detail::parse_number(detail::trim(cell), "csv cell"));
        }
        if (row.size() != header.size()) {
            throw ConfigError(path + ": ragged CSV row");
        }
        series.t.push_back(row[ct]);
        series.epsilon.push_back(row[ce]);
        series.zeta.push_back(row[cz]);
        series.heat_acc.push_back(row[ch]);
        series.ep_acc.push_back(row[cp]);
        series.activity_integral.push_back(row[ca]);
    }
    if (series.t.empty()) throw ConfigError(path + ": no data rows");
    return series;
}

inline void write_bounds_csv(const std::filesystem::path& path,
                             const std::vector<BoundReport>& reports, int n_qubits,
                             const std::string& protocol) {
    std::ofstream out = detail::open_output(path);
    out << "name,N,protocol,lhs,rhs,margin,satisfied\n";
    for (const BoundReport& r : reports) {
        out << r.name << ',' << n_qubits << ',' << protocol << ','
            << format_sig12(r.lhs) << ',' << format_sig12(r.rhs) << ','
            << format_sig12(r.margin) << ','
            << (r.applicable ? (r.satisfied ? "true" : "false") : "na") << '\n';
    }
}

/// fig2a.csv, fig2b.csv, fig3.csv plus the per-row bound reports, exactly as
/// external plotting expects them. Failed rows are skipped in the figure
/// files and surface in bounds.csv with satisfied = error.
inline void write_sweep_outputs(const std::filesystem::path& dir,
                                const std::vector<SweepRow>& rows,
                                const SystemParams& base) {
    std::ofstream fig2a = detail::open_output(dir / "fig2a.csv");
    std::ofstream fig2b = detail::open_output(dir / "fig2b.csv");
    std::ofstream fig3 = detail::open_output(dir / "fig3.csv");
    std::ofstream bounds = detail::open_output(dir / "bounds.csv");
    fig2a << "N,protocol,epsilon\n";
    fig2b << "N,protocol,heat_per_qubit,landauer_per_qubit\n";
    fig3 << "N,protocol,F,bound_N,bound_1\n";
    bounds << "name,N,protocol,lhs,rhs,margin,satisfied\n";
    for (const SweepRow& row : rows) {
        if (!row.ok) {
            bounds << "run_error," << row.n_qubits << ',' << row.protocol
                   << ",nan,nan,nan,error\n";
            continue;
        }
        SystemParams params = base;
        params.n_qubits = row.n_qubits;
        fig2a << row.n_qubits << ',' << row.protocol << ','
              << format_sig12(row.summary.epsilon_final) << '\n';
        fig2b << row.n_qubits << ',' << row.protocol << ','
              << format_sig12(row.summary.heat_per_qubit) << ','
              << format_sig12(landauer_per_qubit(params)) << '\n';
        fig3 << row.n_qubits << ',' << row.protocol << ','
             << (row.summary.reset_factor ? format_sig12(*row.summary.reset_factor)
                                          : std::string("nan"))
             << ',' << format_sig12(reset_factor_bound(params)) << ','
             << format_sig12(reset_factor_bound_single(params)) << '\n';
        for (const BoundReport& r : row.bounds) {
            bounds << r.name << ',' << row.n_qubits << ',' << row.protocol << ','
                   << format_sig12(r.lhs) << ',' << format_sig12(r.rhs) << ','
                   << format_sig12(r.margin) << ','
                   << (r.applicable ? (r.satisfied ? "true" : "false") : "na") << '\n';
        }
    }
}

inline void write_quasistatic_csv(const std::filesystem::path& path,
                                  const std::vector<QuasistaticPoint>& table,
                                  const SystemParams& params) {
    std::ofstream out = detail::open_output(path);
    out << "tau,heat_total,epsilon_final,landauer_total\n";
    const double landauer = landauer_collective(params);
    for (const QuasistaticPoint& point : table) {
        out << format_sig12(point.tau) << ',' << format_sig12(point.heat_total) << ','
            << format_sig12(point.epsilon_final) << ',' << format_sig12(landauer)
            << '\n';
    }
}

}  // namespace qreset
