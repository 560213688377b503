// qreset: simulate collective qubit reset on the Dicke ladder, sweep the
// figure grids, evaluate bound reports, cross-check against the full-space
// oracle, and run quasistatic convergence studies.
//
// Exit codes: 0 success, 2 configuration error, 3 integration failure,
// 4 invariant or bound breach.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qreset/bounds.hpp"
#include "qreset/dynamics.hpp"
#include "qreset/errors.hpp"
#include "qreset/experiments.hpp"
#include "qreset/io.hpp"
#include "qreset/model.hpp"
#include "qreset/oracle.hpp"
#include "qreset/thermo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIntegration = 3;
constexpr int kExitInvariant = 4;

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        values.push_back(static_cast<int>(qreset::detail::parse_number(
            qreset::detail::trim(item), "list entry")));
    }
    if (values.empty()) throw qreset::ConfigError("empty list: " + text);
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        values.push_back(qreset::detail::parse_number(qreset::detail::trim(item),
                                                      "list entry"));
    }
    if (values.empty()) throw qreset::ConfigError("empty list: " + text);
    return values;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = qreset::detail::trim(item);
        if (!item.empty()) values.push_back(item);
    }
    if (values.empty()) throw qreset::ConfigError("empty list: " + text);
    return values;
}

qreset::ProtocolSpec protocol_spec_from_flag(const std::string& flag) {
    if (flag.rfind("file=", 0) == 0) {
        return qreset::parse_protocol_file(flag.substr(5));
    }
    qreset::ProtocolSpec spec;
    spec.kind = flag;
    return spec;
}

void print_bound_reports(const std::vector<qreset::BoundReport>& reports) {
    for (const auto& r : reports) {
        std::cout << "  " << r.name << ": ";
        if (!r.applicable) {
            std::cout << "n/a (" << r.context << ")\n";
            continue;
        }
        std::cout << (r.satisfied ? "ok" : (r.hard ? "VIOLATED" : "outside (informational)"))
                  << "  lhs=" << qreset::format_sig12(r.lhs)
                  << " rhs=" << qreset::format_sig12(r.rhs)
                  << " margin=" << qreset::format_sig12(r.margin) << '\n';
    }
}

int run_simulate(const qreset::RunConfig& config) {
    const qreset::Protocol protocol = config.protocol.build(config.params);
    const qreset::Trajectory traj =
        qreset::integrate(config.params, protocol, config.integrator);
    const qreset::ResetSummary summary = qreset::summarize(traj, config.params);

    const std::filesystem::path dir(config.out_dir);
    qreset::write_trajectory_csv(dir / "trajectory.csv", traj, config.emit_states);
    {
        std::ofstream out = qreset::detail::open_output(dir / "summary.json");
        out << qreset::summary_to_json(summary, config.params, protocol).dump(2) << '\n';
    }

    std::cout << "N=" << config.params.n_qubits << " protocol=" << protocol.kind_name()
              << " epsilon=" << qreset::format_sig12(summary.epsilon_final)
              << " heat_total=" << qreset::format_sig12(summary.heat_total)
              << " entropy_production="
              << qreset::format_sig12(summary.entropy_production);
    if (summary.reset_factor) {
        std::cout << " reset_factor=" << qreset::format_sig12(*summary.reset_factor);
    } else {
        std::cout << " reset_factor=n/a";
    }
    std::cout << "\nwrote " << (dir / "trajectory.csv").string() << " and "
              << (dir / "summary.json").string() << '\n';
    return kExitOk;
}

int run_sweep(const qreset::SweepSpec& spec, const std::string& out_dir, int workers) {
    const std::vector<qreset::SweepRow> rows = qreset::sweep(spec, workers);
    qreset::write_sweep_outputs(out_dir, rows, spec.base);
    bool any_failed = false;
    for (const auto& row : rows) {
        if (!row.ok) {
            any_failed = true;
            std::cerr << "row N=" << row.n_qubits << " protocol=" << row.protocol
                      << " failed: " << row.error << '\n';
        }
    }
    std::cout << "wrote fig2a.csv fig2b.csv fig3.csv bounds.csv under " << out_dir
              << " (" << rows.size() << " rows)\n";
    return any_failed ? kExitIntegration : kExitOk;
}

int run_bounds(const std::string& run_dir, const std::string& out_path) {
    namespace fs = std::filesystem;
    const qreset::RunArtifacts artifacts =
        qreset::read_summary_json((fs::path(run_dir) / "summary.json").string());
    const qreset::TrajectorySeries series =
        qreset::read_trajectory_csv((fs::path(run_dir) / "trajectory.csv").string());

    std::vector<qreset::BoundReport> reports;
    reports.push_back(qreset::check_speed_limit(artifacts.summary, artifacts.params));
    reports.push_back(qreset::check_distance_bound(artifacts.summary));
    reports.push_back(qreset::check_activity_bound(artifacts.summary, artifacts.params));
    reports.push_back(qreset::check_sigma_heat(artifacts.summary, artifacts.params));
    reports.push_back(qreset::check_reset_factor(artifacts.summary, artifacts.params));
    reports.push_back(qreset::check_zeta_bound_series(
        series.epsilon, series.zeta, artifacts.params.n_qubits,
        artifacts.protocol.monotone_increasing()));
    reports.push_back(qreset::check_asymptotic_window(artifacts.summary, artifacts.params,
                                                      artifacts.protocol));

    const fs::path out =
        out_path.empty() ? fs::path(run_dir) / "bounds.csv" : fs::path(out_path);
    qreset::write_bounds_csv(out, reports, artifacts.params.n_qubits,
                             std::string(artifacts.protocol.kind_name()));

    std::cout << "bound reports for N=" << artifacts.params.n_qubits << " protocol="
              << artifacts.protocol.kind_name() << ":\n";
    print_bound_reports(reports);
    std::cout << "wrote " << out.string() << '\n';

    for (const auto& r : reports) {
        if (r.applicable && r.hard && !r.satisfied) return kExitInvariant;
    }
    return kExitOk;
}

int run_oracle_check(const qreset::SystemParams& params,
                     const qreset::ProtocolSpec& protocol_spec, int grid_points,
                     double rel_tol, double abs_tol) {
    const qreset::Protocol protocol = protocol_spec.build(params);
    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i) {
        grid[static_cast<std::size_t>(i)] = params.tau * i / (grid_points - 1);
    }
    qreset::IntegratorOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    opts.output_grid = grid;

    const qreset::FullTrajectory full =
        qreset::integrate_full(params, protocol, grid, rel_tol, abs_tol);
    const qreset::Trajectory reduced = qreset::integrate(params, protocol, opts);
    const qreset::DeviationReport report = qreset::compare(full, reduced);

    std::cout << "max population deviation = "
              << qreset::format_sig12(report.max_population_deviation) << '\n'
              << "heat deviation at tau    = "
              << qreset::format_sig12(report.heat_deviation) << '\n'
              << "max Dicke-sector leakage = "
              << qreset::format_sig12(report.max_leakage) << '\n';

    const bool breach = report.max_population_deviation > 1e-6 ||
                        report.heat_deviation > 1e-6 || report.max_leakage > 1e-8;
    return breach ? kExitInvariant : kExitOk;
}

int run_quasistatic(const qreset::SystemParams& base, const std::vector<double>& taus,
                    double final_omega, const std::string& out_dir) {
    const std::vector<qreset::QuasistaticPoint> table =
        qreset::quasistatic_convergence(base.n_qubits, base, taus, final_omega);
    qreset::SystemParams params = base;
    qreset::write_quasistatic_csv(std::filesystem::path(out_dir) / "quasistatic.csv",
                                  table, params);
    const double landauer = qreset::landauer_collective(params);
    std::cout << "Landauer total = " << qreset::format_sig12(landauer) << '\n';
    for (const auto& point : table) {
        std::cout << "tau=" << qreset::format_sig12(point.tau)
                  << " heat_total=" << qreset::format_sig12(point.heat_total)
                  << " epsilon=" << qreset::format_sig12(point.epsilon_final) << '\n';
    }
    std::cout << "wrote " << (std::filesystem::path(out_dir) / "quasistatic.csv").string()
              << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective qubit-reset simulator (Dicke-sector birth-death chain)"};
    app.require_subcommand(1);

    // Common physical and integrator flags, shared by the subcommands and
    // overridable through QRESET_*-prefixed environment variables.
    int n_qubits = 1;
    double beta = 1.0, gamma0 = 1.0, tau = 1.0;
    double rel_tol = 1e-8, abs_tol = 1e-12;
    std::string protocol_flag = "quench";
    std::string out_dir = ".";

    auto add_common = [&](CLI::App* cmd, bool with_protocol) {
        cmd->add_option("-N,--n-qubits", n_qubits, "number of qubits")
            ->envname("QRESET_N");
        cmd->add_option("--beta", beta, "inverse temperature")->envname("QRESET_BETA");
        cmd->add_option("--gamma0", gamma0, "bare coupling rate")
            ->envname("QRESET_GAMMA0");
        cmd->add_option("--tau", tau, "protocol duration")->envname("QRESET_TAU");
        cmd->add_option("--rel-tol", rel_tol, "relative tolerance")
            ->envname("QRESET_REL_TOL");
        cmd->add_option("--abs-tol", abs_tol, "absolute tolerance")
            ->envname("QRESET_ABS_TOL");
        cmd->add_option("--out", out_dir, "output directory")->envname("QRESET_OUT");
        if (with_protocol) {
            cmd->add_option("--protocol", protocol_flag,
                            "quench | linear | exponential | file=PATH")
                ->envname("QRESET_PROTOCOL");
        }
    };

    // simulate
    std::string config_path;
    bool emit_states = false;
    double quench_omega = -1.0;
    CLI::App* simulate = app.add_subcommand("simulate", "integrate one reset run");
    simulate->add_option("--config", config_path, "key-value run configuration file");
    simulate->add_flag("--emit-states", emit_states, "include p_0..p_N in the CSV");
    simulate->add_option("--omega", quench_omega, "quench splitting (default 1/beta)");
    add_common(simulate, true);

    // sweep
    int figure = 0;
    std::string n_values_flag, protocols_flag = "quench,linear,exponential";
    int workers = 0;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the (N, protocol) grid");
    sweep_cmd->add_option("--figure", figure, "2 or 3: use the figure defaults");
    sweep_cmd->add_option("--n-values", n_values_flag, "comma-separated N list");
    sweep_cmd->add_option("--protocols", protocols_flag, "comma-separated protocol names");
    sweep_cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
    add_common(sweep_cmd, false);

    // bounds
    std::string run_dir, bounds_out;
    CLI::App* bounds_cmd =
        app.add_subcommand("bounds", "evaluate bound reports for a finished run");
    bounds_cmd->add_option("--run", run_dir, "directory holding summary.json + trajectory.csv")
        ->required();
    bounds_cmd->add_option("--out", bounds_out, "bounds CSV path (default RUN/bounds.csv)");

    // oracle-check
    int grid_points = 201;
    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle-check", "full Lindblad vs birth-death comparison (N <= 8)");
    oracle_cmd->add_option("--grid", grid_points, "number of comparison samples");
    add_common(oracle_cmd, true);

    // quasistatic
    std::string tau_list_flag = "10,100,1000,10000";
    double final_omega = -1.0;
    CLI::App* quasi_cmd = app.add_subcommand(
        "quasistatic", "slow-ramp convergence toward the collective Landauer cost");
    quasi_cmd->add_option("--tau-list", tau_list_flag, "comma-separated ramp durations");
    quasi_cmd->add_option("--final-omega", final_omega, "ramp target (default 10/beta)");
    add_common(quasi_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            qreset::RunConfig config;
            if (!config_path.empty()) config = qreset::parse_run_config(config_path);
            if (simulate->count("-N")) config.params.n_qubits = n_qubits;
            if (simulate->count("--beta")) config.params.beta = beta;
            if (simulate->count("--gamma0")) config.params.gamma0 = gamma0;
            if (simulate->count("--tau")) config.params.tau = tau;
            if (simulate->count("--rel-tol")) config.integrator.rel_tol = rel_tol;
            if (simulate->count("--abs-tol")) config.integrator.abs_tol = abs_tol;
            if (simulate->count("--out")) config.out_dir = out_dir;
            if (simulate->count("--protocol")) {
                config.protocol = protocol_spec_from_flag(protocol_flag);
            }
            if (simulate->count("--omega")) config.protocol.omega = quench_omega;
            if (emit_states) config.emit_states = true;
            config.params.validate();
            return run_simulate(config);
        }
        if (sweep_cmd->parsed()) {
            qreset::SweepSpec spec = qreset::SweepSpec::figure_defaults();
            if (figure != 0 && figure != 2 && figure != 3) {
                throw qreset::ConfigError("--figure must be 2 or 3");
            }
            if (!n_values_flag.empty()) spec.n_values = parse_int_list(n_values_flag);
            spec.protocol_names = parse_name_list(protocols_flag);
            if (sweep_cmd->count("--beta")) spec.base.beta = beta;
            if (sweep_cmd->count("--gamma0")) spec.base.gamma0 = gamma0;
            if (sweep_cmd->count("--tau")) spec.base.tau = tau;
            spec.integrator.rel_tol = rel_tol;
            spec.integrator.abs_tol = abs_tol;
            return run_sweep(spec, out_dir, workers);
        }
        if (bounds_cmd->parsed()) {
            return run_bounds(run_dir, bounds_out);
        }
        if (oracle_cmd->parsed()) {
            if (grid_points < 2) throw qreset::ConfigError("--grid must be >= 2");
            qreset::SystemParams params{n_qubits, beta, gamma0, tau};
            params.validate();
            return run_oracle_check(params, protocol_spec_from_flag(protocol_flag),
                                    grid_points, rel_tol, abs_tol);
        }
        if (quasi_cmd->parsed()) {
            qreset::SystemParams base{n_qubits, beta, gamma0, 1.0};
            base.validate();
            const double target = final_omega > 0.0 ? final_omega : 10.0 / beta;
            return run_quasistatic(base, parse_double_list(tau_list_flag), target,
                                   out_dir);
        }
    } catch (const qreset::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qreset::IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return kExitIntegration;
    } catch (const qreset::InvariantError& e) {
        std::cerr << "invariant breach: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
