#include "boxrel/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <CLI11.hpp>

#include "boxrel/errors.hpp"
#include "boxrel/model.hpp"
#include "boxrel/montecarlo.hpp"
#include "boxrel/report.hpp"
#include "boxrel/theory.hpp"

namespace boxrel::cli {

namespace {

double parse_double(const std::string& token, const char* what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + ": cannot parse number '" + token + "'");
    }
    if (used != token.size())
        throw std::invalid_argument(std::string(what) + ": trailing characters in '" + token +
                                    "'");
    return value;
}

std::vector<double> parse_list(const std::string& spec, const char* what) {
    std::vector<double> values;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty()) values.push_back(parse_double(token, what));
    if (values.empty())
        throw std::invalid_argument(std::string(what) + ": empty value list '" + spec + "'");
    return values;
}

// Accepts either a comma list ("0,4,8") or an inclusive start:stop:step grid
// ("0:12:1"), both in dB.
std::vector<double> parse_grid(const std::string& spec, const char* what) {
    if (spec.find(':') == std::string::npos) return parse_list(spec, what);
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ':')) parts.push_back(token);
    if (parts.size() != 3)
        throw std::invalid_argument(std::string(what) + ": grid must be start:stop:step, got '" +
                                    spec + "'");
    const double start = parse_double(parts[0], what);
    const double stop = parse_double(parts[1], what);
    const double step = parse_double(parts[2], what);
    if (!(step > 0.0) && !(step < 0.0))
        throw std::invalid_argument(std::string(what) + ": grid step must be nonzero");
    if ((stop - start) * step < 0.0)
        throw std::invalid_argument(std::string(what) + ": grid step points away from stop");
    std::vector<double> values;
    const double slack = std::abs(step) * 1e-9;
    for (int i = 0;; ++i) {
        const double v = start + step * i;
        if (step > 0.0 ? v > stop + slack : v < stop - slack) break;
        values.push_back(v);
        if (values.size() > 100000)
            throw std::invalid_argument(std::string(what) + ": grid has too many points");
    }
    return values;
}

report::Format parse_format(const std::string& name) {
    return name == "json" ? report::Format::json : report::Format::csv;
}

// Routes the payload to --out (default standard output). Unwritable sinks are
// a numerical/environment failure, not a usage error.
int with_sink(const std::string& out, const std::function<void(std::ostream&)>& payload) {
    if (out.empty() || out == "-") {
        payload(std::cout);
        std::cout.flush();
        return kExitOk;
    }
    std::ofstream file(out);
    if (!file) {
        std::cerr << "error: cannot open output file '" << out << "'\n";
        return kExitNumerical;
    }
    payload(file);
    file.flush();
    if (!file) {
        std::cerr << "error: failed writing output file '" << out << "'\n";
        return kExitNumerical;
    }
    return kExitOk;
}

double snr_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

struct SimOptions {
    double delta = 1.0;
    double snr_db = 0.0;
    int n = 512;
    int trials = 20;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    bool all_ones = false;
};

void add_sim_options(CLI::App* cmd, SimOptions& opt, bool with_tol) {
    cmd->add_option("--delta", opt.delta, "Measurement ratio m/n");
    cmd->add_option("--snr-db", opt.snr_db, "SNR in dB");
    cmd->add_option("--n", opt.n, "Transmit dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--trials", opt.trials, "Independent trials")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "Master seed for all random streams");
    if (with_tol)
        cmd->add_option("--tol", opt.tol, "Solver KKT tolerance")->check(CLI::PositiveNumber);
    cmd->add_flag("--all-ones", opt.all_ones, "Transmit the all-ones signal instead of random bits");
}

// One simulation row; theory columns stay empty when delta is at or below
// the 1/2 threshold where the asymptotic law does not apply.
report::Row simulate_row(const SimOptions& opt, mc::Path path) {
    mc::ExperimentConfig config;
    config.shape = model::make_shape(opt.n, opt.delta, opt.snr_db);
    config.trials = opt.trials;
    config.master_seed = opt.seed;
    config.path = path;
    config.solver_tol = opt.tol;
    config.force_all_ones_signal = opt.all_ones;
    const mc::TrialSummary summary = mc::run_trials(config);

    if (opt.delta > 0.5) {
        const theory::TheoryPoint point = theory::predict_pe(opt.delta, config.shape.snr);
        return report::row_from_comparison(mc::compare_to_theory(summary, point));
    }
    report::Row row;
    row.snr_db = opt.snr_db;
    row.delta = opt.delta;
    row.n = opt.n;
    row.trials = opt.trials;
    row.ber_mean = summary.ber_mean;
    row.ber_ci_lo = summary.ci_lo;
    row.ber_ci_hi = summary.ci_hi;
    return row;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Box-relaxation BPSK decoder: asymptotic error theory and Monte Carlo"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "Read options from a key=value file (flags win on conflict)");
    app.require_subcommand(1);

    std::string format_name = "csv";
    std::string out_path = "-";

    auto add_io = [&](CLI::App* cmd) {
        cmd->add_option("--format", format_name, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", out_path, "Output file path ('-' for standard output)");
    };

    // predict
    std::string predict_delta = "1.0";
    std::string predict_snr = "0";
    CLI::App* predict =
        app.add_subcommand("predict", "Asymptotic error probability Q(1/tau*) per (delta, SNR)");
    predict->add_option("--delta", predict_delta, "Ratio m/n; comma list allowed");
    predict->add_option("--snr-db", predict_snr, "SNR dB values: list 'a,b' or grid 'start:stop:step'");
    add_io(predict);

    // simulate
    SimOptions sim_opt;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo decoder trials next to the theory columns");
    add_sim_options(simulate, sim_opt, true);
    add_io(simulate);

    // ao
    SimOptions ao_opt;
    CLI::App* ao_cmd = app.add_subcommand(
        "ao", "Auxiliary-machinery trials (scalarized Gaussian surrogate) next to theory");
    add_sim_options(ao_cmd, ao_opt, false);
    add_io(ao_cmd);

    // sweep
    SimOptions sweep_opt;
    std::string sweep_delta = "0.7,1.0";
    std::string sweep_snr = "0:12:1";
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Waterfall grid: simulation vs theory over (delta, SNR) values");
    sweep->add_option("--delta", sweep_delta, "Comma list of ratios m/n");
    sweep->add_option("--snr-db", sweep_snr, "SNR dB grid 'start:stop:step' or comma list");
    sweep->add_option("--n", sweep_opt.n, "Transmit dimension")->check(CLI::PositiveNumber);
    sweep->add_option("--trials", sweep_opt.trials, "Trials per grid point")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sweep_opt.seed, "Master seed for all random streams");
    sweep->add_option("--tol", sweep_opt.tol, "Solver KKT tolerance")
        ->check(CLI::PositiveNumber);
    sweep->add_flag("--all-ones", sweep_opt.all_ones,
                    "Transmit the all-ones signal instead of random bits");
    add_io(sweep);

    // independence
    SimOptions ind_opt;
    ind_opt.trials = 200;
    int ind_k = 2;
    int ind_subsets = 2000;
    CLI::App* independence = app.add_subcommand(
        "independence", "Joint k-bit error frequency against the product law Q^k(1/tau*)");
    independence->add_option("--k", ind_k, "Bits per subset")->check(CLI::PositiveNumber);
    independence->add_option("--subsets", ind_subsets, "Random k-subsets per trial")
        ->check(CLI::PositiveNumber);
    add_sim_options(independence, ind_opt, true);
    add_io(independence);

    // gap
    double gap_delta = 1.0;
    CLI::App* gap =
        app.add_subcommand("gap", "SNR gap 10*log10(delta/(delta-1/2)) dB to the matched filter bound");
    gap->add_option("--delta", gap_delta, "Ratio m/n");
    add_io(gap);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help to stdout or the error to stderr
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        std::vector<report::Row> rows;
        if (predict->parsed()) {
            std::vector<double> deltas = parse_list(predict_delta, "--delta");
            std::vector<double> snrs = parse_grid(predict_snr, "--snr-db");
            std::sort(deltas.begin(), deltas.end());
            std::sort(snrs.begin(), snrs.end());
            for (double d : deltas)
                for (double s : snrs)
                    rows.push_back(report::row_from_theory(theory::predict_pe(d, snr_linear(s)), s));
        } else if (simulate->parsed()) {
            rows.push_back(simulate_row(sim_opt, mc::Path::po));
        } else if (ao_cmd->parsed()) {
            rows.push_back(simulate_row(ao_opt, mc::Path::ao));
        } else if (sweep->parsed()) {
            std::vector<double> deltas = parse_list(sweep_delta, "--delta");
            std::vector<double> snrs = parse_grid(sweep_snr, "--snr-db");
            std::sort(deltas.begin(), deltas.end());
            std::sort(snrs.begin(), snrs.end());
            for (double d : deltas) {
                for (double s : snrs) {
                    SimOptions point = sweep_opt;
                    point.delta = d;
                    point.snr_db = s;
                    rows.push_back(simulate_row(point, mc::Path::po));
                }
            }
        } else if (independence->parsed()) {
            mc::ExperimentConfig config;
            config.shape = model::make_shape(ind_opt.n, ind_opt.delta, ind_opt.snr_db);
            config.trials = ind_opt.trials;
            config.master_seed = ind_opt.seed;
            config.path = mc::Path::po;
            config.solver_tol = ind_opt.tol;
            config.force_all_ones_signal = ind_opt.all_ones;
            const mc::JointErrorStats stats = mc::joint_error_stats(config, ind_k, ind_subsets);
            const theory::TheoryPoint point =
                theory::predict_pe(ind_opt.delta, config.shape.snr);
            report::Row row;
            row.snr_db = ind_opt.snr_db;
            row.delta = ind_opt.delta;
            row.n = ind_opt.n;
            row.trials = ind_opt.trials;
            row.ber_mean = stats.joint_error_freq;  // joint frequency in the BER column
            row.ber_ci_lo = stats.joint_error_freq - 1.96 * stats.std_err;
            row.ber_ci_hi = stats.joint_error_freq + 1.96 * stats.std_err;
            row.pe_theory = stats.independence_prediction;
            row.tau_star = point.tau_star;
            if (stats.std_err > 0.0)
                row.z_score =
                    (stats.joint_error_freq - stats.independence_prediction) / stats.std_err;
            else if (stats.joint_error_freq == stats.independence_prediction)
                row.z_score = 0.0;
            rows.push_back(row);
        } else if (gap->parsed()) {
            const double gap_db = theory::snr_gap_db(gap_delta);
            return with_sink(out_path, [&](std::ostream& os) {
                if (parse_format(format_name) == report::Format::json) {
                    os << "[{\"delta\":" << report::format_g17(gap_delta)
                       << ",\"gap_db\":" << report::format_g17(gap_db) << "}]\n";
                } else {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%g", gap_db);
                    os << buf << '\n';
                }
            });
        }
        return with_sink(out_path, [&](std::ostream& os) {
            report::emit_rows(rows, parse_format(format_name), os);
        });
    } catch (const unsupported_regime& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const numerical_failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace boxrel::cli
