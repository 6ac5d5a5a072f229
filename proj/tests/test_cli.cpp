#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "boxrel/cli.hpp"
#include "boxrel/report.hpp"

using boxrel::cli::kExitNumerical;
using boxrel::cli::kExitOk;
using boxrel::cli::kExitUsage;
using boxrel::cli::run_cli;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream str;
    str << in.rdbuf();
    return str.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string tmp_path(const std::string& name) { return "/tmp/boxrel_cli_" + name; }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("predict emits one complete theory row") {
    const std::string out = tmp_path("predict.csv");
    const int rc = run_cli({"predict", "--delta", "1", "--snr-db", "0", "--out", out});
    CHECK(rc == kExitOk);

    const auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == boxrel::report::kCsvHeader);

    const auto f = split_csv(rows[1]);
    REQUIRE(f.size() == 12);
    CHECK(std::stod(f[0]) == 0.0);                 // snr_db
    CHECK(std::stod(f[1]) == 1.0);                 // delta
    CHECK(f[2].empty());                           // n: not a simulation
    CHECK(f[3].empty());                           // trials
    CHECK(f[4].empty());                           // ber_mean
    CHECK(std::abs(std::stod(f[7]) - 0.21910256268222304) <= 1e-11);   // pe_theory
    CHECK(std::abs(std::stod(f[8]) - 0.23975006109347669) <= 1e-13);   // pe_high_snr
    CHECK(std::abs(std::stod(f[9]) - 0.15865525393145702) <= 1e-13);   // pe_mfb
    CHECK(std::abs(std::stod(f[10]) - 1.2899435938204870) <= 1e-9);    // tau_star
    CHECK(f[11].empty());                          // z_score
}

TEST_CASE("predict accepts lists and grids") {
    const std::string out = tmp_path("predict_grid.csv");
    const int rc = run_cli({"predict", "--delta", "0.7,1", "--snr-db", "0:4:2",
                            "--out", out});
    CHECK(rc == kExitOk);
    const auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 7);  // header + 2 deltas x 3 SNRs
    // sorted by (delta, snr_db)
    double prev_delta = -1.0, prev_snr = -1e9;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto f = split_csv(rows[i]);
        const double d = std::stod(f[1]);
        const double s = std::stod(f[0]);
        CHECK(d >= prev_delta);
        if (d == prev_delta) CHECK(s > prev_snr);
        prev_delta = d;
        prev_snr = s;
    }
}

TEST_CASE("below-threshold arguments exit with a usage error naming the regime") {
    CHECK(run_cli({"predict", "--delta", "0.4", "--snr-db", "10"}) == kExitUsage);
    CHECK(run_cli({"gap", "--delta", "0.3"}) == kExitUsage);
}

TEST_CASE("unknown flags, missing subcommands, and help") {
    CHECK(run_cli({"predict", "--delta", "1", "--snr-db", "0", "--bogus"}) == kExitUsage);
    CHECK(run_cli({}) == kExitUsage);
    CHECK(run_cli({"--help"}) == kExitOk);
    CHECK(run_cli({"simulate", "--help"}) == kExitOk);
}

TEST_CASE("unwritable output sink exits with the numerical-failure code") {
    CHECK(run_cli({"gap", "--delta", "1", "--out",
                   "/nonexistent_dir_boxrel/x.csv"}) == kExitNumerical);
}

TEST_CASE("gap prints a bare number in csv mode and a json object otherwise") {
    const std::string out = tmp_path("gap.txt");
    CHECK(run_cli({"gap", "--delta", "1", "--out", out}) == kExitOk);
    CHECK(slurp(out) == "3.0103\n");

    const std::string jout = tmp_path("gap.json");
    CHECK(run_cli({"gap", "--delta", "0.7", "--format", "json", "--out", jout}) == kExitOk);
    const nlohmann::json j = nlohmann::json::parse(slurp(jout));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    CHECK(j[0]["delta"].get<double>() == 0.7);
    CHECK(std::abs(j[0]["gap_db"].get<double>() - 5.4406804435027564) <= 1e-12);
}

TEST_CASE("simulate joins simulation and theory columns") {
    const std::string out = tmp_path("simulate.csv");
    const int rc = run_cli({"simulate", "--delta", "1", "--snr-db", "0", "--n", "64",
                            "--trials", "10", "--seed", "7", "--out", out});
    CHECK(rc == kExitOk);
    const auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 2);
    const auto f = split_csv(rows[1]);
    REQUIRE(f.size() == 12);
    CHECK(std::stod(f[2]) == 64.0);   // n
    CHECK(std::stod(f[3]) == 10.0);   // trials
    const double ber = std::stod(f[4]);
    CHECK(ber > 0.05);
    CHECK(ber < 0.45);
    CHECK(std::stod(f[5]) <= ber);    // ci_lo
    CHECK(std::stod(f[6]) >= ber);    // ci_hi
    CHECK(!f[11].empty());            // z_score present

    // identical invocation is bit-identical output
    const std::string out2 = tmp_path("simulate2.csv");
    run_cli({"simulate", "--delta", "1", "--snr-db", "0", "--n", "64", "--trials", "10",
             "--seed", "7", "--out", out2});
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("simulate below the theory threshold emits a simulation-only row") {
    const std::string out = tmp_path("simulate_low.csv");
    const int rc = run_cli({"simulate", "--delta", "0.4", "--snr-db", "0", "--n", "16",
                            "--trials", "2", "--seed", "1", "--out", out});
    CHECK(rc == kExitOk);
    const auto f = split_csv(lines_of(slurp(out)).at(1));
    REQUIRE(f.size() == 12);
    CHECK(!f[4].empty());  // ber_mean present
    CHECK(f[7].empty());   // pe_theory empty below threshold
    CHECK(f[10].empty());  // tau_star empty
    CHECK(f[11].empty());  // z_score empty
}

TEST_CASE("sweep produces a sorted grid regardless of input order") {
    const std::string out = tmp_path("sweep.csv");
    const int rc = run_cli({"sweep", "--delta", "1,0.7", "--snr-db", "0:2:2", "--n", "16",
                            "--trials", "2", "--seed", "3", "--out", out});
    CHECK(rc == kExitOk);
    const auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 5);  // header + 2x2 grid
    const std::vector<double> want_delta{0.7, 0.7, 1.0, 1.0};
    const std::vector<double> want_snr{0.0, 2.0, 0.0, 2.0};
    for (int i = 0; i < 4; ++i) {
        const auto f = split_csv(rows[i + 1]);
        CHECK(std::stod(f[1]) == want_delta[i]);
        CHECK(std::stod(f[0]) == want_snr[i]);
    }
}

TEST_CASE("json output round-trips the csv values bit-exactly") {
    const std::string csv_out = tmp_path("round.csv");
    const std::string json_out = tmp_path("round.json");
    const std::vector<std::string> base{"sweep", "--delta", "0.7", "--snr-db", "0:2:2",
                                        "--n",   "16",      "--trials", "2",
                                        "--seed", "5"};
    auto with_sink = [&](const std::string& fmt, const std::string& path) {
        std::vector<std::string> args = base;
        args.insert(args.end(), {"--format", fmt, "--out", path});
        return run_cli(args);
    };
    CHECK(with_sink("csv", csv_out) == kExitOk);
    CHECK(with_sink("json", json_out) == kExitOk);

    const auto rows = lines_of(slurp(csv_out));
    const nlohmann::json j = nlohmann::json::parse(slurp(json_out));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == rows.size() - 1);

    const auto header = split_csv(rows[0]);
    for (size_t r = 0; r < j.size(); ++r) {
        const auto f = split_csv(rows[r + 1]);
        REQUIRE(f.size() == header.size());
        for (size_t c = 0; c < header.size(); ++c) {
            const auto& cell = j[r][header[c]];
            if (f[c].empty()) {
                CHECK(cell.is_null());
            } else {
                REQUIRE(cell.is_number());
                // 17-significant-digit serialization reproduces the double bits
                CHECK(cell.get<double>() == std::stod(f[c]));
            }
        }
    }
}

TEST_CASE("independence reports the joint frequency against the power prediction") {
    const std::string out = tmp_path("independence.csv");
    const int rc = run_cli({"independence", "--k", "2", "--delta", "1", "--snr-db", "0",
                            "--n", "32", "--trials", "5", "--subsets", "50", "--seed",
                            "2", "--out", out});
    CHECK(rc == kExitOk);
    const auto f = split_csv(lines_of(slurp(out)).at(1));
    REQUIRE(f.size() == 12);
    const double freq = std::stod(f[4]);
    CHECK(freq >= 0.0);
    CHECK(freq <= 1.0);
    const double pred = std::stod(f[7]);
    CHECK(std::abs(pred - 0.048005932973917474) <= 1e-11);  // Q(1/tau*)^2
    CHECK(!f[10].empty());  // tau_star
    CHECK(f[8].empty());    // pe_high_snr not meaningful here
    CHECK(f[9].empty());    // pe_mfb not meaningful here
}

TEST_CASE("ao subcommand emits the overlay row") {
    const std::string out = tmp_path("ao.csv");
    const int rc = run_cli({"ao", "--delta", "1", "--snr-db", "0", "--n", "256",
                            "--trials", "8", "--seed", "3", "--out", out});
    CHECK(rc == kExitOk);
    const auto f = split_csv(lines_of(slurp(out)).at(1));
    REQUIRE(f.size() == 12);
    CHECK(std::stod(f[4]) > 0.05);  // ber_mean in a sane band
    CHECK(std::stod(f[4]) < 0.45);
    CHECK(std::abs(std::stod(f[7]) - 0.219102562682) <= 1e-9);
}

TEST_CASE("config file supplies defaults, flags win on conflict") {
    const std::string cfg = tmp_path("cfg.ini");
    write_file(cfg, "[predict]\ndelta=0.8\nsnr-db=3\n");

    const std::string out1 = tmp_path("cfg_a.csv");
    CHECK(run_cli({"--config", cfg, "predict", "--out", out1}) == kExitOk);
    const auto fa = split_csv(lines_of(slurp(out1)).at(1));
    CHECK(std::stod(fa[0]) == 3.0);
    CHECK(std::stod(fa[1]) == 0.8);

    // a command-line flag overrides the file
    const std::string out2 = tmp_path("cfg_b.csv");
    CHECK(run_cli({"--config", cfg, "predict", "--delta", "1", "--out", out2}) == kExitOk);
    const auto fb = split_csv(lines_of(slurp(out2)).at(1));
    CHECK(std::stod(fb[0]) == 3.0);  // still from the file
    CHECK(std::stod(fb[1]) == 1.0);  // overridden
}

TEST_CASE("emit_rows formats the fixed schema") {
    using boxrel::report::emit_rows;
    using boxrel::report::Format;
    using boxrel::report::Row;

    std::ostringstream empty;
    emit_rows({}, Format::csv, empty);
    CHECK(empty.str() == std::string(boxrel::report::kCsvHeader) + "\n");

    Row blank;  // every field disengaged
    std::ostringstream blank_csv;
    emit_rows({blank}, Format::csv, blank_csv);
    const auto rows = lines_of(blank_csv.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == ",,,,,,,,,,,");

    // non-finite numbers become JSON nulls
    Row inf_row;
    inf_row.snr_db = 0.0;
    inf_row.z_score = std::numeric_limits<double>::infinity();
    std::ostringstream json_sink;
    emit_rows({inf_row}, Format::json, json_sink);
    const nlohmann::json j = nlohmann::json::parse(json_sink.str());
    CHECK(j[0]["snr_db"].get<double>() == 0.0);
    CHECK(j[0]["z_score"].is_null());
    CHECK(j[0]["delta"].is_null());
}

TEST_CASE("format_g17 round-trips doubles through text") {
    using boxrel::report::format_g17;
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 1.2899435938203825, 3.0102999566398120,
                     123456789.123456789}) {
        CHECK(std::stod(format_g17(v)) == v);
        CHECK(std::stod(format_g17(-v)) == -v);
    }
}
