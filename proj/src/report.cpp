#include "boxrel/report.hpp"

#include <cmath>
#include <cstdio>

namespace boxrel::report {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

namespace {

void csv_num(std::ostream& os, const std::optional<double>& v) {
    // non-finite values serialize as empty cells, mirroring the JSON nulls,
    // so the two formats carry identical information
    if (v && std::isfinite(*v)) os << format_g17(*v);
}

void csv_int(std::ostream& os, const std::optional<long long>& v) {
    if (v) os << *v;
}

void json_num(std::ostream& os, const char* key, const std::optional<double>& v, bool& first) {
    if (!first) os << ',';
    first = false;
    os << '"' << key << "\":";
    if (v && std::isfinite(*v))
        os << format_g17(*v);
    else
        os << "null";  // absent fields and non-finite values carry no JSON number
}

void json_int(std::ostream& os, const char* key, const std::optional<long long>& v,
              bool& first) {
    if (!first) os << ',';
    first = false;
    os << '"' << key << "\":";
    if (v)
        os << *v;
    else
        os << "null";
}

}  // namespace

void emit_rows(const std::vector<Row>& rows, Format format, std::ostream& sink) {
    if (format == Format::csv) {
        sink << kCsvHeader << '\n';
        for (const Row& r : rows) {
            csv_num(sink, r.snr_db);
            sink << ',';
            csv_num(sink, r.delta);
            sink << ',';
            csv_int(sink, r.n);
            sink << ',';
            csv_int(sink, r.trials);
            sink << ',';
            csv_num(sink, r.ber_mean);
            sink << ',';
            csv_num(sink, r.ber_ci_lo);
            sink << ',';
            csv_num(sink, r.ber_ci_hi);
            sink << ',';
            csv_num(sink, r.pe_theory);
            sink << ',';
            csv_num(sink, r.pe_high_snr);
            sink << ',';
            csv_num(sink, r.pe_mfb);
            sink << ',';
            csv_num(sink, r.tau_star);
            sink << ',';
            csv_num(sink, r.z_score);
            sink << '\n';
        }
        return;
    }
    sink << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        bool first = true;
        sink << "  {";
        json_num(sink, "snr_db", r.snr_db, first);
        json_num(sink, "delta", r.delta, first);
        json_int(sink, "n", r.n, first);
        json_int(sink, "trials", r.trials, first);
        json_num(sink, "ber_mean", r.ber_mean, first);
        json_num(sink, "ber_ci_lo", r.ber_ci_lo, first);
        json_num(sink, "ber_ci_hi", r.ber_ci_hi, first);
        json_num(sink, "pe_theory", r.pe_theory, first);
        json_num(sink, "pe_high_snr", r.pe_high_snr, first);
        json_num(sink, "pe_mfb", r.pe_mfb, first);
        json_num(sink, "tau_star", r.tau_star, first);
        json_num(sink, "z_score", r.z_score, first);
        sink << '}' << (i + 1 < rows.size() ? "," : "") << '\n';
    }
    sink << "]\n";
}

Row row_from_theory(const theory::TheoryPoint& point, double snr_db) {
    Row row;
    row.snr_db = snr_db;
    row.delta = point.delta;
    row.pe_theory = point.pe;
    row.pe_high_snr = point.pe_high_snr;
    row.pe_mfb = point.pe_mfb;
    row.tau_star = point.tau_star;
    return row;
}

Row row_from_comparison(const mc::ComparisonRow& cmp) {
    Row row;
    row.snr_db = cmp.snr_db;
    row.delta = cmp.delta;
    row.n = cmp.n;
    row.trials = cmp.trials;
    row.ber_mean = cmp.ber_mean;
    row.ber_ci_lo = cmp.ci_lo;
    row.ber_ci_hi = cmp.ci_hi;
    row.pe_theory = cmp.pe_theory;
    row.pe_high_snr = cmp.pe_high_snr;
    row.pe_mfb = cmp.pe_mfb;
    row.tau_star = cmp.tau_star;
    row.z_score = cmp.z_score;
    return row;
}

}  // namespace boxrel::report
