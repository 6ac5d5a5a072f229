#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "boxrel/montecarlo.hpp"
#include "boxrel/theory.hpp"

namespace boxrel::report {

// Exact column order of every emitted table.
inline constexpr const char* kCsvHeader =
    "snr_db,delta,n,trials,ber_mean,ber_ci_lo,ber_ci_hi,pe_theory,"
    "pe_high_snr,pe_mfb,tau_star,z_score";

/// One output row; fields a command does not produce stay disengaged and are
/// serialized as empty CSV cells / JSON nulls.
struct Row {
    std::optional<double> snr_db;
    std::optional<double> delta;
    std::optional<long long> n;
    std::optional<long long> trials;
    std::optional<double> ber_mean;
    std::optional<double> ber_ci_lo;
    std::optional<double> ber_ci_hi;
    std::optional<double> pe_theory;
    std::optional<double> pe_high_snr;
    std::optional<double> pe_mfb;
    std::optional<double> tau_star;
    std::optional<double> z_score;
};

enum class Format { csv, json };

// Shortest round-trip-exact decimal form (17 significant digits, %.17g).
std::string format_g17(double v);

// Writes rows in the fixed schema. CSV: header + one line per row, absent or
// non-finite fields empty. JSON: array of objects with the same keys in the
// same order, absent or non-finite numbers as null. Doubles carry 17
// significant digits so re-parsing reproduces them bit-exactly.
void emit_rows(const std::vector<Row>& rows, Format format, std::ostream& sink);

// Theory-only row (simulation columns left empty).
Row row_from_theory(const theory::TheoryPoint& point, double snr_db);

// Full overlay row.
Row row_from_comparison(const mc::ComparisonRow& cmp);

}  // namespace boxrel::report
