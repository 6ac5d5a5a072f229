#include "boxrel/theory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "boxrel/errors.hpp"

namespace boxrel::theory {

namespace {

constexpr long double kInvSqrt2PiL = 0.398942280401432677939946059934L;
constexpr long double kInvSqrt2L = 0.707106781186547524400844362105L;
constexpr double kLn10 = 2.302585092994045684017991454684;

struct KernelsL {
    long double pdf;
    long double q;
};

KernelsL kernels_l(long double c) {
    return {expl(-0.5L * c * c) * kInvSqrt2PiL, 0.5L * erfcl(c * kInvSqrt2L)};
}

void check_point(double tau, double delta, double sigma_sq) {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("theory: tau must be positive and finite");
    if (!std::isfinite(delta))
        throw std::invalid_argument("theory: delta must be finite");
    if (delta <= 0.5) {
        std::ostringstream msg;
        msg << "theory: delta = " << delta
            << " is at or below the recovery threshold delta = 1/2; "
               "the asymptotic error law requires delta > 1/2";
        throw unsupported_regime(msg.str());
    }
    if (std::isnan(sigma_sq) || sigma_sq < 0.0)
        throw std::invalid_argument("theory: sigma_sq must be >= 0");
}

// F(tau) with the tail bracket (1+c^2)Q(c) - c p(c) = int_c^inf (h-c)^2 p dh.
// Evaluated in extended precision: the golden-section route resolves tau* to
// ~sqrt(eps F / F'') of the evaluation precision, and double eps alone would
// leave that noise floor above the 1e-8 agreement contract.
long double objective_l(long double tau, long double delta, long double sigma_sq) {
    const long double c = 2.0L / tau;
    const KernelsL k = kernels_l(c);
    const long double tail = (1.0L + c * c) * k.q - c * k.pdf;
    return 0.5L * tau * (delta - 0.5L) + sigma_sq / (2.0L * tau) + 0.5L * tau * tail;
}

// R(tau) = 2 tau^2 F'(tau); the bracket is E of the squared clipped error.
long double residual_l(long double tau, long double delta, long double sigma_sq) {
    const long double c = 2.0L / tau;
    const KernelsL k = kernels_l(c);
    const long double clipped_sq =
        0.5L * tau * tau - tau * tau * k.q - 2.0L * tau * k.pdf + 4.0L * k.q;
    return delta * tau * tau - sigma_sq - clipped_sq;
}

struct Bracket {
    long double lo;
    long double hi;
};

Bracket tau_bracket(double delta, double sigma_sq) {
    const double sigma = std::sqrt(sigma_sq);
    const double hi = std::max(10.0, 10.0 * sigma / std::sqrt(delta - 0.5));
    return {1e-6L, static_cast<long double>(hi)};
}

double golden_section_tau(double delta, double sigma_sq, double tol) {
    const auto [lo, hi] = tau_bracket(delta, sigma_sq);
    const long double d = delta, s = sigma_sq;
    constexpr long double kInvPhi = 0.618033988749894848204586834366L;

    long double a = lo, b = hi;
    long double x1 = b - kInvPhi * (b - a);
    long double x2 = a + kInvPhi * (b - a);
    long double f1 = objective_l(x1, d, s);
    long double f2 = objective_l(x2, d, s);

    const long double fa = objective_l(a, d, s);
    const long double fb = objective_l(b, d, s);
    if (std::min(f1, f2) >= std::min(fa, fb)) {
        std::ostringstream msg;
        msg << "solve_tau_star: no interior minimum on bracket [" << (double)a << ", "
            << (double)b << "] (F(lo)=" << (double)fa << ", F(hi)=" << (double)fb << ")";
        throw numerical_failure(msg.str());
    }

    while (b - a > static_cast<long double>(tol)) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = objective_l(x1, d, s);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = objective_l(x2, d, s);
        }
    }
    return static_cast<double>(0.5L * (a + b));
}

double bisect_tau(double delta, double sigma_sq, double tol) {
    const auto [lo, hi] = tau_bracket(delta, sigma_sq);
    const long double d = delta, s = sigma_sq;

    long double a = lo, b = hi;
    long double ra = residual_l(a, d, s);
    long double rb = residual_l(b, d, s);
    if (!(ra < 0.0L && rb > 0.0L)) {
        std::ostringstream msg;
        msg << "solve_tau_star: no sign change on bracket [" << (double)a << ", " << (double)b
            << "] (R(lo)=" << (double)ra << ", R(hi)=" << (double)rb << ")";
        throw numerical_failure(msg.str());
    }
    for (int it = 0; it < 400 && b - a > static_cast<long double>(tol); ++it) {
        const long double mid = 0.5L * (a + b);
        const long double rm = residual_l(mid, d, s);
        if (rm < 0.0L)
            a = mid;
        else
            b = mid;
    }
    return static_cast<double>(0.5L * (a + b));
}

}  // namespace

GaussKernels gaussian_kernels(double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("gaussian_kernels: c must be finite");
    if (c < 0.0)
        throw std::invalid_argument("gaussian_kernels: c must be >= 0 (use symmetry for c < 0)");
    const KernelsL k = kernels_l(static_cast<long double>(c));
    GaussKernels out;
    out.c = c;
    out.pdf = static_cast<double>(k.pdf);
    out.q = static_cast<double>(k.q);
    out.m1 = out.pdf;              // int_c^inf h p dh = p(c)
    out.m2 = out.q + c * out.pdf;  // integration by parts
    return out;
}

double qfunc(double c) { return 0.5 * std::erfc(c * static_cast<double>(kInvSqrt2L)); }

double gauss_pdf(double c) {
    return static_cast<double>(expl(-0.5L * (long double)c * c) * kInvSqrt2PiL);
}

double log10_qfunc(double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("log10_qfunc: c must be finite");
    if (c <= 8.0) return std::log10(qfunc(c));
    // ln Q(c) = -c^2/2 - ln c - ln sqrt(2 pi) + ln(1 - 1/c^2 + 3/c^4 - ...),
    // the standard Mills-ratio expansion; at c = 8 the truncation error is
    // below 1e-7 relative and it decays from there.
    const double u = 1.0 / (c * c);
    const double series = 1.0 + u * (-1.0 + u * (3.0 + u * (-15.0 + u * (105.0 - u * 945.0))));
    const double ln_q = -0.5 * c * c - std::log(c) - 0.9189385332046727417803297364 +
                        std::log(series);
    return ln_q / kLn10;
}

double do_objective(double tau, double delta, double sigma_sq) {
    check_point(tau, delta, sigma_sq);
    return static_cast<double>(objective_l(tau, delta, sigma_sq));
}

double fixed_point_residual(double tau, double delta, double sigma_sq) {
    check_point(tau, delta, sigma_sq);
    return static_cast<double>(residual_l(tau, delta, sigma_sq));
}

double solve_tau_star(double delta, double sigma_sq, TauMethod method, double tol) {
    check_point(1.0, delta, sigma_sq);  // validates delta and sigma_sq
    if (!(tol > 0.0)) throw std::invalid_argument("solve_tau_star: tol must be > 0");
    if (sigma_sq == 0.0) return 0.0;  // noiseless convention: tau* = 0, P_e = 0
    return method == TauMethod::minimize ? golden_section_tau(delta, sigma_sq, tol)
                                         : bisect_tau(delta, sigma_sq, tol);
}

TheoryPoint predict_pe(double delta, double snr) {
    if (std::isnan(snr) || snr <= 0.0)
        throw std::invalid_argument("predict_pe: snr must be > 0");
    const double sigma_sq = std::isinf(snr) ? 0.0 : 1.0 / snr;
    TheoryPoint point;
    point.delta = delta;
    point.snr = snr;
    point.gap_db = snr_gap_db(delta);  // validates delta > 1/2
    point.tau_star = solve_tau_star(delta, sigma_sq, TauMethod::fixed_point, 1e-12);
    point.pe = point.tau_star > 0.0 ? qfunc(1.0 / point.tau_star) : 0.0;
    point.pe_high_snr = qfunc(std::sqrt((delta - 0.5) * snr));
    point.pe_mfb = qfunc(std::sqrt(delta * snr));
    return point;
}

double snr_gap_db(double delta) {
    if (!std::isfinite(delta)) throw std::invalid_argument("snr_gap_db: delta must be finite");
    if (delta <= 0.5) {
        std::ostringstream msg;
        msg << "snr_gap_db: delta = " << delta
            << " is at or below the recovery threshold delta = 1/2";
        throw unsupported_regime(msg.str());
    }
    return 10.0 * std::log10(delta / (delta - 0.5));
}

}  // namespace boxrel::theory
