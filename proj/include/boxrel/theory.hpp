#pragma once

namespace boxrel::theory {

/// Standard normal tail quantities at truncation point c = 2/tau.
/// Identities: m1 = pdf exactly, m2 = q + c*pdf exactly.
struct GaussKernels {
    double c = 0.0;    // truncation point
    double pdf = 0.0;  // p(c) = exp(-c^2/2)/sqrt(2*pi)
    double q = 0.0;    // Q(c) = P(H > c)
    double m1 = 0.0;   // int_c^inf h p(h) dh
    double m2 = 0.0;   // int_c^inf h^2 p(h) dh
};

// Tail quantities with relative accuracy <= 1e-12 (until Q underflows).
// Throws std::invalid_argument on non-finite or negative c.
GaussKernels gaussian_kernels(double c);

// Q(c) for any real c (symmetry Q(-c) = 1 - Q(c)).
double qfunc(double c);

// Normal density p(c).
double gauss_pdf(double c);

// log10 Q(c), accurate to ~1e-6 absolute even where Q underflows; switches
// to the asymptotic expansion of the scaled complementary error function
// beyond c = 8.
double log10_qfunc(double c);

// Deterministic scalar objective
//   F(tau) = (tau/2)(delta - 1/2) + sigma_sq/(2 tau)
//          + (tau/2) * [(1 + c^2) Q(c) - c p(c)],   c = 2/tau,
// whose bracket equals int_{2/tau}^inf (h - 2/tau)^2 p(h) dh. Strictly convex
// in tau for delta > 1/2; its minimizer tau* gives the asymptotic bit error
// probability Q(1/tau*).
// Throws std::invalid_argument (tau <= 0, sigma_sq < 0) or unsupported_regime
// (delta <= 1/2, below the recovery threshold).
double do_objective(double tau, double delta, double sigma_sq);

// First-order optimality of F rewritten as the state-evolution residual
//   R(tau) = delta tau^2 - sigma_sq - [tau^2/2 - tau^2 Q(c) - 2 tau p(c) + 4 Q(c)],
// c = 2/tau; the bracket is E[w^2] for the clipped error w = max(tau H, -2)
// restricted to H < 0. R(tau) = 2 tau^2 F'(tau), so R(tau*) = 0 iff F'(tau*) = 0.
// Same error conditions as do_objective.
double fixed_point_residual(double tau, double delta, double sigma_sq);

enum class TauMethod {
    minimize,     // golden-section search on F
    fixed_point,  // bisection on R
};

// Solves for tau* on the bracket [1e-6, max(10, 10*sigma/sqrt(delta-1/2))].
// Both methods agree within 10*tol for tol >= 1e-9 (the minimize route
// evaluates F in extended precision to push the curvature noise floor below
// that). sigma_sq = 0 returns tau* = 0 by convention (error probability 0).
// Throws unsupported_regime for delta <= 1/2, numerical_failure if the
// bracket shows no sign change / interior minimum.
double solve_tau_star(double delta, double sigma_sq, TauMethod method, double tol = 1e-9);

/// Theory predictions for one (delta, SNR) operating point.
struct TheoryPoint {
    double delta = 0.0;
    double snr = 0.0;          // linear, 1/sigma_sq
    double tau_star = 0.0;
    double pe = 0.0;           // Q(1/tau*)
    double pe_high_snr = 0.0;  // Q(sqrt((delta - 1/2) SNR))
    double pe_mfb = 0.0;       // Q(sqrt(delta SNR)), matched filter bound
    double gap_db = 0.0;       // 10 log10(delta/(delta - 1/2))
};

// Evaluates all fields; snr may be +infinity (noiseless convention:
// tau* = 0 and all error probabilities 0). Throws unsupported_regime for
// delta <= 1/2 and std::invalid_argument for snr <= 0.
TheoryPoint predict_pe(double delta, double snr);

// SNR penalty of the relaxation relative to the matched filter bound,
// 10 log10(delta/(delta - 1/2)) dB. Throws unsupported_regime for delta <= 1/2.
double snr_gap_db(double delta);

}  // namespace boxrel::theory
