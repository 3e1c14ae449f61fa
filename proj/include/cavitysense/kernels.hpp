// kernels.hpp — numerical workhorses: Bessel functions of complex argument,
// log-domain powers of cosine, truncated Jacobi-Anger style sums and
// high-order finite-difference slopes.  Everything here is regime-agnostic.
#pragma once

#include <functional>
#include <vector>

#include "cavitysense/types.hpp"

namespace cavitysense {

// Signed log-domain scalar: value = sign · exp(log_mag).  sign == 0 encodes an
// exact zero, in which case log_mag is -inf.
struct LogSigned {
    double log_mag;
    int sign;  // -1, 0, +1

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }
};

// log |cos(θ)^p| with the sign carried separately.  Stable for p up to ~1e9:
// uses a series for log cos near θ = 0 and returns the -inf sentinel at exact
// zeros of cos.  Negative base with non-integer p is rejected.
LogSigned log_cos_pow(double theta, double p);

// Bessel function J_n(z) for integer n and complex argument, |z| < 1e4.
// Power series for |z| < 8, Miller downward recurrence with normalization
// J_0 + 2ΣJ_2k = 1 otherwise.  Relative accuracy ~1e-13.  NaN input or
// |z| ≥ 1e4 throws numeric_error.
complexd bessel_j(int n, complexd z);

// J_0(z) … J_nmax(z) in one pass (negative orders via J_{-n} = (−1)^n J_n).
std::vector<complexd> bessel_j_array(int nmax, complexd z);

struct TruncatedSeriesResult {
    complexd value{};
    int terms_used = 0;      // number of n values actually summed
    double tail_bound = 0.0; // estimated magnitude of the dropped tail
    bool converged = true;
};

// S(x)  = Σ_{n=-∞}^{∞} iⁿ J_n(x) w(n), truncated at |n| ≤ n_cut with
// n_cut = ⌈|x|⌉ + margin + ⌈10·|x|^{1/3}⌉  (margin < 0 selects the default 40).
// The weight may grow at most polynomially in n (ours are bounded by 1).
TruncatedSeriesResult jacobi_anger_sum(complexd x,
                                       const std::function<complexd(int)>& weight,
                                       int margin = -1);

// Same sum together with  S'(x) = Σ iⁿ J_n'(x) w(n),  J_n' = (J_{n-1} - J_{n+1})/2,
// both truncated consistently (needed for analytic β-derivatives).
struct SeriesPair {
    TruncatedSeriesResult sum;
    TruncatedSeriesResult dsum_dx;
};
SeriesPair jacobi_anger_sum_with_derivative(complexd x,
                                            const std::function<complexd(int)>& weight,
                                            int margin = -1);

// 4th-order central finite difference df/dx at x0 with step h = 1e-3·scale,
// plus a Richardson error estimate from the h vs 2h pair.
struct SlopeEstimate {
    double slope = 0.0;
    double error_estimate = 0.0;
    bool noisy = false;  // error estimate not small compared to the slope
};
SlopeEstimate finite_difference_slope(const std::function<double(double)>& f,
                                      double x0, double scale);

}  // namespace cavitysense
