// kernels.cpp — Bessel evaluation, log-cosine powers, truncated sums, slopes.
#include "cavitysense/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavitysense {

namespace {
constexpr double series_switch = 8.0;    // |z| below this: power series
constexpr double z_abs_limit = 1.0e4;    // documented domain bound
constexpr complexd iu{0.0, 1.0};

// i^n for integer n (n may be negative).
complexd ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Power-series J_n(z) for n ≥ 0, |z| small.  Term recursion keeps everything
// well scaled; for our domain (|z| < 8) fewer than ~40 terms are needed.
complexd bessel_series(int n, complexd z) {
    if (z == complexd{0.0, 0.0}) return n == 0 ? complexd{1.0, 0.0} : complexd{0.0, 0.0};
    const complexd half = 0.5 * z;
    complexd t0;
    if (n == 0) {
        t0 = {1.0, 0.0};
    } else {
        // (z/2)^n / n! in log domain to dodge premature under/overflow
        const complexd lg = static_cast<double>(n) * std::log(half);
        t0 = std::exp(lg - std::lgamma(static_cast<double>(n) + 1.0));
    }
    const complexd m = -half * half;
    complexd sum = t0, term = t0;
    for (int k = 1; k <= 400; ++k) {
        term *= m / (static_cast<double>(k) * static_cast<double>(n + k));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return sum;
}

// Miller downward recurrence with J_0 + 2 Σ J_{2k} = 1 normalization (valid
// for complex argument).  Returns orders 0..nmax.
std::vector<complexd> bessel_miller(int nmax, complexd z) {
    const double az = std::abs(z);
    const int start = std::max(nmax, static_cast<int>(std::ceil(az))) + 60 +
                      static_cast<int>(std::ceil(10.0 * std::cbrt(az)));
    std::vector<complexd> buf(static_cast<std::size_t>(start) + 2);
    buf[static_cast<std::size_t>(start) + 1] = {0.0, 0.0};
    buf[static_cast<std::size_t>(start)] = {1e-30, 0.0};
    for (int k = start; k >= 1; --k) {
        complexd next = (2.0 * k / z) * buf[static_cast<std::size_t>(k)] -
                        buf[static_cast<std::size_t>(k) + 1];
        buf[static_cast<std::size_t>(k) - 1] = next;
        if (std::abs(next) > 1e250) {  // rescale everything accumulated so far
            for (int j = k - 1; j <= start + 1; ++j) buf[static_cast<std::size_t>(j)] *= 1e-250;
        }
    }
    complexd norm = buf[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * buf[static_cast<std::size_t>(k)];
    if (norm == complexd{0.0, 0.0}) throw numeric_error("bessel_j: normalization sum vanished");
    std::vector<complexd> out(static_cast<std::size_t>(nmax) + 1);
    for (int k = 0; k <= nmax; ++k) out[static_cast<std::size_t>(k)] = buf[static_cast<std::size_t>(k)] / norm;
    return out;
}

void check_argument(complexd z) {
    if (std::isnan(z.real()) || std::isnan(z.imag()))
        throw numeric_error("bessel_j: NaN argument");
    if (std::abs(z) >= z_abs_limit)
        throw numeric_error("bessel_j: |z| >= 1e4 outside supported domain (overflow risk)");
}
}  // namespace

complexd bessel_j(int n, complexd z) {
    check_argument(z);
    const int na = std::abs(n);
    const double sgn = (n < 0 && (na % 2) != 0) ? -1.0 : 1.0;
    if (std::abs(z) < series_switch) return sgn * bessel_series(na, z);
    return sgn * bessel_miller(na, z)[static_cast<std::size_t>(na)];
}

std::vector<complexd> bessel_j_array(int nmax, complexd z) {
    check_argument(z);
    if (nmax < 0) throw numeric_error("bessel_j_array: nmax < 0");
    if (std::abs(z) < series_switch) {
        std::vector<complexd> out(static_cast<std::size_t>(nmax) + 1);
        for (int k = 0; k <= nmax; ++k) out[static_cast<std::size_t>(k)] = bessel_series(k, z);
        return out;
    }
    return bessel_miller(nmax, z);
}

LogSigned log_cos_pow(double theta, double p) {
    if (!std::isfinite(theta) || !std::isfinite(p))
        throw numeric_error("log_cos_pow: non-finite input");
    if (p == 0.0) return {0.0, +1};
    const double c = std::cos(theta);
    if (std::abs(c) < 1e-15)  // exact zero of cosine to double precision
        return {-std::numeric_limits<double>::infinity(), 0};

    double logc;
    const double r = std::remainder(theta, two_pi);  // nearest representative of θ mod 2π
    if (std::abs(r) < 1e-4) {
        const double r2 = r * r;
        logc = -r2 / 2.0 - r2 * r2 / 12.0 - r2 * r2 * r2 / 45.0;
    } else {
        logc = std::log(std::abs(c));
    }

    int sign = 1;
    if (c < 0.0) {
        const double pr = std::nearbyint(p);
        if (std::abs(p - pr) > 1e-9)
            throw numeric_error("log_cos_pow: negative base with non-integer power");
        sign = (static_cast<long long>(pr) % 2LL == 0LL) ? 1 : -1;
    }
    return {p * logc, sign};
}

namespace {
int default_cutoff(double ax, int margin) {
    if (margin < 0) margin = 40;
    return static_cast<int>(std::ceil(ax)) + margin + static_cast<int>(std::ceil(10.0 * std::cbrt(ax)));
}
}  // namespace

TruncatedSeriesResult jacobi_anger_sum(complexd x,
                                       const std::function<complexd(int)>& weight,
                                       int margin) {
    const int ncut = default_cutoff(std::abs(x), margin);
    const std::vector<complexd> j = bessel_j_array(ncut, x);

    complexd sum = j[0] * weight(0);
    double total_abs = std::abs(sum);
    double last = 0.0, prev = 0.0;
    for (int n = 1; n <= ncut; ++n) {
        // J_{-n} = (−1)^n J_n and i^{-n}(−1)^n = i^n fold the two sides together
        const complexd term = ipow(n) * j[static_cast<std::size_t>(n)] * (weight(n) + weight(-n));
        sum += term;
        const double a = std::abs(term);
        total_abs += a;
        prev = last;
        last = a;
    }
    TruncatedSeriesResult r;
    r.value = sum;
    r.terms_used = 2 * ncut + 1;
    r.tail_bound = 10.0 * std::max(last, prev);
    r.converged = r.tail_bound <= 1e-10 * (total_abs + 1e-300) || r.tail_bound < 1e-280;
    return r;
}

SeriesPair jacobi_anger_sum_with_derivative(complexd x,
                                            const std::function<complexd(int)>& weight,
                                            int margin) {
    const int ncut = default_cutoff(std::abs(x), margin);
    const std::vector<complexd> j = bessel_j_array(ncut + 1, x);

    complexd sum = j[0] * weight(0);
    complexd dsum = -j[1] * weight(0);  // J_0' = −J_1
    double total_abs = std::abs(sum), dtotal_abs = std::abs(dsum);
    double last = 0.0, prev = 0.0, dlast = 0.0, dprev = 0.0;
    for (int n = 1; n <= ncut; ++n) {
        const complexd wfold = weight(n) + weight(-n);
        const complexd ph = ipow(n);
        const complexd term = ph * j[static_cast<std::size_t>(n)] * wfold;
        const complexd jm1 = j[static_cast<std::size_t>(n) - 1];
        const complexd jp1 = j[static_cast<std::size_t>(n) + 1];
        const complexd dterm = ph * (0.5 * (jm1 - jp1)) * wfold;
        sum += term;
        dsum += dterm;
        prev = last;
        last = std::abs(term);
        dprev = dlast;
        dlast = std::abs(dterm);
        total_abs += last;
        dtotal_abs += dlast;
    }
    SeriesPair p;
    p.sum.value = sum;
    p.sum.terms_used = 2 * ncut + 1;
    p.sum.tail_bound = 10.0 * std::max(last, prev);
    p.sum.converged = p.sum.tail_bound <= 1e-10 * (total_abs + 1e-300) || p.sum.tail_bound < 1e-280;
    p.dsum_dx.value = dsum;
    p.dsum_dx.terms_used = 2 * ncut + 1;
    p.dsum_dx.tail_bound = 10.0 * std::max(dlast, dprev);
    p.dsum_dx.converged =
        p.dsum_dx.tail_bound <= 1e-10 * (dtotal_abs + 1e-300) || p.dsum_dx.tail_bound < 1e-280;
    return p;
}

SlopeEstimate finite_difference_slope(const std::function<double(double)>& f,
                                      double x0, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw numeric_error("finite_difference_slope: scale must be positive");
    const double h = 1e-3 * scale;
    auto d4 = [&](double step) {
        return (-f(x0 + 2.0 * step) + 8.0 * f(x0 + step) - 8.0 * f(x0 - step) +
                f(x0 - 2.0 * step)) /
               (12.0 * step);
    };
    const double dh = d4(h);
    const double d2h = d4(2.0 * h);
    SlopeEstimate s;
    s.error_estimate = std::abs(dh - d2h) / 15.0;
    s.slope = dh + (dh - d2h) / 15.0;  // Richardson extrapolation (order 6)
    s.noisy = !std::isfinite(s.slope) ||
              s.error_estimate > 0.05 * std::abs(s.slope) + 1e-300;
    return s;
}

}  // namespace cavitysense
