// analytic_ideal.cpp — lossless protocol: QFI, Bessel-sum moments, exact
// sensitivity, and the direct-measurement no-go result.
#include <cmath>
#include <limits>

#include "cavitysense/analytic.hpp"
#include "cavitysense/kernels.hpp"

namespace cavitysense {

namespace {
// companion short-time forms are trusted for χ√N·t below this
constexpr double short_time_domain = 0.3;

unsigned base_flags(const SystemParams& p, ProtocolVariant v, double chi_sqrtN_t) {
    unsigned f = p.regime_flags(v);
    if (p.kappa > 0.0 || p.gamma > 0.0) f |= flag::dissipation_ignored;
    if (std::abs(chi_sqrtN_t) > short_time_domain) f |= flag::short_time_invalid;
    return f;
}
}  // namespace

QfiResult ideal_qfi(const SystemParams& p, ProtocolVariant v, double t) {
    p.validate();
    const double chi = p.chi(v);
    const double a2 = p.alpha * p.alpha;
    const double N = static_cast<double>(p.N);

    QfiResult r;
    r.value = 4.0 + 8.0 * a2 * (1.0 - log_cos_pow(chi * t, N).value());
    r.regime = "ideal";
    r.short_time = 4.0 + 4.0 * N * chi * chi * a2 * t * t;
    r.saturation = 4.0 + 8.0 * a2;
    r.flags = base_flags(p, v, chi * std::sqrt(N) * t);
    return r;
}

MomentSet ideal_moments(const SystemParams& p, ProtocolVariant v, double tau, double beta) {
    p.validate();
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double half_angle = chi * tau / 2.0;

    MomentSet m;
    m.has_derivatives = true;
    m.spm = N * (N + 1.0) / 4.0;
    m.sz = 0.0;  // S_z is conserved and starts at zero on the +x CSS

    // ⟨S⁺^(q)⟩ = A_q e^{β²c_q} Σ_n iⁿ J_n(x_q β') w_q(n),  q = 1, 2:
    //   c_q = e^{-iqχτ} − 1,  x_q = −4α sin(qχτ/2),  w_q(n) = cos(nχτ/2)^{N−q}
    for (int q = 1; q <= 2; ++q) {
        const double A = (q == 1) ? N / 2.0 : N * (N - 1.0) / 4.0;
        if (A == 0.0) continue;  // N = 1 has no second moment
        const complexd c = std::exp(complexd{0.0, -q * chi * tau}) - 1.0;
        const double dx = -4.0 * p.alpha * std::sin(q * half_angle);
        const double pw = N - q;
        auto weight = [&](int n) -> complexd {
            return log_cos_pow(static_cast<double>(n) * half_angle, pw).value();
        };
        const SeriesPair s = jacobi_anger_sum_with_derivative(complexd{dx * beta, 0.0}, weight);
        const complexd pref = A * std::exp(beta * beta * c);
        const complexd val = pref * s.sum.value;
        const complexd dval = pref * (2.0 * beta * c * s.sum.value + dx * s.dsum_dx.value);
        if (q == 1) {
            m.splus = val;
            m.d_splus = dval;
        } else {
            m.splus_sq = val;
            m.d_splus_sq = dval;
        }
    }
    return m;
}

SensitivityResult ideal_sensitivity(const SystemParams& p, ProtocolVariant v, double tau,
                                    Observable obs) {
    p.validate();
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double s = std::sin(chi * tau / 2.0);

    SensitivityResult r;
    r.flags = base_flags(p, v, chi * std::sqrt(N) * tau);
    if (obs == Observable::FieldQuadrature) {
        // 1/(4 cos(χτ/2)^{2N}) — bounded below by the SQL value 1/4
        const LogSigned lc = log_cos_pow(chi * tau / 2.0, 2.0 * N);
        r.short_time = 0.25;
        if (lc.sign == 0) {
            r.delta_beta_sq = std::numeric_limits<double>::infinity();
            r.flags |= flag::diverging;
        } else {
            r.delta_beta_sq = std::exp(-std::log(4.0) - lc.log_mag);
        }
        return r;
    }
    // 1/(16 α² N sin²(χτ/2) cos(χτ/2)^{2N−2})
    const LogSigned lc = log_cos_pow(chi * tau / 2.0, 2.0 * N - 2.0);
    r.short_time = 1.0 / (4.0 * N * p.alpha * p.alpha * chi * chi * tau * tau);
    if (s == 0.0 || lc.sign == 0) {
        r.delta_beta_sq = std::numeric_limits<double>::infinity();
        r.flags |= flag::diverging;
        return r;
    }
    const double logden = std::log(16.0 * p.alpha * p.alpha * N) +
                          2.0 * std::log(std::abs(s)) + lc.log_mag;
    r.delta_beta_sq = std::exp(-logden);
    return r;
}

DirectMeasurement direct_measurement_noqfi(const SystemParams& p, ProtocolVariant v,
                                           double t, double phi, double beta) {
    p.validate();
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double a = p.alpha;
    const double cn = log_cos_pow(chi * t / 2.0, N).value();   // cos(χt/2)^N
    const double c2n = log_cos_pow(chi * t, N).value();        // cos(χt)^N

    DirectMeasurement d;
    d.a_mean = a * cn + beta;
    d.a_sq = a * a * c2n + 2.0 * a * beta * cn + beta * beta;
    d.n_mean = a * a + 2.0 * a * beta * cn + beta * beta;
    // Mean and slope use the half-convention X^φ = (a e^{-iφ} + a† e^{iφ})/2;
    // the variance is quoted with vacuum fluctuations normalized to 1.  The
    // physical content — an α-independent slope, so no cat enhancement — is
    // unaffected by the normalization.
    d.x_mean = (a * cn + beta) * std::cos(phi);
    d.x_var = 1.0 + 2.0 * a * a *
                        ((c2n - cn * cn) * std::cos(2.0 * phi) + 1.0 - cn * cn);
    d.slope = std::cos(phi);
    d.delta_beta_sq = d.slope == 0.0 ? std::numeric_limits<double>::infinity()
                                     : d.x_var / (d.slope * d.slope);
    return d;
}

}  // namespace cavitysense
