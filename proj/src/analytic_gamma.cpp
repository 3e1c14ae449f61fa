// analytic_gamma.cpp — spontaneous-emission regime (perturbative in γt and
// Gaussian in the spin distribution) and the detection-noise closed forms.
#include <cmath>
#include <limits>

#include "cavitysense/analytic.hpp"
#include "cavitysense/kernels.hpp"

namespace cavitysense {

MomentSet gamma_moments(const SystemParams& p, ProtocolVariant v, double tau, double beta) {
    p.validate();
    if (!(tau >= 0.0)) throw config_error("gamma_moments: tau must be >= 0");
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double gt = p.gamma * tau;
    const double gauss = N * chi * chi * tau * tau / 8.0;      // e^{−N b² χ²τ²/8}
    const double ent = p.gamma * chi * chi * N * tau * tau * tau;  // τ³ factors

    MomentSet m;
    m.has_derivatives = true;
    m.d_sz = 0.0;
    m.d_spm = 0.0;

    const bool resonant = (v == ProtocolVariant::Resonant);
    const double q1_decay = resonant ? std::exp(-3.0 * gt) : std::exp(-2.0 * gt);
    const double q2_decay = resonant ? std::exp(-6.0 * gt) : std::exp(-4.0 * gt);
    if (resonant) {
        m.spm = N / 2.0 + N * (N - 1.0) / 4.0 * std::exp(-6.0 * gt);
        m.sz = 0.0;  // the rotated-frame dissipator is axis-symmetric about the drive
    } else {
        m.spm = N / 2.0 + N * (N - 1.0) / 4.0 * std::exp(-4.0 * gt);
        m.sz = N / 2.0 * std::expm1(-4.0 * gt);  // bare σ⁻ decay of each spin
    }

    for (int q = 1; q <= 2; ++q) {
        const double A = (q == 1) ? N / 2.0 : N * (N - 1.0) / 4.0;
        if (A == 0.0) continue;
        const complexd c = std::exp(complexd{0.0, -q * chi * tau}) - 1.0;
        const double dx = -4.0 * p.alpha * std::sin(q * chi * tau / 2.0);
        // per-b exponential weight: Gaussian collapse + γτ³ entanglement factor
        auto weight = [&](int b) -> complexd {
            const double db = static_cast<double>(b);
            double expo = -db * db * gauss;
            if (resonant) {
                expo += ent * db * db / 24.0;
            } else if (q == 1) {
                expo += ent * (5.0 * db * db + 8.0 * db + 6.0) / 12.0;
            } else {
                expo += ent * (5.0 * db * db + 16.0 * db + 24.0) / 12.0;
            }
            return std::exp(expo);
        };
        const SeriesPair s = jacobi_anger_sum_with_derivative(complexd{dx * beta, 0.0}, weight);
        const double decay = (q == 1) ? q1_decay : q2_decay;
        const complexd pref = A * decay * std::exp(beta * beta * c);
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

GammaSensitivity gamma_sensitivity(const SystemParams& p, ProtocolVariant v,
                                   double tau, double phi) {
    p.validate();
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double a2 = p.alpha * p.alpha;

    GammaSensitivity r;
    r.flags = p.regime_flags(v);
    if (chi * std::sqrt(N) * tau > 0.3) r.flags |= flag::short_time_invalid;
    if (p.gamma * tau > 0.5) r.flags |= flag::truncation_warning;  // perturbative in γτ

    const MomentSet m = gamma_moments(p, v, tau, 0.0);
    try {
        r.moments_fixed_phi = sensitivity_from_moments(m, phi, 0.0);
        r.auto_phi = auto_measurement_angle(m);
        r.moments_auto_phi = sensitivity_from_moments(m, r.auto_phi, 0.0);
    } catch (const insensitive_point_error&) {
        r.moments_fixed_phi = std::numeric_limits<double>::infinity();
        r.moments_auto_phi = std::numeric_limits<double>::infinity();
        r.auto_phi = phi;
        r.flags |= flag::insensitive_point;
    }
    if (v == ProtocolVariant::Resonant && tau > 0.0) {
        r.short_time = std::exp(6.0 * p.gamma * tau) / (4.0 * a2 * N * chi * chi * tau * tau);
    } else {
        r.short_time = std::numeric_limits<double>::quiet_NaN();
    }
    r.t_opt = p.gamma > 0.0 ? 1.0 / (3.0 * p.gamma) : std::numeric_limits<double>::infinity();
    return r;
}

DetectionNoiseResult detection_noise_sensitivity(const SystemParams& p, ProtocolVariant v,
                                                 double tau, double phi, double sigma_det,
                                                 NoiseRegime regime) {
    p.validate();
    if (!(phi > 0.0) || !(phi <= pi))
        throw config_error("detection_noise_sensitivity: phi must lie in (0, pi]");
    if (!(sigma_det >= 0.0))
        throw config_error("detection_noise_sensitivity: sigma_det must be >= 0");
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double a2 = p.alpha * p.alpha;
    const double s2 = sigma_det * sigma_det;
    const double csc2 = 1.0 / (std::sin(phi) * std::sin(phi));

    DetectionNoiseResult r;
    r.noise_factor = 1.0 + 4.0 * csc2 * s2 / N;

    MomentSet m;
    switch (regime) {
        case NoiseRegime::Ideal: {
            const SensitivityResult base = ideal_sensitivity(p, v, tau);
            r.delta_beta_sq = base.delta_beta_sq * r.noise_factor;
            r.flags |= base.flags;
            m = ideal_moments(p, v, tau, 0.0);
            break;
        }
        case NoiseRegime::Kappa: {
            const double st = 1.0 / (4.0 * a2 * N * chi * chi * tau * tau);
            r.delta_beta_sq = st * r.noise_factor +
                              p.kappa * tau / 6.0 *
                                  ((N - 1.0 + csc2) / N + 4.0 * csc2 * s2 / N);
            if (chi * std::sqrt(N) * tau > 0.3) r.flags |= flag::short_time_invalid;
            m = kappa_moments(p, v, tau, tau, 0.0);
            break;
        }
        case NoiseRegime::Gamma: {
            const double c2 = std::cos(phi) * std::cos(phi);
            r.delta_beta_sq =
                (std::exp(6.0 * p.gamma * tau) - c2) * csc2 / (4.0 * N * chi * chi * a2 * tau * tau) +
                s2 * csc2 / (N * N * a2 * chi * chi * tau * tau);
            if (chi * std::sqrt(N) * tau > 0.3) r.flags |= flag::short_time_invalid;
            m = gamma_moments(p, v, tau, 0.0);
            break;
        }
    }
    try {
        r.assembly = sensitivity_from_moments(m, phi, sigma_det);
    } catch (const insensitive_point_error&) {
        r.assembly = std::numeric_limits<double>::infinity();
        r.flags |= flag::insensitive_point;
    }
    r.flags |= p.regime_flags(v);
    return r;
}

}  // namespace cavitysense
