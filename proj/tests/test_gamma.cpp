// Spontaneous-emission regime: protocol moments for both variants, the
// measured-quadrature variance, sensitivity scalings and detection noise.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cavitysense/analytic.hpp"
#include "cavitysense/ops.hpp"

using namespace cavitysense;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
SystemParams make(std::int64_t n, double alpha, double chi, double gamma) {
    SystemParams p;
    p.N = n;
    p.alpha = alpha;
    p.g = chi * alpha;  // resonant χ = g/α
    p.gamma = gamma;
    return p;
}
// same χ through the dispersive convention χ = 2g²/Δc
SystemParams make_disp(std::int64_t n, double alpha, double chi, double gamma) {
    SystemParams p;
    p.N = n;
    p.alpha = alpha;
    p.g = 100.0;
    p.delta_c = 2.0 * p.g * p.g / chi;
    p.gamma = gamma;
    return p;
}
constexpr auto RES = ProtocolVariant::Resonant;
constexpr auto DISP = ProtocolVariant::Dispersive;
}  // namespace

TEST_CASE("gamma moments frozen cases", "[gamma]") {
    // N=10, α=2, χ=1, γ=0.05, τ=0.2, β=0.1
    const MomentSet r = gamma_moments(make(10, 2.0, 1.0, 0.05), RES, 0.2, 0.1);
    CHECK_THAT(r.splus.real(), WithinRel(4.8364520504545204, 1e-10));
    CHECK_THAT(r.splus.imag(), WithinRel(-0.37786911262176188, 1e-10));
    CHECK_THAT(r.splus_sq.real(), WithinRel(20.917621344454978, 1e-10));
    CHECK_THAT(r.splus_sq.imag(), WithinRel(-3.2706768160567374, 1e-10));

    const MomentSet d = gamma_moments(make_disp(10, 2.0, 1.0, 0.05), DISP, 0.2, 0.1);
    CHECK_THAT(d.splus.real(), WithinRel(4.894799321212116, 1e-10));
    CHECK_THAT(d.splus.imag(), WithinRel(-0.38299077863044077, 1e-10));
    CHECK_THAT(d.splus_sq.real(), WithinRel(21.510890102555602, 1e-10));
    CHECK_THAT(d.splus_sq.imag(), WithinRel(-3.3684889336263173, 1e-10));
}

TEST_CASE("diagonal moments and z projection", "[gamma]") {
    const double gt = 0.05 * 0.2;
    const MomentSet r = gamma_moments(make(10, 2.0, 1.0, 0.05), RES, 0.2, 0.1);
    CHECK_THAT(r.spm, WithinRel(5.0 + 22.5 * std::exp(-6.0 * gt), 1e-12));
    CHECK_THAT(r.sz, WithinAbs(0.0, 1e-14));  // axis-symmetric dissipator

    const MomentSet d = gamma_moments(make_disp(10, 2.0, 1.0, 0.05), DISP, 0.2, 0.1);
    CHECK_THAT(d.spm, WithinRel(5.0 + 22.5 * std::exp(-4.0 * gt), 1e-12));
    CHECK_THAT(d.sz, WithinRel(5.0 * std::expm1(-4.0 * gt), 1e-12));
}

TEST_CASE("measured variance at beta = 0", "[gamma]") {
    // resonant: Var(S_φ) = (N/4)(1 − cos²φ e^{−6γτ})
    const std::int64_t n = 16;
    const double gamma = 0.08, tau = 0.15;
    const MomentSet m = gamma_moments(make(n, 2.0, 1.0, gamma), RES, tau, 0.0);
    for (double phi : {0.4, 1.1, pi / 2}) {
        const double c2 = std::cos(phi) * std::cos(phi);
        const double want = n / 4.0 * (1.0 - c2 * std::exp(-6.0 * gamma * tau));
        CHECK_THAT(m.s_phi_var(phi), WithinAbs(want, 1e-9));
    }
}

TEST_CASE("sensitivity short time and optimal time", "[gamma]") {
    const SystemParams p = make(1000, 30.0, 1.0, 0.02);
    const double tau = 0.01;
    const GammaSensitivity s = gamma_sensitivity(p, RES, tau, pi / 2);
    // e^{6γτ}/(4α²Nχ²τ²), independent of α through g = χα
    CHECK_THAT(s.short_time,
               WithinRel(std::exp(6.0 * 0.02 * tau) / (4.0 * 900.0 * 1000.0 * tau * tau), 1e-12));
    CHECK_THAT(s.t_opt, WithinRel(1.0 / (3.0 * 0.02), 1e-12));
    CHECK(s.moments_fixed_phi > 0.0);
    CHECK(s.moments_auto_phi <= s.moments_fixed_phi * (1.0 + 1e-9));
}

TEST_CASE("moment assembly approaches the short-time law", "[gamma]") {
    const SystemParams p = make(4000, 60.0, 1.0, 0.05);
    // χτ√N small: the assembly and the closed short-time law coincide
    const double tau = 2e-3;
    const GammaSensitivity s = gamma_sensitivity(p, RES, tau, pi / 2);
    CHECK_THAT(s.moments_fixed_phi, WithinRel(s.short_time, 0.02));
}

TEST_CASE("detection noise in the gamma regime", "[gamma]") {
    const SystemParams p = make(500, 20.0, 1.0, 0.03);
    const double tau = 0.02, phi = 1.2, sigma = 3.0;
    const DetectionNoiseResult d =
        detection_noise_sensitivity(p, RES, tau, phi, sigma, NoiseRegime::Gamma);
    const double n = 500.0, a2 = 400.0;
    const double s2 = std::sin(phi) * std::sin(phi), c2 = std::cos(phi) * std::cos(phi);
    const double want = (std::exp(6.0 * 0.03 * tau) - c2) / s2 / (4.0 * n * a2 * tau * tau)
                        + sigma * sigma / s2 / (n * n * a2 * tau * tau);
    CHECK_THAT(d.delta_beta_sq, WithinRel(want, 1e-12));
    // the moment-assembly route stays within the short-time envelope error
    CHECK_THAT(d.assembly, WithinRel(d.delta_beta_sq, 0.08));
}
