// Ideal (dissipation-free) protocol: moments, sensitivity, QFI and the direct
// field measurement.  Frozen numbers come from an independent
// arbitrary-precision evaluation of the same closed forms.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cavitysense/analytic.hpp"
#include "cavitysense/kernels.hpp"
#include "cavitysense/ops.hpp"

using namespace cavitysense;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
SystemParams make(std::int64_t n, double alpha, double chi) {
    SystemParams p;
    p.N = n;
    p.alpha = alpha;
    p.g = chi * alpha;  // resonant convention χ = g/α
    return p;
}
constexpr auto RES = ProtocolVariant::Resonant;
}  // namespace

TEST_CASE("ideal moments frozen case", "[ideal]") {
    // N=8, α=2, χ=1, τ=0.3, β=0.15
    const MomentSet m = ideal_moments(make(8, 2.0, 1.0), RES, 0.3, 0.15);
    CHECK_THAT(m.splus.real(), WithinRel(3.9361889898872145, 1e-11));
    CHECK_THAT(m.splus.imag(), WithinRel(-0.68518935159201877, 1e-11));
    CHECK_THAT(m.splus_sq.real(), WithinRel(13.121952865738028, 1e-11));
    CHECK_THAT(m.splus_sq.imag(), WithinRel(-4.7024190050408601, 1e-11));
    CHECK_THAT(m.spm, WithinRel(8.0 * 9.0 / 4.0, 1e-14));
    CHECK_THAT(m.sz, WithinAbs(0.0, 1e-12));
    CHECK(m.within_bounds(8));
}

TEST_CASE("protocol at beta = 0 returns the initial CSS", "[ideal]") {
    const MomentSet m = ideal_moments(make(20, 3.0, 1.0), RES, 0.7, 0.0);
    CHECK_THAT(m.splus.real(), WithinRel(10.0, 1e-12));
    CHECK_THAT(m.splus.imag(), WithinAbs(0.0, 1e-12));
    // Var(S_φ) = N sin²φ / 4 for a CSS along +x
    for (double phi : {0.3, 1.0, pi / 2}) {
        const double want = 20.0 * std::sin(phi) * std::sin(phi) / 4.0;
        CHECK_THAT(m.s_phi_var(phi), WithinAbs(want, 1e-9));
    }
}

TEST_CASE("beta slope matches the closed form", "[ideal]") {
    const MomentSet m = ideal_moments(make(8, 2.0, 1.0), RES, 0.3, 0.0);
    REQUIRE(m.has_derivatives);
    // d⟨S_y⟩/dβ = −2Nα sin(χτ/2) cos(χτ/2)^{N−1}
    CHECK_THAT(m.d_s_phi(pi / 2), WithinRel(-4.4185695161303439, 1e-11));
}

TEST_CASE("ideal sensitivity closed form and assembly agree", "[ideal]") {
    const SystemParams p = make(8, 2.0, 1.0);
    const SensitivityResult r = ideal_sensitivity(p, RES, 0.3);
    CHECK_THAT(r.delta_beta_sq, WithinRel(0.102439302239011, 1e-11));
    CHECK_THAT(r.short_time, WithinRel(1.0 / (4.0 * 8.0 * 4.0 * 0.09), 1e-12));

    const MomentSet m = ideal_moments(p, RES, 0.3, 0.0);
    CHECK_THAT(sensitivity_from_moments(m, pi / 2, 0.0),
               WithinRel(r.delta_beta_sq, 1e-9));
}

TEST_CASE("field quadrature readout never beats the SQL", "[ideal]") {
    const SystemParams p = make(12, 2.5, 1.0);
    for (double t : {0.05, 0.3, 0.9, 2.0}) {
        const SensitivityResult r = ideal_sensitivity(p, RES, t, Observable::FieldQuadrature);
        CHECK(r.delta_beta_sq >= 0.25 - 1e-12);
        const LogSigned c = log_cos_pow(t / 2.0, 24.0);  // cos(χτ/2)^{2N}, N = 12
        if (c.value() != 0.0)
            CHECK_THAT(r.delta_beta_sq, WithinRel(0.25 / c.value(), 1e-10));
    }
}

TEST_CASE("ideal QFI frozen case and envelope", "[ideal]") {
    const QfiResult q = ideal_qfi(make(8, 2.0, 1.0), RES, 0.3);
    CHECK_THAT(q.value, WithinRel(13.797549728199274, 1e-12));
    REQUIRE(q.short_time.has_value());
    CHECK_THAT(*q.short_time, WithinRel(4.0 + 4.0 * 8.0 * 4.0 * 0.09, 1e-12));
    REQUIRE(q.saturation.has_value());
    CHECK_THAT(*q.saturation, WithinRel(4.0 + 8.0 * 4.0, 1e-12));
}

TEST_CASE("QFI revivals at chi t = pi n", "[ideal]") {
    const double a2 = 4.0;
    // even N: F collapses back to the vacuum value 4
    CHECK_THAT(ideal_qfi(make(6, 2.0, 1.0), RES, pi).value, WithinRel(4.0, 1e-9));
    // odd N, odd n: cos^N = −1 gives the doubled cat 4 + 16α²
    CHECK_THAT(ideal_qfi(make(5, 2.0, 1.0), RES, pi).value,
               WithinRel(4.0 + 16.0 * a2, 1e-9));
    CHECK_THAT(ideal_qfi(make(5, 2.0, 1.0), RES, 2.0 * pi).value, WithinRel(4.0, 1e-9));
}

TEST_CASE("Cramer-Rao floor holds for the spin readout", "[ideal]") {
    const SystemParams p = make(30, 3.0, 1.0);
    for (double t : {0.05, 0.15, 0.3, 0.5}) {
        const double dbsq = ideal_sensitivity(p, RES, t).delta_beta_sq;
        const double f = ideal_qfi(p, RES, t).value;
        CHECK(1.0 / dbsq <= f * (1.0 + 1e-9));
    }
}

TEST_CASE("direct field measurement statistics", "[ideal]") {
    const SystemParams p = make(10, 2.0, 1.0);
    const double t = 0.4, phi = 0.3, beta = 0.05;
    const DirectMeasurement d = direct_measurement_noqfi(p, RES, t, phi, beta);
    const double cN = std::pow(std::cos(t / 2.0), 10.0);
    CHECK_THAT(d.a_mean.real(), WithinRel(2.0 * cN + beta, 1e-12));
    CHECK_THAT(d.n_mean, WithinRel(4.0 + 2.0 * 2.0 * beta * cN + beta * beta, 1e-12));
    CHECK_THAT(d.x_mean, WithinRel((2.0 * cN + beta) * std::cos(phi), 1e-12));
    CHECK_THAT(d.slope, WithinRel(std::cos(phi), 1e-12));
    const double c2N = std::pow(std::cos(t), 10.0);
    const double want_var = 1.0 + 2.0 * 4.0 * ((c2N - cN * cN) * std::cos(2.0 * phi)
                                               + 1.0 - cN * cN);
    CHECK_THAT(d.x_var, WithinRel(want_var, 1e-11));
    CHECK_THAT(d.delta_beta_sq, WithinRel(want_var / (std::cos(phi) * std::cos(phi)), 1e-11));
}

TEST_CASE("auto measurement angle minimizes the assembled sensitivity", "[ideal]") {
    const MomentSet m = ideal_moments(make(14, 2.0, 1.0), RES, 0.35, 0.0);
    const double phi = auto_measurement_angle(m);
    const double s0 = sensitivity_from_moments(m, phi, 0.0);
    for (double x = 0.05; x < pi; x += 0.05)
        CHECK(s0 <= sensitivity_from_moments(m, x, 0.0) * (1.0 + 1e-9));
}

TEST_CASE("zero interaction time is an insensitive point", "[ideal]") {
    const MomentSet m = ideal_moments(make(8, 2.0, 1.0), RES, 0.0, 0.0);
    CHECK_THROWS_AS(sensitivity_from_moments(m, pi / 2, 0.0), insensitive_point_error);
}
