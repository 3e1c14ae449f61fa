// Cavity-decay regime: η factors, lossy protocol moments, the closed-form
// sensitivity and its optimum, and the spin density matrix after loss.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cavitysense/analytic.hpp"
#include "cavitysense/ops.hpp"

using namespace cavitysense;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
SystemParams make(std::int64_t n, double alpha, double chi, double kappa) {
    SystemParams p;
    p.N = n;
    p.alpha = alpha;
    p.g = chi * alpha;
    p.kappa = kappa;
    return p;
}
constexpr auto RES = ProtocolVariant::Resonant;
}  // namespace

TEST_CASE("kappa_eta frozen value and kappa -> 0 limit", "[kappa]") {
    const complexd e = kappa_eta(1.3, 0.6, 2, 0.45);
    CHECK_THAT(e.real(), WithinRel(-0.51266115539811445, 1e-12));
    CHECK_THAT(e.imag(), WithinRel(-0.82118854618665449, 1e-12));

    const complexd e0 = kappa_eta(1.1, 0.0, 1, 0.8);
    const complexd want = std::exp(complexd{0.0, -1.1 * 0.8}) - 1.0;
    CHECK(std::abs(e0 - want) < 1e-13);
}

TEST_CASE("kappa moments frozen case", "[kappa]") {
    // N=6, α=1.5, χ=1, κ=0.7, τ₁=0.25, τ₂=0.35, β=0.12
    const MomentSet m = kappa_moments(make(6, 1.5, 1.0, 0.7), RES, 0.25, 0.35, 0.12);
    CHECK_THAT(m.splus.real(), WithinRel(2.8986204003066801, 1e-10));
    CHECK_THAT(m.splus.imag(), WithinRel(-0.50568002184588065, 1e-10));
    CHECK_THAT(m.splus_sq.real(), WithinRel(6.5376716062257928, 1e-10));
    CHECK_THAT(m.splus_sq.imag(), WithinRel(-2.3420182644613505, 1e-10));
    CHECK_THAT(m.spm, WithinRel(6.0 * 7.0 / 4.0, 1e-14));
    CHECK(m.within_bounds(6));
}

TEST_CASE("kappa -> 0 reduces to the ideal moments", "[kappa]") {
    const SystemParams p0 = make(15, 2.0, 1.0, 0.0);
    const SystemParams pk = make(15, 2.0, 1.0, 1e-13);
    for (double beta : {0.0, 0.2}) {
        const MomentSet a = ideal_moments(p0, RES, 0.4, beta);
        const MomentSet b = kappa_moments(pk, RES, 0.4, 0.4, beta);
        CHECK(std::abs(a.splus - b.splus) < 1e-8);
        CHECK(std::abs(a.splus_sq - b.splus_sq) < 1e-7);
        CHECK(std::abs(a.d_splus - b.d_splus) < 1e-6);
    }
}

TEST_CASE("closed-form sensitivity frozen values", "[kappa]") {
    // N=1000, α=50, χ=1, κ=30
    const SystemParams p = make(1000, 50.0, 1.0, 30.0);
    const KappaSensitivity eq = kappa_sensitivity(p, RES, 0.004, 0.004, pi / 2);
    CHECK_THAT(eq.closed_form, WithinRel(0.03043171399968723, 1e-10));
    const KappaSensitivity uneq = kappa_sensitivity(p, RES, 0.004, 0.006, pi / 2);
    CHECK_THAT(uneq.closed_form, WithinRel(0.042405603949663843, 1e-10));
    // short time: 1/(4Nα²χ²τ²) + κτ/6
    const double tau = 0.004;
    CHECK_THAT(eq.short_time,
               WithinRel(1.0 / (4.0 * 1000.0 * 2500.0 * tau * tau) + 30.0 * tau / 6.0, 1e-12));
}

TEST_CASE("sensitivity optimum matches the cube-root laws", "[kappa]") {
    const SystemParams p = make(100000, 300.0, 1.0, 50.0);
    const KappaOptimum o = kappa_sensitivity_optimum(p, RES);
    const double n = 1e5, a2 = 9e4, k = 50.0;
    CHECK_THAT(o.t_opt, WithinRel(std::cbrt(3.0 / (k * n * a2)), 1e-6));
    CHECK_THAT(o.delta_beta_sq_opt,
               WithinRel(0.25 * std::cbrt(3.0 * k * k / (n * a2)), 5e-3));
    // the closed form really is minimal there
    const double at = kappa_sensitivity(p, RES, o.t_opt, o.t_opt, pi / 2).closed_form;
    for (double f : {0.8, 1.25}) {
        const double off =
            kappa_sensitivity(p, RES, o.t_opt * f, o.t_opt * f, pi / 2).closed_form;
        CHECK(at <= off * (1.0 + 1e-9));
    }
}

TEST_CASE("moment assembly tracks the closed form at small kappa tau", "[kappa]") {
    const SystemParams p = make(2000, 80.0, 1.0, 20.0);
    const KappaOptimum o = kappa_sensitivity_optimum(p, RES);
    const KappaSensitivity s = kappa_sensitivity(p, RES, o.t_opt, o.t_opt, pi / 2);
    CHECK_THAT(s.moments_fixed_phi, WithinRel(s.closed_form, 0.05));
    CHECK(s.moments_auto_phi <= s.moments_fixed_phi * (1.0 + 1e-9));
}

TEST_CASE("loss spin density is a physical state", "[kappa]") {
    const SystemParams p = make(25, 1.8, 1.0, 0.9);
    const SpinDensityMatrix r = loss_spin_density(p, RES, 0.6);
    CHECK(r.hermiticity_residual() < 1e-12);
    CHECK(std::abs(r.trace_error()) < 1e-12);
    CHECK(r.min_eigenvalue() > -1e-10);
    CHECK_NOTHROW(r.check());
    REQUIRE(r.rho.rows() == 26);
}

TEST_CASE("loss coherence exponent frozen value", "[kappa]") {
    // f(z=2, t=0.6) for χ=1.2, κ=0.8, α=1.1
    const complexd f = loss_coherence_exponent(1.2, 0.8, 1.1, 2, 0.6);
    CHECK_THAT(f.real(), WithinRel(-0.12733752361435631, 1e-12));
    CHECK_THAT(f.imag(), WithinRel(0.25947118587107547, 1e-12));
    // f(0, t) = 0 and f(−z) = conj(f(z))
    CHECK(std::abs(loss_coherence_exponent(1.2, 0.8, 1.1, 0, 0.6)) < 1e-14);
    const complexd fm = loss_coherence_exponent(1.2, 0.8, 1.1, -2, 0.6);
    CHECK(std::abs(fm - std::conj(f)) < 1e-13);
}

TEST_CASE("dying cat coherence and bound", "[kappa]") {
    DyingCatSpec s;
    s.alpha1 = complexd{1.2, 0.3};
    s.alpha2 = complexd{-0.9, 0.1};
    s.kappa = 0.5;
    s.t = 0.7;
    const DyingCatResult r = dying_cat_qfi(s);
    CHECK_THAT(r.coherence.real(), WithinRel(0.95737419362539965, 1e-11));
    CHECK_THAT(r.coherence.imag(), WithinRel(0.11075248676139802, 1e-11));
    CHECK_THAT(r.qfi, WithinRel(4.0237521681118442, 1e-11));
    // |α₁ − α₂|² = 4.45: overlap e^{−4.45} ≈ 0.0117 is not small enough
    CHECK((r.flags & flag::overlap_large) != 0);

    s.alpha2 = complexd{-8.0, 0.0};
    const DyingCatResult far = dying_cat_qfi(s);
    CHECK((far.flags & flag::overlap_large) == 0);

    // |c(t)| decays monotonically
    double prev = 1.0 + 1e-12;
    for (double t : {0.0, 0.2, 0.5, 1.0, 2.0}) {
        s.t = t;
        const double mag = std::abs(dying_cat_qfi(s).coherence);
        CHECK(mag <= prev + 1e-12);
        prev = mag;
    }
}
