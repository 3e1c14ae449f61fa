// analytic_kappa.cpp — cavity-decay regime: dying-cat toy model, lossy spin
// density matrix, Heisenberg-picture protocol moments and κ sensitivity.
#include <cmath>
#include <limits>

#include "cavitysense/analytic.hpp"
#include "cavitysense/kernels.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace cavitysense {

// ------------------------------------------------------------ dying cat ----

DyingCatResult dying_cat_qfi(const DyingCatSpec& s) {
    if (!(s.kappa >= 0.0) || !(s.t >= 0.0))
        throw config_error("dying_cat_qfi: kappa and t must be >= 0");
    const double kt = s.kappa * s.t;
    const complexd a1 = s.alpha1, a2 = s.alpha2;

    DyingCatResult r;
    const double decay = std::exp(-kt);
    //  c(t) = exp[ (|α₁|²+|α₂|²)/2 · (e^{−κt}−1) − α₁ᾱ₂ (1−e^{−κt}) ]  — the
    //  factor multiplying the surviving |α₁e^{−κt/2}⟩⟨α₂e^{−κt/2}| coherence
    const double em1 = std::expm1(-kt);
    r.coherence = std::exp(0.5 * (std::norm(a1) + std::norm(a2)) * em1 +
                           a1 * std::conj(a2) * em1);
    const double sep2 = std::norm(a1 - a2);
    r.overlap = std::exp(-sep2);  // |⟨α₁|α₂⟩|²
    const double dy = (a1 - a2).imag();
    r.qfi = 4.0 + 4.0 * dy * dy * decay * std::exp(-s.kappa * sep2 * s.t);
    if (r.overlap > 1e-6) r.flags |= flag::overlap_large;
    return r;
}

double dying_cat_scaling(const SystemParams& p, ProtocolVariant v) {
    p.validate();
    if (p.kappa <= 0.0) throw config_error("dying_cat_scaling: kappa must be > 0");
    const double chi = p.chi(v);
    return std::cbrt(chi * chi * static_cast<double>(p.N) * p.alpha * p.alpha /
                     (p.kappa * p.kappa));
}

// ------------------------------------------------- reduced spin density ----

complexd loss_coherence_exponent(double chi, double kappa, double alpha, double z, double t) {
    const double a2 = alpha * alpha;
    if (z == 0.0) return {0.0, 0.0};  // exact: the diagonal is untouched
    const complexd den{kappa, -chi * z};
    const complexd grow = 1.0 - std::exp(complexd{-kappa * t, chi * z * t});
    return kappa * a2 * grow / den + a2 * std::expm1(-kappa * t);
}

double SpinDensityMatrix::hermiticity_residual() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double SpinDensityMatrix::trace_error() const {
    return std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
}

double SpinDensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void SpinDensityMatrix::check(double herm_tol, double trace_tol) const {
    if (hermiticity_residual() > herm_tol)
        throw numeric_error("SpinDensityMatrix: hermiticity residual too large");
    if (trace_error() > trace_tol)
        throw numeric_error("SpinDensityMatrix: trace deviates from 1");
}

namespace {
SpinDensityMatrix build_spin_density(const SystemParams& p, double chi, double t,
                                     bool remove_linear_phase) {
    if (p.N > 10000)
        throw config_error("loss_spin_density: N > 1e4 not supported (dense matrix)");
    const std::int64_t N = p.N;
    const SpinCoefficients c = coherent_spin_state(N);

    // f(z) for z = −N..N; Hermiticity f(−z) = f(z)* holds by construction
    std::vector<complexd> f(static_cast<std::size_t>(2 * N) + 1);
    for (std::int64_t z = -N; z <= N; ++z)
        f[static_cast<std::size_t>(z + N)] =
            loss_coherence_exponent(chi, p.kappa, p.alpha, static_cast<double>(z), t);
    if (remove_linear_phase) {
        // rotate about S_z to kill the leading phase gradient (QFI invariant)
        const double ph1 = f[static_cast<std::size_t>(1 + N)].imag();
        for (std::int64_t z = -N; z <= N; ++z)
            f[static_cast<std::size_t>(z + N)] -= complexd{0.0, ph1 * static_cast<double>(z)};
    }

    SpinDensityMatrix d;
    d.N = N;
    d.rho.resize(static_cast<Eigen::Index>(N) + 1, static_cast<Eigen::Index>(N) + 1);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t r = 0; r <= N; ++r) {
        for (std::int64_t col = 0; col <= N; ++col) {
            // ρ_{mn} carries e^{f(n−m)}: column minus row.  The conjugate
            // choice leaves every spectral quantity (and hence the QFI)
            // unchanged but flips the coherence phases against the
            // +χ a†a S_z propagation direction.
            const complexd fe = f[static_cast<std::size_t>(col - r + N)];
            const double mag = std::exp(c.log_mag[static_cast<std::size_t>(r)] +
                                        c.log_mag[static_cast<std::size_t>(col)] + fe.real());
            d.rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) =
                mag * std::exp(complexd{0.0, fe.imag()});
        }
    }
    return d;
}
}  // namespace

SpinDensityMatrix loss_spin_density(const SystemParams& p, ProtocolVariant v, double t) {
    p.validate();
    return build_spin_density(p, p.chi(v), t, /*remove_linear_phase=*/false);
}

// used by the QFI eigendecomposition path (declared in analytic_qfi.cpp)
SpinDensityMatrix loss_spin_density_rotated(const SystemParams& p, ProtocolVariant v, double t) {
    p.validate();
    return build_spin_density(p, p.chi(v), t, /*remove_linear_phase=*/true);
}

// -------------------------------------------------------- kappa moments ----

complexd kappa_eta(double chi, double kappa, int m, double tau) {
    if (m == 0) return {0.0, 0.0};
    const complexd icm{0.0, chi * static_cast<double>(m)};
    const complexd decay = std::exp(complexd{-kappa * tau, -chi * static_cast<double>(m) * tau});
    return icm / (kappa + icm) * (decay - 1.0);
}

MomentSet kappa_moments(const SystemParams& p, ProtocolVariant v,
                        double tau1, double tau2, double beta) {
    p.validate();
    if (!(tau1 >= 0.0) || !(tau2 >= 0.0))
        throw config_error("kappa_moments: times must be >= 0");
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double a = p.alpha;

    MomentSet mom;
    mom.has_derivatives = true;
    mom.spm = N * (N + 1.0) / 4.0;  // photon jumps leave ⟨S⁺S⁻⟩ untouched
    mom.sz = 0.0;

    // ⟨S⁺^(q)⟩ = A_q exp[α²(η_{τ₂,q} e^{−κτ₁+iqχτ₁} + η*_{τ₁,q}) + η_{τ₂,q}β²]
    //            × Σ_n iⁿ J_n(c_q β) cos(nχτ₁/2)^{N−q},
    // c_q = −2i η_{τ₂,q} α e^{−κτ₁/2 + iqχτ₁/2}
    for (int q = 1; q <= 2; ++q) {
        const double A = (q == 1) ? N / 2.0 : N * (N - 1.0) / 4.0;
        if (A == 0.0) continue;
        const complexd eta2 = kappa_eta(chi, p.kappa, q, tau2);
        const complexd eta1 = kappa_eta(chi, p.kappa, q, tau1);
        const complexd fwd = std::exp(complexd{-p.kappa * tau1, q * chi * tau1});
        const complexd expo = a * a * (eta2 * fwd + std::conj(eta1));
        const complexd cq =
            complexd{0.0, -2.0} * eta2 * a *
            std::exp(complexd{-p.kappa * tau1 / 2.0, q * chi * tau1 / 2.0});
        const double pw = N - q;
        auto weight = [&](int n) -> complexd {
            return log_cos_pow(static_cast<double>(n) * chi * tau1 / 2.0, pw).value();
        };
        const SeriesPair s = jacobi_anger_sum_with_derivative(cq * beta, weight);
        const complexd pref = A * std::exp(expo + eta2 * beta * beta);
        const complexd val = pref * s.sum.value;
        const complexd dval = pref * (2.0 * beta * eta2 * s.sum.value + cq * s.dsum_dx.value);
        if (q == 1) {
            mom.splus = val;
            mom.d_splus = dval;
        } else {
            mom.splus_sq = val;
            mom.d_splus_sq = dval;
        }
    }
    return mom;
}

// ---------------------------------------------------- kappa sensitivity ----

namespace {
// f(τ₁,τ₂) = e^{−κτ₁}[2κτ₁ + e^{−κτ₂} + κ(τ₂−τ₁)e^{−κτ₂}] − 1, rearranged
// with expm1 so the O(κ²) result survives cancellation at small κτ.
double kappa_f_shape(double kappa, double tau1, double tau2) {
    const double aa = kappa * tau1, bb = kappa * tau2;
    const double u = std::expm1(-aa), w = std::expm1(-bb);
    return (aa + u) + (bb + w) + (bb - aa) * w + u * (aa + bb) + u * w +
           u * (bb - aa) * w;
}
}  // namespace

KappaSensitivity kappa_sensitivity(const SystemParams& p, ProtocolVariant v,
                                   double tau1, double tau2, double phi) {
    p.validate();
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double a2 = p.alpha * p.alpha;
    const double k = p.kappa;

    KappaSensitivity r;
    r.flags = p.regime_flags(v);
    const double tmean = 0.5 * (tau1 + tau2);
    if (chi * std::sqrt(N) * tmean > 0.3) r.flags |= flag::short_time_invalid;
    if (chi * std::sqrt(N) > 0.1 * k && k > 0.0) r.flags |= flag::gaussian_invalid;

    // exact path: Heisenberg moments + assembly
    const MomentSet m = kappa_moments(p, v, tau1, tau2, 0.0);
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

    // closed form (short-time / Gaussian regime)
    double f_over_k2, slope_sq;  // slope_sq = χ²α²(e^{−κτ₂}−1)²/κ²
    if (k == 0.0) {
        const double dt = tau1 - tau2;
        f_over_k2 = -0.5 * dt * dt;
        slope_sq = chi * chi * a2 * tau2 * tau2;
    } else {
        f_over_k2 = kappa_f_shape(k, tau1, tau2) / (k * k);
        const double e2 = std::expm1(-k * tau2);
        slope_sq = chi * chi * a2 * e2 * e2 / (k * k);
    }
    const double big_e = std::exp(4.0 * chi * chi * a2 * f_over_k2);
    const double bracket = (1.0 + big_e) / (8.0 * N) + (1.0 - big_e) / 8.0;
    if (slope_sq > 0.0) {
        r.closed_form = bracket * std::exp(k * tau1) *
                        std::exp(-chi * chi * a2 * f_over_k2) / slope_sq;
    } else {
        r.closed_form = std::numeric_limits<double>::infinity();
        r.flags |= flag::insensitive_point;
    }
    r.short_time = 1.0 / (4.0 * N * a2 * chi * chi * tmean * tmean) + k * tmean / 6.0;
    return r;
}

KappaOptimum kappa_sensitivity_optimum(const SystemParams& p, ProtocolVariant v) {
    p.validate();
    if (p.kappa <= 0.0)
        throw config_error("kappa_sensitivity_optimum: kappa must be > 0");
    const double chi = p.chi(v);
    const double N = static_cast<double>(p.N);
    const double a2 = p.alpha * p.alpha;
    KappaOptimum o;
    o.t_opt = std::cbrt(3.0 / (p.kappa * chi * chi * N * a2));
    o.delta_beta_sq_opt = 0.25 * std::cbrt(3.0 * p.kappa * p.kappa / (chi * chi * N * a2));
    return o;
}

}  // namespace cavitysense
