// analytic.hpp — closed-form theory: ideal protocol, Wigner functions,
// cavity-decay (κ) and spontaneous-emission (γ) regimes, detection noise,
// and the quantum Fisher information with photon loss.
#pragma once

#include <Eigen/Dense>

#include "cavitysense/ops.hpp"
#include "cavitysense/types.hpp"

namespace cavitysense {

// ---------------------------------------------------------------- ideal ----

// F_Q(t) = 4 + 8α²(1 − cos(χt)^N), with its short-time expansion
// 4 + 4Nχ²α²t² and the saturation plateau 4 + 8α².
QfiResult ideal_qfi(const SystemParams& p, ProtocolVariant v, double t);

// Protocol moments after forward τ / displacement β / backward τ (Bessel sums).
MomentSet ideal_moments(const SystemParams& p, ProtocolVariant v, double tau, double beta);

enum class Observable { SpinQuadrature, FieldQuadrature };

struct SensitivityResult {
    double delta_beta_sq = 0.0;   // operative value
    double short_time = 0.0;      // small-χτ form (1/(4Nα²χ²τ²) for S_φ)
    unsigned flags = 0;
};

// Closed-form (δβ)² at β = 0 for the ideal protocol.  SpinQuadrature is the
// S_y measurement 1/(16α²N sin²(χτ/2) cos(χτ/2)^{2N−2}); FieldQuadrature is
// the cavity X measurement 1/(4 cos(χτ/2)^{2N}) which never beats the SQL.
SensitivityResult ideal_sensitivity(const SystemParams& p, ProtocolVariant v, double tau,
                                    Observable obs = Observable::SpinQuadrature);

// Direct (no time reversal) field measurement after the entangling evolution:
// first/second field moments, the quadrature mean/variance at angle φ — and
// the punchline that the β-slope is α-independent.
struct DirectMeasurement {
    complexd a_mean{};        // ⟨a⟩
    complexd a_sq{};          // ⟨a²⟩
    double n_mean = 0.0;      // ⟨a†a⟩
    double x_mean = 0.0;      // ⟨X^φ⟩, X^φ = a e^{-iφ} + a† e^{iφ}
    double x_var = 0.0;       // ⟨(ΔX^φ)²⟩ (vacuum = 1 in this convention)
    double slope = 0.0;       // d⟨X^φ⟩/dβ = cos φ
    double delta_beta_sq = 0.0;
};
DirectMeasurement direct_measurement_noqfi(const SystemParams& p, ProtocolVariant v,
                                           double t, double phi, double beta = 0.0);

// --------------------------------------------------------------- wigner ----

struct WignerGrid {
    double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
    double step = 0;
    Eigen::Index nx = 0, ny = 0;       // columns (Re), rows (Im)
    Eigen::MatrixXd w;                 // w(iy, ix)
    double cell_area = 0;
    unsigned flags = 0;                // truncation_warning if step > 0.25 vacuum widths

    double integral() const;           // Σ W ΔA (→ 1 for a normalized state)
};

// W(ζ) of the bosonic generalized cat Σ_k w_k |ζ_k⟩ (≤ 1000 components).
WignerGrid wigner_cat(const std::vector<complexd>& amplitudes,
                      const std::vector<complexd>& weights,
                      double re_min, double re_max, double im_min, double im_max,
                      double step);

// Components of the ideal-evolution cat at time t: ζ_m = α e^{-iχm t} with
// CSS weights (collapses onto wigner_cat).
WignerGrid wigner_ideal_cat(const SystemParams& p, ProtocolVariant v, double t,
                            double re_min, double re_max, double im_min, double im_max,
                            double step);

// ---------------------------------------------------------------- kappa ----

// Two-component "dying cat" |α₁⟩+|α₂⟩ under cavity decay: exact coherence
// factor and the decoherence-degraded QFI for well-separated components.
struct DyingCatSpec {
    complexd alpha1{}, alpha2{};
    double kappa = 0;
    double t = 0;
};
struct DyingCatResult {
    complexd coherence{};        // c(t), the off-diagonal suppression factor
    double qfi = 4.0;            // 4 + 4[Im(α₁−α₂)]² e^{−κt} e^{−κ|α₁−α₂|²t}
    double overlap = 0.0;        // |⟨α₁|α₂⟩|² — result valid only when ≪ 1
    unsigned flags = 0;
};
DyingCatResult dying_cat_qfi(const DyingCatSpec& s);

// (F_Q − 4) ~ (χ²Nα²/κ²)^{1/3} heuristic scale for the full cat.
double dying_cat_scaling(const SystemParams& p, ProtocolVariant v);

// Spin reduced density matrix after tracing the decaying cavity:
// ρ_mn = c_m c_n* exp f(n−m, t) with
// f(z,t) = κα²(1−e^{−κt+iχzt})/(κ−iχz) + α²(e^{−κt}−1).
struct SpinDensityMatrix {
    std::int64_t N = 0;
    Eigen::MatrixXcd rho;   // (N+1)×(N+1), index k ↔ m = k − N/2

    double hermiticity_residual() const;
    double trace_error() const;
    double min_eigenvalue() const;  // computed on demand (O(N³))
    void check(double herm_tol = 1e-12, double trace_tol = 1e-12) const;
};
SpinDensityMatrix loss_spin_density(const SystemParams& p, ProtocolVariant v, double t);

// f(z,t) itself (z need not be an integer); exposed for tests.
complexd loss_coherence_exponent(double chi, double kappa, double alpha, double z, double t);

enum class QfiMethod { Eigendecomposition, GaussianAnalytic };

// F_Q of the lossy cat.  Eigendecomposition evaluates
// F = 4 + 2α²e^{−κt} Σ_{rs} (λ_r−λ_s)²/(λ_r+λ_s) |⟨r|Ô|s⟩|², Ô = −2sin(χmt),
// on the exact spin density matrix; GaussianAnalytic is the closed form
// 4 + 4χ²Nα²t² e^{−κt} / (1 + (2χ²α²N/κ²)[1 − e^{−κt}(1+κt+κ²t²/2)])
// valid for χ√N ≪ κ and N ≥ 100 (otherwise the eigen path is forced).
QfiResult qfi_with_loss(const SystemParams& p, ProtocolVariant v, double t,
                        QfiMethod method = QfiMethod::Eigendecomposition);

// Short-κt variant 4 + 4Nα²χ²t²/(1 + Nχ²κα²t³/3) and the κt ≪ 1 optimum
// t_opt = (6/χ²α²κN)^{1/3}, F_opt ≈ 4 + 4.4(χ²α²N/κ²)^{1/3}, with the
// validity window κ/α ≪ χ√N ≪ κα² reported via flags.
struct LossOptimum {
    double t_opt = 0;
    double qfi_opt = 4.0;
    double qfi_short_time = 4.0;   // FisherTime2 evaluated at t_opt
    unsigned flags = 0;
};
LossOptimum qfi_loss_optimum(const SystemParams& p, ProtocolVariant v);

// Full κ-protocol moments (Heisenberg picture, exact), τ₁ forward / τ₂ back:
// built from η_{τ,m} = (iχm/(κ+iχm))(e^{−κτ−iχmτ} − 1).
MomentSet kappa_moments(const SystemParams& p, ProtocolVariant v,
                        double tau1, double tau2, double beta);
complexd kappa_eta(double chi, double kappa, int m, double tau);

struct KappaSensitivity {
    double moments_fixed_phi = 0;   // assembly at the requested φ
    double moments_auto_phi = 0;    // assembly at the slope-maximizing φ
    double auto_phi = 0;
    double closed_form = 0;         // short-time closed form with f(τ₁,τ₂)
    double short_time = 0;          // 1/(4Nα²χ²τ²) + κτ/6 at τ₁=τ₂=τ
    unsigned flags = 0;
};
KappaSensitivity kappa_sensitivity(const SystemParams& p, ProtocolVariant v,
                                   double tau1, double tau2, double phi);

// t_opt = (3/κχ²Nα²)^{1/3} and (δβ)²_opt = (1/4)(3κ²/χ²Nα²)^{1/3}.
struct KappaOptimum {
    double t_opt = 0;
    double delta_beta_sq_opt = 0;
};
KappaOptimum kappa_sensitivity_optimum(const SystemParams& p, ProtocolVariant v);

// ---------------------------------------------------------------- gamma ----

// Spontaneous-emission moments at equal legs τ₁ = τ₂ = τ.  The Resonant
// variant uses the rotated-frame dissipator (drive axis), the Dispersive one
// bare σ⁻ decay; both are short-time perturbative in γt and Nχ²τ².
MomentSet gamma_moments(const SystemParams& p, ProtocolVariant v, double tau, double beta);

struct GammaSensitivity {
    double moments_fixed_phi = 0;
    double moments_auto_phi = 0;
    double auto_phi = 0;
    double short_time = 0;          // e^{6γτ}/(4α²Nχ²τ²)  (resonant)
    double t_opt = 0;               // 1/(3γ)
    unsigned flags = 0;
};
GammaSensitivity gamma_sensitivity(const SystemParams& p, ProtocolVariant v,
                                   double tau, double phi);

// ------------------------------------------------------- detection noise ----

enum class NoiseRegime { Ideal, Kappa, Gamma };

struct DetectionNoiseResult {
    double delta_beta_sq = 0;      // closed form with the csc²φ structure
    double assembly = 0;           // moment path with σ_det added to the variance
    double noise_factor = 0;       // ideal regime: 1 + 4 csc²φ σ²/N
    unsigned flags = 0;
};
DetectionNoiseResult detection_noise_sensitivity(const SystemParams& p, ProtocolVariant v,
                                                 double tau, double phi, double sigma_det,
                                                 NoiseRegime regime);

}  // namespace cavitysense
