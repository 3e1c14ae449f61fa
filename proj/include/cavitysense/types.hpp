// types.hpp — shared domain types: system parameters, protocol schedule,
// moment sets, gain curves, QFI results and the error/flag vocabulary.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavitysense {

using complexd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Invalid physical or configuration input.  The CLI maps this to exit code 2.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical method failed (overflow, no convergence, cap exceeded).
// The CLI maps this to exit code 3.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Validity / provenance flags attached to computed quantities.  A result with
// flags != 0 is still returned; the caller decides whether to trust it.
namespace flag {
inline constexpr unsigned dissipation_ignored = 1u << 0;  // κ or γ > 0 but formula is ideal
inline constexpr unsigned short_time_invalid  = 1u << 1;  // χ√N·t ≪ 1 assumption violated
inline constexpr unsigned dispersive_invalid  = 1u << 2;  // |Δc| not ≫ g√N, gα
inline constexpr unsigned resonant_invalid    = 1u << 3;  // α² not ≫ N
inline constexpr unsigned gaussian_invalid    = 1u << 4;  // χ√N ≪ κ assumption violated
inline constexpr unsigned truncation_warning  = 1u << 5;  // series/Fock truncation marginal
inline constexpr unsigned insensitive_point   = 1u << 6;  // slope vanished at working point
inline constexpr unsigned diverging           = 1u << 7;  // closed form diverges here
inline constexpr unsigned forced_eigen        = 1u << 8;  // gaussian path refused (N too small)
inline constexpr unsigned window_left         = 1u << 9;  // κ/α ≪ χ√N violated
inline constexpr unsigned window_right        = 1u << 10; // χ√N ≪ κα² violated
inline constexpr unsigned saturated           = 1u << 11; // value clipped at ideal saturation
inline constexpr unsigned overlap_large       = 1u << 12; // cat components not well separated

// Compact deterministic rendering used in CSV output ("-" when clean).
std::string to_string(unsigned flags);
}  // namespace flag

enum class ProtocolVariant { Dispersive, Resonant };

ProtocolVariant parse_variant(const std::string& s);
std::string to_string(ProtocolVariant v);

// Physical constants of one scenario.  All rates are angular frequencies in
// rad/s; α is the dimensionless initial coherent amplitude (real, > 0).
struct SystemParams {
    std::int64_t N = 1;      // number of atoms
    double g = 0.0;          // single photon-atom coupling
    double delta_c = 0.0;    // drive-cavity detuning (dispersive protocol)
    double kappa = 0.0;      // cavity power decay rate
    double gamma = 0.0;      // single-atom spontaneous emission rate
    double alpha = 1.0;      // coherent field amplitude

    // Effective coupling of the one-axis interaction  χ a†a S_z.
    double chi(ProtocolVariant v) const;

    // Regime checks.  "≫" is implemented as ≥ threshold× (default 10).
    bool resonant_valid(double threshold = 10.0) const;
    bool dispersive_valid(double threshold = 10.0) const;
    unsigned regime_flags(ProtocolVariant v) const;

    void validate() const;  // throws config_error on nonsense input
};

// Interferometer schedule: forward evolution τ₁, displacement β, reversed
// evolution τ₂, then measurement of S_φ = cosφ S_x + sinφ S_y possibly with
// Gaussian detection noise of spread σ_det.
struct ProtocolConfig {
    double tau1 = 0.0;
    double tau2 = 0.0;
    double beta = 0.0;
    double phi = pi / 2;           // measurement angle, must lie in (0, π]
    bool phi_auto = false;         // true: φ chosen from the signal phase
    double sigma_det = 0.0;        // detection noise (same units as S_φ)
    ProtocolVariant variant = ProtocolVariant::Resonant;

    void validate() const;         // throws config_error (φ = 0 is rejected)
};

// First and second moments of the collective spin after the protocol, plus
// their analytic derivatives with respect to the displacement β.  All the
// sensitivity assembly needs is this set.
struct MomentSet {
    complexd splus{};     // ⟨S⁺⟩
    complexd splus_sq{};  // ⟨S⁺²⟩
    double spm = 0.0;     // ⟨S⁺S⁻⟩
    double sz = 0.0;      // ⟨S_z⟩

    complexd d_splus{};     // d⟨S⁺⟩/dβ
    complexd d_splus_sq{};  // d⟨S⁺²⟩/dβ
    double d_spm = 0.0;
    double d_sz = 0.0;
    bool has_derivatives = false;

    // Derived real observables for measurement angle φ.
    double s_phi(double phi) const;        // ⟨S_φ⟩
    double s_phi_var(double phi) const;    // ⟨(ΔS_φ)²⟩
    double d_s_phi(double phi) const;      // d⟨S_φ⟩/dβ

    // Bound check: |⟨S⁺⟩| ≤ N/2, ⟨S⁺S⁻⟩ ∈ [0, N(N+1)/4] (small slack).
    bool within_bounds(std::int64_t N, double slack = 1e-9) const;
};

// One point of a sensitivity or QFI sweep.
struct GainPoint {
    double sweep_value = 0.0;
    double delta_beta_sq = 0.0;
    double gain_db = 0.0;
    std::optional<double> qfi_bound_db;  // −10 log₁₀(4/F_Q) when available
    unsigned flags = 0;
};

struct GainCurve {
    std::string sweep_name;  // "time", "kappa_ratio", "phi", "tau2", "sigma_det"
    std::vector<GainPoint> points;
};

// QFI result with companions where the closed form provides them.
struct QfiResult {
    double value = 4.0;
    std::string regime;                    // "ideal", "kappa-eigen", ...
    unsigned flags = 0;
    std::optional<double> short_time;      // small-χt expansion
    std::optional<double> saturation;      // long-time plateau (4 + 8α²)
};

// SQL-referenced metrological gain in dB; rejects nonpositive input.
double metrological_gain_db(double delta_beta_sq);
double qfi_gain_db(double qfi);  // 10 log₁₀(F_Q/4)

}  // namespace cavitysense
