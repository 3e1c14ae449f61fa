// types.cpp — parameter validation, flag rendering, gain conversions.
#include "cavitysense/types.hpp"

#include <cmath>

namespace cavitysense {

namespace flag {
std::string to_string(unsigned flags) {
    if (flags == 0) return "-";
    static const struct { unsigned bit; const char* name; } table[] = {
        {dissipation_ignored, "noncons"}, {short_time_invalid, "short_t"},
        {dispersive_invalid, "disp"},     {resonant_invalid, "res"},
        {gaussian_invalid, "gauss"},      {truncation_warning, "trunc"},
        {insensitive_point, "insens"},    {diverging, "div"},
        {forced_eigen, "forced_eig"},     {window_left, "win_L"},
        {window_right, "win_R"},          {saturated, "sat"},
        {overlap_large, "overlap"},
    };
    std::string out;
    for (const auto& e : table) {
        if (flags & e.bit) {
            if (!out.empty()) out += '+';
            out += e.name;
        }
    }
    return out.empty() ? "-" : out;
}
}  // namespace flag

ProtocolVariant parse_variant(const std::string& s) {
    if (s == "dispersive") return ProtocolVariant::Dispersive;
    if (s == "resonant") return ProtocolVariant::Resonant;
    throw config_error("unknown protocol variant '" + s + "' (expected dispersive|resonant)");
}

std::string to_string(ProtocolVariant v) {
    return v == ProtocolVariant::Dispersive ? "dispersive" : "resonant";
}

double SystemParams::chi(ProtocolVariant v) const {
    if (v == ProtocolVariant::Dispersive) {
        if (delta_c == 0.0) throw config_error("dispersive chi undefined: delta_c = 0");
        return 2.0 * g * g / delta_c;
    }
    if (alpha == 0.0) throw config_error("resonant chi undefined: alpha = 0");
    return g / alpha;
}

bool SystemParams::resonant_valid(double threshold) const {
    return alpha * alpha >= threshold * static_cast<double>(N);
}

bool SystemParams::dispersive_valid(double threshold) const {
    const double gN = g * std::sqrt(static_cast<double>(N));
    return std::abs(delta_c) >= threshold * gN && std::abs(delta_c) >= threshold * g * alpha;
}

unsigned SystemParams::regime_flags(ProtocolVariant v) const {
    unsigned f = 0;
    if (v == ProtocolVariant::Resonant && !resonant_valid()) f |= flag::resonant_invalid;
    if (v == ProtocolVariant::Dispersive && !dispersive_valid()) f |= flag::dispersive_invalid;
    return f;
}

void SystemParams::validate() const {
    if (N < 1) throw config_error("SystemParams: N must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw config_error("SystemParams: alpha must be finite and >= 0");
    if (!std::isfinite(g) || !std::isfinite(delta_c)) throw config_error("SystemParams: g/delta_c must be finite");
    if (!(kappa >= 0.0) || !(gamma >= 0.0)) throw config_error("SystemParams: rates must be >= 0");
}

void ProtocolConfig::validate() const {
    if (!(tau1 >= 0.0) || !(tau2 >= 0.0)) throw config_error("ProtocolConfig: times must be >= 0");
    if (!std::isfinite(beta)) throw config_error("ProtocolConfig: beta must be finite");
    if (!phi_auto) {
        if (!(phi > 0.0) || !(phi <= pi))
            throw config_error("ProtocolConfig: phi must lie in (0, pi] — phi = 0 duplicates pi and is rejected");
    }
    if (!(sigma_det >= 0.0)) throw config_error("ProtocolConfig: sigma_det must be >= 0");
}

double MomentSet::s_phi(double phi) const {
    return std::cos(phi) * splus.real() + std::sin(phi) * splus.imag();
}

double MomentSet::d_s_phi(double phi) const {
    return std::cos(phi) * d_splus.real() + std::sin(phi) * d_splus.imag();
}

double MomentSet::s_phi_var(double phi) const {
    const double c = std::cos(phi), s = std::sin(phi);
    const double sx2 = 0.5 * (spm - sz + splus_sq.real());
    const double sy2 = 0.5 * (spm - sz - splus_sq.real());
    const double cross = splus_sq.imag();  // ⟨{S_x,S_y}⟩
    const double mean = s_phi(phi);
    return c * c * sx2 + s * s * sy2 + c * s * cross - mean * mean;
}

bool MomentSet::within_bounds(std::int64_t N, double slack) const {
    const double half = static_cast<double>(N) / 2.0;
    if (std::abs(splus) > half + slack) return false;
    // time-reversal protocol states never exceed the +x CSS value N(N+1)/4
    const double spm_max = static_cast<double>(N) * (static_cast<double>(N) + 1.0) / 4.0;
    if (spm < -slack || spm > spm_max + slack) return false;
    return true;
}

double metrological_gain_db(double delta_beta_sq) {
    if (!(delta_beta_sq > 0.0))
        throw config_error("metrological_gain_db: (delta beta)^2 must be positive");
    return -10.0 * std::log10(4.0 * delta_beta_sq);
}

double qfi_gain_db(double qfi) {
    if (!(qfi > 0.0)) throw config_error("qfi_gain_db: F_Q must be positive");
    return 10.0 * std::log10(qfi / 4.0);
}

}  // namespace cavitysense
