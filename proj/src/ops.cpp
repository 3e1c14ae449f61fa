// ops.cpp — spin operators, CSS construction, sensitivity assembly.
#include "cavitysense/ops.hpp"

#include <cmath>
#include <limits>

namespace cavitysense {

SpinOps spin_operators(std::int64_t N) {
    if (N < 1) throw config_error("spin_operators: N must be >= 1");
    if (N > 100000) throw config_error("spin_operators: dense operators limited to N <= 1e5");
    const Eigen::Index dim = static_cast<Eigen::Index>(N) + 1;
    const double S = static_cast<double>(N) / 2.0;
    SpinOps ops;
    ops.sp = Eigen::MatrixXcd::Zero(dim, dim);
    ops.sz = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double m = static_cast<double>(k) - S;
        ops.sz(k, k) = m;
        if (k + 1 < dim)  // S⁺|m⟩ = √(S(S+1) − m(m+1)) |m+1⟩
            ops.sp(k + 1, k) = std::sqrt(S * (S + 1.0) - m * (m + 1.0));
    }
    ops.sm = ops.sp.adjoint();
    ops.sx = 0.5 * (ops.sp + ops.sm);
    ops.sy = complexd{0.0, -0.5} * (ops.sp - ops.sm);
    return ops;
}

SpinCoefficients coherent_spin_state(std::int64_t N, SpinAxis axis) {
    if (N < 1) throw config_error("coherent_spin_state: N must be >= 1");
    const double lc = std::log(std::abs(std::cos(axis.polar / 2.0)));
    const double ls = std::log(std::abs(std::sin(axis.polar / 2.0)));
    // |θ,φ⟩ = Π_i [cos(θ/2)|↑⟩ + e^{iφ}·(phase folded below)·sin(θ/2)|↓⟩]:
    // |c_k| = √binom(N,k) cos(θ/2)^k sin(θ/2)^{N−k}, k = number of up spins.
    SpinCoefficients c;
    c.N = N;
    c.log_mag.resize(static_cast<std::size_t>(N) + 1);
    c.phase.resize(static_cast<std::size_t>(N) + 1);
    const double lgN = std::lgamma(static_cast<double>(N) + 1.0);
    for (std::int64_t k = 0; k <= N; ++k) {
        const double dk = static_cast<double>(k);
        double lm = 0.5 * (lgN - std::lgamma(dk + 1.0) - std::lgamma(static_cast<double>(N - k) + 1.0));
        // guard 0·log(0): only add a factor whose exponent is nonzero
        if (k > 0) lm += dk * lc;
        if (k < N) lm += static_cast<double>(N - k) * ls;
        c.log_mag[static_cast<std::size_t>(k)] = lm;
        c.phase[static_cast<std::size_t>(k)] = -axis.azimuth * (dk - static_cast<double>(N) / 2.0);
    }
    return c;
}

Eigen::VectorXcd coherent_spin_state_vector(std::int64_t N, SpinAxis axis) {
    const SpinCoefficients c = coherent_spin_state(N, axis);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(N) + 1);
    for (std::int64_t k = 0; k <= N; ++k) v[static_cast<Eigen::Index>(k)] = c.value(k);
    v.normalize();  // removes the ~1e-16 rounding residue
    return v;
}

double sensitivity_from_moments(const MomentSet& m, double phi, double sigma_det) {
    if (!m.has_derivatives)
        throw numeric_error("sensitivity_from_moments: moment set lacks analytic derivatives");
    const double slope = m.d_s_phi(phi);
    const double var = m.s_phi_var(phi);
    if (var < -1e-9) throw numeric_error("sensitivity_from_moments: variance came out negative");
    const double noise = std::max(var, 0.0) + sigma_det * sigma_det;
    const double r = noise / (slope * slope);
    if (!std::isfinite(r))
        throw insensitive_point_error("sensitivity_from_moments: slope vanishes at this working point");
    return r;
}

double auto_measurement_angle(const MomentSet& m, double sigma_det) {
    double phi;
    if (m.has_derivatives && std::abs(m.d_splus) > 0.0) {
        phi = std::arg(m.d_splus);  // angle maximizing |d⟨S_φ⟩/dβ|
    } else if (std::abs(m.splus) > 0.0) {
        phi = std::arg(m.splus) + pi / 2.0;  // perpendicular to the mean spin
    } else {
        return pi / 2.0;
    }
    phi = std::fmod(phi, pi);  // φ and φ+π give identical (δβ)²
    if (phi <= 0.0) phi += pi;
    if (!m.has_derivatives) return phi;

    // The slope-maximizing angle ignores the angle dependence of the variance,
    // so polish the actual objective.  (δβ)²(φ) has period π and at most two
    // local minima there; a coarse scan seeded with φ picks the right basin
    // and golden-section refines it.
    auto objective = [&](double x) {
        try {
            return sensitivity_from_moments(m, x, sigma_det);
        } catch (const insensitive_point_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const int coarse = 64;
    double best_phi = phi, best = objective(phi);
    for (int i = 1; i <= coarse; ++i) {
        const double x = pi * i / (coarse + 1);
        const double v = objective(x);
        if (v < best) {
            best = v;
            best_phi = x;
        }
    }
    if (!std::isfinite(best)) return phi;
    const double invphi = 0.6180339887498949;
    double a = best_phi - pi / (coarse + 1), b = best_phi + pi / (coarse + 1);
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = objective(d);
        }
    }
    double out = 0.5 * (a + b);
    out = std::fmod(out, pi);
    if (out <= 0.0) out += pi;
    return objective(out) <= best ? out : best_phi;
}

}  // namespace cavitysense
