// ops.hpp — collective spin operators, coherent spin states and the
// moment-to-sensitivity assembly shared by every regime.
#pragma once

#include <Eigen/Dense>

#include "cavitysense/types.hpp"

namespace cavitysense {

// Measurement slope vanished at the requested working point: (δβ)² is not
// defined there.  Derived from numeric_error so generic handlers still work.
struct insensitive_point_error : numeric_error {
    using numeric_error::numeric_error;
};

// Dense collective spin-N/2 operators in the Dicke basis.  Basis index
// k = 0..N corresponds to m = k − N/2 (k = 0 is the −z pole).
struct SpinOps {
    Eigen::MatrixXcd sx, sy, sz, sp, sm;
};
SpinOps spin_operators(std::int64_t N);

// Orientation of a coherent spin state |θ,φ⟩ = e^{-iφS_z} e^{-iθS_y} |N/2, +N/2⟩.
struct SpinAxis {
    double polar = 0.0;    // θ
    double azimuth = 0.0;  // φ
    static SpinAxis plus_x() { return {pi / 2, 0.0}; }
    static SpinAxis minus_z() { return {pi, 0.0}; }
};

// CSS amplitudes kept in log domain so N up to 10⁹ is representable:
// c_k = exp(log_mag[k]) · e^{i phase[k]},  k = 0..N  (m = k − N/2).
// For the +x state every phase is 0 and c_k = √(binom(N,k)) 2^{-N/2}.
struct SpinCoefficients {
    std::int64_t N = 0;
    std::vector<double> log_mag;
    std::vector<double> phase;

    complexd value(std::int64_t k) const {
        return std::exp(log_mag[static_cast<std::size_t>(k)]) *
               complexd{std::cos(phase[static_cast<std::size_t>(k)]),
                        std::sin(phase[static_cast<std::size_t>(k)])};
    }
};
SpinCoefficients coherent_spin_state(std::int64_t N, SpinAxis axis = SpinAxis::plus_x());

// Same state as a normalized dense vector (small N only).
Eigen::VectorXcd coherent_spin_state_vector(std::int64_t N, SpinAxis axis = SpinAxis::plus_x());

// (δβ)² = (⟨(ΔS_φ)²⟩ + σ_det²) / (d⟨S_φ⟩/dβ)².  Requires analytic derivatives
// in `m`; throws insensitive_point_error when the slope vanishes.
double sensitivity_from_moments(const MomentSet& m, double phi, double sigma_det);

// Angle in (0, π] minimizing the assembled (δβ)² at detection noise σ_det.
// Starts from the slope-maximizing angle arg d⟨S⁺⟩/dβ and polishes the full
// variance/slope² trade-off; falls back to π/2 if the mean spin vanished.
double auto_measurement_angle(const MomentSet& m, double sigma_det = 0.0);

}  // namespace cavitysense
