// simulator.hpp — exact quantum dynamics on the collective-spin ⊗ Fock space:
// sparse Hamiltonians, Krylov unitary propagation, RK45 Lindblad evolution,
// the interferometric protocol runner and mixed-state QFI.  A small per-spin
// (2^N) engine provides the spontaneous-emission oracle for tiny N.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <variant>

#include "cavitysense/ops.hpp"
#include "cavitysense/types.hpp"

namespace cavitysense {

using SparseC = Eigen::SparseMatrix<complexd>;

inline constexpr std::uint64_t default_max_bytes = 2ull << 30;  // 2 GiB

// ---------------------------------------------------------------- states ----

// State on the Dicke ⊗ Fock product space, index i = k·(n_max+1) + n with
// k = 0..N the spin index (m = k − N/2) and n the Fock index.
struct JointState {
    std::int64_t N = 0;
    int n_max = 0;
    bool is_density = false;
    Eigen::VectorXcd psi;
    Eigen::MatrixXcd rho;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(N + 1) * (n_max + 1); }
    double norm_error() const;     // | ‖ψ‖−1 | or | tr ρ − 1 |
    double leakage() const;        // population of the top 5% Fock levels
    void check(double norm_tol = 1e-10, double leak_tol = 1e-8) const;
    void to_density();             // promote pure → density in place
};

// CSS(axis) ⊗ |α⟩ initial state; the protocol uses the +x default, the
// engineering comparisons start from the atomic ground state (−z).
JointState initial_cat_state(std::int64_t N, int n_max, double alpha,
                             SpinAxis axis = SpinAxis::plus_x());

// default Fock cutoff heuristic for amplitude α (mean + ~10 widths)
int default_n_max(double alpha);

// ---------------------------------------------------------- hamiltonians ----

struct TavisCummings {            // g(a†S⁻ + aS⁺) − Δc a†a
    double g = 0.0;
    double delta_c = 0.0;
};
struct DispersiveEffective {      // −Δc a†a + (χ/2)S⁺S⁻ + χ a†a S_z
    double chi = 0.0;
    double delta_c = 0.0;
    bool include_spsm = true;
    bool include_detuning = true;
};
struct ResonantEffective {        // g√n̄(1−(N+1)/2n̄)S_x + (g/√n̄) n̂ S_x
    double g = 0.0;
    double nbar = 0.0;
    bool include_correction = true;
};
using HamiltonianSpec = std::variant<TavisCummings, DispersiveEffective, ResonantEffective>;

struct Hamiltonian {
    SparseC mat;
    bool diagonal = false;        // true → evolve_unitary uses exact phases
    std::int64_t N = 0;
    int n_max = 0;
};

// Builds the sparse Hamiltonian; throws config_error with a memory estimate
// when (N+1)(n_max+1) would exceed max_bytes.
Hamiltonian build_hamiltonian(const HamiltonianSpec& spec, std::int64_t N, int n_max,
                              std::uint64_t max_bytes = default_max_bytes);

// The bare protocol interaction χ a†a S_z (sign flips for the reversed leg).
Hamiltonian protocol_hamiltonian(double chi, std::int64_t N, int n_max,
                                 std::uint64_t max_bytes = default_max_bytes);

// ------------------------------------------------------------- evolution ----

// ψ → e^{−iHt} ψ.  Diagonal H: exact phases.  Otherwise adaptive Lanczos
// propagation with local error control at `tol` (total, not per step).
void evolve_unitary(JointState& state, const Hamiltonian& h, double t, double tol = 1e-9);

// Jump operators with their prefactors already folded in (L, not √γ L).
struct JumpSet {
    std::vector<SparseC> ops;
};

// ρ̇ = −i[H,ρ] + Σ_j (L_j ρ L_j† − ½{L_j†L_j, ρ}), adaptive RK45 (Dormand-
// Prince).  The state is Hermitized after every accepted step; the trace is
// monitored to 1e-9.  check_positivity additionally verifies min eig ≥ −1e-8
// at the end (O(dim³), off by default).
void evolve_lindblad(JointState& state, const Hamiltonian& h, const JumpSet& jumps,
                     double t, double tol = 1e-9, bool check_positivity = false);

// cavity displacement ρ/ψ → D(β) applied to the Fock factor, D = e^{β(a†−a)}
void apply_displacement(JointState& state, double beta);

// ------------------------------------------------------------- protocol ----

enum class Backend { Unitary, Lindblad };

struct ProtocolRun {
    JointState state;
    MomentSet moments;       // measured, no analytic derivatives
};

// Forward (+χ, τ₁) → D(β) → reverse (−χ, τ₂).  The Lindblad backend includes
// photon loss √κ a in both legs; γ > 0 requires the tiny-N engine below.
ProtocolRun run_protocol(const SystemParams& p, const ProtocolConfig& cfg, Backend backend,
                         int n_max_override = 0,
                         std::uint64_t max_bytes = default_max_bytes);

// Collective spin moments of a JointState.
MomentSet moments_from_state(const JointState& state);

// ------------------------------------------------- tiny-N per-spin engine ----

// Full 2^N ⊗ Fock Lindblad protocol with per-spin spontaneous emission.
// Resonant variant: rotated-frame triple {√(2γ) s_z, √γ s_x, √γ s_y} per spin;
// Dispersive variant: bare {√(2γ) σ⁻} per spin.  N ≤ 6.
MomentSet tiny_gamma_protocol(const SystemParams& p, const ProtocolConfig& cfg,
                              int n_max, double tol = 1e-8);

// ------------------------------------------------------------ mixed QFI ----

// Mixed-state QFI for displacement generator `gen` (Hermitian):
// full spectral sum, or the low-rank evaluation that keeps only eigenvalues
// ≥ rank_threshold and corrects with the projector terms.
QfiResult qfi_mixed(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& gen,
                    bool lowrank = false, double rank_threshold = 1e-12);

// Convenience: generator Y = i(a† − a) on the Fock factor of a joint state.
Eigen::MatrixXcd displacement_generator(std::int64_t N, int n_max);

// 4·Var(Y) of a pure joint state — the pure-state QFI.
double pure_state_qfi(const JointState& state);

}  // namespace cavitysense
