// simulator.cpp — exact dynamics on the Dicke ⊗ Fock space.  Everything here
// is deliberately serial: the propagators are used as cross-checks for the
// analytic layer, so bitwise reproducibility beats speed.
#include "cavitysense/simulator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cavitysense/eig.hpp"
#include "cavitysense/qfi_sum.hpp"

namespace cavitysense {

namespace {

constexpr complexd iu{0.0, 1.0};

// √(S(S+1) − m(m+1)) for the raising matrix element ⟨k+1|S⁺|k⟩, m = k − N/2.
double raise_coeff(std::int64_t N, std::int64_t k) {
    const double S = 0.5 * static_cast<double>(N);
    const double m = static_cast<double>(k) - S;
    const double v = S * (S + 1.0) - m * (m + 1.0);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

// eigenvalue of S⁺S⁻ on |k⟩: S(S+1) − m(m−1)
double spsm_eigenvalue(std::int64_t N, std::int64_t k) {
    const double S = 0.5 * static_cast<double>(N);
    const double m = static_cast<double>(k) - S;
    return S * (S + 1.0) - m * (m - 1.0);
}

Eigen::VectorXcd coherent_fock_vector(int n_max, double alpha) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
    if (alpha == 0.0) {
        c[0] = 1.0;
        return c;
    }
    const double la = std::log(std::abs(alpha));
    for (int n = 0; n <= n_max; ++n) {
        const double lm = -0.5 * alpha * alpha + n * la - 0.5 * std::lgamma(n + 1.0);
        c[n] = std::exp(lm);
    }
    c.normalize();
    return c;
}

// D(β) = e^{β(a†−a)} = V e^{−iβΛ} V† from the eigensystem of Y = i(a†−a).
Eigen::MatrixXcd dense_displacement(int n_max, double beta) {
    const int d = n_max + 1;
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) {
        const double s = std::sqrt(n + 1.0);
        y(n + 1, n) = iu * s;
        y(n, n + 1) = -iu * s;
    }
    const HermitianEig eig = hermitian_eig(y);
    Eigen::VectorXcd ph(d);
    for (int j = 0; j < d; ++j) ph[j] = std::exp(-iu * beta * eig.values[j]);
    return eig.vectors * ph.asDiagonal() * eig.vectors.adjoint();
}

// ψ or ρ lives on (spin ⊗ Fock) with Fock fastest; apply a Fock-factor
// operator D blockwise.
void displace_pure(Eigen::VectorXcd& psi, Eigen::Index dim_s, const Eigen::MatrixXcd& d) {
    using RowMat = Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat> p(psi.data(), dim_s, d.rows());
    p = (p * d.transpose()).eval();
}

void displace_density(Eigen::MatrixXcd& rho, Eigen::Index dim_s, const Eigen::MatrixXcd& d) {
    const Eigen::Index df = d.rows();
    const Eigen::Index dim = dim_s * df;
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim_s; ++k)
        big.block(k * df, k * df, df, df) = d;
    rho = (big * rho * big.adjoint()).eval();
}

std::string human_bytes(std::uint64_t b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f MiB", static_cast<double>(b) / (1 << 20));
    return buf;
}

// infinity norm of a sparse matrix (max absolute row sum)
double sparse_inf_norm(const SparseC& h) {
    std::vector<double> row(static_cast<std::size_t>(h.rows()), 0.0);
    for (int c = 0; c < h.outerSize(); ++c)
        for (SparseC::InnerIterator it(h, c); it; ++it)
            row[static_cast<std::size_t>(it.row())] += std::abs(it.value());
    double m = 0.0;
    for (double v : row) m = std::max(m, v);
    return m;
}

Eigen::VectorXd sparse_diagonal_real(const SparseC& h) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(h.rows());
    for (int c = 0; c < h.outerSize(); ++c)
        for (SparseC::InnerIterator it(h, c); it; ++it)
            if (it.row() == it.col()) d[it.row()] = it.value().real();
    return d;
}

}  // namespace

// ---------------------------------------------------------------- states ----

double JointState::norm_error() const {
    if (is_density) return std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    return std::abs(psi.norm() - 1.0);
}

double JointState::leakage() const {
    const int d = n_max + 1;
    const int first = std::max(1, d - std::max(1, d / 20));  // top 5 % of levels
    double pop = 0.0;
    for (std::int64_t k = 0; k <= N; ++k)
        for (int n = first; n < d; ++n) {
            const Eigen::Index i = k * d + n;
            pop += is_density ? rho(i, i).real() : std::norm(psi[i]);
        }
    return pop;
}

void JointState::check(double norm_tol, double leak_tol) const {
    char buf[128];
    const double ne = norm_error();
    if (!(ne <= norm_tol)) {
        std::snprintf(buf, sizeof buf, "state norm drifted: |norm-1| = %.3e", ne);
        throw numeric_error(buf);
    }
    const double lk = leakage();
    if (!(lk <= leak_tol)) {
        std::snprintf(buf, sizeof buf,
                      "Fock truncation too tight: %.3e population in top levels", lk);
        throw numeric_error(buf);
    }
}

void JointState::to_density() {
    if (is_density) return;
    rho = psi * psi.adjoint();
    psi.resize(0);
    is_density = true;
}

int default_n_max(double alpha) {
    const double a = std::abs(alpha);
    return static_cast<int>(std::ceil(a * a + 10.0 * a + 20.0));
}

JointState initial_cat_state(std::int64_t N, int n_max, double alpha, SpinAxis axis) {
    if (N < 1 || n_max < 0) throw config_error("initial_cat_state: need N >= 1, n_max >= 0");
    JointState st;
    st.N = N;
    st.n_max = n_max;
    const SpinCoefficients spin = coherent_spin_state(N, axis);
    const Eigen::VectorXcd fock = coherent_fock_vector(n_max, alpha);
    st.psi.resize(st.dim());
    const int d = n_max + 1;
    for (std::int64_t k = 0; k <= N; ++k) {
        const complexd ck = spin.value(k);
        for (int n = 0; n < d; ++n) st.psi[k * d + n] = ck * fock[n];
    }
    st.psi.normalize();
    return st;
}

// ---------------------------------------------------------- hamiltonians ----

namespace {

void check_state_budget(std::int64_t N, int n_max, std::uint64_t max_bytes) {
    const std::uint64_t dim = static_cast<std::uint64_t>(N + 1) * (n_max + 1);
    // Krylov propagation keeps ~40 state vectors alive
    const std::uint64_t need = dim * 16ull * 40ull;
    if (need > max_bytes) {
        throw config_error("state space too large: dim = " + std::to_string(dim) +
                           " needs about " + human_bytes(need) + " (cap " +
                           human_bytes(max_bytes) + "); raise simulator.max_bytes or shrink N/n_max");
    }
}

void check_density_budget(std::int64_t dim, std::uint64_t max_bytes) {
    // RK45 holds the state, 7 stage slopes and a couple of temporaries
    const std::uint64_t need = static_cast<std::uint64_t>(dim) * dim * 16ull * 10ull;
    if (need > max_bytes) {
        throw config_error("density-matrix evolution needs about " + human_bytes(need) +
                           " (cap " + human_bytes(max_bytes) +
                           "); raise simulator.max_bytes or shrink N/n_max");
    }
}

}  // namespace

Hamiltonian build_hamiltonian(const HamiltonianSpec& spec, std::int64_t N, int n_max,
                              std::uint64_t max_bytes) {
    if (N < 1 || n_max < 0) throw config_error("build_hamiltonian: need N >= 1, n_max >= 0");
    check_state_budget(N, n_max, max_bytes);
    const int d = n_max + 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(N + 1) * d;
    std::vector<Eigen::Triplet<complexd>> trip;
    bool diagonal = false;

    if (const auto* tc = std::get_if<TavisCummings>(&spec)) {
        trip.reserve(static_cast<std::size_t>(3 * dim));
        for (std::int64_t k = 0; k <= N; ++k) {
            for (int n = 0; n < d; ++n) {
                const Eigen::Index i = k * d + n;
                if (tc->delta_c != 0.0)
                    trip.emplace_back(i, i, complexd{-tc->delta_c * n, 0.0});
                // a S⁺: |k,n⟩ → √n s⁺(k) |k+1,n−1⟩   (+ Hermitian partner)
                if (k < N && n > 0) {
                    const double v = tc->g * std::sqrt(static_cast<double>(n)) * raise_coeff(N, k);
                    const Eigen::Index j = (k + 1) * d + (n - 1);
                    trip.emplace_back(j, i, complexd{v, 0.0});
                    trip.emplace_back(i, j, complexd{v, 0.0});
                }
            }
        }
    } else if (const auto* de = std::get_if<DispersiveEffective>(&spec)) {
        diagonal = true;
        trip.reserve(static_cast<std::size_t>(dim));
        for (std::int64_t k = 0; k <= N; ++k) {
            const double m = static_cast<double>(k) - 0.5 * static_cast<double>(N);
            for (int n = 0; n < d; ++n) {
                double e = de->chi * n * m;
                if (de->include_spsm) e += 0.5 * de->chi * spsm_eigenvalue(N, k);
                if (de->include_detuning) e += -de->delta_c * n;
                trip.emplace_back(k * d + n, k * d + n, complexd{e, 0.0});
            }
        }
    } else {
        const auto& re = std::get<ResonantEffective>(spec);
        if (re.nbar <= 0.0) throw config_error("ResonantEffective requires nbar > 0");
        const double rt = std::sqrt(re.nbar);
        const double corr =
            re.include_correction ? 1.0 - (static_cast<double>(N) + 1.0) / (2.0 * re.nbar) : 1.0;
        trip.reserve(static_cast<std::size_t>(2 * dim));
        for (int n = 0; n < d; ++n) {
            const double omega = re.g * rt * corr + re.g * n / rt;  // per-Fock S_x frequency
            for (std::int64_t k = 0; k < N; ++k) {
                const double v = 0.5 * omega * raise_coeff(N, k);
                const Eigen::Index i = k * d + n;
                const Eigen::Index j = (k + 1) * d + n;
                trip.emplace_back(j, i, complexd{v, 0.0});
                trip.emplace_back(i, j, complexd{v, 0.0});
            }
        }
    }

    Hamiltonian h;
    h.N = N;
    h.n_max = n_max;
    h.diagonal = diagonal;
    h.mat.resize(dim, dim);
    h.mat.setFromTriplets(trip.begin(), trip.end());
    return h;
}

Hamiltonian protocol_hamiltonian(double chi, std::int64_t N, int n_max, std::uint64_t max_bytes) {
    if (N < 1 || n_max < 0) throw config_error("protocol_hamiltonian: need N >= 1, n_max >= 0");
    check_state_budget(N, n_max, max_bytes);
    const int d = n_max + 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(N + 1) * d;
    std::vector<Eigen::Triplet<complexd>> trip;
    trip.reserve(static_cast<std::size_t>(dim));
    for (std::int64_t k = 0; k <= N; ++k) {
        const double m = static_cast<double>(k) - 0.5 * static_cast<double>(N);
        for (int n = 0; n < d; ++n)
            trip.emplace_back(k * d + n, k * d + n, complexd{chi * n * m, 0.0});
    }
    Hamiltonian h;
    h.N = N;
    h.n_max = n_max;
    h.diagonal = true;
    h.mat.resize(dim, dim);
    h.mat.setFromTriplets(trip.begin(), trip.end());
    return h;
}

// ------------------------------------------------------------- evolution ----

namespace {

// One adaptive Lanczos propagation ψ ← e^{−iHt}ψ with full reorthogonalization.
// The Krylov basis is dt-independent, so step-size rejection only recomputes
// the (m×m) exponential.
void krylov_expv(const SparseC& h, Eigen::VectorXcd& psi, double t, double tol) {
    if (t == 0.0 || psi.size() == 0) return;
    const double hnorm = std::max(sparse_inf_norm(h), 1e-300);
    const int m = static_cast<int>(std::min<Eigen::Index>(30, psi.size()));
    const double sgn = t > 0.0 ? 1.0 : -1.0;
    const double ttot = std::abs(t);
    double remaining = ttot;
    double dt = std::min(remaining, 10.0 / hnorm);
    int steps = 0;

    Eigen::MatrixXcd basis(psi.size(), m);
    Eigen::VectorXd alpha(m), beta(m);

    while (remaining > 0.0) {
        if (++steps > 200000) throw numeric_error("Krylov propagation exceeded step limit");
        const double bnorm = psi.norm();
        basis.col(0) = psi / bnorm;
        int keff = m;
        bool breakdown = false;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXcd w = h * basis.col(j);
            if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
            alpha[j] = std::real(basis.col(j).dot(w));
            w -= alpha[j] * basis.col(j);
            for (int r = 0; r <= j; ++r) w -= basis.col(r).dot(w) * basis.col(r);
            const double b = w.norm();
            if (j + 1 < m) {
                beta[j] = b;
                if (b < 1e-13 * hnorm + 1e-300) {
                    keff = j + 1;
                    breakdown = true;
                    break;
                }
                basis.col(j + 1) = w / b;
            } else {
                beta[j] = b;  // coupling out of the space, used for the error estimate
            }
        }

        Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(keff, keff);
        for (int j = 0; j < keff; ++j) {
            tmat(j, j) = alpha[j];
            if (j + 1 < keff) tmat(j, j + 1) = tmat(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
        const Eigen::VectorXd ev = es.eigenvalues();
        const Eigen::MatrixXd evec = es.eigenvectors();
        const double bout = breakdown ? 0.0 : beta[keff - 1];

        // grow/shrink dt against the per-unit-time error budget
        Eigen::VectorXcd u(keff);
        for (int tries = 0;; ++tries) {
            if (tries > 200) throw numeric_error("Krylov step size failed to converge");
            for (int j = 0; j < keff; ++j) {
                complexd acc = 0.0;
                for (int r = 0; r < keff; ++r)
                    acc += evec(j, r) * std::exp(-iu * sgn * dt * ev[r]) * evec(0, r);
                u[j] = acc;
            }
            const double err = bout * std::abs(u[keff - 1]) * dt;
            const double budget = tol * dt / ttot + 1e-300;
            if (err <= budget || breakdown || dt <= remaining * 1e-14) break;
            dt *= std::max(0.3, 0.7 * std::pow(budget / err, 1.0 / keff));
        }

        psi = basis.leftCols(keff) * (bnorm * u);
        remaining -= dt;
        dt = std::min(remaining, dt * 1.3);
    }

    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > 1e-8)
        throw numeric_error("Krylov propagation lost unitarity: |norm-1| = " + std::to_string(drift));
}

}  // namespace

void evolve_unitary(JointState& state, const Hamiltonian& h, double t, double tol) {
    if (h.mat.rows() != state.dim())
        throw config_error("evolve_unitary: Hamiltonian/state dimension mismatch");
    if (h.diagonal) {
        const Eigen::VectorXd e = sparse_diagonal_real(h.mat);
        if (!state.is_density) {
            for (Eigen::Index i = 0; i < state.psi.size(); ++i)
                state.psi[i] *= std::exp(-iu * e[i] * t);
        } else {
            for (Eigen::Index i = 0; i < state.rho.rows(); ++i)
                for (Eigen::Index j = 0; j < state.rho.cols(); ++j)
                    state.rho(i, j) *= std::exp(-iu * (e[i] - e[j]) * t);
        }
        return;
    }
    if (state.is_density)
        throw numeric_error("evolve_unitary: density matrices are only supported for diagonal H");
    krylov_expv(h.mat, state.psi, t, tol);
}

namespace {

// Lindblad right-hand side; `mm` is Σ L†L precomputed.
Eigen::MatrixXcd lindblad_rhs(const SparseC& h, const std::vector<SparseC>& jumps,
                              const SparseC& mm, const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd out = -iu * (h * rho - rho * h);
    for (const SparseC& l : jumps) {
        const Eigen::MatrixXcd lr = l * rho;
        out.noalias() += lr * l.adjoint();
    }
    out.noalias() -= 0.5 * (mm * rho);
    out.noalias() -= 0.5 * (rho * mm);
    return out;
}

}  // namespace

void evolve_lindblad(JointState& state, const Hamiltonian& h, const JumpSet& jumps, double t,
                     double tol, bool check_positivity) {
    if (t < 0.0) throw config_error("evolve_lindblad: negative time");
    if (h.mat.rows() != state.dim())
        throw config_error("evolve_lindblad: Hamiltonian/state dimension mismatch");
    state.to_density();
    if (t == 0.0) return;

    SparseC mm(h.mat.rows(), h.mat.cols());
    for (const SparseC& l : jumps.ops) mm += SparseC(l.adjoint() * l);

    // Dormand–Prince 5(4) tableau
    static const double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double b5[7] = {35.0 / 384,      0.0, 500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84, 0.0};
    static const double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    std::vector<Eigen::MatrixXcd> k(7);
    double time_done = 0.0;
    double dt = t * 1e-3;
    int steps = 0;

    while (time_done < t) {
        if (++steps > 2000000) throw numeric_error("Lindblad propagation exceeded step limit");
        dt = std::min(dt, t - time_done);
        if (dt < t * 1e-13) throw numeric_error("Lindblad step size underflow");

        k[0] = lindblad_rhs(h.mat, jumps.ops, mm, state.rho);
        for (int s = 1; s < 7; ++s) {
            Eigen::MatrixXcd y = state.rho;
            for (int q = 0; q < s; ++q)
                if (a[s][q] != 0.0) y.noalias() += (dt * a[s][q]) * k[q];
            k[s] = lindblad_rhs(h.mat, jumps.ops, mm, y);
        }

        Eigen::MatrixXcd y5 = state.rho;
        Eigen::MatrixXcd errm = Eigen::MatrixXcd::Zero(state.rho.rows(), state.rho.cols());
        for (int s = 0; s < 7; ++s) {
            if (b5[s] != 0.0) y5.noalias() += (dt * b5[s]) * k[s];
            const double e = b5[s] - b4[s];
            if (e != 0.0) errm.noalias() += (dt * e) * k[s];
        }

        const double scale = std::max(1.0, state.rho.norm());
        const double err = errm.norm() / (tol * scale + 1e-300);
        if (err <= 1.0) {
            state.rho = 0.5 * (y5 + y5.adjoint().eval());  // Hermitize each accepted step
            time_done += dt;
            const double tr_err = std::abs(state.rho.trace().real() - 1.0);
            if (tr_err > std::max(1e-9, 100.0 * tol))
                throw numeric_error("Lindblad trace drifted: " + std::to_string(tr_err));
        }
        dt *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    }

    if (check_positivity) {
        const Eigen::VectorXd ev = hermitian_eigenvalues(state.rho);
        if (ev.minCoeff() < -1e-8)
            throw numeric_error("Lindblad state lost positivity: min eig = " +
                                std::to_string(ev.minCoeff()));
    }
}

void apply_displacement(JointState& state, double beta) {
    if (beta == 0.0) return;
    const Eigen::MatrixXcd d = dense_displacement(state.n_max, beta);
    if (state.is_density)
        displace_density(state.rho, state.N + 1, d);
    else
        displace_pure(state.psi, state.N + 1, d);
}

// ------------------------------------------------------------- protocol ----

MomentSet moments_from_state(const JointState& state) {
    const std::int64_t N = state.N;
    const int d = state.n_max + 1;
    complexd splus = 0.0, splus_sq = 0.0;
    double spm = 0.0, sz = 0.0;
    auto rho_entry = [&](Eigen::Index i, Eigen::Index j) -> complexd {
        return state.is_density ? state.rho(i, j) : state.psi[i] * std::conj(state.psi[j]);
    };
    for (std::int64_t k = 0; k <= N; ++k) {
        const double m = static_cast<double>(k) - 0.5 * static_cast<double>(N);
        for (int n = 0; n < d; ++n) {
            const Eigen::Index i = k * d + n;
            const double pop = rho_entry(i, i).real();
            sz += m * pop;
            spm += spsm_eigenvalue(N, k) * pop;
            // tr(ρ S⁺) picks up ρ[(k,n),(k+1,n)] s⁺(k)
            if (k < N) splus += rho_entry(i, (k + 1) * d + n) * raise_coeff(N, k);
            if (k + 1 < N)
                splus_sq +=
                    rho_entry(i, (k + 2) * d + n) * raise_coeff(N, k + 1) * raise_coeff(N, k);
        }
    }
    MomentSet ms;
    ms.splus = splus;
    ms.splus_sq = splus_sq;
    ms.spm = spm;
    ms.sz = sz;
    ms.has_derivatives = false;
    return ms;
}

ProtocolRun run_protocol(const SystemParams& p, const ProtocolConfig& cfg, Backend backend,
                         int n_max_override, std::uint64_t max_bytes) {
    p.validate();
    cfg.validate();
    const double chi = p.chi(cfg.variant);
    const int n_max =
        n_max_override > 0 ? n_max_override : default_n_max(p.alpha + std::abs(cfg.beta));
    const Hamiltonian fwd = protocol_hamiltonian(chi, p.N, n_max, max_bytes);
    const Hamiltonian bwd = protocol_hamiltonian(-chi, p.N, n_max, max_bytes);

    ProtocolRun run;
    run.state = initial_cat_state(p.N, n_max, p.alpha);

    if (backend == Backend::Unitary) {
        if (p.kappa != 0.0 || p.gamma != 0.0)
            throw config_error("unitary backend requires kappa = gamma = 0");
        evolve_unitary(run.state, fwd, cfg.tau1);
        apply_displacement(run.state, cfg.beta);
        evolve_unitary(run.state, bwd, cfg.tau2);
    } else {
        if (p.gamma != 0.0)
            throw config_error("collective-basis Lindblad supports cavity decay only; "
                               "use tiny_gamma_protocol for spontaneous emission");
        check_density_budget(run.state.dim(), max_bytes);
        JumpSet jumps;
        if (p.kappa > 0.0) {
            // √κ a on the Fock factor
            std::vector<Eigen::Triplet<complexd>> trip;
            const double rk = std::sqrt(p.kappa);
            for (std::int64_t k = 0; k <= p.N; ++k)
                for (int n = 1; n <= n_max; ++n)
                    trip.emplace_back(k * (n_max + 1) + n - 1, k * (n_max + 1) + n,
                                      complexd{rk * std::sqrt(static_cast<double>(n)), 0.0});
            SparseC ajump(run.state.dim(), run.state.dim());
            ajump.setFromTriplets(trip.begin(), trip.end());
            jumps.ops.push_back(std::move(ajump));
        }
        run.state.to_density();
        evolve_lindblad(run.state, fwd, jumps, cfg.tau1);
        apply_displacement(run.state, cfg.beta);
        evolve_lindblad(run.state, bwd, jumps, cfg.tau2);
    }

    run.state.check(1e-6, 1e-6);
    run.moments = moments_from_state(run.state);
    return run;
}

// ------------------------------------------------- tiny-N per-spin engine ----

namespace {

// sparse one-spin operator embedded at site `site` of an N-spin register
// (basis index = bitmask, bit set = |↑⟩), acting as identity on the Fock factor
SparseC lift_site_op(int nspins, int site, int n_fock, char which, double scale) {
    const Eigen::Index ds = Eigen::Index{1} << nspins;
    const int df = n_fock + 1;
    std::vector<Eigen::Triplet<complexd>> trip;
    for (Eigen::Index s = 0; s < ds; ++s) {
        const bool up = (s >> site) & 1;
        const Eigen::Index flip = s ^ (Eigen::Index{1} << site);
        complexd diag = 0.0, off = 0.0;
        Eigen::Index target = flip;
        switch (which) {
            case 'z': diag = up ? 0.5 : -0.5; break;
            case 'x': off = 0.5; break;
            case 'y': off = up ? iu * 0.5 : -iu * 0.5; break;  // ⟨↓|s_y|↑⟩ = i/2
            case '-':                                          // σ⁻, full Pauli lowering
                if (up) off = 1.0;
                break;
            default: break;
        }
        for (int n = 0; n < df; ++n) {
            if (diag != 0.0) trip.emplace_back(s * df + n, s * df + n, scale * diag);
            if (off != 0.0) trip.emplace_back(target * df + n, s * df + n, scale * off);
        }
    }
    SparseC out(ds * df, ds * df);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Hamiltonian tiny_protocol_hamiltonian(double chi, int nspins, int n_fock) {
    const Eigen::Index ds = Eigen::Index{1} << nspins;
    const int df = n_fock + 1;
    std::vector<Eigen::Triplet<complexd>> trip;
    for (Eigen::Index s = 0; s < ds; ++s) {
        double m = 0.0;
        for (int i = 0; i < nspins; ++i) m += ((s >> i) & 1) ? 0.5 : -0.5;
        for (int n = 0; n < df; ++n)
            trip.emplace_back(s * df + n, s * df + n, complexd{chi * n * m, 0.0});
    }
    Hamiltonian h;
    h.N = ds - 1;  // dimension bookkeeping only
    h.n_max = n_fock;
    h.diagonal = true;
    h.mat.resize(ds * df, ds * df);
    h.mat.setFromTriplets(trip.begin(), trip.end());
    return h;
}

}  // namespace

MomentSet tiny_gamma_protocol(const SystemParams& p, const ProtocolConfig& cfg, int n_max,
                              double tol) {
    p.validate();
    cfg.validate();
    const int nspins = static_cast<int>(p.N);
    if (nspins < 1 || nspins > 6)
        throw config_error("tiny_gamma_protocol supports 1 <= N <= 6");
    const double chi = p.chi(cfg.variant);
    const Eigen::Index ds = Eigen::Index{1} << nspins;
    const int df = n_max + 1;
    const Eigen::Index dim = ds * df;
    check_density_budget(dim, default_max_bytes);

    // product initial state: every spin |+x⟩, field |α⟩
    Eigen::VectorXcd psi(dim);
    const Eigen::VectorXcd fock = coherent_fock_vector(n_max, p.alpha);
    const double amp = std::pow(2.0, -0.5 * nspins);
    for (Eigen::Index s = 0; s < ds; ++s)
        for (int n = 0; n < df; ++n) psi[s * df + n] = amp * fock[n];

    JointState st;
    st.N = ds - 1;
    st.n_max = n_max;
    st.psi = std::move(psi);
    st.to_density();

    JumpSet jumps;
    for (int i = 0; i < nspins; ++i) {
        if (cfg.variant == ProtocolVariant::Resonant) {
            jumps.ops.push_back(lift_site_op(nspins, i, n_max, 'z', std::sqrt(2.0 * p.gamma)));
            jumps.ops.push_back(lift_site_op(nspins, i, n_max, 'x', std::sqrt(p.gamma)));
            jumps.ops.push_back(lift_site_op(nspins, i, n_max, 'y', std::sqrt(p.gamma)));
        } else {
            jumps.ops.push_back(lift_site_op(nspins, i, n_max, '-', std::sqrt(2.0 * p.gamma)));
        }
    }
    if (p.kappa > 0.0) {
        std::vector<Eigen::Triplet<complexd>> trip;
        const double rk = std::sqrt(p.kappa);
        for (Eigen::Index s = 0; s < ds; ++s)
            for (int n = 1; n < df; ++n)
                trip.emplace_back(s * df + n - 1, s * df + n,
                                  complexd{rk * std::sqrt(static_cast<double>(n)), 0.0});
        SparseC ajump(dim, dim);
        ajump.setFromTriplets(trip.begin(), trip.end());
        jumps.ops.push_back(std::move(ajump));
    }

    const Hamiltonian fwd = tiny_protocol_hamiltonian(chi, nspins, n_max);
    const Hamiltonian bwd = tiny_protocol_hamiltonian(-chi, nspins, n_max);
    evolve_lindblad(st, fwd, jumps, cfg.tau1, tol);
    {
        const Eigen::MatrixXcd d = dense_displacement(n_max, cfg.beta);
        displace_density(st.rho, ds, d);
    }
    evolve_lindblad(st, bwd, jumps, cfg.tau2, tol);

    // collective moments via the Fock-traced spin density matrix
    Eigen::MatrixXcd rs = Eigen::MatrixXcd::Zero(ds, ds);
    for (Eigen::Index s = 0; s < ds; ++s)
        for (Eigen::Index r = 0; r < ds; ++r)
            for (int n = 0; n < df; ++n) rs(s, r) += st.rho(s * df + n, r * df + n);

    Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(ds, ds);
    Eigen::VectorXd mz(ds);
    for (Eigen::Index s = 0; s < ds; ++s) {
        double m = 0.0;
        for (int i = 0; i < nspins; ++i) {
            if (!((s >> i) & 1)) sp(s | (Eigen::Index{1} << i), s) += 1.0;  // σ⁺ at site i
            m += ((s >> i) & 1) ? 0.5 : -0.5;
        }
        mz[s] = m;
    }

    MomentSet ms;
    ms.splus = (rs * sp).trace();
    ms.splus_sq = (rs * sp * sp).trace();
    ms.spm = (rs * sp * sp.adjoint()).trace().real();
    const Eigen::VectorXcd mzc = mz.cast<complexd>();
    ms.sz = (rs * mzc.asDiagonal()).trace().real();
    ms.has_derivatives = false;
    return ms;
}

// ------------------------------------------------------------ mixed QFI ----

Eigen::MatrixXcd displacement_generator(std::int64_t N, int n_max) {
    const int d = n_max + 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(N + 1) * d;
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::int64_t k = 0; k <= N; ++k)
        for (int n = 0; n + 1 < d; ++n) {
            const double s = std::sqrt(n + 1.0);
            y(k * d + n + 1, k * d + n) = iu * s;
            y(k * d + n, k * d + n + 1) = -iu * s;
        }
    return y;
}

QfiResult qfi_mixed(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& gen, bool lowrank,
                    double rank_threshold) {
    if (rho.rows() != rho.cols() || gen.rows() != gen.cols() || rho.rows() != gen.rows())
        throw config_error("qfi_mixed: dimension mismatch");
    const HermitianEig eig = hermitian_eig(rho);
    const Eigen::MatrixXcd b = eig.vectors.adjoint() * gen * eig.vectors;

    QfiResult out;
    out.flags = 0;
    if (!lowrank) {
        out.value = 2.0 * qfi_pair_sum(eig.values, b);
        out.regime = "mixed-full";
        return out;
    }

    // keep the support I = {λ ≥ threshold}; correct with the projector terms:
    // F = 2 Σ_{a,b∈I} pair + 4 Σ_{a∈I} λ_a Σ_{c∉I} |B_ca|²
    const Eigen::Index n = eig.values.size();
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < n; ++i)
        if (eig.values[i] >= rank_threshold) kept.push_back(i);

    double pair = 0.0;
    for (std::size_t ra = 0; ra < kept.size(); ++ra)
        for (std::size_t rb = 0; rb < kept.size(); ++rb) {
            const double la = eig.values[kept[ra]];
            const double lb = eig.values[kept[rb]];
            const double num = (la - lb) * (la - lb);
            if (la + lb < 1e-14) continue;
            pair += num / (la + lb) * std::norm(b(kept[ra], kept[rb]));
        }

    double outside = 0.0;
    std::vector<bool> in_set(static_cast<std::size_t>(n), false);
    for (Eigen::Index i : kept) in_set[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index i : kept) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < n; ++c)
            if (!in_set[static_cast<std::size_t>(c)]) s += std::norm(b(c, i));
        outside += eig.values[i] * s;
    }

    out.value = 2.0 * pair + 4.0 * outside;
    out.regime = "mixed-lowrank";
    return out;
}

double pure_state_qfi(const JointState& state) {
    if (state.is_density) throw config_error("pure_state_qfi needs a pure state");
    const int d = state.n_max + 1;
    const Eigen::Index dim = state.dim();
    // Y = i(a†−a) applied blockwise (sparse two-band structure)
    Eigen::VectorXcd yp = Eigen::VectorXcd::Zero(dim);
    for (std::int64_t k = 0; k <= state.N; ++k)
        for (int n = 0; n < d; ++n) {
            complexd acc = 0.0;
            if (n > 0) acc += iu * std::sqrt(static_cast<double>(n)) * state.psi[k * d + n - 1];
            if (n + 1 < d) acc += -iu * std::sqrt(n + 1.0) * state.psi[k * d + n + 1];
            yp[k * d + n] = acc;
        }
    const double mean = std::real(state.psi.dot(yp));
    const double sq = yp.squaredNorm();
    return 4.0 * (sq - mean * mean);
}

}  // namespace cavitysense
