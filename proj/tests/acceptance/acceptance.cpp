// Acceptance gate: thirteen pinned cross-validation criteria covering the
// analytic theory against the exact simulation backends, the optimal-time
// laws, the noise regimes and the property-test suites.  Each criterion
// prints exactly one PASS/FAIL line; the process exits nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cavitysense/analytic.hpp"
#include "cavitysense/eig.hpp"
#include "cavitysense/kernels.hpp"
#include "cavitysense/ops.hpp"
#include "cavitysense/simulator.hpp"
#include "checks.hpp"

using namespace cavitysense;

namespace {

constexpr auto RES = ProtocolVariant::Resonant;

struct Outcome {
    bool pass = false;
    std::string detail;
};

SystemParams make(std::int64_t n, double alpha, double chi, double kappa = 0.0,
                  double gamma = 0.0) {
    SystemParams p;
    p.N = n;
    p.alpha = alpha;
    p.g = chi * alpha;  // resonant convention chi = g/alpha
    p.kappa = kappa;
    p.gamma = gamma;
    return p;
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// golden-section extremum of fn on a log-spaced axis
double golden_opt(const std::function<double(double)>& fn, double lo, double hi,
                  bool maximize, double tol = 1e-4) {
    const double invphi = 0.6180339887498949;
    double a = std::log(lo), b = std::log(hi);
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = fn(std::exp(c)), fd = fn(std::exp(d));
    const double sgn = maximize ? -1.0 : 1.0;
    while (b - a > tol) {
        if (sgn * fc < sgn * fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = fn(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = fn(std::exp(d));
        }
    }
    return std::exp(0.5 * (a + b));
}

// ---------------------------------------------------------------------------
// 1. Ideal QFI formula vs 4 Var(Y) on the exactly evolved joint state.
Outcome crit_qfi_vs_simulation() {
    const SystemParams p = make(10, 4.0, 1.0);
    const int n_max = default_n_max(p.alpha);
    const Hamiltonian h = protocol_hamiltonian(1.0, p.N, n_max);
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double t = 0.6 / std::sqrt(10.0) * i / 20.0;
        JointState s = initial_cat_state(p.N, n_max, p.alpha);
        evolve_unitary(s, h, t);
        const double sim = pure_state_qfi(s);
        const double formula = ideal_qfi(p, RES, t).value;
        worst = std::max(worst, std::abs(formula - sim) / formula);
    }
    return {worst < 1e-8, fmt("max rel err %.2e (tol 1e-8, 20 times)", worst)};
}

// 2. Parity revivals at chi t = pi.
Outcome crit_revivals() {
    const double a2 = 16.0;
    double worst = 0.0;
    for (std::int64_t n : {2, 4, 8}) {
        const double f = ideal_qfi(make(n, 4.0, 1.0), RES, pi).value;
        worst = std::max(worst, std::abs(f - 4.0) / 4.0);
    }
    for (std::int64_t n : {1, 3, 5}) {
        const double f = ideal_qfi(make(n, 4.0, 1.0), RES, pi).value;
        const double want = 4.0 + 16.0 * a2;
        worst = std::max(worst, std::abs(f - want) / want);
    }
    return {worst < 1e-9, fmt("max rel err %.2e (tol 1e-9)", worst)};
}

// 3. Ideal closed-form sensitivity vs finite-difference protocol simulation.
Outcome crit_ideal_sensitivity_sim() {
    const SystemParams p = make(51, 15.0, 1.0);
    double worst_db = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double t = 0.02 * std::pow(0.6 / 0.02, i / 9.0);
        const double h = 1e-3 / (4.0 * p.alpha * std::sin(t / 2.0) + 1.0);

        auto sphi = [&](double beta) {
            ProtocolConfig c;
            c.tau1 = t;
            c.tau2 = t;
            c.beta = beta;
            return run_protocol(p, c, Backend::Unitary).moments;
        };
        const MomentSet m0 = sphi(0.0);
        const double slope =
            (sphi(h).s_phi(pi / 2) - sphi(-h).s_phi(pi / 2)) / (2.0 * h);
        const double dbsq_sim = m0.s_phi_var(pi / 2) / (slope * slope);
        const double dbsq_closed = ideal_sensitivity(p, RES, t).delta_beta_sq;
        worst_db = std::max(worst_db, std::abs(metrological_gain_db(dbsq_sim) -
                                               metrological_gain_db(dbsq_closed)));
        // the field-quadrature alternative never beats the SQL
        const double xq = ideal_sensitivity(p, RES, t, Observable::FieldQuadrature)
                              .delta_beta_sq;
        if (xq < 0.25 - 1e-12) return {false, "field quadrature beat the SQL"};
    }
    return {worst_db < 0.05, fmt("max gain deviation %.3f dB (tol 0.05)", worst_db)};
}

// 4. Analytic lossy spin density vs the Lindblad-evolved reduced state.
Outcome crit_spin_density_vs_lindblad() {
    double worst = 0.0;
    for (double kappa : {0.5, 5.0})
        for (double t : {0.05, 0.2}) {
            const SystemParams p = make(4, 2.0, 1.0, kappa);
            const int n_max = 30;
            JointState s = initial_cat_state(p.N, n_max, p.alpha);
            const Hamiltonian h = protocol_hamiltonian(1.0, p.N, n_max);
            JumpSet jumps;
            {
                std::vector<Eigen::Triplet<complexd>> trip;
                for (std::int64_t k = 0; k <= p.N; ++k)
                    for (int n = 1; n <= n_max; ++n)
                        trip.emplace_back(
                            k * (n_max + 1) + n - 1, k * (n_max + 1) + n,
                            complexd{std::sqrt(kappa * n), 0.0});
                SparseC a(s.dim(), s.dim());
                a.setFromTriplets(trip.begin(), trip.end());
                jumps.ops.push_back(a);
            }
            evolve_lindblad(s, h, jumps, t, 1e-11);

            Eigen::MatrixXcd red = Eigen::MatrixXcd::Zero(p.N + 1, p.N + 1);
            for (std::int64_t i = 0; i <= p.N; ++i)
                for (std::int64_t j = 0; j <= p.N; ++j)
                    for (int n = 0; n <= n_max; ++n)
                        red(i, j) += s.rho(i * (n_max + 1) + n, j * (n_max + 1) + n);

            // analytic decoherence matrix × intracavity pointer overlap
            // exp[α²e^{−κt}(e^{−iχ(m−n)t}−1)] = the exact reduced spin state
            const SpinDensityMatrix an = loss_spin_density(p, RES, t);
            Eigen::MatrixXcd expect = an.rho;
            const double a2d = p.alpha * p.alpha * std::exp(-kappa * t);
            for (std::int64_t i = 0; i <= p.N; ++i)
                for (std::int64_t j = 0; j <= p.N; ++j)
                    expect(i, j) *= std::exp(
                        a2d * (std::exp(complexd{0.0, -double(i - j) * t}) - 1.0));
            const Eigen::VectorXd ev = hermitian_eigenvalues(red - expect);
            const double tdist = 0.5 * ev.cwiseAbs().sum();
            worst = std::max(worst, tdist);
        }
    return {worst < 1e-6, fmt("max trace distance %.2e (tol 1e-6)", worst)};
}

// 5. Lossy QFI optimum: Gaussian and closed-form routes vs the
//    eigendecomposition optimum.
Outcome crit_loss_qfi_optimum() {
    const SystemParams p = make(1000, 100.0 * std::sqrt(1000.0), 1.0,
                                100.0 * std::sqrt(1000.0) * std::sqrt(1000.0) / 73.0);
    const LossOptimum lo = qfi_loss_optimum(p, RES);

    auto gauss = [&](double t) {
        return qfi_with_loss(p, RES, t, QfiMethod::GaussianAnalytic).value;
    };
    auto eigen = [&](double t) {
        return qfi_with_loss(p, RES, t, QfiMethod::Eigendecomposition).value;
    };
    const double tg = golden_opt(gauss, lo.t_opt / 30.0, lo.t_opt * 30.0, true, 1e-4);
    const double te = golden_opt(eigen, lo.t_opt / 30.0, lo.t_opt * 30.0, true, 2e-3);
    const double fe = eigen(te);

    const double dt = std::abs(tg - te) / te;
    const double df = std::abs(lo.qfi_opt - fe) / fe;
    const bool pass = dt < 0.10 && df < 0.10;
    return {pass, fmt("t_opt gap %.1f%%, F_opt gap %.1f%% (tol 10%%)", 100.0 * dt,
                      100.0 * df)};
}

// 6. Metrological gain window for the pinned cavity-decay operating points.
Outcome crit_gain_window() {
    auto peak_gain = [&](double kappa_hz) {
        SystemParams p;
        p.N = 1000000;
        p.alpha = 1e4;
        p.g = two_pi * 11000.0;
        p.kappa = two_pi * kappa_hz;
        double best = -1e9;
        for (int i = 0; i < 60; ++i) {
            const double tau = 1e-9 * std::pow(1e4, i / 59.0);
            const KappaSensitivity s = kappa_sensitivity(p, RES, tau, tau, pi / 2);
            best = std::max(best, metrological_gain_db(s.moments_fixed_phi));
        }
        return best;
    };
    const double g150 = peak_gain(150000.0);
    const double g15 = peak_gain(15000.0);
    const bool pass = g150 >= 10.0 && g150 <= 20.0 && g15 > g150;
    return {pass, fmt("peak gain %.2f dB at 150 kHz (window [10,20]), %.2f dB at 15 kHz",
                      g150, g15)};
}

// 7. Unbalanced readout: the optimal second leg is longer, but worth < 0.5 dB.
Outcome crit_unbalanced_readout() {
    SystemParams p;
    p.N = 1000000;
    p.alpha = 1e4;
    p.g = two_pi * 11000.0;
    p.kappa = two_pi * 150000.0;
    const double t1 = 85e-9;
    auto dbsq = [&](double t2) {
        return kappa_sensitivity(p, RES, t1, t2, pi / 2).moments_fixed_phi;
    };
    const double t2opt = golden_opt(dbsq, 0.2 * t1, 3.0 * t1, false, 1e-5);
    const double gain_bal = metrological_gain_db(dbsq(t1));
    const double gain_opt = metrological_gain_db(dbsq(t2opt));
    const double improvement = gain_opt - gain_bal;
    const bool pass = t2opt > t1 && improvement >= 0.0 && improvement <= 0.5;
    return {pass, fmt("tau2_opt/tau1 = %.3f, improvement %.3f dB (tol (1, +0.5])",
                      t2opt / t1, improvement)};
}

// 8. Closed-form sensitivity optimum vs the cube-root laws, five settings.
Outcome crit_kappa_optimum_laws() {
    struct Set {
        double n, alpha, chi, kappa;
    };
    // all sets keep kappa * t_opt <= 0.025: the cube-root laws come from the
    // short-time expansion and carry O(kappa t_opt) relative error themselves
    const Set sets[] = {{1e4, 50.0, 1.0, 10.0},
                        {1e5, 300.0, 1.0, 50.0},
                        {1e6, 1000.0, 1.0, 100.0},
                        {2000.0, 80.0, 1.0, 5.0},
                        {1e6, 1e4, two_pi * 1.1, two_pi * 15000.0}};
    double worst_t = 0.0, worst_v = 0.0;
    for (const Set& s : sets) {
        SystemParams p;
        p.N = static_cast<std::int64_t>(s.n);
        p.alpha = s.alpha;
        p.g = s.chi * s.alpha;
        p.kappa = s.kappa;
        const double law_t =
            std::cbrt(3.0 / (s.kappa * s.chi * s.chi * s.n * s.alpha * s.alpha));
        const double law_v =
            0.25 * std::cbrt(3.0 * s.kappa * s.kappa /
                             (s.chi * s.chi * s.n * s.alpha * s.alpha));
        auto closed = [&](double t) {
            return kappa_sensitivity(p, RES, t, t, pi / 2).closed_form;
        };
        const double tn = golden_opt(closed, law_t / 10.0, law_t * 10.0, false, 1e-5);
        worst_t = std::max(worst_t, std::abs(tn - law_t) / law_t);
        worst_v = std::max(worst_v, std::abs(closed(tn) - law_v) / law_v);
    }
    const bool pass = worst_t < 0.05 && worst_v < 0.05;
    return {pass, fmt("max t_opt gap %.1f%%, value gap %.1f%% (tol 5%%)",
                      100.0 * worst_t, 100.0 * worst_v)};
}

// 9. Spontaneous-emission optimal time 3 gamma t = 1 and the pinned penalty
//    at the cavity-decay optimal time.
Outcome crit_gamma_optimum() {
    const double gchi = two_pi * 11000.0, gamma = two_pi * 7500.0;
    double worst = 0.0;
    for (double n : {1e2, 1e4, 1e6}) {
        SystemParams p;
        p.N = static_cast<std::int64_t>(n);
        p.alpha = 10.0 * std::sqrt(n);
        p.g = gchi;
        p.gamma = gamma;
        auto dbsq = [&](double t) {
            return gamma_sensitivity(p, RES, t, pi / 2).moments_fixed_phi;
        };
        const double law = 1.0 / (3.0 * gamma);
        const double tn = golden_opt(dbsq, law / 10.0, law * 10.0, false, 1e-5);
        worst = std::max(worst, std::abs(tn - law) / law);
    }

    // penalty factor exp(12 gamma t_opt) at the pinned kappa-optimal time
    const double kappa = two_pi * 150000.0, n6 = 1e6;
    const double t_opt = std::cbrt(3.0 / (kappa * gchi * gchi * n6));
    const double penalty = std::exp(12.0 * gamma * t_opt);
    const bool pass = worst < 0.02 && penalty >= 1.05 && penalty <= 1.07;
    return {pass, fmt("max t_opt gap %.2f%% (tol 2%%), penalty %.4f (window [1.05,1.07])",
                      100.0 * worst, penalty)};
}

// 10. Per-spin spontaneous-emission simulation vs the analytic moment slope.
Outcome crit_tiny_gamma_slope() {
    SystemParams p = make(4, 1.2, 1.0, 0.0, 0.08);
    const double tau = 0.15, h = 5e-3;
    ProtocolConfig c;
    c.tau1 = tau;
    c.tau2 = tau;

    auto sy = [&](double beta) {
        ProtocolConfig cc = c;
        cc.beta = beta;
        return tiny_gamma_protocol(p, cc, 12).s_phi(pi / 2);
    };
    const double slope_sim = (sy(h) - sy(-h)) / (2.0 * h);
    const MomentSet m = gamma_moments(p, RES, tau, 0.0);
    const double slope_an = m.d_s_phi(pi / 2);
    const double gap = std::abs(slope_sim - slope_an) / std::abs(slope_an);
    return {gap < 0.05, fmt("slope gap %.2f%% (tol 5%%)", 100.0 * gap)};
}

// 11. Detection-noise factorization: the pinned 1.25 factor and csc^2 shape.
Outcome crit_detection_noise() {
    const std::int64_t n = 400;
    const SystemParams p = make(n, 5.0, 1.0);
    const double sigma = std::sqrt(static_cast<double>(n)) / 4.0;
    const DetectionNoiseResult d =
        detection_noise_sensitivity(p, RES, 0.05, pi / 2, sigma, NoiseRegime::Ideal);
    if (std::abs(d.noise_factor - 1.25) > 1e-12)
        return {false, fmt("factor %.15f != 1.25", d.noise_factor)};
    const double db = 10.0 * std::log10(d.noise_factor);
    if (db < 0.95 || db > 0.99)
        return {false, fmt("penalty %.3f dB outside [0.95,0.99]", db)};
    // (factor - 1) sin^2(phi) must be flat across angles
    double ref = -1.0, worst = 0.0;
    for (double phi = 0.3; phi < pi - 0.29; phi += 0.2) {
        const DetectionNoiseResult dd =
            detection_noise_sensitivity(p, RES, 0.05, phi, sigma, NoiseRegime::Ideal);
        const double flat = (dd.noise_factor - 1.0) * std::sin(phi) * std::sin(phi);
        if (ref < 0.0) ref = flat;
        worst = std::max(worst, std::abs(flat - ref) / ref);
    }
    return {worst < 1e-12,
            fmt("factor 1.25 exact, penalty %.3f dB, csc^2 flatness %.1e", db, worst)};
}

// 12. Exchange-interaction envelope: the effective model tracks the exact
//     <S_z> dynamics, and the residual shrinks as alpha grows.
Outcome crit_effective_envelope() {
    auto discrepancy = [&](double alpha) {
        const std::int64_t n = 10;
        const int n_max = default_n_max(alpha);
        const Hamiltonian h_tc = build_hamiltonian(TavisCummings{1.0, 0.0}, n, n_max);
        const Hamiltonian h_eff = build_hamiltonian(
            ResonantEffective{1.0, alpha * alpha, true}, n, n_max);
        JointState tc = initial_cat_state(n, n_max, alpha, SpinAxis::minus_z());
        JointState ef = tc;
        double worst = 0.0;
        const double t_max = 1.5;
        const int steps = 200;
        for (int i = 0; i < steps; ++i) {
            evolve_unitary(tc, h_tc, t_max / steps);
            evolve_unitary(ef, h_eff, t_max / steps);
            const double sz_tc = moments_from_state(tc).sz;
            const double sz_ef = moments_from_state(ef).sz;
            worst = std::max(worst, std::abs(sz_tc - sz_ef) / (n / 2.0));
        }
        return worst;
    };
    const double d10 = discrepancy(10.0);
    const double d20 = discrepancy(20.0);
    const double ratio = d20 / d10;
    const bool pass = ratio >= 0.125 && ratio <= 0.5;
    return {pass, fmt("residual %.3e -> %.3e on alpha doubling, ratio %.3f "
                      "(window [0.125,0.5])",
                      d10, d20, ratio)};
}

// 13. The fast property suites all pass, each with >= 100 drawn cases.
Outcome crit_property_suites() {
    std::ostringstream sink;
    const int failures = cli::run_checks(false, sink);
    int passes = 0;
    std::string line;
    std::istringstream is(sink.str());
    while (std::getline(is, line))
        if (line.rfind("[PASS]", 0) == 0) ++passes;
    const bool pass = failures == 0 && passes >= 14;
    return {pass, fmt("%d suites passed, %d failed", passes, failures)};
}

struct Criterion {
    const char* title;
    double budget_s;  // wall-clock cap, pinned
    Outcome (*fn)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"ideal QFI formula vs exact joint-state simulation", 10.0, crit_qfi_vs_simulation},
        {"parity revivals at chi t = pi", 5.0, crit_revivals},
        {"ideal sensitivity closed form vs protocol simulation", 120.0,
         crit_ideal_sensitivity_sim},
        {"lossy spin density vs Lindblad reduced state", 60.0,
         crit_spin_density_vs_lindblad},
        {"lossy QFI optimum: closed/Gaussian vs eigendecomposition", 300.0,
         crit_loss_qfi_optimum},
        {"metrological gain window at the pinned operating points", 30.0,
         crit_gain_window},
        {"unbalanced readout optimum", 30.0, crit_unbalanced_readout},
        {"cavity-decay optimal-time cube-root laws", 30.0, crit_kappa_optimum_laws},
        {"spontaneous-emission optimal time and penalty", 30.0, crit_gamma_optimum},
        {"per-spin emission simulation vs analytic slope", 120.0, crit_tiny_gamma_slope},
        {"detection-noise factorization", 10.0, crit_detection_noise},
        {"effective-model envelope accuracy scaling", 120.0, crit_effective_envelope},
        {"property suites (fast validation path)", 60.0, crit_property_suites},
    };

    int failures = 0;
    int idx = 0;
    for (const Criterion& c : criteria) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > c.budget_s) {
            o.pass = false;
            o.detail += fmt(" [over %.0fs budget]", c.budget_s);
        }
        std::printf("[%s] %02d %s — %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", idx,
                    c.title, o.detail.c_str(), dt);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("acceptance: %d/13 passed\n", 13 - failures);
    return failures == 0 ? 0 : 1;
}
