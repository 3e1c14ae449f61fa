#include "checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "cavitysense/analytic.hpp"
#include "cavitysense/kernels.hpp"
#include "cavitysense/parallel.hpp"
#include "cavitysense/qfi_sum.hpp"
#include "cavitysense/simulator.hpp"

namespace cavitysense::cli {

namespace {

constexpr complexd iu{0.0, 1.0};

double rel_err(double a, double b, double floor_value = 1e-300) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_value});
}

double crel_err(complexd a, complexd b, double floor_value = 1e-300) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_value});
}

std::string fail_case(int i, const char* what, double got, double want) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "case %d: %s (got %.6e, want %.6e)", i, what, got, want);
    return buf;
}

// resonant-variant parameters with a requested χ (χ = g/α)
SystemParams resonant_params(std::int64_t n, double alpha, double chi) {
    SystemParams p;
    p.N = n;
    p.alpha = alpha;
    p.g = chi * alpha;
    return p;
}

CheckResult check_bessel_recurrence() {
    std::mt19937_64 rng(0xB355E101u);
    std::uniform_real_distribution<double> mag(0.1, 30.0), ang(0.0, two_pi);
    std::uniform_int_distribution<int> order(1, 40);
    for (int i = 0; i < 120; ++i) {
        const int n = order(rng);
        const double r = mag(rng), th = ang(rng);
        const complexd z = r * std::exp(iu * th);
        const complexd lhs = bessel_j(n - 1, z) + bessel_j(n + 1, z);
        const complexd rhs = 2.0 * static_cast<double>(n) / z * bessel_j(n, z);
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
        // Each call normalizes its own backward recurrence against a sum whose
        // largest terms grow like e^{|Im z|}, so independently-normalized calls
        // agree only to ~eps·e^{|Im z|}; scale the tolerance accordingly.
        const double tol =
            1e-9 + 3e-12 * std::exp(std::max(0.0, std::abs(z.imag()) - 12.0));
        if (std::abs(lhs - rhs) / scale > tol)
            return {false, fail_case(i, "three-term recurrence", std::abs(lhs - rhs) / scale, 0)};
        if (std::abs(z.imag()) < 1e-12) {
            // Σ normalization on the real axis
            const auto js = bessel_j_array(2 * n + 60, z);
            complexd s = js[0];
            for (int k = 2; k < static_cast<int>(js.size()); k += 2) s += 2.0 * js[k];
            if (std::abs(s - 1.0) > 1e-11)
                return {false, fail_case(i, "normalization sum", std::abs(s - 1.0), 0.0)};
        }
    }
    return {true, "120 cases"};
}

CheckResult check_bessel_reference() {
    // fixed anchors
    if (std::abs(bessel_j(1, complexd{1.0, 0.0}).real() - 0.44005058574493355) > 1e-12)
        return {false, "J_1(1) anchor"};
    // J_2(2i) = i² I_2(2) = −I_2(2)
    const complexd j2 = bessel_j(2, complexd{0.0, 2.0});
    if (std::abs(j2 - complexd{-0.6889484476987382, 0.0}) > 1e-12)
        return {false, "J_2(2i) anchor"};

    std::mt19937_64 rng(0xB355E102u);
    std::uniform_real_distribution<double> xs(0.01, 25.0);
    std::uniform_int_distribution<int> order(0, 30);
    for (int i = 0; i < 120; ++i) {
        const int n = order(rng);
        const double x = xs(rng);
        const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
        const double got = bessel_j(n, complexd{x, 0.0}).real();
        if (std::abs(got - ref) > 1e-10 * std::max(1.0, std::abs(ref)))
            return {false, fail_case(i, "vs std::cyl_bessel_j", got, ref)};
    }
    return {true, "120 cases + 2 anchors"};
}

CheckResult check_jacobi_anger() {
    std::mt19937_64 rng(0xB355E103u);
    std::uniform_real_distribution<double> xs(-25.0, 25.0), th(0.0, two_pi);
    for (int i = 0; i < 120; ++i) {
        const double x = xs(rng), theta = th(rng);
        auto weight = [theta](int n) { return std::exp(iu * (theta * n)); };
        const auto s = jacobi_anger_sum(complexd{x, 0.0}, weight);
        const complexd want = std::exp(iu * (x * std::cos(theta)));
        if (!s.converged) return {false, fail_case(i, "series did not converge", 0, 0)};
        if (std::abs(s.value - want) > 1e-10)
            return {false, fail_case(i, "plane-wave identity", std::abs(s.value - want), 0)};
        const auto s2 = jacobi_anger_sum(complexd{x, 0.0}, weight, 80);
        if (std::abs(s2.value - s.value) > 1e-12)
            return {false, fail_case(i, "margin invariance", std::abs(s2.value - s.value), 0)};
    }
    return {true, "120 cases"};
}

CheckResult check_css_protocol_moments() {
    std::mt19937_64 rng(0xC550001u);
    std::uniform_int_distribution<std::int64_t> ns(1, 300);
    std::uniform_real_distribution<double> as(0.3, 8.0), cts(0.01, 3.0), phis(0.2, pi);
    for (int i = 0; i < 120; ++i) {
        const std::int64_t n = ns(rng);
        const double alpha = as(rng);
        const double chi = 1.0;
        const double tau = cts(rng);
        const double phi = phis(rng);
        const SystemParams p = resonant_params(n, alpha, chi);
        const MomentSet m = ideal_moments(p, ProtocolVariant::Resonant, tau, 0.0);
        const double nd = static_cast<double>(n);
        if (crel_err(m.splus, complexd{nd / 2, 0}, 1e-9) > 1e-9)
            return {false, fail_case(i, "<S+> at beta=0", std::abs(m.splus), nd / 2)};
        if (rel_err(m.spm, nd * (nd + 1) / 4) > 1e-9)
            return {false, fail_case(i, "<S+S->", m.spm, nd * (nd + 1) / 4)};
        if (std::abs(m.sz) > 1e-9 * nd)
            return {false, fail_case(i, "<S_z>", m.sz, 0.0)};
        const double want_var = nd * std::sin(phi) * std::sin(phi) / 4.0;
        if (std::abs(m.s_phi_var(phi) - want_var) > 1e-9 * std::max(1.0, nd))
            return {false, fail_case(i, "Var(S_phi) at beta=0", m.s_phi_var(phi), want_var)};
        // β-slope of ⟨S_y⟩ against the closed form
        const double lc = log_cos_pow(chi * tau / 2, static_cast<double>(n - 1)).value();
        const double want_slope = -2.0 * nd * alpha * std::sin(chi * tau / 2) * lc;
        const double got_slope = m.d_s_phi(pi / 2);
        if (std::abs(got_slope - want_slope) > 1e-8 * std::max(1.0, std::abs(want_slope)))
            return {false, fail_case(i, "beta-slope of <S_y>", got_slope, want_slope)};
    }
    return {true, "120 cases"};
}

CheckResult check_ideal_closed_vs_assembly() {
    std::mt19937_64 rng(0xC550002u);
    std::uniform_int_distribution<std::int64_t> ns(2, 120);
    std::uniform_real_distribution<double> as(0.3, 8.0), cts(0.02, 2.8);
    for (int i = 0; i < 120; ++i) {
        const SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        const double tau = cts(rng);
        const SensitivityResult closed = ideal_sensitivity(p, ProtocolVariant::Resonant, tau);
        if (!std::isfinite(closed.delta_beta_sq)) continue;  // revival divergence
        const MomentSet m = ideal_moments(p, ProtocolVariant::Resonant, tau, 0.0);
        double assembled;
        try {
            assembled = sensitivity_from_moments(m, pi / 2, 0.0);
        } catch (const insensitive_point_error&) {
            continue;
        }
        if (rel_err(closed.delta_beta_sq, assembled) > 1e-8)
            return {false, fail_case(i, "closed vs assembly", assembled, closed.delta_beta_sq)};
        const SensitivityResult fq =
            ideal_sensitivity(p, ProtocolVariant::Resonant, tau, Observable::FieldQuadrature);
        if (fq.delta_beta_sq < 0.25 * (1.0 - 1e-12))
            return {false, fail_case(i, "X-quadrature floor", fq.delta_beta_sq, 0.25)};
    }
    return {true, "120 cases"};
}

CheckResult check_ideal_qfi() {
    std::mt19937_64 rng(0xC550003u);
    std::uniform_int_distribution<std::int64_t> ns(1, 500);
    std::uniform_real_distribution<double> as(0.2, 10.0), cts(0.001, 8.0);
    for (int i = 0; i < 120; ++i) {
        const SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        const double t = cts(rng);
        const QfiResult q = ideal_qfi(p, ProtocolVariant::Resonant, t);
        // cos(χt)^N reaches −1 for odd N, so the instantaneous cap is 4 + 16α²
        // (the 4 + 8α² plateau is the long-time average, not a bound)
        const double cap = 4.0 + 16.0 * p.alpha * p.alpha;
        if (q.value < 4.0 - 1e-9 || q.value > cap * (1.0 + 1e-12))
            return {false, fail_case(i, "QFI range", q.value, cap)};
        // any measurement obeys the Cramér-Rao floor
        const MomentSet m = ideal_moments(p, ProtocolVariant::Resonant, t, 0.0);
        try {
            const double dbsq = sensitivity_from_moments(m, pi / 2, 0.0);
            if (1.0 / dbsq > q.value * (1.0 + 1e-6))
                return {false, fail_case(i, "Cramér-Rao violated", 1.0 / dbsq, q.value)};
        } catch (const insensitive_point_error&) {
        }
    }
    // revivals: χt = πn
    for (std::int64_t n = 1; n <= 3; ++n)
        for (std::int64_t nn = 1; nn <= 8; ++nn) {
            const SystemParams p = resonant_params(nn, 4.0, 1.0);
            const double f = ideal_qfi(p, ProtocolVariant::Resonant, pi * n).value;
            const double want =
                (nn % 2 == 0) ? 4.0 : (n % 2 == 1 ? 4.0 + 16.0 * p.alpha * p.alpha : 4.0);
            if (rel_err(f, want) > 1e-9)
                return {false, fail_case(static_cast<int>(10 * n + nn), "revival", f, want)};
        }
    return {true, "120 cases + 24 revivals"};
}

CheckResult check_kappa_continuity() {
    std::mt19937_64 rng(0xC550004u);
    std::uniform_int_distribution<std::int64_t> ns(1, 120);
    std::uniform_real_distribution<double> as(0.3, 6.0), cts(0.02, 2.0), bs(0.0, 0.5);
    for (int i = 0; i < 100; ++i) {
        SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        const double tau = cts(rng), beta = bs(rng);
        const MomentSet ideal = ideal_moments(p, ProtocolVariant::Resonant, tau, beta);
        p.kappa = 1e-12;
        const MomentSet lossy = kappa_moments(p, ProtocolVariant::Resonant, tau, tau, beta);
        const double nd = static_cast<double>(p.N);
        const double fl = 1e-9 * nd * nd;
        if (crel_err(lossy.splus, ideal.splus, fl) > 1e-6 ||
            crel_err(lossy.splus_sq, ideal.splus_sq, fl) > 1e-6 ||
            rel_err(lossy.spm, ideal.spm, fl) > 1e-6 ||
            crel_err(lossy.d_splus, ideal.d_splus, fl) > 1e-5)
            return {false, fail_case(i, "kappa->0 moment mismatch",
                                     std::abs(lossy.splus - ideal.splus), 0.0)};
        // η at κ = 0 exactly
        const int mm = 1 + static_cast<int>(i % 2);
        const complexd eta = kappa_eta(1.0, 0.0, mm, tau);
        const complexd want = std::exp(-iu * (1.0 * mm * tau)) - 1.0;
        if (std::abs(eta - want) > 1e-13)
            return {false, fail_case(i, "eta at kappa=0", std::abs(eta - want), 0.0)};
    }
    return {true, "100 cases"};
}

// Real-axis J_b with signed order/argument, for the independent gamma oracle.
double signed_bessel(int b, double x) {
    double s = 1.0;
    if (x < 0.0) {
        x = -x;
        if (b % 2 != 0) s = -s;
    }
    if (b < 0) {
        b = -b;
        if (b % 2 != 0) s = -s;
    }
    return s * std::cyl_bessel_j(static_cast<double>(b), x);
}

CheckResult check_gamma_continuity() {
    std::mt19937_64 rng(0xC550005u);
    std::uniform_int_distribution<std::int64_t> ns(1, 120);
    std::uniform_real_distribution<double> as(0.3, 6.0), cts(0.02, 1.5), bs(0.0, 0.5),
        gs(0.0, 0.3);
    for (int i = 0; i < 100; ++i) {
        const ProtocolVariant v = (i % 2 == 0) ? ProtocolVariant::Resonant
                                               : ProtocolVariant::Dispersive;
        SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        if (v == ProtocolVariant::Dispersive) {
            // dispersive χ = 2g²/Δc = 1
            p.g = 100.0;
            p.delta_c = 2.0 * p.g * p.g;
        }
        const double tau = cts(rng), beta = bs(rng);
        p.gamma = gs(rng);
        const bool res = (v == ProtocolVariant::Resonant);
        const double N = static_cast<double>(p.N);
        const double gt = p.gamma * tau;
        const MomentSet gm = gamma_moments(p, v, tau, beta);

        // exact closed forms for the diagonal moments
        const double spm_want =
            N / 2.0 + N * (N - 1.0) / 4.0 * std::exp((res ? -6.0 : -4.0) * gt);
        const double sz_want = res ? 0.0 : N / 2.0 * std::expm1(-4.0 * gt);
        if (rel_err(gm.spm, spm_want) > 1e-12 || std::abs(gm.sz - sz_want) > 1e-12 * N)
            return {false, fail_case(i, "diagonal moments", gm.spm, spm_want)};

        // independent oracle for the off-diagonal sums: explicit b-loop over
        // std::cyl_bessel_j with the same Gaussian + gamma tau^3 weights
        const double ent = p.gamma * N * tau * tau * tau;  // chi = 1
        for (int q = 1; q <= 2; ++q) {
            const double A = (q == 1) ? N / 2.0 : N * (N - 1.0) / 4.0;
            if (A == 0.0) continue;
            const double x = -4.0 * p.alpha * beta * std::sin(q * tau / 2.0);
            const complexd c = std::exp(complexd{0.0, -q * tau}) - 1.0;
            complexd sum = 0.0;
            const int bmax = 25 + static_cast<int>(std::abs(x));
            for (int b = -bmax; b <= bmax; ++b) {
                const double db = b;
                double expo = -db * db * N * tau * tau / 8.0;
                if (res)
                    expo += ent * db * db / 24.0;
                else if (q == 1)
                    expo += ent * (5.0 * db * db + 8.0 * db + 6.0) / 12.0;
                else
                    expo += ent * (5.0 * db * db + 16.0 * db + 24.0) / 12.0;
                sum += std::pow(iu, b) * signed_bessel(b, x) * std::exp(expo);
            }
            const double decay = std::exp((res ? -3.0 : -2.0) * q * gt);
            const complexd want = A * decay * std::exp(beta * beta * c) * sum;
            const complexd got = (q == 1) ? gm.splus : gm.splus_sq;
            if (crel_err(got, want, 1e-9 * N * N) > 1e-8)
                return {false, fail_case(i, "oracle sum mismatch", std::abs(got - want), 0.0)};
        }

        // gamma -> 0 in a collapse-light window reduces to the ideal moments up
        // to the Gaussian-envelope replacement of cos^(N-1), an O(N (chi tau)^4)
        // substitution, so the budget below is approximation error, not noise.
        p.gamma = 0.0;
        const double tau0 = 0.1 / std::sqrt(N);
        const MomentSet ideal = ideal_moments(p, v, tau0, beta);
        const MomentSet g0 = gamma_moments(p, v, tau0, beta);
        if (std::abs(g0.splus - ideal.splus) > 1e-4 * N ||
            std::abs(g0.splus_sq - ideal.splus_sq) > 1e-4 * N * N)
            return {false, fail_case(i, "gamma->0 vs ideal",
                                     std::abs(g0.splus - ideal.splus), 0.0)};
    }
    return {true, "100 cases"};
}

CheckResult check_detection_factorization() {
    std::mt19937_64 rng(0xC550006u);
    std::uniform_int_distribution<std::int64_t> ns(2, 200);
    std::uniform_real_distribution<double> as(0.5, 8.0), cts(0.02, 1.2), phis(0.3, pi - 0.1),
        sigmas(0.0, 5.0);
    for (int i = 0; i < 120; ++i) {
        const SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        const double tau = cts(rng), phi = phis(rng), sigma = sigmas(rng);
        const DetectionNoiseResult d = detection_noise_sensitivity(
            p, ProtocolVariant::Resonant, tau, phi, sigma, NoiseRegime::Ideal);
        const double csc2 = 1.0 / (std::sin(phi) * std::sin(phi));
        const double want_factor = 1.0 + 4.0 * csc2 * sigma * sigma / static_cast<double>(p.N);
        if (rel_err(d.noise_factor, want_factor) > 1e-12)
            return {false, fail_case(i, "noise factor", d.noise_factor, want_factor)};
        if (!std::isfinite(d.delta_beta_sq) || !std::isfinite(d.assembly)) continue;
        if (rel_err(d.delta_beta_sq, d.assembly) > 1e-9)
            return {false, fail_case(i, "closed vs assembly", d.assembly, d.delta_beta_sq)};
    }
    return {true, "120 cases"};
}

CheckResult check_spin_density() {
    std::mt19937_64 rng(0xC550007u);
    std::uniform_int_distribution<std::int64_t> ns(1, 50);
    std::uniform_real_distribution<double> as(0.3, 5.0), cts(0.02, 3.0), ks(0.01, 10.0);
    for (int i = 0; i < 100; ++i) {
        SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        p.kappa = ks(rng);
        const double t = cts(rng);
        const SpinDensityMatrix rho = loss_spin_density(p, ProtocolVariant::Resonant, t);
        if (rho.hermiticity_residual() > 1e-12)
            return {false, fail_case(i, "hermiticity", rho.hermiticity_residual(), 0.0)};
        if (rho.trace_error() > 1e-12)
            return {false, fail_case(i, "trace", rho.trace_error(), 0.0)};
        if (rho.min_eigenvalue() < -1e-10)
            return {false, fail_case(i, "positivity", rho.min_eigenvalue(), 0.0)};
        const complexd f0 = loss_coherence_exponent(1.0, p.kappa, p.alpha, 0.0, t);
        if (std::abs(f0) > 1e-12)
            return {false, fail_case(i, "f(0,t) = 0", std::abs(f0), 0.0)};
    }
    return {true, "100 cases"};
}

CheckResult check_wigner_normalization() {
    std::mt19937_64 rng(0xC550008u);
    std::uniform_int_distribution<std::int64_t> ns(1, 5);
    std::uniform_real_distribution<double> as(0.3, 1.2), cts(0.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        const double t = cts(rng);
        const double h = p.alpha + 4.5;
        const WignerGrid g =
            wigner_ideal_cat(p, ProtocolVariant::Resonant, t, -h, h, -h, h, 0.1);
        if (std::abs(g.integral() - 1.0) > 3e-3)
            return {false, fail_case(i, "Wigner integral", g.integral(), 1.0)};
        const double peak = g.w.cwiseAbs().maxCoeff();
        if (peak > 2.0 / pi + 1e-9)
            return {false, fail_case(i, "phase-space bound 2/pi", peak, 2.0 / pi)};
    }
    return {true, "100 cases"};
}

CheckResult check_parallel_reduction() {
    std::mt19937_64 rng(0xC550009u);
    std::uniform_real_distribution<double> xs(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 5000);
        std::vector<double> data(static_cast<std::size_t>(n));
        for (auto& d : data) d = xs(rng);
        const double a = ordered_sum<double>(n, [&](std::int64_t k) {
            return data[static_cast<std::size_t>(k)];
        });
        const double b = serial_sum<double>(n, [&](std::int64_t k) {
            return data[static_cast<std::size_t>(k)];
        });
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b)))
            return {false, fail_case(i, "ordered vs serial sum", a, b)};

        const int dim = 4 + static_cast<int>(rng() % 24);
        Eigen::VectorXd lam(dim);
        for (int k = 0; k < dim; ++k) lam[k] = std::abs(xs(rng));
        lam /= lam.sum();
        Eigen::MatrixXcd bm(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) bm(r, c) = complexd{xs(rng), xs(rng)};
        bm = (bm + bm.adjoint()).eval();
        const double s1 = qfi_pair_sum(lam, bm);
        const double s2 = qfi_pair_sum_serial(lam, bm);
        if (rel_err(s1, s2, 1e-12) > 1e-12)
            return {false, fail_case(i, "qfi_pair_sum parallel vs serial", s1, s2)};
    }
    return {true, "100 cases"};
}

CheckResult check_dying_cat() {
    std::mt19937_64 rng(0xC55000Au);
    std::uniform_real_distribution<double> amp(-4.0, 4.0), ks(0.01, 3.0), ts(0.01, 3.0);
    for (int i = 0; i < 120; ++i) {
        DyingCatSpec spec;
        spec.alpha1 = complexd{amp(rng), amp(rng)};
        spec.alpha2 = complexd{amp(rng), amp(rng)};
        spec.kappa = ks(rng);
        spec.t = ts(rng);
        const DyingCatResult r = dying_cat_qfi(spec);
        DyingCatSpec spec0 = spec;
        spec0.t = 0.0;
        if (std::abs(dying_cat_qfi(spec0).coherence - complexd{1.0, 0.0}) > 1e-12)
            return {false, fail_case(i, "c(0) = 1", 0, 0)};
        DyingCatSpec spec2 = spec;
        spec2.t = spec.t * 2.0;
        if (std::abs(dying_cat_qfi(spec2).coherence) > std::abs(r.coherence) + 1e-12)
            return {false, fail_case(i, "|c| monotone", std::abs(dying_cat_qfi(spec2).coherence),
                                     std::abs(r.coherence))};
        const double im = std::imag(spec.alpha1 - spec.alpha2);
        if (r.qfi < 4.0 - 1e-12 || r.qfi > 4.0 + 4.0 * im * im + 1e-9)
            return {false, fail_case(i, "QFI window", r.qfi, 4.0 + 4.0 * im * im)};
        const bool flagged = (r.flags & flag::overlap_large) != 0;
        if (flagged != (r.overlap >= 1e-6))
            return {false, fail_case(i, "overlap flag consistency", r.overlap, 1e-6)};
    }
    return {true, "120 cases"};
}

CheckResult check_moment_bounds() {
    std::mt19937_64 rng(0xC55000Bu);
    std::uniform_int_distribution<std::int64_t> ns(1, 150);
    std::uniform_real_distribution<double> as(0.3, 6.0), cts(0.02, 2.0), bs(0.0, 0.8),
        phis(0.2, pi), ks(0.0, 2.0), gs(0.0, 0.2);
    for (int i = 0; i < 120; ++i) {
        SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        const double tau = cts(rng), beta = bs(rng), phi = phis(rng);
        MomentSet m;
        if (i % 3 == 0) {
            m = ideal_moments(p, ProtocolVariant::Resonant, tau, beta);
        } else if (i % 3 == 1) {
            p.kappa = ks(rng);
            m = kappa_moments(p, ProtocolVariant::Resonant, tau, tau, beta);
        } else {
            p.gamma = gs(rng);
            m = gamma_moments(p, ProtocolVariant::Resonant, tau, beta);
        }
        if (!m.within_bounds(p.N))
            return {false, fail_case(i, "moment bounds", std::abs(m.splus), p.N / 2.0)};
        if (m.s_phi_var(phi) < -1e-9 * static_cast<double>(p.N) * static_cast<double>(p.N))
            return {false, fail_case(i, "variance positivity", m.s_phi_var(phi), 0.0)};
    }
    return {true, "120 cases"};
}

// ------------------------------------------------------------ full level ----

CheckResult check_simulator_ideal() {
    std::mt19937_64 rng(0xF0110001u);
    std::uniform_int_distribution<std::int64_t> ns(1, 5);
    std::uniform_real_distribution<double> as(0.4, 1.5), cts(0.05, 1.2), bs(0.0, 0.3);
    for (int i = 0; i < 10; ++i) {
        const SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        ProtocolConfig cfg;
        cfg.variant = ProtocolVariant::Resonant;
        cfg.tau1 = cfg.tau2 = cts(rng);
        cfg.beta = bs(rng);
        const ProtocolRun run = run_protocol(p, cfg, Backend::Unitary);
        const MomentSet want = ideal_moments(p, ProtocolVariant::Resonant, cfg.tau1, cfg.beta);
        const double tol = 1e-8 * static_cast<double>(p.N) * static_cast<double>(p.N);
        if (std::abs(run.moments.splus - want.splus) > tol ||
            std::abs(run.moments.splus_sq - want.splus_sq) > tol ||
            std::abs(run.moments.spm - want.spm) > tol ||
            std::abs(run.moments.sz - want.sz) > tol)
            return {false, fail_case(i, "unitary simulator vs ideal moments",
                                     std::abs(run.moments.splus - want.splus), 0.0)};
    }
    // unequal legs against the κ = 0 moment formulas
    for (int i = 0; i < 4; ++i) {
        const SystemParams p = resonant_params(2 + i, 1.0, 1.0);
        ProtocolConfig cfg;
        cfg.variant = ProtocolVariant::Resonant;
        cfg.tau1 = 0.3 + 0.1 * i;
        cfg.tau2 = 0.2 + 0.15 * i;
        cfg.beta = 0.2;
        const ProtocolRun run = run_protocol(p, cfg, Backend::Unitary);
        const MomentSet want = kappa_moments(p, ProtocolVariant::Resonant, cfg.tau1, cfg.tau2,
                                             cfg.beta);
        if (std::abs(run.moments.splus - want.splus) > 1e-7 ||
            std::abs(run.moments.splus_sq - want.splus_sq) > 1e-7)
            return {false, fail_case(100 + i, "unequal-leg moments",
                                     std::abs(run.moments.splus - want.splus), 0.0)};
    }
    return {true, "10 + 4 cases"};
}

CheckResult check_simulator_kappa() {
    std::mt19937_64 rng(0xF0110002u);
    std::uniform_int_distribution<std::int64_t> ns(1, 4);
    std::uniform_real_distribution<double> as(0.4, 1.2), cts(0.05, 0.4), ks(0.2, 2.0),
        bs(0.0, 0.3);
    for (int i = 0; i < 5; ++i) {
        SystemParams p = resonant_params(ns(rng), as(rng), 1.0);
        p.kappa = ks(rng);
        ProtocolConfig cfg;
        cfg.variant = ProtocolVariant::Resonant;
        cfg.tau1 = cfg.tau2 = cts(rng);
        cfg.beta = bs(rng);
        const ProtocolRun run = run_protocol(p, cfg, Backend::Lindblad, 24);
        const MomentSet want = kappa_moments(p, ProtocolVariant::Resonant, cfg.tau1, cfg.tau2,
                                             cfg.beta);
        if (std::abs(run.moments.splus - want.splus) > 2e-5 ||
            std::abs(run.moments.splus_sq - want.splus_sq) > 2e-5 ||
            std::abs(run.moments.spm - want.spm) > 2e-5)
            return {false, fail_case(i, "Lindblad vs kappa moments",
                                     std::abs(run.moments.splus - want.splus), 0.0)};
    }
    return {true, "5 cases"};
}

CheckResult check_qfi_lowrank() {
    std::mt19937_64 rng(0xF0110003u);
    std::uniform_real_distribution<double> xs(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const int dim = 40;
        const int rank = 1 + static_cast<int>(rng() % 4);
        Eigen::MatrixXcd v(dim, rank);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < rank; ++c) v(r, c) = complexd{xs(rng), xs(rng)};
        Eigen::MatrixXcd rho = v * v.adjoint();
        rho /= rho.trace().real();
        Eigen::MatrixXcd gen(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) gen(r, c) = complexd{xs(rng), xs(rng)};
        gen = (gen + gen.adjoint()).eval();
        const QfiResult full = qfi_mixed(rho, gen, false);
        const QfiResult low = qfi_mixed(rho, gen, true, 1e-12);
        if (rel_err(full.value, low.value, 1e-9) > 1e-8)
            return {false, fail_case(i, "full vs low-rank QFI", low.value, full.value)};
    }
    return {true, "20 cases"};
}

CheckResult check_qfi_large_n() {
    // χα√N/κ = 73 working point: closed-form optimum against the eigensolve
    SystemParams p;
    p.N = 1000;
    p.alpha = 100.0 * std::sqrt(1000.0);
    p.g = p.alpha * 1.0;  // resonant χ = 1
    const double ratio = 73.0;
    p.kappa = 1.0 * p.alpha * std::sqrt(1000.0) / ratio;
    const LossOptimum lo = qfi_loss_optimum(p, ProtocolVariant::Resonant);
    const QfiResult eig =
        qfi_with_loss(p, ProtocolVariant::Resonant, lo.t_opt, QfiMethod::Eigendecomposition);
    if (rel_err(lo.qfi_opt, eig.value) > 0.10)
        return {false, fail_case(0, "closed vs eigen optimum", lo.qfi_opt, eig.value)};
    return {true, "1 case"};
}

}  // namespace

const std::vector<CheckDef>& check_registry() {
    static const std::vector<CheckDef> defs = {
        {"bessel-recurrence", CheckLevel::Fast, check_bessel_recurrence},
        {"bessel-reference", CheckLevel::Fast, check_bessel_reference},
        {"jacobi-anger", CheckLevel::Fast, check_jacobi_anger},
        {"css-protocol-moments", CheckLevel::Fast, check_css_protocol_moments},
        {"ideal-closed-vs-assembly", CheckLevel::Fast, check_ideal_closed_vs_assembly},
        {"ideal-qfi", CheckLevel::Fast, check_ideal_qfi},
        {"kappa-continuity", CheckLevel::Fast, check_kappa_continuity},
        {"gamma-continuity", CheckLevel::Fast, check_gamma_continuity},
        {"detection-factorization", CheckLevel::Fast, check_detection_factorization},
        {"spin-density", CheckLevel::Fast, check_spin_density},
        {"wigner-normalization", CheckLevel::Fast, check_wigner_normalization},
        {"parallel-reduction", CheckLevel::Fast, check_parallel_reduction},
        {"dying-cat", CheckLevel::Fast, check_dying_cat},
        {"moment-bounds", CheckLevel::Fast, check_moment_bounds},
        {"simulator-ideal", CheckLevel::Full, check_simulator_ideal},
        {"simulator-kappa", CheckLevel::Full, check_simulator_kappa},
        {"qfi-lowrank", CheckLevel::Full, check_qfi_lowrank},
        {"qfi-large-n", CheckLevel::Full, check_qfi_large_n},
    };
    return defs;
}

int run_checks(bool full, std::ostream& os) {
    int failures = 0;
    int ran = 0;
    char buf[256];
    for (const CheckDef& def : check_registry()) {
        if (def.level == CheckLevel::Full && !full) continue;
        const auto start = std::chrono::steady_clock::now();
        CheckResult result;
        try {
            result = def.fn();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ++ran;
        if (!result.pass) ++failures;
        std::snprintf(buf, sizeof buf, "[%s] %-28s (%.2fs) %s\n",
                      result.pass ? "PASS" : "FAIL", def.name.c_str(), secs,
                      result.detail.c_str());
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "validate: %d/%d passed (%s)\n", ran - failures, ran,
                  full ? "full" : "fast");
    os << buf;
    return failures;
}

}  // namespace cavitysense::cli
