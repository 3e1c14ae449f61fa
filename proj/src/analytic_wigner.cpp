// analytic_wigner.cpp — Wigner function of generalized coherent-state cats.
#include <cmath>

#include "cavitysense/analytic.hpp"
#include "cavitysense/parallel.hpp"

namespace cavitysense {

namespace {
// W for the dyad |a⟩⟨b| at phase-space point ζ (normalized so that the
// diagonal case integrates to 1 with measure d²ζ):
//   W_ab(ζ) = (2/π) e^{ζ̄a − ζā} e^{−|b|²/2 − |2ζ−a|²/2 + b̄(2ζ−a)}
complexd wigner_dyad(complexd zeta, complexd a, complexd b) {
    const complexd u = 2.0 * zeta - a;
    const complexd expo = std::conj(zeta) * a - zeta * std::conj(a) -
                          0.5 * std::norm(b) - 0.5 * std::norm(u) + std::conj(b) * u;
    return (2.0 / pi) * std::exp(expo);
}

complexd coherent_overlap(complexd a, complexd b) {  // ⟨a|b⟩
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}
}  // namespace

double WignerGrid::integral() const { return w.sum() * cell_area; }

WignerGrid wigner_cat(const std::vector<complexd>& amplitudes,
                      const std::vector<complexd>& weights,
                      double re_min, double re_max, double im_min, double im_max,
                      double step) {
    if (amplitudes.size() != weights.size())
        throw config_error("wigner_cat: amplitudes/weights size mismatch");
    if (amplitudes.empty() || amplitudes.size() > 1000)
        throw config_error("wigner_cat: need between 1 and 1000 components");
    // degenerate ranges (min == max) are legal single-point probes
    if (!(step > 0.0) || !(re_max >= re_min) || !(im_max >= im_min))
        throw config_error("wigner_cat: malformed grid");

    const std::size_t nc = amplitudes.size();
    complexd norm2{};
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t k = 0; k < nc; ++k)
            norm2 += weights[j] * std::conj(weights[k]) * coherent_overlap(amplitudes[k], amplitudes[j]);
    if (!(norm2.real() > 0.0))
        throw numeric_error("wigner_cat: state norm is not positive");
    const double inv_norm = 1.0 / norm2.real();

    WignerGrid g;
    g.re_min = re_min; g.re_max = re_max; g.im_min = im_min; g.im_max = im_max;
    g.step = step;
    g.nx = static_cast<Eigen::Index>(std::floor((re_max - re_min) / step)) + 1;
    g.ny = static_cast<Eigen::Index>(std::floor((im_max - im_min) / step)) + 1;
    g.cell_area = step * step;
    g.w.resize(g.ny, g.nx);
    if (step > 0.125)  // coarser than a quarter of the vacuum width 1/2
        g.flags |= flag::truncation_warning;

    // rows are independent — parallelize across them, each row fully serial
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (Eigen::Index iy = 0; iy < g.ny; ++iy) {
        for (Eigen::Index ix = 0; ix < g.nx; ++ix) {
            const complexd zeta{re_min + static_cast<double>(ix) * step,
                                im_min + static_cast<double>(iy) * step};
            complexd acc{};
            for (std::size_t j = 0; j < nc; ++j)
                for (std::size_t k = 0; k < nc; ++k)
                    acc += weights[j] * std::conj(weights[k]) *
                           wigner_dyad(zeta, amplitudes[j], amplitudes[k]);
            g.w(iy, ix) = acc.real() * inv_norm;  // imaginary parts cancel pairwise
        }
    }
    return g;
}

WignerGrid wigner_ideal_cat(const SystemParams& p, ProtocolVariant v, double t,
                            double re_min, double re_max, double im_min, double im_max,
                            double step) {
    p.validate();
    if (p.N + 1 > 1000)
        throw config_error("wigner_ideal_cat: N+1 components exceed the 1000-component cap");
    const double chi = p.chi(v);
    const SpinCoefficients c = coherent_spin_state(p.N);
    std::vector<complexd> amps(static_cast<std::size_t>(p.N) + 1);
    std::vector<complexd> wts(static_cast<std::size_t>(p.N) + 1);
    for (std::int64_t k = 0; k <= p.N; ++k) {
        const double m = static_cast<double>(k) - static_cast<double>(p.N) / 2.0;
        amps[static_cast<std::size_t>(k)] = p.alpha * std::exp(complexd{0.0, -chi * m * t});
        wts[static_cast<std::size_t>(k)] = c.value(k);
    }
    return wigner_cat(amps, wts, re_min, re_max, im_min, im_max, step);
}

}  // namespace cavitysense
