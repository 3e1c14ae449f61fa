// Numeric kernels: complex Bessel evaluation, log-domain powers, weighted
// Jacobi–Anger sums and the finite-difference slope helper.  Reference values
// were computed with an independent arbitrary-precision implementation and
// frozen here.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "cavitysense/kernels.hpp"

using namespace cavitysense;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr complexd iu{0.0, 1.0};
}

TEST_CASE("bessel_j frozen anchors", "[kernels]") {
    CHECK_THAT(bessel_j(1, complexd{1.0, 0.0}).real(),
               WithinAbs(0.44005058574493352, 1e-14));
    CHECK_THAT(bessel_j(1, complexd{1.0, 0.0}).imag(), WithinAbs(0.0, 1e-15));

    const complexd j2 = bessel_j(2, complexd{0.0, 2.0});
    CHECK_THAT(j2.real(), WithinAbs(-0.6889484476987382, 1e-13));
    CHECK_THAT(j2.imag(), WithinAbs(0.0, 1e-13));

    const complexd j3 = bessel_j(3, complexd{1.7, -0.4});
    CHECK_THAT(j3.real(), WithinAbs(0.076774803079181077, 1e-13));
    CHECK_THAT(j3.imag(), WithinAbs(-0.053113994336099325, 1e-13));
}

TEST_CASE("bessel order and argument symmetries", "[kernels]") {
    const complexd z{2.3, 0.7};
    for (int n = 0; n <= 6; ++n) {
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(bessel_j(-n, z) - sgn * bessel_j(n, z)) < 1e-12);
        CHECK(std::abs(bessel_j(n, -z) - sgn * bessel_j(n, z)) < 1e-12);
    }
}

TEST_CASE("bessel_j_array matches single evaluations", "[kernels]") {
    const complexd z{4.1, -1.3};
    const auto js = bessel_j_array(12, z);
    REQUIRE(js.size() >= 13);
    for (int n = 0; n <= 12; ++n)
        CHECK(std::abs(js[n] - bessel_j(n, z)) < 1e-12 * std::max(1.0, std::abs(js[n])));
}

TEST_CASE("log_cos_pow", "[kernels]") {
    const LogSigned v = log_cos_pow(0.1, 10.0);
    CHECK(v.sign == 1);
    CHECK_THAT(v.value(), WithinRel(0.95114994667437943, 1e-14));

    // negative base: cos(3) < 0, odd power
    const LogSigned w = log_cos_pow(3.0, 3.0);
    CHECK(w.sign == -1);
    CHECK_THAT(w.value(), WithinRel(std::pow(std::cos(3.0), 3.0), 1e-12));

    // exact zero of the cosine collapses to 0 (log magnitude −infinity)
    const LogSigned z = log_cos_pow(pi / 2, 5.0);
    CHECK(z.value() == 0.0);
}

TEST_CASE("jacobi_anger plane-wave identity", "[kernels]") {
    // Σ_n i^n J_n(x) = e^{ix} (θ = 0 weight)
    const auto s = jacobi_anger_sum(complexd{2.0, 0.0}, [](int) { return complexd{1.0, 0.0}; });
    REQUIRE(s.converged);
    CHECK_THAT(s.value.real(), WithinAbs(-0.41614683654714239, 1e-12));
    CHECK_THAT(s.value.imag(), WithinAbs(0.9092974268256817, 1e-12));

    // x = 0 leaves only the n = 0 term
    const auto s0 = jacobi_anger_sum(complexd{0.0, 0.0}, [](int n) {
        return n == 0 ? complexd{3.5, 0.0} : complexd{100.0, 100.0};
    });
    CHECK(std::abs(s0.value - complexd{3.5, 0.0}) < 1e-14);
}

TEST_CASE("jacobi_anger derivative pair", "[kernels]") {
    // d/dx e^{ix cos θ} = i cos θ e^{ix cos θ}
    const double theta = 0.85, x = 1.9;
    auto weight = [theta](int n) { return std::exp(iu * (theta * n)); };
    const SeriesPair sp = jacobi_anger_sum_with_derivative(complexd{x, 0.0}, weight);
    const complexd f = std::exp(iu * (x * std::cos(theta)));
    CHECK(std::abs(sp.sum.value - f) < 1e-11);
    CHECK(std::abs(sp.dsum_dx.value - iu * std::cos(theta) * f) < 1e-10);
}

TEST_CASE("finite_difference_slope", "[kernels]") {
    const SlopeEstimate s =
        finite_difference_slope([](double x) { return std::sin(3.0 * x); }, 0.2, 1.0);
    CHECK_THAT(s.slope, WithinAbs(3.0 * std::cos(0.6), 1e-9));
    CHECK_FALSE(s.noisy);

    const SlopeEstimate q =
        finite_difference_slope([](double x) { return x * x; }, 1.5, 1.0);
    CHECK_THAT(q.slope, WithinAbs(3.0, 1e-9));
}
