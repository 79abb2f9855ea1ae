#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "thermoline/special.hpp"

using namespace thermoline;

namespace {

// Reference values computed with 40-digit arithmetic.
struct Pin {
    double z;
    double value;
};

constexpr Pin i0_pins[] = {
    {0.0, 1.0},
    {1.0, 1.2660658777520083},
    {2.5, 3.289839144050123},
    {5.0, 27.239871823604447},
    {25.0, 5774560606.4663103},
    {79.5, 1.5060001594235661e33},   // just below the series/asymptotic switch
    {80.0, 2.4751784043341705e33},   // at the switch
    {80.5, 4.0681460218469175e33},   // just above
    {100.0, 1.0737517071310738e42},
    {250.0, 9.4575385598495502e106},
};

constexpr Pin i0_scaled_pins[] = {
    {1.0, 0.4657596075936404},
    {5.0, 0.18354081260932835},
    {25.0, 0.080196773547436708},
    {250.0, 0.025243969387054754},
    {1000.0, 0.012617240455891257},
};

constexpr Pin core_pins[] = {
    {-5.0, -0.72995355838779726},
    {-50.0, -0.91980322645256329},
    {-400.0, -0.97177284005088808},
    {5.0, 39.078445504076508},
    {300.0, 6.3324553194327939e128},
    {700.0, 2.163558803118374e302},
    {1e-6, 5.0000018750005206e-7},
};

}  // namespace

TEST_CASE("bessel_i0 matches high-precision references across both branches") {
    for (const auto& p : i0_pins) {
        CAPTURE(p.z);
        CHECK(special::bessel_i0(p.z) == doctest::Approx(p.value).epsilon(1e-14));
    }
}

TEST_CASE("bessel_i0 is even") {
    for (double z : {0.3, 2.0, 12.0, 90.0}) CHECK(special::bessel_i0(-z) == special::bessel_i0(z));
}

TEST_CASE("bessel_i0_scaled matches references and stays finite for huge arguments") {
    for (const auto& p : i0_scaled_pins) {
        CAPTURE(p.z);
        CHECK(special::bessel_i0_scaled(p.z) == doctest::Approx(p.value).epsilon(1e-14));
    }
    CHECK(std::isfinite(special::bessel_i0_scaled(1e8)));
    CHECK(special::bessel_i0_scaled(1e8) > 0.0);
}

TEST_CASE("scaled and plain versions agree where both are representable") {
    for (double z : {0.5, 3.0, 40.0, 200.0}) {
        CAPTURE(z);
        CHECK(special::bessel_i0_scaled(z) ==
              doctest::Approx(std::exp(-z) * special::bessel_i0(z)).epsilon(1e-12));
    }
}

TEST_CASE("bessel_i0m1 avoids the 1-1 cancellation near zero") {
    // Leading term is z^2/4; a naive I0(z)-1 would return 0 here.
    CHECK(special::bessel_i0m1(1e-8) == doctest::Approx(2.5000000000000001e-17).epsilon(1e-12));
    CHECK(special::bessel_i0m1(0.25) == doctest::Approx(0.015686141223607923).epsilon(1e-14));
    CHECK(special::bessel_i0m1(0.0) == 0.0);
}

TEST_CASE("smoothing_norm_core matches references over the full working range") {
    for (const auto& p : core_pins) {
        CAPTURE(p.z);
        CHECK(special::smoothing_norm_core(p.z) == doctest::Approx(p.value).epsilon(1e-13));
    }
}

TEST_CASE("smoothing_norm_core equals the quadrature it normalizes") {
    // The identity behind the constant: integral_0^1 expm1(a sin^2(pi u)) du
    // equals exp(a/2) I0(a/2) - 1.
    for (double a : {-50.0, -2.5, 0.5, 5.0, 300.0}) {
        CAPTURE(a);
        const double quad = oracle::simpson(
            [a](double u) {
                const double s = std::sin(M_PI * u);
                return std::expm1(a * s * s);
            },
            0.0, 1.0, 100000);
        CHECK(special::smoothing_norm_core(a) == doctest::Approx(quad).epsilon(1e-10));
    }
}

TEST_CASE("series oracle reproduces bessel_i0 on the series side") {
    // Direct summation with long doubles, independent of the implementation.
    for (double z : {0.7, 4.0, 30.0, 75.0}) {
        long double term = 1.0L, sum = 1.0L;
        const long double q = static_cast<long double>(z) * z / 4.0L;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<long double>(k) * k);
            sum += term;
            if (term < 1e-25L * sum) break;
        }
        CAPTURE(z);
        CHECK(special::bessel_i0(z) == doctest::Approx(static_cast<double>(sum)).epsilon(1e-14));
    }
}
