#include <doctest.h>

#include <cmath>

#include "logsob/quadrature.hpp"

using namespace logsob;

TEST_CASE("polynomials and smooth integrals") {
    CHECK(quad::integrate_value([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(quad::integrate_value([](double x) { return std::sin(x); }, 0.0, kPi) ==
          doctest::Approx(2.0).epsilon(1e-10));
    // half-Gaussian over a wide window
    const double v = quad::integrate_value([](double x) { return std::exp(-x * x); }, 0.0, 20.0);
    CHECK(v == doctest::Approx(std::sqrt(kPi) / 2.0).epsilon(1e-8));
}

TEST_CASE("kinked integrands still converge") {
    const double v = quad::integrate_value([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0);
    CHECK(v == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-8));
}

TEST_CASE("empty interval and budget errors") {
    CHECK(quad::integrate_value([](double x) { return x; }, 2.0, 2.0) == 0.0);
    quad::Options opt;
    opt.max_evaluations = 40;
    opt.rel_tol = 1e-14;
    CHECK_THROWS_AS(quad::integrate([](double x) { return std::sin(100.0 * x * x); }, 0.0, 30.0, opt),
                    numerical_error);
}
