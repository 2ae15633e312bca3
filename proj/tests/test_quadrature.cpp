#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "levybridge/quadrature.hpp"

using namespace levybridge;

TEST_CASE("gaussian integral over a wide window") {
    const auto r = integrate_adaptive([](double x) { return std::exp(-x * x); }, {-40.0, 0.0, 40.0},
                                      0.0, 1e-12);
    CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-11));
}

TEST_CASE("kinked integrand") {
    // int_{-1}^{1} |x| dx = 1, kink supplied as a breakpoint
    const auto r = integrate_adaptive([](double x) { return std::abs(x); }, {-1.0, 0.0, 1.0});
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("narrow feature inside a huge window is caught via breakpoints") {
    // Laplace self-convolution at x=10 over a deliberately huge window; the
    // integrand has a plateau on [0,10] and exponential shoulders. Without
    // shoulder breakpoints a panel-based rule integrates this to 10/4 e^{-10}
    // and silently drops the tails (the value would come out ~9% low).
    auto f = [](double y) { return 0.25 * std::exp(-std::abs(y) - std::abs(10.0 - y)); };
    const auto r = integrate_adaptive(f, {-4000.0, -30.0, 0.0, 5.0, 10.0, 40.0, 4000.0}, 0.0, 1e-11);
    CHECK(r.value == doctest::Approx(2.75 * std::exp(-10.0)).epsilon(1e-9));
}

TEST_CASE("power tail over a very wide window") {
    const auto r = integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); },
                                      {-1e8, -64.0, -8.0, -1.0, 0.0, 1.0, 8.0, 64.0, 1e8}, 0.0, 1e-10);
    CHECK(r.value == doctest::Approx(M_PI).epsilon(1e-7));
}

TEST_CASE("non-convergent integrand reports the achieved error") {
    // highly oscillatory with a tiny interval budget
    CHECK_THROWS_WITH_AS(
        integrate_adaptive([](double x) { return std::sin(1e7 * x); }, {0.0, 1.0}, 0.0, 1e-14, 8),
        doctest::Contains("achieved error"), std::runtime_error);
}
