#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <random>

#include "ccdc/polynomial.hpp"

using namespace ccdc;
using Catch::Approx;
using cd = std::complex<double>;

TEST_CASE("trimming and degree", "[polynomial]") {
    CHECK(Polynomial{}.degree() == -1);
    CHECK(Polynomial{0.0, 0.0}.is_zero());
    CHECK(Polynomial{1.0, 2.0, 0.0}.degree() == 1);
    CHECK(Polynomial{0.0, 0.0, 3.0}.origin_multiplicity() == 2);
    CHECK(Polynomial{0.0, 0.0, 3.0}.divide_by_s_power(2) == Polynomial{3.0});
    CHECK_THROWS(Polynomial{1.0, 1.0}.divide_by_s_power(1));
}

TEST_CASE("arithmetic", "[polynomial]") {
    const Polynomial a{1.0, 2.0};       // 1 + 2s
    const Polynomial b{-1.0, 0.0, 1.0};  // s^2 - 1
    CHECK(a * b == Polynomial{-1.0, -2.0, 1.0, 2.0});
    CHECK(a + b == Polynomial{0.0, 2.0, 1.0});
    CHECK(a - a == Polynomial{});
    CHECK(2.0 * a == Polynomial{2.0, 4.0});
    CHECK(a * Polynomial{} == Polynomial{});
}

TEST_CASE("evaluation", "[polynomial]") {
    const Polynomial p{1.0, -3.0, 2.0};
    CHECK(p(cd{2.0, 0.0}) == cd{3.0, 0.0});
    const cd j{0.0, 1.0};
    const cd v = p(j);  // 1 - 3j - 2
    CHECK(v.real() == Approx(-1.0));
    CHECK(v.imag() == Approx(-3.0));
}

TEST_CASE("roots of known factors", "[polynomial]") {
    // (s + 1)(s + 1e4)(s^2 + 2s + 5)
    const auto p = Polynomial{1.0, 1.0} * Polynomial{1e4, 1.0} * Polynomial{5.0, 2.0, 1.0};
    const auto r = p.roots();
    REQUIRE(r.size() == 4);
    CHECK(r[0].real() == Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(r[1] - cd{-1.0, -2.0}) < 1e-9);
    CHECK(std::abs(r[2] - cd{-1.0, 2.0}) < 1e-9);
    CHECK(r[3].real() == Approx(-1e4).epsilon(1e-10));

    const auto o = (Polynomial{0.0, 0.0, 1.0} * Polynomial{3.0, 1.0}).roots();
    REQUIRE(o.size() == 3);
    CHECK(o[0] == cd{0.0, 0.0});
    CHECK(o[1] == cd{0.0, 0.0});
    CHECK(o[2].real() == Approx(-3.0));
}

TEST_CASE("roots are zeros of the polynomial", "[polynomial][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> e(-2, 2);
    for (int k = 0; k < 100; ++k) {
        // Product of real and complex-pair factors spread over four decades.
        Polynomial p{1.0};
        std::vector<cd> expected;
        for (int f = 0; f < 3; ++f) {
            const double scale = std::pow(10.0, e(rng));
            if (u(rng) > 0.0) {
                const double r = scale * u(rng);
                if (r == 0.0) continue;
                p = p * Polynomial{-r, 1.0};
                expected.emplace_back(r, 0.0);
            } else {
                const cd z{scale * u(rng), scale * (0.1 + std::abs(u(rng)))};
                p = p * Polynomial{std::norm(z), -2.0 * z.real(), 1.0};
                expected.push_back(z);
                expected.push_back(std::conj(z));
            }
        }
        const auto r = p.roots();
        REQUIRE(r.size() == expected.size());
        for (const auto& z : expected) {
            const auto best = *std::min_element(r.begin(), r.end(), [&](cd a, cd b) {
                return std::abs(a - z) < std::abs(b - z);
            });
            REQUIRE(std::abs(best - z) <= 1e-6 * std::abs(z));
        }
    }
}
