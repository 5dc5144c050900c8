#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "ccdc/averaged_model.hpp"
#include "ccdc/error.hpp"
#include "ccdc/params.hpp"
#include "ccdc/small_signal.hpp"
#include "ccdc/transfer_function.hpp"

using namespace ccdc;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// c (sI - A)^-1 b by a dense complex solve.
cd resolvent(const StateSpaceModel& m, const Eigen::Vector2d& b, double omega) {
    const Eigen::Matrix2cd sia = cd{0.0, omega} * Eigen::Matrix2cd::Identity() - m.a.cast<cd>();
    const Eigen::Vector2cd x = sia.partialPivLu().solve(b.cast<cd>());
    return m.c.cast<cd>() * x;
}

double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

std::string error_name(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.name();
    }
    return "";
}

OperatingPoint anchor(const ConverterParams& p) {
    return solve_duty_for_target(176.0, 15.0, p, DutyModel::Simplified);
}

}  // namespace

TEST_CASE("normalization", "[tf]") {
    const RationalTransferFunction g{Polynomial{0.0, 4.0}, Polynomial{0.0, 2.0, 2.0}};
    CHECK(g.num() == Polynomial{2.0});
    CHECK(g.den() == Polynomial{1.0, 1.0});
    CHECK(g.dc_gain() == 2.0);
    const RationalTransferFunction i{Polynomial{3.0}, Polynomial{0.0, 2.0}};
    CHECK(std::isinf(i.dc_gain()));
    CHECK(i.den() == Polynomial{0.0, 1.0});
    CHECK(RationalTransferFunction(Polynomial{}, Polynomial{0.0, 5.0}).den() == Polynomial{1.0});
    CHECK(error_name([] { RationalTransferFunction(Polynomial{1.0}, Polynomial{}); }) == "ZeroDenominator");
}

TEST_CASE("frequency response points", "[tf]") {
    const double grid[] = {1.0, 10.0, 1e3};
    for (const auto& pt : frequency_response(RationalTransferFunction::gain(5.0), grid)) {
        CHECK(pt.magnitude_db == Approx(13.979400086720377));
        CHECK(pt.phase_deg == 0.0);
    }
    const RationalTransferFunction lp{Polynomial{1.0}, Polynomial{1.0, 1e-3}};
    const double w0[] = {1000.0};
    const auto r = frequency_response(lp, w0);
    CHECK(r[0].magnitude_db == Approx(-3.010299956639812));
    CHECK(r[0].phase_deg == Approx(-45.0));

    const double bad[] = {10.0, 5.0};
    CHECK(error_name([&] { frequency_response(lp, bad); }) == "InvalidGrid");
    CHECK(error_name([&] { frequency_response(lp, std::span<const double>{}); }) == "EmptyGrid");
}

TEST_CASE("phase is unwrapped along the sweep", "[tf]") {
    // Four real poles: -360 degrees at high frequency.
    const auto den = Polynomial{1.0, 1.0} * Polynomial{1.0, 1.0} * Polynomial{1.0, 1.0} * Polynomial{1.0, 1.0};
    const auto grid = log_space(1e-2, 1e3, 500);
    const auto r = frequency_response({Polynomial{1.0}, den}, grid);
    CHECK(r.back().phase_deg == Approx(-360.0).margin(0.5));
    for (std::size_t i = 1; i < r.size(); ++i) REQUIRE(r[i].phase_deg <= r[i - 1].phase_deg + 1e-9);
}

TEST_CASE("crossover search", "[tf]") {
    const RationalTransferFunction g{Polynomial{10.0}, Polynomial{1.0, 1e-3}};
    CHECK(crossover_frequency(g) == Approx(1000.0 * std::sqrt(99.0)).epsilon(1e-9));
    CHECK(error_name([] { crossover_frequency(RationalTransferFunction({Polynomial{0.5}, Polynomial{1.0, 1.0}})); }) ==
          "NoCrossover");
    // Unity dc gain never strictly crosses.
    CHECK(error_name([] { crossover_frequency(RationalTransferFunction({Polynomial{1.0}, Polynomial{1.0, 1e-3}})); }) ==
          "NoCrossover");
}

TEST_CASE("log grid", "[tf]") {
    const auto g = default_bode_grid();
    REQUIRE(g.size() == 400);
    CHECK(g.front() == Approx(kTwoPi * 10.0));
    CHECK(g.back() == Approx(kTwoPi * 10e6));
    for (std::size_t i = 2; i < g.size(); ++i) {
        REQUIRE(g[i] / g[i - 1] == Approx(g[1] / g[0]).epsilon(1e-9));
    }
}

TEST_CASE("resonant parameters at the prototype", "[tf]") {
    const auto p = prototype_params();
    const auto c = coefficients_numeric(anchor(p), p);
    const auto rp = resonant_parameters(c, p);
    CHECK(rp.omega_p / kTwoPi == Approx(1.0 / (kTwoPi * std::sqrt(2.0 * 230e-9 * 10e-6))).epsilon(1e-12));
    CHECK(rp.omega_p / kTwoPi == Approx(74206.4).epsilon(1e-5));
    CHECK(rp.omega_o == Approx(rp.q_p * rp.omega_p));
    CHECK(rp.omega_rz == Approx(-c.r_p / (2.0 * p.l_s())));
    CHECK(rp.load_factor == Approx(1.0 - c.r_p / 11.25));
    CHECK(rp.q_p < 0.5);

    SmallSignalCoefficients undamped;
    undamped.r_p = 0.0;
    CHECK(error_name([&] { resonant_parameters(undamped, p); }) == "UndampedOperatingPoint");
}

TEST_CASE("quality factor limit as R_P vanishes", "[tf]") {
    const auto p = prototype_params();
    SmallSignalCoefficients c;
    c.r_p = -1e-12;
    const auto rp = resonant_parameters(c, p);
    // R_P = 0: Q_p = sqrt(2 L C) / (2 L C / (C R)) = R sqrt(C / (2 L))
    CHECK(rp.q_p == Approx(11.25 * std::sqrt(10e-6 / (2.0 * 230e-9))).epsilon(1e-9));
}

TEST_CASE("closed forms match the resolvent", "[tf][oracle][property]") {
    const auto p = prototype_params();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> target(60.0, 220.0), loads(40.0, 600.0);
    const auto grid = log_space(kTwoPi * 10.0, kTwoPi * 10e6, 200);
    for (int k = 0; k < 40; ++k) {
        const auto q = p.with_load(loads(rng));
        const auto op = solve_operating_point(0.15 + 0.8 * (k % 10) / 10.0, 15.0, q, DutyModel::Simplified);
        for (auto src : {CoefficientSource::AnalyticAsPrinted, CoefficientSource::NumericOracle}) {
            const auto c = coefficients(src, op, q);
            const auto m = assemble_state_space(c, q);
            const auto gvd = gvd_closed_form(c, q);
            const auto gvv = gvv_closed_form(c, q);
            const auto gvi = gvi_closed_form(c, q);
            for (double w : grid) {
                REQUIRE(rel(gvd.at_omega(w), resolvent(m, m.b1, w)) <= 1e-9);
                REQUIRE(rel(gvv.at_omega(w), resolvent(m, m.b2, w)) <= 1e-9);
                REQUIRE(rel(gvi.at_omega(w), resolvent(m, m.b3, w)) <= 1e-9);
                REQUIRE(rel(tf_from_state_space(m, PlantInput::Duty).at_omega(w), resolvent(m, m.b1, w)) <= 1e-9);
            }
            REQUIRE(gvd.den() == gvv.den());
            REQUIRE(gvd.den() == gvi.den());
        }
    }
}

TEST_CASE("printed closed forms drop the load factor", "[tf]") {
    const auto p = prototype_params();
    const auto c = coefficients_numeric(anchor(p), p);
    const auto rp = resonant_parameters(c, p);
    const auto printed = gvd_closed_form(c, p, ClosedForm::Printed);
    const auto exact = gvd_closed_form(c, p, ClosedForm::Exact);

    // s = 0 gives V_P; at j omega_p the quadratic and unity terms cancel.
    CHECK(printed.dc_gain() == Approx(c.v_p).epsilon(1e-12));
    CHECK(std::abs(printed.at_omega(rp.omega_p)) == Approx(c.v_p * rp.q_p).epsilon(1e-12));
    CHECK(std::arg(printed.at_omega(rp.omega_p)) * 180.0 / std::numbers::pi == Approx(-90.0).epsilon(1e-12));

    // The state-space denominator normalized to a unit constant term carries
    // 1/k on the s^2 coefficient and 1/sqrt(k) on the s coefficient.
    const auto ss = tf_from_state_space(assemble_state_space(c, p), PlantInput::Duty);
    const double k = rp.load_factor;
    CHECK(ss.den()[0] == 1.0);
    CHECK(ss.den()[1] == Approx(1.0 / (std::sqrt(k) * rp.q_p * rp.omega_p)).epsilon(1e-12));
    CHECK(ss.den()[2] == Approx(1.0 / (k * rp.omega_p * rp.omega_p)).epsilon(1e-12));
    CHECK(exact.dc_gain() == Approx(c.v_p / k).epsilon(1e-12));
    CHECK(std::arg(exact.at_omega(rp.omega_n)) * 180.0 / std::numbers::pi == Approx(-90.0).epsilon(1e-12));
    CHECK(k > 1.3);
}

TEST_CASE("dc values and zeros", "[tf]") {
    const auto p = prototype_params();
    const auto c = coefficients_numeric(anchor(p), p);
    for (auto form : {ClosedForm::Printed, ClosedForm::Exact}) {
        const auto gvd = gvd_closed_form(c, p, form);
        const auto gvv = gvv_closed_form(c, p, form);
        const auto gvi = gvi_closed_form(c, p, form);
        const double k = form == ClosedForm::Exact ? resonant_parameters(c, p).load_factor : 1.0;
        CHECK(gvd.dc_gain() * k == Approx(c.v_p));
        CHECK(gvv.dc_gain() * k == Approx(c.d_p));
        CHECK(gvi.dc_gain() * k == Approx(-c.r_p));
        CHECK(gvd.zeros().empty());
        CHECK(gvv.zeros().empty());
        const auto z = gvi.zeros();
        REQUIRE(z.size() == 1);
        CHECK(z[0].real() == Approx(-resonant_parameters(c, p).omega_rz).epsilon(1e-12));
        CHECK(z[0].imag() == 0.0);
    }
    CHECK(gvv_closed_form(c, p, ClosedForm::Printed).dc_gain() == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("output impedance becomes the filter capacitor", "[tf]") {
    const auto p = prototype_params();
    const auto c = coefficients_numeric(anchor(p), p);
    const auto gvi = gvi_closed_form(c, p);
    const double w = 1e10;
    CHECK(std::abs(gvi.at_omega(w)) == Approx(1.0 / (w * p.c_f())).epsilon(1e-4));
}

TEST_CASE("first-order approximation", "[tf]") {
    const auto p = prototype_params();
    const auto c = coefficients_numeric(anchor(p), p);
    const auto rp = resonant_parameters(c, p);
    const auto fo = gvd_first_order(c, p);
    const auto quad = gvd_closed_form(c, p, ClosedForm::Printed);
    CHECK(fo.dc_gain() == Approx(c.v_p));
    for (double w : log_space(1.0, 0.3 * rp.omega_o, 100)) {
        REQUIRE(rel(fo.at_omega(w), quad.at_omega(w)) <= 3.0 * rp.q_p * rp.q_p);
    }

    // Poles of the printed quadratic: omega_p (1 +- sqrt(1 - 4 Q^2)) / (2 Q),
    // approaching omega_p Q and omega_p / Q as Q shrinks.
    const auto poles = quad.poles();
    REQUIRE(poles.size() == 2);
    const double d = std::sqrt(1.0 - 4.0 * rp.q_p * rp.q_p);
    CHECK(-poles[0].real() == Approx(rp.omega_p * (1.0 - d) / (2.0 * rp.q_p)).epsilon(1e-9));
    CHECK(-poles[1].real() == Approx(rp.omega_p * (1.0 + d) / (2.0 * rp.q_p)).epsilon(1e-9));
    CHECK(poles[1].real() / poles[0].real() == Approx(1.0 / (rp.q_p * rp.q_p)).epsilon(0.05));

    SmallSignalCoefficients under;
    under.r_p = -0.01;
    under.v_p = 1.0;
    CHECK(error_name([&] { gvd_first_order(under, p.with_load(1e5)); }) == "PolesNotSeparated");
}

TEST_CASE("symbolic resolvent edge cases", "[tf]") {
    StateSpaceModel m;
    m.a << -1.0, 0.0, 0.0, -2.0;
    m.b1 << 1.0, 0.0;
    m.b2 = m.b3 = m.b1;
    m.c << 0.0, 1.0;
    m.d_sel << 1.0, 0.0;
    CHECK(tf_from_state_space(m, PlantInput::Duty).num().is_zero());

    const auto p = prototype_params().with_load(std::numeric_limits<double>::infinity());
    SmallSignalCoefficients lossless;
    lossless.r_p = 0.0;
    lossless.v_p = 1.0;
    const auto tf = tf_from_state_space(assemble_state_space(lossless, p), PlantInput::Duty);
    const double w2 = 1.0 / (2.0 * p.l_s() * p.c_f());
    CHECK(tf.den()[1] == 0.0);
    CHECK(tf.den()[2] == Approx(1.0 / w2));
}

TEST_CASE("bode csv", "[tf]") {
    const double grid[] = {kTwoPi * 10.0, kTwoPi * 100.0};
    std::ostringstream s;
    write_bode_csv(s, frequency_response(RationalTransferFunction::gain(1.0), grid));
    CHECK(s.str() == "freq_hz,magnitude_db,phase_deg\n10,0,0\n100,0,0\n");
}
