#include "ccdc/regulator.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include <fmt/format.h>

#include "ccdc/error.hpp"

namespace ccdc {

namespace {

double phase_deg(std::complex<double> z) { return std::arg(z) * 180.0 / std::numbers::pi; }

// Principal phase of lg(j w) shifted onto the branch nearest `reference`.
double phase_near(const RationalTransferFunction& lg, double w, double reference) {
    const double p = phase_deg(lg.at_omega(w));
    return p - 360.0 * std::round((p - reference) / 360.0);
}

}  // namespace

PiDesign design_pi(const RationalTransferFunction& gvd, double omega_o, double gcf_desired) {
    if (!(omega_o > 0.0) || !(gcf_desired > 0.0)) {
        throw numerical_error("InvalidDesign", "omega_o and gcf_desired must be positive");
    }
    PiDesign d;
    d.gcf_desired = gcf_desired;
    try {
        d.gcf_actual = crossover_frequency(gvd);
    } catch (const Error& e) {
        const double dc = std::abs(gvd.dc_gain());
        if (e.name() != "NoCrossover" || !(dc < 1.0) || dc == 0.0) throw;
        d.gcf_actual = omega_o * dc;
        d.gcf_fallback = true;
        std::cerr << fmt::format("warning: plant gain stays below 0 dB; using omega_o*|G_vd(0)| = {} rad/s\n",
                                 d.gcf_actual);
    }
    d.controller.k_p = gcf_desired / d.gcf_actual;
    d.controller.omega_c = omega_o;
    return d;
}

RationalTransferFunction pi_transfer_function(const PIController& pi) {
    if (!(pi.k_p > 0.0) || !(pi.omega_c > 0.0)) {
        throw numerical_error("InvalidController", "k_p and omega_c must be positive");
    }
    return {Polynomial{pi.k_p * pi.omega_c, pi.k_p}, Polynomial{0.0, 1.0}};
}

RationalTransferFunction loop_gain(const PIController& pi, const RationalTransferFunction& gvd) {
    return pi_transfer_function(pi) * gvd;
}

RationalTransferFunction closed_loop_audio(const RationalTransferFunction& gvv,
                                           const RationalTransferFunction& lg) {
    return feedback_divide(gvv, lg);
}

RationalTransferFunction closed_loop_output_impedance(const RationalTransferFunction& gvi,
                                                      const RationalTransferFunction& lg) {
    return feedback_divide(gvi, lg);
}

StabilityMargins stability_margins(const RationalTransferFunction& lg, double omega_lo,
                                   double omega_hi) {
    if (lg.num().degree() > lg.den().degree()) {
        throw numerical_error("ImproperLoop", "loop gain must be proper");
    }
    StabilityMargins m;
    m.crossover_omega = crossover_frequency(lg, omega_lo, omega_hi);

    const auto decades = std::log10(omega_hi / omega_lo);
    const auto grid = log_space(omega_lo, omega_hi,
                                static_cast<std::size_t>(std::ceil(decades * 100.0)) + 1);
    const auto response = frequency_response(lg, grid);

    // Phase at the gain crossover, continued from the grid point just below it.
    double ref = response.front().phase_deg;
    for (const auto& p : response) {
        if (p.omega > m.crossover_omega) break;
        ref = p.phase_deg;
    }
    m.phase_margin_deg = 180.0 + phase_near(lg, m.crossover_omega, ref);

    for (std::size_t i = 1; i < response.size(); ++i) {
        const double a = response[i - 1].phase_deg + 180.0;
        const double b = response[i].phase_deg + 180.0;
        if (!((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0))) continue;
        double lo = response[i - 1].omega;
        double hi = response[i].omega;
        double phase_lo = response[i - 1].phase_deg;
        const bool falling = a > 0.0;
        while (hi / lo - 1.0 > 1e-12) {
            const double mid = std::sqrt(lo * hi);
            const double pm = phase_near(lg, mid, phase_lo);
            if ((pm + 180.0 > 0.0) == falling) {
                lo = mid;
                phase_lo = pm;
            } else {
                hi = mid;
            }
        }
        const double w180 = std::sqrt(lo * hi);
        m.phase_crossover_omega = w180;
        m.gain_margin_db = -20.0 * std::log10(std::abs(lg.at_omega(w180)));
        break;
    }
    return m;
}

std::vector<std::complex<double>> closed_loop_poles(const RationalTransferFunction& lg) {
    return (lg.den() + lg.num()).roots();
}

}  // namespace ccdc
