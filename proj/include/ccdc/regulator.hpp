#pragma once

#include <optional>
#include <vector>

#include "ccdc/transfer_function.hpp"

namespace ccdc {

/// G_c(s) = k_p (1 + omega_c / s).
struct PIController {
    double k_p = 0.0;      // duty per volt of per-stage error
    double omega_c = 0.0;  // [rad/s]
};

struct PiDesign {
    PIController controller;
    double gcf_desired = 0.0;  // [rad/s]
    double gcf_actual = 0.0;   // unity-gain frequency of the uncompensated plant [rad/s]
    bool gcf_fallback = false; // plant never reaches 0 dB; omega_o * |G_vd(0)| used instead
};

/// k_p = gcf_desired / gcf_actual, omega_c = omega_o.
PiDesign design_pi(const RationalTransferFunction& gvd, double omega_o, double gcf_desired);

RationalTransferFunction pi_transfer_function(const PIController& pi);
RationalTransferFunction loop_gain(const PIController& pi, const RationalTransferFunction& gvd);

/// G_vv / (1 + G_lg)
RationalTransferFunction closed_loop_audio(const RationalTransferFunction& gvv,
                                           const RationalTransferFunction& lg);
/// G_vi / (1 + G_lg)
RationalTransferFunction closed_loop_output_impedance(const RationalTransferFunction& gvi,
                                                      const RationalTransferFunction& lg);

struct StabilityMargins {
    double crossover_omega = 0.0;   // |lg| = 1
    double phase_margin_deg = 0.0;
    /// Empty when the phase never reaches -180 degrees (infinite margin).
    std::optional<double> gain_margin_db;
    std::optional<double> phase_crossover_omega;
};

StabilityMargins stability_margins(const RationalTransferFunction& lg, double omega_lo = 1e-2,
                                   double omega_hi = 1e12);

/// Zeros of 1 + G_lg, i.e. the roots of den(lg) + num(lg).
std::vector<std::complex<double>> closed_loop_poles(const RationalTransferFunction& lg);

}  // namespace ccdc
