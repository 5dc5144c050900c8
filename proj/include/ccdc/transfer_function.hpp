#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "ccdc/polynomial.hpp"
#include "ccdc/small_signal.hpp"

namespace ccdc {

/// num(s) / den(s) with real coefficients. After construction the lowest
/// non-zero denominator coefficient is 1 and common factors of s are
/// cancelled; nothing else is ever cancelled.
class RationalTransferFunction {
public:
    RationalTransferFunction(Polynomial num, Polynomial den);
    /// Constant gain.
    static RationalTransferFunction gain(double k);

    const Polynomial& num() const noexcept { return num_; }
    const Polynomial& den() const noexcept { return den_; }

    std::complex<double> operator()(std::complex<double> s) const { return num_(s) / den_(s); }
    std::complex<double> at_omega(double omega) const { return (*this)({0.0, omega}); }
    /// num[0]/den[0]; infinite when the denominator has a root at the origin.
    double dc_gain() const;

    std::vector<std::complex<double>> poles() const { return den_.roots(); }
    std::vector<std::complex<double>> zeros() const { return num_.roots(); }

    friend RationalTransferFunction operator*(const RationalTransferFunction& a,
                                              const RationalTransferFunction& b);
    friend RationalTransferFunction operator+(const RationalTransferFunction& a,
                                              const RationalTransferFunction& b);

private:
    Polynomial num_;
    Polynomial den_;
};

/// g / (1 + loop), formed with common-denominator algebra.
RationalTransferFunction feedback_divide(const RationalTransferFunction& g,
                                         const RationalTransferFunction& loop);

struct ResonantParameters {
    double omega_p = 0.0;   // 1/sqrt(2 L_s C_f) [rad/s]
    double q_p = 0.0;       // full expression, including the load term
    double omega_o = 0.0;   // q_p * omega_p [rad/s]
    double omega_rz = 0.0;  // -R_P / (2 L_s) [rad/s]
    double q_p_approx = 0.0;    // sqrt(2 L_s / C_f) / (-R_P), diagnostic only
    double load_factor = 1.0;   // 1 - R_P / (R_L / N)
    double omega_n = 0.0;       // omega_p * sqrt(load_factor): natural frequency of det(sI - A)
};

/// Exact: the characteristic polynomial keeps the 1 - R_P/(R_L/N) load term
/// and matches C (sI - A)^-1 B identically. Printed: the load term is
/// dropped (valid while -R_P is small against R_L/N).
enum class ClosedForm { Exact, Printed };

ResonantParameters resonant_parameters(const SmallSignalCoefficients& coeffs,
                                       const ConverterParams& params);

RationalTransferFunction gvd_closed_form(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params,
                                         ClosedForm form = ClosedForm::Exact);
/// V_P / (1 + s/omega_o); throws PolesNotSeparated for q_p >= 0.5.
RationalTransferFunction gvd_first_order(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params);
RationalTransferFunction gvv_closed_form(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params,
                                         ClosedForm form = ClosedForm::Exact);
RationalTransferFunction gvi_closed_form(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params,
                                         ClosedForm form = ClosedForm::Exact);

enum class PlantInput { Duty, Source, LoadCurrent };

/// C (sI - A)^-1 B for the selected input, from the symbolic 2x2 resolvent.
RationalTransferFunction tf_from_state_space(const StateSpaceModel& ssm, PlantInput input);

struct FrequencyPoint {
    double omega = 0.0;
    std::complex<double> value;
    double magnitude_db = 0.0;
    double phase_deg = 0.0;  // unwrapped along the sweep
};

std::vector<FrequencyPoint> frequency_response(const RationalTransferFunction& tf,
                                               std::span<const double> omegas);

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t count);
/// 400 points, 10 Hz to 10 MHz, in rad/s.
std::vector<double> default_bode_grid();

/// Lowest omega in [lo, hi] with |tf(j omega)| = 1, located by log-bisection
/// on a sign change of |tf| - 1. Throws NoCrossover.
double crossover_frequency(const RationalTransferFunction& tf, double omega_lo = 1e-2,
                           double omega_hi = 1e12);

/// Header `freq_hz,magnitude_db,phase_deg`.
void write_bode_csv(std::ostream& out, std::span<const FrequencyPoint> response);

}  // namespace ccdc
