#include "ccdc/transfer_function.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "ccdc/error.hpp"
#include "ccdc/format.hpp"

namespace ccdc {

namespace {

constexpr double kPi = std::numbers::pi;

struct Quadratic {
    double k;   // constant term of the normalized characteristic polynomial
    double s1;  // s coefficient
    double s2;  // s^2 coefficient
};

Quadratic characteristic(const ResonantParameters& rp, ClosedForm form) {
    if (form == ClosedForm::Printed) {
        return {1.0, 1.0 / (rp.q_p * rp.omega_p), 1.0 / (rp.omega_p * rp.omega_p)};
    }
    const double k = rp.load_factor;
    return {k, std::sqrt(k) / (rp.q_p * rp.omega_p), 1.0 / (rp.omega_p * rp.omega_p)};
}

}  // namespace

RationalTransferFunction::RationalTransferFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw numerical_error("ZeroDenominator", "transfer function denominator is zero");
    if (num_.is_zero()) {
        den_ = Polynomial{1.0};
        return;
    }
    const int common = std::min(num_.origin_multiplicity(), den_.origin_multiplicity());
    num_ = num_.divide_by_s_power(common);
    den_ = den_.divide_by_s_power(common);
    const double lead = den_[den_.origin_multiplicity()];
    num_ = (1.0 / lead) * num_;
    den_ = (1.0 / lead) * den_;
}

RationalTransferFunction RationalTransferFunction::gain(double k) {
    return {Polynomial{k}, Polynomial{1.0}};
}

double RationalTransferFunction::dc_gain() const {
    if (den_[0] == 0.0) return std::numeric_limits<double>::infinity();
    return num_[0] / den_[0];
}

RationalTransferFunction operator*(const RationalTransferFunction& a,
                                   const RationalTransferFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalTransferFunction operator+(const RationalTransferFunction& a,
                                   const RationalTransferFunction& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalTransferFunction feedback_divide(const RationalTransferFunction& g,
                                         const RationalTransferFunction& loop) {
    // (nG/dG) / (1 + nL/dL) = nG dL / (dG (dL + nL))
    return {g.num() * loop.den(), g.den() * (loop.den() + loop.num())};
}

ResonantParameters resonant_parameters(const SmallSignalCoefficients& coeffs,
                                       const ConverterParams& params) {
    if (!(coeffs.r_p < 0.0)) {
        throw numerical_error("UndampedOperatingPoint",
                              fmt::format("UndampedOperatingPoint: R_P = {} is not negative", coeffs.r_p));
    }
    const double ls = params.l_s();
    const double cf = params.c_f();
    const double r_stage = per_stage_load(params);
    const double lc2 = 2.0 * ls * cf;

    ResonantParameters rp;
    rp.omega_p = std::sqrt(1.0 / lc2);
    rp.load_factor = 1.0 - coeffs.r_p / r_stage;
    rp.q_p = std::sqrt(lc2 * rp.load_factor) /
             (lc2 * (1.0 / (cf * r_stage) - coeffs.r_p / (2.0 * ls)));
    rp.omega_o = rp.q_p * rp.omega_p;
    rp.omega_rz = -coeffs.r_p / (2.0 * ls);
    rp.q_p_approx = std::sqrt(2.0 * ls / cf) / (-coeffs.r_p);
    rp.omega_n = rp.omega_p * std::sqrt(rp.load_factor);
    return rp;
}

RationalTransferFunction gvd_closed_form(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params, ClosedForm form) {
    const auto q = characteristic(resonant_parameters(coeffs, params), form);
    return {Polynomial{coeffs.v_p}, Polynomial{q.k, q.s1, q.s2}};
}

RationalTransferFunction gvd_first_order(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params) {
    const auto rp = resonant_parameters(coeffs, params);
    if (!(rp.q_p < 0.5)) {
        throw numerical_error("PolesNotSeparated",
                              fmt::format("PolesNotSeparated: Q_p = {} >= 0.5", rp.q_p));
    }
    return {Polynomial{coeffs.v_p}, Polynomial{1.0, 1.0 / rp.omega_o}};
}

RationalTransferFunction gvv_closed_form(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params, ClosedForm form) {
    const auto q = characteristic(resonant_parameters(coeffs, params), form);
    return {Polynomial{coeffs.d_p}, Polynomial{q.k, q.s1, q.s2}};
}

RationalTransferFunction gvi_closed_form(const SmallSignalCoefficients& coeffs,
                                         const ConverterParams& params, ClosedForm form) {
    const auto q = characteristic(resonant_parameters(coeffs, params), form);
    // -R_P (1 + s/omega_rz) with -R_P/omega_rz = 2 L_s.
    return {Polynomial{-coeffs.r_p, 2.0 * params.l_s()}, Polynomial{q.k, q.s1, q.s2}};
}

RationalTransferFunction tf_from_state_space(const StateSpaceModel& ssm, PlantInput input) {
    const Eigen::Vector2d& b = input == PlantInput::Duty     ? ssm.b1
                               : input == PlantInput::Source ? ssm.b2
                                                             : ssm.b3;
    const auto& a = ssm.a;
    const auto& c = ssm.c;
    // adj(sI - A) = [[s - a11, a01], [a10, s - a00]]
    const double n0 = c(0) * (-a(1, 1) * b(0) + a(0, 1) * b(1)) +
                      c(1) * (a(1, 0) * b(0) - a(0, 0) * b(1));
    const double n1 = c(0) * b(0) + c(1) * b(1);
    return {Polynomial{n0, n1}, Polynomial{a.determinant(), -a.trace(), 1.0}};
}

std::vector<FrequencyPoint> frequency_response(const RationalTransferFunction& tf,
                                               std::span<const double> omegas) {
    if (omegas.empty()) throw numerical_error("EmptyGrid", "EmptyGrid: no frequencies given");
    std::vector<FrequencyPoint> out;
    out.reserve(omegas.size());
    double prev_phase = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w = omegas[i];
        if (!(w > 0.0) || (i > 0 && !(w > omegas[i - 1]))) {
            throw numerical_error("InvalidGrid", "frequencies must be positive and strictly increasing");
        }
        FrequencyPoint p;
        p.omega = w;
        p.value = tf.at_omega(w);
        p.magnitude_db = 20.0 * std::log10(std::abs(p.value));
        double phase = std::arg(p.value) * 180.0 / kPi;
        if (i > 0) phase -= 360.0 * std::round((phase - prev_phase) / 360.0);
        p.phase_deg = phase;
        prev_phase = phase;
        out.push_back(p);
    }
    return out;
}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> default_bode_grid() {
    return log_space(2.0 * kPi * 10.0, 2.0 * kPi * 10e6, 400);
}

double crossover_frequency(const RationalTransferFunction& tf, double omega_lo, double omega_hi) {
    auto f = [&](double w) { return std::abs(tf.at_omega(w)) - 1.0; };
    const auto decades = std::log10(omega_hi / omega_lo);
    const auto count = static_cast<std::size_t>(std::ceil(decades * 50.0)) + 1;
    const auto grid = log_space(omega_lo, omega_hi, std::max<std::size_t>(count, 2));

    double f_prev = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double f_cur = f(grid[i]);
        const bool crosses = (f_prev > 0.0 && f_cur <= 0.0) || (f_prev < 0.0 && f_cur >= 0.0);
        if (crosses) {
            double lo = grid[i - 1];
            double hi = grid[i];
            const bool falling = f_prev > 0.0;
            while (hi / lo - 1.0 > 1e-10) {
                const double mid = std::sqrt(lo * hi);
                const double fm = f(mid);
                if ((fm > 0.0) == falling) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return std::sqrt(lo * hi);
        }
        f_prev = f_cur;
    }
    throw numerical_error("NoCrossover", "NoCrossover: |tf| - 1 has no sign change on the search grid");
}

void write_bode_csv(std::ostream& out, std::span<const FrequencyPoint> response) {
    out << "freq_hz,magnitude_db,phase_deg\n";
    for (const auto& p : response) {
        out << num12(p.omega / (2.0 * kPi)) << ',' << num12(p.magnitude_db) << ','
            << num12(p.phase_deg) << '\n';
    }
}

}  // namespace ccdc
