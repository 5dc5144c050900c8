#include "ccdc/small_signal.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ccdc/error.hpp"

namespace ccdc {

namespace {

// d_E without input validation: the difference stencil may step slightly
// outside the physical domain (e.g. I_L < 0 at no load).
double raw_duty(DutyModel model, double i_l, double v_dc, double d1, const ConverterParams& p) {
    const double x = 4.0 * p.l_s() * p.f_sw() * i_l / (d1 * d1 * v_dc);
    return model == DutyModel::Exact ? (1.0 - x) / (1.0 + x) : 1.0 - 2.0 * x;
}

double step_for(double x, double h_rel) {
    const double h = h_rel * std::max(std::abs(x), 1.0);
    if (x + h == x || x - h == x) {
        throw numerical_error("StepTooSmall",
                              fmt::format("StepTooSmall: h = {} vanishes against {}", h, x));
    }
    return h;
}

}  // namespace

SmallSignalCoefficients coefficients_analytic(const OperatingPoint& op,
                                              const ConverterParams& params) {
    const double ls = params.l_s();
    const double t = params.t_sw();
    const double il = op.i_l;
    const double d1 = op.d1;
    const double v = op.v_dc;

    SmallSignalCoefficients c;
    c.d_t = 1.0 - 16.0 * ls * il / (d1 * d1 * v * t);
    c.g_t = 8.0 * ls * il * il / (d1 * d1 * v * v * t);
    c.i_t = 16.0 * ls * il * il / (d1 * d1 * d1 * v * t);
    c.r_p = -16.0 * ls * il / (d1 * d1 * t);
    c.d_p = 1.0;
    c.v_p = 16.0 * ls * il / (d1 * d1 * d1 * t);
    c.source = CoefficientSource::AnalyticAsPrinted;
    c.zero_current = il == 0.0;
    return c;
}

SmallSignalCoefficients coefficients_numeric(const OperatingPoint& op,
                                             const ConverterParams& params, double h_rel,
                                             DutyModel model) {
    if (!(h_rel > 0.0 && h_rel <= 1e-3)) {
        throw numerical_error("StepTooSmall", fmt::format("h_rel = {} outside (0, 1e-3]", h_rel));
    }
    const double il = op.i_l;
    const double v = op.v_dc;
    const double d1 = op.d1;

    auto f_i = [&](double i, double vd, double d) { return raw_duty(model, i, vd, d, params) * i; };
    auto f_v = [&](double i, double vd, double d) { return raw_duty(model, i, vd, d, params) * vd; };

    const double hi = step_for(il, h_rel);
    const double hv = step_for(v, h_rel);
    const double hd = step_for(d1, h_rel);

    SmallSignalCoefficients c;
    c.d_t = (f_i(il + hi, v, d1) - f_i(il - hi, v, d1)) / (2.0 * hi);
    c.g_t = (f_i(il, v + hv, d1) - f_i(il, v - hv, d1)) / (2.0 * hv);
    c.i_t = (f_i(il, v, d1 + hd) - f_i(il, v, d1 - hd)) / (2.0 * hd);
    c.r_p = (f_v(il + hi, v, d1) - f_v(il - hi, v, d1)) / (2.0 * hi);
    c.d_p = (f_v(il, v + hv, d1) - f_v(il, v - hv, d1)) / (2.0 * hv);
    c.v_p = (f_v(il, v, d1 + hd) - f_v(il, v, d1 - hd)) / (2.0 * hd);
    c.source = CoefficientSource::NumericOracle;
    return c;
}

SmallSignalCoefficients coefficients(CoefficientSource source, const OperatingPoint& op,
                                     const ConverterParams& params) {
    return source == CoefficientSource::AnalyticAsPrinted ? coefficients_analytic(op, params)
                                                          : coefficients_numeric(op, params);
}

StateSpaceModel assemble_state_space(const SmallSignalCoefficients& k,
                                     const ConverterParams& params) {
    const double two_ls = 2.0 * params.l_s();
    const double cf = params.c_f();
    const double r_stage = per_stage_load(params);

    StateSpaceModel m;
    m.a << k.r_p / two_ls, -1.0 / two_ls,
           1.0 / cf,       -1.0 / (cf * r_stage);
    m.b1 << k.v_p / two_ls, 0.0;
    m.b2 << k.d_p / two_ls, 0.0;
    m.b3 << 0.0, 1.0 / cf;
    m.c << 0.0, 1.0;
    m.d_sel << 1.0, 0.0;
    return m;
}

const char* to_string(CoefficientSource source) {
    return source == CoefficientSource::AnalyticAsPrinted ? "printed" : "oracle";
}

}  // namespace ccdc
