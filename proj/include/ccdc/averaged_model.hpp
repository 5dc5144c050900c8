#pragma once

#include "ccdc/params.hpp"

namespace ccdc {

/// Which equivalent-duty expression the averaged circuit uses.
enum class DutyModel { Exact, Simplified };

/// Steady state of the per-stage averaged circuit.
struct OperatingPoint {
    double d1 = 0.0;           // commanded duty ratio
    double v_dc = 0.0;         // [V]
    double i_l = 0.0;          // averaged (rectified) inductor current [A]
    double v_out_stage = 0.0;  // filter capacitor voltage [V]
    double i_out = 0.0;        // per-stage load current [A]
    double d_e = 0.0;          // equivalent duty ratio
    double v_out_total = 0.0;  // n_stages * v_out_stage [V]
};

/// x = 4 L_s f_sw i_out / (d1^2 v_dc). The simplified duty ratio is only
/// trustworthy while this stays well below one.
double dcm_load_ratio(double d1, double v_dc, double i_out, const ConverterParams& params);

/// (1 - x) / (1 + x).
double equivalent_duty_exact(double d1, double v_dc, double i_out, const ConverterParams& params);

/// 1 - 2x, the first-order expansion of the exact form.
double equivalent_duty_simplified(double d1, double v_dc, double i_out,
                                  const ConverterParams& params);

double equivalent_duty(DutyModel model, double d1, double v_dc, double i_out,
                       const ConverterParams& params);

/// Fixed point v = d_E(d1, v_dc, v / r_stage) * v_dc of the per-stage
/// averaged circuit. `params.r_l()` may be +inf (no load).
OperatingPoint solve_operating_point(double d1, double v_dc, const ConverterParams& params,
                                     DutyModel model = DutyModel::Exact);

/// Inverse problem: the duty ratio that yields `v_out_total_target`.
OperatingPoint solve_duty_for_target(double v_out_total_target, double v_dc,
                                     const ConverterParams& params,
                                     DutyModel model = DutyModel::Exact);

}  // namespace ccdc
