#include "ccdc/averaged_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ccdc/error.hpp"

namespace ccdc {

namespace {

void check_inputs(double d1, double v_dc, double i_out) {
    if (!(d1 > 0.0 && d1 <= 1.0)) {
        throw numerical_error("InvalidDuty", fmt::format("InvalidDuty: d1 = {}", d1));
    }
    if (!(v_dc > 0.0)) {
        throw numerical_error("InvalidSource", fmt::format("InvalidSource: v_dc = {}", v_dc));
    }
    if (i_out < 0.0) {
        throw numerical_error("NegativeLoad", fmt::format("NegativeLoad: i_out = {}", i_out));
    }
}

double ratio_unchecked(double d1, double v_dc, double i_out, const ConverterParams& p) {
    return 4.0 * p.l_s() * p.f_sw() * i_out / (d1 * d1 * v_dc);
}

double duty_unchecked(DutyModel model, double x) {
    return model == DutyModel::Exact ? (1.0 - x) / (1.0 + x) : 1.0 - 2.0 * x;
}

OperatingPoint make_point(double d1, double v_dc, double v, const ConverterParams& p,
                          DutyModel model) {
    const double r_stage = per_stage_load(p);
    const double i = std::isinf(r_stage) ? 0.0 : v / r_stage;
    OperatingPoint op;
    op.d1 = d1;
    op.v_dc = v_dc;
    op.v_out_stage = v;
    op.i_l = i;
    op.i_out = i;
    op.d_e = duty_unchecked(model, ratio_unchecked(d1, v_dc, i, p));
    op.v_out_total = p.n_stages() * v;
    return op;
}

}  // namespace

double dcm_load_ratio(double d1, double v_dc, double i_out, const ConverterParams& params) {
    check_inputs(d1, v_dc, i_out);
    return ratio_unchecked(d1, v_dc, i_out, params);
}

double equivalent_duty_exact(double d1, double v_dc, double i_out, const ConverterParams& params) {
    return duty_unchecked(DutyModel::Exact, dcm_load_ratio(d1, v_dc, i_out, params));
}

double equivalent_duty_simplified(double d1, double v_dc, double i_out,
                                  const ConverterParams& params) {
    return duty_unchecked(DutyModel::Simplified, dcm_load_ratio(d1, v_dc, i_out, params));
}

double equivalent_duty(DutyModel model, double d1, double v_dc, double i_out,
                       const ConverterParams& params) {
    return duty_unchecked(model, dcm_load_ratio(d1, v_dc, i_out, params));
}

OperatingPoint solve_operating_point(double d1, double v_dc, const ConverterParams& params,
                                     DutyModel model) {
    check_inputs(d1, v_dc, 0.0);
    const double r_stage = per_stage_load(params);
    if (std::isinf(r_stage)) return make_point(d1, v_dc, v_dc, params, model);

    // g(v) = v - d_E(v / r_stage) v_dc is strictly increasing, g(0) < 0 and g(v_dc) >= 0.
    const double k = 4.0 * params.l_s() * params.f_sw() / (d1 * d1 * v_dc * r_stage);
    auto g = [&](double v) { return v - duty_unchecked(model, k * v) * v_dc; };
    auto dg = [&](double v) {
        const double x = k * v;
        const double dd = model == DutyModel::Exact ? -2.0 / ((1.0 + x) * (1.0 + x)) : -2.0;
        return 1.0 - dd * k * v_dc;
    };

    double lo = 0.0;
    double hi = v_dc;
    if (!(g(lo) <= 0.0 && g(hi) >= 0.0)) {
        throw numerical_error("NoConvergence", "operating point is not bracketed on [0, v_dc]");
    }
    const double width = 1e-13 * v_dc;
    for (int it = 0; it < 200 && hi - lo > width; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    double v = 0.5 * (lo + hi);
    const double polished = v - g(v) / dg(v);
    if (std::abs(g(polished)) <= std::abs(g(v))) v = polished;

    if (!(std::abs(g(v)) <= 1e-12 * v_dc)) {
        throw numerical_error("NoConvergence",
                              fmt::format("fixed-point residual {} exceeds tolerance", g(v)));
    }
    return make_point(d1, v_dc, v, params, model);
}

OperatingPoint solve_duty_for_target(double v_out_total_target, double v_dc,
                                     const ConverterParams& params, DutyModel model) {
    const double n = params.n_stages();
    if (!(v_out_total_target > 0.0 && v_out_total_target <= n * v_dc)) {
        throw numerical_error("TargetOutOfRange",
                              fmt::format("TargetOutOfRange: {} V not in (0, {}] V",
                                          v_out_total_target, n * v_dc));
    }
    const double v_stage = v_out_total_target / n;
    const double r_stage = per_stage_load(params);
    const double i_out = std::isinf(r_stage) ? 0.0 : v_stage / r_stage;

    if (i_out == 0.0) {
        // Zero load: every duty ratio gives d_E = 1; d1 = 1 by convention.
        if (v_out_total_target != n * v_dc) {
            throw numerical_error("TargetOutOfRange",
                                  "TargetOutOfRange: unloaded output can only equal n_stages * v_dc");
        }
        return solve_operating_point(1.0, v_dc, params, model);
    }
    if (v_out_total_target == n * v_dc) {
        throw numerical_error("TargetOutOfRange",
                              "TargetOutOfRange: loaded output cannot reach n_stages * v_dc");
    }

    const double d_e = v_stage / v_dc;
    const double x = model == DutyModel::Exact ? (1.0 - d_e) / (1.0 + d_e) : (1.0 - d_e) / 2.0;
    const double d1 = std::sqrt(4.0 * params.l_s() * params.f_sw() * i_out / (x * v_dc));
    if (!(d1 <= 1.0)) {
        throw numerical_error("DutyOutOfRange",
                              fmt::format("DutyOutOfRange: target needs d1 = {}", d1));
    }
    OperatingPoint op = solve_operating_point(d1, v_dc, params, model);
    if (std::abs(op.v_out_total - v_out_total_target) > 1e-9 * v_out_total_target) {
        throw numerical_error("NoConvergence", "duty inversion does not reproduce the target");
    }
    return op;
}

}  // namespace ccdc
