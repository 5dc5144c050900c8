#pragma once

#include <Eigen/Dense>

#include "ccdc/averaged_model.hpp"
#include "ccdc/params.hpp"

namespace ccdc {

/// Where a coefficient set came from. The closed forms carry an extra
/// ampere factor in R_P, so the two sources are never mixed silently.
enum class CoefficientSource { AnalyticAsPrinted, NumericOracle };

/// Gains of the linearized dependent sources d_E*I_L (current side) and
/// d_E*V_dc (voltage side) with respect to (I_L, V_dc, d1).
struct SmallSignalCoefficients {
    double d_t = 0.0;  // d(d_E I_L)/dI_L
    double g_t = 0.0;  // d(d_E I_L)/dV_dc [S]
    double i_t = 0.0;  // d(d_E I_L)/dd1 [A]
    double r_p = 0.0;  // d(d_E V_dc)/dI_L [ohm]
    double d_p = 0.0;  // d(d_E V_dc)/dV_dc
    double v_p = 0.0;  // d(d_E V_dc)/dd1 [V]
    CoefficientSource source = CoefficientSource::NumericOracle;
    bool zero_current = false;  // as-printed set evaluated at I_L = 0
};

/// Linear model around an operating point. States (i_L, v_out); inputs d1,
/// v_dc, i_z.
struct StateSpaceModel {
    Eigen::Matrix2d a;
    Eigen::Vector2d b1;  // duty
    Eigen::Vector2d b2;  // source voltage
    Eigen::Vector2d b3;  // load current injection
    Eigen::RowVector2d c;      // selects v_out
    Eigen::RowVector2d d_sel;  // selects i_L
};

/// Closed-form coefficients exactly as printed for the simplified duty ratio.
SmallSignalCoefficients coefficients_analytic(const OperatingPoint& op,
                                              const ConverterParams& params);

/// Central finite differences of the two source functions. `model` selects
/// which d_E is differentiated (the simplified one is the default; the exact
/// one is a reporting aid only).
SmallSignalCoefficients coefficients_numeric(const OperatingPoint& op,
                                             const ConverterParams& params,
                                             double h_rel = 1e-6,
                                             DutyModel model = DutyModel::Simplified);

SmallSignalCoefficients coefficients(CoefficientSource source, const OperatingPoint& op,
                                     const ConverterParams& params);

StateSpaceModel assemble_state_space(const SmallSignalCoefficients& coeffs,
                                     const ConverterParams& params);

const char* to_string(CoefficientSource source);

}  // namespace ccdc
