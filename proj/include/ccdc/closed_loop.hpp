#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ccdc/averaged_model.hpp"
#include "ccdc/regulator.hpp"
#include "ccdc/small_signal.hpp"
#include "ccdc/switched_sim.hpp"
#include "ccdc/trace.hpp"

namespace ccdc {

enum class EventKind {
    SourceStep,          // new v_dc [V]
    LoadCurrentStep,     // new total load current at the reference voltage [A]
    LoadResistanceStep,  // new total load resistance [ohm]
    ReferenceStep,       // new total output reference [V]
};

struct ScenarioEvent {
    double t = 0.0;
    EventKind kind = EventKind::SourceStep;
    double value = 0.0;
};

/// CSV text with header `t_s,kind,value`; kinds source_step, load_step
/// (current), load_resistance_step, reference_step. `#` starts a comment.
std::vector<ScenarioEvent> parse_scenario(std::string_view text);
std::vector<ScenarioEvent> load_scenario(const std::string& path);

struct ClosedLoopConfig {
    double t_end = 50e-3;
    double dt = 0.0;               // 0 selects t_sw / 10; split internally when stiff
    double record_interval = 0.0;  // 0 selects t_sw
    DutyModel model = DutyModel::Simplified;
    double d1_min = 0.02;
    bool start_at_equilibrium = true;  // otherwise filter and inductor start discharged
};

/// Per-stage averaged circuit with the nonlinear equivalent duty ratio under
/// PI control of the per-stage output error. Events at t <= 0 set the initial
/// conditions. Throws Instability or InvalidReference.
SimulationTrace simulate_closed_loop(const ConverterParams& params, const PIController& pi,
                                     double v_ref_total, const std::vector<ScenarioEvent>& events,
                                     const ClosedLoopConfig& cfg = {});

/// Same regulator driving the switched simulator, sampled once per half
/// cycle. The run starts from the exact-model operating point for the
/// reference; CCM half cycles are counted rather than fatal.
SimulationTrace simulate_closed_loop_switched(const ConverterParams& params, const PIController& pi,
                                              double v_ref_total,
                                              const std::vector<ScenarioEvent>& events,
                                              SwitchedConfig cfg, double d1_min = 0.02);

/// Linearized closed loop, states (i_L, v_out, integrator).
Eigen::Matrix3d closed_loop_state_matrix(const StateSpaceModel& ssm, const PIController& pi);

enum class PerturbedInput { Duty, Source, LoadResistance };

struct ConsistencyReport {
    double max_deviation = 0.0;       // max |nonlinear - linear| in v_out_stage [V]
    double response_amplitude = 0.0;  // max |linear response| [V]
    double relative_deviation() const noexcept {
        return response_amplitude > 0.0 ? max_deviation / response_amplitude : 0.0;
    }
};

/// Steps one input by `relative_size` of its operating value and compares
/// the nonlinear averaged response with the linear state-space response
/// built from the numeric coefficients of the same duty model. `op` must be
/// an equilibrium of that model. Open loop when `pi` is empty.
ConsistencyReport small_signal_consistency(const ConverterParams& params,
                                           const std::optional<PIController>& pi,
                                           const OperatingPoint& op, PerturbedInput input,
                                           double relative_size, double t_end = 1e-3,
                                           DutyModel model = DutyModel::Simplified);

}  // namespace ccdc
