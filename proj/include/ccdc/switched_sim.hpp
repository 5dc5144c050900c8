#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ccdc/averaged_model.hpp"
#include "ccdc/params.hpp"
#include "ccdc/trace.hpp"

namespace ccdc {

/// Piecewise-constant signal: `initial` until the first step, then the value
/// of the latest step whose time has been reached.
class Schedule {
public:
    explicit Schedule(double initial) : initial_(initial) {}
    Schedule& step(double t, double value);
    double at(double t) const;
    double initial() const noexcept { return initial_; }

private:
    double initial_;
    std::vector<std::pair<double, double>> steps_;
};

enum class Interval { Charging, Discharging, Idle };

/// State of one rectifier stage. All stages are identical, so a single
/// stage is integrated and ac-link quantities are scaled by n_stages.
struct SwitchedState {
    double i_ls = 0.0;  // loop current, positive out of the inverter's first leg
    double v_cs = 0.0;  // voltage across the series coupling capacitance of the loop
    double v_cf = 0.0;  // filter capacitor voltage
    Interval interval = Interval::Idle;
    double t = 0.0;
};

enum class SwitchedIntegration { PiecewiseExact, Trapezoidal };
enum class CcmPolicy { Fail, Count };

struct SwitchedConfig {
    double t_end = 0.0;
    int steps_per_cycle = 200;
    int record_decimation = 1;  // must divide steps_per_cycle
    SwitchedIntegration integration = SwitchedIntegration::PiecewiseExact;
    CcmPolicy on_ccm = CcmPolicy::Fail;
    double series_resistance = 0.0;  // loop resistance for conditioning experiments [ohm]
    std::optional<SwitchedState> initial;  // cold start when empty
};

/// Called at every half-cycle start with the time and present stage state;
/// returns the duty ratio for that half cycle.
using DutyController = std::function<double(double t, const SwitchedState& state)>;

struct SwitchedInputs {
    Schedule d1{0.0};
    Schedule v_dc{0.0};
    Schedule r_l{0.0};  // total load resistance; +inf for open circuit
    DutyController controller;  // overrides d1 when set
};

/// Inputs that hold d1, v_dc and the load of `params` constant.
SwitchedInputs constant_inputs(const ConverterParams& params, double d1);

/// Stage state matching an averaged operating point (filter charged,
/// no current).
SwitchedState state_from_operating_point(const OperatingPoint& op);

/// Full-bridge square-wave excitation with a centred pulse of width
/// d1*t_sw/2 per half cycle, series L-C loop (2 L_s, C_s/2), ideal diode
/// bridge and the filter capacitor loaded by R_L/N. After the pulse, a
/// flowing current returns to the source through the switch body diodes.
SimulationTrace simulate_switched(const ConverterParams& params, const SwitchedInputs& inputs,
                                  const SwitchedConfig& cfg);

}  // namespace ccdc
