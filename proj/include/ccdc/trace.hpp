#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace ccdc {

/// Uniformly sampled simulation output. The CSV columns are fixed; the
/// switched simulator additionally fills the bookkeeping vectors used by the
/// energy audit.
struct SimulationTrace {
    double dt = 0.0;
    double t_sw = 0.0;
    std::size_t samples_per_cycle = 0;  // 0 when the time base is not cycle-aligned

    std::vector<double> time;
    std::vector<double> v_ac;         // inverter output voltage
    std::vector<double> i_ac;         // ac link current (sum over stages)
    std::vector<double> i_ls;         // series inductor current of one stage
    std::vector<double> v_out_stage;
    std::vector<double> v_out_total;
    std::vector<double> d1;
    std::vector<double> v_ref;        // closed-loop runs only

    // Switched-model bookkeeping, one entry per sample.
    std::vector<double> v_cs;
    std::vector<double> e_in;       // cumulative source energy [J]
    std::vector<double> e_out;      // cumulative load energy [J]
    std::vector<double> e_stored;   // instantaneous stored energy, all stages [J]

    std::size_t ccm_half_cycles = 0;
    std::size_t ambiguous_commutations = 0;

    std::size_t size() const noexcept { return time.size(); }
    std::size_t full_cycles() const noexcept {
        return samples_per_cycle == 0 || time.empty() ? 0 : (time.size() - 1) / samples_per_cycle;
    }
};

enum class TraceColumn { VAc, IAc, ILs, ILsRectified, VOutStage, VOutTotal, D1, VCs };

/// Mean of a column over switching period `cycle_index` (0-based).
double cycle_average(const SimulationTrace& trace, TraceColumn column, std::size_t cycle_index);

/// First cycle whose averaged v_out_stage and rectified i_ls both moved by
/// less than tol_rel against the previous cycle, and keep doing so for the
/// following `confirm_cycles`. Throws NotSettled.
std::size_t detect_steady_state(const SimulationTrace& trace, double tol_rel = 1e-4,
                                std::size_t confirm_cycles = 5);

struct EnergyAudit {
    double e_in = 0.0;
    double e_out = 0.0;
    double delta_stored = 0.0;
    double imbalance() const noexcept { return e_in - e_out - delta_stored; }
};

EnergyAudit energy_audit(const SimulationTrace& trace, std::size_t cycle_index);

/// Header `time_s,v_ac_v,i_ac_a,i_ls_a,v_out_stage_v,v_out_total_v,d1`, plus
/// `v_ref_v` when the trace carries a reference.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

}  // namespace ccdc
