#include "ccdc/trace.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ccdc/error.hpp"
#include "ccdc/format.hpp"

namespace ccdc {

namespace {

const std::vector<double>& column_data(const SimulationTrace& t, TraceColumn c) {
    switch (c) {
        case TraceColumn::VAc: return t.v_ac;
        case TraceColumn::IAc: return t.i_ac;
        case TraceColumn::ILs:
        case TraceColumn::ILsRectified: return t.i_ls;
        case TraceColumn::VOutStage: return t.v_out_stage;
        case TraceColumn::VOutTotal: return t.v_out_total;
        case TraceColumn::D1: return t.d1;
        case TraceColumn::VCs: return t.v_cs;
    }
    return t.i_ls;
}

void require_cycle(const SimulationTrace& trace, std::size_t cycle_index) {
    if (trace.samples_per_cycle == 0 || cycle_index >= trace.full_cycles()) {
        throw numerical_error("OutOfRange",
                              fmt::format("OutOfRange: cycle {} not contained in trace ({} full cycles)",
                                          cycle_index, trace.full_cycles()));
    }
}

}  // namespace

double cycle_average(const SimulationTrace& trace, TraceColumn column, std::size_t cycle_index) {
    require_cycle(trace, cycle_index);
    const auto& data = column_data(trace, column);
    if (data.size() != trace.size()) {
        throw numerical_error("OutOfRange", "column not recorded in this trace");
    }
    const std::size_t n = trace.samples_per_cycle;
    const std::size_t first = cycle_index * n;
    double sum = 0.0;
    for (std::size_t i = first; i < first + n; ++i) {
        sum += column == TraceColumn::ILsRectified ? std::abs(data[i]) : data[i];
    }
    return sum / static_cast<double>(n);
}

std::size_t detect_steady_state(const SimulationTrace& trace, double tol_rel,
                                 std::size_t confirm_cycles) {
    const std::size_t cycles = trace.full_cycles();
    if (cycles < 10) {
        throw numerical_error("NotSettled", fmt::format("NotSettled: trace spans only {} cycles", cycles));
    }
    auto moved = [&](std::size_t k, TraceColumn c) {
        const double a = cycle_average(trace, c, k - 1);
        const double b = cycle_average(trace, c, k);
        return std::abs(b - a) > tol_rel * std::max(std::abs(a), std::abs(b));
    };
    auto settled_at = [&](std::size_t k) {
        return !moved(k, TraceColumn::VOutStage) && !moved(k, TraceColumn::ILsRectified);
    };
    for (std::size_t k = 1; k + confirm_cycles < cycles; ++k) {
        bool ok = true;
        for (std::size_t j = k; j <= k + confirm_cycles && ok; ++j) ok = settled_at(j);
        if (ok) return k;
    }
    throw numerical_error("NotSettled", "NotSettled: no cycle meets the settling tolerance");
}

EnergyAudit energy_audit(const SimulationTrace& trace, std::size_t cycle_index) {
    require_cycle(trace, cycle_index);
    if (trace.e_in.size() != trace.size()) {
        throw numerical_error("OutOfRange", "trace carries no energy bookkeeping");
    }
    const std::size_t a = cycle_index * trace.samples_per_cycle;
    const std::size_t b = a + trace.samples_per_cycle;
    return {trace.e_in[b] - trace.e_in[a], trace.e_out[b] - trace.e_out[a],
            trace.e_stored[b] - trace.e_stored[a]};
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
    const bool with_ref = trace.v_ref.size() == trace.size() && !trace.v_ref.empty();
    out << "time_s,v_ac_v,i_ac_a,i_ls_a,v_out_stage_v,v_out_total_v,d1";
    out << (with_ref ? ",v_ref_v\n" : "\n");
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << num12(trace.time[i]) << ',' << num12(trace.v_ac[i]) << ',' << num12(trace.i_ac[i])
            << ',' << num12(trace.i_ls[i]) << ',' << num12(trace.v_out_stage[i]) << ','
            << num12(trace.v_out_total[i]) << ',' << num12(trace.d1[i]);
        if (with_ref) out << ',' << num12(trace.v_ref[i]);
        out << '\n';
    }
}

}  // namespace ccdc
