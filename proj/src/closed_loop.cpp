#include "ccdc/closed_loop.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ccdc/error.hpp"

namespace ccdc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(std::string_view text, std::size_t line_no) {
    double v = 0.0;
    text = trim(text);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw config_error("MalformedNumber",
                           fmt::format("scenario line {}: malformed number '{}'", line_no, text));
    }
    return v;
}

EventKind parse_kind(std::string_view kind, std::size_t line_no) {
    if (kind == "source_step") return EventKind::SourceStep;
    if (kind == "load_step") return EventKind::LoadCurrentStep;
    if (kind == "load_resistance_step") return EventKind::LoadResistanceStep;
    if (kind == "reference_step") return EventKind::ReferenceStep;
    throw config_error("UnknownEventKind",
                       fmt::format("scenario line {}: unknown event kind '{}'", line_no, kind));
}

// Per-stage averaged circuit: state (i_L, v_out, integrator).
using State = std::array<double, 3>;

struct Plant {
    double two_ls;
    double c_f;
    double r_stage;
    double v_dc;
    double v_ref_stage;
    double l_s_f_sw4;  // 4 L_s f_sw
    DutyModel model;

    double duty_equivalent(double d1, double i_l) const {
        const double x = l_s_f_sw4 * i_l / (d1 * d1 * v_dc);
        return model == DutyModel::Exact ? (1.0 - x) / (1.0 + x) : 1.0 - 2.0 * x;
    }
    double load_current(double v) const { return std::isinf(r_stage) ? 0.0 : v / r_stage; }
};

struct Controller {
    double k_p;
    double k_i;  // k_p * omega_c
    double d1_min;

    // Duty command and whether the clamp is active.
    std::pair<double, bool> command(double error, double integrator) const {
        const double u = k_p * error + integrator;
        const double d = std::clamp(u, d1_min, 1.0);
        return {d, d != u};
    }
};

State derivative(const Plant& p, const Controller& c, const State& x) {
    const double error = p.v_ref_stage - x[1];
    const auto [d1, clamped] = c.command(error, x[2]);
    const double d_e = p.duty_equivalent(d1, x[0]);
    return {(d_e * p.v_dc - x[1]) / p.two_ls, (x[0] - p.load_current(x[1])) / p.c_f,
            clamped ? 0.0 : c.k_i * error};
}

// The averaged inductor pole sits near -4 f_sw / d1^2 (the slope of the
// d_E v_dc source in i_L over 2 L_s); at small duty ratios it is far faster
// than any sensible output step. Each RK4 step is split so that |lambda h|
// stays inside the real-axis stability interval.
int stiff_substeps(const Plant& p, double d1, double dt) {
    const double lambda = p.l_s_f_sw4 / (d1 * d1 * p.two_ls) * 2.0 + 1.0 / (p.c_f * p.r_stage);
    const double n = std::ceil(lambda * dt / 2.0);
    if (!(n <= 1e5)) throw numerical_error("Instability", "averaged model too stiff for the duty command");
    return std::max(1, static_cast<int>(n));
}

template <class F>
State rk4_step(const F& f, const State& x, double h) {
    auto axpy = [](const State& a, double k, const State& b) {
        return State{a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]};
    };
    const State k1 = f(x);
    const State k2 = f(axpy(x, 0.5 * h, k1));
    const State k3 = f(axpy(x, 0.5 * h, k2));
    const State k4 = f(axpy(x, h, k3));
    State out;
    for (int i = 0; i < 3; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace

std::vector<ScenarioEvent> parse_scenario(std::string_view text) {
    std::vector<ScenarioEvent> events;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.substr(0, 3) == "t_s") continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos) {
            throw config_error("MalformedScenario",
                               fmt::format("scenario line {}: expected 't_s,kind,value'", line_no));
        }
        ScenarioEvent e;
        e.t = parse_field(line.substr(0, c1), line_no);
        e.kind = parse_kind(trim(line.substr(c1 + 1, c2 - c1 - 1)), line_no);
        e.value = parse_field(line.substr(c2 + 1), line_no);
        if (!events.empty() && !(e.t > events.back().t)) {
            throw config_error("UnorderedEvents",
                               fmt::format("scenario line {}: events must be strictly time-ordered", line_no));
        }
        if (!(e.value > 0.0)) {
            throw config_error("NonPositiveValue",
                               fmt::format("scenario line {}: event value must be positive", line_no));
        }
        events.push_back(e);
    }
    return events;
}

std::vector<ScenarioEvent> load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("ReadFailed", fmt::format("cannot open scenario '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

SimulationTrace simulate_closed_loop(const ConverterParams& params, const PIController& pi,
                                     double v_ref_total, const std::vector<ScenarioEvent>& events,
                                     const ClosedLoopConfig& cfg) {
    if (!(pi.k_p > 0.0 && pi.omega_c > 0.0)) {
        throw numerical_error("InvalidController", "k_p and omega_c must be positive");
    }
    const double t_sw = params.t_sw();
    const double dt = cfg.dt > 0.0 ? cfg.dt : t_sw / 10.0;
    if (dt > t_sw) throw config_error("InvalidConfig", "dt must not exceed t_sw");
    const double rec = cfg.record_interval > 0.0 ? cfg.record_interval : t_sw;
    const long rec_every = std::max(1L, std::lround(rec / dt));
    const long total_steps = std::lround(std::ceil(cfg.t_end / dt - 1e-9));
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (!(events[i].t > events[i - 1].t)) {
            throw config_error("UnorderedEvents", "events must be strictly time-ordered");
        }
    }

    const double n = params.n_stages();
    Plant plant{2.0 * params.l_s(), params.c_f(), per_stage_load(params), params.v_dc(),
                v_ref_total / n,     4.0 * params.l_s() * params.f_sw(),   cfg.model};
    double v_ref = v_ref_total;

    auto apply = [&](const ScenarioEvent& e) {
        switch (e.kind) {
            case EventKind::SourceStep: plant.v_dc = e.value; break;
            case EventKind::LoadCurrentStep: plant.r_stage = v_ref / e.value / n; break;
            case EventKind::LoadResistanceStep: plant.r_stage = e.value / n; break;
            case EventKind::ReferenceStep:
                v_ref = e.value;
                plant.v_ref_stage = v_ref / n;
                break;
        }
        if (!(v_ref < n * plant.v_dc)) {
            throw numerical_error("InvalidReference",
                                  fmt::format("InvalidReference: v_ref = {} V >= n_stages * v_dc = {} V at t = {}",
                                              v_ref, n * plant.v_dc, e.t));
        }
    };

    if (!(v_ref < n * plant.v_dc)) {
        throw numerical_error("InvalidReference",
                              fmt::format("InvalidReference: v_ref = {} V >= n_stages * v_dc", v_ref));
    }
    std::size_t next_event = 0;
    while (next_event < events.size() && events[next_event].t <= 0.0) apply(events[next_event++]);

    const Controller ctl{pi.k_p, pi.k_p * pi.omega_c, cfg.d1_min};
    State x{0.0, 0.0, cfg.d1_min};
    if (cfg.start_at_equilibrium) {
        const auto op = solve_duty_for_target(v_ref, plant.v_dc,
                                              params.with_source(plant.v_dc).with_load(plant.r_stage * n),
                                              cfg.model);
        x = {op.i_l, op.v_out_stage, op.d1};
    }

    const double v_scale = plant.v_ref_stage;
    const double i_scale = std::isinf(plant.r_stage) ? plant.v_dc * t_sw / plant.two_ls
                                                     : plant.v_ref_stage / plant.r_stage;

    SimulationTrace trace;
    trace.dt = rec_every * dt;
    trace.t_sw = t_sw;
    const double per_cycle = t_sw / trace.dt;
    trace.samples_per_cycle =
        std::abs(per_cycle - std::round(per_cycle)) < 1e-9 ? static_cast<std::size_t>(std::lround(per_cycle)) : 0;

    auto record = [&](double t) {
        const double error = plant.v_ref_stage - x[1];
        const double d1 = ctl.command(error, x[2]).first;
        const double d_e = plant.duty_equivalent(d1, x[0]);
        trace.time.push_back(t);
        trace.v_ac.push_back(d_e * plant.v_dc);
        trace.i_ac.push_back(n * d_e * x[0]);
        trace.i_ls.push_back(x[0]);
        trace.v_out_stage.push_back(x[1]);
        trace.v_out_total.push_back(n * x[1]);
        trace.d1.push_back(d1);
        trace.v_ref.push_back(v_ref);
    };

    auto f = [&](const State& s) { return derivative(plant, ctl, s); };
    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (next_event < events.size() && events[next_event].t <= t + 0.5 * dt) {
            apply(events[next_event++]);
        }
        if (k % rec_every == 0) record(t);
        if (k == total_steps) break;
        const double d1_now = ctl.command(plant.v_ref_stage - x[1], x[2]).first;
        const int m = stiff_substeps(plant, d1_now, dt);
        for (int j = 0; j < m; ++j) x = rk4_step(f, x, dt / m);
        const bool finite = std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
        if (!finite || std::abs(x[0]) > 1e3 * i_scale || std::abs(x[1]) > 1e3 * v_scale) {
            throw numerical_error("Instability",
                                  fmt::format("Instability: state left its bounds at t = {}", t + dt));
        }
    }
    return trace;
}

SimulationTrace simulate_closed_loop_switched(const ConverterParams& params, const PIController& pi,
                                              double v_ref_total,
                                              const std::vector<ScenarioEvent>& events,
                                              SwitchedConfig cfg, double d1_min) {
    const double n = params.n_stages();
    double v_dc0 = params.v_dc();
    double r_l0 = params.r_l();
    double v_ref0 = v_ref_total;
    std::size_t first = 0;
    for (; first < events.size() && events[first].t <= 0.0; ++first) {
        const auto& e = events[first];
        if (e.kind == EventKind::SourceStep) v_dc0 = e.value;
        if (e.kind == EventKind::LoadCurrentStep) r_l0 = v_ref0 / e.value;
        if (e.kind == EventKind::LoadResistanceStep) r_l0 = e.value;
        if (e.kind == EventKind::ReferenceStep) v_ref0 = e.value;
    }

    SwitchedInputs in;
    in.v_dc = Schedule(v_dc0);
    in.r_l = Schedule(r_l0);
    Schedule v_ref(v_ref0);
    double v_ref_now = v_ref0;
    for (std::size_t i = first; i < events.size(); ++i) {
        const auto& e = events[i];
        switch (e.kind) {
            case EventKind::SourceStep: in.v_dc.step(e.t, e.value); break;
            case EventKind::LoadCurrentStep: in.r_l.step(e.t, v_ref_now / e.value); break;
            case EventKind::LoadResistanceStep: in.r_l.step(e.t, e.value); break;
            case EventKind::ReferenceStep:
                v_ref_now = e.value;
                v_ref.step(e.t, e.value);
                break;
        }
    }

    const auto op = solve_duty_for_target(v_ref0, v_dc0, params.with_source(v_dc0).with_load(r_l0),
                                          DutyModel::Exact);
    if (!cfg.initial) cfg.initial = state_from_operating_point(op);
    cfg.on_ccm = CcmPolicy::Count;

    double integrator = op.d1;
    const double half_period = 0.5 * params.t_sw();
    const Controller ctl{pi.k_p, pi.k_p * pi.omega_c, d1_min};
    in.controller = [&](double t, const SwitchedState& s) {
        const double error = v_ref.at(t) / n - s.v_cf;
        const auto [d1, clamped] = ctl.command(error, integrator);
        if (!clamped) integrator += ctl.k_i * error * half_period;
        return d1;
    };

    auto trace = simulate_switched(params, in, cfg);
    trace.v_ref.reserve(trace.size());
    for (double t : trace.time) trace.v_ref.push_back(v_ref.at(t));
    return trace;
}

Eigen::Matrix3d closed_loop_state_matrix(const StateSpaceModel& ssm, const PIController& pi) {
    // d1~ = -k_p v~ + integrator, integrator' = -k_p omega_c v~
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    a.topLeftCorner<2, 2>() = ssm.a;
    a.block<2, 1>(0, 1) -= pi.k_p * ssm.b1;
    a.block<2, 1>(0, 2) = ssm.b1;
    a(2, 1) = -pi.k_p * pi.omega_c;
    return a;
}

ConsistencyReport small_signal_consistency(const ConverterParams& params,
                                           const std::optional<PIController>& pi,
                                           const OperatingPoint& op, PerturbedInput input,
                                           double relative_size, double t_end, DutyModel model) {
    if (!(std::abs(relative_size) <= 0.1)) {
        throw numerical_error("PerturbationTooLarge", "perturbation must stay within 10% of the operating value");
    }
    const double dt = params.t_sw() / 50.0;
    const long steps = std::lround(std::ceil(t_end / dt));

    Plant plant{2.0 * params.l_s(), params.c_f(), per_stage_load(params), op.v_dc,
                op.v_out_stage,     4.0 * params.l_s() * params.f_sw(),   model};
    const bool closed = pi.has_value();
    const Controller ctl{closed ? pi->k_p : 0.0, closed ? pi->k_p * pi->omega_c : 0.0, 1e-9};

    // Operating point must be an equilibrium of the chosen duty model.
    {
        const double d_e = plant.duty_equivalent(op.d1, op.i_l);
        const double res_i = std::abs(d_e * op.v_dc - op.v_out_stage) / op.v_dc;
        const double res_v = std::abs(op.i_l - plant.load_current(op.v_out_stage)) /
                             std::max(std::abs(op.i_l), 1e-12);
        if (res_i > 1e-9 || (op.i_l > 0.0 && res_v > 1e-9)) {
            throw numerical_error("NotEquilibrium", "operating point is not an equilibrium of the duty model");
        }
    }

    const auto coeffs = coefficients_numeric(op, params, 1e-6, model);
    const auto ssm = assemble_state_space(coeffs, params);

    double d1_open = op.d1;
    Eigen::Vector2d lin_forcing = Eigen::Vector2d::Zero();
    switch (input) {
        case PerturbedInput::Duty:
            d1_open = op.d1 * (1.0 + relative_size);
            lin_forcing = ssm.b1 * (op.d1 * relative_size);
            break;
        case PerturbedInput::Source:
            plant.v_dc = op.v_dc * (1.0 + relative_size);
            lin_forcing = ssm.b2 * (op.v_dc * relative_size);
            break;
        case PerturbedInput::LoadResistance: {
            const double r0 = plant.r_stage;
            plant.r_stage = r0 * (1.0 + relative_size);
            // v/r perturbation expressed as an equivalent current injection
            // v_op * delta_r / r^2 (to first order).
            lin_forcing = ssm.b3 * (op.v_out_stage * r0 * relative_size / (r0 * r0));
            break;
        }
    }

    // Nonlinear: open loop holds d1 via a saturated-free controller offset.
    auto f_nl = [&](const State& s) {
        if (closed) return derivative(plant, ctl, s);
        const double d_e = plant.duty_equivalent(d1_open, s[0]);
        return State{(d_e * plant.v_dc - s[1]) / plant.two_ls,
                     (s[0] - plant.load_current(s[1])) / plant.c_f, 0.0};
    };
    Eigen::Matrix3d a_lin = Eigen::Matrix3d::Zero();
    if (closed) {
        a_lin = closed_loop_state_matrix(ssm, *pi);
    } else {
        a_lin.topLeftCorner<2, 2>() = ssm.a;
    }
    auto f_lin = [&](const State& s) {
        const Eigen::Vector3d xs(s[0], s[1], s[2]);
        Eigen::Vector3d d = a_lin * xs;
        d.head<2>() += lin_forcing;
        return State{d(0), d(1), d(2)};
    };

    State x_nl{op.i_l, op.v_out_stage, op.d1};
    State x_lin{0.0, 0.0, 0.0};
    ConsistencyReport report;
    for (long k = 0; k < steps; ++k) {
        x_nl = rk4_step(f_nl, x_nl, dt);
        x_lin = rk4_step(f_lin, x_lin, dt);
        const double dv_nl = x_nl[1] - op.v_out_stage;
        report.max_deviation = std::max(report.max_deviation, std::abs(dv_nl - x_lin[1]));
        report.response_amplitude = std::max(report.response_amplitude, std::abs(x_lin[1]));
    }
    return report;
}

}  // namespace ccdc
