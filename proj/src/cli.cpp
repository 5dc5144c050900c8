#include "ccdc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ccdc/averaged_model.hpp"
#include "ccdc/closed_loop.hpp"
#include "ccdc/error.hpp"
#include "ccdc/format.hpp"
#include "ccdc/params.hpp"
#include "ccdc/regulator.hpp"
#include "ccdc/small_signal.hpp"
#include "ccdc/switched_sim.hpp"
#include "ccdc/transfer_function.hpp"

namespace ccdc {

namespace {

namespace fs = std::filesystem;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Options {
    std::string config_path;
    std::string output_dir = ".";
    bool force = false;
    std::optional<double> d1;
    std::optional<double> vref;
    double gcf_hz = 1000.0;
    std::string coeff_source = "oracle";
    std::optional<std::string> model;
    std::string scenario_path;
    std::optional<double> t_end;
    int steps_per_cycle = 200;
    int decimation = 1;
    bool switched = false;
};

/// Files are staged in memory and written only after every target has been
/// checked, so a refused overwrite leaves the output directory untouched.
class OutputSet {
public:
    void add(std::string name, std::string content) {
        files_.emplace_back(std::move(name), std::move(content));
    }

    void commit(const Options& opt, std::ostream& out) const {
        const fs::path dir(opt.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw io_error("WriteFailed",
                           fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
        }
        for (const auto& [name, content] : files_) {
            if (!opt.force && fs::exists(dir / name)) {
                throw io_error("OutputExists",
                               fmt::format("'{}' exists; pass --force to overwrite", (dir / name).string()));
            }
        }
        for (const auto& [name, content] : files_) {
            std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
            f << content;
            if (!f) throw io_error("WriteFailed", fmt::format("cannot write '{}'", (dir / name).string()));
            out << "wrote " << (dir / name).string() << '\n';
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

DutyModel parse_model(const std::optional<std::string>& text, DutyModel fallback) {
    if (!text) return fallback;
    if (*text == "exact") return DutyModel::Exact;
    if (*text == "simplified") return DutyModel::Simplified;
    throw config_error("InvalidOption", fmt::format("--model must be exact or simplified, got '{}'", *text));
}

CoefficientSource parse_source(const std::string& text) {
    if (text == "printed") return CoefficientSource::AnalyticAsPrinted;
    if (text == "oracle") return CoefficientSource::NumericOracle;
    throw config_error("InvalidOption", fmt::format("--coeff-source must be printed or oracle, got '{}'", text));
}

const char* to_string(DutyModel m) { return m == DutyModel::Exact ? "exact" : "simplified"; }

constexpr double kDefaultVref = 176.0;

OperatingPoint operating_point(const ConverterParams& p, const Options& opt, DutyModel model) {
    if (opt.d1 && opt.vref) throw config_error("InvalidOption", "--d1 and --vref are mutually exclusive");
    if (opt.d1) return solve_operating_point(*opt.d1, p.v_dc(), p, model);
    return solve_duty_for_target(opt.vref.value_or(kDefaultVref), p.v_dc(), p, model);
}

std::string operating_point_text(const OperatingPoint& op, DutyModel model) {
    std::string s;
    s += fmt::format("model = {}\n", to_string(model));
    s += fmt::format("d1 = {}\n", num12(op.d1));
    s += fmt::format("v_dc = {}\n", num12(op.v_dc));
    s += fmt::format("i_l = {}\n", num12(op.i_l));
    s += fmt::format("v_out_stage = {}\n", num12(op.v_out_stage));
    s += fmt::format("i_out = {}\n", num12(op.i_out));
    s += fmt::format("d_e = {}\n", num12(op.d_e));
    s += fmt::format("v_out_total = {}\n", num12(op.v_out_total));
    return s;
}

std::string coefficients_text(const SmallSignalCoefficients& c) {
    const std::string p = to_string(c.source);
    std::string s;
    s += fmt::format("{}.d_t = {}\n", p, num12(c.d_t));
    s += fmt::format("{}.g_t = {}\n", p, num12(c.g_t));
    s += fmt::format("{}.i_t = {}\n", p, num12(c.i_t));
    s += fmt::format("{}.r_p = {}\n", p, num12(c.r_p));
    s += fmt::format("{}.d_p = {}\n", p, num12(c.d_p));
    s += fmt::format("{}.v_p = {}\n", p, num12(c.v_p));
    return s;
}

std::string bode_csv(const RationalTransferFunction& tf) {
    const auto grid = default_bode_grid();
    const auto response = frequency_response(tf, grid);
    std::ostringstream s;
    write_bode_csv(s, response);
    return s.str();
}

std::string margins_text(const StabilityMargins& m) {
    std::string s;
    s += fmt::format("loop_crossover_hz = {}\n", num12(m.crossover_omega / kTwoPi));
    s += fmt::format("phase_margin_deg = {}\n", num12(m.phase_margin_deg));
    s += fmt::format("gain_margin_db = {}\n", m.gain_margin_db ? num12(*m.gain_margin_db) : "infinite");
    s += fmt::format("phase_crossover_hz = {}\n",
                     m.phase_crossover_omega ? num12(*m.phase_crossover_omega / kTwoPi) : "none");
    return s;
}

struct Design {
    OperatingPoint op;
    SmallSignalCoefficients coeffs;
    ResonantParameters resonant;
    RationalTransferFunction gvd;
    RationalTransferFunction gvv;
    RationalTransferFunction gvi;
    PiDesign pi;
};

Design make_design(const ConverterParams& p, const OperatingPoint& op, CoefficientSource source,
                   double gcf_hz) {
    const auto c = coefficients(source, op, p);
    const auto rp = resonant_parameters(c, p);
    auto gvd = gvd_closed_form(c, p);
    auto pi = design_pi(gvd, rp.omega_o, kTwoPi * gcf_hz);
    return {op, c, rp, std::move(gvd), gvv_closed_form(c, p), gvi_closed_form(c, p), pi};
}

void cmd_steady(const ConverterParams& p, const Options& opt, OutputSet& files, std::ostream& out) {
    const auto model = parse_model(opt.model, DutyModel::Exact);
    const auto op = operating_point(p, opt, model);
    const double x = dcm_load_ratio(op.d1, op.v_dc, op.i_out, p);
    std::string text = operating_point_text(op, model);
    text += fmt::format("dcm_load_ratio = {}\n", num12(x));
    files.add("operating_point.txt", text);
    out << text;
}

void cmd_linearize(const ConverterParams& p, const Options& opt, OutputSet& files, std::ostream& out) {
    const auto model = parse_model(opt.model, DutyModel::Simplified);
    const auto op = operating_point(p, opt, model);
    const auto printed = coefficients_analytic(op, p);
    const auto oracle = coefficients_numeric(op, p);
    const auto selected = parse_source(opt.coeff_source) == CoefficientSource::AnalyticAsPrinted ? printed : oracle;
    const auto ssm = assemble_state_space(selected, p);

    std::string text = operating_point_text(op, model);
    text += coefficients_text(printed);
    text += coefficients_text(oracle);
    text += fmt::format("r_p_printed_over_oracle = {}\n", num12(printed.r_p / oracle.r_p));
    text += fmt::format("state_space.source = {}\n", to_string(selected.source));
    text += fmt::format("a = [[{}, {}], [{}, {}]]\n", num12(ssm.a(0, 0)), num12(ssm.a(0, 1)),
                        num12(ssm.a(1, 0)), num12(ssm.a(1, 1)));
    text += fmt::format("b1 = [{}, {}]\n", num12(ssm.b1(0)), num12(ssm.b1(1)));
    text += fmt::format("b2 = [{}, {}]\n", num12(ssm.b2(0)), num12(ssm.b2(1)));
    text += fmt::format("b3 = [{}, {}]\n", num12(ssm.b3(0)), num12(ssm.b3(1)));
    text += "c = [0, 1]\nd = [1, 0]\n";
    files.add("linearization.txt", text);
    out << text;
}

void cmd_bode(const ConverterParams& p, const Options& opt, OutputSet& files, std::ostream& out) {
    const auto model = parse_model(opt.model, DutyModel::Simplified);
    const auto op = operating_point(p, opt, model);
    const auto c = coefficients(parse_source(opt.coeff_source), op, p);
    const auto rp = resonant_parameters(c, p);
    files.add("gvd.csv", bode_csv(gvd_closed_form(c, p)));
    files.add("gvv.csv", bode_csv(gvv_closed_form(c, p)));
    files.add("gvi.csv", bode_csv(gvi_closed_form(c, p)));
    if (rp.q_p < 0.5) {
        files.add("gvd_first_order.csv", bode_csv(gvd_first_order(c, p)));
    } else {
        out << "note: Q_p >= 0.5, first-order G_vd not written\n";
    }
    out << fmt::format("omega_p/2pi = {} Hz, Q_p = {}, omega_o/2pi = {} Hz, omega_rz/2pi = {} Hz\n",
                       num12(rp.omega_p / kTwoPi), num12(rp.q_p), num12(rp.omega_o / kTwoPi),
                       num12(rp.omega_rz / kTwoPi));
}

void cmd_design_pi(const ConverterParams& p, const Options& opt, OutputSet& files, std::ostream& out) {
    const auto model = parse_model(opt.model, DutyModel::Simplified);
    const auto op = operating_point(p, opt, model);
    const auto d = make_design(p, op, parse_source(opt.coeff_source), opt.gcf_hz);
    const auto gc = pi_transfer_function(d.pi.controller);
    const auto lg = loop_gain(d.pi.controller, d.gvd);
    const auto margins = stability_margins(lg);

    std::string text = operating_point_text(op, model);
    text += fmt::format("coeff_source = {}\n", to_string(d.coeffs.source));
    text += fmt::format("k_p = {}\n", num12(d.pi.controller.k_p));
    text += fmt::format("omega_c = {}\n", num12(d.pi.controller.omega_c));
    text += fmt::format("omega_c_hz = {}\n", num12(d.pi.controller.omega_c / kTwoPi));
    text += fmt::format("gcf_desired_hz = {}\n", num12(d.pi.gcf_desired / kTwoPi));
    text += fmt::format("gcf_actual_hz = {}\n", num12(d.pi.gcf_actual / kTwoPi));
    text += fmt::format("gcf_actual_fallback = {}\n", d.pi.gcf_fallback ? "true" : "false");
    text += margins_text(margins);
    files.add("controller.txt", text);
    files.add("gc.csv", bode_csv(gc));
    files.add("glg.csv", bode_csv(lg));
    files.add("gvvc.csv", bode_csv(closed_loop_audio(d.gvv, lg)));
    files.add("gvic.csv", bode_csv(closed_loop_output_impedance(d.gvi, lg)));
    out << text;
}

std::string trace_csv(const SimulationTrace& t) {
    std::ostringstream s;
    write_trace_csv(s, t);
    return s.str();
}

void cmd_sim_switched(const ConverterParams& p, const Options& opt, OutputSet& files, std::ostream& out) {
    const auto model = parse_model(opt.model, DutyModel::Exact);
    const auto op = operating_point(p, opt, model);
    SwitchedConfig cfg;
    cfg.t_end = opt.t_end.value_or(20e-3);
    cfg.steps_per_cycle = opt.steps_per_cycle;
    cfg.record_decimation = opt.decimation;
    auto inputs = constant_inputs(p, op.d1);
    if (!opt.scenario_path.empty()) {
        for (const auto& e : load_scenario(opt.scenario_path)) {
            switch (e.kind) {
                case EventKind::SourceStep: inputs.v_dc.step(e.t, e.value); break;
                case EventKind::LoadCurrentStep: inputs.r_l.step(e.t, op.v_out_total / e.value); break;
                case EventKind::LoadResistanceStep: inputs.r_l.step(e.t, e.value); break;
                case EventKind::ReferenceStep:
                    throw config_error("InvalidScenario", "reference_step needs a regulator (sim-closed-loop)");
            }
        }
    }
    const auto trace = simulate_switched(p, inputs, cfg);
    files.add("switched_trace.csv", trace_csv(trace));

    std::string summary = fmt::format("d1 = {}\n", num12(op.d1));
    summary += fmt::format("averaged_v_out_total = {}\n", num12(op.v_out_total));
    const std::size_t cycles = trace.full_cycles();
    if (cycles > 0) {
        summary += fmt::format("last_cycle_mean_v_out_total = {}\n",
                               num12(cycle_average(trace, TraceColumn::VOutTotal, cycles - 1)));
        summary += fmt::format("last_cycle_mean_i_ls_rectified = {}\n",
                               num12(cycle_average(trace, TraceColumn::ILsRectified, cycles - 1)));
    }
    try {
        summary += fmt::format("steady_state_cycle = {}\n", detect_steady_state(trace));
    } catch (const Error& e) {
        if (e.name() != "NotSettled") throw;
        summary += "steady_state_cycle = none\n";
    }
    summary += fmt::format("ccm_half_cycles = {}\n", trace.ccm_half_cycles);
    summary += fmt::format("ambiguous_commutations = {}\n", trace.ambiguous_commutations);
    files.add("switched_summary.txt", summary);
    out << summary;
}

void cmd_sim_closed_loop(const ConverterParams& p, const Options& opt, OutputSet& files,
                         std::ostream& out) {
    if (opt.d1) throw config_error("InvalidOption", "sim-closed-loop takes --vref, not --d1");
    const auto model = parse_model(opt.model, DutyModel::Simplified);
    const double vref = opt.vref.value_or(kDefaultVref);
    const auto events = opt.scenario_path.empty() ? std::vector<ScenarioEvent>{}
                                                  : load_scenario(opt.scenario_path);
    // The regulator is designed at the reference operating point with the
    // initial source and load.
    ConverterParams initial = p;
    for (const auto& e : events) {
        if (e.t > 0.0) break;
        if (e.kind == EventKind::SourceStep) initial = initial.with_source(e.value);
        if (e.kind == EventKind::LoadResistanceStep) initial = initial.with_load(e.value);
        if (e.kind == EventKind::LoadCurrentStep) initial = initial.with_load(vref / e.value);
    }
    const auto op = solve_duty_for_target(vref, initial.v_dc(), initial, model);
    const auto d = make_design(initial, op, parse_source(opt.coeff_source), opt.gcf_hz);

    SimulationTrace trace;
    if (opt.switched) {
        SwitchedConfig cfg;
        cfg.t_end = opt.t_end.value_or(50e-3);
        cfg.steps_per_cycle = opt.steps_per_cycle;
        cfg.record_decimation = opt.decimation;
        trace = simulate_closed_loop_switched(p, d.pi.controller, vref, events, cfg);
    } else {
        ClosedLoopConfig cfg;
        cfg.t_end = opt.t_end.value_or(50e-3);
        cfg.model = model;
        trace = simulate_closed_loop(p, d.pi.controller, vref, events, cfg);
    }
    files.add(opt.switched ? "closed_loop_switched_trace.csv" : "closed_loop_trace.csv", trace_csv(trace));
    const double final_v = trace.v_out_total.back();
    out << fmt::format("k_p = {}\nomega_c = {}\nfinal_v_out_total = {}\nfinal_relative_error = {}\n",
                       num12(d.pi.controller.k_p), num12(d.pi.controller.omega_c), num12(final_v),
                       num12((final_v - trace.v_ref.back()) / trace.v_ref.back()));
}

// Reported values of the prototype's dynamic and control parameters.
struct TableRow {
    const char* symbol;
    const char* unit;
    double value;
};
constexpr TableRow kTable2[] = {
    {"D_T", "1", 0.878},           {"G_T", "S", 3.996e-3},      {"I_T", "A", 0.192},
    {"R_P", "ohm", -0.899},        {"D_P", "1", 0.998},         {"V_P", "V", 2.873},
    {"omega_p/2pi", "Hz", 114.6e3}, {"Q_p", "1", 0.372},         {"omega_o/2pi", "Hz", 42.6e3},
    {"omega_rz/2pi", "Hz", 305.2e3}, {"K_p", "1/V", 8.831e-3},  {"omega_c/2pi", "Hz", 41.83e3},
};

void cmd_verify_tables(const ConverterParams& p, const Options& opt, OutputSet& files,
                       std::ostream& out) {
    const auto model = parse_model(opt.model, DutyModel::Exact);
    const auto op = operating_point(p, opt, model);

    struct SourceSet {
        std::string name;
        SmallSignalCoefficients c;
    };
    const std::vector<SourceSet> sources = {
        {"printed", coefficients_analytic(op, p)},
        {"oracle", coefficients_numeric(op, p, 1e-6, DutyModel::Simplified)},
        {"oracle_exact_de", coefficients_numeric(op, p, 1e-6, DutyModel::Exact)},
    };

    std::string report;
    report += "# comparison of computed dynamic and control parameters with the reported table\n";
    report += "# the reported operating point is not stated; values below are evaluated at:\n";
    for (const auto& line : {fmt::format("d1={}", num12(op.d1)), fmt::format("i_l={}", num12(op.i_l)),
                             fmt::format("v_dc={}", num12(op.v_dc)),
                             fmt::format("v_out_total={}", num12(op.v_out_total)),
                             fmt::format("operating_point_model={}", to_string(model)),
                             fmt::format("gcf_desired_hz={}", num12(opt.gcf_hz))}) {
        report += "# " + line + "\n";
    }
    report += "symbol,unit,table_value,source,variant,computed,abs_delta,rel_delta,status\n";

    auto row = [&](const TableRow& t, const std::string& source, const std::string& variant, double computed) {
        const double abs_delta = computed - t.value;
        const double rel_delta = abs_delta / std::abs(t.value);
        const char* status = std::abs(rel_delta) <= 0.05 ? "within_5pct" : "not reconciled";
        report += fmt::format("{},{},{},{},{},{},{},{},{}\n", t.symbol, t.unit, num12(t.value), source, variant,
                              num12(computed), num12(abs_delta), num12(rel_delta), status);
    };

    const auto find = [](std::string_view sym) -> const TableRow& {
        for (const auto& r : kTable2)
            if (sym == r.symbol) return r;
        throw std::logic_error("unknown symbol");
    };

    for (const auto& s : sources) {
        row(find("D_T"), s.name, "-", s.c.d_t);
        row(find("G_T"), s.name, "-", s.c.g_t);
        row(find("I_T"), s.name, "-", s.c.i_t);
        row(find("R_P"), s.name, "-", s.c.r_p);
        row(find("D_P"), s.name, "-", s.c.d_p);
        row(find("V_P"), s.name, "-", s.c.v_p);
    }
    const double wp_stage = 1.0 / std::sqrt(2.0 * p.l_s() * p.c_f());
    const double wp_stack = 1.0 / std::sqrt(2.0 * p.l_s() * p.c_f() / p.n_stages());
    row(find("omega_p/2pi"), "-", "cf_per_stage", wp_stage / kTwoPi);
    row(find("omega_p/2pi"), "-", "cf_series_stack", wp_stack / kTwoPi);
    for (const auto& s : sources) {
        const auto rp = resonant_parameters(s.c, p);
        row(find("omega_p/2pi"), s.name, "natural_frequency_with_load", rp.omega_n / kTwoPi);
        row(find("Q_p"), s.name, "full", rp.q_p);
        row(find("Q_p"), s.name, "approx", rp.q_p_approx);
        row(find("omega_o/2pi"), s.name, "-", rp.omega_o / kTwoPi);
        row(find("omega_rz/2pi"), s.name, "-", rp.omega_rz / kTwoPi);

        const auto gvd = gvd_closed_form(s.c, p);
        const auto pi = design_pi(gvd, rp.omega_o, kTwoPi * opt.gcf_hz);
        row(find("K_p"), s.name, fmt::format("gcf_{}hz", num12(opt.gcf_hz)), pi.controller.k_p);
        const double gcf_inverted = find("K_p").value * pi.gcf_actual;
        const auto pi_inv = design_pi(gvd, rp.omega_o, gcf_inverted);
        row(find("K_p"), s.name, fmt::format("gcf_{}hz_inverted", num12(gcf_inverted / kTwoPi)),
            pi_inv.controller.k_p);
        row(find("omega_c/2pi"), s.name, "-", pi.controller.omega_c / kTwoPi);
    }
    files.add("table2_report.csv", report);
    out << report;
}

int category_status(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Config: return 1;
        case ErrorCategory::Numerical: return 2;
        case ErrorCategory::IO: return 3;
    }
    return 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Modeling and control tool for the capacitor-coupled IPSO dc-dc converter", "ccdc"};
    app.set_version_flag("--version",
                         fmt::format("ccdc {} (config schema {})", kToolVersion, kConfigSchemaVersion));
    app.require_subcommand(1, 1);

    Options opt;
    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "converter configuration file")->required();
        sub->add_option("-o,--output-dir", opt.output_dir, "directory for generated files");
        sub->add_flag("--force", opt.force, "overwrite existing output files");
        sub->add_option("--model", opt.model, "equivalent duty model: exact | simplified");
    };
    auto op_flags = [&](CLI::App* sub) {
        sub->add_option("--d1", opt.d1, "duty ratio of the operating point");
        sub->add_option("--vref", opt.vref, "total output voltage of the operating point [V]");
    };
    auto source_flag = [&](CLI::App* sub) {
        sub->add_option("--coeff-source", opt.coeff_source, "coefficient source: printed | oracle");
    };

    auto* steady = app.add_subcommand("steady", "solve the averaged operating point");
    common(steady);
    op_flags(steady);

    auto* linearize = app.add_subcommand("linearize", "small-signal coefficients and state-space model");
    common(linearize);
    op_flags(linearize);
    source_flag(linearize);

    auto* bode = app.add_subcommand("bode", "Bode data for G_vd, G_vv, G_vi");
    common(bode);
    op_flags(bode);
    source_flag(bode);

    auto* design = app.add_subcommand("design-pi", "PI regulator, margins and closed-loop Bode data");
    common(design);
    op_flags(design);
    source_flag(design);
    design->add_option("--gcf-hz", opt.gcf_hz, "desired loop crossover [Hz]");

    auto* sim_sw = app.add_subcommand("sim-switched", "cycle-level switched simulation");
    common(sim_sw);
    op_flags(sim_sw);
    sim_sw->add_option("--t-end", opt.t_end, "simulated time [s]");
    sim_sw->add_option("--steps-per-cycle", opt.steps_per_cycle, "integration steps per switching period");
    sim_sw->add_option("--decimation", opt.decimation, "record every n-th step");
    sim_sw->add_option("--scenario", opt.scenario_path, "source/load events");

    auto* sim_cl = app.add_subcommand("sim-closed-loop", "regulated averaged (or switched) simulation");
    common(sim_cl);
    op_flags(sim_cl);
    source_flag(sim_cl);
    sim_cl->add_option("--gcf-hz", opt.gcf_hz, "desired loop crossover [Hz]");
    sim_cl->add_option("--scenario", opt.scenario_path, "scenario events");
    sim_cl->add_option("--t-end", opt.t_end, "simulated time [s]");
    sim_cl->add_flag("--switched", opt.switched, "drive the switched simulator instead");
    sim_cl->add_option("--steps-per-cycle", opt.steps_per_cycle, "integration steps per switching period (with --switched)");
    sim_cl->add_option("--decimation", opt.decimation, "record every n-th step (with --switched)");

    auto* verify = app.add_subcommand("verify-tables", "report computed values against the reported table");
    common(verify);
    op_flags(verify);
    verify->add_option("--gcf-hz", opt.gcf_hz, "desired loop crossover [Hz]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto params = load_config(opt.config_path);
        OutputSet files;
        if (steady->parsed()) cmd_steady(params, opt, files, out);
        if (linearize->parsed()) cmd_linearize(params, opt, files, out);
        if (bode->parsed()) cmd_bode(params, opt, files, out);
        if (design->parsed()) cmd_design_pi(params, opt, files, out);
        if (sim_sw->parsed()) cmd_sim_switched(params, opt, files, out);
        if (sim_cl->parsed()) cmd_sim_closed_loop(params, opt, files, out);
        if (verify->parsed()) cmd_verify_tables(params, opt, files, out);
        files.commit(opt, out);
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << e.what() << '\n';
        return category_status(e.category());
    }
    return 0;
}

}  // namespace ccdc
