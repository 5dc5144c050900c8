#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ccdc/cli.hpp"
#include "ccdc/params.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string output;
};

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ccdc_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir) {
    const auto path = dir / "prototype.cfg";
    std::ofstream(path) << ccdc::serialize_config(ccdc::prototype_params());
    return path;
}

Result run(const std::string& args) {
    const char* bin = std::getenv("CCDC_CLI");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream s(text);
    for (std::string l; std::getline(s, l);) out.push_back(l);
    return out;
}

double value_of(const std::string& text, const std::string& key) {
    for (const auto& l : lines(text)) {
        if (l.rfind(key + " = ", 0) == 0) return std::stod(l.substr(key.size() + 3));
    }
    FAIL("key not found: " << key);
    return 0.0;
}

}  // namespace

TEST_CASE("version flag", "[cli]") {
    const auto r = run("--version");
    CHECK(r.status == 0);
    CHECK(r.output.find(ccdc::kToolVersion) != std::string::npos);
    CHECK(r.output.find("schema 1") != std::string::npos);
}

TEST_CASE("steady operating point", "[cli]") {
    const auto dir = scratch("steady");
    const auto cfg = write_config(dir);
    const auto r = run("steady -c " + cfg.string() + " -o " + dir.string() + " --d1 0.279");
    REQUIRE(r.status == 0);
    const auto text = slurp(dir / "operating_point.txt");
    CHECK(value_of(text, "v_out_total") == Catch::Approx(176.0).epsilon(0.01));
    CHECK(value_of(text, "d1") == 0.279);
}

TEST_CASE("outputs are never overwritten silently", "[cli]") {
    const auto dir = scratch("force");
    const auto cfg = write_config(dir);
    const std::string base = "steady -c " + cfg.string() + " -o " + dir.string();
    REQUIRE(run(base + " --d1 0.279").status == 0);
    const auto before = slurp(dir / "operating_point.txt");
    const auto r = run(base + " --d1 0.3");
    CHECK(r.status == 3);
    CHECK(r.output.find("OutputExists") != std::string::npos);
    CHECK(slurp(dir / "operating_point.txt") == before);
    CHECK(run(base + " --d1 0.3 --force").status == 0);
    CHECK(slurp(dir / "operating_point.txt") != before);
}

TEST_CASE("exit codes by error class", "[cli]") {
    const auto dir = scratch("errors");
    const auto cfg = write_config(dir);
    const auto bad = dir / "bad.cfg";
    std::ofstream(bad) << "v_dc = 15\n";

    auto r = run("steady -c " + bad.string() + " -o " + dir.string());
    CHECK(r.status == 1);
    CHECK(r.output.find("MissingKey") != std::string::npos);

    r = run("steady -c " + cfg.string() + " -o " + dir.string() + " --vref 300");
    CHECK(r.status == 2);
    CHECK(r.output.find("TargetOutOfRange") != std::string::npos);

    r = run("steady -c " + (dir / "missing.cfg").string() + " -o " + dir.string());
    CHECK(r.status == 3);

    r = run("steady -c " + cfg.string() + " --model fancy");
    CHECK(r.status == 1);

    CHECK(run("no-such-command").status == 1);
    CHECK(run("steady").status == 1);
}

TEST_CASE("bode output is complete and deterministic", "[cli]") {
    const auto a = scratch("bode_a");
    const auto b = scratch("bode_b");
    const auto cfg = write_config(a);
    REQUIRE(run("bode -c " + cfg.string() + " -o " + a.string()).status == 0);
    REQUIRE(run("bode -c " + cfg.string() + " -o " + b.string()).status == 0);
    for (const char* f : {"gvd.csv", "gvv.csv", "gvi.csv", "gvd_first_order.csv"}) {
        const auto text = slurp(a / f);
        const auto ls = lines(text);
        REQUIRE(ls.size() == 401);
        CHECK(ls[0] == "freq_hz,magnitude_db,phase_deg");
        CHECK(text == slurp(b / f));
    }
}

TEST_CASE("linearize reports both coefficient sets", "[cli]") {
    const auto dir = scratch("linearize");
    const auto cfg = write_config(dir);
    const auto r = run("linearize -c " + cfg.string() + " -o " + dir.string() + " --vref 176");
    REQUIRE(r.status == 0);
    const auto text = slurp(dir / "linearization.txt");
    const double rp_printed = value_of(text, "printed.r_p");
    const double rp_oracle = value_of(text, "oracle.r_p");
    CHECK(rp_printed / rp_oracle == Catch::Approx(2.0 * value_of(text, "i_l")).epsilon(1e-6));
    CHECK(text.find("a = [[") != std::string::npos);
    CHECK(text.find("b3 = [") != std::string::npos);
}

TEST_CASE("design-pi writes controller and closed-loop data", "[cli]") {
    const auto dir = scratch("design");
    const auto cfg = write_config(dir);
    const auto r = run("design-pi -c " + cfg.string() + " -o " + dir.string() + " --gcf-hz 1000");
    REQUIRE(r.status == 0);
    const auto text = slurp(dir / "controller.txt");
    CHECK(value_of(text, "k_p") > 0.0);
    CHECK(value_of(text, "phase_margin_deg") > 0.0);
    for (const char* f : {"gc.csv", "glg.csv", "gvvc.csv", "gvic.csv"}) CHECK(lines(slurp(dir / f)).size() == 401);
}

TEST_CASE("verify-tables covers every reported symbol", "[cli]") {
    const auto a = scratch("verify_a");
    const auto b = scratch("verify_b");
    const auto cfg = write_config(a);
    REQUIRE(run("verify-tables -c " + cfg.string() + " -o " + a.string()).status == 0);
    REQUIRE(run("verify-tables -c " + cfg.string() + " -o " + b.string()).status == 0);
    const auto text = slurp(a / "table2_report.csv");
    CHECK(text == slurp(b / "table2_report.csv"));

    std::set<std::string> symbols, sources, variants;
    bool header = false;
    for (const auto& l : lines(text)) {
        if (l.empty() || l[0] == '#') continue;
        if (!header) {
            CHECK(l == "symbol,unit,table_value,source,variant,computed,abs_delta,rel_delta,status");
            header = true;
            continue;
        }
        std::istringstream s(l);
        std::string sym, unit, table, source, variant;
        std::getline(s, sym, ',');
        std::getline(s, unit, ',');
        std::getline(s, table, ',');
        std::getline(s, source, ',');
        std::getline(s, variant, ',');
        symbols.insert(sym);
        sources.insert(source);
        if (sym == "omega_p/2pi") variants.insert(variant);
    }
    CHECK(symbols == std::set<std::string>{"D_T", "G_T", "I_T", "R_P", "D_P", "V_P", "omega_p/2pi", "Q_p",
                                           "omega_o/2pi", "omega_rz/2pi", "K_p", "omega_c/2pi"});
    CHECK(sources.count("printed") == 1);
    CHECK(sources.count("oracle") == 1);
    CHECK(variants.count("cf_per_stage") == 1);
    CHECK(variants.count("cf_series_stack") == 1);
    CHECK(text.find("not reconciled") != std::string::npos);
}

TEST_CASE("simulation commands write traces", "[cli]") {
    const auto dir = scratch("sim");
    const auto cfg = write_config(dir);
    const auto scen = dir / "dip.csv";
    std::ofstream(scen) << "t_s,kind,value\n0.015,source_step,14\n";

    REQUIRE(run("sim-closed-loop -c " + cfg.string() + " -o " + dir.string() + " --scenario " + scen.string()).status == 0);
    auto ls = lines(slurp(dir / "closed_loop_trace.csv"));
    CHECK(ls[0] == "time_s,v_ac_v,i_ac_a,i_ls_a,v_out_stage_v,v_out_total_v,d1,v_ref_v");
    CHECK(ls.size() == 10002);

    REQUIRE(run("sim-switched -c " + cfg.string() + " -o " + dir.string() +
                " --d1 0.279 --t-end 0.002 --decimation 10")
                .status == 0);
    ls = lines(slurp(dir / "switched_trace.csv"));
    CHECK(ls[0] == "time_s,v_ac_v,i_ac_a,i_ls_a,v_out_stage_v,v_out_total_v,d1");
    CHECK(ls.size() == 400 * 20 + 2);
    CHECK(value_of(slurp(dir / "switched_summary.txt"), "ccm_half_cycles") == 0.0);
}
