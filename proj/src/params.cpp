#include "ccdc/params.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "ccdc/error.hpp"

namespace ccdc {

namespace {

void require_positive(std::string_view name, double value, bool allow_infinite = false) {
    const bool ok = value > 0.0 && (allow_infinite || std::isfinite(value));
    if (!ok) {
        throw config_error("NonPositiveValue",
                           fmt::format("NonPositiveValue({}): got {}", name, value));
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view text) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || std::isnan(value)) {
        throw config_error("MalformedNumber",
                           fmt::format("MalformedNumber({}): '{}'", key, text));
    }
    return value;
}

constexpr std::array<std::string_view, 7> kRequired = {"v_dc", "n_stages", "l_s", "c_s",
                                                       "c_f",  "r_l",      "f_sw"};
constexpr std::array<std::string_view, 2> kOptional = {"k_ls", "k_cs"};

bool is_known(std::string_view key) {
    for (auto k : kRequired)
        if (k == key) return true;
    for (auto k : kOptional)
        if (k == key) return true;
    return false;
}

}  // namespace

ConverterParams::ConverterParams(const Fields& fields) : f_(fields), t_sw_(0.0) {
    require_positive("v_dc", f_.v_dc);
    if (f_.n_stages < 1) {
        throw config_error("NonPositiveValue",
                           fmt::format("NonPositiveValue(n_stages): got {}", f_.n_stages));
    }
    require_positive("l_s", f_.l_s);
    require_positive("c_s", f_.c_s);
    require_positive("c_f", f_.c_f);
    require_positive("r_l", f_.r_l, /*allow_infinite=*/true);
    require_positive("f_sw", f_.f_sw);
    t_sw_ = 1.0 / f_.f_sw;
}

ConverterParams ConverterParams::with_load(double r_l) const {
    Fields f = f_;
    f.r_l = r_l;
    return ConverterParams(f);
}

ConverterParams ConverterParams::with_source(double v_dc) const {
    Fields f = f_;
    f.v_dc = v_dc;
    return ConverterParams(f);
}

ConverterParams prototype_params() {
    ConverterParams::Fields f;
    f.v_dc = 15.0;
    f.n_stages = 16;
    f.l_s = 230e-9;
    f.c_s = 44e-6;
    f.c_f = 10e-6;
    f.r_l = 180.0;
    f.f_sw = 200e3;
    f.k_ls = 60.0;
    f.k_cs = 40.0;
    return ConverterParams(f);
}

double per_stage_load(const ConverterParams& params) {
    return params.r_l() / params.n_stages();
}

ConverterParams parse_config(std::string_view text) {
    std::map<std::string, double, std::less<>> values;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw config_error("MalformedNumber",
                               fmt::format("line {}: expected 'key = value'", line_no));
        }
        const auto key = trim(line.substr(0, eq));
        const auto raw = trim(line.substr(eq + 1));
        if (!is_known(key)) {
            throw config_error("UnknownKey", fmt::format("UnknownKey({})", key));
        }
        values[std::string(key)] = parse_number(key, raw);
    }

    for (auto key : kRequired) {
        if (values.find(key) == values.end()) {
            throw config_error("MissingKey", fmt::format("MissingKey({})", key));
        }
    }

    const double n = values.at("n_stages");
    if (n != std::floor(n) || !std::isfinite(n)) {
        throw config_error("MalformedNumber",
                           fmt::format("MalformedNumber(n_stages): '{}' is not an integer", n));
    }
    if (n < 1.0) {
        throw config_error("NonPositiveValue", fmt::format("NonPositiveValue(n_stages): got {}", n));
    }
    if (n > std::numeric_limits<int>::max()) {
        throw config_error("MalformedNumber", "MalformedNumber(n_stages): out of range");
    }

    ConverterParams::Fields f;
    f.v_dc = values.at("v_dc");
    f.n_stages = static_cast<int>(n);
    f.l_s = values.at("l_s");
    f.c_s = values.at("c_s");
    f.c_f = values.at("c_f");
    f.r_l = values.at("r_l");
    f.f_sw = values.at("f_sw");
    if (auto it = values.find("k_ls"); it != values.end()) f.k_ls = it->second;
    if (auto it = values.find("k_cs"); it != values.end()) f.k_cs = it->second;
    return ConverterParams(f);
}

ConverterParams load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("ReadFailed", fmt::format("cannot open config '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ConverterParams& params) {
    const auto& f = params.fields();
    // Shortest round-trip representation.
    std::string out;
    out += fmt::format("v_dc = {}\n", f.v_dc);
    out += fmt::format("n_stages = {}\n", f.n_stages);
    out += fmt::format("l_s = {}\n", f.l_s);
    out += fmt::format("c_s = {}\n", f.c_s);
    out += fmt::format("c_f = {}\n", f.c_f);
    out += fmt::format("r_l = {}\n", f.r_l);
    out += fmt::format("f_sw = {}\n", f.f_sw);
    if (f.k_ls) out += fmt::format("k_ls = {}\n", *f.k_ls);
    if (f.k_cs) out += fmt::format("k_cs = {}\n", *f.k_cs);
    return out;
}

}  // namespace ccdc
