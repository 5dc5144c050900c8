#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ccdc {

/// Design record of the capacitor-coupled input-parallel/series-output
/// converter. All values in SI base units. `t_sw` is derived from `f_sw` and
/// cannot be set independently.
class ConverterParams {
public:
    struct Fields {
        double v_dc = 0.0;     // source voltage [V]
        int n_stages = 0;      // rectifier stages stacked at the output
        double l_s = 0.0;      // series inductance per stage [H]
        double c_s = 0.0;      // series coupling capacitance per stage [F]
        double c_f = 0.0;      // filter capacitance per stage [F]
        double r_l = 0.0;      // total load resistance [ohm]
        double f_sw = 0.0;     // switching frequency [Hz]
        std::optional<double> k_ls;
        std::optional<double> k_cs;

        friend bool operator==(const Fields&, const Fields&) = default;
    };

    /// Validates and throws Error("NonPositiveValue") on a bad field.
    explicit ConverterParams(const Fields& fields);

    double v_dc() const noexcept { return f_.v_dc; }
    int n_stages() const noexcept { return f_.n_stages; }
    double l_s() const noexcept { return f_.l_s; }
    double c_s() const noexcept { return f_.c_s; }
    double c_f() const noexcept { return f_.c_f; }
    double r_l() const noexcept { return f_.r_l; }
    double f_sw() const noexcept { return f_.f_sw; }
    double t_sw() const noexcept { return t_sw_; }
    std::optional<double> k_ls() const noexcept { return f_.k_ls; }
    std::optional<double> k_cs() const noexcept { return f_.k_cs; }
    const Fields& fields() const noexcept { return f_; }

    /// Copy with a different total load (r_l may be +inf for no load).
    ConverterParams with_load(double r_l) const;
    ConverterParams with_source(double v_dc) const;

    friend bool operator==(const ConverterParams&, const ConverterParams&) = default;

private:
    Fields f_;
    double t_sw_;
};

/// The 16-stage prototype design record.
ConverterParams prototype_params();

/// r_l / n_stages.
double per_stage_load(const ConverterParams& params);

/// Parses the flat `key = value` configuration format.
ConverterParams parse_config(std::string_view text);
ConverterParams load_config(const std::string& path);

/// Writes a document that `parse_config` reads back to an identical record.
std::string serialize_config(const ConverterParams& params);

}  // namespace ccdc
