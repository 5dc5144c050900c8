#include "ccdc/switched_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "ccdc/error.hpp"

namespace ccdc {

Schedule& Schedule::step(double t, double value) {
    if (!steps_.empty() && !(t > steps_.back().first)) {
        throw config_error("UnorderedSchedule", "schedule steps must be strictly time-ordered");
    }
    steps_.emplace_back(t, value);
    return *this;
}

double Schedule::at(double t) const {
    double v = initial_;
    for (const auto& [ts, value] : steps_) {
        if (ts > t) break;
        v = value;
    }
    return v;
}

SwitchedInputs constant_inputs(const ConverterParams& params, double d1) {
    SwitchedInputs in;
    in.d1 = Schedule(d1);
    in.v_dc = Schedule(params.v_dc());
    in.r_l = Schedule(params.r_l());
    return in;
}

SwitchedState state_from_operating_point(const OperatingPoint& op) {
    SwitchedState s;
    s.v_cf = op.v_out_stage;
    return s;
}

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Mode {
    int dir = 0;           // +1/-1 bridge conducting in that direction, 0 idle
    double v_drive = 0.0;  // inverter terminal voltage while conducting
};

struct Propagator {
    Mat3 phi;
    Vec3 gamma;
};

// Affine LTI dynamics of one stage for a fixed switch configuration.
class StageDynamics {
public:
    StageDynamics(const ConverterParams& p, double series_resistance, SwitchedIntegration method)
        : l_loop_(2.0 * p.l_s()), c_loop_(0.5 * p.c_s()), c_f_(p.c_f()),
          r_series_(series_resistance), method_(method) {}

    void set_load(double r_stage) {
        const double g = std::isinf(r_stage) ? 0.0 : 1.0 / r_stage;
        if (g != g_load_) {
            g_load_ = g;
            cache_.clear();
        }
    }
    double load_conductance() const noexcept { return g_load_; }
    double l_loop() const noexcept { return l_loop_; }
    double c_loop() const noexcept { return c_loop_; }
    double c_f() const noexcept { return c_f_; }

    Propagator propagator(const Mode& m, double h, bool cacheable) {
        if (!cacheable) return compute(m, h);
        const auto key = std::make_tuple(m.dir, m.v_drive, h);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        if (cache_.size() > 256) cache_.clear();
        return cache_.emplace(key, compute(m, h)).first->second;
    }

private:
    Propagator compute(const Mode& m, double h) const {
        Mat3 a = Mat3::Zero();
        Vec3 b = Vec3::Zero();
        a(2, 2) = -g_load_ / c_f_;
        if (m.dir != 0) {
            const double s = m.dir;
            a(0, 0) = -r_series_ / l_loop_;
            a(0, 1) = -1.0 / l_loop_;
            a(0, 2) = -s / l_loop_;
            a(1, 0) = 1.0 / c_loop_;
            a(2, 0) = s / c_f_;
            b(0) = m.v_drive / l_loop_;
        }
        Propagator p;
        if (method_ == SwitchedIntegration::PiecewiseExact) {
            Eigen::Matrix4d aug = Eigen::Matrix4d::Zero();
            aug.topLeftCorner<3, 3>() = a * h;
            aug.topRightCorner<3, 1>() = b * h;
            const Eigen::Matrix4d e = aug.exp();
            p.phi = e.topLeftCorner<3, 3>();
            p.gamma = e.topRightCorner<3, 1>();
        } else {
            const Mat3 lhs = Mat3::Identity() - 0.5 * h * a;
            const auto lu = lhs.partialPivLu();
            p.phi = lu.solve(Mat3::Identity() + 0.5 * h * a);
            p.gamma = lu.solve(h * b);
        }
        return p;
    }

    double l_loop_;
    double c_loop_;
    double c_f_;
    double r_series_;
    SwitchedIntegration method_;
    double g_load_ = -1.0;
    std::map<std::tuple<int, double, double>, Propagator> cache_;
};

class SwitchedSimulator {
public:
    SwitchedSimulator(const ConverterParams& params, const SwitchedInputs& inputs,
                      const SwitchedConfig& cfg)
        : params_(params), inputs_(inputs), cfg_(cfg),
          dyn_(params, cfg.series_resistance, cfg.integration),
          n_(params.n_stages()), t_sw_(params.t_sw()),
          h_(params.t_sw() / cfg.steps_per_cycle) {}

    SimulationTrace run() {
        const long total_steps = std::lround(std::ceil(cfg_.t_end / h_ - 1e-9));
        const int half_steps = cfg_.steps_per_cycle / 2;

        if (cfg_.initial) {
            x_ << cfg_.initial->i_ls, cfg_.initial->v_cs, cfg_.initial->v_cf;
        } else {
            x_.setZero();
        }

        trace_.dt = h_ * cfg_.record_decimation;
        trace_.t_sw = t_sw_;
        trace_.samples_per_cycle =
            static_cast<std::size_t>(cfg_.steps_per_cycle / cfg_.record_decimation);
        const auto expected = static_cast<std::size_t>(total_steps / cfg_.record_decimation + 1);
        reserve(expected);

        for (long k = 0; k <= total_steps; ++k) {
            const double t0 = static_cast<double>(k) * h_;
            if (k % half_steps == 0) begin_half_cycle(k / half_steps, t0);
            apply_edges_until(t0);
            if (k % cfg_.record_decimation == 0) record(t0);
            if (k == total_steps) break;
            const double t1 = static_cast<double>(k + 1) * h_;
            double t = t0;
            while (next_edge() < t1) {
                const double te = next_edge();
                advance(t, te);
                apply_next_edge();
            }
            advance(t, t1);
        }
        return std::move(trace_);
    }

private:
    double next_edge() const {
        if (!on_applied_) return t_on_;
        if (!off_applied_) return t_off_;
        return std::numeric_limits<double>::infinity();
    }

    void apply_next_edge() {
        if (!on_applied_) {
            on_applied_ = true;
            pulse_on();
        } else {
            off_applied_ = true;
            pulse_off();
        }
    }

    void apply_edges_until(double t) {
        while (next_edge() <= t) apply_next_edge();
    }

    void begin_half_cycle(long j, double t) {
        // A pulse of the previous half cycle that ends exactly here (d1 = 1).
        apply_edges_until(t);

        half_index_ = j;
        v_dc_ = inputs_.v_dc.at(t);
        if (!(v_dc_ > 0.0)) throw numerical_error("InvalidSource", "source voltage must be positive");
        const double r_l = inputs_.r_l.at(t);
        if (!(r_l > 0.0)) throw numerical_error("InvalidLoad", "load resistance must be positive");
        dyn_.set_load(r_l / n_);

        d1_ = inputs_.controller ? inputs_.controller(t, state(t)) : inputs_.d1.at(t);
        if (!(d1_ >= 0.0 && d1_ <= 1.0)) {
            throw numerical_error("InvalidDuty", fmt::format("InvalidDuty: d1 = {} at t = {}", d1_, t));
        }
        polarity_ = (j % 2 == 0) ? 1.0 : -1.0;
        if (d1_ > 0.0) {
            t_on_ = t + (1.0 - d1_) * t_sw_ / 4.0;
            t_off_ = t + (1.0 + d1_) * t_sw_ / 4.0;
            on_applied_ = false;
            off_applied_ = false;
        } else {
            on_applied_ = true;
            off_applied_ = true;
        }
        if (j == 0) settle_mode();
    }

    void pulse_on() {
        if (x_(0) != 0.0) {
            ++trace_.ccm_half_cycles;
            if (cfg_.on_ccm == CcmPolicy::Fail) {
                throw numerical_error(
                    "CcmDetected",
                    fmt::format("CcmDetected: inductor current {} A at the start of half cycle {} "
                                "(cycle {})",
                                x_(0), half_index_, half_index_ / 2));
            }
        }
        pulse_active_ = true;
        settle_mode();
    }

    void pulse_off() {
        pulse_active_ = false;
        settle_mode();
    }

    double pulse_voltage() const { return polarity_ * v_dc_; }

    // Picks the switch configuration consistent with the present state.
    void settle_mode() {
        if (x_(0) != 0.0) {
            mode_.dir = x_(0) > 0.0 ? 1 : -1;
            mode_.v_drive = pulse_active_ ? pulse_voltage() : -mode_.dir * v_dc_;
            return;
        }
        mode_ = Mode{};
        if (!pulse_active_) return;  // inverter open, bridge cannot conduct
        const double drive = pulse_voltage() - x_(1);
        const double margin = std::abs(drive) - x_(2);
        if (std::abs(margin) <= 1e-12 * v_dc_) {
            ++trace_.ambiguous_commutations;
            return;
        }
        if (margin > 0.0) {
            mode_.dir = drive > 0.0 ? 1 : -1;
            mode_.v_drive = pulse_voltage();
        }
    }

    bool conduction_onset(const Vec3& x) const {
        return pulse_active_ && std::abs(pulse_voltage() - x(1)) - x(2) > 1e-12 * v_dc_;
    }

    Vec3 propagate(const Vec3& x, double tau, bool cacheable) {
        const auto p = dyn_.propagator(mode_, tau, cacheable);
        return p.phi * x + p.gamma;
    }

    // Advances the state from t to t_end inside the present configuration,
    // stopping at diode commutations.
    void advance(double& t, double t_end) {
        while (t_end - t > 0.0) {
            const double tau = t_end - t;
            const bool nominal = std::abs(tau - h_) <= 1e-9 * h_;
            const double half = nominal ? 0.5 * h_ : 0.5 * tau;
            const Vec3 x_mid = propagate(x_, half, nominal);
            const Vec3 x_end = propagate(x_mid, half, nominal);

            const double tol = h_ * 1e-6;
            if (mode_.dir != 0 && mode_.dir * x_end(0) <= 0.0) {
                // Bridge current reaches zero: bisect for the turn-off instant.
                double lo = 0.0;
                double hi = tau;
                while (hi - lo > tol) {
                    const double mid = 0.5 * (lo + hi);
                    const Vec3 xm = propagate(x_, mid, false);
                    (mode_.dir * xm(0) > 0.0 ? lo : hi) = mid;
                }
                commit_partial(hi);
                x_(0) = 0.0;
                t += hi;
                settle_mode();
                continue;
            }
            if (mode_.dir == 0 && conduction_onset(x_end) && !conduction_onset(x_)) {
                double lo = 0.0;
                double hi = tau;
                while (hi - lo > tol) {
                    const double mid = 0.5 * (lo + hi);
                    (conduction_onset(propagate(x_, mid, false)) ? hi : lo) = mid;
                }
                commit_partial(hi);
                t += hi;
                settle_mode();
                continue;
            }
            commit(x_, x_mid, x_end, tau);
            t = t_end;
        }
    }

    void commit_partial(double tau) {
        const Vec3 x_mid = propagate(x_, 0.5 * tau, false);
        const Vec3 x_end = propagate(x_mid, 0.5 * tau, false);
        commit(x_, x_mid, x_end, tau);
    }

    void commit(const Vec3& x0, const Vec3& xm, const Vec3& x1, double tau) {
        if (!x1.allFinite()) throw numerical_error("NonFiniteState", "switched state is not finite");
        if (mode_.dir != 0) {
            // Inverter voltage is constant over the segment; the loop charge is
            // C_loop * delta v_cs.
            e_in_ += n_ * mode_.v_drive * dyn_.c_loop() * (x1(1) - x0(1));
        }
        const double g = dyn_.load_conductance();
        e_out_ += n_ * g * tau / 6.0 * (x0(2) * x0(2) + 4.0 * xm(2) * xm(2) + x1(2) * x1(2));
        x_ = x1;
    }

    SwitchedState state(double t) const {
        SwitchedState s;
        s.i_ls = x_(0);
        s.v_cs = x_(1);
        s.v_cf = x_(2);
        s.t = t;
        if (mode_.dir == 0) {
            s.interval = Interval::Idle;
        } else {
            s.interval = mode_.dir * mode_.v_drive > 0.0 ? Interval::Charging : Interval::Discharging;
        }
        return s;
    }

    void reserve(std::size_t n) {
        for (auto* v : {&trace_.time, &trace_.v_ac, &trace_.i_ac, &trace_.i_ls, &trace_.v_out_stage,
                        &trace_.v_out_total, &trace_.d1, &trace_.v_cs, &trace_.e_in, &trace_.e_out,
                        &trace_.e_stored}) {
            v->reserve(n);
        }
    }

    void record(double t) {
        double v_ac = 0.0;
        if (mode_.dir != 0) {
            v_ac = mode_.v_drive;
        } else if (pulse_active_) {
            v_ac = pulse_voltage();
        }
        trace_.time.push_back(t);
        trace_.v_ac.push_back(v_ac);
        trace_.i_ac.push_back(n_ * x_(0));
        trace_.i_ls.push_back(x_(0));
        trace_.v_out_stage.push_back(x_(2));
        trace_.v_out_total.push_back(n_ * x_(2));
        trace_.d1.push_back(d1_);
        trace_.v_cs.push_back(x_(1));
        trace_.e_in.push_back(e_in_);
        trace_.e_out.push_back(e_out_);
        trace_.e_stored.push_back(
            n_ * 0.5 * (dyn_.l_loop() * x_(0) * x_(0) + dyn_.c_loop() * x_(1) * x_(1) +
                        dyn_.c_f() * x_(2) * x_(2)));
    }

    const ConverterParams& params_;
    const SwitchedInputs& inputs_;
    const SwitchedConfig& cfg_;
    StageDynamics dyn_;
    double n_;
    double t_sw_;
    double h_;

    Vec3 x_ = Vec3::Zero();
    Mode mode_;
    bool pulse_active_ = false;
    double polarity_ = 1.0;
    double v_dc_ = 0.0;
    double d1_ = 0.0;
    long half_index_ = 0;
    double t_on_ = 0.0;
    double t_off_ = 0.0;
    bool on_applied_ = true;
    bool off_applied_ = true;
    double e_in_ = 0.0;
    double e_out_ = 0.0;
    SimulationTrace trace_;
};

}  // namespace

SimulationTrace simulate_switched(const ConverterParams& params, const SwitchedInputs& inputs,
                                  const SwitchedConfig& cfg) {
    if (cfg.steps_per_cycle < 100 || cfg.steps_per_cycle % 2 != 0) {
        throw config_error("InvalidConfig", "steps_per_cycle must be even and at least 100");
    }
    if (cfg.record_decimation < 1 || cfg.steps_per_cycle % cfg.record_decimation != 0) {
        throw config_error("InvalidConfig", "record_decimation must divide steps_per_cycle");
    }
    if (!(cfg.t_end > 0.0)) throw config_error("InvalidConfig", "t_end must be positive");
    if (cfg.series_resistance < 0.0) throw config_error("InvalidConfig", "series resistance must be >= 0");
    SwitchedSimulator sim(params, inputs, cfg);
    return sim.run();
}

}  // namespace ccdc
