#include "evsizer/sim.hpp"

#include "evsizer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace evsizer {

void PerformanceSpec::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string("spec.") + name + " must be > 0");
    };
    positive(v_max, "v_max");
    positive(v_acc, "v_acc");
    positive(t_acc, "t_acc");
    positive(v_grade, "v_grade");
    positive(dt_acc, "dt_acc");
    positive(t_acc_cap, "t_acc_cap");
    if (!(alpha_max >= 0.0) || !std::isfinite(alpha_max)) throw ValidationError("spec.alpha_max must be >= 0");
}

double integrate_power(std::span<const double> t, std::span<const double> p) {
    if (t.size() < 2 || (p.size() != t.size() && p.size() + 1 != t.size())) {
        throw ArgumentError("integrate_power: need one power sample per interval or per node");
    }
    double energy = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) energy += p[i] * (t[i + 1] - t[i]);
    return energy;
}

CycleEnergy cycle_energy(const DriveCycle& cycle, const VehicleParams& vp, const GearRatio& gamma,
                         const MotorModel& motor, bool with_trace) {
    const auto& pts = cycle.points();
    const double torque_norm = motor.reference().T_max0;
    const double w_max = motor.max_speed();

    CycleEnergy out;
    out.margin = std::numeric_limits<double>::infinity();
    if (with_trace) out.trace.reserve(pts.size() - 1);

    double energy = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double dt = pts[i + 1].t - pts[i].t;
        const double v = 0.5 * (pts[i].v + pts[i + 1].v);
        const double a = pts[i].a;

        const double t_wheel = vp.r_w * (vp.m_v * a + road_load_force(vp, v, v > 0.0));
        double torque = shaft_torque(vp, gamma, t_wheel);
        const double w = shaft_speed(vp, gamma, v);
        const double limit = motor.torque_limit(w);

        const double slack = std::min((limit - torque) / torque_norm, (w_max - w) / w_max);
        out.margin = std::min(out.margin, slack);
        if (slack < 0.0) {
            if (!out.violation_time) {
                std::ostringstream msg;
                msg << "envelope exceeded at t=" << pts[i].t << " s (T=" << torque << " N*m, T_max=" << limit
                    << " N*m, w=" << w << " rad/s, w_max=" << w_max << " rad/s)";
                out.violation_time = pts[i].t;
                out.violation = msg.str();
            }
            continue;
        }
        if (torque < -limit) torque = -limit; // friction brakes take the rest

        const double p_loss = motor.losses(torque, w);
        const double p_ac = torque * w + p_loss;
        energy += p_ac * dt;
        if (with_trace) out.trace.push_back({pts[i].t, dt, v, a, torque, w, p_ac, p_loss});
    }
    if (!out.violation_time) out.energy = energy;
    return out;
}

TopSpeedCheck check_top_speed(const VehicleParams& vp, const GearRatio& gamma, const MotorModel& motor,
                              const PerformanceSpec& spec) {
    TopSpeedCheck out;
    out.shaft_speed = shaft_speed(vp, gamma, spec.v_max);
    out.speed_slack = motor.max_speed() - out.shaft_speed;
    out.torque_demand = shaft_torque(vp, gamma, wheel_torque(vp, spec.v_max, 0.0));
    out.torque_slack = motor.torque_limit(out.shaft_speed) - out.torque_demand;
    out.normalized =
        std::min(out.speed_slack / out.shaft_speed, out.torque_slack / motor.reference().T_max0);
    return out;
}

AccelerationCheck check_acceleration(const VehicleParams& vp, const GearRatio& gamma, const MotorModel& motor,
                                     const PerformanceSpec& spec) {
    const auto max_steps = static_cast<long>(std::llround(spec.t_acc_cap / spec.dt_acc));
    const double drive_gain = gamma.value() * vp.eta_g / vp.r_w;

    double v = 0.0;
    long steps = 0;
    while (v < spec.v_acc && steps < max_steps) {
        const double w = shaft_speed(vp, gamma, v);
        const double drive = drive_gain * motor.torque_limit(w);
        const double resist = road_load_force(vp, v, v > 0.0);
        v = std::max(0.0, v + (drive - resist) / vp.m_v * spec.dt_acc);
        ++steps;
    }

    AccelerationCheck out;
    out.reached = v >= spec.v_acc;
    out.elapsed = out.reached ? static_cast<double>(steps) * spec.dt_acc : spec.t_acc_cap;
    out.margin = spec.t_acc - out.elapsed;
    out.normalized = out.margin / spec.t_acc;
    return out;
}

double grade_demand(const VehicleParams& vp, const PerformanceSpec& spec) {
    const double theta = std::atan(spec.alpha_max);
    return vp.r_w * vp.m_v * vp.g * (std::sin(theta) + vp.c_r * std::cos(theta));
}

GradeCheck check_gradeability(const VehicleParams& vp, const GearRatio& gamma, const MotorModel& motor,
                              const PerformanceSpec& spec) {
    GradeCheck out;
    out.demand = grade_demand(vp, spec);
    const double w = shaft_speed(vp, gamma, spec.v_grade);
    out.available = gamma.value() * vp.eta_g * motor.torque_limit(w);
    out.margin = out.available - out.demand;
    out.normalized = out.margin / (gamma.value() * vp.eta_g * motor.reference().T_max0);
    return out;
}

double Margins::violation_norm() const noexcept {
    auto neg = [](double m) { return m < 0.0 ? m * m : 0.0; };
    double sum = neg(top_speed) + neg(acceleration) + neg(gradeability);
    if (cycle) sum += neg(*cycle);
    return std::sqrt(sum);
}

EvaluationRecord evaluate(const DesignVector& design, const EvalContext& ctx, bool with_trace) {
    design.validate(ctx.bounds);
    const GearRatio gamma(design.gamma, ctx.bounds.gamma.lo, ctx.bounds.gamma.hi);
    const MotorModel motor = build_model(ctx.reference, design.k, ctx.bounds);

    EvaluationRecord rec;
    rec.design = design;
    rec.margins.top_speed = check_top_speed(ctx.vehicle, gamma, motor, ctx.spec).normalized;
    rec.margins.acceleration = check_acceleration(ctx.vehicle, gamma, motor, ctx.spec).normalized;
    rec.margins.gradeability = check_gradeability(ctx.vehicle, gamma, motor, ctx.spec).normalized;

    if (!rec.margins.performance_ok()) {
        rec.diagnostic = "performance constraint violated";
        return rec;
    }

    auto cyc = cycle_energy(ctx.cycle, ctx.vehicle, gamma, motor, with_trace);
    rec.margins.cycle = cyc.margin;
    rec.energy = cyc.energy;
    rec.trace = std::move(cyc.trace);
    rec.diagnostic = std::move(cyc.violation);
    rec.feasible = rec.margins.all_ok() && rec.energy.has_value();
    return rec;
}

} // namespace evsizer
