#pragma once

#include "evsizer/cycle.hpp"
#include "evsizer/design.hpp"
#include "evsizer/motor.hpp"
#include "evsizer/vehicle.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evsizer {

/// Performance requirements plus the integration settings of the checks.
struct PerformanceSpec {
    double v_max = 180.0 / 3.6;   // m/s
    double v_acc = 100.0 / 3.6;   // m/s
    double t_acc = 9.6;           // s
    double alpha_max = 0.20;      // grade, tan of road angle
    double v_grade = 1.0 / 3.6;   // crawl speed of the gradeability check, m/s
    double dt_acc = 0.01;         // explicit Euler step of the launch simulation, s
    double t_acc_cap = 60.0;      // s

    void validate() const;
};

/// One quasi-static interval [t, t + dt) of a cycle simulation.
struct TraceRow {
    double t = 0.0;
    double dt = 0.0;
    double v = 0.0;      // interval-mean speed
    double a = 0.0;
    double torque = 0.0; // shaft, after regen clipping
    double w = 0.0;
    double p_ac = 0.0;
    double p_loss = 0.0;
};

struct CycleEnergy {
    std::optional<double> energy; // J, empty when the cycle is infeasible
    double margin = 0.0;          // min normalized envelope slack over the cycle
    std::optional<double> violation_time;
    std::string violation;
    std::vector<TraceRow> trace;
};

/// Left-rectangle sum of power samples: sum p[i] * (t[i+1] - t[i]).
/// `p` holds one sample per interval (t.size() - 1) or per node (last ignored).
double integrate_power(std::span<const double> t, std::span<const double> p);

/// Input energy over the cycle. Each interval is evaluated at its forward-difference
/// acceleration and mean speed; braking torque beyond the envelope goes to friction.
CycleEnergy cycle_energy(const DriveCycle& cycle, const VehicleParams& vp, const GearRatio& gamma,
                         const MotorModel& motor, bool with_trace = false);

struct TopSpeedCheck {
    double shaft_speed = 0.0;   // at v_max, rad/s
    double speed_slack = 0.0;   // w_max - w, rad/s
    double torque_demand = 0.0; // shaft, N*m
    double torque_slack = 0.0;  // T_max(w) - demand, N*m
    double normalized = 0.0;
};
TopSpeedCheck check_top_speed(const VehicleParams& vp, const GearRatio& gamma, const MotorModel& motor,
                              const PerformanceSpec& spec);

struct AccelerationCheck {
    double elapsed = 0.0; // s
    bool reached = false;
    double margin = 0.0;  // t_acc - elapsed, s
    double normalized = 0.0;
};
AccelerationCheck check_acceleration(const VehicleParams& vp, const GearRatio& gamma, const MotorModel& motor,
                                     const PerformanceSpec& spec);

/// Wheel torque needed to hold the vehicle on the maximum grade.
double grade_demand(const VehicleParams& vp, const PerformanceSpec& spec);

struct GradeCheck {
    double demand = 0.0;    // wheel, N*m
    double available = 0.0; // wheel, N*m
    double margin = 0.0;    // wheel, N*m
    double normalized = 0.0;
};
GradeCheck check_gradeability(const VehicleParams& vp, const GearRatio& gamma, const MotorModel& motor,
                              const PerformanceSpec& spec);

/// Normalized signed slacks; a design is feasible when all are >= 0.
struct Margins {
    double top_speed = 0.0;
    double acceleration = 0.0;
    double gradeability = 0.0;
    std::optional<double> cycle; // empty when the cycle was not simulated

    bool performance_ok() const noexcept { return top_speed >= 0.0 && acceleration >= 0.0 && gradeability >= 0.0; }
    bool all_ok() const noexcept { return performance_ok() && cycle.has_value() && *cycle >= 0.0; }
    /// Euclidean norm of the negative parts.
    double violation_norm() const noexcept;
    friend bool operator==(const Margins&, const Margins&) = default;
};

/// Everything a candidate evaluation reads besides the design itself. Shared read-only.
struct EvalContext {
    DriveCycle cycle;
    VehicleParams vehicle;
    ReferenceMachine reference;
    PerformanceSpec spec;
    DesignBounds bounds;
};

struct EvaluationRecord {
    DesignVector design;
    std::optional<double> energy; // J
    bool feasible = false;
    Margins margins;
    std::string diagnostic;
    std::vector<TraceRow> trace;
};

/// Checks the performance constraints, then simulates the cycle if they hold.
/// Throws DomainError for a design outside the bounds; infeasibility is encoded in the record.
EvaluationRecord evaluate(const DesignVector& design, const EvalContext& ctx, bool with_trace = false);

} // namespace evsizer
