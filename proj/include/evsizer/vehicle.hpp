#pragma once

namespace evsizer {

/// Vehicle body and driveline constants. Defaults are the small city car of the study;
/// `c_r` has no published value and defaults to a typical passenger-car 0.01.
struct VehicleParams {
    double m_v = 1085.0;   // kg
    double r_w = 0.295;    // m
    double rho_a = 1.2;    // kg/m^3
    double c_d = 0.35;
    double A_f = 0.72;     // m^2
    double c_r = 0.01;
    double g = 9.81;       // m/s^2
    double eta_g = 0.95;
    bool regen_enabled = true;

    /// Throws ValidationError unless mass, wheel radius, g and eta_g are positive,
    /// eta_g <= 1 and the resistance constants are non-negative (zero is allowed).
    void validate() const;
};

/// One-speed transmission ratio, checked against [lo, hi] at construction.
class GearRatio {
public:
    static constexpr double kDefaultLo = 1.0;
    static constexpr double kDefaultHi = 10.0;

    explicit GearRatio(double gamma, double lo = kDefaultLo, double hi = kDefaultHi);
    double value() const noexcept { return gamma_; }

private:
    double gamma_;
};

/// Resistive road load at speed v: aerodynamic drag plus rolling resistance (flat road).
double road_load_force(const VehicleParams& p, double v, bool rolling = true);

/// Torque required at the wheels to follow (v, a) on a flat road.
double wheel_torque(const VehicleParams& p, double v, double a);

/// Wheel torque mapped through the transmission to the motor shaft. Motoring demand is
/// divided by the efficiency, braking demand multiplied by it; with regeneration disabled
/// braking demand maps to zero.
double shaft_torque(const VehicleParams& p, const GearRatio& gamma, double wheel_torque);

/// Motor speed in rad/s for vehicle speed v.
double shaft_speed(const VehicleParams& p, const GearRatio& gamma, double v);

} // namespace evsizer
