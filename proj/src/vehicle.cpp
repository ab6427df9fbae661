#include "evsizer/vehicle.hpp"

#include "evsizer/errors.hpp"

#include <cmath>
#include <string>

namespace evsizer {

void VehicleParams::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string("vehicle.") + name + " must be > 0");
    };
    auto non_negative = [](double x, const char* name) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string("vehicle.") + name + " must be >= 0");
    };
    positive(m_v, "m_v");
    positive(r_w, "r_w");
    positive(g, "g");
    positive(eta_g, "eta_g");
    // zero drag/rolling is allowed for limiting-case studies
    non_negative(rho_a, "rho_a");
    non_negative(c_d, "c_d");
    non_negative(A_f, "A_f");
    non_negative(c_r, "c_r");
    if (eta_g > 1.0) throw ValidationError("vehicle.eta_g must be <= 1");
}

GearRatio::GearRatio(double gamma, double lo, double hi) : gamma_(gamma) {
    if (!(gamma >= lo && gamma <= hi)) {
        throw DomainError("gamma", "value " + std::to_string(gamma) + " outside [" + std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
    }
}

double road_load_force(const VehicleParams& p, double v, bool rolling) {
    const double aero = 0.5 * p.rho_a * p.c_d * p.A_f * v * v;
    return rolling ? aero + p.c_r * p.m_v * p.g : aero;
}

double wheel_torque(const VehicleParams& p, double v, double a) {
    return p.r_w * (p.m_v * a + road_load_force(p, v));
}

double shaft_torque(const VehicleParams& p, const GearRatio& gamma, double wheel_torque) {
    if (wheel_torque >= 0.0) return wheel_torque / (gamma.value() * p.eta_g);
    if (!p.regen_enabled) return 0.0;
    return wheel_torque * p.eta_g / gamma.value();
}

double shaft_speed(const VehicleParams& p, const GearRatio& gamma, double v) {
    return gamma.value() * v / p.r_w;
}

} // namespace evsizer
