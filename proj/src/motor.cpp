#include "evsizer/motor.hpp"

#include "evsizer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace evsizer {

void ReferenceMachine::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string("reference.") + name + " must be > 0");
    };
    auto non_negative = [](double x, const char* name) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string("reference.") + name + " must be >= 0");
    };
    positive(d_mw0, "d_mw0");
    positive(d_ml0, "d_ml0");
    positive(d_sd0, "d_sd0");
    positive(d_tw0, "d_tw0");
    positive(T_max0, "T_max0");
    positive(w_base0, "w_base0");
    positive(w_max0, "w_max0");
    non_negative(c_cu, "c_cu");
    non_negative(c_hys, "c_hys");
    non_negative(c_eddy, "c_eddy");
    non_negative(c_mech, "c_mech");
    positive(c_g, "c_g");
    positive(c_ew, "c_ew");
    if (!(w_base0 < w_max0)) throw ValidationError("reference.w_base0 must be below reference.w_max0");
    if (!(f_t > 0.0 && f_t < 1.0)) throw ValidationError("reference.f_t must lie in (0, 1)");
    if (!(b_sat > 1.0)) throw ValidationError("reference.b_sat must be > 1");
}

MotorGeometry scale_geometry(const ReferenceMachine& ref, const ScalingVector& k, const DesignBounds& bounds) {
    k.validate(bounds);
    return MotorGeometry{
        ref.d_mw0 * k.k_rad * k.k_mw,
        ref.d_ml0 * k.k_rad * k.k_ml,
        ref.d_sd0 * k.k_rad * k.k_sd,
        ref.d_tw0 * k.k_rad * k.k_tw,
    };
}

namespace {

double slot_width_factor(const ReferenceMachine& ref, double k_tw) {
    return (1.0 - ref.f_t * k_tw) / (1.0 - ref.f_t);
}

LoadingFactors loading_unchecked(const ScalingVector& k, const ReferenceMachine& ref) {
    const double permeance = k.k_ml * (1.0 + ref.c_g) / (k.k_ml + ref.c_g);
    return LoadingFactors{
        std::min(k.k_mw * permeance, ref.b_sat * k.k_tw),
        k.k_sd * slot_width_factor(ref, k.k_tw),
    };
}

} // namespace

LoadingFactors loading_factors(const ScalingVector& k, const ReferenceMachine& ref, const DesignBounds& bounds) {
    k.validate(bounds);
    return loading_unchecked(k, ref);
}

MotorModel::MotorModel(const ReferenceMachine& ref, const ScalingVector& k, const DesignBounds& bounds)
    : ref_(ref), k_(k) {
    ref.validate();
    geometry_ = scale_geometry(ref, k, bounds);
    loading_ = loading_unchecked(k, ref);
    if (!(loading_.lambda_A > 0.0)) {
        throw DomainError("k_tw", "slot width vanishes for tooth factor " + std::to_string(k.k_tw));
    }

    const double k_rad2 = k.k_rad * k.k_rad;
    t_peak_ = ref.T_max0 * k.k_ax * (k_rad2 * k.k_rad) * loading_.lambda_B * loading_.lambda_A;
    w_base_ = ref.w_base0 / (k.k_ax * k.k_rad * loading_.lambda_B);
    w_max_ = ref.w_max0 / k.k_rad;

    // Copper: I^2 R with current ~ torque / (flux linkage), resistance ~ turn length / slot area.
    const double end_winding = (k.k_ax + ref.c_ew * k.k_rad) / (1.0 + ref.c_ew);
    cu_torque_scale_ = ref.T_max0 * k.k_ax * k_rad2 * loading_.lambda_B;
    cu_factor_ = ref.c_cu * end_winding / (k_rad2 * k.k_sd * slot_width_factor(ref, k.k_tw));
    // Iron: hysteresis ~ f B^2, eddy ~ f^2 B^2, both per unit core volume.
    fe_factor_ = loading_.lambda_B * loading_.lambda_B * k.k_ax * k_rad2;
    // Windage/friction ~ w^3 with rotor surface and radius.
    mech_factor_ = k.k_ax * (k_rad2 * k_rad2);
}

double MotorModel::torque_limit(double w) const noexcept {
    const double speed = std::abs(w);
    if (speed > w_max_) return 0.0;
    if (speed <= w_base_) return t_peak_;
    return t_peak_ * w_base_ / speed;
}

bool MotorModel::in_envelope(double torque, double w) const noexcept {
    if (!(w >= 0.0) || w > w_max_ * (1.0 + 1e-12)) return false;
    const double limit = w > w_max_ ? torque_limit(w_max_) : torque_limit(w);
    return std::abs(torque) <= limit * (1.0 + 1e-12);
}

LossBreakdown MotorModel::loss_breakdown(double torque, double w) const {
    if (!in_envelope(torque, w)) {
        std::ostringstream msg;
        msg << "operating point (T=" << torque << " N*m, w=" << w << " rad/s) outside the envelope (T_max="
            << torque_limit(w) << " N*m, w_max=" << w_max_ << " rad/s)";
        throw InfeasiblePointError(msg.str());
    }
    const double torque_ratio = torque / cu_torque_scale_;
    const double speed_ratio = w / ref_.w_base0;
    LossBreakdown out;
    out.copper = cu_factor_ * torque_ratio * torque_ratio;
    out.iron = (ref_.c_hys * speed_ratio + ref_.c_eddy * speed_ratio * speed_ratio) * fe_factor_;
    out.mechanical = ref_.c_mech * speed_ratio * speed_ratio * speed_ratio * mech_factor_;
    return out;
}

} // namespace evsizer
