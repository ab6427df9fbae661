#pragma once

#include "evsizer/design.hpp"

namespace evsizer {

/// The unscaled machine and the constants of its analytical performance surrogate.
///
/// Absolute dimensions are placeholders: results are reported as ratios to them.
/// Loss coefficients are the component losses (W) at the rated point
/// (T_max0, w_base0) of the unscaled machine.
struct ReferenceMachine {
    double d_mw0 = 0.020; // magnet width, m
    double d_ml0 = 0.006; // magnet length, m
    double d_sd0 = 0.030; // slot depth, m
    double d_tw0 = 0.008; // tooth width, m

    double T_max0 = 280.0;  // N*m
    double w_base0 = 430.0; // rad/s
    double w_max0 = 1100.0; // rad/s

    double c_cu = 4000.0;
    double c_hys = 300.0;
    double c_eddy = 600.0;
    double c_mech = 150.0;

    double c_g = 0.2;   // effective air gap relative to magnet length
    double f_t = 0.5;   // tooth fraction of the slot pitch
    double b_sat = 1.1; // tooth-saturation cap on magnetic loading
    double c_ew = 0.3;  // end-winding length relative to stack length

    /// Throws ValidationError on non-positive constants, w_base0 >= w_max0,
    /// f_t outside (0, 1) or b_sat <= 1. Loss coefficients may be zero.
    void validate() const;
    double rated_power() const noexcept { return T_max0 * w_base0; }
    friend bool operator==(const ReferenceMachine&, const ReferenceMachine&) = default;
};

struct MotorGeometry {
    double d_mw = 0.0;
    double d_ml = 0.0;
    double d_sd = 0.0;
    double d_tw = 0.0;
    friend bool operator==(const MotorGeometry&, const MotorGeometry&) = default;
};

/// Relative magnetic (B) and electric (A) loading of a rescaled machine.
struct LoadingFactors {
    double lambda_B = 1.0;
    double lambda_A = 1.0;
    friend bool operator==(const LoadingFactors&, const LoadingFactors&) = default;
};

struct LossBreakdown {
    double copper = 0.0;
    double iron = 0.0;
    double mechanical = 0.0;
    double total() const noexcept { return copper + iron + mechanical; }
};

MotorGeometry scale_geometry(const ReferenceMachine& ref, const ScalingVector& k, const DesignBounds& bounds = {});

/// Permeance-divider magnet gain capped by tooth saturation, and the slot-area
/// share of the electric loading.
LoadingFactors loading_factors(const ScalingVector& k, const ReferenceMachine& ref, const DesignBounds& bounds = {});

/// Immutable scaled machine: torque envelope and loss map.
class MotorModel {
public:
    MotorModel(const ReferenceMachine& ref, const ScalingVector& k, const DesignBounds& bounds = {});

    const ReferenceMachine& reference() const noexcept { return ref_; }
    const ScalingVector& scaling() const noexcept { return k_; }
    const MotorGeometry& geometry() const noexcept { return geometry_; }
    const LoadingFactors& loading() const noexcept { return loading_; }

    double peak_torque() const noexcept { return t_peak_; }
    double base_speed() const noexcept { return w_base_; }
    double max_speed() const noexcept { return w_max_; }

    /// Constant torque up to base speed, constant power up to max speed, zero beyond.
    double torque_limit(double w) const noexcept;
    bool in_envelope(double torque, double w) const noexcept;

    /// Throws InfeasiblePointError outside the envelope.
    LossBreakdown loss_breakdown(double torque, double w) const;
    double losses(double torque, double w) const { return loss_breakdown(torque, w).total(); }
    /// Electrical input power: shaft power plus losses.
    double input_power(double torque, double w) const { return torque * w + losses(torque, w); }

    friend bool operator==(const MotorModel&, const MotorModel&) = default;

private:
    ReferenceMachine ref_;
    ScalingVector k_;
    MotorGeometry geometry_;
    LoadingFactors loading_;
    double t_peak_ = 0.0;
    double w_base_ = 0.0;
    double w_max_ = 0.0;
    // precomputed loss scalings
    double cu_torque_scale_ = 0.0;
    double cu_factor_ = 0.0;
    double fe_factor_ = 0.0;
    double mech_factor_ = 0.0;
};

/// Same as the MotorModel constructor; named to mirror the other free functions.
inline MotorModel build_model(const ReferenceMachine& ref, const ScalingVector& k, const DesignBounds& bounds = {}) {
    return MotorModel(ref, k, bounds);
}

} // namespace evsizer
