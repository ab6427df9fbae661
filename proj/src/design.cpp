#include "evsizer/design.hpp"

#include "evsizer/errors.hpp"

#include <sstream>

namespace evsizer {

std::string_view to_string(ScalingMode mode) {
    return mode == ScalingMode::Proportional ? "proportional" : "combined";
}

ScalingMode parse_scaling_mode(std::string_view text) {
    if (text == "proportional") return ScalingMode::Proportional;
    if (text == "combined") return ScalingMode::Combined;
    throw ArgumentError("unknown scaling mode '" + std::string(text) + "'");
}

namespace {

void check_factor(const char* name, double value, Interval bound) {
    if (!bound.contains(value)) {
        std::ostringstream msg;
        msg << "value " << value << " outside [" << bound.lo << ", " << bound.hi << "]";
        throw DomainError(name, msg.str());
    }
}

} // namespace

void ScalingVector::validate(const DesignBounds& bounds) const {
    check_factor("k_ax", k_ax, bounds.k_ax);
    check_factor("k_rad", k_rad, bounds.k_rad);
    check_factor("k_mw", k_mw, bounds.k_mw);
    check_factor("k_ml", k_ml, bounds.k_ml);
    check_factor("k_sd", k_sd, bounds.k_sd);
    check_factor("k_tw", k_tw, bounds.k_tw);
}

DesignVector DesignVector::proportional(double k_ax, double k_rad, double gamma) {
    DesignVector d;
    d.k.k_ax = k_ax;
    d.k.k_rad = k_rad;
    d.gamma = gamma;
    d.mode = ScalingMode::Proportional;
    return d;
}

DesignVector DesignVector::combined(double k_ax, double k_rad, double k_mw, double k_ml, double k_sd, double k_tw,
                                    double gamma) {
    return DesignVector{ScalingVector{k_ax, k_rad, k_mw, k_ml, k_sd, k_tw}, gamma, ScalingMode::Combined};
}

std::vector<std::string> DesignVector::coordinate_names(ScalingMode mode) {
    if (mode == ScalingMode::Proportional) return {"k_ax", "k_rad", "gamma"};
    return {"k_ax", "k_rad", "k_mw", "k_ml", "k_sd", "k_tw", "gamma"};
}

std::vector<Interval> DesignVector::coordinate_bounds(ScalingMode mode, const DesignBounds& b) {
    if (mode == ScalingMode::Proportional) return {b.k_ax, b.k_rad, b.gamma};
    return {b.k_ax, b.k_rad, b.k_mw, b.k_ml, b.k_sd, b.k_tw, b.gamma};
}

std::vector<double> DesignVector::coordinates() const {
    if (mode == ScalingMode::Proportional) return {k.k_ax, k.k_rad, gamma};
    return {k.k_ax, k.k_rad, k.k_mw, k.k_ml, k.k_sd, k.k_tw, gamma};
}

DesignVector DesignVector::from_coordinates(ScalingMode mode, std::span<const double> x) {
    if (x.size() != dimension(mode)) {
        throw ArgumentError("expected " + std::to_string(dimension(mode)) + " coordinates, got " +
                            std::to_string(x.size()));
    }
    if (mode == ScalingMode::Proportional) return proportional(x[0], x[1], x[2]);
    return combined(x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
}

void DesignVector::validate(const DesignBounds& bounds) const {
    k.validate(bounds);
    check_factor("gamma", gamma, bounds.gamma);
    if (mode == ScalingMode::Proportional && !k.internal_factors_unity()) {
        throw DomainError("k_mw/k_ml/k_sd/k_tw", "proportional designs pin internal factors to 1");
    }
}

} // namespace evsizer
