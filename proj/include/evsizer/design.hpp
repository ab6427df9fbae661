#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evsizer {

enum class ScalingMode { Proportional, Combined };

std::string_view to_string(ScalingMode mode);
/// Accepts "proportional" or "combined"; throws ArgumentError otherwise.
ScalingMode parse_scaling_mode(std::string_view text);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double width() const noexcept { return hi - lo; }
};

/// Box bounds of the seven design variables.
struct DesignBounds {
    Interval k_ax{0.8, 1.2};
    Interval k_rad{0.8, 1.2};
    Interval k_mw{0.9, 1.1};
    Interval k_ml{0.9, 1.1};
    Interval k_sd{0.9, 1.1};
    Interval k_tw{0.9, 1.1};
    Interval gamma{1.0, 10.0};

    /// Bounds in combined-coordinate order (k_ax, k_rad, k_mw, k_ml, k_sd, k_tw, gamma).
    std::array<Interval, 7> as_array() const noexcept { return {k_ax, k_rad, k_mw, k_ml, k_sd, k_tw, gamma}; }
};

/// Axial/radial proportional factors plus the four internal magnet and slot factors.
struct ScalingVector {
    double k_ax = 1.0;
    double k_rad = 1.0;
    double k_mw = 1.0;
    double k_ml = 1.0;
    double k_sd = 1.0;
    double k_tw = 1.0;

    /// Throws DomainError naming the first factor outside `bounds`.
    void validate(const DesignBounds& bounds = {}) const;
    bool internal_factors_unity() const noexcept {
        return k_mw == 1.0 && k_ml == 1.0 && k_sd == 1.0 && k_tw == 1.0;
    }
    friend bool operator==(const ScalingVector&, const ScalingVector&) = default;
};

/// The optimization variables: scaling factors plus the gear ratio.
///
/// In proportional mode the internal factors are pinned to 1 and only
/// (k_ax, k_rad, gamma) are free.
struct DesignVector {
    ScalingVector k;
    double gamma = 1.0;
    ScalingMode mode = ScalingMode::Combined;

    static DesignVector proportional(double k_ax, double k_rad, double gamma);
    static DesignVector combined(double k_ax, double k_rad, double k_mw, double k_ml, double k_sd, double k_tw,
                                 double gamma);

    static constexpr std::size_t dimension(ScalingMode mode) noexcept { return mode == ScalingMode::Proportional ? 3 : 7; }
    static std::vector<std::string> coordinate_names(ScalingMode mode);
    static std::vector<Interval> coordinate_bounds(ScalingMode mode, const DesignBounds& bounds);

    /// Free coordinates in the mode's order.
    std::vector<double> coordinates() const;
    static DesignVector from_coordinates(ScalingMode mode, std::span<const double> x);

    /// All seven values in combined order.
    std::array<double, 7> full() const noexcept { return {k.k_ax, k.k_rad, k.k_mw, k.k_ml, k.k_sd, k.k_tw, gamma}; }

    /// Throws DomainError on a factor outside `bounds` or a proportional design with
    /// an internal factor different from 1.
    void validate(const DesignBounds& bounds = {}) const;

    friend bool operator==(const DesignVector&, const DesignVector&) = default;
};

} // namespace evsizer
