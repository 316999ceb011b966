// numerics.hpp: Uniform-grid quadrature, finite differences and phase helpers

#pragma once

#include <span>
#include <vector>

namespace gphase::numerics {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

/// Composite Simpson rule on a uniform grid with spacing h. Falls back to a
/// trailing 3/8 panel when the number of intervals is odd. Needs >= 3 samples
/// (two samples use the trapezoid rule).
double simpson(std::span<const double> values, double h);

/// Fourth-order finite-difference derivative on a uniform grid (one-sided
/// stencils at the ends). Needs >= 5 samples.
std::vector<double> derivative(std::span<const double> values, double h);

/// Nearest-branch continuation of wrapped angles.
std::vector<double> unwrap(std::span<const double> wrapped);

/// Uniform grid of intervals+1 points on [0, end].
std::vector<double> uniform_grid(double end, std::size_t intervals);

}  // namespace gphase::numerics
