#pragma once

#include "confined/geometry.hpp"

namespace confined {

/// Excluded-volume coefficient alpha_h (alpha_{hm} for Rect): the
/// geometry-dependent factor multiplying the nonlinear term of the
/// effective drift-diffusion equation. Piecewise closed forms with the
/// analytic limit value at h = 0 and series evaluation near h = 0 where
/// the closed forms cancel catastrophically.
double alpha(const Geometry& geom);

/// Concentration-form nonlinearity g_h (collective diffusivity 1 + g_h c).
double nonlinearity_g(const Geometry& geom);

/// Total volume fraction of N particles of diameter eps in the physical
/// channel (note the (1+h) factors: the physical channel is wider than
/// the domain available to particle centres).
double volume_fraction(const Geometry& geom, int n_particles, double epsilon);

struct CoefficientBundle {
    double alpha;            // alpha_h
    double g;                // g_h
    double phi;              // volume fraction
    double excluded_volume;  // alpha_h * A (A = cross_section)
};

/// All coefficients for a concrete particle system. Throws if the
/// dilute-regime assumption is violated (phi >= 1).
CoefficientBundle bundle(const Geometry& geom, int n_particles, double epsilon);

struct OptimalWidth {
    double h_star;  // transport-maximising confinement parameter
    double g_max;   // g at the maximum
};

/// Maximiser of g_h over h, by golden-section search on (0.5, 5).
OptimalWidth optimal_width(Case c);

/// Relative gain in g_h when a channel of physical width eps*(h_total+1)
/// is subdivided into n_lanes equal lanes (NC3 subdivides both
/// cross-section sides, so n_lanes must be a perfect square there).
/// Returns g(h_lane)/g(h_total) - 1.
double subdivision_gain(Case c, double h_total, int n_lanes);

/// Nonlinear coefficients of the limiting one-dimensional models in their
/// natural concentration variables (not equal to lim g_h; the single-file
/// value normalises by rod length fraction rather than disc area).
inline constexpr double kLimitPointG = 0.0;
inline constexpr double kLimitSingleFileG = 2.0;
inline constexpr double kLimitBulk2dG = 4.0;

}  // namespace confined
