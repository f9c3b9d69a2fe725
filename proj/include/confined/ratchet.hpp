#pragma once

#include <utility>
#include <vector>

namespace confined {

/// Tilted Smoluchowski-Feynman potential V(x, F0) and its derivative.
double potential_sf(double x, double f0);
double potential_sf_slope(double x, double f0);

struct RatchetProblem {
    double g_phi = 0.0;  // concentration-form nonlinearity strength g_h*phi
    double f0 = 0.0;     // tilt
    int grid_m = 512;    // collocation points on the periodic cell
};

/// Periodic stationary solution: (1 + g_phi p) p' + V'(x,F0) p = -J0 with
/// unit mass and periodicity. x/p carry the closing node (p[M] = p[0]).
struct RatchetSolution {
    std::vector<double> x, p;
    double j0 = 0.0;
    double residual = 0.0;  // L-inf of the flux relation at the nodes
    double g_phi = 0.0, f0 = 0.0;
};

/// Newton collocation solve with continuation from the zero-tilt
/// Boltzmann state (tilt steps <= 0.5, then g_phi steps <= 0.1).
RatchetSolution solve_periodic_stationary(const RatchetProblem& prob);

/// Warm-started solve from a previous solution at nearby parameters.
RatchetSolution solve_periodic_stationary(const RatchetProblem& prob,
                                          const RatchetSolution& warm);

/// J0 over a tilt sweep at fixed g_phi, continuation in F0 with warm
/// starts. Returns (F0, J0) pairs in the input order.
std::vector<std::pair<double, double>> flux_curve(double g_phi,
                                                  const std::vector<double>& f0_values,
                                                  int grid_m = 512);

}  // namespace confined
