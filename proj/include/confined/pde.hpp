#pragma once

#include "confined/geometry.hpp"

#include <vector>

namespace confined {

/// The four effective models compared throughout: the narrow-channel
/// equation, point particles (linear), the single-file limit, and the
/// unconfined bulk limit projected on the channel axis.
enum class ModelKind { NarrowChannel, PointParticles, SingleFile, Bulk };

enum class Bc { NoFlux, Periodic };

/// Axial potential; forces enter as f1 = -V'.
struct Potential {
    enum class Kind { None, TiltedSf, Cosine } kind = Kind::None;
    double f0 = 0.0;  // tilt (TiltedSf) or amplitude (Cosine)

    static Potential none() { return {}; }
    static Potential tilted_sf(double f0) { return Potential{Kind::TiltedSf, f0}; }
    static Potential cosine(double amplitude) { return Potential{Kind::Cosine, amplitude}; }
    double value(double x) const;
    double slope(double x) const;
};

/// Effective drift-diffusion problem: dp/dt = div[(1 + gamma p) grad p + V' p].
struct ModelSpec {
    ModelKind kind = ModelKind::PointParticles;
    double gamma = 0.0;  // nonlinear coefficient on the effective axis
    Bc bc = Bc::NoFlux;
    Potential potential;
};

/// gamma of each model kind on the effective axis for a concrete system:
/// narrow (N-1) eps^{d_e} alpha_h; point 0; single-file 2(N-1) eps; bulk
/// (N-1) eps^{d_e} alpha_bulk / A (the bulk solution rescaled by the cross
/// section so all four live on the same unit-mass axial density).
double effective_gamma(ModelKind kind, const Geometry& geom, int n_particles, double epsilon);

ModelSpec make_model(ModelKind kind, const Geometry& geom, int n_particles, double epsilon,
                     Bc bc, Potential pot = Potential::none());

/// Density on uniform nodes over [-1/2, 1/2]. Periodic fields carry the
/// closing node (values.back() == values.front()).
struct DensityField {
    std::vector<double> x;
    std::vector<double> values;
    double time = 0.0;
    int negative_excursions = 0;  // nodes below -1e-10 flagged by the solver

    double mass() const;  // trapezoidal integral
};

DensityField uniform_field(int m);
/// Top-hat of the given width, smoothed over one cell at each edge,
/// normalised to unit mass.
DensityField tophat_field(int m, double center = 0.0, double width = 0.2);

struct SolverOptions {
    int grid_m = 257;
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    bool upwind_drift = false;  // first-order upwind mobility in the drift flux
    std::vector<double> output_times;
};

/// Method-of-lines transient solve. Space: conservative finite volumes
/// with gradient-flow fluxes F = -p_lm d(log p + gamma p + V)/dx using the
/// logarithmic-mean mobility, which makes mass conservation and discrete
/// free-energy decay structural and the no-flux steady state coincide with
/// the algebraic minimiser. Time: adaptive Dormand-Prince (odeint).
std::vector<DensityField> solve_transient(const ModelSpec& model, const DensityField& init,
                                          const SolverOptions& opts);

/// F[p] = int(p log p + gamma/2 p^2 + V p); zero-density nodes contribute
/// their p log p -> 0 limit; values below -1e-12 are an error.
double free_energy(const DensityField& field, const ModelSpec& model);

struct SteadyState {
    DensityField field;
    double c;  // the constant in log p + gamma p + V = C
};

/// No-flux stationary state: pointwise solve of log p + gamma p + V = C
/// with the mass constraint (Newton in p per node, Newton in C for mass).
SteadyState steady_state_noflux(const ModelSpec& model, int grid_m);

// ---- two-dimensional (parallel-plates) variant -------------------------

struct DensityField2D {
    int nx = 0, ny = 0;
    std::vector<double> x, y;
    std::vector<double> values;  // row-major [iy][ix]
    double time = 0.0;

    double mass() const;
    double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * nx + ix]; }
    double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * nx + ix]; }
};

DensityField2D uniform_field_2d(int m);
DensityField2D tophat_field_2d(int m, double center_x = 0.0, double width = 0.2);

/// Same scheme tensorised on the unit square, no-flux walls, potential
/// acting along x.
std::vector<DensityField2D> solve_transient_2d(const ModelSpec& model,
                                               const DensityField2D& init,
                                               const SolverOptions& opts);

}  // namespace confined
