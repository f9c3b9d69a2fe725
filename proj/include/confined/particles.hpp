#pragma once

#include "confined/geometry.hpp"

#include <cstdint>
#include <vector>

namespace confined {

enum class AxialBc { NoFlux, Periodic };

enum class ForceKind { None, Constant, TiltedSf };

/// Drift field acting on each particle. TiltedSf applies the axial force
/// -V'(x, f0) of the tilted Smoluchowski-Feynman potential.
struct ForceSpec {
    ForceKind kind = ForceKind::None;
    double fx = 0.0, fy = 0.0, fz = 0.0;  // Constant
    double f0 = 0.0;                      // TiltedSf

    static ForceSpec none() { return {}; }
    static ForceSpec constant(double fx, double fy = 0.0, double fz = 0.0) {
        ForceSpec f;
        f.kind = ForceKind::Constant;
        f.fx = fx;
        f.fy = fy;
        f.fz = fz;
        return f;
    }
    static ForceSpec tilted_sf(double f0) {
        ForceSpec f;
        f.kind = ForceKind::TiltedSf;
        f.f0 = f0;
        return f;
    }
};

struct OverlapCounters {
    std::uint64_t steps = 0;
    std::uint64_t pairs_separated = 0;
    std::uint64_t steps_with_residual = 0;
    std::uint64_t residual_pairs = 0;
};

/// N hard discs/spheres in the physical channel. Positions are centre
/// coordinates: x axial in [-1/2,1/2]; confined coordinates in
/// [-H/2, H/2] with H = epsilon*h (PP keeps y unconfined in [-1/2,1/2]).
struct ParticleEnsemble {
    Geometry geom;
    double epsilon = 0.0;  // particle diameter (0 = point particles)
    AxialBc bc = AxialBc::NoFlux;
    int n = 0;
    std::vector<double> x, y, z;
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
    std::uint32_t step_index = 0;
    OverlapCounters counters;

    int dim() const { return geom.ambient_dim(); }
    double height() const { return epsilon * geom.h; }
};

ParticleEnsemble make_ensemble(const Geometry& geom, int n, double epsilon, AxialBc bc,
                               std::uint64_t seed, std::uint32_t stream);

/// Uniform non-overlapping placement with x in the given segment
/// (rejection sampling; throws if the region cannot hold the particles).
void init_uniform_segment(ParticleEnsemble& ens, double center, double width);
void init_uniform(ParticleEnsemble& ens);

/// Specular fold of a coordinate into [lo, hi]; exact for excursions of
/// any multiple of the width.
double reflect_into(double pos, double lo, double hi);

/// One Euler-Maruyama step: drift + sqrt(2 dt) noise, wall reflection,
/// then pairwise overlap resolution. Advances the ensemble's RNG counter.
void em_step(ParticleEnsemble& ens, double dt, const ForceSpec& force);

/// Test hook: identical update with caller-supplied noise (layout
/// axis-major: noise[a*n + i] for axis a, particle i), or zero noise when
/// noise == nullptr.
void em_step_with_noise(ParticleEnsemble& ens, double dt, const ForceSpec& force,
                        const double* noise);

/// Symmetric pair separation sweeps (up to K passes, cell-list driven).
/// Returns the number of still-overlapping pairs after the last pass.
int resolve_overlaps(ParticleEnsemble& ens);

/// Detected overlapping pairs (distance < epsilon - tol), for testing.
std::vector<std::pair<int, int>> overlapping_pairs(const ParticleEnsemble& ens, double tol);

struct HistogramSpec {
    int bins = 32;
    int realizations = 1;
    std::vector<double> output_times;
};

struct EnsembleHistograms {
    std::vector<double> times;
    std::vector<double> centers;
    std::vector<std::vector<double>> density;  // [time][bin], integrates to 1
    std::vector<std::vector<double>> stderr_;  // per-bin MC standard errors
    OverlapCounters counters;
};

struct SdeRunConfig {
    Geometry geom;
    int n = 1;
    double epsilon = 0.0;
    AxialBc bc = AxialBc::NoFlux;
    ForceSpec force;
    double init_center = 0.0;
    double init_width = 0.2;
    bool init_full = false;
    double dt = 1e-5;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
};

/// Ensemble of independent realizations, averaged into axial histograms
/// with across-realization standard errors. Deterministic for a given
/// seed independently of the thread count (integer tallies, counter RNG).
EnsembleHistograms run_ensemble(const SdeRunConfig& cfg, const HistogramSpec& spec);

/// Metropolis-Hastings equilibrium sampler for hard discs in the periodic
/// NC2 ratchet cell. Proposals are uniform squares in narrow-domain
/// coordinates; the tilt enters the acceptance ratio through the work
/// -F0*dx along the proposed displacement, so the chain samples the
/// stationary law of the tilted periodic dynamics.
struct MhConfig {
    int n = 1;
    double epsilon = 0.0;     // particle diameter
    double h = 1.47;          // confinement parameter
    double channel_height = -1.0;  // physical H; default epsilon*h
    double f0 = 0.0;
    bool use_potential = true;  // false: hard-core gas with no external field
    std::uint64_t steps = 1000000;
    std::uint64_t seed = 1;
    int bins_x = 48;
    int bins_y = 16;
    double delta_min = 1e-3;
    double delta_max = 0.12;  // cap keeps proposal-size bias small
    double burn_in_fraction = 0.10;
    int tally_stride = 1;  // tally every k-th step after burn-in
    int batches = 0;       // per-batch profiles for correlated-error estimates
};

struct MhResult {
    int bins_x = 0, bins_y = 0;
    std::vector<std::uint64_t> counts;  // row-major [iy][ix]
    std::vector<double> marginal_x;     // density over x, integrates to 1
    std::vector<double> profile_y;      // cross profile, mean 1
    // batch-resolved cross profiles (mean 1 each), for error bars in the
    // presence of chain autocorrelation
    std::vector<std::vector<double>> batch_profile_y;
    double acceptance = 0.0;
    double delta_final = 0.0;
    std::uint64_t tallies = 0;
};

MhResult mh_sample(const MhConfig& cfg);

}  // namespace confined
