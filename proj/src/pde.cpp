#include "confined/pde.hpp"

#include "confined/coefficients.hpp"
#include "confined/ratchet.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace confined {

namespace {

constexpr double kPi = 3.14159265358979323846;

// logarithmic mean with the p log p -> p' limit handled; clamps away
// negative round-off so the mobility stays nonnegative
inline double log_mean(double a, double b) {
    a = std::max(a, 0.0);
    b = std::max(b, 0.0);
    if (a <= 0.0 || b <= 0.0) return 0.0;
    const double d = a - b;
    if (std::abs(d) <= 1e-10 * (a + b)) return 0.5 * (a + b);
    return d / (std::log(a) - std::log(b));
}

struct Rhs1D {
    const ModelSpec* model;
    int m;
    double dx;
    std::vector<double> v_node;   // V at nodes (no-flux form)
    std::vector<double> dv_face;  // V'(x_face)*dx (periodic form)

    void operator()(const std::vector<double>& p, std::vector<double>& dpdt,
                    double /*t*/) const {
        const double g = model->gamma;
        if (model->bc == Bc::NoFlux) {
            const int nf = m - 1;
            thread_local std::vector<double> flux;
            flux.resize(nf);
            for (int f = 0; f < nf; ++f) {
                const double dp = p[f + 1] - p[f];
                const double plm = log_mean(p[f], p[f + 1]);
                const double dv = v_node[f + 1] - v_node[f];
                flux[f] = -(dp + plm * (g * dp + dv)) / dx;
            }
            dpdt[0] = -flux[0] / (0.5 * dx);
            for (int i = 1; i < m - 1; ++i) dpdt[i] = -(flux[i] - flux[i - 1]) / dx;
            dpdt[m - 1] = flux[nf - 1] / (0.5 * dx);
        } else {
            thread_local std::vector<double> flux;
            flux.resize(m);
            for (int f = 0; f < m; ++f) {
                const int i = f, j = (f + 1) % m;
                const double dp = p[j] - p[i];
                const double plm = log_mean(p[i], p[j]);
                flux[f] = -(dp + plm * (g * dp + dv_face[f])) / dx;
            }
            for (int i = 0; i < m; ++i)
                dpdt[i] = -(flux[i] - flux[(i + m - 1) % m]) / dx;
        }
    }
};

struct Rhs1DUpwind {
    const ModelSpec* model;
    int m;
    double dx;
    std::vector<double> v_node, dv_face;

    void operator()(const std::vector<double>& p, std::vector<double>& dpdt,
                    double /*t*/) const {
        const double g = model->gamma;
        const bool periodic = model->bc == Bc::Periodic;
        const int nf = periodic ? m : m - 1;
        thread_local std::vector<double> flux;
        flux.resize(nf);
        for (int f = 0; f < nf; ++f) {
            const int i = f, j = periodic ? (f + 1) % m : f + 1;
            const double dp = p[j] - p[i];
            const double dv = periodic ? dv_face[f] : v_node[j] - v_node[i];
            const double du = g * dp + dv;              // drift part of the potential
            const double mob = du < 0.0 ? p[i] : p[j];  // first-order upwind mobility
            flux[f] = -(dp + mob * du) / dx;
        }
        if (periodic) {
            for (int i = 0; i < m; ++i)
                dpdt[i] = -(flux[i] - flux[(i + m - 1) % m]) / dx;
        } else {
            dpdt[0] = -flux[0] / (0.5 * dx);
            for (int i = 1; i < m - 1; ++i) dpdt[i] = -(flux[i] - flux[i - 1]) / dx;
            dpdt[m - 1] = flux[nf - 1] / (0.5 * dx);
        }
    }
};

std::vector<double> node_grid(int m) {
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = -0.5 + static_cast<double>(i) / (m - 1);
    return x;
}

double trapz_mass(const std::vector<double>& x, const std::vector<double>& p) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (p[i] + p[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

template <class Rhs>
std::vector<DensityField> integrate_model(const DensityField& init,
                                          const SolverOptions& opts, Rhs rhs, int m,
                                          bool periodic) {
    namespace ode = boost::numeric::odeint;

    std::vector<double> p(init.values.begin(), init.values.end() - (periodic ? 1 : 0));

    std::vector<double> times = opts.output_times;
    std::sort(times.begin(), times.end());
    if (times.empty()) throw std::domain_error("solve_transient: no output times");
    if (times.front() < init.time)
        throw std::domain_error("solve_transient: output time precedes initial time");
    std::vector<double> tpts;
    tpts.push_back(init.time);
    for (double t : times)
        if (t > tpts.back()) tpts.push_back(t);

    std::vector<std::vector<double>> snaps;
    snaps.reserve(tpts.size());
    auto observer = [&](const std::vector<double>& state, double) {
        snaps.push_back(state);
    };

    const double dx = periodic ? 1.0 / m : 1.0 / (m - 1);
    const double dt0 = 0.125 * dx * dx;
    try {
        ode::integrate_times(
            ode::make_controlled(opts.abs_tol, opts.rel_tol,
                                 ode::runge_kutta_dopri5<std::vector<double>>()),
            rhs, p, tpts.begin(), tpts.end(), dt0, observer);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("solve_transient: integrator failure: ") +
                                 e.what());
    }

    // map snapshots back to the requested times (duplicates included)
    std::vector<DensityField> out;
    const std::vector<double> x = init.x;
    for (double t : times) {
        size_t k = 0;
        while (k + 1 < tpts.size() && tpts[k] < t) ++k;
        DensityField f;
        f.x = x;
        f.time = t;
        f.values = snaps[k];
        if (periodic) f.values.push_back(f.values.front());
        for (double v : f.values)
            if (v < -1e-10) ++f.negative_excursions;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

double Potential::value(double x) const {
    switch (kind) {
        case Kind::TiltedSf: return potential_sf(x, f0);
        case Kind::Cosine: return f0 * std::cos(2.0 * kPi * x);
        case Kind::None: break;
    }
    return 0.0;
}

double Potential::slope(double x) const {
    switch (kind) {
        case Kind::TiltedSf: return potential_sf_slope(x, f0);
        case Kind::Cosine: return -2.0 * kPi * f0 * std::sin(2.0 * kPi * x);
        case Kind::None: break;
    }
    return 0.0;
}

double effective_gamma(ModelKind kind, const Geometry& geom, int n_particles,
                       double epsilon) {
    geom.validate();
    if (n_particles < 1) throw std::domain_error("effective_gamma: need N >= 1");
    const double nm1 = static_cast<double>(n_particles - 1);
    const int de = geom.effective_dim();
    switch (kind) {
        case ModelKind::PointParticles:
            return 0.0;
        case ModelKind::NarrowChannel:
            return nm1 * std::pow(epsilon, de) * alpha(geom);
        case ModelKind::SingleFile:
            if (de != 1)
                throw std::domain_error("effective_gamma: single-file limit is 1D only");
            return 2.0 * nm1 * epsilon;
        case ModelKind::Bulk: {
            const double a_bulk = geom.ambient_dim() == 2 ? kPi : 4.0 * kPi / 3.0;
            return nm1 * std::pow(epsilon, de) * a_bulk / geom.cross_section();
        }
    }
    throw std::domain_error("effective_gamma: bad model kind");
}

ModelSpec make_model(ModelKind kind, const Geometry& geom, int n_particles, double epsilon,
                     Bc bc, Potential pot) {
    ModelSpec spec;
    spec.kind = kind;
    spec.gamma = effective_gamma(kind, geom, n_particles, epsilon);
    spec.bc = bc;
    spec.potential = pot;
    return spec;
}

double DensityField::mass() const { return trapz_mass(x, values); }

DensityField uniform_field(int m) {
    if (m < 8) throw std::domain_error("uniform_field: m >= 8 required");
    DensityField f;
    f.x = node_grid(m);
    f.values.assign(m, 1.0);
    return f;
}

DensityField tophat_field(int m, double center, double width) {
    if (m < 8) throw std::domain_error("tophat_field: m >= 8 required");
    DensityField f;
    f.x = node_grid(m);
    f.values.resize(m);
    const double dx = 1.0 / (m - 1);
    const double lo = center - 0.5 * width, hi = center + 0.5 * width;
    for (int i = 0; i < m; ++i) {
        // unit plateau with a one-cell linear ramp at each edge
        const double up = std::clamp((f.x[i] - lo) / dx + 0.5, 0.0, 1.0);
        const double dn = std::clamp((hi - f.x[i]) / dx + 0.5, 0.0, 1.0);
        f.values[i] = std::min(up, dn);
    }
    const double mass = f.mass();
    for (auto& v : f.values) v /= mass;
    return f;
}

std::vector<DensityField> solve_transient(const ModelSpec& model, const DensityField& init,
                                          const SolverOptions& opts) {
    const bool periodic = model.bc == Bc::Periodic;
    const int n = static_cast<int>(init.values.size());
    if (n < 8) throw std::domain_error("solve_transient: grid too small");
    if (periodic && std::abs(init.values.front() - init.values.back()) > 1e-12)
        throw std::domain_error("solve_transient: periodic init must close (p[0] == p[M])");
    const int m = periodic ? n - 1 : n;
    const double dx = periodic ? 1.0 / m : 1.0 / (m - 1);

    std::vector<double> v_node, dv_face;
    if (!periodic) {
        v_node.resize(m);
        for (int i = 0; i < m; ++i) v_node[i] = model.potential.value(init.x[i]);
    } else {
        dv_face.resize(m);
        for (int f = 0; f < m; ++f) {
            const double xf = -0.5 + (f + 0.5) * dx;
            dv_face[f] = model.potential.slope(xf) * dx;
        }
    }

    if (opts.upwind_drift) {
        Rhs1DUpwind rhs{&model, m, dx, v_node, dv_face};
        return integrate_model(init, opts, rhs, m, periodic);
    }
    Rhs1D rhs{&model, m, dx, v_node, dv_face};
    return integrate_model(init, opts, rhs, m, periodic);
}

double free_energy(const DensityField& field, const ModelSpec& model) {
    const size_t n = field.values.size();
    std::vector<double> integrand(n);
    for (size_t i = 0; i < n; ++i) {
        const double p = field.values[i];
        if (p < -1e-12)
            throw std::domain_error("free_energy: negative density value");
        const double plogp = p > 0.0 ? p * std::log(p) : 0.0;
        integrand[i] = plogp + 0.5 * model.gamma * p * p +
                       model.potential.value(field.x[i]) * std::max(p, 0.0);
    }
    return trapz_mass(field.x, integrand);
}

SteadyState steady_state_noflux(const ModelSpec& model, int grid_m) {
    if (grid_m < 8) throw std::domain_error("steady_state_noflux: m >= 8 required");
    const double g = model.gamma;
    std::vector<double> x = node_grid(grid_m);
    std::vector<double> v(grid_m), p(grid_m), w(grid_m, 1.0 / (grid_m - 1));
    w.front() = w.back() = 0.5 / (grid_m - 1);
    for (int i = 0; i < grid_m; ++i) v[i] = model.potential.value(x[i]);
    if (!std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); }))
        throw std::domain_error("steady_state_noflux: potential unbounded on the domain");

    // inner solve: log p + g p = C - V pointwise, via Newton in log p
    auto solve_node = [&](double rhsv) {
        double t = std::min(rhsv, 700.0);  // t = log p
        for (int it = 0; it < 100; ++it) {
            const double e = std::exp(t);
            const double f = t + g * e - rhsv;
            const double step = f / (1.0 + g * e);
            t -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(t))) break;
        }
        return std::exp(t);
    };

    double c = 0.0;
    double mass = 0.0;
    for (int outer = 0; outer < 200; ++outer) {
        mass = 0.0;
        double dmass = 0.0;
        for (int i = 0; i < grid_m; ++i) {
            p[i] = solve_node(c - v[i]);
            mass += w[i] * p[i];
            dmass += w[i] * p[i] / (1.0 + g * p[i]);  // d p / d C
        }
        const double err = mass - 1.0;
        if (std::abs(err) < 1e-14) break;
        c -= err / dmass;
        if (!std::isfinite(c))
            throw std::runtime_error("steady_state_noflux: Newton diverged (last mass " +
                                     std::to_string(mass) + ")");
    }

    SteadyState out;
    out.field.x = std::move(x);
    out.field.values = std::move(p);
    out.c = c;
    return out;
}

// ---- 2D ----------------------------------------------------------------

double DensityField2D::mass() const {
    double s = 0.0;
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const double cell = 0.25 * (at(i, j) + at(i + 1, j) + at(i, j + 1) +
                                        at(i + 1, j + 1));
            s += cell * (x[i + 1] - x[i]) * (y[j + 1] - y[j]);
        }
    return s;
}

DensityField2D uniform_field_2d(int m) {
    DensityField2D f;
    f.nx = f.ny = m;
    f.x = node_grid(m);
    f.y = f.x;
    f.values.assign(static_cast<size_t>(m) * m, 1.0);
    return f;
}

DensityField2D tophat_field_2d(int m, double center_x, double width) {
    DensityField2D f = uniform_field_2d(m);
    DensityField strip = tophat_field(m, center_x, width);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) f.at(i, j) = strip.values[i];
    return f;
}

namespace {

struct Rhs2D {
    const ModelSpec* model;
    int m;
    double dx;
    std::vector<double> v_node;  // V(x) along the x axis

    void operator()(const std::vector<double>& p, std::vector<double>& dpdt,
                    double /*t*/) const {
        const double g = model->gamma;
        const int n = m;
        auto idx = [n](int i, int j) { return static_cast<size_t>(j) * n + i; };
        std::fill(dpdt.begin(), dpdt.end(), 0.0);
        // x-direction fluxes
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i + 1 < n; ++i) {
                const double a = p[idx(i, j)], b = p[idx(i + 1, j)];
                const double dp = b - a;
                const double plm = log_mean(a, b);
                const double dv = v_node[i + 1] - v_node[i];
                const double fl = -(dp + plm * (g * dp + dv)) / dx;
                const double wl = i == 0 ? 0.5 * dx : dx;
                const double wr = i + 1 == n - 1 ? 0.5 * dx : dx;
                dpdt[idx(i, j)] -= fl / wl;
                dpdt[idx(i + 1, j)] += fl / wr;
            }
        }
        // y-direction fluxes
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j + 1 < n; ++j) {
                const double a = p[idx(i, j)], b = p[idx(i, j + 1)];
                const double dp = b - a;
                const double plm = log_mean(a, b);
                const double fl = -(dp + plm * g * dp) / dx;
                const double wl = j == 0 ? 0.5 * dx : dx;
                const double wr = j + 1 == n - 1 ? 0.5 * dx : dx;
                dpdt[idx(i, j)] -= fl / wl;
                dpdt[idx(i, j + 1)] += fl / wr;
            }
        }
    }
};

}  // namespace

std::vector<DensityField2D> solve_transient_2d(const ModelSpec& model,
                                               const DensityField2D& init,
                                               const SolverOptions& opts) {
    namespace ode = boost::numeric::odeint;
    if (model.bc != Bc::NoFlux)
        throw std::domain_error("solve_transient_2d: no-flux walls only");
    const int m = init.nx;
    if (m < 8 || init.ny != m) throw std::domain_error("solve_transient_2d: square grid");
    const double dx = 1.0 / (m - 1);

    Rhs2D rhs{&model, m, dx, {}};
    rhs.v_node.resize(m);
    for (int i = 0; i < m; ++i) rhs.v_node[i] = model.potential.value(init.x[i]);

    std::vector<double> times = opts.output_times;
    std::sort(times.begin(), times.end());
    std::vector<double> tpts{init.time};
    for (double t : times)
        if (t > tpts.back()) tpts.push_back(t);

    std::vector<std::vector<double>> snaps;
    auto observer = [&](const std::vector<double>& s, double) { snaps.push_back(s); };
    std::vector<double> state = init.values;
    try {
        ode::integrate_times(
            ode::make_controlled(opts.abs_tol, opts.rel_tol,
                                 ode::runge_kutta_dopri5<std::vector<double>>()),
            rhs, state, tpts.begin(), tpts.end(), 0.125 * dx * dx, observer);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("solve_transient_2d: integrator failure: ") +
                                 e.what());
    }

    std::vector<DensityField2D> out;
    for (double t : times) {
        size_t k = 0;
        while (k + 1 < tpts.size() && tpts[k] < t) ++k;
        DensityField2D f;
        f.nx = f.ny = m;
        f.x = init.x;
        f.y = init.y;
        f.time = t;
        f.values = snaps[k];
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace confined
