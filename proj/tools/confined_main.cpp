// confined: nonlinear drift-diffusion of finite-size particles in narrow
// channels. Subcommands cover the coefficient formulas, the effective PDE,
// the periodic ratchet problem, the stochastic simulations, and
// config-driven experiment reproduction.

#include "confined/coefficients.hpp"
#include "confined/csv.hpp"
#include "confined/harness.hpp"
#include "confined/particles.hpp"
#include "confined/pde.hpp"
#include "confined/ratchet.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace confined;

namespace {

int cmd_coef(const std::string& case_name, double h, double m, int n, double eps,
             const std::string& table, const std::string& out) {
    const Case c = case_from_name(case_name);
    std::vector<double> hs;
    if (!table.empty())
        hs = parse_range(table);
    else
        hs = {h};
    CsvWriter csv(out.empty() ? "/dev/stdout" : out);
    csv.header("h,alpha,g,phi,excluded_volume");
    for (double hv : hs) {
        const Geometry g{c, hv, m};
        const auto b = bundle(g, n, eps);
        csv.row(hv, b.alpha, b.g, b.phi, b.excluded_volume);
    }
    return 0;
}

int cmd_pde(const std::string& model, const std::string& case_name, double h, double eps,
            int n, const std::string& bc_name, const std::string& pot, double f0,
            double tend, int grid, const std::string& out) {
    const Geometry geom{case_from_name(case_name), h, 1.0};
    ModelKind kind;
    if (model == "narrow")
        kind = ModelKind::NarrowChannel;
    else if (model == "point")
        kind = ModelKind::PointParticles;
    else if (model == "singlefile")
        kind = ModelKind::SingleFile;
    else if (model == "bulk")
        kind = ModelKind::Bulk;
    else
        throw CLI::ValidationError("--model must be narrow|point|singlefile|bulk");
    const Bc bc = bc_name == "periodic" ? Bc::Periodic : Bc::NoFlux;
    const Potential p = pot == "sf" ? Potential::tilted_sf(f0) : Potential::none();

    ModelSpec spec = make_model(kind, geom, n, eps, bc, p);
    SolverOptions opts;
    opts.grid_m = grid;
    opts.output_times = {tend};

    if (geom.effective_dim() == 2) {  // parallel plates: planar solve
        DensityField2D init = tophat_field_2d(std::min(grid, 129), 0.0, 0.2);
        const auto fields = solve_transient_2d(spec, init, opts);
        CsvWriter csv(out.empty() ? "/dev/stdout" : out);
        csv.header("t,x,y,p");
        for (const auto& f : fields)
            for (int j = 0; j < f.ny; ++j)
                for (int i = 0; i < f.nx; ++i)
                    csv.row(f.time, f.x[i], f.y[j], f.at(i, j));
        return 0;
    }

    DensityField init = tophat_field(grid, 0.0, 0.2);
    const auto fields = solve_transient(spec, init, opts);

    CsvWriter csv(out.empty() ? "/dev/stdout" : out);
    csv.header("t,x,p");
    for (size_t i = 0; i < init.x.size(); ++i) csv.row(0.0, init.x[i], init.values[i]);
    for (const auto& f : fields)
        for (size_t i = 0; i < f.x.size(); ++i) csv.row(f.time, f.x[i], f.values[i]);
    return 0;
}

int cmd_ratchet(const std::string& gphi_list, const std::string& f0_spec, int grid,
                const std::string& out, const std::string& profiles_out) {
    std::vector<double> gphis;
    {
        std::stringstream ss(gphi_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) gphis.push_back(std::stod(tok));
    }
    const auto f0s = parse_range(f0_spec);
    CsvWriter csv(out.empty() ? "/dev/stdout" : out);
    csv.header("gphi,f0,j0");
    for (double g : gphis) {
        const auto curve = flux_curve(g, f0s, grid);
        for (const auto& [f0, j0] : curve) csv.row(g, f0, j0);
    }
    if (!profiles_out.empty()) {
        CsvWriter pcsv(profiles_out);
        pcsv.header("gphi,f0,x,p");
        for (double g : gphis)
            for (double f0 : f0s) {
                const auto sol = solve_periodic_stationary(RatchetProblem{g, f0, grid});
                for (size_t i = 0; i < sol.x.size(); ++i)
                    pcsv.row(g, f0, sol.x[i], sol.p[i]);
            }
    }
    return 0;
}

int cmd_sde(int n, double eps, double h, double dt, double tend, int reals, double f0,
            std::uint64_t seed, int bins, const std::string& bc_name,
            const std::string& case_name, double init_width, const std::string& out) {
    SdeRunConfig cfg;
    cfg.geom = Geometry{case_from_name(case_name), h, 1.0};
    cfg.n = n;
    cfg.epsilon = eps;
    cfg.bc = bc_name == "periodic" ? AxialBc::Periodic : AxialBc::NoFlux;
    cfg.force = f0 != 0.0 ? ForceSpec::tilted_sf(f0) : ForceSpec::none();
    cfg.dt = dt;
    cfg.seed = seed;
    cfg.init_width = init_width;
    HistogramSpec spec;
    spec.bins = bins;
    spec.realizations = reals;
    spec.output_times = {0.0, tend};
    const auto hist = run_ensemble(cfg, spec);

    CsvWriter csv(out.empty() ? "/dev/stdout" : out);
    csv.header("t,x,p,stderr");
    for (size_t k = 0; k < hist.times.size(); ++k)
        for (size_t b = 0; b < hist.centers.size(); ++b)
            csv.row(hist.times[k], hist.centers[b], hist.density[k][b], hist.stderr_[k][b]);
    std::fprintf(stderr, "residual-overlap steps: %llu / %llu\n",
                 static_cast<unsigned long long>(hist.counters.steps_with_residual),
                 static_cast<unsigned long long>(hist.counters.steps));
    return 0;
}

int cmd_mh(int n, double eps, double h, double f0, long steps, std::uint64_t seed,
           int bins_x, int bins_y, double channel_height, const std::string& out,
           const std::string& marginal_out) {
    MhConfig cfg;
    cfg.n = n;
    cfg.epsilon = eps;
    cfg.h = h;
    cfg.f0 = f0;
    cfg.steps = static_cast<std::uint64_t>(steps);
    cfg.seed = seed;
    cfg.bins_x = bins_x;
    cfg.bins_y = bins_y;
    cfg.channel_height = channel_height;
    const auto res = mh_sample(cfg);

    const double H = channel_height > 0 ? channel_height : eps * h;
    CsvWriter csv(out.empty() ? "/dev/stdout" : out);
    csv.header("x,y,count");
    for (int by = 0; by < res.bins_y; ++by)
        for (int bx = 0; bx < res.bins_x; ++bx)
            csv.row(-0.5 + (bx + 0.5) / res.bins_x, (-0.5 + (by + 0.5) / res.bins_y) * H,
                    static_cast<long>(res.counts[static_cast<size_t>(by) * res.bins_x + bx]));
    if (!marginal_out.empty()) {
        CsvWriter mcsv(marginal_out);
        mcsv.header("x,p");
        for (int b = 0; b < res.bins_x; ++b)
            mcsv.row(-0.5 + (b + 0.5) / res.bins_x, res.marginal_x[b]);
    }
    std::fprintf(stderr, "acceptance %.3f, delta %.4f\n", res.acceptance, res.delta_final);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"confined-diffusion: excluded-volume transport in narrow channels"};
    app.require_subcommand(1);
    // --h is a domain flag (confinement parameter); keep help on --help only
    app.set_help_flag("--help", "print help");

    // coef
    std::string coef_case = "nc2", coef_table, coef_out;
    double coef_h = 1.0, coef_m = 1.0, coef_eps = 1e-3;
    int coef_n = 1;
    auto* coef = app.add_subcommand("coef", "excluded-volume coefficients");
    coef->set_help_flag("--help");
    coef->add_option("--case", coef_case, "nc2|nc3|pp|rect");
    coef->add_option("--h", coef_h, "confinement parameter");
    coef->add_option("--m", coef_m, "second cross-section side (rect)");
    coef->add_option("--n", coef_n, "particle count");
    coef->add_option("--eps", coef_eps, "particle diameter");
    coef->add_option("--table", coef_table, "h table: min:max:steps");
    coef->add_option("--out", coef_out, "output CSV (default stdout)");

    // pde
    std::string pde_model = "narrow", pde_case = "nc2", pde_bc = "noflux",
                pde_pot = "none", pde_out;
    double pde_h = 3.0, pde_eps = 0.01, pde_f0 = 0.0, pde_tend = 0.05;
    int pde_n = 30, pde_grid = 257;
    auto* pde = app.add_subcommand("pde", "effective transient solver");
    pde->set_help_flag("--help");
    pde->add_option("--model", pde_model, "narrow|point|singlefile|bulk");
    pde->add_option("--case", pde_case, "nc2|nc3|pp");
    pde->add_option("--h", pde_h, "confinement parameter");
    pde->add_option("--eps", pde_eps, "particle diameter");
    pde->add_option("--n", pde_n, "particle count");
    pde->add_option("--bc", pde_bc, "noflux|periodic");
    pde->add_option("--potential", pde_pot, "none|sf");
    pde->add_option("--f0", pde_f0, "tilt");
    pde->add_option("--tend", pde_tend, "final time");
    pde->add_option("--grid", pde_grid, "grid nodes");
    pde->add_option("--out", pde_out, "output CSV (default stdout)");

    // ratchet
    std::string rat_gphi = "0", rat_f0 = "-6:6:25", rat_out, rat_profiles;
    int rat_grid = 512;
    auto* rat = app.add_subcommand("ratchet", "periodic stationary flux problem");
    rat->set_help_flag("--help");
    rat->add_option("--gphi", rat_gphi, "g_h*phi value or comma list");
    rat->add_option("--f0", rat_f0, "tilt value or min:max:steps");
    rat->add_option("--grid", rat_grid, "collocation points");
    rat->add_option("--out", rat_out, "flux CSV (default stdout)");
    rat->add_option("--profiles", rat_profiles, "per-solution x,p CSV");

    // sde
    std::string sde_bc = "noflux", sde_case = "nc2", sde_out;
    double sde_eps = 0.01, sde_h = 3.0, sde_dt = 1e-5, sde_tend = 0.05, sde_f0 = 0.0,
           sde_width = 0.2;
    int sde_n = 30, sde_reals = 100, sde_bins = 32;
    std::uint64_t sde_seed = 1;
    auto* sde = app.add_subcommand("sde", "Euler-Maruyama hard-disc ensemble");
    sde->set_help_flag("--help");
    sde->add_option("--n", sde_n, "particles");
    sde->add_option("--eps", sde_eps, "diameter");
    sde->add_option("--h", sde_h, "confinement parameter");
    sde->add_option("--dt", sde_dt, "time step");
    sde->add_option("--tend", sde_tend, "final time");
    sde->add_option("--reals", sde_reals, "realizations");
    sde->add_option("--f0", sde_f0, "tilt force");
    sde->add_option("--seed", sde_seed, "seed");
    sde->add_option("--bins", sde_bins, "histogram bins");
    sde->add_option("--bc", sde_bc, "noflux|periodic");
    sde->add_option("--case", sde_case, "nc2|nc3|pp");
    sde->add_option("--init-width", sde_width, "initial segment width");
    sde->add_option("--out", sde_out, "output CSV (default stdout)");

    // mh
    std::string mh_out, mh_marginal;
    double mh_eps = 1e-3, mh_h = 1.47, mh_f0 = 2.5, mh_height = -1.0;
    int mh_n = 133, mh_bx = 48, mh_by = 16;
    long mh_steps = 1000000;
    std::uint64_t mh_seed = 1;
    auto* mh = app.add_subcommand("mh", "Metropolis-Hastings equilibrium sampler");
    mh->set_help_flag("--help");
    mh->add_option("--n", mh_n, "particles");
    mh->add_option("--eps", mh_eps, "diameter (0 = points)");
    mh->add_option("--h", mh_h, "confinement parameter");
    mh->add_option("--f0", mh_f0, "tilt");
    mh->add_option("--steps", mh_steps, "MH proposals");
    mh->add_option("--seed", mh_seed, "seed");
    mh->add_option("--bins", mh_bx, "x bins");
    mh->add_option("--bins-y", mh_by, "y bins");
    mh->add_option("--height", mh_height, "physical channel height (default eps*h)");
    mh->add_option("--out", mh_out, "2D histogram CSV (default stdout)");
    mh->add_option("--marginal", mh_marginal, "x-marginal CSV");

    // run / list-configs
    std::string run_config, run_out = "out";
    auto* run = app.add_subcommand("run", "run a bundled experiment config");
    run->add_option("--config", run_config, "config path")->required();
    run->add_option("--out", run_out, "output directory");
    auto* lst = app.add_subcommand("list-configs", "list bundled experiment configs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (coef->parsed())
            return cmd_coef(coef_case, coef_h, coef_m, coef_n, coef_eps, coef_table, coef_out);
        if (pde->parsed())
            return cmd_pde(pde_model, pde_case, pde_h, pde_eps, pde_n, pde_bc, pde_pot,
                           pde_f0, pde_tend, pde_grid, pde_out);
        if (rat->parsed())
            return cmd_ratchet(rat_gphi, rat_f0, rat_grid, rat_out, rat_profiles);
        if (sde->parsed())
            return cmd_sde(sde_n, sde_eps, sde_h, sde_dt, sde_tend, sde_reals, sde_f0,
                           sde_seed, sde_bins, sde_bc, sde_case, sde_width, sde_out);
        if (mh->parsed())
            return cmd_mh(mh_n, mh_eps, mh_h, mh_f0, mh_steps, mh_seed, mh_bx, mh_by,
                          mh_height, mh_out, mh_marginal);
        if (run->parsed()) {
            fs::create_directories(run_out);
            const bool ok = run_experiment(load_config(run_config), run_out);
            std::cout << (ok ? "PASS" : "FAIL") << " " << run_config << "\n";
            return ok ? 0 : 1;
        }
        if (lst->parsed()) {
            const fs::path dir = fs::exists("configs") ? "configs" : "../configs";
            if (!fs::exists(dir)) {
                std::cerr << "no configs/ directory found\n";
                return 1;
            }
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".cfg") std::cout << e.path().string() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
