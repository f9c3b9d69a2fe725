#include "confined/harness.hpp"

#include "confined/coefficients.hpp"
#include "confined/csv.hpp"
#include "confined/particles.hpp"
#include "confined/pde.hpp"
#include "confined/ratchet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace confined {

namespace {

double interp(const std::vector<double>& x, const std::vector<double>& p, double xi) {
    if (xi <= x.front()) return p.front();
    if (xi >= x.back()) return p.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xi);
    const size_t j = static_cast<size_t>(it - x.begin());
    const double t = (xi - x[j - 1]) / (x[j] - x[j - 1]);
    return p[j - 1] + t * (p[j] - p[j - 1]);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ComparisonReport compare_densities(const std::vector<double>& xa,
                                   const std::vector<double>& pa,
                                   const std::vector<double>& xb,
                                   const std::vector<double>& pb,
                                   const std::vector<double>* stderr_b) {
    if (xa.size() < 2 || xb.size() < 2)
        throw std::domain_error("compare_densities: need at least two nodes");
    const double lo = std::max(xa.front(), xb.front());
    const double hi = std::min(xa.back(), xb.back());
    if (!(hi > lo)) throw std::domain_error("compare_densities: disjoint domains");

    // evaluate on the finer of the two grids, restricted to the overlap
    const std::vector<double>& grid = xa.size() >= xb.size() ? xa : xb;
    std::vector<double> pts;
    for (double x : grid)
        if (x >= lo - 1e-15 && x <= hi + 1e-15) pts.push_back(std::clamp(x, lo, hi));

    ComparisonReport rep;
    rep.n_points = static_cast<int>(pts.size());
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < pts.size(); ++k) {
        const double a = interp(xa, pa, pts[k]);
        const double b = interp(xb, pb, pts[k]);
        const double w = (k == 0 || k + 1 == pts.size()) ? 0.5 : 1.0;
        num += w * (a - b) * (a - b);
        den += w * b * b;
        rep.l_inf = std::max(rep.l_inf, std::abs(a - b));
        if (stderr_b) {
            const double se = interp(xb, *stderr_b, pts[k]);
            if (se > 0.0) {
                rep.has_z = true;
                rep.max_abs_z = std::max(rep.max_abs_z, std::abs(a - b) / se);
            }
        }
    }
    rep.rel_l2 = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return rep;
}

std::string ExperimentConfig::get(const std::string& k) const {
    const auto it = kv.find(k);
    if (it == kv.end())
        throw std::domain_error("config '" + name + "': missing key '" + k + "'");
    return it->second;
}

std::string ExperimentConfig::get(const std::string& k, const std::string& dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
}

double ExperimentConfig::get_real(const std::string& k) const { return std::stod(get(k)); }
double ExperimentConfig::get_real(const std::string& k, double dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : std::stod(it->second);
}
long ExperimentConfig::get_int(const std::string& k) const { return std::stol(get(k)); }
long ExperimentConfig::get_int(const std::string& k, long dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : std::stol(it->second);
}

std::vector<double> ExperimentConfig::get_list(const std::string& k) const {
    std::vector<double> out;
    std::stringstream ss(get(k));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    ExperimentConfig cfg;
    cfg.name = path;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config " + path + ": bad line '" + line + "'");
        cfg.kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

std::vector<double> parse_range(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() == 1) return {parts[0]};
    if (parts.size() != 3) throw std::domain_error("range must be min:max:steps");
    const int n = static_cast<int>(parts[2]);
    if (n < 1) throw std::domain_error("range needs steps >= 1");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = n == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * i / (n - 1.0);
    return out;
}

namespace {

struct Report {
    std::string text;
    bool pass = true;

    void line(const std::string& s) { text += s + "\n"; }
    void check(bool ok, const std::string& what) {
        line(std::string(ok ? "[ok]   " : "[FAIL] ") + what);
        pass = pass && ok;
    }
};

void write_report(const std::string& out_dir, const Report& rep) {
    std::ofstream f(out_dir + "/report.txt");
    f << kCsvSchemaComment << "\n" << rep.text;
    f << (rep.pass ? "RESULT: pass\n" : "RESULT: fail\n");
}

ModelKind model_from_name(const std::string& s) {
    if (s == "narrow") return ModelKind::NarrowChannel;
    if (s == "point") return ModelKind::PointParticles;
    if (s == "singlefile") return ModelKind::SingleFile;
    if (s == "bulk") return ModelKind::Bulk;
    throw std::domain_error("unknown model kind: " + s);
}

std::vector<std::string> split_csv_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

// ---- coef_table ---------------------------------------------------------

bool run_coef_table(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Case c = case_from_name(cfg.get("case"));
    const auto hs = parse_range(cfg.get("h_range"));
    const int n = static_cast<int>(cfg.get_int("n", 1));
    const double eps = cfg.get_real("eps", 1e-3);
    const double m = cfg.get_real("m", 1.0);
    CsvWriter csv(out_dir + "/coef.csv");
    csv.header("h,alpha,g,phi,excluded_volume");
    for (double h : hs) {
        Geometry g{c, h, m};
        const auto b = bundle(g, n, eps);
        csv.row(h, b.alpha, b.g, b.phi, b.excluded_volume);
    }
    Report rep;
    rep.line("coef_table: " + std::to_string(hs.size()) + " rows");
    write_report(out_dir, rep);
    return rep.pass;
}

// ---- transient_compare (Figs. 5/6 style) --------------------------------

bool run_transient_compare(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Geometry geom{case_from_name(cfg.get("case", "nc2")), cfg.get_real("h"), 1.0};
    const int n = static_cast<int>(cfg.get_int("n"));
    const double eps = cfg.get_real("eps");
    const Bc bc = cfg.get("bc", "noflux") == "periodic" ? Bc::Periodic : Bc::NoFlux;
    const double t_end = cfg.get_real("tend", 0.05);
    const int grid_m = static_cast<int>(cfg.get_int("grid", 257));
    const double init_width = cfg.get_real("init_width", 0.2);

    const auto model_names = split_csv_names(cfg.get("models", "narrow,point,singlefile,bulk"));

    SolverOptions opts;
    opts.output_times = {t_end};
    std::map<std::string, DensityField> finals;
    for (const auto& nm : model_names) {
        const ModelKind kind = model_from_name(nm);
        ModelSpec spec = make_model(kind, geom, n, eps, bc);
        DensityField init = tophat_field(grid_m, 0.0, init_width);
        auto fields = solve_transient(spec, init, opts);
        finals[nm] = fields.back();
        CsvWriter csv(out_dir + "/pde_" + nm + ".csv");
        csv.header("t,x,p");
        for (size_t i = 0; i < init.x.size(); ++i) csv.row(0.0, init.x[i], init.values[i]);
        for (size_t i = 0; i < fields.back().x.size(); ++i)
            csv.row(t_end, fields.back().x[i], fields.back().values[i]);
    }

    Report rep;
    rep.line("transient_compare: h=" + std::to_string(geom.h) + " N=" + std::to_string(n));

    const long reals = cfg.get_int("reals", 0);
    if (reals > 0) {
        SdeRunConfig sde;
        sde.geom = geom;
        sde.n = n;
        sde.epsilon = eps;
        sde.bc = bc == Bc::Periodic ? AxialBc::Periodic : AxialBc::NoFlux;
        sde.init_width = init_width;
        sde.dt = cfg.get_real("dt", 1e-5);
        sde.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
        HistogramSpec hist;
        hist.bins = static_cast<int>(cfg.get_int("bins", 32));
        hist.realizations = static_cast<int>(reals);
        hist.output_times = {t_end};
        const auto mc = run_ensemble(sde, hist);

        CsvWriter csv(out_dir + "/mc.csv");
        csv.header("t,x,p,stderr");
        for (int b = 0; b < hist.bins; ++b)
            csv.row(t_end, mc.centers[b], mc.density[0][b], mc.stderr_[0][b]);

        double best = 1e300;
        std::string best_name;
        for (const auto& nm : model_names) {
            const auto& f = finals[nm];
            const auto r = compare_densities(f.x, f.values, mc.centers, mc.density[0],
                                             &mc.stderr_[0]);
            rep.line("  relL2(" + nm + ", mc) = " + std::to_string(r.rel_l2));
            if (r.rel_l2 < best) {
                best = r.rel_l2;
                best_name = nm;
            }
        }
        if (cfg.has("mc_rel_l2_max")) {
            const auto r = compare_densities(finals.at("narrow").x, finals.at("narrow").values,
                                             mc.centers, mc.density[0], nullptr);
            rep.check(r.rel_l2 < cfg.get_real("mc_rel_l2_max"),
                      "narrow vs MC relL2 " + std::to_string(r.rel_l2) + " < " +
                          cfg.get("mc_rel_l2_max"));
        }
        if (cfg.get_int("require_narrow_best", 0) != 0)
            rep.check(best_name == "narrow", "narrow model closest to MC (best=" +
                                                  best_name + ")");
        rep.line("  residual overlap steps: " +
                 std::to_string(mc.counters.steps_with_residual) + " / " +
                 std::to_string(mc.counters.steps));
    } else if (model_names.size() > 1) {
        for (size_t i = 1; i < model_names.size(); ++i) {
            const auto& a = finals[model_names[i]];
            const auto& b = finals[model_names[0]];
            const auto r = compare_densities(a.x, a.values, b.x, b.values);
            rep.line("  relL2(" + model_names[i] + ", " + model_names[0] + ") = " +
                     std::to_string(r.rel_l2));
        }
    }

    write_report(out_dir, rep);
    return rep.pass;
}

// ---- fig8_sweep ----------------------------------------------------------

bool run_fig8_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto hs = cfg.get_list("h_list");
    const double phi = cfg.get_real("phi", 0.05);
    const int n = static_cast<int>(cfg.get_int("n", 30));
    const double t_end = cfg.get_real("tend", 0.05);
    const int grid_m = static_cast<int>(cfg.get_int("grid", 257));

    SolverOptions opts;
    opts.output_times = {t_end};

    CsvWriter csv(out_dir + "/fig8_distances.csv");
    csv.header("h,eps,d_singlefile,d_bulk,d_point");

    std::vector<double> d_sf, d_bulk;
    for (double h : hs) {
        const Geometry geom = Geometry::nc2(h);
        // fixed volume fraction: eps chosen per h
        const double eps = phi * 4.0 * (h + 1.0) / (n * 3.14159265358979323846);
        DensityField init = tophat_field(grid_m, 0.0, 0.2);
        std::map<ModelKind, DensityField> sol;
        for (ModelKind k : {ModelKind::NarrowChannel, ModelKind::PointParticles,
                            ModelKind::SingleFile, ModelKind::Bulk}) {
            auto fields = solve_transient(make_model(k, geom, n, eps, Bc::NoFlux), init, opts);
            sol[k] = fields.back();
        }
        const auto& narrow = sol[ModelKind::NarrowChannel];
        auto dist = [&](ModelKind k) {
            const auto r = compare_densities(sol[k].x, sol[k].values, narrow.x, narrow.values);
            return r.rel_l2;
        };
        const double dsf = dist(ModelKind::SingleFile);
        const double dbk = dist(ModelKind::Bulk);
        const double dpt = dist(ModelKind::PointParticles);
        d_sf.push_back(dsf);
        d_bulk.push_back(dbk);
        csv.row(h, eps, dsf, dbk, dpt);

        CsvWriter panel(out_dir + "/fig8_h" + std::to_string(h) + ".csv");
        panel.header("x,narrow,point,singlefile,bulk");
        for (size_t i = 0; i < narrow.x.size(); ++i)
            panel.row(narrow.x[i], narrow.values[i],
                      sol[ModelKind::PointParticles].values[i],
                      sol[ModelKind::SingleFile].values[i], sol[ModelKind::Bulk].values[i]);
    }

    Report rep;
    bool inc = true, dec = true;
    for (size_t i = 1; i < hs.size(); ++i) {
        inc = inc && d_sf[i] > d_sf[i - 1];
        dec = dec && d_bulk[i] < d_bulk[i - 1];
    }
    rep.check(inc, "distance(narrow, single-file) strictly increasing in h");
    rep.check(dec, "distance(narrow, bulk) strictly decreasing in h");
    write_report(out_dir, rep);
    return rep.pass;
}

// ---- ratchet_curve --------------------------------------------------------

bool run_ratchet_curve(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto gphis = cfg.get_list("gphi_list");
    const auto f0s = parse_range(cfg.get("f0_range"));
    const int grid_m = static_cast<int>(cfg.get_int("grid", 512));

    CsvWriter csv(out_dir + "/flux.csv");
    csv.header("gphi,f0,j0");
    Report rep;
    for (double g : gphis) {
        const auto curve = flux_curve(g, f0s, grid_m);
        for (const auto& [f0, j0] : curve) {
            csv.row(g, f0, j0);
            if (std::abs(f0) < 1e-12 && cfg.get_int("check_zero_tilt", 1))
                rep.check(std::abs(j0) < 1e-8, "J0(F0=0) ~ 0 at gphi=" + std::to_string(g));
            if (std::abs(f0) > 1e-12 && cfg.get_int("check_sign", 1))
                rep.check(j0 * f0 > 0.0, "sign(J0)=sign(F0) at gphi=" + std::to_string(g) +
                                             " F0=" + std::to_string(f0));
        }
    }
    write_report(out_dir, rep);
    return rep.pass;
}

// ---- mh_compare (Figs. 12/13 style) ---------------------------------------

bool run_mh_compare(const ExperimentConfig& cfg, const std::string& out_dir) {
    MhConfig mh;
    mh.n = static_cast<int>(cfg.get_int("n", 133));
    mh.epsilon = cfg.get_real("eps", 1e-3);
    mh.h = cfg.get_real("h", 1.47);
    mh.f0 = cfg.get_real("f0", 2.5);
    mh.steps = static_cast<std::uint64_t>(cfg.get_int("steps", 1000000));
    mh.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    mh.bins_x = static_cast<int>(cfg.get_int("bins_x", 48));
    mh.bins_y = static_cast<int>(cfg.get_int("bins_y", 16));

    const auto res = mh_sample(mh);

    {
        CsvWriter csv(out_dir + "/mh_hist.csv");
        csv.header("x,y,count");
        const double H = mh.epsilon * mh.h;
        for (int by = 0; by < res.bins_y; ++by)
            for (int bx = 0; bx < res.bins_x; ++bx)
                csv.row(-0.5 + (bx + 0.5) / res.bins_x, (-0.5 + (by + 0.5) / res.bins_y) * H,
                        static_cast<long>(res.counts[static_cast<size_t>(by) * res.bins_x + bx]));
    }
    std::vector<double> xc(res.bins_x);
    for (int b = 0; b < res.bins_x; ++b) xc[b] = -0.5 + (b + 0.5) / res.bins_x;
    {
        CsvWriter csv(out_dir + "/mh_profile.csv");
        csv.header("x,p");
        for (int b = 0; b < res.bins_x; ++b) csv.row(xc[b], res.marginal_x[b]);
    }

    // nonlinear coefficient: explicit config value, or computed g_h*phi
    Report rep;
    double gphi;
    if (cfg.get("gphi", "auto") == "auto") {
        const Geometry geom = Geometry::nc2(mh.h);
        gphi = nonlinearity_g(geom) * volume_fraction(geom, mh.n, mh.epsilon);
        rep.line("gphi = " + std::to_string(gphi) + " (computed from N, eps, h)");
    } else {
        gphi = cfg.get_real("gphi");
        rep.line("gphi = " + std::to_string(gphi) + " (explicit config value)");
    }

    const auto sol = solve_periodic_stationary(RatchetProblem{gphi, mh.f0, 512});
    {
        CsvWriter csv(out_dir + "/stationary.csv");
        csv.header("x,p");
        for (size_t i = 0; i < sol.x.size(); ++i) csv.row(sol.x[i], sol.p[i]);
    }

    const auto r = compare_densities(res.marginal_x.size() ? xc : sol.x, res.marginal_x,
                                     sol.x, sol.p);
    rep.line("relL2(MH marginal, stationary solve) = " + std::to_string(r.rel_l2));
    if (cfg.has("rel_l2_max"))
        rep.check(r.rel_l2 < cfg.get_real("rel_l2_max"),
                  "MH vs stationary relL2 < " + cfg.get("rel_l2_max"));
    rep.line("acceptance = " + std::to_string(res.acceptance) +
             ", delta = " + std::to_string(res.delta_final));
    write_report(out_dir, rep);
    return rep.pass;
}

}  // namespace

bool run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    const std::string kind = cfg.get("experiment");
    if (kind == "coef_table") return run_coef_table(cfg, out_dir);
    if (kind == "transient_compare") return run_transient_compare(cfg, out_dir);
    if (kind == "fig8_sweep") return run_fig8_sweep(cfg, out_dir);
    if (kind == "ratchet_curve") return run_ratchet_curve(cfg, out_dir);
    if (kind == "mh_compare") return run_mh_compare(cfg, out_dir);
    throw std::domain_error("unknown experiment kind: " + kind);
}

}  // namespace confined
