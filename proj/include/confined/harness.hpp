#pragma once

#include <map>
#include <string>
#include <vector>

namespace confined {

/// Density comparison after linear interpolation to the finer grid.
/// l_inf is the absolute maximum difference; rel_l2 is ||a-b||_2/||b||_2
/// with b the reference. When the reference carries Monte Carlo standard
/// errors, per-bin z-scores are reported.
struct ComparisonReport {
    double rel_l2 = 0.0;
    double l_inf = 0.0;
    double max_abs_z = 0.0;
    bool has_z = false;
    int n_points = 0;
};

ComparisonReport compare_densities(const std::vector<double>& xa,
                                   const std::vector<double>& pa,
                                   const std::vector<double>& xb,
                                   const std::vector<double>& pb,
                                   const std::vector<double>* stderr_b = nullptr);

/// Flat key=value experiment description ('#' comments allowed).
struct ExperimentConfig {
    std::string name;
    std::map<std::string, std::string> kv;

    bool has(const std::string& k) const { return kv.count(k) > 0; }
    std::string get(const std::string& k) const;
    std::string get(const std::string& k, const std::string& dflt) const;
    double get_real(const std::string& k) const;
    double get_real(const std::string& k, double dflt) const;
    long get_int(const std::string& k) const;
    long get_int(const std::string& k, long dflt) const;
    std::vector<double> get_list(const std::string& k) const;  // comma separated
};

ExperimentConfig load_config(const std::string& path);

/// Runs one experiment, writing CSV artifacts and report.txt under
/// out_dir. Returns true when every threshold declared in the config
/// holds. Throws on invalid configs or sub-run failure.
bool run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Parses "min:max:steps" into an inclusive linear grid.
std::vector<double> parse_range(const std::string& spec);

}  // namespace confined
