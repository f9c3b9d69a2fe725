#include "confined/ratchet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace confined {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNewtonTol = 1e-12;

// 4th-order central derivative on the uniform periodic grid
void periodic_derivative(const std::vector<double>& p, std::vector<double>& dp) {
    const int m = static_cast<int>(p.size());
    const double c = m / 12.0;
    for (int i = 0; i < m; ++i) {
        const int ip1 = (i + 1) % m, ip2 = (i + 2) % m;
        const int im1 = (i + m - 1) % m, im2 = (i + m - 2) % m;
        dp[i] = c * (8.0 * (p[ip1] - p[im1]) - (p[ip2] - p[im2]));
    }
}

struct NewtonResult {
    std::vector<double> p;
    double j0;
    double residual;
};

NewtonResult newton_solve(double g_phi, double f0, int m, std::vector<double> p, double j0) {
    std::vector<double> vp(m), dp(m);
    for (int i = 0; i < m; ++i) vp[i] = potential_sf_slope(-0.5 + static_cast<double>(i) / m, f0);

    Eigen::MatrixXd jac(m + 1, m + 1);
    Eigen::VectorXd rhs(m + 1), delta(m + 1);
    const double c = m / 12.0;

    double res = 0.0;
    for (int iter = 0; iter < 80; ++iter) {
        periodic_derivative(p, dp);
        res = 0.0;
        for (int i = 0; i < m; ++i) {
            const double f = (1.0 + g_phi * p[i]) * dp[i] + vp[i] * p[i] + j0;
            rhs[i] = -f;
            res = std::max(res, std::abs(f));
        }
        const double mass = std::accumulate(p.begin(), p.end(), 0.0) / m;
        rhs[m] = -(mass - 1.0);
        res = std::max(res, std::abs(mass - 1.0));
        if (res < kNewtonTol) break;
        if (iter == 79 || !std::isfinite(res))
            throw std::runtime_error(
                "ratchet Newton diverged (g_phi=" + std::to_string(g_phi) +
                ", F0=" + std::to_string(f0) + "); use continuation in F0/g_phi");

        jac.setZero();
        for (int i = 0; i < m; ++i) {
            const double mob = 1.0 + g_phi * p[i];
            const int ip1 = (i + 1) % m, ip2 = (i + 2) % m;
            const int im1 = (i + m - 1) % m, im2 = (i + m - 2) % m;
            jac(i, ip1) += 8.0 * c * mob;
            jac(i, im1) -= 8.0 * c * mob;
            jac(i, ip2) -= c * mob;
            jac(i, im2) += c * mob;
            jac(i, i) += g_phi * dp[i] + vp[i];
            jac(i, m) = 1.0;
        }
        for (int jcol = 0; jcol < m; ++jcol) jac(m, jcol) = 1.0 / m;

        delta = jac.partialPivLu().solve(rhs);
        for (int i = 0; i < m; ++i) p[i] += delta[i];
        j0 += delta[m];
    }
    return NewtonResult{std::move(p), j0, res};
}

RatchetSolution package(int m, NewtonResult&& nr, double g_phi, double f0) {
    RatchetSolution sol;
    sol.g_phi = g_phi;
    sol.f0 = f0;
    sol.j0 = nr.j0;
    sol.residual = nr.residual;
    sol.x.resize(m + 1);
    sol.p.resize(m + 1);
    for (int i = 0; i < m; ++i) {
        sol.x[i] = -0.5 + static_cast<double>(i) / m;
        sol.p[i] = nr.p[i];
    }
    sol.x[m] = 0.5;
    sol.p[m] = nr.p[0];
    return sol;
}

std::vector<double> boltzmann_zero_tilt(int m) {
    std::vector<double> p(m);
    double mean = 0.0;
    for (int i = 0; i < m; ++i) {
        p[i] = std::exp(-potential_sf(-0.5 + static_cast<double>(i) / m, 0.0));
        mean += p[i];
    }
    mean /= m;
    for (auto& v : p) v /= mean;
    return p;
}

}  // namespace

double potential_sf(double x, double f0) {
    return std::sin(2.0 * kPi * x) + 0.25 * std::sin(4.0 * kPi * x) - f0 * x;
}

double potential_sf_slope(double x, double f0) {
    return 2.0 * kPi * std::cos(2.0 * kPi * x) + kPi * std::cos(4.0 * kPi * x) - f0;
}

RatchetSolution solve_periodic_stationary(const RatchetProblem& prob) {
    if (prob.g_phi < 0.0) throw std::domain_error("ratchet: g_phi >= 0 required");
    if (prob.grid_m < 16) throw std::domain_error("ratchet: grid_m >= 16 required");
    const int m = prob.grid_m;

    std::vector<double> p = boltzmann_zero_tilt(m);
    double j0 = 0.0;

    const int n_f = std::max(1, static_cast<int>(std::ceil(std::abs(prob.f0) / 0.5)));
    for (int k = 1; k <= n_f; ++k) {
        auto nr = newton_solve(0.0, prob.f0 * k / n_f, m, std::move(p), j0);
        p = std::move(nr.p);
        j0 = nr.j0;
    }
    const int n_g = std::max(1, static_cast<int>(std::ceil(prob.g_phi / 0.1)));
    NewtonResult nr{std::move(p), j0, 0.0};
    for (int k = 1; k <= n_g; ++k)
        nr = newton_solve(prob.g_phi * k / n_g, prob.f0, m, std::move(nr.p), nr.j0);
    if (prob.g_phi == 0.0)  // no g-continuation ran; make residual current
        nr = newton_solve(0.0, prob.f0, m, std::move(nr.p), nr.j0);
    return package(m, std::move(nr), prob.g_phi, prob.f0);
}

RatchetSolution solve_periodic_stationary(const RatchetProblem& prob,
                                          const RatchetSolution& warm) {
    if (static_cast<int>(warm.p.size()) != prob.grid_m + 1)
        return solve_periodic_stationary(prob);
    std::vector<double> p(warm.p.begin(), warm.p.end() - 1);
    auto nr = newton_solve(prob.g_phi, prob.f0, prob.grid_m, std::move(p), warm.j0);
    return package(prob.grid_m, std::move(nr), prob.g_phi, prob.f0);
}

std::vector<std::pair<double, double>> flux_curve(double g_phi,
                                                  const std::vector<double>& f0_values,
                                                  int grid_m) {
    std::vector<std::pair<double, double>> out(f0_values.size());
    std::vector<size_t> order(f0_values.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return f0_values[a] < f0_values[b];
    });
    // pivot: the sweep value closest to zero tilt, reached by full continuation
    size_t pivot = 0;
    for (size_t k = 1; k < order.size(); ++k)
        if (std::abs(f0_values[order[k]]) < std::abs(f0_values[order[pivot]])) pivot = k;

    RatchetSolution sol =
        solve_periodic_stationary(RatchetProblem{g_phi, f0_values[order[pivot]], grid_m});
    out[order[pivot]] = {sol.f0, sol.j0};

    auto walk = [&](size_t from, int dir, RatchetSolution start) {
        RatchetSolution cur = std::move(start);
        for (size_t k = from; k < order.size();
             k = static_cast<size_t>(static_cast<long>(k) + dir)) {
            const double target = f0_values[order[k]];
            double f = cur.f0;
            while (std::abs(target - f) > 0.5) {
                f += std::copysign(0.5, target - f);
                cur = solve_periodic_stationary(RatchetProblem{g_phi, f, grid_m}, cur);
            }
            cur = solve_periodic_stationary(RatchetProblem{g_phi, target, grid_m}, cur);
            out[order[k]] = {cur.f0, cur.j0};
            if (dir < 0 && k == 0) break;
        }
    };
    if (pivot + 1 < order.size()) walk(pivot + 1, +1, sol);
    if (pivot > 0) walk(pivot - 1, -1, sol);
    return out;
}

}  // namespace confined
