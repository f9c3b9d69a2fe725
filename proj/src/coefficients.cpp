#include "confined/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace confined {

namespace {

constexpr double kPi = 3.14159265358979323846;

// arccot on the branch continuous through +/-infinity (range (-pi/2, pi/2]).
// IEEE division gives atan(1/ +-0) = +-pi/2, which is the correct limit on
// either side of a sign change of the argument through infinity.
double arccot(double x) { return std::atan(1.0 / x); }

// Below this the raw formulas lose the O(h^2)/O(h^4) signal to rounding;
// switch to the power series about h = 0.
constexpr double kSeriesSwitch = 0.05;

// ---- NC2: two-dimensional channel of width h --------------------------

double alpha_nc2(double h) {
    if (h < kSeriesSwitch) {
        const double h2 = h * h;
        return 2.0 + h2 * (-1.0 / 6.0 + h2 * (-1.0 / 60.0 +
               h2 * (-1.0 / 224.0 + h2 * -1.736111265602759e-3)));
    }
    double m1 = kPi * h - 4.0 / 3.0;
    if (h <= 1.0) {
        m1 += (2.0 / 3.0) * (2.0 + h * h) * std::sqrt(1.0 - h * h) -
              2.0 * h * std::acos(h);
    }
    return m1 / (h * h);
}

// ---- NC3: three-dimensional channel of cross-section h x h ------------

double nc3_s(double h) {
    const double h2 = h * h;
    return 8.0 / 15.0 +
           (2.0 / 15.0) * std::sqrt(1.0 - h2) * (2.0 * h2 * h2 - 9.0 * h2 - 8.0) -
           (kPi / 3.0) * h * (h2 * h2 - 6.0 * h2 + 4.0 * h - 3.0) -
           2.0 * h * std::asin(h);
}

double nc3_sigma_a(double h) {
    const double h2 = h * h, h3 = h2 * h, h4 = h2 * h2;
    const double t = std::sqrt(std::fmax(0.0, 1.0 - 2.0 * h2));
    const double r1 = std::sqrt(1.0 - h2);
    return (2.0 / 15.0) * t * (h4 + 9.0 * h2 + 4.0) +
           (kPi / 12.0) * h * (3.0 * h4 - 18.0 * h2 + 16.0 * h - 9.0) +
           (1.0 / 6.0) * h3 * (h2 - 6.0) * arccot(2.0 * h * t / (1.0 - 3.0 * h2)) -
           (4.0 / 3.0) * h2 * arccot((1.0 - 2.0 * h2 - h4) / (2.0 * h2 * t)) -
           0.5 * h * arccot((2.0 * h * t * t * t + 2.0 * h * r1 * (3.0 * h2 - 1.0)) /
                            (1.0 - 5.0 * h2 + 6.0 * h4 +
                             4.0 * h2 * std::sqrt((1.0 - 2.0 * h2) * (1.0 - h2)))) +
           h * std::asin(h) -
           (1.0 / 3.0) * h * (h4 - 6.0 * h2 - 3.0) * std::asin(h / r1);
}

double nc3_sigma_b(double h) {
    const double h2 = h * h, h3 = h2 * h, h4 = h2 * h2;
    const double t = std::sqrt(std::fmax(0.0, 1.0 - 2.0 * h2));
    return (2.0 / 15.0) * t * (h4 + 9.0 * h2 + 4.0) +
           (kPi / 12.0) * h * (2.0 * h4 - 12.0 * h2 + 8.0 * h - 3.0) +
           (1.0 / 3.0) * h3 * (h2 - 6.0) * arccot(2.0 * h * t / (1.0 - 3.0 * h2)) +
           (4.0 / 3.0) * h2 * std::atan((1.0 - 2.0 * h2 - h4) / (2.0 * h2 * t)) +
           0.5 * h * arccot(4.0 * h * t * (3.0 * h2 - 1.0) /
                            (1.0 - 10.0 * h2 + 17.0 * h4));
}

const double kGoldenBreak = (std::sqrt(5.0) - 1.0) / 2.0;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double alpha_nc3(double h) {
    if (h < kSeriesSwitch) {
        const double h2 = h * h;
        return 2.0 + h2 * (-1.0 / 3.0 + h2 * (-17.0 / 360.0 +
               h2 * (-1.726191002330698e-2 + h2 * -9.273036182642e-3)));
    }
    const double h4 = h * h * h * h;
    if (h >= 1.0) {
        return ((4.0 * kPi / 3.0) * h * h - kPi * h + 8.0 / 15.0) / h4;
    }
    double m = nc3_s(h);
    if (h <= kGoldenBreak)
        m += nc3_sigma_a(h);
    else if (h < kInvSqrt2)
        m += nc3_sigma_b(h);
    return m / h4;
}

// ---- PP: parallel plates a distance h apart ----------------------------

double alpha_pp(double h) {
    if (h <= 1.0) return kPi * (6.0 - h * h) / 6.0;
    return kPi * (8.0 * h - 3.0) / (6.0 * h * h);
}

// ---- Rect: channel of cross-section h x m, valid form for m >= 1 ------

double alpha_rect(double h, double m) {
    if (m < 1.0) std::swap(h, m);  // cross-section symmetry
    const double hm2 = h * h * m * m;
    if (h < kSeriesSwitch) {
        const double h2 = h * h;
        return (kPi * m - 4.0 / 3.0 + (1.0 / 3.0 - kPi * m / 6.0) * h2 -
                h2 * h2 / 30.0) / (m * m);
    }
    if (h >= 1.0) {
        return (8.0 / 15.0 + (4.0 * kPi / 3.0) * h * m - (kPi / 2.0) * (h + m)) / hm2;
    }
    const double h2 = h * h;
    const double s = kPi * m * h2 * (1.0 - h2 / 6.0) - h * std::asin(h) +
                     (std::sqrt(1.0 - h2) / 15.0) * (2.0 * h2 * h2 - 9.0 * h2 - 8.0);
    return (8.0 / 15.0 + s) / hm2;
}

}  // namespace

double alpha(const Geometry& geom) {
    geom.validate();
    switch (geom.kind) {
        case Case::NC2: return geom.h == 0.0 ? 2.0 : alpha_nc2(geom.h);
        case Case::NC3: return geom.h == 0.0 ? 2.0 : alpha_nc3(geom.h);
        case Case::PP: return alpha_pp(geom.h);
        case Case::Rect:
            if (geom.h == 0.0 && geom.m == 0.0)
                throw std::domain_error("alpha: Rect with h = m = 0 is degenerate");
            return alpha_rect(geom.h, geom.m);
    }
    throw std::domain_error("alpha: bad geometry case");
}

double nonlinearity_g(const Geometry& geom) {
    const double a = alpha(geom);
    switch (geom.kind) {
        case Case::NC2: return (4.0 / kPi) * (geom.h + 1.0) * a;
        case Case::NC3: return (6.0 / kPi) * (geom.h + 1.0) * (geom.h + 1.0) * a;
        case Case::PP: return (6.0 / kPi) * (geom.h + 1.0) * a;
        case Case::Rect:
            // concentration form for the rectangular channel (h+1)(m+1) section
            return (6.0 / kPi) * (geom.h + 1.0) * (geom.m + 1.0) * a;
    }
    throw std::domain_error("nonlinearity_g: bad geometry case");
}

double volume_fraction(const Geometry& geom, int n_particles, double epsilon) {
    geom.validate();
    if (n_particles < 1) throw std::domain_error("volume_fraction: need N >= 1");
    if (!(epsilon > 0.0)) throw std::domain_error("volume_fraction: need eps > 0");
    const double n = static_cast<double>(n_particles);
    switch (geom.kind) {
        case Case::NC2: return n * kPi * epsilon / (4.0 * (geom.h + 1.0));
        case Case::NC3:
            return n * kPi * epsilon / (6.0 * (geom.h + 1.0) * (geom.h + 1.0));
        case Case::PP: return n * kPi * epsilon * epsilon / (6.0 * (geom.h + 1.0));
        case Case::Rect:
            return n * kPi * epsilon / (6.0 * (geom.h + 1.0) * (geom.m + 1.0));
    }
    throw std::domain_error("volume_fraction: bad geometry case");
}

CoefficientBundle bundle(const Geometry& geom, int n_particles, double epsilon) {
    CoefficientBundle b;
    b.alpha = alpha(geom);
    b.g = nonlinearity_g(geom);
    b.phi = volume_fraction(geom, n_particles, epsilon);
    b.excluded_volume = b.alpha * geom.cross_section();
    if (b.phi >= 1.0)
        throw std::domain_error("bundle: volume fraction >= 1, outside the dilute regime");
    return b;
}

OptimalWidth optimal_width(Case c) {
    if (c == Case::Rect)
        throw std::domain_error("optimal_width: defined for NC2, NC3, PP only");
    auto g = [&](double h) { return nonlinearity_g(Geometry{c, h, 1.0}); };
    // golden-section search for the maximum on (0.5, 5)
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.5, b = 5.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    while (b - a > 1e-6) {
        if (f1 > f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = g(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = g(x2);
        }
    }
    const double hs = 0.5 * (a + b);
    return OptimalWidth{hs, g(hs)};
}

double subdivision_gain(Case c, double h_total, int n_lanes) {
    if (!(h_total > 0.0)) throw std::domain_error("subdivision_gain: h_total > 0 required");
    if (n_lanes < 1) throw std::domain_error("subdivision_gain: n_lanes >= 1 required");
    double split = static_cast<double>(n_lanes);
    if (c == Case::NC3) {
        // square cross-section: lanes are formed by splitting both sides
        const int side = static_cast<int>(std::lround(std::sqrt(split)));
        if (side * side != n_lanes)
            throw std::domain_error("subdivision_gain: NC3 lane count must be a perfect square");
        split = static_cast<double>(side);
    }
    const double h_lane = (h_total + 1.0) / split - 1.0;
    if (h_lane < 0.0)
        throw std::domain_error("subdivision_gain: lane width below one particle diameter");
    const double g0 = nonlinearity_g(Geometry{c, h_total, 1.0});
    const double g1 = nonlinearity_g(Geometry{c, h_lane, 1.0});
    return g1 / g0 - 1.0;
}

}  // namespace confined
