#pragma once

#include <stdexcept>
#include <string>

namespace confined {

/// Confinement cases: two-dimensional channel (NC2), three-dimensional
/// square channel (NC3), parallel plates (PP), and the rectangular
/// cross-section generalisation of NC3 (Rect).
enum class Case { NC2, NC3, PP, Rect };

/// Channel geometry in narrow-domain variables. h is the confinement
/// parameter: the cross-section extent available to particle centres,
/// measured in particle diameters (H = eps*h). Rect carries the second
/// cross-section side m (h x m).
struct Geometry {
    Case kind = Case::NC2;
    double h = 1.0;
    double m = 1.0;  // Rect only

    static Geometry nc2(double h) { return Geometry{Case::NC2, h, 1.0}; }
    static Geometry nc3(double h) { return Geometry{Case::NC3, h, 1.0}; }
    static Geometry pp(double h) { return Geometry{Case::PP, h, 1.0}; }
    static Geometry rect(double h, double m) { return Geometry{Case::Rect, h, m}; }

    // ambient dimension d
    int ambient_dim() const { return kind == Case::NC2 ? 2 : 3; }

    // number of confined dimensions k
    int confined_dim() const {
        switch (kind) {
            case Case::NC2: return 1;
            case Case::NC3: return 2;
            case Case::PP: return 1;
            case Case::Rect: return 2;
        }
        return 1;
    }

    // effective dimension d_e = d - k (1 for channels, 2 for plates)
    int effective_dim() const { return ambient_dim() - confined_dim(); }

    // rescaled cross-section measure available to particle centres
    double cross_section() const {
        switch (kind) {
            case Case::NC2: return h;
            case Case::NC3: return h * h;
            case Case::PP: return h;
            case Case::Rect: return h * m;
        }
        return h;
    }

    void validate() const {
        if (!(h >= 0.0))
            throw std::domain_error("Geometry: confinement parameter h must be >= 0");
        if (kind == Case::Rect && !(m > 0.0))
            throw std::domain_error("Geometry: Rect cross-section side m must be > 0");
    }
};

inline const char* case_name(Case c) {
    switch (c) {
        case Case::NC2: return "nc2";
        case Case::NC3: return "nc3";
        case Case::PP: return "pp";
        case Case::Rect: return "rect";
    }
    return "?";
}

inline Case case_from_name(const std::string& s) {
    if (s == "nc2") return Case::NC2;
    if (s == "nc3") return Case::NC3;
    if (s == "pp") return Case::PP;
    if (s == "rect") return Case::Rect;
    throw std::domain_error("unknown geometry case: " + s);
}

}  // namespace confined
