#ifndef EULERLAB_FIELD_HPP
#define EULERLAB_FIELD_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "eulerlab/grid.hpp"

namespace eulerlab {

/// Real node samples, x-fastest order, component-major.
struct PhysicalField {
    GridSpec grid;
    int components = 1;
    std::vector<double> values;

    PhysicalField() = default;
    PhysicalField(GridSpec g, int comps)
        : grid(g), components(comps), values(comps * g.node_count(), 0.0) {
        check_components(comps);
    }

    static void check_components(int comps) {
        if (comps != 1 && comps != 3 && comps != 6 && comps != 9)
            throw std::invalid_argument("PhysicalField: components must be 1, 3, 6 or 9");
    }

    double& at(int c, std::size_t idx) { return values[c * grid.node_count() + idx]; }
    double at(int c, std::size_t idx) const { return values[c * grid.node_count() + idx]; }
    double& at(int c, int i, int j, int k) { return at(c, grid.index(i, j, k)); }
    double at(int c, int i, int j, int k) const { return at(c, grid.index(i, j, k)); }

    const double* comp(int c) const { return values.data() + c * grid.node_count(); }
    double* comp(int c) { return values.data() + c * grid.node_count(); }

    bool finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Fourier coefficients c_k of f(x) = sum_k c_k e^{i k.x}, same layout as
/// PhysicalField with bin index mapped to wavenumbers by GridSpec::wavenumber.
struct SpectralField {
    GridSpec grid;
    int components = 1;
    std::vector<std::complex<double>> coeffs;

    SpectralField() = default;
    SpectralField(GridSpec g, int comps)
        : grid(g), components(comps), coeffs(comps * g.node_count(), {0.0, 0.0}) {
        PhysicalField::check_components(comps);
    }

    std::complex<double>& at(int c, std::size_t idx) { return coeffs[c * grid.node_count() + idx]; }
    std::complex<double> at(int c, std::size_t idx) const { return coeffs[c * grid.node_count() + idx]; }
    std::complex<double>& at(int c, int i, int j, int k) { return at(c, grid.index(i, j, k)); }
    std::complex<double> at(int c, int i, int j, int k) const { return at(c, grid.index(i, j, k)); }

    const std::complex<double>* comp(int c) const { return coeffs.data() + c * grid.node_count(); }
    std::complex<double>* comp(int c) { return coeffs.data() + c * grid.node_count(); }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (a != b) throw std::invalid_argument("fields live on different grids");
}

inline void require_vector(int components) {
    if (components != 3) throw std::invalid_argument("expected a 3-component vector field");
}

}  // namespace eulerlab

#endif
