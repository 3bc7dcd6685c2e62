#ifndef EULERLAB_GRID_HPP
#define EULERLAB_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eulerlab {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Uniform collocation grid on the periodic box [0,2pi)^3.
struct GridSpec {
    int n = 0;  // points per axis, even, >= 4

    GridSpec() = default;
    explicit GridSpec(int n_per_axis) : n(n_per_axis) {
        if (n < 4) throw std::invalid_argument("GridSpec: n_per_axis must be >= 4, got " + std::to_string(n));
        if (n % 2 != 0) throw std::invalid_argument("GridSpec: n_per_axis must be even, got " + std::to_string(n));
    }

    double spacing() const { return two_pi / n; }
    std::size_t node_count() const { return static_cast<std::size_t>(n) * n * n; }

    /// Integer wavenumber for FFT bin i, in {-n/2+1,...,n/2}.
    int wavenumber(int idx) const { return idx <= n / 2 ? idx : idx - n; }

    /// Largest |k_i| kept by the 2/3 rule.
    int dealias_limit() const { return n / 3; }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n) * k);
    }

    double node(int i) const { return spacing() * i; }

    bool operator==(const GridSpec& o) const { return n == o.n; }
    bool operator!=(const GridSpec& o) const { return n != o.n; }
};

}  // namespace eulerlab

#endif
