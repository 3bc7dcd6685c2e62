#ifndef EULERLAB_OPS_HPP
#define EULERLAB_OPS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "eulerlab/fft.hpp"
#include "eulerlab/field.hpp"

namespace eulerlab {

inline constexpr double q_infinity = std::numeric_limits<double>::infinity();

namespace detail {

/// Derivative wavenumber: the Nyquist bin is zeroed so that i*k*c stays the
/// spectrum of a real field.
inline int deriv_wavenumber(const GridSpec& g, int idx) {
    if (idx == g.n / 2) return 0;
    return g.wavenumber(idx);
}

template <typename F>
inline void for_each_mode(const GridSpec& g, F&& body) {
    for (int kz = 0; kz < g.n; ++kz)
        for (int ky = 0; ky < g.n; ++ky)
            for (int kx = 0; kx < g.n; ++kx) body(kx, ky, kz, g.index(kx, ky, kz));
}

}  // namespace detail

/// Spectral gradient: output component 3*c+d holds d/dx_d of input component c.
inline SpectralField gradient(const SpectralField& F) {
    SpectralField out(F.grid, 3 * F.components);
    const std::complex<double> iu(0.0, 1.0);
    detail::for_each_mode(F.grid, [&](int kx, int ky, int kz, std::size_t idx) {
        const double k[3] = {
            static_cast<double>(detail::deriv_wavenumber(F.grid, kx)),
            static_cast<double>(detail::deriv_wavenumber(F.grid, ky)),
            static_cast<double>(detail::deriv_wavenumber(F.grid, kz))};
        for (int c = 0; c < F.components; ++c) {
            const std::complex<double> v = F.at(c, idx);
            for (int d = 0; d < 3; ++d) out.at(3 * c + d, idx) = iu * k[d] * v;
        }
    });
    return out;
}

inline SpectralField divergence(const SpectralField& V) {
    require_vector(V.components);
    SpectralField out(V.grid, 1);
    const std::complex<double> iu(0.0, 1.0);
    detail::for_each_mode(V.grid, [&](int kx, int ky, int kz, std::size_t idx) {
        const double k[3] = {
            static_cast<double>(detail::deriv_wavenumber(V.grid, kx)),
            static_cast<double>(detail::deriv_wavenumber(V.grid, ky)),
            static_cast<double>(detail::deriv_wavenumber(V.grid, kz))};
        out.at(0, idx) = iu * (k[0] * V.at(0, idx) + k[1] * V.at(1, idx) + k[2] * V.at(2, idx));
    });
    return out;
}

/// Orthogonal projection onto divergence-free fields; the k=0 mode is kept.
inline SpectralField leray_project(const SpectralField& V) {
    require_vector(V.components);
    SpectralField out(V.grid, 3);
    detail::for_each_mode(V.grid, [&](int kx, int ky, int kz, std::size_t idx) {
        const double k[3] = {
            static_cast<double>(detail::deriv_wavenumber(V.grid, kx)),
            static_cast<double>(detail::deriv_wavenumber(V.grid, ky)),
            static_cast<double>(detail::deriv_wavenumber(V.grid, kz))};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0) {
            for (int c = 0; c < 3; ++c) out.at(c, idx) = V.at(c, idx);
            return;
        }
        const std::complex<double> kdotv = k[0] * V.at(0, idx) + k[1] * V.at(1, idx) + k[2] * V.at(2, idx);
        for (int c = 0; c < 3; ++c) out.at(c, idx) = V.at(c, idx) - k[c] * kdotv / k2;
    });
    return out;
}

/// 2/3-rule truncation: zero every mode with any |k_i| > n/3.
inline SpectralField dealias(SpectralField&& F) {
    const GridSpec g = F.grid;
    const int n = g.n;
    const int lim = g.dealias_limit();
    auto bad = [&](int i) { return std::abs(g.wavenumber(i)) > lim; };
    const int x0 = lim + 1;  // bins with |k_x| > lim form the contiguous span [x0, x1]
    const int x1 = n - lim - 1;
    const std::complex<double> zero(0.0, 0.0);
    for (int c = 0; c < F.components; ++c)
        for (int kz = 0; kz < n; ++kz)
            for (int ky = 0; ky < n; ++ky) {
                std::complex<double>* row = F.comp(c) + g.index(0, ky, kz);
                if (bad(kz) || bad(ky))
                    std::fill(row, row + n, zero);
                else
                    std::fill(row + x0, row + x1 + 1, zero);
            }
    return std::move(F);
}

inline SpectralField dealias(const SpectralField& F) {
    SpectralField out = F;
    return dealias(std::move(out));
}

/// Translate by y: output samples the trigonometric interpolant at x - y.
/// The Nyquist bin gets the symmetric factor cos(k.y), which coincides with
/// the exact phase for lattice shifts.
inline SpectralField shift(const SpectralField& F, const std::array<double, 3>& y) {
    SpectralField out(F.grid, F.components);
    const int n = F.grid.n;
    std::array<std::vector<std::complex<double>>, 3> phase;
    for (int d = 0; d < 3; ++d) {
        phase[d].resize(n);
        for (int i = 0; i < n; ++i) {
            const int k = F.grid.wavenumber(i);
            if (i == n / 2)
                phase[d][i] = std::cos(k * y[d]);
            else
                phase[d][i] = std::exp(std::complex<double>(0.0, -k * y[d]));
        }
    }
    detail::for_each_mode(F.grid, [&](int kx, int ky, int kz, std::size_t idx) {
        const std::complex<double> p = phase[0][kx] * phase[1][ky] * phase[2][kz];
        for (int c = 0; c < F.components; ++c) out.at(c, idx) = p * F.at(c, idx);
    });
    return out;
}

inline PhysicalField shift(const PhysicalField& f, const std::array<double, 3>& y) {
    return to_physical(shift(to_spectral(f), y));
}

/// Pointwise Euclidean magnitude over components.
inline double node_magnitude(const PhysicalField& f, std::size_t idx) {
    double s = 0.0;
    for (int c = 0; c < f.components; ++c) {
        const double v = f.at(c, idx);
        s += v * v;
    }
    return std::sqrt(s);
}

/// L^q norm by node quadrature, h^3 * sum |f|^q then q-th root; q = inf is
/// the node max (a lower bound of the true sup).
inline double lebesgue_norm(const PhysicalField& f, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("lebesgue_norm: q must be >= 1");
    const std::size_t m = f.grid.node_count();
    if (q == q_infinity) {
        double mx = 0.0;
        for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, node_magnitude(f, i));
        return mx;
    }
    const double h = f.grid.spacing();
    double s = 0.0;
    if (q == 2.0) {
        for (double v : f.values) s += v * v;
        return std::sqrt(s * h * h * h);
    }
    for (std::size_t i = 0; i < m; ++i) s += std::pow(node_magnitude(f, i), q);
    return std::pow(s * h * h * h, 1.0 / q);
}

inline double lebesgue_norm(const SpectralField& F, double q) { return lebesgue_norm(to_physical(F), q); }

/// L^2 norm straight from coefficients (Parseval).
inline double l2_norm(const SpectralField& F) {
    double s = 0.0;
    for (const auto& c : F.coeffs) s += std::norm(c);
    return std::sqrt(s * two_pi * two_pi * two_pi);
}

/// ||grad f||_2 from coefficients.
inline double h1_seminorm(const SpectralField& F) {
    double s = 0.0;
    detail::for_each_mode(F.grid, [&](int kx, int ky, int kz, std::size_t idx) {
        const double a = detail::deriv_wavenumber(F.grid, kx);
        const double b = detail::deriv_wavenumber(F.grid, ky);
        const double c = detail::deriv_wavenumber(F.grid, kz);
        const double k2 = a * a + b * b + c * c;
        for (int comp = 0; comp < F.components; ++comp) s += k2 * std::norm(F.at(comp, idx));
    });
    return std::sqrt(s * two_pi * two_pi * two_pi);
}

/// Integral of f over the box by node sums.
inline double integral(const PhysicalField& f, int c = 0) {
    const std::size_t m = f.grid.node_count();
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += f.at(c, i);
    const double h = f.grid.spacing();
    return s * h * h * h;
}

/// Integral of A:B = sum_c A_c B_c over the box; exact for band-limited
/// factors whose total bandwidth stays under the grid Nyquist.
inline double contract_integral(const PhysicalField& A, const PhysicalField& B) {
    require_same_grid(A.grid, B.grid);
    if (A.components != B.components) throw std::invalid_argument("contract_integral: component mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < A.values.size(); ++i) s += A.values[i] * B.values[i];
    const double h = A.grid.spacing();
    return s * h * h * h;
}

inline double max_abs(const SpectralField& F) {
    double mx = 0.0;
    for (const auto& c : F.coeffs) mx = std::max(mx, std::abs(c));
    return mx;
}

inline double max_abs(const PhysicalField& f) {
    double mx = 0.0;
    for (double v : f.values) mx = std::max(mx, std::abs(v));
    return mx;
}

inline double divergence_linf(const SpectralField& V) { return max_abs(to_physical(divergence(V))); }

/// Linear combination a*F + b*G.
inline SpectralField axpby(double a, const SpectralField& F, double b, const SpectralField& G) {
    require_same_grid(F.grid, G.grid);
    SpectralField out = F;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = a * F.coeffs[i] + b * G.coeffs[i];
    return out;
}

inline PhysicalField axpby(double a, const PhysicalField& f, double b, const PhysicalField& g) {
    require_same_grid(f.grid, g.grid);
    PhysicalField out = f;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * f.values[i] + b * g.values[i];
    return out;
}

}  // namespace eulerlab

#endif
