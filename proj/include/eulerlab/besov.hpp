#ifndef EULERLAB_BESOV_HPP
#define EULERLAB_BESOV_HPP

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eulerlab/ops.hpp"

namespace eulerlab {

/// 13 lattice-covering unit directions: axes, face diagonals, space diagonals.
inline const std::array<std::array<double, 3>, 13>& shift_directions() {
    static const std::array<std::array<double, 3>, 13> dirs = [] {
        std::array<std::array<double, 3>, 13> d{};
        int i = 0;
        d[i++] = {1, 0, 0};
        d[i++] = {0, 1, 0};
        d[i++] = {0, 0, 1};
        const double f = 1.0 / std::sqrt(2.0);
        d[i++] = {f, f, 0};
        d[i++] = {f, -f, 0};
        d[i++] = {f, 0, f};
        d[i++] = {f, 0, -f};
        d[i++] = {0, f, f};
        d[i++] = {0, f, -f};
        const double s = 1.0 / std::sqrt(3.0);
        d[i++] = {s, s, s};
        d[i++] = {s, s, -s};
        d[i++] = {s, -s, s};
        d[i++] = {s, -s, -s};
        return d;
    }();
    return dirs;
}

/// Deterministic shift set: dyadic magnitudes pi*2^-j down to the grid
/// spacing, crossed with the 13 directions.
struct ShiftSet {
    std::vector<std::array<double, 3>> shifts;
    std::vector<double> magnitudes;
    int excluded_below_spacing = 0;
};

inline ShiftSet make_shift_set(const GridSpec& g) {
    ShiftSet set;
    const double h = g.spacing();
    for (int j = 0;; ++j) {
        const double mag = pi * std::pow(2.0, -j);
        if (mag < h) {
            set.excluded_below_spacing = 1;  // remaining dyadic tail sits under the grid
            break;
        }
        set.magnitudes.push_back(mag);
        for (const auto& d : shift_directions())
            set.shifts.push_back({mag * d[0], mag * d[1], mag * d[2]});
    }
    return set;
}

struct BesovEstimate {
    double beta = 0.0;
    double q = 2.0;
    double value = 0.0;  // sampled semi-norm, a lower bound of the true one
    std::vector<std::array<double, 3>> shift_set;
    std::array<double, 3> argmax_shift{0, 0, 0};
};

namespace detail {

inline double shifted_difference_norm(const SpectralField& U, const std::array<double, 3>& y, double q) {
    // ||u(.+y) - u||_q ; u(.+y) = shift(u, -y)
    const std::array<double, 3> my{-y[0], -y[1], -y[2]};
    if (q == 2.0) {
        // Parseval route, no transform needed; per-axis phases match shift()
        const GridSpec& g = U.grid;
        std::array<std::vector<std::complex<double>>, 3> phase;
        for (int d = 0; d < 3; ++d) {
            phase[d].resize(g.n);
            for (int i = 0; i < g.n; ++i) {
                const int k = g.wavenumber(i);
                phase[d][i] = (i == g.n / 2) ? std::complex<double>(std::cos(k * my[d]), 0.0)
                                             : std::exp(std::complex<double>(0.0, -k * my[d]));
            }
        }
        double s = 0.0;
        for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
            const double f = std::norm(phase[0][kx] * phase[1][ky] * phase[2][kz] - 1.0);
            for (int c = 0; c < U.components; ++c) s += f * std::norm(U.at(c, idx));
        });
        return std::sqrt(s * two_pi * two_pi * two_pi);
    }
    SpectralField diff = axpby(1.0, shift(U, my), -1.0, U);
    return lebesgue_norm(diff, q);
}

}  // namespace detail

inline BesovEstimate besov_seminorm(const SpectralField& U, double beta, double q,
                                    const ShiftSet& set) {
    if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("besov_seminorm: beta must lie in (0,1]");
    if (!(q >= 1.0)) throw std::invalid_argument("besov_seminorm: q must be >= 1");
    if (set.shifts.empty()) throw std::invalid_argument("besov_seminorm: empty shift set");
    BesovEstimate est;
    est.beta = beta;
    est.q = q;
    est.shift_set = set.shifts;
    for (const auto& y : set.shifts) {
        const double mag = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        const double ratio = detail::shifted_difference_norm(U, y, q) / std::pow(mag, beta);
        if (ratio > est.value) {
            est.value = ratio;
            est.argmax_shift = y;
        }
    }
    return est;
}

inline BesovEstimate besov_seminorm(const SpectralField& U, double beta, double q) {
    return besov_seminorm(U, beta, q, make_shift_set(U.grid));
}

inline BesovEstimate besov_seminorm(const PhysicalField& u, double beta, double q) {
    return besov_seminorm(to_spectral(u), beta, q);
}

/// ||u||_q + ||grad u||_q.
inline double sobolev_norm(const SpectralField& U, double q) {
    return lebesgue_norm(U, q) + lebesgue_norm(gradient(U), q);
}

inline double sobolev_norm(const PhysicalField& u, double q) { return sobolev_norm(to_spectral(u), q); }

/// Least-squares slope of log ||u(.+y)-u||_2 against log |y| over the dyadic
/// magnitudes, taking the max over directions at each magnitude.
inline double fit_besov_exponent(const SpectralField& U, const ShiftSet& set) {
    std::vector<double> lx, ly;
    for (double mag : set.magnitudes) {
        double best = 0.0;
        for (const auto& d : shift_directions()) {
            const std::array<double, 3> y{mag * d[0], mag * d[1], mag * d[2]};
            best = std::max(best, detail::shifted_difference_norm(U, y, 2.0));
        }
        if (best <= 0.0) continue;
        lx.push_back(std::log(mag));
        ly.push_back(std::log(best));
    }
    if (lx.size() < 2) throw std::invalid_argument("fit_besov_exponent: degenerate field");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline double fit_besov_exponent(const SpectralField& U) { return fit_besov_exponent(U, make_shift_set(U.grid)); }

/// Random-phase band field with shell energy ~ k^-s, made solenoidal,
/// mean-free and of unit L^2 norm.
struct SyntheticFieldSpec {
    double target_beta = 0.5;  // bookkeeping only; regularity is measured, not assumed
    double spectral_slope = 2.0;
    std::uint64_t seed = 0;
    int k_min = 1;
    int k_max = 0;
};

inline PhysicalField make_synthetic_field(const SyntheticFieldSpec& spec, const GridSpec& grid) {
    if (spec.k_max < spec.k_min || spec.k_min < 1)
        throw std::invalid_argument("make_synthetic_field: empty wavenumber band");
    if (spec.k_max > grid.dealias_limit())
        throw std::invalid_argument("make_synthetic_field: k_max must be <= n/3");
    SpectralField U(grid, 3);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    const double lo2 = static_cast<double>(spec.k_min) * spec.k_min;
    const double hi2 = static_cast<double>(spec.k_max) * spec.k_max;
    const int kmax = spec.k_max;
    // deterministic mode order; conjugate mirror fills the other half space
    for (int kz = -kmax; kz <= kmax; ++kz)
        for (int ky = -kmax; ky <= kmax; ++ky)
            for (int kx = -kmax; kx <= kmax; ++kx) {
                const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky + static_cast<double>(kz) * kz;
                if (k2 < lo2 || k2 > hi2) continue;
                if (kz < 0 || (kz == 0 && ky < 0) || (kz == 0 && ky == 0 && kx <= 0)) continue;
                const double amp = std::pow(k2, -(spec.spectral_slope + 2.0) / 4.0);
                const int i = (kx + grid.n) % grid.n;
                const int j = (ky + grid.n) % grid.n;
                const int l = (kz + grid.n) % grid.n;
                const int mi = (grid.n - i) % grid.n;
                const int mj = (grid.n - j) % grid.n;
                const int ml = (grid.n - l) % grid.n;
                for (int c = 0; c < 3; ++c) {
                    const std::complex<double> v = amp * std::exp(std::complex<double>(0.0, phase(rng)));
                    U.at(c, i, j, l) = v;
                    U.at(c, mi, mj, ml) = std::conj(v);
                }
            }
    U = leray_project(U);
    U.at(0, 0, 0, 0) = U.at(1, 0, 0, 0) = U.at(2, 0, 0, 0) = 0.0;  // mean-free
    const double norm = l2_norm(U);
    if (norm <= 0.0) throw std::invalid_argument("make_synthetic_field: band projected to zero");
    for (auto& c : U.coeffs) c /= norm;
    return to_physical(U);
}

/// L^r(0,T) norm of a sampled time series by trapezoid rule; r = inf is the
/// max over samples.
inline double time_lebesgue_norm(const std::vector<std::pair<double, double>>& series, double r) {
    if (series.size() < 2 && r != q_infinity)
        throw std::invalid_argument("time_lebesgue_norm: need >= 2 samples");
    if (series.empty()) throw std::invalid_argument("time_lebesgue_norm: empty series");
    if (!(r >= 1.0)) throw std::invalid_argument("time_lebesgue_norm: r must be >= 1");
    if (r == q_infinity) {
        double mx = 0.0;
        for (const auto& [t, v] : series) mx = std::max(mx, std::abs(v));
        return mx;
    }
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double dt = series[i + 1].first - series[i].first;
        if (dt <= 0.0) throw std::invalid_argument("time_lebesgue_norm: timestamps must increase");
        s += 0.5 * dt * (std::pow(std::abs(series[i].second), r) + std::pow(std::abs(series[i + 1].second), r));
    }
    return std::pow(s, 1.0 / r);
}

}  // namespace eulerlab

#endif
