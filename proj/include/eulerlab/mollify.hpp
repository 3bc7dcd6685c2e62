#ifndef EULERLAB_MOLLIFY_HPP
#define EULERLAB_MOLLIFY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "eulerlab/besov.hpp"
#include "eulerlab/kernel.hpp"
#include "eulerlab/ops.hpp"

namespace eulerlab {

/// Fast path: multiply coefficients by rho_hat(eps*|k|). The table holds one
/// value per distinct |k|^2 and is shared across instances with the same
/// (grid, profile, eps).
class SpectralMollifier {
  public:
    SpectralMollifier(const GridSpec& grid, const MollifierKernel& kernel, Epsilon eps)
        : grid_(grid), eps_(eps.value), table_(lookup_table(grid, kernel, eps.value)) {}

    double multiplier(int kx_idx, int ky_idx, int kz_idx) const {
        const int a = grid_.wavenumber(kx_idx);
        const int b = grid_.wavenumber(ky_idx);
        const int c = grid_.wavenumber(kz_idx);
        return (*table_)[static_cast<std::size_t>(a) * a + static_cast<std::size_t>(b) * b +
                         static_cast<std::size_t>(c) * c];
    }

    SpectralField apply(const SpectralField& F) const {
        require_same_grid(F.grid, grid_);
        SpectralField out(F.grid, F.components);
        detail::for_each_mode(grid_, [&](int kx, int ky, int kz, std::size_t idx) {
            const double m = multiplier(kx, ky, kz);
            for (int c = 0; c < F.components; ++c) out.at(c, idx) = m * F.at(c, idx);
        });
        return out;
    }

    double epsilon() const { return eps_; }

  private:
    using Table = std::vector<double>;  // indexed by integer |k|^2

    static std::shared_ptr<const Table> lookup_table(const GridSpec& g, const MollifierKernel& kernel,
                                                     double eps) {
        static std::mutex mutex;
        static std::map<std::tuple<int, std::uint64_t, double>, std::shared_ptr<const Table>> cache;
        std::lock_guard<std::mutex> lock(mutex);
        const auto key = std::make_tuple(g.n, kernel.profile_hash(), eps);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const int half = g.n / 2;
        const std::size_t k2max = 3 * static_cast<std::size_t>(half) * half;
        auto table = std::make_shared<Table>(k2max + 1, 0.0);
        for (std::size_t k2 = 0; k2 <= k2max; ++k2)
            (*table)[k2] = kernel.fourier(eps * std::sqrt(static_cast<double>(k2)));
        cache.emplace(key, table);
        return table;
    }

    GridSpec grid_;
    double eps_;
    std::shared_ptr<const Table> table_;
};

/// Definitional path: a normalized quadrature of the convolution over the
/// lattice y = eps*z, z on a cubic lattice of spacing 1/points_per_radius
/// inside the unit ball. Weights sum to exactly 1, which makes constants
/// fixed points and the commutator identity exact.
class LatticeMollifier {
  public:
    struct Offset {
        std::array<double, 3> y;
        double weight;
    };

    LatticeMollifier(const GridSpec& grid, const MollifierKernel& kernel, Epsilon eps,
                     int points_per_radius = 4)
        : grid_(grid), eps_(eps.value) {
        if (points_per_radius < 1) throw std::invalid_argument("LatticeMollifier: points_per_radius >= 1");
        const int m = points_per_radius;
        const double dz = 1.0 / m;
        double total = 0.0;
        for (int iz = -m; iz <= m; ++iz)
            for (int iy = -m; iy <= m; ++iy)
                for (int ix = -m; ix <= m; ++ix) {
                    const double z[3] = {ix * dz, iy * dz, iz * dz};
                    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
                    const double w = kernel.rho(r);
                    if (w <= 0.0) continue;
                    offsets_.push_back({{eps_ * z[0], eps_ * z[1], eps_ * z[2]}, w});
                    total += w;
                }
        if (offsets_.empty()) throw std::invalid_argument("LatticeMollifier: empty quadrature lattice");
        for (auto& o : offsets_) o.weight /= total;
    }

    const std::vector<Offset>& offsets() const { return offsets_; }
    double epsilon() const { return eps_; }

    /// sum_j w_j f(x - y_j), accumulated in spectral space via phase factors.
    SpectralField apply(const SpectralField& F) const {
        require_same_grid(F.grid, grid_);
        SpectralField out(F.grid, F.components);
        for (const auto& o : offsets_) {
            SpectralField s = shift(F, o.y);
            for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += o.weight * s.coeffs[i];
        }
        return out;
    }

  private:
    GridSpec grid_;
    double eps_;
    std::vector<Offset> offsets_;
};

enum class MollifyPath { spectral, quadrature };

struct MollifyOptions {
    MollifyPath path = MollifyPath::spectral;
    int quadrature_points_per_radius = 16;
    bool allow_underresolved = false;  // lattice paths stay valid below 2h
    bool* warned_underresolved = nullptr;
};

inline SpectralField mollify(const SpectralField& F, Epsilon eps, const MollifierKernel& kernel,
                             const MollifyOptions& opt = {}) {
    if (!eps.resolved(F.grid) && !opt.allow_underresolved)
        throw std::invalid_argument("mollify: eps < 2*grid spacing under-resolves the kernel");
    if (!eps.well_resolved(F.grid) && opt.warned_underresolved) *opt.warned_underresolved = true;
    if (opt.path == MollifyPath::spectral) return SpectralMollifier(F.grid, kernel, eps).apply(F);
    return LatticeMollifier(F.grid, kernel, eps, opt.quadrature_points_per_radius).apply(F);
}

inline PhysicalField mollify(const PhysicalField& f, Epsilon eps, const MollifierKernel& kernel,
                             const MollifyOptions& opt = {}) {
    return to_physical(mollify(to_spectral(f), eps, kernel, opt));
}

/// Measured ratios for the convolution estimates: the constant-1 bounds
/// (difference vs semi-norm, difference vs gradient) and the constant-C
/// bounds (gradient smoothing at rates beta-1 and -1, and the L^q -> L^r
/// gain with r = 2q).
struct ConvolutionBoundsReport {
    double beta = 0.0, q = 2.0, r = 4.0;
    std::vector<double> eps_values;
    std::vector<double> ratio_seminorm;    // ||u-u_eps||_q / ([u] eps^beta)
    std::vector<double> c_grad_besov;      // ||grad u_eps||_q eps^{1-beta} / [u]
    std::vector<double> ratio_gradient;    // ||u-u_eps||_q / (||grad u||_q eps)
    std::vector<double> c_grad_lebesgue;   // ||grad u_eps||_q eps / ||u||_q
    std::vector<double> c_norm_gain;       // ||u_eps||_r eps^{3(1/q-1/r)} / ||u||_q
    double max_ratio_seminorm = 0.0;
    double max_ratio_gradient = 0.0;
    // max/min over eps >= 4h, the range where the constants should be stable
    double stability_grad_besov = 1.0;
    double stability_grad_lebesgue = 1.0;
    double stability_norm_gain = 1.0;
};

namespace detail {

inline double stability_ratio(const std::vector<double>& eps, const std::vector<double>& c, double floor_eps) {
    double lo = q_infinity, hi = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (eps[i] < floor_eps || c[i] <= 0.0) continue;
        lo = std::min(lo, c[i]);
        hi = std::max(hi, c[i]);
    }
    return (hi > 0.0 && lo < q_infinity) ? hi / lo : 1.0;
}

}  // namespace detail

inline ConvolutionBoundsReport verify_convolution_bounds(const SpectralField& U, double beta, double q,
                                                         const std::vector<double>& eps_list,
                                                         const MollifierKernel& kernel) {
    if (eps_list.empty()) throw std::invalid_argument("verify_convolution_bounds: empty eps list");
    if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("verify_convolution_bounds: beta in (0,1]");
    if (!(q >= 1.0)) throw std::invalid_argument("verify_convolution_bounds: q >= 1");

    ConvolutionBoundsReport rep;
    rep.beta = beta;
    rep.q = q;
    rep.r = (q == q_infinity) ? q_infinity : 2.0 * q;

    const double seminorm = besov_seminorm(U, beta, q).value;
    const double norm_q = lebesgue_norm(U, q);
    const double grad_q = lebesgue_norm(gradient(U), q);

    for (double e : eps_list) {
        const Epsilon eps(e);
        const SpectralField Ueps = SpectralMollifier(U.grid, kernel, eps).apply(U);
        const double diff_q = lebesgue_norm(axpby(1.0, U, -1.0, Ueps), q);
        const double grad_eps_q = lebesgue_norm(gradient(Ueps), q);
        const double norm_r = lebesgue_norm(Ueps, rep.r);

        rep.eps_values.push_back(e);
        rep.ratio_seminorm.push_back(seminorm > 0.0 ? diff_q / (seminorm * std::pow(e, beta)) : 0.0);
        rep.c_grad_besov.push_back(seminorm > 0.0 ? grad_eps_q * std::pow(e, 1.0 - beta) / seminorm : 0.0);
        rep.ratio_gradient.push_back(grad_q > 0.0 ? diff_q / (grad_q * e) : 0.0);
        rep.c_grad_lebesgue.push_back(norm_q > 0.0 ? grad_eps_q * e / norm_q : 0.0);
        const double gain_pow = (rep.r == q_infinity) ? 3.0 / q : 3.0 * (1.0 / q - 1.0 / rep.r);
        rep.c_norm_gain.push_back(norm_q > 0.0 ? norm_r * std::pow(e, gain_pow) / norm_q : 0.0);
    }
    for (double v : rep.ratio_seminorm) rep.max_ratio_seminorm = std::max(rep.max_ratio_seminorm, v);
    for (double v : rep.ratio_gradient) rep.max_ratio_gradient = std::max(rep.max_ratio_gradient, v);
    const double floor_eps = 4.0 * U.grid.spacing();
    rep.stability_grad_besov = detail::stability_ratio(rep.eps_values, rep.c_grad_besov, floor_eps);
    rep.stability_grad_lebesgue = detail::stability_ratio(rep.eps_values, rep.c_grad_lebesgue, floor_eps);
    rep.stability_norm_gain = detail::stability_ratio(rep.eps_values, rep.c_norm_gain, floor_eps);
    return rep;
}

}  // namespace eulerlab

#endif
