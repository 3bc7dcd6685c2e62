#ifndef EULERLAB_COMMUTATOR_HPP
#define EULERLAB_COMMUTATOR_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerlab/fit.hpp"
#include "eulerlab/mollify.hpp"
#include "eulerlab/ops.hpp"

namespace eulerlab {

/// The four tensors of the commutator decomposition
///   (u (x) u)_eps = u_eps (x) u_eps + r_eps(u,u) - (u-u_eps) (x) (u-u_eps),
/// all built from one shared shift lattice so the identity holds to rounding.
/// Tensors are stored with component 3*i+j = T_ij.
struct CommutatorBundle {
    double eps = 0.0;
    PhysicalField u_eps;       // 3 components
    PhysicalField uu_eps;      // (u (x) u)_eps
    PhysicalField ueps_ueps;   // u_eps (x) u_eps
    PhysicalField remainder;   // r_eps(u,u)
    PhysicalField rough_part;  // (u-u_eps) (x) (u-u_eps)
    double identity_residual = 0.0;  // max-norm of the defect of the identity
    double tensor_scale = 0.0;       // max tensor magnitude, for relative checks
};

inline CommutatorBundle cet_decompose(const SpectralField& U, Epsilon eps, const MollifierKernel& kernel,
                                      int points_per_radius = 4) {
    require_vector(U.components);
    const GridSpec grid = U.grid;
    const std::size_t m = grid.node_count();
    const LatticeMollifier lattice(grid, kernel, eps, points_per_radius);
    const PhysicalField u = to_physical(U);

    CommutatorBundle b;
    b.eps = eps.value;
    b.u_eps = PhysicalField(grid, 3);
    b.uu_eps = PhysicalField(grid, 9);
    b.remainder = PhysicalField(grid, 9);

    for (const auto& o : lattice.offsets()) {
        const PhysicalField us = to_physical(shift(U, o.y));
        for (int c = 0; c < 3; ++c)
            for (std::size_t x = 0; x < m; ++x) b.u_eps.at(c, x) += o.weight * us.at(c, x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double* uu = b.uu_eps.comp(3 * i + j);
                double* rr = b.remainder.comp(3 * i + j);
                const double* ui = us.comp(i);
                const double* uj = us.comp(j);
                const double* vi = u.comp(i);
                const double* vj = u.comp(j);
                for (std::size_t x = 0; x < m; ++x) {
                    uu[x] += o.weight * ui[x] * uj[x];
                    rr[x] += o.weight * (ui[x] - vi[x]) * (uj[x] - vj[x]);
                }
            }
    }

    b.ueps_ueps = PhysicalField(grid, 9);
    b.rough_part = PhysicalField(grid, 9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (std::size_t x = 0; x < m; ++x) {
                const double di = u.at(i, x) - b.u_eps.at(i, x);
                const double dj = u.at(j, x) - b.u_eps.at(j, x);
                b.ueps_ueps.at(3 * i + j, x) = b.u_eps.at(i, x) * b.u_eps.at(j, x);
                b.rough_part.at(3 * i + j, x) = di * dj;
            }

    for (std::size_t x = 0; x < b.uu_eps.values.size(); ++x) {
        const double defect = b.uu_eps.values[x] - b.ueps_ueps.values[x] - b.remainder.values[x] + b.rough_part.values[x];
        b.identity_residual = std::max(b.identity_residual, std::abs(defect));
        b.tensor_scale = std::max({b.tensor_scale, std::abs(b.uu_eps.values[x]), std::abs(b.ueps_ueps.values[x]),
                                   std::abs(b.remainder.values[x]), std::abs(b.rough_part.values[x])});
    }
    return b;
}

/// Single-time-slice flux integrals of the mollified energy balance.
struct FluxReport {
    double eps = 0.0;
    double I1 = 0.0;         // |int rough : grad u_eps|
    double I2 = 0.0;         // |int remainder : grad u_eps|
    double trilinear = 0.0;  // int u_eps (x) u_eps : grad u_eps, zero for solenoidal fields
    double identity_residual = 0.0;
    double flux_signed = 0.0;  // int (remainder - rough) : grad u_eps, as it enters the balance
};

inline void require_solenoidal(const SpectralField& U, const char* who) {
    const double div = divergence_linf(U);
    const double scale = std::max(1.0, max_abs(U));
    if (div > 1e-10 * scale)
        throw std::invalid_argument(std::string(who) + ": input not divergence-free, |div|_inf = " + std::to_string(div));
}

inline FluxReport flux_terms(const SpectralField& U, Epsilon eps, const MollifierKernel& kernel,
                             int points_per_radius = 4) {
    require_solenoidal(U, "flux_terms");
    const CommutatorBundle b = cet_decompose(U, eps, kernel, points_per_radius);
    const PhysicalField grad = to_physical(gradient(to_spectral(b.u_eps)));
    FluxReport rep;
    rep.eps = eps.value;
    const double s_rough = contract_integral(b.rough_part, grad);
    const double s_rem = contract_integral(b.remainder, grad);
    rep.I1 = std::abs(s_rough);
    rep.I2 = std::abs(s_rem);
    rep.trilinear = contract_integral(b.ueps_ueps, grad);
    rep.identity_residual = b.identity_residual;
    rep.flux_signed = s_rem - s_rough;
    return rep;
}

/// Log-log decay of I1+I2 against eps, judged one-sidedly against the
/// theoretical rate min((beta-alpha)/alpha, 3*beta-1).
struct FluxScalingResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double predicted_rate = 0.0;
    double tolerance = 0.15;
    bool degenerate = false;
    bool pass = false;
    std::vector<FluxReport> reports;
    std::vector<double> skipped_eps;
};

inline FluxScalingResult flux_scaling(const SpectralField& U, double beta, double alpha,
                                      const std::vector<double>& eps_list, const MollifierKernel& kernel,
                                      int points_per_radius = 4) {
    FluxScalingResult res;
    res.predicted_rate = std::min((beta - alpha) / alpha, 3.0 * beta - 1.0);
    std::vector<double> xs, ys;
    const double floor_eps = 2.0 * U.grid.spacing();
    for (double e : eps_list) {
        if (e < floor_eps) {
            res.skipped_eps.push_back(e);
            continue;
        }
        FluxReport rep = flux_terms(U, Epsilon(e), kernel, points_per_radius);
        res.reports.push_back(rep);
        xs.push_back(e);
        ys.push_back(rep.I1 + rep.I2);
    }
    if (xs.size() < 4)
        throw std::invalid_argument("flux_scaling: fewer than 4 resolved eps values");
    double scale = 0.0;
    for (double v : ys) scale = std::max(scale, v);
    if (scale <= 1e-13 * std::max(1.0, l2_norm(U))) {
        res.degenerate = true;
        return res;
    }
    const LineFit fit = fit_loglog(xs, ys);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    res.r_squared = fit.r_squared;
    res.pass = res.slope >= res.predicted_rate - res.tolerance;
    return res;
}

/// Defect of the mollified energy balance along a trajectory, relative to
/// the initial kinetic energy. Time integrals by trapezoid over samples.
struct EnergyResidualReport {
    double residual_abs = 0.0;
    double residual_rel = 0.0;
    double initial_energy = 0.0;
};

inline EnergyResidualReport mollified_energy_residual(const std::vector<double>& times,
                                                      const std::vector<SpectralField>& fields,
                                                      Epsilon eps, const MollifierKernel& kernel,
                                                      int points_per_radius = 4) {
    if (times.size() != fields.size() || times.size() < 2)
        throw std::invalid_argument("mollified_energy_residual: need >= 2 trajectory samples");
    std::vector<double> flux(times.size());
    double e_first = 0.0, e_last = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
        const CommutatorBundle b = cet_decompose(fields[s], eps, kernel, points_per_radius);
        const SpectralField Ueps = to_spectral(b.u_eps);
        const PhysicalField grad = to_physical(gradient(Ueps));
        // (r - rough) : grad u_eps == (uu_eps - ueps_ueps) : grad u_eps, exactly
        flux[s] = contract_integral(b.remainder, grad) - contract_integral(b.rough_part, grad);
        const double e = 0.5 * l2_norm(Ueps) * l2_norm(Ueps);
        if (s == 0) e_first = e;
        if (s + 1 == times.size()) e_last = e;
    }
    double flux_integral = 0.0;
    for (std::size_t s = 0; s + 1 < times.size(); ++s) {
        const double dt = times[s + 1] - times[s];
        if (dt <= 0.0) throw std::invalid_argument("mollified_energy_residual: times must increase");
        flux_integral += 0.5 * dt * (flux[s] + flux[s + 1]);
    }
    EnergyResidualReport rep;
    const double e0 = 0.5 * l2_norm(fields.front()) * l2_norm(fields.front());
    rep.initial_energy = e0;
    rep.residual_abs = std::abs(e_last - e_first + flux_integral);
    rep.residual_rel = e0 > 0.0 ? rep.residual_abs / e0 : rep.residual_abs;
    return rep;
}

}  // namespace eulerlab

#endif
