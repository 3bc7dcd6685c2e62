#ifndef EULERLAB_SOLVER_HPP
#define EULERLAB_SOLVER_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerlab/besov.hpp"
#include "eulerlab/ops.hpp"

namespace eulerlab {

/// Pseudo-spectral incompressible solver: Leray-projected nonlinear term with
/// 2/3-rule dealiasing, integrating-factor RK4 for the viscous term.
struct SolverConfig {
    double nu = 0.0;  // 0 = Euler
    double dt = 1e-3;
    double final_time = 1.0;
    int output_stride = 1;
    bool store_fields = true;

    void validate() const {
        if (nu < 0.0) throw std::invalid_argument("SolverConfig: nu must be >= 0");
        if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
        if (!(final_time > 0.0)) throw std::invalid_argument("SolverConfig: final_time must be > 0");
        if (output_stride < 1) throw std::invalid_argument("SolverConfig: output_stride must be >= 1");
    }
};

struct EnergyBudgetSample {
    double t = 0.0;
    double kinetic = 0.0;
    double dissipation_cum = 0.0;
    double residual = 0.0;  // kinetic + dissipation_cum - initial kinetic
};

struct EnergyBudget {
    std::vector<EnergyBudgetSample> samples;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> fields;  // empty when store_fields is off
    EnergyBudget budget;
};

class SolverAbort : public std::runtime_error {
  public:
    SolverAbort(const std::string& what, long step) : std::runtime_error(what), step(step) {}
    long step;
};

namespace detail {

/// -P div(v (x) v) with dealiased product; also reports max |v| for CFL.
/// The tensor stays in half-complex (r2c) storage until the projected result
/// is expanded, which halves the spectral traffic in the hot path.
inline SpectralField nonlinear_term(const SpectralField& V, double* max_speed = nullptr) {
    const GridSpec g = V.grid;
    const int n = g.n;
    const int nh = n / 2 + 1;
    const std::size_t m = g.node_count();
    const std::size_t mh = static_cast<std::size_t>(nh) * n * n;
    auto& sc = FftEngine::scratch(n);
    const auto& plans = FftEngine::plans(n);

    const PhysicalField v = to_physical(V);
    if (max_speed) {
        double mx = 0.0;
        for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, node_magnitude(v, i));
        *max_speed = mx;
    }

    // symmetric product, 6 independent components, transformed and dealiased
    static const int pairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    thread_local std::vector<std::complex<double>> That;
    That.resize(6 * mh);
    const double scale = 1.0 / static_cast<double>(m);
    const int lim = g.dealias_limit();
    auto bad = [&](int i) { return std::abs(g.wavenumber(i)) > lim; };
    const std::complex<double> zero(0.0, 0.0);
    for (int p = 0; p < 6; ++p) {
        const double* a = v.comp(pairs[p][0]);
        const double* b = v.comp(pairs[p][1]);
        for (std::size_t i = 0; i < m; ++i) sc.real[i] = a[i] * b[i];
        fftw_execute_dft_r2c(plans.r2c, sc.real, sc.half);
        std::complex<double>* dst = That.data() + p * mh;
        const auto* h = reinterpret_cast<const std::complex<double>*>(sc.half);
        for (int kz = 0; kz < n; ++kz)
            for (int ky = 0; ky < n; ++ky) {
                const std::size_t hrow =
                    static_cast<std::size_t>(nh) * (ky + static_cast<std::size_t>(n) * kz);
                if (bad(kz) || bad(ky)) {
                    std::fill(dst + hrow, dst + hrow + nh, zero);
                    continue;
                }
                for (int kx = 0; kx <= lim; ++kx) dst[hrow + kx] = h[hrow + kx] * scale;
                std::fill(dst + hrow + lim + 1, dst + hrow + nh, zero);
            }
    }

    // N_i = -i P_il k_j T_lj on the half lattice, projection fused in
    static const int sym[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    thread_local std::vector<std::complex<double>> Nh;
    Nh.resize(3 * mh);
    const std::complex<double> iu(0.0, 1.0);
    for (int kz = 0; kz < n; ++kz) {
        const double kzw = deriv_wavenumber(g, kz);
        for (int ky = 0; ky < n; ++ky) {
            const double kyw = deriv_wavenumber(g, ky);
            const std::size_t hrow =
                static_cast<std::size_t>(nh) * (ky + static_cast<std::size_t>(n) * kz);
            for (int kx = 0; kx < nh; ++kx) {
                const double k[3] = {static_cast<double>(deriv_wavenumber(g, kx)), kyw, kzw};
                const std::size_t idx = hrow + kx;
                std::complex<double> s[3];
                for (int i = 0; i < 3; ++i) {
                    std::complex<double> acc = 0.0;
                    for (int j = 0; j < 3; ++j) acc += k[j] * That[sym[i][j] * mh + idx];
                    s[i] = -iu * acc;
                }
                const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if (k2 != 0.0) {
                    const std::complex<double> kdots = (k[0] * s[0] + k[1] * s[1] + k[2] * s[2]) / k2;
                    for (int i = 0; i < 3; ++i) s[i] -= k[i] * kdots;
                }
                for (int i = 0; i < 3; ++i) Nh[i * mh + idx] = s[i];
            }
        }
    }

    // Hermitian expansion back to full storage
    SpectralField N(g, 3);
    for (int c = 0; c < 3; ++c) {
        const std::complex<double>* h = Nh.data() + c * mh;
        std::complex<double>* o = N.comp(c);
        for (int kz = 0; kz < n; ++kz) {
            const int mz = kz == 0 ? 0 : n - kz;
            for (int ky = 0; ky < n; ++ky) {
                const std::size_t row = g.index(0, ky, kz);
                const std::size_t hrow =
                    static_cast<std::size_t>(nh) * (ky + static_cast<std::size_t>(n) * kz);
                for (int kx = 0; kx < nh; ++kx) o[row + kx] = h[hrow + kx];
                const int my = ky == 0 ? 0 : n - ky;
                const std::size_t mrow =
                    static_cast<std::size_t>(nh) * (my + static_cast<std::size_t>(n) * mz);
                for (int kx = nh; kx < n; ++kx) o[row + kx] = std::conj(h[mrow + (n - kx)]);
            }
        }
    }
    return N;
}

inline void scale_accumulate(SpectralField& acc, const std::vector<double>& factor,
                             const SpectralField& x, double a) {
    // acc += a * factor .* x  (factor indexed per mode)
    const std::size_t m = acc.grid.node_count();
    for (int c = 0; c < acc.components; ++c)
        for (std::size_t i = 0; i < m; ++i) acc.comp(c)[i] += a * factor[i] * x.comp(c)[i];
}

}  // namespace detail

/// Full right-hand side -P div(v (x) v) + nu Lap v; rejects non-solenoidal input.
inline SpectralField rhs(const SpectralField& V, double nu) {
    require_vector(V.components);
    {
        const double div = divergence_linf(V);
        if (div > 1e-10 * std::max(1.0, max_abs(to_physical(V))))
            throw std::invalid_argument("rhs: input not divergence-free, |div|_inf = " + std::to_string(div));
    }
    SpectralField out = detail::nonlinear_term(V);
    if (nu > 0.0) {
        const GridSpec g = V.grid;
        detail::for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
            const double a = detail::deriv_wavenumber(g, kx);
            const double b = detail::deriv_wavenumber(g, ky);
            const double c = detail::deriv_wavenumber(g, kz);
            const double k2 = a * a + b * b + c * c;
            for (int comp = 0; comp < 3; ++comp) out.at(comp, idx) -= nu * k2 * V.at(comp, idx);
        });
    }
    return out;
}

inline Trajectory run(const SpectralField& v0, const SolverConfig& config) {
    config.validate();
    require_vector(v0.components);
    const GridSpec g = v0.grid;
    const std::size_t m = g.node_count();

    {
        const double scale = std::max(1.0, max_abs(to_physical(v0)));
        if (divergence_linf(v0) > 1e-10 * scale)
            throw std::invalid_argument("run: initial datum not divergence-free");
        double mean = 0.0;
        for (int c = 0; c < 3; ++c) mean = std::max(mean, std::abs(v0.at(c, 0, 0, 0)));
        if (mean > 1e-12 * scale)
            throw std::invalid_argument("run: initial datum must be mean-zero (k=0 mode present)");
    }

    SpectralField V = dealias(v0);
    const long nsteps = std::lround(config.final_time / config.dt);
    if (nsteps < 1) throw std::invalid_argument("run: final_time shorter than one step");

    // integrating factors exp(-nu k^2 dt/2) and its square
    std::vector<double> ehalf(m, 1.0), efull(m, 1.0), k2tab(m, 0.0);
    detail::for_each_mode(g, [&](int kx, int ky, int kz, std::size_t idx) {
        const double a = detail::deriv_wavenumber(g, kx);
        const double b = detail::deriv_wavenumber(g, ky);
        const double c = detail::deriv_wavenumber(g, kz);
        const double k2 = a * a + b * b + c * c;
        k2tab[idx] = k2;
        ehalf[idx] = std::exp(-config.nu * k2 * config.dt * 0.5);
        efull[idx] = ehalf[idx] * ehalf[idx];
    });

    auto kinetic_of = [](const SpectralField& W) {
        const double n = l2_norm(W);
        return 0.5 * n * n;
    };
    auto enstrophy_of = [&](const SpectralField& W) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < m; ++i) s += k2tab[i] * std::norm(W.comp(c)[i]);
        return s * two_pi * two_pi * two_pi;  // ||grad w||_2^2
    };

    Trajectory traj;
    const double kinetic0 = kinetic_of(V);
    double dissipation_cum = 0.0;
    auto record = [&](double t, const SpectralField& W) {
        const double kin = kinetic_of(W);
        traj.budget.samples.push_back({t, kin, dissipation_cum, kin + dissipation_cum - kinetic0});
        traj.times.push_back(t);
        if (config.store_fields) traj.fields.push_back(W);
    };
    record(0.0, V);

    double kinetic_prev = kinetic0;
    const double dt = config.dt;
    for (long step = 0; step < nsteps; ++step) {
        double max_speed = 0.0;
        const SpectralField k1 = detail::nonlinear_term(V, &max_speed);
        if (max_speed > 0.0 && dt > 0.5 * g.spacing() / max_speed)
            throw SolverAbort("CFL violation at step " + std::to_string(step), step);

        SpectralField s2(g, 3);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < m; ++i)
                s2.comp(c)[i] = ehalf[i] * (V.comp(c)[i] + 0.5 * dt * k1.comp(c)[i]);
        const SpectralField k2 = detail::nonlinear_term(s2);

        SpectralField s3(g, 3);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < m; ++i) s3.comp(c)[i] = ehalf[i] * V.comp(c)[i] + 0.5 * dt * k2.comp(c)[i];
        const SpectralField k3 = detail::nonlinear_term(s3);

        SpectralField s4(g, 3);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < m; ++i) s4.comp(c)[i] = efull[i] * V.comp(c)[i] + dt * ehalf[i] * k3.comp(c)[i];
        const SpectralField k4 = detail::nonlinear_term(s4);

        // dissipation integrated with the same RK4 stage weights
        if (config.nu > 0.0)
            dissipation_cum +=
                config.nu * dt / 6.0 *
                (enstrophy_of(V) + 2.0 * enstrophy_of(s2) + 2.0 * enstrophy_of(s3) + enstrophy_of(s4));

        SpectralField Vnext(g, 3);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < m; ++i)
                Vnext.comp(c)[i] = efull[i] * V.comp(c)[i] +
                                   dt / 6.0 *
                                       (efull[i] * k1.comp(c)[i] + 2.0 * ehalf[i] * (k2.comp(c)[i] + k3.comp(c)[i]) +
                                        k4.comp(c)[i]);
        V = std::move(Vnext);

        const double kin = kinetic_of(V);
        if (!std::isfinite(kin)) throw SolverAbort("NaN detected at step " + std::to_string(step), step);
        if (kin > kinetic_prev * (1.0 + 1e-6))
            throw SolverAbort("kinetic energy grew beyond tolerance at step " + std::to_string(step), step);
        kinetic_prev = kin;

        const double t = dt * (step + 1);
        if ((step + 1) % config.output_stride == 0 || step + 1 == nsteps) record(t, V);
    }
    return traj;
}

inline Trajectory run(const PhysicalField& v0, const SolverConfig& config) {
    if (!v0.finite()) throw std::invalid_argument("run: non-finite initial datum");
    return run(to_spectral(v0), config);
}

/// Classical Taylor-Green vortex, divergence-free and mean-zero.
inline PhysicalField taylor_green(const GridSpec& grid, double amplitude = 1.0) {
    PhysicalField v(grid, 3);
    for (int k = 0; k < grid.n; ++k)
        for (int j = 0; j < grid.n; ++j)
            for (int i = 0; i < grid.n; ++i) {
                const double x = grid.node(i), y = grid.node(j), z = grid.node(k);
                const std::size_t idx = grid.index(i, j, k);
                v.at(0, idx) = amplitude * std::sin(x) * std::cos(y) * std::cos(z);
                v.at(1, idx) = -amplitude * std::cos(x) * std::sin(y) * std::cos(z);
                v.at(2, idx) = 0.0;
            }
    return v;
}

/// ||taylor_green||_2^2 in closed form.
inline double taylor_green_energy(double amplitude = 1.0) {
    return amplitude * amplitude * two_pi * two_pi * two_pi / 4.0;
}

/// Seeded rough initial data; thin wrapper over the synthetic-field factory.
inline PhysicalField random_leray_hopf_data(const SyntheticFieldSpec& spec, const GridSpec& grid) {
    return make_synthetic_field(spec, grid);
}

}  // namespace eulerlab

#endif
