#ifndef EULERLAB_FFT_HPP
#define EULERLAB_FFT_HPP

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <new>
#include <stdexcept>

#include <fftw3.h>

#include "eulerlab/field.hpp"

namespace eulerlab {
namespace detail {

// Real-to-half-complex transforms on aligned scratch. One plan pair per n,
// created once under a lock; execution goes through the new-array interface
// on per-thread scratch so concurrent runs do not contend. FFTW_ESTIMATE
// keeps plan selection deterministic across processes.
class FftEngine {
  public:
    struct Plans {
        fftw_plan r2c = nullptr;
        fftw_plan c2r = nullptr;
    };

    struct Scratch {
        double* real = nullptr;
        fftw_complex* half = nullptr;

        explicit Scratch(int n) {
            real = fftw_alloc_real(static_cast<std::size_t>(n) * n * n);
            half = fftw_alloc_complex(static_cast<std::size_t>(n) * n * (n / 2 + 1));
            if (!real || !half) throw std::bad_alloc();
        }
        Scratch(const Scratch&) = delete;
        Scratch& operator=(const Scratch&) = delete;
        ~Scratch() {
            fftw_free(real);
            fftw_free(half);
        }
    };

    static const Plans& plans(int n) {
        static FftEngine eng;
        std::lock_guard<std::mutex> lock(eng.mutex_);
        auto it = eng.plans_.find(n);
        if (it != eng.plans_.end()) return it->second;
        Scratch tmp(n);
        Plans p;
        p.r2c = fftw_plan_dft_r2c_3d(n, n, n, tmp.real, tmp.half, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_3d(n, n, n, tmp.half, tmp.real, FFTW_ESTIMATE);
        if (!p.r2c || !p.c2r) throw std::runtime_error("fftw plan creation failed");
        return eng.plans_.emplace(n, p).first->second;
    }

    static Scratch& scratch(int n) {
        thread_local std::map<int, Scratch> local;
        auto it = local.find(n);
        if (it == local.end())
            it = local.emplace(std::piecewise_construct, std::forward_as_tuple(n), std::forward_as_tuple(n)).first;
        return it->second;
    }

  private:
    FftEngine() = default;
    std::mutex mutex_;
    std::map<int, Plans> plans_;
};

}  // namespace detail

inline SpectralField to_spectral(const PhysicalField& f) {
    if (!f.finite()) throw std::invalid_argument("to_spectral: non-finite values");
    const GridSpec g = f.grid;
    const int n = g.n;
    const int nh = n / 2 + 1;
    const std::size_t m = g.node_count();
    SpectralField out(g, f.components);
    auto& sc = detail::FftEngine::scratch(n);
    const auto& plans = detail::FftEngine::plans(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (int c = 0; c < f.components; ++c) {
        std::memcpy(sc.real, f.comp(c), m * sizeof(double));
        fftw_execute_dft_r2c(plans.r2c, sc.real, sc.half);
        std::complex<double>* o = out.comp(c);
        const auto* h = reinterpret_cast<const std::complex<double>*>(sc.half);
        for (int kz = 0; kz < n; ++kz)
            for (int ky = 0; ky < n; ++ky) {
                const std::size_t row = g.index(0, ky, kz);
                const std::size_t hrow =
                    static_cast<std::size_t>(nh) * (ky + static_cast<std::size_t>(n) * kz);
                for (int kx = 0; kx < nh; ++kx) o[row + kx] = h[hrow + kx] * scale;
                // remaining bins by Hermitian symmetry of a real field
                const int my = ky == 0 ? 0 : n - ky;
                const int mz = kz == 0 ? 0 : n - kz;
                const std::size_t mrow =
                    static_cast<std::size_t>(nh) * (my + static_cast<std::size_t>(n) * mz);
                for (int kx = nh; kx < n; ++kx) o[row + kx] = std::conj(h[mrow + (n - kx)]) * scale;
            }
    }
    return out;
}

inline PhysicalField to_physical(const SpectralField& F) {
    const GridSpec g = F.grid;
    const int n = g.n;
    const int nh = n / 2 + 1;
    const std::size_t m = g.node_count();
    PhysicalField out(g, F.components);
    auto& sc = detail::FftEngine::scratch(n);
    const auto& plans = detail::FftEngine::plans(n);
    for (int c = 0; c < F.components; ++c) {
        const std::complex<double>* in = F.comp(c);
        auto* h = reinterpret_cast<std::complex<double>*>(sc.half);
        bool ok = true;
        for (int kz = 0; kz < n; ++kz) {
            const int mz = kz == 0 ? 0 : n - kz;
            for (int ky = 0; ky < n; ++ky) {
                const int my = ky == 0 ? 0 : n - ky;
                const std::size_t row = g.index(0, ky, kz);
                const std::size_t mrow = g.index(0, my, mz);
                const std::size_t hrow =
                    static_cast<std::size_t>(nh) * (ky + static_cast<std::size_t>(n) * kz);
                for (int kx = 0; kx < nh; ++kx) {
                    const int mx = kx == 0 ? 0 : n - kx;
                    // Hermitian part, so the result equals the real part of
                    // the full inverse transform for any input.
                    const std::complex<double> v = 0.5 * (in[row + kx] + std::conj(in[mrow + mx]));
                    ok = ok && std::isfinite(v.real()) && std::isfinite(v.imag());
                    h[hrow + kx] = v;
                }
            }
        }
        if (!ok) throw std::invalid_argument("to_physical: non-finite coefficients");
        fftw_execute_dft_c2r(plans.c2r, sc.half, sc.real);
        std::memcpy(out.comp(c), sc.real, m * sizeof(double));
    }
    return out;
}

}  // namespace eulerlab

#endif
