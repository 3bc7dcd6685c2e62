#ifndef EULERLAB_KERNEL_HPP
#define EULERLAB_KERNEL_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerlab/grid.hpp"

namespace eulerlab {
namespace detail {

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
struct GaussRule {
    std::vector<double> nodes, weights;

    explicit GaussRule(int order) {
        nodes.resize(order);
        weights.resize(order);
        for (int i = 0; i < order; ++i) {
            double x = std::cos(pi * (i + 0.75) / (order + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= order; ++j) {
                    const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = order * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = order * (x * p1 - p0) / (x * x - 1.0);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    /// Integrate g over [a,b].
    template <typename F>
    double integrate(F&& g, double a, double b) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * g(mid + half * nodes[i]);
        return s * half;
    }
};

inline const GaussRule& radial_rule() {
    static const GaussRule rule(96);
    return rule;
}

}  // namespace detail

/// Radial profile of the mollifier: the standard smooth bump by default, or
/// tabulated samples on [0,1] with linear interpolation.
struct MollifierKernel {
    std::function<double(double)> profile;  // unnormalized radial profile on [0,1]
    double normalization = 1.0;             // multiplies profile so the 3D mass is 1
    std::string profile_name = "bump";

    static double bump_profile(double r) {
        const double r2 = r * r;
        if (r2 >= 1.0 - 1e-14) return 0.0;  // guard clamp against exponent overflow
        return std::exp(-1.0 / (1.0 - r2));
    }

    static MollifierKernel bump() {
        MollifierKernel k;
        k.profile = &bump_profile;
        k.normalization = 1.0;
        k.normalization = 1.0 / k.raw_mass();
        return k;
    }

    static MollifierKernel tabulated(const std::vector<double>& samples) {
        if (samples.size() < 2) throw std::invalid_argument("MollifierKernel: need >= 2 radial samples");
        for (double s : samples)
            if (!(s >= 0.0)) throw std::invalid_argument("MollifierKernel: profile must be nonnegative");
        MollifierKernel k;
        k.profile_name = "tabulated";
        k.profile = [samples](double r) {
            if (r >= 1.0) return 0.0;
            const double x = r * (samples.size() - 1);
            const std::size_t i = std::min(static_cast<std::size_t>(x), samples.size() - 2);
            const double t = x - i;
            return (1.0 - t) * samples[i] + t * samples[i + 1];
        };
        k.normalization = 1.0 / k.raw_mass();
        return k;
    }

    double rho(double r) const { return r < 1.0 ? normalization * profile(r) : 0.0; }

    /// 3D mass of the unnormalized profile: 4*pi * int_0^1 r^2 profile(r) dr.
    double raw_mass() const {
        return 4.0 * pi * detail::radial_rule().integrate([&](double r) { return r * r * profile(r); }, 0.0, 1.0);
    }

    /// Radial Fourier transform rho_hat(|xi|) = 4*pi * int r^2 rho(r) sinc(|xi| r) dr;
    /// equals 1 at xi = 0 by normalization.
    double fourier(double kappa) const {
        return 4.0 * pi * detail::radial_rule().integrate(
                              [&](double r) {
                                  const double x = kappa * r;
                                  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                                  return r * r * rho(r) * sinc;
                              },
                              0.0, 1.0);
    }

    /// Stable identifier for multiplier cache keys (FNV-1a over profile samples).
    std::uint64_t profile_hash() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](double v) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(v));
            std::memcpy(&bits, &v, sizeof(bits));
            for (int b = 0; b < 8; ++b) {
                h ^= (bits >> (8 * b)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        for (int i = 0; i <= 256; ++i) mix(rho(i / 256.0));
        return h;
    }
};

/// Mass of the (normalized) kernel; 1 up to quadrature error.
inline double kernel_mass(const MollifierKernel& k) {
    return 4.0 * pi * detail::radial_rule().integrate([&](double r) { return r * r * k.rho(r); }, 0.0, 1.0);
}

/// Mollification scale.
struct Epsilon {
    double value;

    explicit Epsilon(double eps) : value(eps) {
        if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("Epsilon: need 0 < eps <= 1");
    }

    /// eps < 2h under-resolves the kernel on the grid.
    bool resolved(const GridSpec& g) const { return value >= 2.0 * g.spacing(); }
    bool well_resolved(const GridSpec& g) const { return value >= 4.0 * g.spacing(); }
};

}  // namespace eulerlab

#endif
