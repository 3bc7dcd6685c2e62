#include "doctest.h"

#include <cmath>
#include <vector>

#include "eulerlab/besov.hpp"
#include "eulerlab/mollify.hpp"

using namespace eulerlab;

namespace {

PhysicalField single_sine(const GridSpec& g) {
    PhysicalField f(g, 1);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) f.at(0, i, j, k) = std::sin(g.node(i));
    return f;
}

// 3D tensor Gauss quadrature over the unit cube: an oracle independent of the
// kernel's own radial quadrature.
double cube_integral(const MollifierKernel& kernel, double eps, int order) {
    const detail::GaussRule rule(order);
    double s = 0.0;
    for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b)
            for (int c = 0; c < order; ++c) {
                const double x = rule.nodes[a], y = rule.nodes[b], z = rule.nodes[c];
                const double r = std::sqrt(x * x + y * y + z * z);
                if (r >= 1.0) continue;
                const double w = rule.weights[a] * rule.weights[b] * rule.weights[c];
                s += w * kernel.rho(r) * std::cos(eps * x);
            }
    return s;
}

}  // namespace

TEST_CASE("kernel mass and normalization") {
    const MollifierKernel bump = MollifierKernel::bump();
    CHECK(std::abs(kernel_mass(bump) - 1.0) < 1e-10);

    SUBCASE("raw mass against a fine Simpson oracle") {
        const int n = 20000;
        const double dr = 1.0 / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double r = i * dr;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * r * r * MollifierKernel::bump_profile(r);
        }
        s *= 4.0 * pi * dr / 3.0;
        CHECK(bump.raw_mass() == doctest::Approx(s).epsilon(1e-10));
    }

    SUBCASE("doubling the profile doubles the raw mass") {
        MollifierKernel twice;
        twice.profile = [](double r) { return 2.0 * MollifierKernel::bump_profile(r); };
        twice.normalization = 1.0;
        MollifierKernel plain;
        plain.profile = &MollifierKernel::bump_profile;
        plain.normalization = 1.0;
        CHECK(twice.raw_mass() == doctest::Approx(2.0 * plain.raw_mass()).epsilon(1e-12));
        CHECK(std::abs(kernel_mass(twice) - 2.0 * kernel_mass(plain)) < 2e-10);
    }

    SUBCASE("tabulated profile normalizes to unit mass") {
        std::vector<double> samples;
        for (int i = 0; i <= 64; ++i) {
            const double r = i / 64.0;
            samples.push_back(1.0 - r);  // tent profile
        }
        const MollifierKernel tent = MollifierKernel::tabulated(samples);
        CHECK(std::abs(kernel_mass(tent) - 1.0) < 1e-10);
        CHECK_THROWS_AS(MollifierKernel::tabulated({1.0}), std::invalid_argument);
        CHECK_THROWS_AS(MollifierKernel::tabulated({1.0, -0.5}), std::invalid_argument);
    }

    SUBCASE("fourier(0) = 1 and |fourier| <= 1") {
        CHECK(std::abs(bump.fourier(0.0) - 1.0) < 1e-10);
        for (double k : {0.5, 1.0, 3.0, 10.0, 40.0}) CHECK(std::abs(bump.fourier(k)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("Epsilon validation and resolution predicates") {
    CHECK_THROWS_AS(Epsilon(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Epsilon(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(Epsilon(1.5), std::invalid_argument);
    const GridSpec g(32);
    CHECK(Epsilon(0.5).resolved(g));
    CHECK_FALSE(Epsilon(0.25).resolved(g));
    CHECK(Epsilon(0.8).well_resolved(g));
    CHECK_FALSE(Epsilon(0.5).well_resolved(g));
}

TEST_CASE("mollify basics") {
    const GridSpec g(32);
    const MollifierKernel kernel = MollifierKernel::bump();

    SUBCASE("constants are fixed points on both paths") {
        PhysicalField c(g, 1);
        for (double& v : c.values) v = 2.5;
        const PhysicalField spec_out = mollify(c, Epsilon(0.5), kernel);
        MollifyOptions quad;
        quad.path = MollifyPath::quadrature;
        const PhysicalField quad_out = mollify(c, Epsilon(0.5), kernel, quad);
        for (std::size_t i = 0; i < c.values.size(); i += 97) {
            CHECK(spec_out.values[i] == doctest::Approx(2.5).epsilon(1e-10));
            CHECK(quad_out.values[i] == doctest::Approx(2.5).epsilon(1e-12));
        }
    }

    SUBCASE("single-mode multiplier against the cube-quadrature oracle") {
        const double eps = 0.5;
        const SpectralField F = to_spectral(single_sine(g));
        const SpectralField Feps = mollify(F, Epsilon(eps), kernel);
        const std::complex<double> ratio = Feps.at(0, 1, 0, 0) / F.at(0, 1, 0, 0);
        const double oracle = cube_integral(kernel, eps, 48);
        CHECK(std::abs(ratio.imag()) < 1e-12);
        CHECK(ratio.real() == doctest::Approx(oracle).epsilon(1e-7));
    }

    SUBCASE("divergence-free fields stay divergence-free") {
        SyntheticFieldSpec spec;
        spec.seed = 5;
        spec.k_max = g.dealias_limit();
        const SpectralField U = to_spectral(make_synthetic_field(spec, g));
        const SpectralField Ueps = mollify(U, Epsilon(0.4), kernel);
        CHECK(divergence_linf(Ueps) < 1e-12 * std::max(1.0, max_abs(to_physical(Ueps))));
    }

    SUBCASE("linearity") {
        SyntheticFieldSpec s1, s2;
        s1.seed = 1;
        s2.seed = 2;
        s1.k_max = s2.k_max = g.dealias_limit();
        const SpectralField F = to_spectral(make_synthetic_field(s1, g));
        const SpectralField G = to_spectral(make_synthetic_field(s2, g));
        const Epsilon eps(0.5);
        const SpectralField lhs = mollify(axpby(2.0, F, -3.0, G), eps, kernel);
        const SpectralField rhs = axpby(2.0, mollify(F, eps, kernel), -3.0, mollify(G, eps, kernel));
        double err = 0.0;
        for (std::size_t i = 0; i < lhs.coeffs.size(); ++i) err = std::max(err, std::abs(lhs.coeffs[i] - rhs.coeffs[i]));
        CHECK(err < 1e-12 * std::max(1.0, max_abs(lhs)));
    }

    SUBCASE("commutes with shift and gradient") {
        SyntheticFieldSpec spec;
        spec.seed = 9;
        spec.k_max = g.dealias_limit();
        const SpectralField F = to_spectral(make_synthetic_field(spec, g));
        const Epsilon eps(0.5);
        const std::array<double, 3> y{0.3, -0.8, 0.11};

        const SpectralField a1 = mollify(shift(F, y), eps, kernel);
        const SpectralField a2 = shift(mollify(F, eps, kernel), y);
        double err = 0.0;
        for (std::size_t i = 0; i < a1.coeffs.size(); ++i) err = std::max(err, std::abs(a1.coeffs[i] - a2.coeffs[i]));
        CHECK(err < 1e-12);

        const SpectralField b1 = mollify(gradient(F), eps, kernel);
        const SpectralField b2 = gradient(mollify(F, eps, kernel));
        err = 0.0;
        for (std::size_t i = 0; i < b1.coeffs.size(); ++i) err = std::max(err, std::abs(b1.coeffs[i] - b2.coeffs[i]));
        CHECK(err < 1e-12);
    }

    SUBCASE("Young contraction in L2") {
        SyntheticFieldSpec spec;
        spec.seed = 13;
        spec.k_max = g.dealias_limit();
        const SpectralField F = to_spectral(make_synthetic_field(spec, g));
        for (double e : {0.9, 0.5, 0.4})
            CHECK(l2_norm(mollify(F, e > 0 ? Epsilon(e) : Epsilon(0.5), kernel)) <= l2_norm(F) + 1e-12);
    }

    SUBCASE("smooth-field approximation improves as eps shrinks") {
        const SpectralField F = to_spectral(single_sine(g));
        double prev = q_infinity;
        for (double e : {1.0, 0.5}) {  // halving sequence down to the refusal floor
            const double diff = l2_norm(axpby(1.0, F, -1.0, mollify(F, Epsilon(e), kernel)));
            CHECK(diff <= prev + 1e-12);
            prev = diff;
        }
    }

    SUBCASE("resolution guards") {
        const SpectralField F = to_spectral(single_sine(g));
        CHECK_THROWS_AS(mollify(F, Epsilon(0.2), kernel), std::invalid_argument);
        MollifyOptions opt;
        opt.allow_underresolved = true;
        bool warned = false;
        opt.warned_underresolved = &warned;
        CHECK_NOTHROW(mollify(F, Epsilon(0.2), kernel, opt));
        CHECK(warned);
        warned = false;
        CHECK_NOTHROW(mollify(F, Epsilon(0.9), kernel, opt));
        CHECK_FALSE(warned);
    }
}

TEST_CASE("quadrature path agrees with the spectral path") {
    const GridSpec g(32);
    const MollifierKernel kernel = MollifierKernel::bump();
    SyntheticFieldSpec spec;
    spec.seed = 3;
    spec.k_max = g.dealias_limit();
    const SpectralField F = to_spectral(make_synthetic_field(spec, g));
    MollifyOptions quad;
    quad.path = MollifyPath::quadrature;
    for (double e : {1.0, 0.8}) {  // eps >= 4h
        const Epsilon eps(e);
        const SpectralField a = mollify(F, eps, kernel);
        const SpectralField b = mollify(F, eps, kernel, quad);
        CHECK(l2_norm(axpby(1.0, a, -1.0, b)) / l2_norm(F) < 1e-6);
    }
}

TEST_CASE("convolution bounds report") {
    const GridSpec g(32);
    const MollifierKernel kernel = MollifierKernel::bump();

    SUBCASE("guards") {
        const SpectralField F = to_spectral(single_sine(g));
        CHECK_THROWS_AS(verify_convolution_bounds(F, 0.5, 2.0, {}, kernel), std::invalid_argument);
        CHECK_THROWS_AS(verify_convolution_bounds(F, 1.5, 2.0, {0.5}, kernel), std::invalid_argument);
        CHECK_THROWS_AS(verify_convolution_bounds(F, 0.5, 0.5, {0.5}, kernel), std::invalid_argument);
    }

    SUBCASE("constant field reports zero ratios") {
        PhysicalField c(g, 1);
        for (double& v : c.values) v = 1.0;
        const auto rep = verify_convolution_bounds(to_spectral(c), 0.5, 2.0, {0.5, 0.25}, kernel);
        CHECK(rep.max_ratio_seminorm == 0.0);
        CHECK(rep.max_ratio_gradient == 0.0);
    }

    SUBCASE("sine field: difference vs gradient bound with the analytic gradient norm") {
        const SpectralField F = to_spectral(single_sine(g));
        const auto rep = verify_convolution_bounds(F, 1.0, 2.0, {0.5, 0.25}, kernel);
        const double grad_norm = std::pow(two_pi, 1.5) / std::sqrt(2.0);  // ||cos(x1)||_2
        for (std::size_t i = 0; i < rep.eps_values.size(); ++i) {
            const double e = rep.eps_values[i];
            const double diff = rep.ratio_gradient[i] * grad_norm * e;  // recovers ||f - f_eps||_2
            const double mult = kernel.fourier(e);
            CHECK(diff == doctest::Approx((1.0 - mult) * grad_norm).epsilon(1e-8));
            CHECK(rep.ratio_gradient[i] <= 1.0 + 5e-2);
        }
    }

    SUBCASE("rough synthetic field: constant-1 bounds and stable constants") {
        SyntheticFieldSpec spec;
        spec.spectral_slope = 1.8;  // beta target 0.4
        spec.seed = 21;
        spec.k_max = g.dealias_limit();
        const SpectralField U = to_spectral(make_synthetic_field(spec, g));
        const auto rep = verify_convolution_bounds(U, 0.4, 2.0, {1.0, 0.9, 0.8, 0.5, 0.25}, kernel);
        CHECK(rep.max_ratio_seminorm <= 1.05);
        CHECK(rep.max_ratio_gradient <= 1.05);
        CHECK(rep.stability_grad_besov <= 1.5);
        CHECK(rep.stability_grad_lebesgue <= 1.5);
        CHECK(rep.stability_norm_gain <= 1.5);
    }
}
