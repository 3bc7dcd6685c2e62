#ifndef EULERLAB_EXPONENTS_HPP
#define EULERLAB_EXPONENTS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eulerlab {

/// Exponent bookkeeping for the Besov-space energy-conservation condition:
/// time exponent 1/alpha, space integrability 2/(1-alpha), and the Hoelder
/// split (eta, q) solving the constraint system.
struct Thm1Params {
    double alpha = 0.0;
    double beta = 0.0;
    double eta = 0.0;           // (1-alpha)/alpha
    double q = 0.0;             // 2/(1-alpha)
    double flux_exponent = 0.0; // beta*eta + beta - 1 = (beta-alpha)/alpha
    double time_exponent = 0.0; // 1/alpha
};

inline Thm1Params thm1_parameters(double alpha, double beta) {
    if (!(alpha > 1.0 / 3.0)) throw std::invalid_argument("thm1_parameters: constraint alpha > 1/3 violated");
    if (!(alpha < 1.0)) throw std::invalid_argument("thm1_parameters: constraint alpha < 1 violated");
    if (!(beta > alpha)) throw std::invalid_argument("thm1_parameters: constraint beta > alpha violated");
    if (!(beta < 1.0)) throw std::invalid_argument("thm1_parameters: constraint beta < 1 violated");
    Thm1Params p;
    p.alpha = alpha;
    p.beta = beta;
    p.eta = (1.0 - alpha) / alpha;
    p.q = 2.0 / (1.0 - alpha);
    p.flux_exponent = (beta - alpha) / alpha;
    p.time_exponent = 1.0 / alpha;
    return p;
}

/// Residual of the three constraints; all should vanish for valid params.
struct Thm1ConstraintCheck {
    double positivity;     // beta*eta + beta - 1, must be > 0
    double eta_margin;     // q - 1 - eta, must be > 0
    double duality_defect; // (2-eta)q/(q-(1+eta)) - 2, must be 0
};

inline Thm1ConstraintCheck thm1_check(const Thm1Params& p) {
    Thm1ConstraintCheck c;
    c.positivity = p.beta * p.eta + p.beta - 1.0;
    c.eta_margin = p.q - 1.0 - p.eta;
    c.duality_defect = (2.0 - p.eta) * p.q / (p.q - (1.0 + p.eta)) - 2.0;
    return c;
}

/// Gradient-condition exponents: the admissible Hoelder index interval and
/// the critical time exponent r = 5q/(5q-6).
struct Thm2Params {
    double q = 0.0;
    double p_lower = 0.0;   // (5q-6)q / (5q^2-9q+6)
    double p_upper = 0.0;   // min{q/2, q/(q-1)}
    double r_critical = 0.0;
    // filled when a specific p is supplied
    double p = 0.0;
    double theta = 0.0;          // interpolation: 1/(2p) = theta/2 + (1-theta)/q
    double eps_exponent = 0.0;   // 2q(p-1)/(p(q-2)) - 3(1/q - 1/p')
};

inline Thm2Params thm2_parameters(double q) {
    if (!(q > 2.0)) throw std::invalid_argument("thm2_parameters: need q > 2");
    Thm2Params p;
    p.q = q;
    p.p_lower = (5.0 * q - 6.0) * q / (5.0 * q * q - 9.0 * q + 6.0);
    p.p_upper = std::min(q / 2.0, q / (q - 1.0));
    p.r_critical = 5.0 * q / (5.0 * q - 6.0);
    return p;
}

inline Thm2Params thm2_parameters(double q, double p_value) {
    Thm2Params p = thm2_parameters(q);
    if (!(p_value > p.p_lower))
        throw std::invalid_argument("thm2_parameters: p violates lower bound (5q-6)q/(5q^2-9q+6)");
    if (!(p_value < p.p_upper))
        throw std::invalid_argument("thm2_parameters: p violates upper bound min{q/2, q/(q-1)}");
    p.p = p_value;
    const double p_conj = p_value / (p_value - 1.0);
    p.theta = (1.0 / (2.0 * p_value) - 1.0 / q) / (0.5 - 1.0 / q);
    p.eps_exponent = 2.0 * q * (p_value - 1.0) / (p_value * (q - 2.0)) - 3.0 * (1.0 / q - 1.0 / p_conj);
    return p;
}

/// Viscosity-coupling rates: the branch at beta <= 1/2 balances the flux
/// against nu*eps^{2(beta-1)} dissipation, the branch at beta > 1/2 against
/// nu/eps.
struct Thm3Rates {
    double alpha = 0.0;
    double beta = 0.0;
    bool low_branch = true;           // beta <= 1/2
    double eps_exponent = 0.0;        // eps ~ nu^e
    double defect_exponent = 0.0;     // energy defect O(nu^d)
    double dissipation_eps_power = 0.0; // nu * eps^this bounds the mollified dissipation
    bool branch_warning = false;      // alpha and beta straddle 1/2
};

inline Thm3Rates thm3_rates(double alpha, double beta) {
    if (!(alpha > 1.0 / 3.0) || !(alpha < 1.0))
        throw std::invalid_argument("thm3_rates: need 1/3 < alpha < 1");
    if (!(beta > alpha) || !(beta < 1.0)) throw std::invalid_argument("thm3_rates: need alpha < beta < 1");
    Thm3Rates r;
    r.alpha = alpha;
    r.beta = beta;
    r.low_branch = beta <= 0.5;
    if (r.low_branch) {
        r.eps_exponent = alpha / (alpha + beta - 2.0 * alpha * beta);
        r.defect_exponent = (beta - alpha) / (alpha - 2.0 * alpha * beta + beta);
        r.dissipation_eps_power = 2.0 * (beta - 1.0);
    } else {
        r.eps_exponent = alpha / beta;
        r.defect_exponent = (beta - alpha) / beta;
        r.dissipation_eps_power = -1.0;
    }
    // the branch split is keyed on beta; flag configs where alpha sits on the
    // other side of 1/2 so callers can surface the case distinction
    r.branch_warning = (alpha <= 0.5) != (beta <= 0.5);
    return r;
}

namespace detail {

/// Tiny exact fraction for cross-checking the calculators on rational input.
struct Fraction {
    long long num = 0, den = 1;

    static long long gcd(long long a, long long b) {
        a = a < 0 ? -a : a;
        b = b < 0 ? -b : b;
        while (b) {
            const long long t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    Fraction() = default;
    Fraction(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = gcd(num, den);
        num /= g;
        den /= g;
    }

    Fraction operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Fraction operator-(const Fraction& o) const { return {num * o.den - o.num * den, den * o.den}; }
    Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
    Fraction operator/(const Fraction& o) const { return {num * o.den, den * o.num}; }
    bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

}  // namespace detail

/// Exact-rational verification of the constraint system for alpha = an/ad,
/// beta = bn/bd; returns true when every constraint holds identically.
inline bool thm1_exact_check(long long an, long long ad, long long bn, long long bd) {
    using detail::Fraction;
    const Fraction alpha(an, ad), beta(bn, bd), one(1, 1), two(2, 1);
    const Fraction eta = (one - alpha) / alpha;
    const Fraction q = two / (one - alpha);
    const Fraction positivity = beta * eta + beta - one;
    const Fraction expected = (beta - alpha) / alpha;
    if (!(positivity == expected)) return false;
    if (!(positivity.num > 0)) return false;
    if (!((q - one - eta).num > 0)) return false;
    const Fraction duality = (two - eta) * q / (q - (one + eta));
    return duality == two;
}

}  // namespace eulerlab

#endif
