#pragma once

/**
 * @file free_phase.hpp
 * @brief Phase shifts from outward integration of the free radial equation.
 *
 * Solves f'' + f'/x + (1 - nu^2/x^2) f = 0 in x = k r from the regular
 * series start f = x^nu (1 - x^2/(4(nu+1)) + ...), then fits the tail of
 * u = sqrt(x) f by linear least squares onto the two asymptotic solutions
 *
 *     B1 = P cos(chi) - Q sin(chi),   B2 = P sin(chi) + Q cos(chi),
 *     chi = x - |m| pi/2 - pi/4,
 *
 * where P, Q are the Hankel amplitude series of order nu. A solution with
 * asymptotic phase chi + delta has coefficients (cos delta, -sin delta), so
 * delta is recovered only modulo pi.
 */

#include "abphase/analytic.hpp"
#include "abphase/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace abphase::radial {

struct FreePhaseOptions {
    double start = 1e-6;            ///< starting point in units of 1/k
    double relative_tolerance = 1e-12;
    double absolute_tolerance = 1e-14;
    std::size_t fit_samples = 2000;  ///< samples over the last quarter of the range
    double max_relative_residual = 1e-6;
};

struct FreePhaseFit {
    PhaseShiftRecord record;
    double amplitude;          ///< fitted sqrt(a^2 + b^2), start-normalized
    double relative_residual;  ///< rms(u - fit) / amplitude
};

namespace detail {

/// Hankel asymptotic amplitude factors P(x), Q(x) of order nu.
inline std::pair<double, double> hankel_amplitudes(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 0.0;
    double q = 0.0;
    double term = 1.0;  // a_k(nu) / x^k
    double previous = std::abs(term);
    for (int k = 0; k < 24; ++k) {
        if (k > 0) {
            const double odd = 2.0 * k - 1.0;
            term *= (mu - odd * odd) / (8.0 * k * x);
            if (std::abs(term) > previous) break;  // asymptotic series starts to diverge
            previous = std::abs(term);
        }
        const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if (term == 0.0 || std::abs(term) < 1e-18) break;
    }
    return {p, q};
}

}  // namespace detail

inline FreePhaseFit free_phase_fit(const FluxChannel& channel, double k, double r_max, const FreePhaseOptions& options = {}) {
    namespace ode = boost::numeric::odeint;
    if (!(k > 0.0)) throw std::invalid_argument("free_phase_numeric: k must be positive");
    const double x_end = k * r_max;
    if (!(x_end >= 200.0)) throw std::invalid_argument("free_phase_numeric: k * r_max must be >= 200");

    const double nu = channel.nu();
    using State = std::array<double, 2>;

    // f scaled by x0^-nu; the problem is linear so the scale drops out of the fit.
    const double x0 = options.start;
    const double s = x0 * x0 / 4.0;
    State y{1.0 - s / (nu + 1.0) + s * s / (2.0 * (nu + 1.0) * (nu + 2.0)),
            (nu / x0) - (nu + 2.0) / x0 * s / (nu + 1.0) + (nu + 4.0) / x0 * s * s / (2.0 * (nu + 1.0) * (nu + 2.0))};

    auto rhs = [nu](const State& f, State& df, double x) {
        df[0] = f[1];
        df[1] = -f[1] / x - (1.0 - nu * nu / (x * x)) * f[0];
    };

    const std::size_t samples = options.fit_samples;
    const double x_fit = 0.75 * x_end;
    std::vector<double> times;
    times.reserve(samples + 1);
    times.push_back(x0);
    for (std::size_t i = 0; i < samples; ++i) {
        times.push_back(x_fit + (x_end - x_fit) * static_cast<double>(i) / static_cast<double>(samples - 1));
    }

    std::vector<double> u;
    u.reserve(samples);
    auto observe = [&u](const State& f, double x) { u.push_back(std::sqrt(x) * f[0]); };
    auto stepper = ode::make_dense_output(options.absolute_tolerance, options.relative_tolerance,
                                          ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), 0.1 * x0, observe);
    u.erase(u.begin());  // the start point

    // Normal equations for u ~ a B1 + b B2.
    const double ref = static_cast<double>(std::abs(channel.m())) * pi / 2 + pi / 4;
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
    std::vector<std::array<double, 2>> basis(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = times[i + 1];
        const auto [p, q] = detail::hankel_amplitudes(nu, x);
        const double chi = x - ref;
        const double c = std::cos(chi);
        const double sn = std::sin(chi);
        basis[i] = {p * c - q * sn, p * sn + q * c};
        s11 += basis[i][0] * basis[i][0];
        s12 += basis[i][0] * basis[i][1];
        s22 += basis[i][1] * basis[i][1];
        r1 += basis[i][0] * u[i];
        r2 += basis[i][1] * u[i];
    }
    const double det = s11 * s22 - s12 * s12;
    const double a = (s22 * r1 - s12 * r2) / det;
    const double b = (s11 * r2 - s12 * r1) / det;
    const double amplitude = std::hypot(a, b);

    double rss = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double d = u[i] - a * basis[i][0] - b * basis[i][1];
        rss += d * d;
    }
    const double relative_residual = std::sqrt(rss / static_cast<double>(samples)) / amplitude;
    if (!(relative_residual <= options.max_relative_residual)) {
        throw NumericalError("free_phase_numeric: asymptotic fit residual too large, increase r_max");
    }

    const double delta = reduce_mod_pi(std::atan2(-b, a));
    return {{channel, delta, PhaseMethod::ode, relative_residual}, amplitude, relative_residual};
}

/// Phase shift modulo pi, in (-pi/2, pi/2], with the fit residual as uncertainty.
inline PhaseShiftRecord free_phase_numeric(const FluxChannel& channel, double k, double r_max,
                                           const FreePhaseOptions& options = {}) {
    return free_phase_fit(channel, k, r_max, options).record;
}

}  // namespace abphase::radial
