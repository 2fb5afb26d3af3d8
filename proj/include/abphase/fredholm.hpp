#pragma once

/**
 * @file fredholm.hpp
 * @brief Phase shifts from the regularized log Fredholm determinant.
 *
 * With the oscillator switched on both the flux and the free channel have
 * discrete towers E_n = omega (2n + 1 + nu) and omega (2n + 1 + |m|), and
 *
 *     log D_m(E + i eps) = sum_n [ Log(E - E_n^flux + i eps) - Log(E - E_n^free + i eps) ].
 *
 * exp(2 i delta) = D* / D gives delta = -Im log D. Finite eps stands in for
 * E + i0: for eps >> 2 omega the counting staircase is smoothed to its
 * small-omega integral, for eps << 2 omega the sum reproduces the integer
 * level-count difference. Only the imaginary part is used; the real part
 * drifts logarithmically with the truncation and is reported as-is.
 */

#include "abphase/analytic.hpp"
#include "abphase/errors.hpp"
#include "abphase/summation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace abphase::fredholm {

struct LevelCount {
    FluxChannel channel;
    double energy;
    double omega;
    long count_flux;
    long count_free;
};

struct FredholmConfig {
    FluxChannel channel;
    double energy;
    double omega;
    double epsilon;  ///< imaginary offset; negative evaluates at E - i0
    long n_max;      ///< last level index included
};

struct FredholmRun {
    FluxChannel channel;
    double energy;
    double omega;
    double epsilon;
    long n_max;
    std::complex<double> log_det;
    double phase;             ///< -Im(log_det)
    double smoothing_factor;  ///< epsilon / (2 omega), in units of the level spacing
    double tail_contribution; ///< |Im| contributed by the last 10% of terms
};

struct OmegaStep {
    double omega;
    double epsilon;
};

struct OmegaExtrapolation {
    PhaseShiftRecord record;
    double slope;  ///< d phase / d omega of the linear model
    std::vector<FredholmRun> runs;
};

inline constexpr double tail_tolerance = 1e-6;
inline constexpr long default_n_max = 1'000'000;

namespace detail {

/// #{n >= 0 : omega (2n + 1 + order) < energy}, consistent with the
/// floating-point level formula used everywhere else.
inline long count_below(double energy, double omega, double order) {
    auto level = [&](long n) { return omega * (2.0 * static_cast<double>(n) + 1.0 + order); };
    const double x = 0.5 * (energy / omega - 1.0 - order);
    long c = x > 0.0 ? static_cast<long>(std::ceil(x)) : 0;
    while (c > 0 && !(level(c - 1) < energy)) --c;
    while (level(c) < energy) ++c;
    return c;
}

}  // namespace detail

inline LevelCount level_counting(const FluxChannel& channel, double energy, double omega) {
    if (!(energy > 0.0) || !(omega > 0.0)) throw std::invalid_argument("level_counting: energy and omega must be positive");
    return {channel, energy, omega, detail::count_below(energy, omega, channel.nu()),
            detail::count_below(energy, omega, channel.abs_m())};
}

/// Smallest n_max with 2 omega n_max >= 50 E.
inline long minimum_n_max(double energy, double omega) {
    return static_cast<long>(std::ceil(25.0 * energy / omega));
}

inline FredholmRun log_fredholm_sum(const FredholmConfig& config) {
    const double E = config.energy;
    const double omega = config.omega;
    const double eps = config.epsilon;
    if (!(E > 0.0) || !(omega > 0.0)) throw std::invalid_argument("log_fredholm_sum: energy and omega must be positive");
    if (eps == 0.0 || !std::isfinite(eps)) throw std::invalid_argument("log_fredholm_sum: epsilon must be finite and nonzero");
    if (config.n_max < minimum_n_max(E, omega)) {
        throw std::invalid_argument("log_fredholm_sum: n_max too small, need 2 omega n_max >= 50 E");
    }

    const double nu = config.channel.nu();
    const double free_order = config.channel.abs_m();
    const long tail_start = config.n_max - config.n_max / 10;

    CompensatedSum re;
    CompensatedSum im;
    CompensatedSum tail;
    for (long n = 0; n <= config.n_max; ++n) {
        const double base = 2.0 * static_cast<double>(n) + 1.0;
        const double x_flux = E - omega * (base + nu);
        const double x_free = E - omega * (base + free_order);
        if (x_flux == x_free) continue;
        const double d_im = std::atan2(eps, x_flux) - std::atan2(eps, x_free);
        const double d_re = 0.5 * (std::log(x_flux * x_flux + eps * eps) - std::log(x_free * x_free + eps * eps));
        re.add(d_re);
        im.add(d_im);
        if (n > tail_start) tail.add(d_im);
    }

    FredholmRun run{config.channel, E, omega, eps, config.n_max, {re.value(), im.value()}, 0.0,
                    std::abs(eps) / (2.0 * omega), std::abs(tail.value())};
    run.phase = -run.log_det.imag();
    if (run.tail_contribution > tail_tolerance) {
        throw NumericalError("log_fredholm_sum: n_max too small, last 10% of terms contribute " +
                             std::to_string(run.tail_contribution) + " to Im log D");
    }
    return run;
}

/// Imaginary part of the small-omega integral
///
///     (1/2 omega) int_0^inf dx [ log(E - x - omega nu + i0) - log(E - x - omega |m| + i0) ].
///
/// Each log has argument pi beyond its threshold and 0 before it, so only a
/// window of length omega |nu - |m|| contributes pi / (2 omega).
inline double integral_limit_phase(const FluxChannel& channel) {
    const double shortfall = channel.abs_m() - channel.nu();  // -window, in units of omega
    const double minus_im_log_det = (pi / 2) * shortfall;
    return minus_im_log_det;
}

/// Runs the schedule and fits phase(omega) = delta + slope * omega.
inline OmegaExtrapolation extrapolate_omega(const FluxChannel& channel, double energy, const std::vector<OmegaStep>& schedule,
                                            long n_max = 0) {
    if (schedule.size() < 3) throw std::invalid_argument("extrapolate_omega: need at least 3 schedule entries");
    const double ratio = schedule.front().epsilon / schedule.front().omega;
    if (!(ratio > 0.0)) throw std::invalid_argument("extrapolate_omega: epsilon must be positive");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (i > 0 && !(schedule[i].omega < schedule[i - 1].omega)) {
            throw std::invalid_argument("extrapolate_omega: omega must be strictly decreasing");
        }
        if (std::abs(schedule[i].epsilon / schedule[i].omega - ratio) > 1e-9 * ratio) {
            throw std::invalid_argument("extrapolate_omega: epsilon/omega must be fixed across the schedule");
        }
    }

    OmegaExtrapolation out{{channel, 0.0, PhaseMethod::fredholm, 0.0}, 0.0, {}};
    for (const auto& step : schedule) {
        const long n = n_max > 0 ? n_max : std::max(default_n_max, minimum_n_max(energy, step.omega));
        out.runs.push_back(log_fredholm_sum({channel, energy, step.omega, step.epsilon, n}));
    }

    const auto count = static_cast<double>(out.runs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, tail = 0.0;
    for (const auto& run : out.runs) {
        sx += run.omega;
        sy += run.phase;
        sxx += run.omega * run.omega;
        sxy += run.omega * run.phase;
        tail = std::max(tail, run.tail_contribution);
    }
    const double denom = count * sxx - sx * sx;
    const double slope = (count * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / count;

    double rss = 0.0;
    double max_residual = 0.0;
    for (const auto& run : out.runs) {
        const double r = run.phase - (intercept + slope * run.omega);
        rss += r * r;
        max_residual = std::max(max_residual, std::abs(r));
    }
    const double sigma2 = rss / (count - 2.0);
    const double intercept_error = std::sqrt(sigma2 * sxx / denom);

    // An unsmoothed staircase jumps by integers of pi as omega shrinks.
    const double tolerance = 1e-7 + 10.0 * max_residual;
    bool rising = false;
    bool falling = false;
    for (std::size_t i = 1; i < out.runs.size(); ++i) {
        const double d = out.runs[i].phase - out.runs[i - 1].phase;
        if (d > tolerance) rising = true;
        if (d < -tolerance) falling = true;
    }
    if ((rising && falling) || max_residual > 0.05) {
        throw NumericalError("extrapolate_omega: phase sequence is not monotone in omega, epsilon/omega too small");
    }

    out.slope = slope;
    out.record.value = intercept;
    out.record.uncertainty = std::max(intercept_error, tail);
    return out;
}

/// Schedule omega_0, omega_0/2, ... with fixed epsilon/omega.
inline std::vector<OmegaStep> halving_schedule(double omega0, double epsilon_ratio, std::size_t steps) {
    std::vector<OmegaStep> out;
    double w = omega0;
    for (std::size_t i = 0; i < steps; ++i, w *= 0.5) out.push_back({w, epsilon_ratio * w});
    return out;
}

}  // namespace abphase::fredholm
