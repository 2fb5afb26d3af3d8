#pragma once

/**
 * @file analytic.hpp
 * @brief Closed-form Aharonov-Bohm channel quantities.
 *
 * A channel is one partial wave of the two-dimensional problem: an integer
 * angular momentum m plus the dimensionless flux alpha. Everything here
 * depends on the pair only through the effective Bessel order
 *
 *     nu = |m + alpha|
 *
 * and serves as ground truth for the numerical routes (o(2,1) matrices,
 * radial diagonalization, regularized Fredholm sums, ODE phase fits).
 *
 * Energies carry a separate oscillator scale omega (hbar = M = 1):
 *
 *     E_n / omega = 2n + 1 + nu
 *     delta_m     = -(pi/2) (nu - |m|)
 *     C           = ((m + alpha)^2 - 1) / 4      (o(2,1) Casimir)
 *     E0          = (1 +- nu) / 2                (lowest weight candidates)
 */

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace abphase {

inline constexpr double pi = std::numbers::pi;

/// One partial wave (m, alpha). nu is always recomputed from the pair.
class FluxChannel {
public:
    constexpr FluxChannel(long m, double alpha) noexcept : m_(m), alpha_(alpha) {}

    constexpr long m() const noexcept { return m_; }
    constexpr double alpha() const noexcept { return alpha_; }
    double nu() const noexcept { return std::abs(static_cast<double>(m_) + alpha_); }
    double abs_m() const noexcept { return std::abs(static_cast<double>(m_)); }

    friend constexpr bool operator==(const FluxChannel&, const FluxChannel&) = default;

private:
    long m_;
    double alpha_;
};

enum class PhaseMethod { analytic, fredholm, ode };

inline std::string_view to_string(PhaseMethod method) {
    switch (method) {
        case PhaseMethod::analytic: return "analytic";
        case PhaseMethod::fredholm: return "fredholm";
        case PhaseMethod::ode: return "ode";
    }
    return "unknown";
}

/// Phase shift in radians. Analytic and fredholm values are unreduced;
/// ode values live in (-pi/2, pi/2].
struct PhaseShiftRecord {
    FluxChannel channel;
    double value;
    PhaseMethod method;
    double uncertainty;
};

struct SpectrumLevel {
    long n;
    double energy;
};

struct SpectrumTable {
    FluxChannel channel;
    double omega;
    std::vector<SpectrumLevel> levels;
};

/// Reduce an angle into (-pi/2, pi/2].
inline double reduce_mod_pi(double angle) {
    double r = std::remainder(angle, pi);  // [-pi/2, pi/2]
    if (r <= -pi / 2) r += pi;
    return r;
}

/// Signed distance between two angles taken modulo pi, in (-pi/2, pi/2].
inline double difference_mod_pi(double a, double b) { return reduce_mod_pi(a - b); }

inline double effective_order(const FluxChannel& channel) { return channel.nu(); }

inline PhaseShiftRecord phase_shift_analytic(const FluxChannel& channel) {
    const double value = (pi / 2) * (channel.abs_m() - channel.nu());
    return {channel, value, PhaseMethod::analytic, 0.0};
}

inline double casimir_value(const FluxChannel& channel) {
    const double s = static_cast<double>(channel.m()) + channel.alpha();
    return (s * s - 1.0) / 4.0;
}

/// Both roots of E0 (E0 - 1) = C, upper branch first.
inline std::pair<double, double> e0_candidates(const FluxChannel& channel) {
    const double nu = channel.nu();
    return {0.5 * (1.0 + nu), 0.5 * (1.0 - nu)};
}

/// The admissible lowest weight. Only the upper branch has a J3 spectrum
/// whose derivative in (m+alpha)^2 is positive, which positivity of <Q^-2>
/// demands. At nu == 0 both branches coincide at 1/2.
inline double e0_select(const FluxChannel& channel) { return e0_candidates(channel).first; }

/// True when nu == 0, where the two lowest-weight branches are degenerate.
inline bool is_double_root(const FluxChannel& channel) { return channel.nu() == 0.0; }

inline SpectrumTable spectrum_analytic(const FluxChannel& channel, double omega, long n_max) {
    if (!(omega > 0.0)) throw std::invalid_argument("spectrum_analytic: omega must be positive");
    if (n_max < 0) throw std::invalid_argument("spectrum_analytic: n_max must be non-negative");
    SpectrumTable table{channel, omega, {}};
    table.levels.reserve(static_cast<std::size_t>(n_max) + 1);
    const double nu = channel.nu();
    for (long n = 0; n <= n_max; ++n) {
        table.levels.push_back({n, omega * (2.0 * static_cast<double>(n) + 1.0 + nu)});
    }
    return table;
}

}  // namespace abphase
