#pragma once

/**
 * @file scattering.hpp
 * @brief Abel-regularized partial-wave sum for the scattering amplitude.
 *
 *     f(phi) = (2 pi i k)^(-1/2) sum_{|m| <= M} (exp(2 i delta_m) - 1) exp(i m phi) exp(-eta |m|)
 *
 * exp(2 i delta_m) - 1 does not decay in m, so the series only converges in
 * the Abel sense. The damped sum is analytic in eta with radius |phi|; it is
 * evaluated on a halving schedule eta_0 2^-j and extrapolated to eta = 0 by
 * Neville's polynomial scheme. The cutoff grows with 1/eta so the discarded
 * tail weight stays below exp(-truncation_exponent).
 */

#include "abphase/analytic.hpp"
#include "abphase/summation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace abphase::scattering {

inline constexpr double forward_cone = pi / 36.0;  // 5 degrees

struct AbelOptions {
    std::size_t levels = 8;
    double angle_cap = 0.25;  ///< eta_0 <= angle_cap * |phi|
    double truncation_exponent = 36.0;
    double convergence_threshold = 1e-6;  ///< max amplitude spread accepted
};

struct AmplitudeSample {
    double angle;
    std::complex<double> amplitude;
    double dcs;
    double amplitude_uncertainty;
    double dcs_uncertainty;
    bool converged;
};

struct CrossSectionTable {
    double alpha;
    double k;
    std::vector<AmplitudeSample> samples;
};

/// exp(2 i delta_m) for one channel.
inline std::complex<double> channel_s_matrix(const FluxChannel& channel) {
    return std::polar(1.0, 2.0 * phase_shift_analytic(channel).value);
}

namespace detail {

/// Extrapolates samples (x_i, y_i) to x = 0 with Neville's scheme. The
/// error estimate is the larger change against the two sub-tableaux that
/// drop the first or the last point.
inline std::pair<std::complex<double>, double> neville_at_zero(const std::vector<double>& x,
                                                                 std::vector<std::complex<double>> y) {
    const std::size_t n = x.size();
    std::complex<double> without_last = y[0];
    std::complex<double> without_first = y[n - 1];
    for (std::size_t k = 1; k < n; ++k) {
        if (k + 1 == n) {
            without_last = y[0];
            without_first = y[1];
        }
        for (std::size_t i = 0; i + k < n; ++i) {
            y[i] = (x[i + k] * y[i] - x[i] * y[i + 1]) / (x[i + k] - x[i]);
        }
    }
    return {y[0], std::max(std::abs(y[0] - without_last), std::abs(y[0] - without_first))};
}

}  // namespace detail

/// exp(2 i delta_m) - 1 for |m| <= m_top.
class ChannelCoefficients {
public:
    ChannelCoefficients(double alpha, long m_top) : m_top_(m_top), values_(static_cast<std::size_t>(2 * m_top + 1)) {
        for (long m = -m_top; m <= m_top; ++m) values_[index(m)] = channel_s_matrix(FluxChannel(m, alpha)) - 1.0;
    }

    long m_top() const noexcept { return m_top_; }
    std::complex<double> operator()(long m) const { return values_[index(m)]; }

private:
    std::size_t index(long m) const { return static_cast<std::size_t>(m + m_top_); }

    long m_top_;
    std::vector<std::complex<double>> values_;
};

namespace detail {

struct AbelSchedule {
    double eta0;
    long m0;  ///< cutoff at eta0; doubled with every halving of eta
};

inline AbelSchedule abel_schedule(double angle, long m_cut, double abel_eta, const AbelOptions& options) {
    const double eta0 = std::min(abel_eta, options.angle_cap * std::abs(angle));
    const long m0 = std::max(m_cut, static_cast<long>(std::ceil(options.truncation_exponent / eta0)));
    return {eta0, m0};
}

inline long top_cutoff(const AbelSchedule& s, const AbelOptions& options) { return s.m0 << (options.levels - 1); }

}  // namespace detail

inline AmplitudeSample amplitude_at(const ChannelCoefficients& coefficient, double k, double angle, long m_cut,
                                    double abel_eta, const AbelOptions& options = {}) {
    const auto schedule = detail::abel_schedule(angle, m_cut, abel_eta, options);
    if (detail::top_cutoff(schedule, options) > coefficient.m_top()) {
        throw std::invalid_argument("amplitude_at: coefficient table too short for the Abel schedule");
    }
    const double eta0 = schedule.eta0;
    const long m0 = schedule.m0;

    std::vector<double> etas;
    std::vector<std::complex<double>> sums;
    double magnitude = 0.0;
    for (std::size_t level = 0; level < options.levels; ++level) {
        const double eta = eta0 / static_cast<double>(1L << level);
        const long cut = m0 << level;
        CompensatedComplexSum sum;
        double mag = 0.0;
        sum.add(coefficient(0));
        for (long m = 1; m <= cut; ++m) {
            const double damp = std::exp(-eta * static_cast<double>(m));
            const std::complex<double> rot = std::polar(1.0, static_cast<double>(m) * angle);
            const auto plus = coefficient(m) * rot * damp;
            const auto minus = coefficient(-m) * std::conj(rot) * damp;
            sum.add(plus);
            sum.add(minus);
            mag += std::abs(plus) + std::abs(minus);
        }
        etas.push_back(eta);
        sums.push_back(sum.value());
        magnitude = std::max(magnitude, mag);
    }

    const auto [value, spread] = detail::neville_at_zero(etas, sums);
    const std::complex<double> prefactor = std::polar(1.0 / std::sqrt(2.0 * pi * k), -pi / 4);
    const double scale = std::abs(prefactor);
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;

    AmplitudeSample s{};
    s.angle = angle;
    s.amplitude = prefactor * value;
    s.dcs = std::norm(s.amplitude);
    s.amplitude_uncertainty = scale * (spread + rounding);
    s.dcs_uncertainty = 2.0 * std::abs(s.amplitude) * s.amplitude_uncertainty + s.amplitude_uncertainty * s.amplitude_uncertainty;
    s.converged = s.amplitude_uncertainty <= options.convergence_threshold;
    return s;
}

inline void check_angle(double angle) {
    if (!(angle > -pi && angle <= pi)) throw std::invalid_argument("scattering: angle must lie in (-pi, pi]");
    if (std::abs(angle) < forward_cone) throw std::invalid_argument("scattering: angle inside the excluded forward cone");
}

inline std::vector<AmplitudeSample> amplitude_partial_wave(double alpha, double k, const std::vector<double>& angles, long m_cut,
                                                           double abel_eta, const AbelOptions& options = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("amplitude_partial_wave: k must be positive");
    if (m_cut < 50) throw std::invalid_argument("amplitude_partial_wave: m_cut must be >= 50");
    if (!(abel_eta > 0.0 && abel_eta <= 0.1)) throw std::invalid_argument("amplitude_partial_wave: abel_eta must be in (0, 0.1]");
    if (options.levels < 2 || options.levels > 12) throw std::invalid_argument("amplitude_partial_wave: levels must be in [2, 12]");
    long m_top = 0;
    for (double a : angles) {
        check_angle(a);
        m_top = std::max(m_top, detail::top_cutoff(detail::abel_schedule(a, m_cut, abel_eta, options), options));
    }
    const ChannelCoefficients coefficients(alpha, m_top);
    std::vector<AmplitudeSample> out;
    out.reserve(angles.size());
    for (double a : angles) out.push_back(amplitude_at(coefficients, k, a, m_cut, abel_eta, options));
    return out;
}

/// count angles on each side: +-(cone + i (pi - cone)/(count - 1)), the
/// backward direction pi appearing once. Sorted ascending.
inline std::vector<double> symmetric_angle_grid(std::size_t count) {
    if (count < 2) throw std::invalid_argument("symmetric_angle_grid: count must be >= 2");
    std::vector<double> positive;
    for (std::size_t i = 0; i < count; ++i) {
        positive.push_back(forward_cone + (pi - forward_cone) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    positive.back() = pi;
    std::vector<double> out;
    for (std::size_t i = count - 1; i-- > 0;) out.push_back(-positive[i]);
    out.insert(out.end(), positive.begin(), positive.end());
    return out;
}

inline constexpr long default_m_cut = 200;
inline constexpr double default_abel_eta = 0.1;

inline CrossSectionTable cross_section_table(double alpha, double k, const std::vector<double>& angle_grid,
                                             long m_cut = default_m_cut, double abel_eta = default_abel_eta,
                                             const AbelOptions& options = {}) {
    return {alpha, k, amplitude_partial_wave(alpha, k, angle_grid, m_cut, abel_eta, options)};
}

}  // namespace abphase::scattering
