#include "abphase/analytic.hpp"
#include "abphase/fredholm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace abphase;
using namespace abphase::fredholm;

namespace {

// Independent oracle: the imaginary part as a plain arctan sum in long double.
// For x != 0, atan2(eps, x) = atan(eps / x) + (x < 0 ? pi : 0) for eps > 0.
long double arctan_oracle(const FluxChannel& c, double E, double omega, double eps, long n_max) {
    const long double pi_l = 3.141592653589793238462643383279502884L;
    long double total = 0.0L;
    auto arg = [&](long double x) { return std::atan(static_cast<long double>(eps) / x) + (x < 0 ? pi_l : 0.0L); };
    for (long n = n_max; n >= 0; --n) {
        const long double base = 2.0L * n + 1.0L;
        const long double xf = E - omega * (base + static_cast<long double>(c.nu()));
        const long double x0 = E - omega * (base + static_cast<long double>(c.abs_m()));
        total += arg(xf) - arg(x0);
    }
    return -total;
}

}  // namespace

TEST(LevelCounting, Examples) {
    auto c = level_counting({0, 0.0}, 10.0, 1.0);
    EXPECT_EQ(c.count_flux, 5);
    EXPECT_EQ(c.count_free, 5);
    c = level_counting({0, 0.5}, 10.0, 1.0);
    EXPECT_EQ(c.count_flux, 5);
    EXPECT_EQ(c.count_free, 5);
    c = level_counting({0, 0.5}, 10.2, 1.0);
    EXPECT_EQ(c.count_flux, 5);
    EXPECT_EQ(c.count_free, 5);
    c = level_counting({0, 0.5}, 9.4, 1.0);
    EXPECT_EQ(c.count_flux, 4);
    EXPECT_EQ(c.count_free, 5);
    // a level exactly at E is not counted
    c = level_counting({0, 0.0}, 9.0, 1.0);
    EXPECT_EQ(c.count_free, 4);
    EXPECT_THROW(level_counting({0, 0.5}, 0.0, 1.0), std::invalid_argument);
}

TEST(LevelCounting, MatchesEnumeration) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> e(0.1, 40.0), w(0.05, 3.0), a(-3.0, 3.0);
    std::uniform_int_distribution<long> m(-4, 4);
    for (int t = 0; t < 500; ++t) {
        const FluxChannel ch(m(rng), a(rng));
        const double E = e(rng), omega = w(rng);
        long flux = 0, free = 0;
        for (long n = 0; n < 10000; ++n) {
            if (omega * (2.0 * n + 1.0 + ch.nu()) < E) ++flux;
            if (omega * (2.0 * n + 1.0 + ch.abs_m()) < E) ++free;
        }
        const auto c = level_counting(ch, E, omega);
        EXPECT_EQ(c.count_flux, flux);
        EXPECT_EQ(c.count_free, free);
        if (ch.nu() >= ch.abs_m()) {
            EXPECT_LE(c.count_flux, c.count_free);
        }
    }
}

TEST(LogFredholmSum, ZeroFluxCancelsTermwise) {
    for (long m : {-3L, 0L, 2L}) {
        const auto run = log_fredholm_sum({{m, 0.0}, 1.0, 1e-2, 0.1, 5000});
        EXPECT_EQ(run.log_det, std::complex<double>(0.0, 0.0));
        EXPECT_EQ(run.phase, 0.0);
    }
    // nu == |m| with nonzero flux
    const auto run = log_fredholm_sum({{-1, 2.0}, 1.0, 1e-2, 0.1, 5000});
    EXPECT_EQ(run.log_det, std::complex<double>(0.0, 0.0));
}

TEST(LogFredholmSum, Examples) {
    const auto a = log_fredholm_sum({{0, 0.5}, 1.0, 1e-3, 1e-2, 1'000'000});
    EXPECT_NEAR(a.phase, -pi / 4, 0.01);
    EXPECT_EQ(a.phase, -a.log_det.imag());
    EXPECT_DOUBLE_EQ(a.smoothing_factor, 5.0);
    EXPECT_NEAR(a.phase, static_cast<double>(arctan_oracle({0, 0.5}, 1.0, 1e-3, 1e-2, 1'000'000)), 1e-9);

    const auto b = log_fredholm_sum({{-1, 0.5}, 1.0, 1e-3, 1e-2, 1'000'000});
    EXPECT_NEAR(b.phase, pi / 4, 0.01);
    EXPECT_NEAR(b.phase, static_cast<double>(arctan_oracle({-1, 0.5}, 1.0, 1e-3, 1e-2, 1'000'000)), 1e-9);
}

TEST(LogFredholmSum, ConjugationUnderEpsilonSign) {
    for (const FluxChannel c : {FluxChannel{0, 0.5}, FluxChannel{2, 0.3}, FluxChannel{-1, 0.75}}) {
        const auto up = log_fredholm_sum({c, 1.3, 2e-3, 2e-2, 1000000});
        const auto down = log_fredholm_sum({c, 1.3, 2e-3, -2e-2, 1000000});
        EXPECT_EQ(down.log_det, std::conj(up.log_det));
    }
}

TEST(LogFredholmSum, StaircaseAtTinySmoothing) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> e(0.5, 5.0), w(0.02, 0.5), a(0.05, 0.95);
    std::uniform_int_distribution<long> m(-3, 3);
    int tested = 0;
    while (tested < 30) {
        const FluxChannel ch(m(rng), a(rng));
        const double E = e(rng), omega = w(rng);
        const double eps = 1e-4 * omega;
        // stay more than 10 eps away from any level
        const double rf = std::remainder(E / omega - 1.0 - ch.nu(), 2.0) * omega;
        const double r0 = std::remainder(E / omega - 1.0 - ch.abs_m(), 2.0) * omega;
        if (std::abs(rf) <= 10 * eps || std::abs(r0) <= 10 * eps) continue;
        const auto run = log_fredholm_sum({ch, E, omega, eps, minimum_n_max(E, omega) * 4});
        const auto count = level_counting(ch, E, omega);
        const double stairs = -run.log_det.imag() / pi;
        // a level 10 eps away still contributes atan(1/10) / pi
        EXPECT_EQ(std::lround(stairs), count.count_flux - count.count_free);
        EXPECT_NEAR(stairs, static_cast<double>(count.count_flux - count.count_free), 0.1);
        ++tested;
    }
}

TEST(LogFredholmSum, Preconditions) {
    EXPECT_THROW(log_fredholm_sum({{0, 0.5}, 1.0, 1e-3, 1e-2, 1000}), std::invalid_argument);
    EXPECT_THROW(log_fredholm_sum({{0, 0.5}, 1.0, 1e-3, 0.0, 1'000'000}), std::invalid_argument);
    EXPECT_THROW(log_fredholm_sum({{0, 0.5}, -1.0, 1e-3, 1e-2, 1'000'000}), std::invalid_argument);
    EXPECT_EQ(minimum_n_max(1.0, 1e-3), 25000);
    // large smoothing with a short sum leaves a tail above 1e-6
    EXPECT_THROW(log_fredholm_sum({{0, 0.5}, 1.0, 1e-2, 1.0, 2500}), NumericalError);
}

TEST(IntegralLimit, EqualsAnalyticExactly) {
    EXPECT_EQ(integral_limit_phase({0, 0.5}), -pi / 4);
    EXPECT_EQ(integral_limit_phase({0, 0.0}), 0.0);
    EXPECT_NEAR(integral_limit_phase({2, 0.3}), -0.15 * pi, 1e-15);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> a(-5.0, 5.0);
    std::uniform_int_distribution<long> m(-10, 10);
    for (int t = 0; t < 1000; ++t) {
        const FluxChannel c(m(rng), a(rng));
        EXPECT_EQ(integral_limit_phase(c), phase_shift_analytic(c).value);
    }
}

TEST(ExtrapolateOmega, Examples) {
    const std::vector<OmegaStep> schedule{{1e-2, 1e-1}, {5e-3, 5e-2}, {2.5e-3, 2.5e-2}};
    const auto a = extrapolate_omega({0, 0.5}, 1.0, schedule);
    EXPECT_NEAR(a.record.value, -0.7854, 0.005);
    EXPECT_EQ(a.record.method, PhaseMethod::fredholm);
    EXPECT_EQ(a.runs.size(), 3u);

    const auto zero = extrapolate_omega({0, 0.0}, 1.0, schedule);
    EXPECT_EQ(zero.record.value, 0.0);
    EXPECT_EQ(zero.record.uncertainty, 0.0);
    for (const auto& r : zero.runs) EXPECT_EQ(r.phase, 0.0);

    const auto b = extrapolate_omega({1, 0.75}, 1.0, schedule);
    EXPECT_NEAR(b.record.value, -1.1781, 0.01);
}

TEST(ExtrapolateOmega, AcceptanceChannels) {
    const auto schedule = halving_schedule(1e-2, 10.0, 3);
    for (const FluxChannel c : {FluxChannel{0, 0.5}, FluxChannel{-1, 0.5}, FluxChannel{0, 0.25}, FluxChannel{1, 0.75},
                                FluxChannel{2, 0.3}}) {
        const auto fit = extrapolate_omega(c, 1.0, schedule);
        EXPECT_NEAR(fit.record.value, phase_shift_analytic(c).value, 0.01) << c.m() << " " << c.alpha();
    }
}

TEST(ExtrapolateOmega, SmoothingRatioIndependence) {
    const FluxChannel c(0, 0.5);
    const auto lo = extrapolate_omega(c, 1.0, halving_schedule(1e-2, 5.0, 3));
    const auto hi = extrapolate_omega(c, 1.0, halving_schedule(1e-2, 50.0, 3));
    const double allowed = 2.0 * (lo.record.uncertainty + hi.record.uncertainty);
    EXPECT_LE(std::abs(lo.record.value - hi.record.value), std::max(allowed, 0.01));
    EXPECT_NEAR(lo.record.value, -pi / 4, 0.01);
    EXPECT_NEAR(hi.record.value, -pi / 4, 0.01);
}

TEST(ExtrapolateOmega, EnergyIndependence) {
    const FluxChannel c(0, 0.5);
    const auto a = extrapolate_omega(c, 0.5, halving_schedule(1e-2, 10.0, 3));
    const auto b = extrapolate_omega(c, 2.0, halving_schedule(1e-2, 10.0, 3));
    EXPECT_NEAR(a.record.value, b.record.value, std::max(a.record.uncertainty + b.record.uncertainty, 0.01));
}

TEST(ExtrapolateOmega, ScheduleValidation) {
    EXPECT_THROW(extrapolate_omega({0, 0.5}, 1.0, {{1e-2, 1e-1}, {5e-3, 5e-2}}), std::invalid_argument);
    EXPECT_THROW(extrapolate_omega({0, 0.5}, 1.0, {{1e-2, 1e-1}, {1e-2, 1e-1}, {5e-3, 5e-2}}), std::invalid_argument);
    EXPECT_THROW(extrapolate_omega({0, 0.5}, 1.0, {{1e-2, 1e-1}, {5e-3, 1e-1}, {2.5e-3, 2.5e-2}}), std::invalid_argument);
}

TEST(ExtrapolateOmega, UnsmoothedStaircaseIsRejected) {
    // eps << level spacing: the phase jumps with the level count
    EXPECT_THROW(extrapolate_omega({0, 0.5}, 1.0, halving_schedule(0.3, 1e-3, 4), 4000), NumericalError);
}
