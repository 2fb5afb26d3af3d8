// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "abphase/analytic.hpp"
#include "abphase/cli.hpp"
#include "abphase/fredholm.hpp"
#include "abphase/free_phase.hpp"
#include "abphase/o21.hpp"
#include "abphase/radial.hpp"
#include "abphase/scattering.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace abphase;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int failures = 0;

void criterion(int number, const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", number, name, o.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

double elapsed_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

int main() {
    criterion(1, "algebra closure", [] {
        const auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (long m = -2; m <= 2; ++m) {
            for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
                const FluxChannel c(m, alpha);
                const double e0 = e0_select(c);
                const auto r = o21::algebra_residuals(o21::build_discrete_series(e0, 64));
                worst = std::max(worst, r.max_residual());
                worst = std::max(worst, std::abs(e0 * (e0 - 1.0) - casimir_value(c)));
            }
        }
        const double t = elapsed_since(start);
        return Outcome{worst <= 1e-11 && t < 1.0, fmt("max residual %.3g over 20 channels, N=64, runtime %.3f s", worst, t)};
    });

    criterion(2, "spectrum equivalence", [] {
        const auto start = std::chrono::steady_clock::now();
        const radial::RadialGrid grid(radial::default_rho_max, radial::default_num_points);
        double worst = 0.0;
        for (double nu : {0.0, 0.25, 0.5, 1.0, 1.75}) {
            const FluxChannel c(0, nu);
            const auto e = radial::richardson_energies(c, grid, 4);
            for (std::size_t n = 0; n < 4; ++n) {
                const double exact = 2.0 * static_cast<double>(n) + 1.0 + nu;
                worst = std::max(worst, std::abs(e[n] - exact) / exact);
            }
        }
        const double t = elapsed_since(start);
        return Outcome{worst <= 1e-6 && t < 30.0, fmt("max relative error %.3g for n<=3, runtime %.2f s", worst, t)};
    });

    criterion(3, "fredholm route", [] {
        const auto schedule = fredholm::halving_schedule(1e-2, 10.0, 3);
        double worst = 0.0, slowest = 0.0;
        for (const FluxChannel c : {FluxChannel{0, 0.5}, FluxChannel{-1, 0.5}, FluxChannel{0, 0.25}, FluxChannel{1, 0.75},
                                    FluxChannel{2, 0.3}}) {
            const auto start = std::chrono::steady_clock::now();
            const auto fit = fredholm::extrapolate_omega(c, 1.0, schedule, fredholm::default_n_max);
            slowest = std::max(slowest, elapsed_since(start));
            worst = std::max(worst, std::abs(fit.record.value - phase_shift_analytic(c).value));
        }
        return Outcome{worst <= 0.01 && slowest < 60.0, fmt("max |delta - analytic| %.3g rad, slowest channel %.2f s", worst, slowest)};
    });

    criterion(4, "integral limit", [] {
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<long> m(-20, 20);
        std::uniform_real_distribution<double> a(-5.0, 5.0);
        int mismatches = 0;
        for (int i = 0; i < 100; ++i) {
            const FluxChannel c(m(rng), a(rng));
            if (fredholm::integral_limit_phase(c) != phase_shift_analytic(c).value) ++mismatches;
        }
        return Outcome{mismatches == 0, fmt("%.0f of 100 random channels differ", mismatches)};
    });

    criterion(5, "ode route", [] {
        const auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (int i = 0; i <= 12; ++i) {
            const FluxChannel c(0, 0.25 * i);
            const auto r = radial::free_phase_numeric(c, 1.0, 400.0);
            worst = std::max(worst, std::abs(difference_mod_pi(r.value, phase_shift_analytic(c).value)));
        }
        const double t = elapsed_since(start);
        return Outcome{worst <= 1e-4 && t < 10.0, fmt("max deviation mod pi %.3g for nu in [0, 3], runtime %.2f s", worst, t)};
    });

    criterion(6, "hellmann identity", [] {
        const radial::RadialGrid grid(radial::default_rho_max, radial::default_num_points);
        double worst_gap = 0.0, worst_moment = 0.0;
        bool positive = true;
        for (double nu : {0.5, 1.0, 2.0}) {
            const FluxChannel c(0, nu);
            const auto h = radial::hellmann_check(c, 0, grid, 1e-3);
            positive = positive && h.lhs > 0.0 && h.rhs > 0.0;
            worst_gap = std::max(worst_gap, std::abs(h.lhs - h.rhs));
            // Gaussian-moment oracle for the ground state
            const double oracle = std::tgamma(nu) / std::tgamma(nu + 1.0);
            worst_moment = std::max(worst_moment, std::abs(4.0 * h.rhs - oracle) / oracle);
        }
        return Outcome{positive && worst_gap <= 1e-4 && worst_moment <= 1e-5,
                       fmt("max |lhs - rhs| %.3g, max <rho^-2> relative error %.3g, positive %.0f", worst_gap, worst_moment,
                           positive ? 1.0 : 0.0)};
    });

    criterion(7, "staircase identity", [] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> e(0.5, 5.0), w(0.02, 0.5), a(-2.0, 2.0);
        std::uniform_int_distribution<long> m(-3, 3);
        int tested = 0, wrong = 0;
        double worst = 0.0;
        while (tested < 50) {
            const FluxChannel c(m(rng), a(rng));
            const double E = e(rng), omega = w(rng), eps = 1e-4 * omega;
            const double rf = std::remainder(E / omega - 1.0 - c.nu(), 2.0) * omega;
            const double r0 = std::remainder(E / omega - 1.0 - c.abs_m(), 2.0) * omega;
            if (std::abs(rf) <= 10 * eps || std::abs(r0) <= 10 * eps) continue;
            const auto run = fredholm::log_fredholm_sum({c, E, omega, eps, fredholm::minimum_n_max(E, omega) * 4});
            const auto count = fredholm::level_counting(c, E, omega);
            const double stairs = -run.log_det.imag() / pi;
            const long expected = count.count_flux - count.count_free;
            if (std::lround(stairs) != expected) ++wrong;
            worst = std::max(worst, std::abs(stairs - static_cast<double>(expected)));
            ++tested;
        }
        return Outcome{wrong == 0, fmt("%.0f of 50 pairs off the integer count, max |-Im/pi - count| %.3g", wrong, worst)};
    });

    criterion(8, "integer-flux nullity and periodicity", [] {
        const auto grid = scattering::symmetric_angle_grid(19);
        double worst_null = 0.0;
        for (double alpha : {1.0, 2.0}) {
            for (const auto& s : scattering::cross_section_table(alpha, 1.0, grid).samples) worst_null = std::max(worst_null, s.dcs);
        }
        const auto a = scattering::cross_section_table(0.3, 1.0, grid);
        const auto b = scattering::cross_section_table(1.3, 1.0, grid);
        int outside = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::abs(a.samples[i].dcs - b.samples[i].dcs) > a.samples[i].dcs_uncertainty + b.samples[i].dcs_uncertainty) ++outside;
        }
        return Outcome{worst_null <= 1e-6 && outside == 0,
                       fmt("max integer-flux dcs %.3g, %.0f angles outside periodicity uncertainty", worst_null, outside)};
    });

    criterion(9, "cli determinism", [] {
        const std::filesystem::path dir(ABPHASE_GOLDEN_DIR);
        std::set<std::string> commands;
        int mismatched = 0, files = 0;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            std::ifstream in(entry.path(), std::ios::binary);
            std::stringstream buffer;
            buffer << in.rdbuf();
            const auto m = cli::manifest_from_output(buffer.str());
            commands.insert(m.command);
            if (cli::execute(m).text != buffer.str()) ++mismatched;
            ++files;
        }
        const bool all_commands = commands.size() == cli::command_names().size();
        return Outcome{mismatched == 0 && all_commands && files > 0,
                       fmt("%.0f golden files, %.0f byte mismatches, %.0f of 6 subcommands pinned", files, mismatched,
                           static_cast<double>(commands.size()))};
    });

    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
