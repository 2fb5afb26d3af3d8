#pragma once

/**
 * @file radial.hpp
 * @brief Discretized confined radial problem for one channel.
 *
 * In oscillator units (x = Q, M = omega = 1) the channel equation is
 *
 *     -f'' - f'/rho + (nu^2/rho^2 + rho^2) f = lambda f,   lambda = 2E/omega,
 *
 * with eigenvalues lambda_n = 2(2n + 1 + nu). Two discretizations are
 * provided; both produce a symmetric tridiagonal matrix whose eigenvectors
 * carry the discrete L2 normalization.
 *
 * squared_radius (default)
 *     f = rho^nu w(t), t = rho^2. The quadratic form becomes
 *         int (4 t^(nu+1) w'^2 + t^(nu+1) w^2) dt = lambda int t^nu w^2 dt
 *     and w is analytic at t = 0 for every nu >= 0. Uniform nodes
 *     t_j = j h (j = 0..N-1), Dirichlet at t = rho_max^2, element stiffness
 *     and lumped mass integrated exactly against the t^p weights, then
 *     symmetrized with the lumped mass. Second order at nu = 0 and for
 *     nu >= 1/2; in between a weaker h^(1 + 2 nu) component is present.
 *
 * liouville
 *     u = sqrt(rho) f, -u'' + ((nu^2 - 1/4)/rho^2 + rho^2) u = lambda u on
 *     rho_j = j h (j = 1..N), Dirichlet at both ends. For nu < 1/2 the
 *     attractive 1/rho^2 term destroys the convergence rate (about 13% error
 *     at nu = 0 with 2000 nodes); kept for comparison.
 */

#include "abphase/analytic.hpp"
#include "abphase/errors.hpp"
#include "abphase/tridiagonal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace abphase::radial {

enum class RadialScheme { squared_radius, liouville };

inline std::string_view to_string(RadialScheme scheme) {
    return scheme == RadialScheme::liouville ? "liouville" : "squared_radius";
}

inline RadialScheme scheme_from_string(std::string_view name) {
    if (name == "liouville") return RadialScheme::liouville;
    if (name == "squared_radius") return RadialScheme::squared_radius;
    throw std::invalid_argument("unknown radial scheme: " + std::string(name));
}

inline constexpr double default_rho_max = 12.0;
inline constexpr std::size_t default_num_points = 20000;

class RadialGrid {
public:
    RadialGrid(double rho_max, std::size_t num_points, RadialScheme scheme = RadialScheme::squared_radius)
        : rho_max_(rho_max), num_points_(num_points), scheme_(scheme) {
        if (!(rho_max > 0.0)) throw std::invalid_argument("RadialGrid: rho_max must be positive");
        if (num_points < 16) throw std::invalid_argument("RadialGrid: num_points must be >= 16");
    }

    double rho_max() const noexcept { return rho_max_; }
    std::size_t num_points() const noexcept { return num_points_; }
    RadialScheme scheme() const noexcept { return scheme_; }

    /// Node spacing in the discretized variable: rho for liouville,
    /// t = rho^2 for squared_radius.
    double spacing() const noexcept {
        return scheme_ == RadialScheme::liouville ? rho_max_ / static_cast<double>(num_points_ + 1)
                                                  : rho_max_ * rho_max_ / static_cast<double>(num_points_);
    }

    /// Radius of node j.
    double rho(std::size_t j) const noexcept {
        const double h = spacing();
        return scheme_ == RadialScheme::liouville ? static_cast<double>(j + 1) * h
                                                  : std::sqrt(static_cast<double>(j) * h);
    }

    std::vector<double> nodes() const {
        std::vector<double> r(num_points_);
        for (std::size_t j = 0; j < num_points_; ++j) r[j] = rho(j);
        return r;
    }

    /// Grid with half the spacing over the same box.
    RadialGrid refined() const {
        const std::size_t n = scheme_ == RadialScheme::liouville ? 2 * num_points_ + 1 : 2 * num_points_;
        return RadialGrid(rho_max_, n, scheme_);
    }

private:
    double rho_max_;
    std::size_t num_points_;
    RadialScheme scheme_;
};

/// Symmetric tridiagonal discretization. `mass` holds the node weights that
/// map the symmetric-form vector y back to function values, w_j = y_j / sqrt(mass_j).
struct RadialProblem {
    FluxChannel channel;
    RadialGrid grid;
    double nu;
    std::vector<double> diagonal;
    std::vector<double> offdiagonal;
    std::vector<double> mass;

    SymmetricTridiagonal matrix() const { return {diagonal, offdiagonal}; }
};

struct EigenResult {
    std::vector<double> eigenvalues;                ///< lambda = 2E/omega, ascending
    std::vector<std::vector<double>> eigenvectors;  ///< unit discrete 2-norm

    double energy_over_omega(std::size_t level) const { return 0.5 * eigenvalues.at(level); }
};

namespace detail {

/// int_a^b t^p dt for 0 <= a < b, stable when b - a << a.
inline double power_integral(double p, double a, double b) {
    const double q = p + 1.0;
    if (a == 0.0) {
        if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
        return std::pow(b, q) / q;
    }
    const double lr = std::log1p((b - a) / a);
    if (q == 0.0) return lr;
    return std::pow(a, q) * std::expm1(q * lr) / q;
}

inline RadialProblem build_squared_radius(const FluxChannel& channel, double nu, const RadialGrid& grid) {
    const std::size_t n = grid.num_points();
    const double h = grid.spacing();
    const double top = grid.rho_max() * grid.rho_max();

    RadialProblem p{channel, grid, nu, std::vector<double>(n), std::vector<double>(n - 1), std::vector<double>(n)};
    std::vector<double> potential(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * h;
        const double lo = j == 0 ? 0.0 : t - 0.5 * h;
        const double hi = std::min(t + 0.5 * h, top);
        p.mass[j] = power_integral(nu, lo, hi);
        potential[j] = power_integral(nu + 1.0, lo, hi);
    }
    // element j spans [t_j, t_{j+1}]; element n-1 ends on the Dirichlet node
    std::vector<double> stiffness(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * h;
        stiffness[j] = 4.0 * power_integral(nu + 1.0, t, t + h) / (h * h);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double a = potential[j] + stiffness[j];
        if (j > 0) a += stiffness[j - 1];
        p.diagonal[j] = a / p.mass[j];
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        p.offdiagonal[j] = -stiffness[j] / std::sqrt(p.mass[j] * p.mass[j + 1]);
    }
    return p;
}

inline RadialProblem build_liouville(const FluxChannel& channel, double nu, const RadialGrid& grid) {
    const std::size_t n = grid.num_points();
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    RadialProblem p{channel, grid, nu, std::vector<double>(n), std::vector<double>(n - 1, -inv_h2), std::vector<double>(n, h)};
    for (std::size_t j = 0; j < n; ++j) {
        const double r = grid.rho(j);
        p.diagonal[j] = 2.0 * inv_h2 + (nu * nu - 0.25) / (r * r) + r * r;
    }
    return p;
}

inline RadialProblem build_for_order(const FluxChannel& channel, double nu, const RadialGrid& grid) {
    return grid.scheme() == RadialScheme::liouville ? build_liouville(channel, nu, grid)
                                                    : build_squared_radius(channel, nu, grid);
}

inline constexpr std::array<double, 4> gauss_nodes = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                      0.8611363115940526};
inline constexpr std::array<double, 4> gauss_weights = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                        0.3478548451374538};

/// int t^p w_h(t)^2 over the piecewise-linear interpolant of node values
/// (w_N = 0 at the Dirichlet end). The first element is integrated in
/// closed form; the rest by 4-point Gauss-Legendre.
inline double weighted_square_integral(const std::vector<double>& w, double h, double p) {
    const std::size_t n = w.size();
    double total = 0.0;
    {
        const double w0 = w[0];
        const double w1 = n > 1 ? w[1] : 0.0;
        const double slope = (w1 - w0) / h;
        const double q = p + 1.0;
        if (!(q > 0.0)) {
            if (w0 != 0.0) return std::numeric_limits<double>::infinity();
        }
        const double m0 = std::pow(h, q) / q;
        const double m1 = std::pow(h, q + 1.0) / (q + 1.0);
        const double m2 = std::pow(h, q + 2.0) / (q + 2.0);
        total += w0 * w0 * m0 + 2.0 * w0 * slope * m1 + slope * slope * m2;
    }
    for (std::size_t j = 1; j < n; ++j) {
        const double a = static_cast<double>(j) * h;
        const double wa = w[j];
        const double wb = j + 1 < n ? w[j + 1] : 0.0;
        double s = 0.0;
        for (std::size_t g = 0; g < gauss_nodes.size(); ++g) {
            const double x = 0.5 * (1.0 + gauss_nodes[g]);
            const double v = wa + (wb - wa) * x;
            s += gauss_weights[g] * std::pow(a + h * x, p) * v * v;
        }
        total += 0.5 * h * s;
    }
    return total;
}

inline double outer_weight(const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t start = n - std::max<std::size_t>(1, n / 20);
    double outer = 0.0;
    double all = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = y[j] * y[j];
        all += v;
        if (j >= start) outer += v;
    }
    return outer / all;
}

}  // namespace detail

inline RadialProblem build_confined_hamiltonian(const FluxChannel& channel, const RadialGrid& grid) {
    return detail::build_for_order(channel, channel.nu(), grid);
}

inline constexpr double box_weight_threshold = 1e-8;

/// Lowest `n_levels` eigenpairs. Throws NumericalError when the top level
/// leaks into the outermost 5% of the box or its turning point lies outside.
inline EigenResult solve_spectrum(const RadialProblem& problem, std::size_t n_levels, bool with_vectors = true) {
    if (n_levels == 0) throw std::invalid_argument("solve_spectrum: n_levels must be positive");
    if (n_levels > problem.diagonal.size()) throw std::invalid_argument("solve_spectrum: n_levels exceeds num_points");
    auto pairs = lowest_eigenpairs(problem.matrix(), n_levels, true);

    const double top = pairs.values.back();
    if (!(std::sqrt(std::max(top, 0.0)) < problem.grid.rho_max())) {
        throw NumericalError("solve_spectrum: box too small, turning point of level " + std::to_string(n_levels - 1) +
                             " lies outside rho_max");
    }
    if (detail::outer_weight(pairs.vectors.back()) > box_weight_threshold) {
        throw NumericalError("solve_spectrum: box too small, level " + std::to_string(n_levels - 1) +
                             " has weight on the outermost 5% of nodes");
    }
    EigenResult result{std::move(pairs.values), {}};
    if (with_vectors) result.eigenvectors = std::move(pairs.vectors);
    return result;
}

/// Lowest E/omega values, Richardson-extrapolated over spacings h and h/2.
inline std::vector<double> richardson_energies(const FluxChannel& channel, const RadialGrid& grid, std::size_t n_levels) {
    const auto coarse = solve_spectrum(build_confined_hamiltonian(channel, grid), n_levels, false);
    const auto fine = solve_spectrum(build_confined_hamiltonian(channel, grid.refined()), n_levels, false);
    std::vector<double> out(n_levels);
    for (std::size_t i = 0; i < n_levels; ++i) {
        out[i] = 0.5 * (4.0 * fine.eigenvalues[i] - coarse.eigenvalues[i]) / 3.0;
    }
    return out;
}

/// <rho^-2> of an eigenvector, equal to <Q^-2> in oscillator units.
/// Infinite for nu == 0 (the integrand is not integrable at the origin).
inline double expectation_inv_rho2(const RadialProblem& problem, const EigenResult& result, std::size_t level) {
    if (level >= result.eigenvectors.size()) throw std::out_of_range("expectation_inv_rho2: level not available");
    const auto& y = result.eigenvectors[level];
    if (problem.grid.scheme() == RadialScheme::liouville) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double r = problem.grid.rho(j);
            num += y[j] * y[j] / (r * r);
            den += y[j] * y[j];
        }
        return num / den;
    }
    std::vector<double> w(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) w[j] = y[j] / std::sqrt(problem.mass[j]);
    const double h = problem.grid.spacing();
    const double num = detail::weighted_square_integral(w, h, problem.nu - 1.0);
    const double den = detail::weighted_square_integral(w, h, problem.nu);
    return num / den;
}

/// <rho^-2> of one level over spacings h, h/2, h/4, extrapolated with
/// Aitken's delta-squared. The error mixes powers of h below nu = 2, so a
/// fixed-exponent Richardson step does not apply.
inline double extrapolated_inv_rho2(const FluxChannel& channel, const RadialGrid& grid, std::size_t level) {
    std::array<double, 3> v{};
    RadialGrid g = grid;
    for (std::size_t i = 0; i < v.size(); ++i, g = g.refined()) {
        const auto problem = build_confined_hamiltonian(channel, g);
        v[i] = expectation_inv_rho2(problem, solve_spectrum(problem, level + 1), level);
        if (!std::isfinite(v[i])) return v[i];
    }
    const double d1 = v[1] - v[0];
    const double d2 = v[2] - v[1];
    const double q = d2 / d1;
    if (!(q > 0.0 && q < 1.0)) return v[2];
    return v[2] - d2 * d2 / (d2 - d1);
}

struct HellmannResult {
    double lhs;  ///< d m0 / d (m+alpha)^2 by central difference, m0 = E/(2 omega)
    double rhs;  ///< <Q^-2> / 4
};

/// Feynman-Hellmann check of the J3 eigenvalue against the (m+alpha)^2 derivative.
inline HellmannResult hellmann_check(const FluxChannel& channel, std::size_t level, const RadialGrid& grid, double dnu2) {
    const double nu2 = channel.nu() * channel.nu();
    if (!(dnu2 > 0.0) || !(dnu2 < nu2)) throw std::invalid_argument("hellmann_check: need 0 < dnu2 < (m+alpha)^2");
    auto j3_eigenvalue = [&](double order) {
        const auto r = solve_spectrum(detail::build_for_order(channel, order, grid), level + 1, false);
        return 0.25 * r.eigenvalues[level];
    };
    const double up = j3_eigenvalue(std::sqrt(nu2 + dnu2));
    const double down = j3_eigenvalue(std::sqrt(nu2 - dnu2));
    return {(up - down) / (2.0 * dnu2), 0.25 * extrapolated_inv_rho2(channel, grid, level)};
}

}  // namespace abphase::radial
