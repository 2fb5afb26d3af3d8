#pragma once

/**
 * @file tridiagonal.hpp
 * @brief Lowest eigenpairs of a real symmetric tridiagonal matrix.
 *
 * Eigenvalues come from Sturm-sequence bisection (the number of negative
 * pivots of T - x I equals the number of eigenvalues below x). Eigenvectors
 * come from inverse iteration with a pivoted tridiagonal LU, followed by
 * modified Gram-Schmidt against the previously accepted vectors.
 *
 * Both steps are O(n) per evaluation, so grids with 10^5 nodes are cheap.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace abphase {

struct SymmetricTridiagonal {
    std::vector<double> diagonal;     ///< length n
    std::vector<double> offdiagonal;  ///< length n-1

    std::size_t size() const noexcept { return diagonal.size(); }
};

struct TridiagonalEigenpairs {
    std::vector<double> values;                ///< ascending
    std::vector<std::vector<double>> vectors;  ///< unit 2-norm, largest component positive
};

namespace detail {

inline double pivot_floor(const SymmetricTridiagonal& t) {
    double emax = 1.0;
    for (double e : t.offdiagonal) emax = std::max(emax, e * e);
    return std::numeric_limits<double>::min() * emax;
}

inline std::pair<double, double> gershgorin_bounds(const SymmetricTridiagonal& t) {
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.offdiagonal[i - 1]);
        if (i + 1 < n) r += std::abs(t.offdiagonal[i]);
        lo = std::min(lo, t.diagonal[i] - r);
        hi = std::max(hi, t.diagonal[i] + r);
    }
    const double pad = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    return {lo - pad, hi + pad};
}

}  // namespace detail

/// Number of eigenvalues strictly below x.
inline std::size_t sturm_count(const SymmetricTridiagonal& t, double x) {
    const double floor = detail::pivot_floor(t);
    std::size_t count = 0;
    double q = t.diagonal[0] - x;
    for (std::size_t i = 0;; ++i) {
        if (std::abs(q) < floor) q = -floor;
        if (q < 0.0) ++count;
        if (i + 1 == t.size()) break;
        const double e = t.offdiagonal[i];
        q = (t.diagonal[i + 1] - x) - e * e / q;
    }
    return count;
}

/// k-th smallest eigenvalue (k = 0 is the lowest), bisected to the limit of
/// double precision.
inline double bisect_eigenvalue(const SymmetricTridiagonal& t, std::size_t k) {
    if (k >= t.size()) throw std::out_of_range("bisect_eigenvalue: index beyond matrix size");
    auto [lo, hi] = detail::gershgorin_bounds(t);
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// Gaussian elimination with partial pivoting for (T - shift I), same layout
// as LAPACK dgttrf: U has two superdiagonals.
struct TridiagonalLU {
    std::vector<double> lower, diag, upper1, upper2;
    std::vector<bool> swapped;

    TridiagonalLU(const SymmetricTridiagonal& t, double shift, double tiny) {
        const std::size_t n = t.size();
        lower = t.offdiagonal;
        upper1 = t.offdiagonal;
        diag.resize(n);
        for (std::size_t i = 0; i < n; ++i) diag[i] = t.diagonal[i] - shift;
        upper2.assign(n > 2 ? n - 2 : 0, 0.0);
        swapped.assign(n > 1 ? n - 1 : 0, false);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(diag[i]) >= std::abs(lower[i])) {
                if (diag[i] == 0.0) diag[i] = tiny;
                const double fact = lower[i] / diag[i];
                lower[i] = fact;
                diag[i + 1] -= fact * upper1[i];
            } else {
                const double fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                const double temp = upper1[i];
                upper1[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if (i + 2 < n) {
                    upper2[i] = upper1[i + 1];
                    upper1[i + 1] = -fact * upper1[i + 1];
                }
                swapped[i] = true;
            }
        }
        if (diag[n - 1] == 0.0) diag[n - 1] = tiny;
    }

    void solve_in_place(std::vector<double>& b) const {
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b[i + 1] -= lower[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - lower[i] * b[i];
            }
        }
        b[n - 1] /= diag[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - upper1[n - 2] * b[n - 1]) / diag[n - 2];
        for (std::size_t i = n - 2; i-- > 0;) {
            b[i] = (b[i] - upper1[i] * b[i + 1] - upper2[i] * b[i + 2]) / diag[i];
        }
    }
};

inline double norm2(const std::vector<double>& v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x / scale) * (x / scale);
    return scale * std::sqrt(s);
}

}  // namespace detail

/// Eigenvector for an (accurate) eigenvalue by inverse iteration. Vectors in
/// `previous` are projected out, which keeps near-degenerate pairs orthogonal.
inline std::vector<double> inverse_iteration(const SymmetricTridiagonal& t, double eigenvalue,
                                             const std::vector<std::vector<double>>& previous = {}) {
    const std::size_t n = t.size();
    if (n == 1) return {1.0};

    double scale = 0.0;
    for (double d : t.diagonal) scale = std::max(scale, std::abs(d));
    for (double e : t.offdiagonal) scale = std::max(scale, std::abs(e));
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);

    const detail::TridiagonalLU lu(t, eigenvalue, tiny);

    // Deterministic start vector with no special symmetry.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);

    auto orthogonalize = [&previous](std::vector<double>& v) {
        for (const auto& p : previous) {
            const double dot = std::inner_product(v.begin(), v.end(), p.begin(), 0.0);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * p[i];
        }
    };

    for (int iter = 0; iter < 4; ++iter) {
        orthogonalize(x);
        lu.solve_in_place(x);
        orthogonalize(x);
        const double nrm = detail::norm2(x);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::runtime_error("inverse_iteration: breakdown");
        for (double& v : x) v /= nrm;
    }

    const auto largest = std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*largest < 0.0) {
        for (double& v : x) v = -v;
    }
    return x;
}

/// The `count` lowest eigenpairs.
inline TridiagonalEigenpairs lowest_eigenpairs(const SymmetricTridiagonal& t, std::size_t count, bool with_vectors = true) {
    if (t.size() == 0) throw std::invalid_argument("lowest_eigenpairs: empty matrix");
    if (t.offdiagonal.size() + 1 != t.size()) throw std::invalid_argument("lowest_eigenpairs: offdiagonal length must be n-1");
    if (count > t.size()) throw std::invalid_argument("lowest_eigenpairs: more eigenpairs requested than matrix size");
    TridiagonalEigenpairs out;
    out.values.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.values.push_back(bisect_eigenvalue(t, k));
    if (with_vectors) {
        out.vectors.reserve(count);
        for (std::size_t k = 0; k < count; ++k) out.vectors.push_back(inverse_iteration(t, out.values[k], out.vectors));
    }
    return out;
}

}  // namespace abphase
