#pragma once

/**
 * @file o21.hpp
 * @brief Truncated matrices of the o(2,1) lowest-weight discrete series.
 *
 * Basis |n>, n = 0..N-1, with
 *
 *     J3 |n>            = (E0 + n) |n>
 *     <n+1| K+ |n>      = sqrt((n+1)(n+2 E0)),    K+- = K1 +- i K2
 *
 * which realizes [J3,K1] = iK2, [J3,K2] = -iK1, [K1,K2] = -iJ3 and the
 * Casimir J3^2 - K1^2 - K2^2 = E0 (E0 - 1). Ladder phases are real positive.
 *
 * K+ maps |N-1> out of the truncated space, so every algebraic identity is
 * checked on the interior block n = 0..N-2 only.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace abphase::o21 {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Immutable truncated generator set. K2 = i * A with A real antisymmetric;
/// only the ladder magnitudes are stored.
class GeneratorTriple {
public:
    GeneratorTriple(double e0, std::size_t dimension) : e0_(e0) {
        if (!(e0 >= 0.5)) throw std::invalid_argument("GeneratorTriple: e0 must be >= 1/2 (unitarity/positivity)");
        if (dimension < 2) throw std::invalid_argument("GeneratorTriple: dimension must be >= 2");
        j3_.resize(dimension);
        ladder_.resize(dimension - 1);
        for (std::size_t n = 0; n < dimension; ++n) j3_[n] = e0 + static_cast<double>(n);
        for (std::size_t n = 0; n + 1 < dimension; ++n) {
            const double nn = static_cast<double>(n);
            ladder_[n] = std::sqrt((nn + 1.0) * (nn + 2.0 * e0));
        }
    }

    std::size_t dimension() const noexcept { return j3_.size(); }
    double e0() const noexcept { return e0_; }

    /// Diagonal of J3.
    const std::vector<double>& j3_diagonal() const noexcept { return j3_; }

    /// <n+1|K+|n> for n = 0..N-2.
    const std::vector<double>& raising_elements() const noexcept { return ladder_; }

    RealMatrix j3() const {
        RealMatrix m = RealMatrix::Zero(dim(), dim());
        for (Eigen::Index n = 0; n < dim(); ++n) m(n, n) = j3_[static_cast<std::size_t>(n)];
        return m;
    }

    RealMatrix raising() const {
        RealMatrix m = RealMatrix::Zero(dim(), dim());
        for (Eigen::Index n = 0; n + 1 < dim(); ++n) m(n + 1, n) = ladder_[static_cast<std::size_t>(n)];
        return m;
    }

    RealMatrix lowering() const { return raising().transpose(); }

    /// K1 = (K+ + K-) / 2.
    RealMatrix k1() const {
        RealMatrix m = RealMatrix::Zero(dim(), dim());
        for (Eigen::Index n = 0; n + 1 < dim(); ++n) {
            const double v = 0.5 * ladder_[static_cast<std::size_t>(n)];
            m(n + 1, n) = v;
            m(n, n + 1) = v;
        }
        return m;
    }

    /// A with K2 = i A; A is real antisymmetric.
    RealMatrix k2_imaginary_part() const {
        RealMatrix m = RealMatrix::Zero(dim(), dim());
        for (Eigen::Index n = 0; n + 1 < dim(); ++n) {
            const double v = 0.5 * ladder_[static_cast<std::size_t>(n)];
            m(n + 1, n) = -v;
            m(n, n + 1) = v;
        }
        return m;
    }

    ComplexMatrix k2() const { return std::complex<double>(0.0, 1.0) * k2_imaginary_part().cast<std::complex<double>>(); }

private:
    Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(j3_.size()); }

    double e0_;
    std::vector<double> j3_;
    std::vector<double> ladder_;
};

struct AlgebraResidualReport {
    double commutator_j3k1;   ///< max |[J3,K1] - iK2|
    double commutator_j3k2;   ///< max |[J3,K2] + iK1|
    double commutator_k1k2;   ///< max |[K1,K2] + iJ3|
    double casimir_deviation; ///< max |J3^2 - K1^2 - K2^2 - E0(E0-1)|
    std::size_t interior_size;

    double max_residual() const {
        return std::max({commutator_j3k1, commutator_j3k2, commutator_k1k2, casimir_deviation});
    }
};

inline GeneratorTriple build_discrete_series(double e0, std::size_t dimension) {
    return GeneratorTriple(e0, dimension);
}

/// Full Casimir defect J3^2 - K1^2 - K2^2 - E0(E0-1) I, including the
/// corrupted last basis state.
inline ComplexMatrix casimir_defect(const GeneratorTriple& triple) {
    const ComplexMatrix j3 = triple.j3().cast<std::complex<double>>();
    const ComplexMatrix k1 = triple.k1().cast<std::complex<double>>();
    const ComplexMatrix k2 = triple.k2();
    const auto n = static_cast<Eigen::Index>(triple.dimension());
    const double c = triple.e0() * (triple.e0() - 1.0);
    return j3 * j3 - k1 * k1 - k2 * k2 - c * ComplexMatrix::Identity(n, n);
}

inline AlgebraResidualReport algebra_residuals(const GeneratorTriple& triple) {
    using cd = std::complex<double>;
    const cd i(0.0, 1.0);
    const ComplexMatrix j3 = triple.j3().cast<cd>();
    const ComplexMatrix k1 = triple.k1().cast<cd>();
    const ComplexMatrix k2 = triple.k2();

    const auto inner = static_cast<Eigen::Index>(triple.dimension()) - 1;
    auto interior_max = [inner](const ComplexMatrix& m) {
        return m.topLeftCorner(inner, inner).cwiseAbs().maxCoeff();
    };

    AlgebraResidualReport report{};
    report.commutator_j3k1 = interior_max(j3 * k1 - k1 * j3 - i * k2);
    report.commutator_j3k2 = interior_max(j3 * k2 - k2 * j3 + i * k1);
    report.commutator_k1k2 = interior_max(k1 * k2 - k2 * k1 + i * j3);
    report.casimir_deviation = interior_max(casimir_defect(triple));
    report.interior_size = static_cast<std::size_t>(inner);
    return report;
}

struct Admissibility {
    bool admissible;
    std::string reason;
    explicit operator bool() const noexcept { return admissible; }
};

/// D+(Phi) with E0 = -Phi: requires Im(E0) = 0 (unitarity) and Phi < 0
/// (positive J3 spectrum).
inline Admissibility admissibility_check(std::complex<double> e0) {
    if (e0.imag() != 0.0) return {false, "unitarity violated: Im(E0) != 0"};
    if (!std::isfinite(e0.real())) return {false, "E0 is not finite"};
    const double phi = -e0.real();
    if (!(phi < 0.0)) return {false, "positivity of the J3 spectrum violated: Phi = -E0 >= 0"};
    return {true, "admissible D+ representation"};
}

inline Admissibility admissibility_check(double e0) { return admissibility_check(std::complex<double>(e0, 0.0)); }

}  // namespace abphase::o21
