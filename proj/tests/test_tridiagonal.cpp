#include "abphase/tridiagonal.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace abphase;

namespace {

SymmetricTridiagonal random_tridiagonal(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    SymmetricTridiagonal t;
    t.diagonal.resize(n);
    t.offdiagonal.resize(n - 1);
    for (auto& v : t.diagonal) v = d(rng);
    for (auto& v : t.offdiagonal) v = d(rng);
    return t;
}

Eigen::MatrixXd dense(const SymmetricTridiagonal& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = t.diagonal[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = t.offdiagonal[i];
    return a;
}

}  // namespace

TEST(Tridiagonal, MatchesDenseSolver) {
    std::mt19937_64 rng(7);
    for (std::size_t n : {1u, 2u, 3u, 10u, 57u, 200u}) {
        const auto t = random_tridiagonal(rng, n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(dense(t));
        const auto pairs = lowest_eigenpairs(t, n);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(pairs.values[k], oracle.eigenvalues()(k), 1e-12 * 10.0) << n << " " << k;
            const Eigen::Map<const Eigen::VectorXd> v(pairs.vectors[k].data(), static_cast<Eigen::Index>(n));
            const double overlap = std::abs(v.dot(oracle.eigenvectors().col(static_cast<Eigen::Index>(k))));
            EXPECT_NEAR(overlap, 1.0, 1e-9) << n << " " << k;
        }
    }
}

TEST(Tridiagonal, SturmCount) {
    SymmetricTridiagonal t{{2.0, 2.0, 2.0}, {-1.0, -1.0}};
    // eigenvalues 2 - sqrt2, 2, 2 + sqrt2
    EXPECT_EQ(sturm_count(t, 0.0), 0u);
    EXPECT_EQ(sturm_count(t, 1.0), 1u);
    EXPECT_EQ(sturm_count(t, 2.5), 2u);
    EXPECT_EQ(sturm_count(t, 4.0), 3u);
    EXPECT_NEAR(bisect_eigenvalue(t, 0), 2.0 - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(bisect_eigenvalue(t, 1), 2.0, 1e-15);
    EXPECT_NEAR(bisect_eigenvalue(t, 2), 2.0 + std::sqrt(2.0), 1e-15);
}

TEST(Tridiagonal, OrthonormalVectorsWithClusteredSpectrum) {
    // Wilkinson W21+ has pairs agreeing to many digits.
    SymmetricTridiagonal t;
    for (int i = -10; i <= 10; ++i) t.diagonal.push_back(std::abs(i));
    t.offdiagonal.assign(20, 1.0);
    const auto pairs = lowest_eigenpairs(t, 21);
    for (std::size_t a = 0; a < 21; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const double dot = std::inner_product(pairs.vectors[a].begin(), pairs.vectors[a].end(), pairs.vectors[b].begin(), 0.0);
            EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-10) << a << " " << b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(dense(t));
    for (std::size_t k = 0; k < 21; ++k) EXPECT_NEAR(pairs.values[k], oracle.eigenvalues()(k), 1e-12);
}

TEST(Tridiagonal, Residual) {
    std::mt19937_64 rng(11);
    const auto t = random_tridiagonal(rng, 500);
    const auto pairs = lowest_eigenpairs(t, 5);
    const Eigen::MatrixXd a = dense(t);
    for (std::size_t k = 0; k < 5; ++k) {
        const Eigen::Map<const Eigen::VectorXd> v(pairs.vectors[k].data(), 500);
        EXPECT_LE((a * v - pairs.values[k] * v).norm(), 1e-11);
    }
}

TEST(Tridiagonal, RejectsBadShapes) {
    EXPECT_THROW(lowest_eigenpairs({{}, {}}, 0), std::invalid_argument);
    EXPECT_THROW(lowest_eigenpairs({{1.0, 2.0}, {}}, 1), std::invalid_argument);
    EXPECT_THROW(lowest_eigenpairs({{1.0, 2.0}, {0.5}}, 3), std::invalid_argument);
    EXPECT_THROW(bisect_eigenvalue({{1.0}, {}}, 1), std::out_of_range);
}
