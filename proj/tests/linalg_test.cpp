#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "subpert/harness.hpp"
#include "subpert/linalg.hpp"
#include "test_support.hpp"

namespace subpert {
namespace {

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

TEST(HermitianMatrix, RejectsAsymmetricInput) {
    ComplexMatrix m(2, 2);
    m << 1.0, 2.0, 2.5, 1.0;
    try {
        HermitianMatrix h(m);
        FAIL() << "expected NonHermitianInput";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonHermitianInput);
    }
}

TEST(HermitianMatrix, RejectsImaginaryDiagonalAndNonSquare) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(1, 1) = Complex(1.0, 1e-6);
    EXPECT_THROW(HermitianMatrix{m}, Error);
    EXPECT_THROW(HermitianMatrix{ComplexMatrix::Zero(2, 3)}, Error);
    EXPECT_THROW(HermitianMatrix{ComplexMatrix::Zero(0, 0)}, Error);
}

TEST(HermitianMatrix, AcceptsAsymmetryWithinTolerance) {
    ComplexMatrix m(2, 2);
    m << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0 + 1e-13), 1.0;
    const HermitianMatrix h(m);
    EXPECT_EQ(h.matrix(), h.matrix().adjoint());
}

TEST(Eigh, DiagonalCase) {
    const SpectralDecomposition d = eigh(HermitianMatrix::diagonal({-0.5, 0.5}));
    EXPECT_DOUBLE_EQ(d.eigenvalue(0), -0.5);
    EXPECT_DOUBLE_EQ(d.eigenvalue(1), 0.5);
    EXPECT_NEAR(std::abs(d.eigenvectors(0, 0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(d.eigenvectors(1, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(d.eigenvectors(0, 1)), 0.0, 1e-15);
}

TEST(Eigh, SwapMatrix) {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 1, 0;
    const SpectralDecomposition d = eigh(HermitianMatrix::from_real(m));
    EXPECT_NEAR(d.eigenvalue(0), -1.0, 1e-15);
    EXPECT_NEAR(d.eigenvalue(1), 1.0, 1e-15);
}

TEST(Eigh, SharpExamplePerturbedSpectrum) {
    // v+ = v- = 1/4: spec(A + V) = {(v+ - v- +- sqrt(1 - v^2)) / 2} = {+-sqrt(3)/4}.
    const SharpExample ex = sharp_example_2x2(0.25, 0.25);
    const SpectralDecomposition d = eigh(ex.instance.a + ex.instance.v);
    EXPECT_NEAR(d.eigenvalue(0), -std::sqrt(3.0) / 4.0, 1e-15);
    EXPECT_NEAR(d.eigenvalue(1), std::sqrt(3.0) / 4.0, 1e-15);
}

TEST(Eigh, ContractHoldsAgainstJacobiOracle) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const HermitianMatrix h = testing::random_hermitian(n, rng);
        const SpectralDecomposition d = eigh(h);
        const auto m = static_cast<Eigen::Index>(n);
        const double hnorm = d.norm();

        EXPECT_LE(max_abs(d.eigenvectors.adjoint() * d.eigenvectors - ComplexMatrix::Identity(m, m)), 1e-10);
        for (Eigen::Index k = 0; k < m; ++k) {
            if (k > 0) {
                EXPECT_LE(d.eigenvalues(k - 1), d.eigenvalues(k));
            }
            const double residual =
                (h.matrix() * d.eigenvectors.col(k) - d.eigenvalues(k) * d.eigenvectors.col(k)).norm();
            EXPECT_LE(residual, 1e-10 * (1.0 + hnorm));
        }
        const std::vector<double> ref = testing::jacobi_eigenvalues(h);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(d.eigenvalue(k), ref[k], 1e-11 * (1.0 + hnorm));
        }
    }
}

TEST(Eigh, DeterministicForFixedInput) {
    std::mt19937_64 rng(11);
    const HermitianMatrix h = testing::random_hermitian(9, rng);
    const SpectralDecomposition a = eigh(h);
    const SpectralDecomposition b = eigh(h);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(OperatorNorm, Examples) {
    EXPECT_EQ(operator_norm(HermitianMatrix::zero(3)), 0.0);
    EXPECT_DOUBLE_EQ(operator_norm(HermitianMatrix::diagonal({-3.0, 2.0})), 3.0);
    const SharpExample ex = sharp_example_2x2(0.3, 0.2);
    EXPECT_NEAR(operator_norm(ex.instance.v), 0.3, 1e-15);
}

TEST(OperatorNorm, MatchesSpectralNorm) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const HermitianMatrix h = testing::random_hermitian(1 + rng() % 10, rng);
        EXPECT_NEAR(operator_norm(h), spectral_norm(h.matrix()), 1e-12 * (1.0 + h.max_abs()));
    }
}

TEST(SignSplit, SemidefiniteHasNoNegativePart) {
    std::mt19937_64 rng(5);
    const ComplexMatrix z = testing::random_complex(5, rng);
    const PerturbationSplit s = sign_split(HermitianMatrix(z * z.adjoint()));
    EXPECT_EQ(s.norm_minus, 0.0);
    EXPECT_EQ(max_abs(s.v_minus.matrix()), 0.0);
    EXPECT_NEAR(s.norm_plus, s.norm_v, 1e-12 * s.norm_v);
}

TEST(SignSplit, DiagonalCase) {
    const PerturbationSplit s = sign_split(HermitianMatrix::diagonal({2.0, -1.0}));
    EXPECT_DOUBLE_EQ(s.norm_plus, 2.0);
    EXPECT_DOUBLE_EQ(s.norm_minus, 1.0);
    EXPECT_LE(max_abs(s.v_plus.matrix() - HermitianMatrix::diagonal({2.0, 0.0}).matrix()), 1e-15);
    EXPECT_LE(max_abs(s.v_minus.matrix() - HermitianMatrix::diagonal({0.0, 1.0}).matrix()), 1e-15);
}

TEST(SignSplit, SharpExampleNorms) {
    const PerturbationSplit s = sign_split(sharp_example_2x2(0.3, 0.2).instance.v);
    EXPECT_NEAR(s.norm_plus, 0.3, 1e-15);
    EXPECT_NEAR(s.norm_minus, 0.2, 1e-15);
}

TEST(SignSplit, ZeroEigenvaluesBelongToNeitherPart) {
    const PerturbationSplit s = sign_split(HermitianMatrix::diagonal({0.0, 1e-14, -3.0, 0.0}));
    EXPECT_EQ(s.norm_plus, 0.0);
    EXPECT_DOUBLE_EQ(s.norm_minus, 3.0);
    EXPECT_EQ(max_abs(s.v_plus.matrix()), 0.0);
    const PerturbationSplit z = sign_split(HermitianMatrix::zero(3));
    EXPECT_EQ(z.norm_plus + z.norm_minus + z.norm_v, 0.0);
}

TEST(SignSplit, InvariantsOnRandomMatrices) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const HermitianMatrix v = testing::random_hermitian(n, rng);
        const PerturbationSplit s = sign_split(v);
        const double nv = s.norm_v;
        ASSERT_LE(max_abs(s.v_plus.matrix() - s.v_minus.matrix() - v.matrix()), 1e-10 * (1.0 + nv));
        ASSERT_GE(eigh(s.v_plus).eigenvalues.minCoeff(), -1e-10 * (1.0 + nv));
        ASSERT_GE(eigh(s.v_minus).eigenvalues.minCoeff(), -1e-10 * (1.0 + nv));
        ASSERT_LE(max_abs(s.v_plus.matrix() * s.v_minus.matrix()), 1e-10 * (1.0 + nv * nv));
        ASSERT_LE(std::max(s.norm_plus, s.norm_minus), nv + 1e-12);
        ASSERT_NEAR(operator_norm(s.v_plus), s.norm_plus, 1e-10 * (1.0 + nv));
        ASSERT_NEAR(operator_norm(s.v_minus), s.norm_minus, 1e-10 * (1.0 + nv));
    }
}

TEST(SpectralProjector, Examples) {
    const SpectralDecomposition d = eigh(HermitianMatrix::diagonal({0.5, -0.5}));
    const Projector none = spectral_projector(d, {});
    EXPECT_EQ(none.rank, 0u);
    EXPECT_EQ(max_abs(none.matrix), 0.0);
    const Projector all = spectral_projector(d, {0, 1});
    EXPECT_EQ(all.rank, 2u);
    EXPECT_LE(max_abs(all.matrix - ComplexMatrix::Identity(2, 2)), 1e-15);
    // sigma = {1/2} is the larger eigenvalue, index 1 after sorting.
    const Projector top = spectral_projector(d, {1});
    EXPECT_LE(max_abs(top.matrix - HermitianMatrix::diagonal({1.0, 0.0}).matrix()), 1e-15);
}

TEST(SpectralProjector, IndexOutOfRange) {
    const SpectralDecomposition d = eigh(HermitianMatrix::zero(2));
    try {
        spectral_projector(d, {2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
    }
}

TEST(SpectralProjector, RandomPropertyChecks) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 11;
        const SpectralDecomposition d = eigh(testing::random_hermitian(n, rng));
        IndexSet in;
        IndexSet out;
        for (std::size_t k = 0; k < n; ++k) (rng() % 2 ? in : out).push_back(k);
        const Projector p = spectral_projector(d, in);
        const Projector q = spectral_projector(d, out);
        const auto m = static_cast<Eigen::Index>(n);
        ASSERT_LE(max_abs(p.matrix * p.matrix - p.matrix), 1e-10);
        ASSERT_LE(max_abs(p.matrix - p.matrix.adjoint()), 1e-15);
        ASSERT_NEAR(p.matrix.trace().real(), static_cast<double>(p.rank), 1e-8);
        ASSERT_LE(max_abs(p.matrix + q.matrix - ComplexMatrix::Identity(m, m)), 1e-10);

        // Difference of two unrelated orthogonal projections has norm <= 1.
        const SpectralDecomposition e = eigh(testing::random_hermitian(n, rng));
        IndexSet other;
        for (std::size_t k = 0; k < n; ++k)
            if (rng() % 2) other.push_back(k);
        const Projector r = spectral_projector(e, other);
        ASSERT_LE(operator_norm(HermitianMatrix(p.matrix - r.matrix)), 1.0 + 1e-10);
    }
}

TEST(SpectralProjector, IndependentOfBasisInDegenerateEigenspaces) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        // A = U diag(1, 1, 1, 2, 2, 5) U*; rotating U inside each eigenspace
        // leaves A unchanged but changes the solver's eigenvector basis.
        const std::vector<double> lambda{1, 1, 1, 2, 2, 5};
        const ComplexMatrix u = testing::gram_schmidt_unitary(6, rng);
        ComplexMatrix w = ComplexMatrix::Identity(6, 6);
        w.block(0, 0, 3, 3) = testing::gram_schmidt_unitary(3, rng);
        w.block(3, 3, 2, 2) = testing::gram_schmidt_unitary(2, rng);
        RealVector diag = Eigen::Map<const RealVector>(lambda.data(), 6);
        const HermitianMatrix a1(u * diag.asDiagonal() * u.adjoint());
        const ComplexMatrix uw = u * w;
        const HermitianMatrix a2(uw * diag.asDiagonal() * uw.adjoint());

        const SpectralDecomposition d1 = eigh(a1);
        const SpectralDecomposition d2 = eigh(a2);
        for (const IndexSet& idx : {IndexSet{0, 1, 2}, IndexSet{3, 4}, IndexSet{0, 1, 2, 3, 4}}) {
            ASSERT_LE(max_abs(spectral_projector(d1, idx).matrix - spectral_projector(d2, idx).matrix), 1e-10);
        }
    }
}

} // namespace
} // namespace subpert
