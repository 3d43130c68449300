#pragma once

// Dense Hermitian linear algebra: eigendecomposition, operator norm, spectral
// projectors and the sign decomposition V = V+ - V- of a perturbation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "subpert/error.hpp"

namespace subpert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using IndexSet = std::vector<std::size_t>;

/// Dense square complex Hermitian matrix.
///
/// Construction validates conjugate symmetry to 1e-12 * (1 + max|entry|)
/// and stores the exactly symmetrized matrix, so every HermitianMatrix in
/// circulation is Hermitian to the last bit.
class HermitianMatrix {
public:
    explicit HermitianMatrix(ComplexMatrix entries) {
        if (entries.rows() != entries.cols()) {
            throw Error(ErrorCode::NonHermitianInput,
                        "matrix is " + std::to_string(entries.rows()) + "x" +
                            std::to_string(entries.cols()) + ", expected square");
        }
        if (entries.rows() < 1) {
            throw Error(ErrorCode::NonHermitianInput, "matrix dimension must be at least 1");
        }
        if (!entries.allFinite()) {
            throw Error(ErrorCode::NonHermitianInput, "matrix has non-finite entries");
        }
        const double tol = symmetry_tolerance(entries);
        const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
        if (asym > tol) {
            throw Error(ErrorCode::NonHermitianInput,
                        "conjugate asymmetry " + std::to_string(asym) + " exceeds tolerance " +
                            std::to_string(tol));
        }
        entries_ = 0.5 * (entries + entries.adjoint());
    }

    static HermitianMatrix from_real(const Eigen::MatrixXd& real) {
        return HermitianMatrix(real.cast<Complex>());
    }

    static HermitianMatrix zero(std::size_t n) {
        const auto m = static_cast<Eigen::Index>(n);
        return HermitianMatrix(ComplexMatrix::Zero(m, m));
    }

    static HermitianMatrix diagonal(const std::vector<double>& values) {
        const auto m = static_cast<Eigen::Index>(values.size());
        ComplexMatrix out = ComplexMatrix::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) out(i, i) = values[static_cast<std::size_t>(i)];
        return HermitianMatrix(std::move(out));
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const ComplexMatrix& matrix() const noexcept { return entries_; }
    Complex operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    double max_abs() const { return entries_.cwiseAbs().maxCoeff(); }

    HermitianMatrix scaled(double t) const { return HermitianMatrix(Trusted{}, t * entries_); }

    friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
        check_same_dim(a, b);
        return HermitianMatrix(Trusted{}, a.entries_ + b.entries_);
    }
    friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
        check_same_dim(a, b);
        return HermitianMatrix(Trusted{}, a.entries_ - b.entries_);
    }
    friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
        return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
    }

    static double symmetry_tolerance(const ComplexMatrix& m) {
        return 1e-12 * (1.0 + (m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff()));
    }

private:
    struct Trusted {};
    // Sums and real multiples of Hermitian matrices stay Hermitian up to
    // rounding; re-symmetrize instead of re-validating.
    HermitianMatrix(Trusted, ComplexMatrix entries)
        : entries_(0.5 * (entries + entries.adjoint())) {}

    static void check_same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
        if (a.dim() != b.dim()) {
            throw Error(ErrorCode::DimensionMismatch,
                        std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
        }
    }

    ComplexMatrix entries_;
};

/// Eigenvalues ascending; column k of `eigenvectors` belongs to eigenvalue k.
struct SpectralDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    double eigenvalue(std::size_t k) const { return eigenvalues(static_cast<Eigen::Index>(k)); }
    double norm() const {
        return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
    }
};

struct Projector {
    ComplexMatrix matrix;
    std::size_t rank = 0;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

struct PerturbationSplit {
    HermitianMatrix v;
    HermitianMatrix v_plus;
    HermitianMatrix v_minus;
    double norm_plus = 0.0;
    double norm_minus = 0.0;
    double norm_v = 0.0;

    double norm_sum() const noexcept { return norm_plus + norm_minus; }
};

/// Self-adjoint eigensolver (Householder tridiagonalization + implicit QL).
inline SpectralDecomposition eigh(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure,
                    "eigensolver exceeded its iteration cap for n = " + std::to_string(h.dim()));
    }
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

inline double operator_norm(const HermitianMatrix& h) { return eigh(h).norm(); }

/// Spectral norm of an arbitrary square matrix (largest singular value).
inline double spectral_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

inline Projector spectral_projector(const SpectralDecomposition& d, const IndexSet& indices) {
    const auto n = static_cast<Eigen::Index>(d.dim());
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    std::vector<bool> seen(d.dim(), false);
    std::size_t rank = 0;
    for (const std::size_t k : indices) {
        if (k >= d.dim()) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "index " + std::to_string(k) + " for dimension " + std::to_string(d.dim()));
        }
        if (seen[k]) continue;
        seen[k] = true;
        const auto u = d.eigenvectors.col(static_cast<Eigen::Index>(k));
        p.noalias() += u * u.adjoint();
        ++rank;
    }
    return Projector{0.5 * (p + p.adjoint()), rank};
}

/// Splits V into nonnegative parts with V = V+ - V-. Eigenvalues within
/// 1e-12 * (1 + |V|) of zero belong to neither part.
inline PerturbationSplit sign_split(const HermitianMatrix& v) {
    const SpectralDecomposition d = eigh(v);
    const double norm_v = d.norm();
    const double zero_tol = 1e-12 * (1.0 + norm_v);
    const auto n = static_cast<Eigen::Index>(v.dim());

    ComplexMatrix plus = ComplexMatrix::Zero(n, n);
    ComplexMatrix minus = ComplexMatrix::Zero(n, n);
    double norm_plus = 0.0;
    double norm_minus = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lambda = d.eigenvalues(k);
        const auto u = d.eigenvectors.col(k);
        if (lambda > zero_tol) {
            plus.noalias() += lambda * (u * u.adjoint());
            norm_plus = std::max(norm_plus, lambda);
        } else if (lambda < -zero_tol) {
            minus.noalias() += (-lambda) * (u * u.adjoint());
            norm_minus = std::max(norm_minus, -lambda);
        }
    }
    return PerturbationSplit{v, HermitianMatrix(0.5 * (plus + plus.adjoint())),
                             HermitianMatrix(0.5 * (minus + minus.adjoint())), norm_plus,
                             norm_minus, norm_v};
}

} // namespace subpert
