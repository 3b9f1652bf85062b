#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ergokit/errors.hpp"

namespace ergokit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Seedable 64-bit generator; every stochastic operation takes one explicitly.
using Rng = std::mt19937_64;

/// Eigen-decomposition of a real-symmetric matrix. Eigenvalues ascending,
/// eigenvector k in column k. Vectors are real because the Hamiltonians of
/// this model are real in the computational basis.
struct Spectrum {
    RealVector eigenvalues;
    RealMatrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
    std::vector<double> eigenvalue_list() const {
        return {eigenvalues.data(), eigenvalues.data() + eigenvalues.size()};
    }
};

/// Polynomial least-squares fit: coefficients lowest degree first,
/// residual is the rms misfit at the sample points.
struct FitResult {
    std::vector<double> coefficients;
    double residual = 0.0;

    double eval(double x) const {
        double acc = 0.0;
        for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * x + coefficients[k];
        return acc;
    }
};

// Pauli matrices and the 2x2 identity (eigenvalues +-1 convention).
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& identity2();

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

/// Full diagonalization of a real-symmetric matrix (values and vectors).
/// Throws NonSymmetric if the input fails the symmetry check, NoConvergence
/// if the tridiagonal iteration fails.
Spectrum eigh_symmetric(const RealMatrix& m);
Spectrum eigh_symmetric(const ComplexMatrix& m);

/// Eigenvalues only (ascending); much faster than the full decomposition.
RealVector eigvals_symmetric(const RealMatrix& m);

/// Lowest eigenpair of a real-symmetric matrix.
std::pair<double, RealVector> eigh_lowest(const RealMatrix& m);

FitResult polyfit(const std::vector<double>& xs, const std::vector<double>& ys, int degree);

/// Degree-1 fit of log10(ys) against log10(xs); coefficients[1] is the
/// power-law exponent. Throws NonPositiveInput.
FitResult loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// 2x2 unitary drawn from the Haar measure (QR of a complex Ginibre sample
/// with the phase convention fixed by a positive R diagonal).
ComplexMatrix haar_qubit_unitary(Rng& rng);
ComplexMatrix haar_qubit_unitary(std::uint64_t seed);

}  // namespace ergokit
