#include "ergokit/numerics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace ergokit {

const ComplexMatrix& pauli_x() {
    static const ComplexMatrix m = [] {
        ComplexMatrix s(2, 2);
        s << 0, 1, 1, 0;
        return s;
    }();
    return m;
}

const ComplexMatrix& pauli_y() {
    static const ComplexMatrix m = [] {
        ComplexMatrix s(2, 2);
        s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
        return s;
    }();
    return m;
}

const ComplexMatrix& pauli_z() {
    static const ComplexMatrix m = [] {
        ComplexMatrix s(2, 2);
        s << 1, 0, 0, -1;
        return s;
    }();
    return m;
}

const ComplexMatrix& identity2() {
    static const ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    return m;
}

template <typename Mat>
static Mat kron_impl(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) { return kron_impl(a, b); }
RealMatrix kron(const RealMatrix& a, const RealMatrix& b) { return kron_impl(a, b); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol * scale;
}

static void check_real_symmetric(const RealMatrix& m) {
    if (m.rows() != m.cols()) throw NonSymmetric("eigh_symmetric: matrix is not square");
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonSymmetric("eigh_symmetric: matrix is not symmetric");
}

Spectrum eigh_symmetric(const RealMatrix& m) {
    check_real_symmetric(m);
    const lapack_int n = static_cast<lapack_int>(m.rows());
    Spectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors = m;  // overwritten with the eigenvectors
    // Column-major storage, so LAPACK's columns are ours directly.
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.eigenvectors.data(), n,
                                     out.eigenvalues.data());
    if (info > 0) {
        // Divide-and-conquer failed; retry with the QL/QR iteration.
        out.eigenvectors = m;
        info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'L', n, out.eigenvectors.data(), n,
                             out.eigenvalues.data());
    }
    if (info != 0) throw NoConvergence("eigh_symmetric: LAPACK info=" + std::to_string(info));
    return out;
}

Spectrum eigh_symmetric(const ComplexMatrix& m) {
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    if (m.imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonSymmetric("eigh_symmetric: matrix has non-negligible imaginary parts");
    return eigh_symmetric(RealMatrix(m.real()));
}

RealVector eigvals_symmetric(const RealMatrix& m) {
    check_real_symmetric(m);
    const lapack_int n = static_cast<lapack_int>(m.rows());
    RealMatrix work = m;
    RealVector vals(n);
    lapack_int info =
        LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, vals.data());
    if (info != 0) throw NoConvergence("eigvals_symmetric: LAPACK info=" + std::to_string(info));
    return vals;
}

std::pair<double, RealVector> eigh_lowest(const RealMatrix& m) {
    check_real_symmetric(m);
    const lapack_int n = static_cast<lapack_int>(m.rows());
    RealMatrix work = m;
    RealVector vals(n);
    RealVector vec(n);
    std::vector<lapack_int> isuppz(2);
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0,
                                     0.0, 1, 1, 0.0, &found, vals.data(), vec.data(), n,
                                     isuppz.data());
    if (info != 0 || found < 1)
        throw NoConvergence("eigh_lowest: LAPACK info=" + std::to_string(info));
    return {vals[0], vec};
}

FitResult polyfit(const std::vector<double>& xs, const std::vector<double>& ys, int degree) {
    if (degree < 0) throw Error("polyfit: negative degree");
    const std::size_t n = xs.size();
    if (ys.size() != n || n < static_cast<std::size_t>(degree) + 1)
        throw Error("polyfit: need at least degree+1 samples");
    if (*std::max_element(xs.begin(), xs.end()) == *std::min_element(xs.begin(), xs.end()))
        throw Error("polyfit: abscissae are all equal");

    RealMatrix design(n, degree + 1);
    for (std::size_t r = 0; r < n; ++r) {
        double p = 1.0;
        for (int c = 0; c <= degree; ++c) {
            design(r, c) = p;
            p *= xs[r];
        }
    }
    Eigen::BDCSVD<RealMatrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    // Condition estimate of the normal system is cond(design)^2.
    if (smin <= 0.0 || (sv(0) / smin) * (sv(0) / smin) > 1e12)
        throw IllConditioned("polyfit: normal system is numerically singular; rescale inputs");

    RealVector rhs = Eigen::Map<const RealVector>(ys.data(), n);
    RealVector coef = svd.solve(rhs);
    FitResult out;
    out.coefficients.assign(coef.data(), coef.data() + coef.size());
    out.residual = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<double>(n));
    return out;
}

FitResult loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw Error("loglog_slope: need at least two samples");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0.0 || ys[i] <= 0.0)
            throw NonPositiveInput("loglog_slope: inputs must be strictly positive");
        lx[i] = std::log10(xs[i]);
        ly[i] = std::log10(ys[i]);
    }
    return polyfit(lx, ly, 1);
}

ComplexMatrix haar_qubit_unitary(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase freedom: make the R diagonal real positive.
    for (Eigen::Index k = 0; k < 2; ++k) {
        const Complex d = r(k, k);
        const double a = std::abs(d);
        if (a > 0.0) q.col(k) *= d / a;
    }
    return q;
}

ComplexMatrix haar_qubit_unitary(std::uint64_t seed) {
    Rng rng(seed);
    return haar_qubit_unitary(rng);
}

}  // namespace ergokit
