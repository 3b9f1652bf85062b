#include "ergokit/entanglement.hpp"

#include <cmath>

namespace ergokit {

namespace {

int sites_of_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index(1) << n) < dim) ++n;
    if ((Eigen::Index(1) << n) != dim)
        throw DimensionMismatch("entanglement: dimension is not 2^N");
    return n;
}

ComplexMatrix rdm_from_amplitudes(const ComplexVector& amps, int n_sites, int cut) {
    if (cut < 1 || cut >= n_sites)
        throw CutOutOfRange("reduced_density_matrix: cut must satisfy 1 <= cut <= N-1");
    const Eigen::Index rows = Eigen::Index(1) << cut;          // left block
    const Eigen::Index cols = Eigen::Index(1) << (n_sites - cut);
    // index = a * 2^(N-cut) + b with a the left-block index: a row-major view.
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        m(amps.data(), rows, cols);
    return m * m.adjoint();
}

}  // namespace

StateVector named_state(StateKind kind, int n_sites) {
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    StateVector psi;
    psi.n_sites = n_sites;
    psi.amplitudes = ComplexVector::Zero(dim);
    Eigen::Index index = 0;
    switch (kind) {
        case StateKind::AllUp: index = 0; break;
        case StateKind::AllDown: index = dim - 1; break;
        case StateKind::Neel:
            // up at odd sites: down-bits at sites 2,4,...
            for (int site = 2; site <= n_sites; site += 2)
                index |= Eigen::Index(1) << (n_sites - site);
            break;
    }
    psi.amplitudes(index) = 1.0;
    return psi;
}

ComplexMatrix reduced_density_matrix(const StateVector& psi, int cut) {
    return rdm_from_amplitudes(psi.amplitudes, psi.n_sites, cut);
}

double von_neumann_entropy(const ComplexMatrix& rho) {
    if (!is_hermitian(rho, 1e-10)) throw NotDensityMatrix("von_neumann_entropy: not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-9 || std::abs(rho.trace().imag()) > 1e-12)
        throw NotDensityMatrix("von_neumann_entropy: trace is not 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        const double p = solver.eigenvalues()(k);
        if (p < -1e-10) throw NotDensityMatrix("von_neumann_entropy: negative eigenvalue");
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

EntanglementScan eigenstate_entanglement_scan(const Spectrum& spec, int cut) {
    const int n = sites_of_dim(spec.dim());
    EntanglementScan scan;
    scan.cut = cut;
    scan.energies.resize(spec.dim());
    scan.entropies.resize(spec.dim());
#pragma omp parallel for schedule(static)
    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        const ComplexVector amps = spec.eigenvectors.col(k).cast<Complex>();
        scan.energies[k] = spec.eigenvalues(k);
        scan.entropies[k] = von_neumann_entropy(rdm_from_amplitudes(amps, n, cut));
    }
    return scan;
}

TimeSeries quench_entropy_series(const StateVector& psi0, const Spectrum& spec, int cut,
                                 const std::vector<double>& t_grid) {
    if (psi0.amplitudes.size() != spec.dim())
        throw DimensionMismatch("quench_entropy_series: state/spectrum dimension mismatch");
    if (std::abs(psi0.amplitudes.squaredNorm() - 1.0) > 1e-12)
        throw NotNormalized("quench_entropy_series: initial state is not normalized");

    const ComplexVector coeffs = spec.eigenvectors.transpose().cast<Complex>() * psi0.amplitudes;
    TimeSeries out;
    out.quantity = "entanglement_entropy";
    out.times = t_grid;
    out.values.resize(t_grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(t_grid.size()); ++k) {
        ComplexVector phased(coeffs.size());
        for (Eigen::Index a = 0; a < coeffs.size(); ++a) {
            const double angle = -spec.eigenvalues(a) * t_grid[k];
            phased(a) = coeffs(a) * Complex(std::cos(angle), std::sin(angle));
        }
        const ComplexVector amps = spec.eigenvectors.cast<Complex>() * phased;
        out.values[k] = von_neumann_entropy(rdm_from_amplitudes(amps, psi0.n_sites, cut));
    }
    return out;
}

}  // namespace ergokit
