#include "ergokit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ergokit {

void ChainConfig::validate() const {
    if (n_sites < 3 || n_sites % 2 == 0)
        throw EvenSites("ChainConfig: n_sites must be odd and >= 3, got " +
                        std::to_string(n_sites));
    if (n_sites > 13)
        throw DimensionOverflow("ChainConfig: n_sites > 13 exceeds the dense envelope");
    if (j_ratio < 0.0) throw Error("ChainConfig: j_ratio must be >= 0");
}

RealVector sigma_z_diagonal(int n_sites, int site) {
    if (site < 1 || site > n_sites) throw SiteOutOfRange("sigma_z_diagonal: site out of range");
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    RealVector d(dim);
    const int shift = n_sites - site;
    for (Eigen::Index s = 0; s < dim; ++s) d(s) = ((s >> shift) & 1) ? -1.0 : 1.0;
    return d;
}

ComplexMatrix pauli_string(int n_sites, const std::vector<std::pair<int, char>>& factors) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int site = 1; site <= n_sites; ++site) {
        const ComplexMatrix* factor = &identity2();
        for (const auto& [s, axis] : factors) {
            if (s != site) continue;
            switch (axis) {
                case 'x': factor = &pauli_x(); break;
                case 'y': factor = &pauli_y(); break;
                case 'z': factor = &pauli_z(); break;
                default: throw Error("pauli_string: unknown axis");
            }
        }
        out = kron(out, *factor);
    }
    return out;
}

HamiltonianMatrix build_hamiltonian(const ChainConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_sites;
    const Eigen::Index dim = cfg.dim();
    const int half = (n - 1) / 2;

    RealMatrix h = RealMatrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int i = 1; i < n; ++i) {
            const double si = ((s >> (n - i)) & 1) ? -1.0 : 1.0;
            const double sj = ((s >> (n - i - 1)) & 1) ? -1.0 : 1.0;
            diag -= (i <= half ? cfg.j1 : cfg.j2()) * si * sj;
        }
        for (int i = 1; i <= n; ++i) diag -= cfg.hz * (((s >> (n - i)) & 1) ? -1.0 : 1.0);
        h(s, s) = diag;
        // sigma^x flips one spin: couples s to s with bit (n-i) toggled.
        for (int i = 0; i < n; ++i) h(s, s ^ (Eigen::Index(1) << i)) -= cfg.hx;
    }
    return {std::move(h), cfg};
}

HamiltonianMatrix build_h0(const ChainConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_sites;
    const Eigen::Index dim = cfg.dim();
    const int half = (n - 1) / 2;

    RealMatrix h = RealMatrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int i = half + 1; i < n; ++i) {
            const double si = ((s >> (n - i)) & 1) ? -1.0 : 1.0;
            const double sj = ((s >> (n - i - 1)) & 1) ? -1.0 : 1.0;
            diag -= cfg.j2() * si * sj;
        }
        h(s, s) = diag;
    }
    return {std::move(h), cfg};
}

std::vector<Eigen::Index> h0_basis_permutation(const ChainConfig& cfg) {
    const HamiltonianMatrix h0 = build_h0(cfg);
    std::vector<Eigen::Index> perm(h0.matrix.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(h0.matrix(a, a)) < std::abs(h0.matrix(b, b));
    });
    return perm;
}

RealMatrix to_h0_basis(const HamiltonianMatrix& h) {
    const auto perm = h0_basis_permutation(h.config);
    const Eigen::Index dim = h.matrix.rows();
    RealMatrix out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) out(i, j) = h.matrix(perm[i], perm[j]);
    return out;
}

double off_diagonal_weight(const HamiltonianMatrix& h) {
    const RealMatrix m = to_h0_basis(h);
    const double fro2 = m.squaredNorm();
    if (fro2 <= 0.0) throw ZeroMatrix("off_diagonal_weight: zero matrix");
    return 1.0 - m.diagonal().squaredNorm() / fro2;
}

AlphaFit fit_alpha(const std::vector<ChainConfig>& cfgs) {
    if (cfgs.size() < 5) throw Error("fit_alpha: need at least 5 grid points");
    for (const auto& c : cfgs) {
        if (c.n_sites != cfgs.front().n_sites || c.j1 != cfgs.front().j1 ||
            c.hx != cfgs.front().hx || c.hz != cfgs.front().hz)
            throw Error("fit_alpha: grid points must share (N, J1, hx, hz)");
    }
    AlphaFit out;
    for (const auto& c : cfgs) {
        out.j_ratios.push_back(c.j_ratio);
        out.weights.push_back(off_diagonal_weight(build_hamiltonian(c)));
    }
    out.fit = loglog_slope(out.j_ratios, out.weights);
    out.alpha = -out.fit.coefficients[1];
    return out;
}

double extrapolate_alpha(const std::vector<std::pair<int, double>>& alpha_by_n) {
    if (alpha_by_n.size() < 2) throw Error("extrapolate_alpha: need at least two sizes");
    std::vector<double> inv_n, alphas;
    for (const auto& [n, a] : alpha_by_n) {
        inv_n.push_back(1.0 / n);
        alphas.push_back(a);
    }
    return polyfit(inv_n, alphas, 1).coefficients[0];
}

}  // namespace ergokit
