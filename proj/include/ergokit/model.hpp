#pragma once

#include <utility>
#include <vector>

#include "ergokit/numerics.hpp"

namespace ergokit {

/// Parameters of the two-segment Ising chain. The first (N-1)/2 bonds carry
/// coupling j1, the remaining ones j2 = j1 * j_ratio; hx and hz are the
/// transverse and longitudinal fields.
struct ChainConfig {
    int n_sites = 7;
    double j1 = 1.0;
    double j_ratio = 1.0;
    double hx = 1.05;
    double hz = 0.5;

    double j2() const { return j1 * j_ratio; }
    Eigen::Index dim() const { return Eigen::Index(1) << n_sites; }
    void validate() const;
};

struct HamiltonianMatrix {
    RealMatrix matrix;
    ChainConfig config;
};

/// Basis convention: |s1 s2 ... sN>, site 1 leftmost, index
/// sum_i (1 - s_i)/2 * 2^(N-i). Index 0 is the all-up string.
/// Diagonal of sigma^z at `site` (1-based) over that basis, entries +-1.
RealVector sigma_z_diagonal(int n_sites, int site);

/// Dense Pauli string: identity everywhere except the listed (site, axis)
/// factors, axis one of 'x','y','z'.
ComplexMatrix pauli_string(int n_sites, const std::vector<std::pair<int, char>>& factors);

HamiltonianMatrix build_hamiltonian(const ChainConfig& cfg);

/// The dominant diagonal term: -j2 * sum over the right-half bonds.
HamiltonianMatrix build_h0(const ChainConfig& cfg);

/// Permutation taking computational basis states into ascending |H0 diagonal|
/// order, ties broken by original index.
std::vector<Eigen::Index> h0_basis_permutation(const ChainConfig& cfg);

/// P^T H P with P the permutation above.
RealMatrix to_h0_basis(const HamiltonianMatrix& h);

/// W_off = sum_{i != j} |Hij|^2 / ||H||_F^2 in the H0 eigenbasis.
double off_diagonal_weight(const HamiltonianMatrix& h);

struct AlphaFit {
    double alpha = 0.0;   // -slope of log10(W_off) vs log10(j_ratio)
    FitResult fit;
    std::vector<double> j_ratios;
    std::vector<double> weights;
};

/// Power-law exponent of the off-diagonal suppression over a j_ratio grid.
/// All configs must share (n_sites, j1, hx, hz) and there must be >= 5.
AlphaFit fit_alpha(const std::vector<ChainConfig>& cfgs);

/// Linear fit of alpha against 1/N; returns the 1/N -> 0 intercept.
double extrapolate_alpha(const std::vector<std::pair<int, double>>& alpha_by_n);

}  // namespace ergokit
