#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergokit/model.hpp"
#include "ergokit/numerics.hpp"

namespace ergokit {

/// A D x D matrix viewed as a vector of the Hilbert-Schmidt space with inner
/// product <A|B> = tr(A^dag B)/D. The norm is cached at construction.
struct HsVector {
    ComplexMatrix matrix;
    double norm = 0.0;

    Eigen::Index dim() const { return matrix.rows(); }
};

HsVector make_hs_vector(ComplexMatrix m);
double hs_norm(const ComplexMatrix& m);
Complex hs_inner(const HsVector& a, const HsVector& b);

/// L(O) = [H, O].
HsVector liouvillian(const HamiltonianMatrix& h, const HsVector& o);

/// The two sparse seeds used throughout: O1 = sz_1 + sz_N,
/// O2 = sz_1 + sz_{(N-1)/2}, both normalized in the HS norm.
HsVector seed_operator_o1(int n_sites);
HsVector seed_operator_o2(int n_sites);

/// N-fold Kronecker product of Haar 2x2 unitaries, HS-normalized.
HsVector random_product_operator(int n_sites, std::uint64_t seed);

/// Krylov basis {W_n} plus Arnoldi coefficients {b_n}; b[0] is the seed
/// norm, b[n>=1] the recursion norms. The basis is stored flattened,
/// vector n at offset n*D*D (column-major within each record).
struct KrylovDecomposition {
    Eigen::Index op_dim = 0;           // D
    std::vector<double> b;             // size K
    std::vector<Complex> basis;        // K * D^2 entries

    Eigen::Index dim() const { return static_cast<Eigen::Index>(b.size()); }
    Eigen::Map<const ComplexMatrix> basis_vector(Eigen::Index n) const {
        return {basis.data() + n * op_dim * op_dim, op_dim, op_dim};
    }
};

struct ArnoldiOptions {
    double tol = 1e-10;          // relative to b[0]
    Eigen::Index max_k = 0;      // 0: use the D^2 - D + 1 bound
    std::string scratch_path;    // non-empty: mirror the basis to this file
};

/// Arnoldi iteration on the Liouvillian with classical Gram-Schmidt against
/// all prior basis vectors, run twice per step. Terminates when b_n drops
/// below tol*b_0 or the Krylov bound is reached.
KrylovDecomposition arnoldi(const HamiltonianMatrix& h, const HsVector& seed,
                            const ArnoldiOptions& opts = {});

/// Bytes needed to hold the full Krylov basis of an N-site chain.
std::size_t arnoldi_memory_estimate(int n_sites);

struct BnDispersion {
    double sigma = 0.0;
    double sigma_inv = 0.0;
};

/// Standard deviation of b_n about a centered moving average of 2w samples,
/// accumulated for n in [n0, K-w+1).
BnDispersion bn_dispersion(const std::vector<double>& b, int n0 = 100, int w = 400);

struct DispersionParams {
    int n0 = 100;
    int w = 400;
    bool scaled_down = false;
};
/// The paper-scale defaults assume K ~ 16000; below K = 1000 they are scaled
/// down tenfold.
DispersionParams dispersion_params_for(std::size_t k);

struct AmplitudeResult {
    std::vector<Complex> phis;  // phi_n = <W_n|O(t)>
    double defect = 0.0;        // 1 - sum |phi_n|^2
};

AmplitudeResult krylov_amplitudes(const HsVector& o_t, const KrylovDecomposition& dec);

/// Streaming variant: reads basis vectors once from a scratch file written by
/// arnoldi (or write_basis_scratch) and projects every operator in `ops`.
std::vector<AmplitudeResult> krylov_amplitudes_scratch(const std::string& path,
                                                       const std::vector<HsVector>& ops);

void write_basis_scratch(const std::string& path, const KrylovDecomposition& dec);
KrylovDecomposition read_basis_scratch(const std::string& path);

/// K_C = sum_n n |phi_n|^2 for normalized amplitudes.
double krylov_complexity(const std::vector<Complex>& phis);

/// Diagonal weight of a HS-normalized operator in the energy eigenbasis,
/// scaled so the normalized identity gives 1.
double ipr(const HsVector& o, const Spectrum& spec);

/// S_K = (1/k_max) / sum |phi_n|^4 for normalized amplitudes.
double spread_measure(const std::vector<Complex>& phis, Eigen::Index k_max);

struct TimeAveragedComplexity {
    double value = 0.0;
    double completeness = 0.0;         // sum_n |phibar_n|^2, should be 1
    std::size_t degenerate_groups = 0; // gap groups holding more than one pair
};

/// Closed-form infinite-time average of K_C(t): energy gaps are grouped (so
/// exact degeneracies dephase coherently), everything else incoherently.
TimeAveragedComplexity time_averaged_complexity(const HsVector& o, const Spectrum& spec,
                                                const KrylovDecomposition& dec);

}  // namespace ergokit
