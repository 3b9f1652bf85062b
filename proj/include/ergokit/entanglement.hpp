#pragma once

#include <vector>

#include "ergokit/numerics.hpp"
#include "ergokit/timeseries.hpp"

namespace ergokit {

struct StateVector {
    ComplexVector amplitudes;
    int n_sites = 0;
};

enum class StateKind { AllDown, Neel, AllUp };

/// Computational basis states in the convention of the model module
/// (site 1 leftmost, up = bit 0). The Neel state starts up at site 1.
StateVector named_state(StateKind kind, int n_sites);

/// Left-block reduced density matrix over sites 1..cut.
ComplexMatrix reduced_density_matrix(const StateVector& psi, int cut);

/// S = -tr(rho ln rho); eigenvalues below -1e-10 reject the input, small
/// negatives are clamped to zero.
double von_neumann_entropy(const ComplexMatrix& rho);

struct EntanglementScan {
    std::vector<double> energies;
    std::vector<double> entropies;
    int cut = 0;
};

/// (E_k, S(k)) for every eigenvector column.
EntanglementScan eigenstate_entanglement_scan(const Spectrum& spec, int cut);

/// S(t) of |psi(t)> = V exp(-i Lambda t) V^T |psi0> across the cut.
TimeSeries quench_entropy_series(const StateVector& psi0, const Spectrum& spec, int cut,
                                 const std::vector<double>& t_grid);

}  // namespace ergokit
