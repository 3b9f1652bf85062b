#include "ergokit/entanglement.hpp"

#include <cmath>

#include "doctest.h"
#include "ergokit/model.hpp"
#include "support.hpp"

using namespace ergokit;

namespace {

StateVector random_state(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    StateVector psi;
    psi.n_sites = n;
    psi.amplitudes.resize(Eigen::Index(1) << n);
    for (Eigen::Index k = 0; k < psi.amplitudes.size(); ++k)
        psi.amplitudes(k) = Complex(g(rng), g(rng));
    psi.amplitudes /= psi.amplitudes.norm();
    return psi;
}

}  // namespace

TEST_CASE("named states land on the right basis indices") {
    const StateVector down = named_state(StateKind::AllDown, 3);
    CHECK(std::abs(down.amplitudes(7) - Complex(1, 0)) == 0.0);
    CHECK(down.amplitudes.norm() == doctest::Approx(1.0));

    const StateVector neel = named_state(StateKind::Neel, 3);  // up down up
    CHECK(std::abs(neel.amplitudes(2) - Complex(1, 0)) == 0.0);

    const StateVector up = named_state(StateKind::AllUp, 4 + 1);
    CHECK(std::abs(up.amplitudes(0) - Complex(1, 0)) == 0.0);
}

TEST_CASE("reduced density matrix basics") {
    const StateVector up = named_state(StateKind::AllUp, 3);
    const ComplexMatrix rho = reduced_density_matrix(up, 1);
    CHECK(rho.rows() == 2);
    CHECK(std::abs(rho(0, 0) - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(rho.trace() - Complex(1, 0)) < 1e-14);

    // Bell pair across the cut on two sites
    StateVector bell;
    bell.n_sites = 2;
    bell.amplitudes = ComplexVector::Zero(4);
    bell.amplitudes(0) = 1.0 / std::sqrt(2.0);  // |up up>
    bell.amplitudes(3) = 1.0 / std::sqrt(2.0);  // |down down>
    const ComplexMatrix half = reduced_density_matrix(bell, 1);
    CHECK((half - 0.5 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    const StateVector psi = random_state(5, 4);
    CHECK(std::abs(reduced_density_matrix(psi, 2).trace().real() - 1.0) < 1e-12);
    CHECK_THROWS_AS(reduced_density_matrix(psi, 0), CutOutOfRange);
    CHECK_THROWS_AS(reduced_density_matrix(psi, 5), CutOutOfRange);
}

TEST_CASE("von Neumann entropy limits and error paths") {
    ComplexMatrix pure = ComplexMatrix::Zero(4, 4);
    pure(2, 2) = 1.0;
    CHECK(von_neumann_entropy(pure) == doctest::Approx(0.0));

    CHECK(von_neumann_entropy(0.5 * ComplexMatrix::Identity(2, 2)) ==
          doctest::Approx(std::log(2.0)));

    ComplexMatrix not_unit_trace = 0.7 * ComplexMatrix::Identity(2, 2);
    CHECK_THROWS_AS(von_neumann_entropy(not_unit_trace), NotDensityMatrix);

    ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(von_neumann_entropy(negative), NotDensityMatrix);

    ComplexMatrix not_hermitian = ComplexMatrix::Identity(2, 2);
    not_hermitian(0, 1) = 0.3;
    CHECK_THROWS_AS(von_neumann_entropy(not_hermitian), NotDensityMatrix);
}

TEST_CASE("schmidt symmetry, bounds and phase invariance") {
    for (std::uint64_t seed : {10u, 11u, 12u}) {
        const StateVector psi = random_state(6 + 1, seed);
        for (int cut : {1, 3, 5}) {
            const double left = von_neumann_entropy(reduced_density_matrix(psi, cut));
            // right block = left block of the mirrored state; use the identity
            // S(rho_A) = S(rho_B) computed from the transposed reshape
            StateVector mirrored;
            mirrored.n_sites = psi.n_sites;
            const Eigen::Index rows = Eigen::Index(1) << cut;
            const Eigen::Index cols = Eigen::Index(1) << (psi.n_sites - cut);
            mirrored.amplitudes.resize(psi.amplitudes.size());
            for (Eigen::Index a = 0; a < rows; ++a)
                for (Eigen::Index b = 0; b < cols; ++b)
                    mirrored.amplitudes(b * rows + a) = psi.amplitudes(a * cols + b);
            const double right =
                von_neumann_entropy(reduced_density_matrix(mirrored, psi.n_sites - cut));
            CHECK(std::abs(left - right) < 1e-9);
            CHECK(left <= std::log(static_cast<double>(std::min(rows, cols))) + 1e-9);

            StateVector rotated = psi;
            rotated.amplitudes *= Complex(std::cos(0.8), std::sin(0.8));
            const double rotated_entropy =
                von_neumann_entropy(reduced_density_matrix(rotated, cut));
            CHECK(std::abs(rotated_entropy - left) < 1e-12);
        }
    }
}

TEST_CASE("eigenstate scan is zero for product eigenstates") {
    ChainConfig cfg{5, 1.0, 1.0, 0.0, 0.5};
    const Spectrum spec = eigh_symmetric(build_hamiltonian(cfg).matrix);
    const EntanglementScan scan = eigenstate_entanglement_scan(spec, 2);
    for (double s : scan.entropies) CHECK(s < 1e-8);
}

TEST_CASE("eigenstate scan separates the ergodic and constrained regimes") {
    auto scan_at = [](double jr) {
        ChainConfig cfg{7, 1.0, jr, 1.05, 0.5};
        return eigenstate_entanglement_scan(eigh_symmetric(build_hamiltonian(cfg).matrix), 3);
    };
    const EntanglementScan ergodic = scan_at(1.0);
    const EntanglementScan constrained = scan_at(5.0);
    CHECK(ergokit::testing::median(constrained.entropies) <
          0.5 * ergokit::testing::median(ergodic.entropies));
    CHECK(ergodic.entropies.size() == 128);
}

TEST_CASE("ground-state entanglement drops away from jr = 1") {
    for (int n : {7, 9}) {
        auto gs_entropy = [n](double jr) {
            ChainConfig cfg{n, 1.0, jr, 1.05, 0.5};
            const auto [energy, vec] = eigh_lowest(build_hamiltonian(cfg).matrix);
            StateVector psi;
            psi.n_sites = n;
            psi.amplitudes = vec.cast<Complex>();
            psi.amplitudes /= psi.amplitudes.norm();
            return von_neumann_entropy(reduced_density_matrix(psi, (n - 1) / 2));
        };
        const double homogeneous = gs_entropy(1.0);
        for (double jr : {2.0, 5.0}) CHECK(gs_entropy(jr) < homogeneous);
    }
}

TEST_CASE("quench entropy starts at zero and grows") {
    ChainConfig cfg{5, 1.0, 1.0, 1.05, 0.5};
    const Spectrum spec = eigh_symmetric(build_hamiltonian(cfg).matrix);
    const StateVector psi0 = named_state(StateKind::AllDown, 5);
    std::vector<double> grid;
    for (int k = 0; k <= 100; ++k) grid.push_back(0.3 * k);
    const TimeSeries series = quench_entropy_series(psi0, spec, 2, grid);
    CHECK(series.values.front() < 1e-12);
    double late = 0.0;
    for (std::size_t k = series.values.size() - 20; k < series.values.size(); ++k)
        late += series.values[k] / 20.0;
    CHECK(late > 0.5);
}
