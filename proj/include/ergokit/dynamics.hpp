#pragma once

#include <array>
#include <string>
#include <vector>

#include "ergokit/model.hpp"
#include "ergokit/numerics.hpp"

namespace ergokit {

struct OperatorMatrix {
    ComplexMatrix matrix;
    std::string label;
};

/// Heisenberg evolution O(t) = e^{iHt} O e^{-iHt} through the eigenbasis of H.
OperatorMatrix evolve_operator(const OperatorMatrix& op, const Spectrum& spec, double t);

/// Precomputed-eigenbasis evolver for repeated evaluation over a time grid.
class HeisenbergEngine {
  public:
    HeisenbergEngine(const Spectrum& spec, const ComplexMatrix& op);

    /// O(t) in the energy eigenbasis: entries O_ab * exp(i (E_a - E_b) t).
    ComplexMatrix at_eigenbasis(double t) const;
    /// O(t) back in the computational basis.
    ComplexMatrix at(double t) const;

    Eigen::Index dim() const { return energies_.size(); }

  private:
    RealVector energies_;
    RealMatrix vectors_;
    ComplexMatrix op_eig_;
};

/// Infinite-temperature OTOC C = 1 - Re tr[sz_j(t) sz_i sz_j(t) sz_i] / 2^N,
/// evaluated as ||[sz_j(t), sz_i]||_F^2 / (2*2^N), which is the same quantity
/// but does not lose precision at small t.
double otoc(const Spectrum& spec, int i, int j, double t);

struct OtocSeries {
    int d = 0;  // |i - j|
    std::vector<double> times;
    std::vector<double> values;
    ChainConfig config;
};

OtocSeries otoc_series(const Spectrum& spec, const ChainConfig& cfg, int i, int j,
                       const std::vector<double>& t_grid);

struct Saturation {
    double mean = 0.0;    // average of C over the last decade of the grid
    double stddev = 0.0;
};
Saturation saturation_value(const OtocSeries& series);

/// Keep the early-growth points: floor < C < frac * c_sat.
OtocSeries early_window(const OtocSeries& series, double c_sat, double frac = 1e-3,
                        double floor = 1e-18);

/// One-parameter fit C = kappa * t^{2(2d+1)} / (2d+1)! over an early-growth
/// series. Points where the next-order term would contribute more than 1%
/// (visible as relative misfit) are trimmed from the top before refitting.
FitResult fit_kappa(const OtocSeries& early);

/// Second stage: kappa(J_r) = b * J_r^4; coefficients = {b}.
FitResult fit_b(const std::vector<double>& j_ratios, const std::vector<double>& kappas);

/// Checks the nested commutators [H,[H,...[H, sz_1]]] at N=3 against their
/// closed forms, orders 1..3.
struct BchReport {
    std::array<double, 3> max_deviation{};
    bool pass(double tol = 1e-12) const {
        return max_deviation[0] < tol && max_deviation[1] < tol && max_deviation[2] < tol;
    }
};
BchReport verify_bch_commutators(const ChainConfig& cfg);

}  // namespace ergokit
