#pragma once

#include <cstddef>
#include <vector>

#include "ergokit/numerics.hpp"

namespace ergokit {

/// Unfolded levels (mean spacing rescaled to exactly 1) together with the
/// cumulative-count polynomial that produced them.
struct UnfoldedSpectrum {
    std::vector<double> epsilons;
    FitResult fit;
};

/// Map sorted eigenvalues through a degree-n polynomial fit of the cumulative
/// spectral function. The abscissa is rescaled to [-1,1] before fitting to
/// keep the Vandermonde system well conditioned at degree 10.
UnfoldedSpectrum unfold(const std::vector<double>& eigs, int degree = 10);

/// Mean adjacent-gap ratio <min(s_i,s_{i-1})/max(s_i,s_{i-1})>. Pairs with a
/// zero spacing are dropped; their count is reported through `dropped` when
/// given. ~0.53 for GOE statistics, ~0.386 for Poisson.
double r_statistic(const std::vector<double>& eigs, std::size_t* dropped = nullptr);

struct SffCurve {
    std::vector<double> times;   // scaled time, Heisenberg time = 1
    std::vector<double> values;  // moving-average smoothed
    std::vector<double> raw;     // unsmoothed
    int window = 1;
};

/// Spectral form factor of the unfolded levels with a Gaussian filter of
/// width eta about the spectral center, normalized so the plateau is ~1,
/// smoothed by a centered moving average of `window` samples (the window
/// shrinks symmetrically at the grid edges).
SffCurve sff(const UnfoldedSpectrum& unfolded, const std::vector<double>& t_grid,
             double eta = 0.5, int window = 51);

/// GOE ramp 2t - t*ln(1+2t).
double sff_goe(double t);

/// First grid time from which |SFF - GOE|/GOE stays below theta for
/// `sustained` consecutive samples (default: the curve's smoothing window).
/// Throws NoIntersection if that never happens before scaled time 1.
double thouless_time(const SffCurve& curve, double theta = 0.1, int sustained = 0);

/// g = -log10(t_th) in units where the Heisenberg time is 1.
double g_metric(double t_th);

}  // namespace ergokit
