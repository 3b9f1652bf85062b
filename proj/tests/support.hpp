#pragma once

// Test-only oracles, kept independent of the library's computation paths.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ergokit/dynamics.hpp"
#include "ergokit/model.hpp"
#include "ergokit/numerics.hpp"

namespace ergokit::testing {

/// OTOC straight from the working formula 1 - Re tr[W(t) V W(t) V]/D.
/// Accurate only where C is well above machine epsilon; used to cross-check
/// the production commutator-norm route.
inline double otoc_reference(const Spectrum& spec, int i, int j, double t) {
    const Eigen::Index d = spec.dim();
    int n = 0;
    while ((Eigen::Index(1) << n) < d) ++n;
    const ComplexMatrix w =
        evolve_operator({pauli_string(n, {{j, 'z'}}), "szj"}, spec, t).matrix;
    const ComplexMatrix vi = pauli_string(n, {{i, 'z'}});
    const Complex trace = (w * vi * w * vi).trace();
    return 1.0 - trace.real() / static_cast<double>(d);
}

/// Dense GOE sample: symmetric, off-diagonal variance 1, diagonal variance 2.
inline RealMatrix sample_goe(Eigen::Index d, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    RealMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        m(i, i) = std::sqrt(2.0) * gauss(rng);
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double v = gauss(rng);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

/// Levels with i.i.d. unit-exponential spacings (Poisson statistics).
inline std::vector<double> poisson_levels(std::size_t count, Rng& rng) {
    std::exponential_distribution<double> expdist(1.0);
    std::vector<double> levels(count);
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        acc += expdist(rng);
        levels[k] = acc;
    }
    return levels;
}

inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> rank(n);
        for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<double>(k);
        return rank;
    };
    const auto rx = ranks(xs), ry = ranks(ys);
    const double mean = (n - 1) / 2.0;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        num += (rx[k] - mean) * (ry[k] - mean);
        dx += (rx[k] - mean) * (rx[k] - mean);
        dy += (ry[k] - mean) * (ry[k] - mean);
    }
    return num / std::sqrt(dx * dy);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace ergokit::testing
