#include "ergokit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ergokit {

UnfoldedSpectrum unfold(const std::vector<double>& eigs, int degree) {
    const std::size_t n = eigs.size();
    if (n < static_cast<std::size_t>(degree) + 2)
        throw Error("unfold: need at least degree+2 eigenvalues");
    if (!std::is_sorted(eigs.begin(), eigs.end())) throw Error("unfold: eigenvalues not sorted");

    const double lo = eigs.front(), hi = eigs.back();
    if (hi <= lo) throw Error("unfold: degenerate spectrum span");
    std::vector<double> xs(n), counts(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = 2.0 * (eigs[i] - lo) / (hi - lo) - 1.0;
        counts[i] = static_cast<double>(i + 1);  // cumulative count <= eigs[i]
    }

    UnfoldedSpectrum out;
    out.fit = polyfit(xs, counts, degree);
    out.epsilons.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.epsilons[i] = out.fit.eval(xs[i]);
    // Polynomial wiggle can break monotonicity; sort, then rescale so the
    // mean consecutive spacing is exactly 1.
    std::sort(out.epsilons.begin(), out.epsilons.end());
    const double span = out.epsilons.back() - out.epsilons.front();
    if (span <= 0.0) throw Error("unfold: collapsed unfolded span");
    const double scale = static_cast<double>(n - 1) / span;
    const double base = out.epsilons.front();
    for (auto& e : out.epsilons) e = (e - base) * scale;
    return out;
}

double r_statistic(const std::vector<double>& eigs, std::size_t* dropped) {
    if (eigs.size() < 3) throw Error("r_statistic: need at least 3 eigenvalues");
    std::vector<double> sorted = eigs;
    std::sort(sorted.begin(), sorted.end());

    double sum = 0.0;
    std::size_t used = 0, zero_pairs = 0;
    for (std::size_t i = 2; i < sorted.size(); ++i) {
        const double s_prev = sorted[i - 1] - sorted[i - 2];
        const double s_cur = sorted[i] - sorted[i - 1];
        if (s_prev == 0.0 || s_cur == 0.0) {
            ++zero_pairs;
            continue;
        }
        sum += std::min(s_cur, s_prev) / std::max(s_cur, s_prev);
        ++used;
    }
    if (dropped) *dropped = zero_pairs;
    if (used == 0) throw DegenerateSpectrum("r_statistic: all spacing pairs degenerate");
    return sum / static_cast<double>(used);
}

SffCurve sff(const UnfoldedSpectrum& unfolded, const std::vector<double>& t_grid, double eta,
             int window) {
    if (t_grid.empty()) throw EmptyGrid("sff: empty time grid");
    if (window < 1 || window % 2 == 0) throw Error("sff: window must be odd and positive");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) || t_grid.front() <= 0.0)
        throw Error("sff: time grid must be ascending and positive");

    const auto& eps = unfolded.epsilons;
    const std::size_t n = eps.size();
    const double mean = std::accumulate(eps.begin(), eps.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double e : eps) var += (e - mean) * (e - mean);
    var /= static_cast<double>(n);

    std::vector<double> rho(n, 1.0);
    if (var > 0.0) {
        const double denom = 2.0 * eta * eta * var;
        for (std::size_t i = 0; i < n; ++i)
            rho[i] = std::exp(-(eps[i] - mean) * (eps[i] - mean) / denom);
    }
    // Plateau normalization: the long-time limit of |sum rho e^{-i2pi e t}|^2
    // is sum rho^2.
    const double z = std::inner_product(rho.begin(), rho.end(), rho.begin(), 0.0);

    SffCurve out;
    out.window = window;
    out.times = t_grid;
    out.raw.resize(t_grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(t_grid.size()); ++k) {
        const double omega = 2.0 * M_PI * t_grid[k];
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            re += rho[i] * std::cos(omega * eps[i]);
            im -= rho[i] * std::sin(omega * eps[i]);
        }
        out.raw[k] = (re * re + im * im) / z;
    }

    // Centered moving average, shrinking symmetrically near the edges.
    out.values.resize(out.raw.size());
    const std::ptrdiff_t size = static_cast<std::ptrdiff_t>(out.raw.size());
    const std::ptrdiff_t half = window / 2;
    std::vector<double> prefix(size + 1, 0.0);
    for (std::ptrdiff_t k = 0; k < size; ++k) prefix[k + 1] = prefix[k] + out.raw[k];
    for (std::ptrdiff_t k = 0; k < size; ++k) {
        const std::ptrdiff_t h = std::min({half, k, size - 1 - k});
        out.values[k] = (prefix[k + h + 1] - prefix[k - h]) / static_cast<double>(2 * h + 1);
    }
    return out;
}

double sff_goe(double t) {
    if (t <= 0.0) throw NonPositiveTime("sff_goe: t must be positive");
    return 2.0 * t - t * std::log1p(2.0 * t);
}

double thouless_time(const SffCurve& curve, double theta, int sustained) {
    const std::size_t n = curve.times.size();
    const std::size_t run = sustained > 0 ? static_cast<std::size_t>(sustained)
                                          : static_cast<std::size_t>(curve.window);
    if (n < run) throw Error("thouless_time: curve shorter than the sustained-run length");

    std::vector<char> ok(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double goe = sff_goe(curve.times[k]);
        ok[k] = std::abs(curve.values[k] - goe) / goe < theta;
    }
    std::size_t streak = 0;
    for (std::size_t k = 0; k < n; ++k) {
        streak = ok[k] ? streak + 1 : 0;
        if (streak == run) {
            const std::size_t start = k + 1 - run;
            if (curve.times[start] <= 1.0) return curve.times[start];
            break;
        }
    }
    throw NoIntersection("thouless_time: no sustained overlap with the GOE ramp before t=1");
}

double g_metric(double t_th) {
    if (t_th <= 0.0) throw NonPositiveTime("g_metric: Thouless time must be positive");
    return -std::log10(t_th);
}

}  // namespace ergokit
