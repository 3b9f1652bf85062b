#include "ergokit/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace ergokit {

HeisenbergEngine::HeisenbergEngine(const Spectrum& spec, const ComplexMatrix& op)
    : energies_(spec.eigenvalues), vectors_(spec.eigenvectors) {
    if (op.rows() != spec.dim() || op.cols() != spec.dim())
        throw DimensionMismatch("HeisenbergEngine: operator/spectrum dimension mismatch");
    op_eig_ = vectors_.transpose() * op * vectors_;
}

ComplexMatrix HeisenbergEngine::at_eigenbasis(double t) const {
    const Eigen::Index d = dim();
    ComplexVector phase(d);
    for (Eigen::Index a = 0; a < d; ++a)
        phase(a) = Complex(std::cos(energies_(a) * t), std::sin(energies_(a) * t));
    ComplexMatrix out(d, d);
    for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index a = 0; a < d; ++a)
            out(a, b) = phase(a) * std::conj(phase(b)) * op_eig_(a, b);
    return out;
}

ComplexMatrix HeisenbergEngine::at(double t) const {
    return vectors_ * at_eigenbasis(t) * vectors_.transpose();
}

OperatorMatrix evolve_operator(const OperatorMatrix& op, const Spectrum& spec, double t) {
    HeisenbergEngine engine(spec, op.matrix);
    return {engine.at(t), op.label};
}

namespace {

int sites_of(const Spectrum& spec) {
    const Eigen::Index d = spec.dim();
    int n = 0;
    while ((Eigen::Index(1) << n) < d) ++n;
    if ((Eigen::Index(1) << n) != d) throw DimensionMismatch("otoc: dimension is not 2^N");
    return n;
}

}  // namespace

double otoc(const Spectrum& spec, int i, int j, double t) {
    const int n = sites_of(spec);
    if (i < 1 || i > n || j < 1 || j > n) throw SiteOutOfRange("otoc: site index out of range");
    const Eigen::Index d = spec.dim();

    const RealVector di = sigma_z_diagonal(n, i);
    const RealVector dj = sigma_z_diagonal(n, j);
    const RealMatrix& v = spec.eigenvectors;
    const RealMatrix oj_eig = v.transpose() * (dj.asDiagonal() * v);
    ComplexMatrix w_eig(d, d);
    ComplexVector phase(d);
    for (Eigen::Index a = 0; a < d; ++a)
        phase(a) = Complex(std::cos(spec.eigenvalues(a) * t), std::sin(spec.eigenvalues(a) * t));
    for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index a = 0; a < d; ++a)
            w_eig(a, b) = phase(a) * std::conj(phase(b)) * oj_eig(a, b);
    ComplexMatrix w = v * w_eig * v.transpose();

    // [sz_j(t), sz_i] entrywise: sz_i is diagonal.
    double acc = 0.0;
    for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index a = 0; a < d; ++a) {
            const double gap = di(b) - di(a);
            acc += std::norm(w(a, b)) * gap * gap;
        }
    return acc / (2.0 * static_cast<double>(d));
}

OtocSeries otoc_series(const Spectrum& spec, const ChainConfig& cfg, int i, int j,
                       const std::vector<double>& t_grid) {
    const int n = sites_of(spec);
    if (i < 1 || i > n || j < 1 || j > n)
        throw SiteOutOfRange("otoc_series: site index out of range");

    const Eigen::Index d = spec.dim();
    const RealVector di = sigma_z_diagonal(n, i);
    const RealVector dj = sigma_z_diagonal(n, j);
    const RealMatrix& v = spec.eigenvectors;
    const RealMatrix oj_eig = v.transpose() * (dj.asDiagonal() * v);

    OtocSeries out;
    out.d = std::abs(i - j);
    out.config = cfg;
    out.times = t_grid;
    out.values.resize(t_grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(t_grid.size()); ++k) {
        const double t = t_grid[k];
        ComplexMatrix w_eig(d, d);
        ComplexVector phase(d);
        for (Eigen::Index a = 0; a < d; ++a)
            phase(a) =
                Complex(std::cos(spec.eigenvalues(a) * t), std::sin(spec.eigenvalues(a) * t));
        for (Eigen::Index col = 0; col < d; ++col)
            for (Eigen::Index row = 0; row < d; ++row)
                w_eig(row, col) = phase(row) * std::conj(phase(col)) * oj_eig(row, col);
        const ComplexMatrix w = v * w_eig * v.transpose();
        double acc = 0.0;
        for (Eigen::Index col = 0; col < d; ++col)
            for (Eigen::Index row = 0; row < d; ++row) {
                const double gap = di(col) - di(row);
                acc += std::norm(w(row, col)) * gap * gap;
            }
        out.values[k] = acc / (2.0 * static_cast<double>(d));
    }
    return out;
}

Saturation saturation_value(const OtocSeries& series) {
    if (series.times.empty()) throw EmptyGrid("saturation_value: empty series");
    const double t_max = series.times.back();
    const double t_lo = t_max / 10.0;
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        if (series.times[k] < t_lo) continue;
        sum += series.values[k];
        sum2 += series.values[k] * series.values[k];
        ++count;
    }
    if (count == 0) throw Error("saturation_value: no samples in the last decade");
    const double mean = sum / static_cast<double>(count);
    return {mean, std::sqrt(std::max(0.0, sum2 / static_cast<double>(count) - mean * mean))};
}

OtocSeries early_window(const OtocSeries& series, double c_sat, double frac, double floor) {
    OtocSeries out;
    out.d = series.d;
    out.config = series.config;
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        if (series.values[k] > floor && series.values[k] < frac * c_sat) {
            out.times.push_back(series.times[k]);
            out.values.push_back(series.values[k]);
        }
    }
    return out;
}

FitResult fit_kappa(const OtocSeries& early) {
    const int power = 2 * (2 * early.d + 1);
    double factorial = 1.0;
    for (int k = 2; k <= 2 * early.d + 1; ++k) factorial *= k;

    std::vector<double> times = early.times, values = early.values;
    auto fit_once = [&](const std::vector<double>& ts, const std::vector<double>& cs) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double m = std::pow(ts[k], power) / factorial;
            num += cs[k] * m;
            den += m * m;
        }
        return num / den;
    };

    // Trim late points until the model reproduces every kept sample to 1%,
    // which bounds the contamination from the next-order term.
    while (times.size() >= 10) {
        const double kappa = fit_once(times, values);
        double worst = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double model = kappa * std::pow(times[k], power) / factorial;
            worst = std::max(worst, std::abs(model - values[k]) / values[k]);
        }
        if (worst <= 0.01) {
            FitResult out;
            out.coefficients = {kappa};
            double ss = 0.0;
            for (std::size_t k = 0; k < times.size(); ++k) {
                const double model = kappa * std::pow(times[k], power) / factorial;
                ss += (model - values[k]) * (model - values[k]);
            }
            out.residual = std::sqrt(ss / static_cast<double>(times.size()));
            return out;
        }
        times.pop_back();
        values.pop_back();
    }
    throw WindowTooSmall("fit_kappa: fewer than 10 usable early-growth points");
}

FitResult fit_b(const std::vector<double>& j_ratios, const std::vector<double>& kappas) {
    if (j_ratios.size() != kappas.size() || j_ratios.size() < 2)
        throw Error("fit_b: need matched kappa samples");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < j_ratios.size(); ++k) {
        const double m = std::pow(j_ratios[k], 4);
        num += kappas[k] * m;
        den += m * m;
    }
    FitResult out;
    out.coefficients = {num / den};
    double ss = 0.0;
    for (std::size_t k = 0; k < j_ratios.size(); ++k) {
        const double model = out.coefficients[0] * std::pow(j_ratios[k], 4);
        ss += (model - kappas[k]) * (model - kappas[k]);
    }
    out.residual = std::sqrt(ss / static_cast<double>(j_ratios.size()));
    return out;
}

BchReport verify_bch_commutators(const ChainConfig& cfg) {
    if (cfg.n_sites != 3) throw Error("verify_bch_commutators: the closed forms are for N=3");
    const ComplexMatrix h = build_hamiltonian(cfg).matrix.cast<Complex>();
    const auto comm = [](const ComplexMatrix& a, const ComplexMatrix& b) -> ComplexMatrix {
        return a * b - b * a;
    };
    const Complex im(0.0, 1.0);
    const double j1 = cfg.j1, hx = cfg.hx, hz = cfg.hz;

    const ComplexMatrix s1z = pauli_string(3, {{1, 'z'}});
    const ComplexMatrix c1 = comm(h, s1z);
    const ComplexMatrix c2 = comm(h, c1);
    const ComplexMatrix c3 = comm(h, c2);

    const ComplexMatrix ref1 = 2.0 * im * hx * pauli_string(3, {{1, 'y'}});
    const ComplexMatrix ref2 = 4.0 * hx * hx * s1z -
                               4.0 * hx * hz * pauli_string(3, {{1, 'x'}}) -
                               4.0 * j1 * hx * pauli_string(3, {{1, 'x'}, {2, 'z'}});
    const ComplexMatrix ref3 =
        8.0 * im * hx * (j1 * j1 + hx * hx + hz * hz) * pauli_string(3, {{1, 'y'}}) -
        8.0 * im * j1 * hx * hx * pauli_string(3, {{1, 'x'}, {2, 'y'}}) +
        16.0 * im * j1 * hx * hz * pauli_string(3, {{1, 'y'}, {2, 'z'}});

    BchReport report;
    report.max_deviation[0] = (c1 - ref1).cwiseAbs().maxCoeff();
    report.max_deviation[1] = (c2 - ref2).cwiseAbs().maxCoeff();
    report.max_deviation[2] = (c3 - ref3).cwiseAbs().maxCoeff();
    return report;
}

}  // namespace ergokit
