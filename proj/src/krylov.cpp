#include "ergokit/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

namespace ergokit {

namespace {

using MapVec = Eigen::Map<Eigen::VectorXcd>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXcd>;
using ConstMapMat = Eigen::Map<const Eigen::MatrixXcd>;

constexpr char kMagic[4] = {'K', 'R', 'Y', 'V'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

double hs_norm(const ComplexMatrix& m) {
    return std::sqrt(m.squaredNorm() / static_cast<double>(m.rows()));
}

HsVector make_hs_vector(ComplexMatrix m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("make_hs_vector: matrix must be square");
    const double norm = hs_norm(m);
    return {std::move(m), norm};
}

Complex hs_inner(const HsVector& a, const HsVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("hs_inner: dimension mismatch");
    return (a.matrix.conjugate().cwiseProduct(b.matrix)).sum() /
           static_cast<double>(a.dim());
}

HsVector liouvillian(const HamiltonianMatrix& h, const HsVector& o) {
    if (h.matrix.rows() != o.dim()) throw DimensionMismatch("liouvillian: dimension mismatch");
    return make_hs_vector(h.matrix * o.matrix - o.matrix * h.matrix);
}

HsVector seed_operator_o1(int n_sites) {
    ComplexMatrix m = pauli_string(n_sites, {{1, 'z'}}) +
                      pauli_string(n_sites, {{n_sites, 'z'}});
    HsVector v = make_hs_vector(std::move(m));
    v.matrix /= v.norm;
    v.norm = 1.0;
    return v;
}

HsVector seed_operator_o2(int n_sites) {
    ComplexMatrix m = pauli_string(n_sites, {{1, 'z'}}) +
                      pauli_string(n_sites, {{(n_sites - 1) / 2, 'z'}});
    HsVector v = make_hs_vector(std::move(m));
    v.matrix /= v.norm;
    v.norm = 1.0;
    return v;
}

HsVector random_product_operator(int n_sites, std::uint64_t seed) {
    Rng rng(seed);
    ComplexMatrix m = haar_qubit_unitary(rng);
    for (int k = 1; k < n_sites; ++k) m = kron(m, haar_qubit_unitary(rng));
    HsVector v = make_hs_vector(std::move(m));
    v.matrix /= v.norm;
    v.norm = 1.0;
    return v;
}

std::size_t arnoldi_memory_estimate(int n_sites) {
    const std::size_t d = std::size_t(1) << n_sites;
    const std::size_t k_max = d * d - d + 1;
    return k_max * d * d * sizeof(Complex);
}

KrylovDecomposition arnoldi(const HamiltonianMatrix& h, const HsVector& seed,
                            const ArnoldiOptions& opts) {
    const Eigen::Index d = seed.dim();
    if (h.matrix.rows() != d) throw DimensionMismatch("arnoldi: dimension mismatch");
    if (seed.norm <= 0.0) throw ZeroOperator("arnoldi: seed operator has zero HS norm");
    const Eigen::Index len = d * d;
    const Eigen::Index bound = d * d - d + 1;
    const Eigen::Index max_k =
        opts.max_k > 0 ? std::min<Eigen::Index>(opts.max_k, bound) : bound;

    KrylovDecomposition dec;
    dec.op_dim = d;
    dec.b.reserve(max_k);
    dec.basis.reserve(static_cast<std::size_t>(max_k) * len);

    std::ofstream scratch;
    if (!opts.scratch_path.empty()) {
        scratch.open(opts.scratch_path, std::ios::binary | std::ios::trunc);
        if (!scratch) throw Error("arnoldi: cannot open scratch file " + opts.scratch_path);
        // K is patched in once the iteration terminates.
        scratch.write(kMagic, 4);
        const std::uint32_t header[3] = {kVersion, static_cast<std::uint32_t>(d), 0u};
        scratch.write(reinterpret_cast<const char*>(header), sizeof(header));
    }
    auto append_vector = [&](const ComplexMatrix& w) {
        dec.basis.insert(dec.basis.end(), w.data(), w.data() + len);
        if (scratch.is_open())
            scratch.write(reinterpret_cast<const char*>(w.data()),
                          static_cast<std::streamsize>(len * sizeof(Complex)));
    };

    const double b0 = seed.norm;
    dec.b.push_back(b0);
    ComplexMatrix w = seed.matrix / b0;
    append_vector(w);

    const ComplexMatrix hc = h.matrix.cast<Complex>();
    for (Eigen::Index n = 1; n < max_k; ++n) {
        ComplexMatrix a = hc * w - w * hc;
        MapVec av(a.data(), len);
        // Classical Gram-Schmidt against every prior vector, two passes.
        ConstMapMat basis(dec.basis.data(), len, n);
        for (int pass = 0; pass < 2; ++pass) {
            ComplexVector coeffs = basis.adjoint() * av;
            av.noalias() -= basis * (coeffs / static_cast<double>(d));
        }
        const double bn = hs_norm(a);
        if (bn <= opts.tol * b0) break;
        dec.b.push_back(bn);
        w = a / bn;
        append_vector(w);
    }

    if (scratch.is_open()) {
        const std::uint32_t k = static_cast<std::uint32_t>(dec.dim());
        scratch.seekp(4 + 2 * sizeof(std::uint32_t));
        scratch.write(reinterpret_cast<const char*>(&k), sizeof(k));
        scratch.close();
    }
    return dec;
}

BnDispersion bn_dispersion(const std::vector<double>& b, int n0, int w) {
    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(b.size());
    if (len <= n0 + 2 * w)
        throw SequenceTooShort("bn_dispersion: sequence length must exceed n0 + 2w");

    // Centered local mean over 2w samples, clamped at the sequence edges.
    auto local_mean = [&](std::ptrdiff_t n) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, n - w);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, n + w);
        double acc = 0.0;
        for (std::ptrdiff_t m = lo; m < hi; ++m) acc += b[m];
        return acc / static_cast<double>(hi - lo);
    };

    const std::ptrdiff_t last = len - w + 1;
    double acc = 0.0;
    std::ptrdiff_t count = 0;
    for (std::ptrdiff_t n = n0; n < last; ++n) {
        const double dev = b[n] - local_mean(n);
        acc += dev * dev;
        ++count;
    }
    const double sigma = std::sqrt(acc / static_cast<double>(count));
    return {sigma, sigma > 0.0 ? 1.0 / sigma : std::numeric_limits<double>::infinity()};
}

DispersionParams dispersion_params_for(std::size_t k) {
    if (k < 1000) return {10, 40, true};
    return {100, 400, false};
}

AmplitudeResult krylov_amplitudes(const HsVector& o_t, const KrylovDecomposition& dec) {
    if (o_t.dim() != dec.op_dim) throw DimensionMismatch("krylov_amplitudes: dimension mismatch");
    const Eigen::Index len = dec.op_dim * dec.op_dim;
    ConstMapMat basis(dec.basis.data(), len, dec.dim());
    ConstMapVec ov(o_t.matrix.data(), len);
    ComplexVector phis = basis.adjoint() * ov / static_cast<double>(dec.op_dim);
    AmplitudeResult out;
    out.phis.assign(phis.data(), phis.data() + phis.size());
    out.defect = 1.0 - phis.squaredNorm();
    return out;
}

void write_basis_scratch(const std::string& path, const KrylovDecomposition& dec) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("write_basis_scratch: cannot open " + path);
    f.write(kMagic, 4);
    const std::uint32_t header[3] = {kVersion, static_cast<std::uint32_t>(dec.op_dim),
                                     static_cast<std::uint32_t>(dec.dim())};
    f.write(reinterpret_cast<const char*>(header), sizeof(header));
    f.write(reinterpret_cast<const char*>(dec.basis.data()),
            static_cast<std::streamsize>(dec.basis.size() * sizeof(Complex)));
}

namespace {

struct ScratchHeader {
    std::uint32_t version = 0, d = 0, k = 0;
};

ScratchHeader read_scratch_header(std::ifstream& f, const std::string& path) {
    char magic[4];
    ScratchHeader h;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&h.version), sizeof(h.version));
    f.read(reinterpret_cast<char*>(&h.d), sizeof(h.d));
    f.read(reinterpret_cast<char*>(&h.k), sizeof(h.k));
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw Error("scratch file " + path + " is not a KRYV basis file");
    if (h.version != kVersion)
        throw Error("scratch file " + path + ": unsupported version " +
                    std::to_string(h.version));
    return h;
}

}  // namespace

KrylovDecomposition read_basis_scratch(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("read_basis_scratch: cannot open " + path);
    const ScratchHeader h = read_scratch_header(f, path);
    KrylovDecomposition dec;
    dec.op_dim = h.d;
    dec.b.assign(h.k, 0.0);  // coefficients are not part of the scratch format
    dec.basis.resize(std::size_t(h.k) * h.d * h.d);
    f.read(reinterpret_cast<char*>(dec.basis.data()),
           static_cast<std::streamsize>(dec.basis.size() * sizeof(Complex)));
    if (!f) throw Error("read_basis_scratch: truncated file " + path);
    return dec;
}

std::vector<AmplitudeResult> krylov_amplitudes_scratch(const std::string& path,
                                                       const std::vector<HsVector>& ops) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("krylov_amplitudes_scratch: cannot open " + path);
    const ScratchHeader h = read_scratch_header(f, path);
    const Eigen::Index d = h.d;
    const Eigen::Index len = d * d;
    for (const auto& op : ops)
        if (op.dim() != d)
            throw DimensionMismatch("krylov_amplitudes_scratch: dimension mismatch");

    std::vector<AmplitudeResult> out(ops.size());
    for (auto& r : out) r.phis.resize(h.k);

    ComplexMatrix w(d, d);
    for (std::uint32_t n = 0; n < h.k; ++n) {
        f.read(reinterpret_cast<char*>(w.data()),
               static_cast<std::streamsize>(len * sizeof(Complex)));
        if (!f) throw Error("krylov_amplitudes_scratch: truncated file " + path);
        ConstMapVec wv(w.data(), len);
        for (std::size_t q = 0; q < ops.size(); ++q) {
            ConstMapVec ov(ops[q].matrix.data(), len);
            out[q].phis[n] = wv.dot(ov) / static_cast<double>(d);
        }
    }
    for (auto& r : out) {
        double total = 0.0;
        for (const Complex& p : r.phis) total += std::norm(p);
        r.defect = 1.0 - total;
    }
    return out;
}

double krylov_complexity(const std::vector<Complex>& phis) {
    double total = 0.0, weighted = 0.0;
    for (std::size_t n = 0; n < phis.size(); ++n) {
        const double p = std::norm(phis[n]);
        total += p;
        weighted += static_cast<double>(n) * p;
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw NotNormalized("krylov_complexity: amplitudes are not normalized");
    return weighted;
}

double ipr(const HsVector& o, const Spectrum& spec) {
    if (o.dim() != spec.dim()) throw DimensionMismatch("ipr: dimension mismatch");
    const Eigen::Index d = o.dim();
    const ComplexMatrix ov = o.matrix * spec.eigenvectors.cast<Complex>();
    double acc = 0.0;
    for (Eigen::Index a = 0; a < d; ++a)
        acc += std::norm(spec.eigenvectors.col(a).cast<Complex>().dot(ov.col(a)));
    return acc / static_cast<double>(d);
}

double spread_measure(const std::vector<Complex>& phis, Eigen::Index k_max) {
    double total = 0.0, quartic = 0.0;
    for (const Complex& p : phis) {
        const double w = std::norm(p);
        total += w;
        quartic += w * w;
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw NotNormalized("spread_measure: amplitudes are not normalized");
    return 1.0 / (static_cast<double>(k_max) * quartic);
}

TimeAveragedComplexity time_averaged_complexity(const HsVector& o, const Spectrum& spec,
                                                const KrylovDecomposition& dec) {
    const Eigen::Index d = o.dim();
    if (spec.dim() != d || dec.op_dim != d)
        throw DimensionMismatch("time_averaged_complexity: dimension mismatch");
    const Eigen::Index k = dec.dim();
    const ComplexMatrix vc = spec.eigenvectors.cast<Complex>();

    // Matrix elements in the energy eigenbasis.
    const ComplexMatrix o_eig = vc.transpose() * o.matrix * vc;

    // Group the D^2 Bohr frequencies E_a - E_b; members of one group keep
    // their relative phases forever and average coherently.
    struct Pair {
        double omega;
        Eigen::Index a, b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            pairs.push_back({spec.eigenvalues(a) - spec.eigenvalues(b), a, b});
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& x, const Pair& y) { return x.omega < y.omega; });
    const double span = spec.eigenvalues(d - 1) - spec.eigenvalues(0);
    const double gap_tol = std::max(span, 1.0) * 1e-9;

    std::vector<std::size_t> group_start;
    group_start.push_back(0);
    for (std::size_t p = 1; p < pairs.size(); ++p)
        if (pairs[p].omega - pairs[p - 1].omega > gap_tol) group_start.push_back(p);
    group_start.push_back(pairs.size());

    TimeAveragedComplexity out;
    // Degenerate groups beyond the trivial omega=0 diagonal set.
    for (std::size_t g = 0; g + 1 < group_start.size(); ++g) {
        const std::size_t size = group_start[g + 1] - group_start[g];
        const bool is_zero = std::abs(pairs[group_start[g]].omega) <= gap_tol;
        if (size > 1 && !(is_zero && size == static_cast<std::size_t>(d)))
            ++out.degenerate_groups;
    }

    std::vector<double> phibar2(k, 0.0);
    for (Eigen::Index n = 0; n < k; ++n) {
        // W_n in the eigenbasis; <W_n|P_ab> = conj(Wn_eig[a,b])/D.
        const ComplexMatrix wn_eig =
            vc.transpose() * ConstMapMat(dec.basis.data() + n * d * d, d, d) * vc;
        for (std::size_t g = 0; g + 1 < group_start.size(); ++g) {
            Complex coherent(0.0, 0.0);
            for (std::size_t p = group_start[g]; p < group_start[g + 1]; ++p) {
                const auto& pr = pairs[p];
                coherent += o_eig(pr.a, pr.b) * std::conj(wn_eig(pr.a, pr.b));
            }
            phibar2[n] += std::norm(coherent) / static_cast<double>(d * d);
        }
    }

    for (Eigen::Index n = 0; n < k; ++n) {
        out.completeness += phibar2[n];
        out.value += static_cast<double>(n) * phibar2[n];
    }
    return out;
}

}  // namespace ergokit
