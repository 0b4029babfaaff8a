#ifndef HLAP_LINALG_HPP
#define HLAP_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hlap/basis.hpp"
#include "hlap/rule.hpp"

namespace hlap {

using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Column j holds the expansion of A(domain[j]) over codomain.  Any output
/// term outside the codomain span above the leak tolerance raises
/// LeakageError naming the escaping BasisElement.
inline Matrix matrix_of(const LinearRule& a, const std::vector<BasisElement>& domain,
                        const std::vector<BasisElement>& codomain, double leak_tol = 1e-10) {
    std::map<BasisElement, Eigen::Index> index;
    for (std::size_t i = 0; i < codomain.size(); ++i)
        index.emplace(codomain[i], static_cast<Eigen::Index>(i));

    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(codomain.size()),
                            static_cast<Eigen::Index>(domain.size()));
    for (std::size_t j = 0; j < domain.size(); ++j) {
        SparseVector image = a.apply(domain[j]);
        const double scale = std::max(1.0, image.norm());
        for (const auto& [b, amp] : image.terms()) {
            auto it = index.find(b);
            if (it == index.end()) {
                if (std::abs(amp) > leak_tol * scale)
                    throw LeakageError(b, amp,
                                       "operator escapes codomain span at " + b.str() +
                                           " (|amp|=" + std::to_string(std::abs(amp)) + ")");
                continue;
            }
            m(it->second, static_cast<Eigen::Index>(j)) = amp;
        }
    }
    return m;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Eigenvalues of a block after compression, with multiplicities grouped to a
/// relative tolerance and the worst eigenpair residual.
struct SpectrumResult {
    std::vector<double> eigenvalues;     // distinct values, ascending
    std::vector<int> multiplicities;     // parallel to eigenvalues
    std::vector<double> raw;             // all eigenvalues, ascending
    double residual = 0.0;               // max ||Av - lambda v||
    std::optional<MultiIndex> block;     // originating gamma, when applicable

    double min() const { return raw.front(); }
    double max() const { return raw.back(); }
    int total_dim() const { return static_cast<int>(raw.size()); }
};

/// Diagonalize a Hermitian matrix; throws if the input fails the hermiticity
/// check (which signals a transcription bug upstream).
inline SpectrumResult hermitian_spectrum(const Matrix& m, double group_tol = 1e-8,
                                         double herm_tol = 1e-10) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_spectrum: square input required");
    const double scale = std::max(1.0, max_abs(m));
    const double herm_dev = max_abs(Matrix(m - m.adjoint()));
    if (herm_dev > herm_tol * scale)
        throw std::runtime_error("hermitian_spectrum: input non-Hermitian (dev=" +
                                 std::to_string(herm_dev) + ")");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_spectrum: eigensolver failed");

    SpectrumResult out;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    out.raw.assign(vals.data(), vals.data() + vals.size());

    double residual = 0.0;
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        residual = std::max(residual, (m * vecs.col(i) - vals[i] * vecs.col(i)).norm());
    out.residual = residual;

    const double vscale = std::max(1.0, std::abs(vals[vals.size() - 1]));
    for (double v : out.raw) {
        if (!out.eigenvalues.empty() && std::abs(v - out.eigenvalues.back()) <= group_tol * vscale)
            out.multiplicities.back() += 1;
        else {
            out.eigenvalues.push_back(v);
            out.multiplicities.push_back(1);
        }
    }
    return out;
}

inline double smallest_singular_value(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().minCoeff();
}

/// Compression of a rule onto the span of (possibly non-orthogonal) vectors:
/// solves A v_j = sum_i M(i,j) v_i in the least-squares sense via the Gram
/// matrix and reports the worst out-of-span leak.
struct Compression {
    Matrix matrix;       // coefficients in the given (non-orthonormal) basis
    double leak = 0.0;   // max ||A v_j - proj|| over columns
};

inline Compression compress_onto(const LinearRule& a, const std::vector<SparseVector>& span) {
    const auto d = static_cast<Eigen::Index>(span.size());
    std::vector<SparseVector> images;
    images.reserve(span.size());
    for (const auto& v : span) images.push_back(a.apply(v));

    Matrix gram(d, d), rhs(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            gram(i, j) = inner(span[i], span[j]);
            rhs(i, j) = inner(span[i], images[j]);
        }
    Compression out;
    out.matrix = gram.ldlt().solve(rhs);

    for (Eigen::Index j = 0; j < d; ++j) {
        SparseVector recon;
        for (Eigen::Index i = 0; i < d; ++i) recon += out.matrix(i, j) * span[i];
        out.leak = std::max(out.leak, (images[j] - recon).norm());
    }
    return out;
}

/// Coefficients of det(xI - M) for small real matrices, highest power first.
inline std::vector<double> characteristic_polynomial(const RealMatrix& m) {
    const Eigen::Index d = m.rows();
    // Faddeev-LeVerrier
    std::vector<double> coeffs(static_cast<std::size_t>(d) + 1, 0.0);
    coeffs[0] = 1.0;
    RealMatrix acc = RealMatrix::Zero(d, d);
    for (Eigen::Index k = 1; k <= d; ++k) {
        acc = m * acc + coeffs[k - 1] * RealMatrix::Identity(d, d);
        coeffs[k] = -(m * acc).trace() / double(k);
    }
    return coeffs;
}

}  // namespace hlap

#endif  // HLAP_LINALG_HPP
