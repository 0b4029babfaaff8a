#ifndef HLAP_CATALOG_HPP
#define HLAP_CATALOG_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hlap/heisenberg.hpp"
#include "hlap/linalg.hpp"

namespace hlap::catalog {

using heisenberg::HeisenbergContext;

/// The closed-form eigenvalue list indexes half-integer arguments through a
/// floor.  Standard is floor(x); StrictlySmaller is the greatest integer
/// strictly below x, which differs on integer arguments.  The catalog/block
/// matcher is the arbiter between them; Standard is what matches.
enum class FloorConvention { Standard, StrictlySmaller };

namespace detail {
inline int floor_half(int twice, FloorConvention conv) {
    // floor of twice/2 under the chosen convention
    if (conv == FloorConvention::Standard) {
        return (twice >= 0) ? twice / 2 : -((-twice + 1) / 2);
    }
    if (twice % 2 == 0) return twice / 2 - 1;
    return (twice >= 0) ? twice / 2 : -((-twice + 1) / 2);
}
}  // namespace detail

/// One catalog entry: the value of family `family` at parameters (g, r) and,
/// for family 4, the branch sign.
struct CatalogEntry {
    double value = 0.0;
    int family = 0;  // 1..4
    int g = 1;       // family 2 is g-independent; recorded as g = 1
    int r = 0;       // 0 for family 1
    int sign = 0;    // -1/+1 for family 4, else 0
};

/// All four families of the closed-form list for degree p <= n, enumerated
/// for g <= g_max and r <= p, sorted by value.  Coincident values are kept
/// with their distinct provenance.
inline std::vector<CatalogEntry> eigenvalues(int n, int p, double k, int g_max,
                                             FloorConvention conv = FloorConvention::Standard) {
    if (p > n) throw std::invalid_argument("catalog::eigenvalues: requires p <= n (reflect first)");
    if (p < 0) throw std::invalid_argument("catalog::eigenvalues: p must be >= 0");
    if (!(k > 0.0)) throw std::invalid_argument("catalog::eigenvalues: k must be > 0");
    if (g_max < 1) throw std::invalid_argument("catalog::eigenvalues: g_max must be >= 1");

    std::vector<CatalogEntry> out;
    const double k2 = k * k;
    // Family 1 is the function spectrum of the (n-p)-pair reduction; at
    // p = n that Fock space is one-dimensional and only g = 1 survives.
    const int g_max_1 = (p == n) ? 1 : g_max;
    for (int g = 1; g <= g_max_1; ++g)
        out.push_back({2 * k * (g - 1) + k2 + (n - p) * k, 1, g, 0, 0});

    for (int r = 1; r <= p; ++r) {
        const int m = n - p + r;
        const int f_r = detail::floor_half(r, conv);              // floor(r/2)
        const int f_rp1 = detail::floor_half(r + 1, conv);        // floor((r+1)/2)
        const int f_rm1 = detail::floor_half(r - 1, conv);        // floor((r-1)/2)

        out.push_back(
            {k2 + (n - p + r + 1) * k + double(f_rp1) * (n - p + f_r + 1), 2, 1, r, 0});

        for (int g = 1; g <= g_max; ++g) {
            out.push_back(
                {2 * k * (g - 1) + k2 + m * k + double(f_r) * (n - p + f_rp1), 3, g, r, 0});

            const double shift =
                2 * k * g + k2 + m * k + 0.5 * m + double(f_rm1) * (n - p + f_r);
            const double root = std::sqrt(0.25 * m * m + m * k + 2 * k * g + k2);
            out.push_back({shift + root, 4, g, r, +1});
            out.push_back({shift - root, 4, g, r, -1});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) { return a.value < b.value; });
    return out;
}

inline long binomial(int n, int p) {
    if (p < 0 || p > n) return 0;
    long out = 1;
    for (int i = 0; i < p; ++i) out = out * (n - i) / (i + 1);
    return out;
}

/// Lowest eigenvalue and its multiplicity; degrees above n reflect through
/// the star operator p -> 2n+1-p.
inline std::pair<double, long> lowest(int n, int p, double k) {
    if (p < 0 || p > 2 * n + 1) throw std::invalid_argument("catalog::lowest: p out of range");
    if (!(k > 0.0)) throw std::invalid_argument("catalog::lowest: k must be > 0");
    const int q = (p <= n) ? p : 2 * n + 1 - p;
    return {k * k + (n - q) * k, binomial(n, q)};
}

/// The recursive symmetric element epsilon(p, n) in V^{p,n,|gamma| e_1},
/// un-normalized.
inline SparseVector symmetric_epsilon(int p, int n, int gamma_abs) {
    if (p < 0 || n < 2 || gamma_abs < 0)
        throw std::invalid_argument("symmetric_epsilon: requires p >= 0, n >= 2, gamma_abs >= 0");
    if (p == 0)
        return SparseVector(
            BasisElement(MultiIndex::unit(static_cast<std::size_t>(n), 0, gamma_abs), FormWord()));
    SparseVector prev = symmetric_epsilon(p - 1, n, gamma_abs);
    LinearRule step = LinearRule::zero();
    for (int j = 2; j <= n; ++j) {
        if (p % 2 == 1)
            step = step + LinearRule::creation(j) * heisenberg::e_holo(j);
        else
            step = step + LinearRule::annihilation(j) * heisenberg::e_anti(j);
    }
    if (p % 2 == 0) step = (-2.0 / p) * step;
    return step.apply(prev);
}

/// The four-vector basis of the symmetric subspace for p = 2q >= 4
/// (the lemma's hypothesis), in the paper's un-normalized order.  Requires
/// q <= n-1: at q = n the epsilon recursion runs out of pairs and the four
/// vectors become linearly dependent.
inline std::vector<SparseVector> symmetric_basis(int q, int n, int gamma_abs) {
    if (q < 2) throw std::invalid_argument("symmetric_basis: requires p = 2q >= 4");
    if (q > n - 1) throw std::invalid_argument("symmetric_basis: requires q <= n-1");
    if (gamma_abs < 1) throw std::invalid_argument("symmetric_basis: requires |gamma| >= 1");
    using heisenberg::e_anti;
    using heisenberg::e_holo;
    using heisenberg::e_w;
    const double g = gamma_abs;
    const SparseVector e2qm3 = symmetric_epsilon(2 * q - 3, n, gamma_abs);
    const SparseVector e2qm2 = symmetric_epsilon(2 * q - 2, n, gamma_abs);
    const SparseVector e2qm1 = symmetric_epsilon(2 * q - 1, n, gamma_abs);
    const SparseVector e2q = symmetric_epsilon(2 * q, n, gamma_abs);

    LinearRule t1t1b = e_holo(1) * e_anti(1);
    std::vector<SparseVector> basis(4);
    basis[0] = Complex(-g) * t1t1b.apply(e2qm2) +
               (LinearRule::annihilation(1) * e_anti(1)).apply(e2qm1);
    basis[1] = t1t1b.apply(e2qm2) + e2q;
    basis[2] = (e_w() * e_holo(1) * e_anti(1)).apply(e2qm3) +
               (LinearRule::creation(1) * e_w() * e_holo(1)).apply(e2qm2) + e_w().apply(e2qm1);
    basis[3] = (LinearRule::annihilation(1) * e_w() * e_anti(1)).apply(e2qm2);
    return basis;
}

/// Closed-form eigenvalues of the compressed Laplacian on the symmetric
/// subspace: base + q(n-q) twice, and base + n/2 + (q-1)(n-q) +- sqrt(...).
/// The shift of the root pair is the one consistent with the full eigenvalue
/// list and with machine compression; it coincides with q(n-q-1) only when
/// n = 2q.
inline std::vector<double> symmetric_closed_eigenvalues(int q, int n, double k, int gamma_abs) {
    const double base = 2 * k * gamma_abs + n * k + k * k;
    const double root = std::sqrt(0.25 * n * n + n * k + 2 * k * gamma_abs + k * k);
    const double shift = 0.5 * n + double(q - 1) * (n - q);
    std::vector<double> out = {base + q * (n - q), base + q * (n - q), base + shift - root,
                               base + shift + root};
    std::sort(out.begin(), out.end());
    return out;
}

/// The closed-form 4x4 matrix (non-identity part) in the paper's basis.  The
/// (2,2) entry is q(n-q+1); with q(n-q-1) there the matrix would contradict
/// its own eigenvalue list (trace mismatch), and compression confirms
/// q(n-q+1).
inline RealMatrix symmetric_matrix_reference(int q, int n, double k, int gamma_abs) {
    const double rk = std::sqrt(k);
    const double g = gamma_abs;
    RealMatrix m(4, 4);
    m << double(q - 1) * (n - q), 0, rk, rk,
        -q * g, double(q) * (n - q + 1), -q * rk, 0,
        rk * g, -rk, k + double(q) * (n - q), 0,
        rk * (g + n - q), -rk, 0, -k + double(q) * (n - q);
    return m;
}

struct SymmetricMatrixResult {
    RealMatrix matrix;                   // non-identity part, paper's basis
    double base = 0.0;                   // 2k|gamma| + k^2 + nk
    std::vector<double> eigenvalues;     // of base*Id + matrix, ascending
    std::vector<double> closed_form;     // from symmetric_closed_eigenvalues
    double agreement = 0.0;              // max |eigenvalues - closed_form|
};

/// The 4x4 matrix of the Laplacian on the symmetric subspace with respect to
/// the paper's basis, together with both eigenvalue routes.
inline SymmetricMatrixResult symmetric_matrix(int q, int n, double k, int gamma_abs) {
    if (q < 2) throw std::invalid_argument("symmetric_matrix: requires q >= 2 (p = 2q >= 4)");
    if (q > n - 1) throw std::invalid_argument("symmetric_matrix: requires q <= n-1");
    if (gamma_abs < 1) throw std::invalid_argument("symmetric_matrix: requires |gamma| >= 1");
    HeisenbergContext ctx(n, k, 2 * q);
    const auto basis = symmetric_basis(q, n, gamma_abs);
    const Compression comp =
        compress_onto(heisenberg::build_laplacian(ctx, heisenberg::LapMode::Explicit), basis);

    SymmetricMatrixResult out;
    out.base = 2 * k * gamma_abs + n * k + k * k;
    const Matrix shifted = comp.matrix - out.base * Matrix::Identity(4, 4);
    if (shifted.imag().cwiseAbs().maxCoeff() > 1e-9)
        throw std::runtime_error("symmetric_matrix: unexpected imaginary part");
    out.matrix = shifted.real();

    Eigen::EigenSolver<RealMatrix> solver(out.matrix);
    std::vector<double> eigs;
    for (Eigen::Index i = 0; i < 4; ++i) {
        if (std::abs(solver.eigenvalues()[i].imag()) > 1e-9)
            throw std::runtime_error("symmetric_matrix: complex eigenvalue");
        eigs.push_back(solver.eigenvalues()[i].real() + out.base);
    }
    std::sort(eigs.begin(), eigs.end());
    out.eigenvalues = eigs;
    out.closed_form = symmetric_closed_eigenvalues(q, n, k, gamma_abs);
    for (int i = 0; i < 4; ++i)
        out.agreement = std::max(out.agreement, std::abs(out.eigenvalues[static_cast<std::size_t>(i)] -
                                                          out.closed_form[static_cast<std::size_t>(i)]));
    return out;
}

struct MatchReport {
    std::vector<double> orphan_numeric;        // numeric eigenvalues without a catalog value
    std::vector<CatalogEntry> orphan_catalog;  // catalog values with no numeric witness
    std::size_t matched = 0;
    bool clean() const { return orphan_numeric.empty() && orphan_catalog.empty(); }
};

/// Reconciles numerically diagonalized block spectra against the catalog:
/// every numeric eigenvalue must match some catalog value within tol, and
/// every catalog value with g <= g_limit must be witnessed numerically.
inline MatchReport match_spectrum(const std::vector<double>& numeric, int n, int p, double k,
                                  int g_limit, double tol = 1e-8,
                                  FloorConvention conv = FloorConvention::Standard) {
    // Enumerate a little past the witness limit so near-boundary numeric
    // values still find their catalog partner.
    const auto entries = eigenvalues(n, p, k, g_limit + 8, conv);
    MatchReport rep;
    for (double v : numeric) {
        bool hit = false;
        for (const auto& e : entries)
            if (std::abs(e.value - v) <= tol) {
                hit = true;
                break;
            }
        if (hit)
            ++rep.matched;
        else
            rep.orphan_numeric.push_back(v);
    }
    for (const auto& e : entries) {
        if (e.g > g_limit) continue;
        bool hit = false;
        for (double v : numeric)
            if (std::abs(e.value - v) <= tol) {
                hit = true;
                break;
            }
        if (!hit) rep.orphan_catalog.push_back(e);
    }
    return rep;
}

/// Convenience: all block eigenvalues for degree p over |gamma| <= gamma_max.
inline std::vector<double> numeric_spectrum(int n, int p, double k, int gamma_max) {
    HeisenbergContext ctx(n, k, p);
    std::vector<double> out;
    for (const auto& gamma : heisenberg::enumerate_gammas(ctx, gamma_max)) {
        const auto spec = heisenberg::block_spectrum(ctx, gamma);
        out.insert(out.end(), spec.raw.begin(), spec.raw.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace hlap::catalog

#endif  // HLAP_CATALOG_HPP
