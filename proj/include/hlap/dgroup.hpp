#ifndef HLAP_DGROUP_HPP
#define HLAP_DGROUP_HPP

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "hlap/linalg.hpp"
#include "hlap/step_two.hpp"

namespace hlap::dgroup {

using nilpotent::CentralFunctional;
using nilpotent::StepTwoAlgebra;
using nilpotent::SymplecticFrame;

/// The double Heisenberg group D^{4n+2}: 2n ladder pairs, two central
/// directions, lambda a nonzero functional on the centre.
struct DGroupContext {
    int n = 1;
    CentralFunctional lambda;

    DGroupContext(int n_, CentralFunctional lambda_) : n(n_), lambda(std::move(lambda_)) {
        if (n < 1) throw std::invalid_argument("DGroupContext: n must be >= 1");
        if (lambda.size() != 2)
            throw std::invalid_argument("DGroupContext: lambda must have 2 components");
        lambda.require_nonzero();
    }

    int pairs() const { return 2 * n; }
    StepTwoAlgebra algebra() const { return StepTwoAlgebra::double_heisenberg(n); }
};

/// The explicit frame of the paper, replicated across the n blocks of four:
///   Z_{2b+1} = (i l1 X_{o+1} + i l2 X_{o+2} + |l| X_{o+3}) / (sqrt(2)|l|),
///   Z_{2b+2} = (i l2 X_{o+1} - i l1 X_{o+2} + |l| X_{o+4}) / (sqrt(2)|l|),
/// with Z_jbar the conjugates.  Stored as real pairs X_j = sqrt2 Re Z_j,
/// Y_j = -sqrt2 Im Z_j.
inline SymplecticFrame frame(const DGroupContext& ctx) {
    const double L = ctx.lambda.norm();
    SymplecticFrame f;
    for (int b = 0; b < ctx.n; ++b) {
        const int o = 4 * b;
        RealVector x1 = RealVector::Zero(4 * ctx.n), y1 = RealVector::Zero(4 * ctx.n);
        x1[o + 2] = 1.0;
        y1[o + 0] = -ctx.lambda[0] / L;
        y1[o + 1] = -ctx.lambda[1] / L;
        f.X.push_back(x1);
        f.Y.push_back(y1);

        RealVector x2 = RealVector::Zero(4 * ctx.n), y2 = RealVector::Zero(4 * ctx.n);
        x2[o + 3] = 1.0;
        y2[o + 0] = -ctx.lambda[1] / L;
        y2[o + 1] = ctx.lambda[0] / L;
        f.X.push_back(x2);
        f.Y.push_back(y2);
    }

    // Commutation targets: pi([Z_j, Z_jbar]) = |l|, pi([Z_1, Z_2]) = 0.
    const auto cc = nilpotent::frame_structure_constants(ctx.algebra(), f);
    auto pairing = [&](int a, int b) {
        Complex out = 0.0;
        for (int q = 0; q < 2; ++q) out += Complex(0, -1) * ctx.lambda[q] * cc[static_cast<std::size_t>(q)](a, b);
        return out;
    };
    const int np = ctx.pairs();
    for (int j = 0; j < np; ++j) {
        if (std::abs(pairing(j, np + j) - Complex(L)) > 1e-10 * L)
            throw std::runtime_error("dgroup::frame: [Z_j, Z_jbar] target violated");
        for (int l2 = 0; l2 < np; ++l2)
            if (l2 != j && std::abs(pairing(j, l2)) > 1e-10 * L)
                throw std::runtime_error("dgroup::frame: [Z_j, Z_l] should be lambda-null");
    }
    return f;
}

/// Delta_1(lambda) assembled over the explicit frame (so the tau-generators
/// match the paper's displayed eigenvectors).
inline LinearRule build_lap1(const DGroupContext& ctx) {
    const auto f = frame(ctx);
    LinearRule d = nilpotent::build_d(ctx.algebra(), ctx.lambda, f);
    LinearRule ds = d.adjoint();
    return (d * ds + ds * d).named("lap_D_deg1");
}

enum class Family { U, V, W, Wprime };

/// The paper's four 1-form families at beta (length 2n).  Vanishing vectors
/// (u, w' when beta_{2j-1} + beta_{2j} = 0) come back empty.
inline SparseVector paper_vector(const DGroupContext& ctx, const MultiIndex& beta, Family family,
                                 int j) {
    if (j < 1 || j > ctx.n) throw std::out_of_range("paper_vector: j out of range");
    if (static_cast<int>(beta.size()) != ctx.pairs())
        throw std::invalid_argument("paper_vector: beta must have 2n entries");
    const BasisElement seed(beta, FormWord());
    const int a = 2 * j - 1, b = 2 * j;
    using LR = LinearRule;
    switch (family) {
        case Family::U:
            return (LR::wedge(Generator::holo(a)) * LR::annihilation(b) -
                    LR::wedge(Generator::holo(b)) * LR::annihilation(a))
                .apply(seed);
        case Family::V:
            return (LR::wedge(Generator::anti(a)) * LR::creation(b) -
                    LR::wedge(Generator::anti(b)) * LR::creation(a))
                .apply(seed);
        case Family::W:
            return (LR::wedge(Generator::holo(a)) * LR::creation(a) +
                    LR::wedge(Generator::holo(b)) * LR::creation(b))
                .apply(seed);
        case Family::Wprime:
            return (LR::wedge(Generator::anti(a)) * LR::annihilation(a) +
                    LR::wedge(Generator::anti(b)) * LR::annihilation(b))
                .apply(seed);
    }
    throw std::logic_error("paper_vector: unreachable");
}

struct FamilyCheck {
    Family family;
    int j;
    double target;
    double residual;  // ||Delta v - target v|| / ||v||
};

struct FamilyCheckReport {
    double mu_prime = 0.0;
    std::vector<FamilyCheck> checks;
    double max_residual = 0.0;
};

/// For j = 1..n-1 forms the cross-pair combinations
///   s(j+1) f_j - s(j) f_{j+1}
/// and verifies they are eigenvectors with eigenvalues mu' -+ 3|l|, mu' +- |l|.
/// For the annihilation families (u, w') the weight is the pair sum
/// s(j) = beta_{2j-1} + beta_{2j}; for the creation families (v, w) it is
/// s(j) + 2, one shift per mode.  The two agree exactly when all pair sums
/// are equal, which is where the displayed uniform weights come from.
inline FamilyCheckReport family_eigencheck(const DGroupContext& ctx, const MultiIndex& beta) {
    for (std::size_t i = 0; i < beta.size(); ++i)
        if (beta[i] < 1) throw std::invalid_argument("family_eigencheck: all beta entries must be >= 1");
    if (static_cast<int>(beta.size()) != ctx.pairs())
        throw std::invalid_argument("family_eigencheck: beta must have 2n entries");

    const double L = ctx.lambda.norm();
    FamilyCheckReport rep;
    rep.mu_prime = L * (2 * ctx.n + 2 * beta.total()) + L * L;
    if (ctx.n < 2) return rep;  // multiplicity n-1 = 0: no family vectors
    LinearRule lap = build_lap1(ctx);

    const std::map<Family, double> offsets = {{Family::U, -3 * L},
                                              {Family::V, +3 * L},
                                              {Family::W, +L},
                                              {Family::Wprime, -L}};
    auto pair_sum = [&](int j) { return double(beta[2 * j - 2] + beta[2 * j - 1]); };
    for (const auto& [family, offset] : offsets) {
        const double shift = (family == Family::V || family == Family::W) ? 2.0 : 0.0;
        for (int j = 1; j < ctx.n; ++j) {
            const double c1 = pair_sum(j + 1) + shift;
            const double c2 = pair_sum(j) + shift;
            SparseVector v = c1 * paper_vector(ctx, beta, family, j) -
                             c2 * paper_vector(ctx, beta, family, j + 1);
            if (v.empty()) continue;
            const double target = rep.mu_prime + offset;
            const double res = (lap.apply(v) - target * v).norm() / v.norm();
            rep.checks.push_back({family, j, target, res});
            rep.max_residual = std::max(rep.max_residual, res);
        }
    }
    return rep;
}

enum class Subspace { First, Second };

struct Invariant3x3 {
    std::vector<SparseVector> basis;  // possibly reduced when vectors vanish
    Matrix compressed;                // in the paper's (un-normalized) basis
    double leak = 0.0;
    double shift = 0.0;               // 2|l|(n+|beta|) + |l|^2
    std::vector<double> eigenvalues;  // of the compression, ascending
};

/// The two displayed invariant subspaces:
///   first:  { sum u_j, sum v_j, l2 tau^{w1} - l1 tau^{w2} }
///   second: { sum w_j, sum w'_j, l1 tau^{w1} + l2 tau^{w2} }
/// Vanishing members (beta = 0 cases) are dropped with the reduction
/// reported via the basis size.
inline Invariant3x3 invariant_3x3(const DGroupContext& ctx, const MultiIndex& beta,
                                  Subspace which) {
    const double L = ctx.lambda.norm();
    Invariant3x3 out;
    out.shift = 2 * L * (ctx.n + beta.total()) + L * L;

    SparseVector sum1, sum2, cent;
    for (int j = 1; j <= ctx.n; ++j) {
        sum1 += paper_vector(ctx, beta, which == Subspace::First ? Family::U : Family::W, j);
        sum2 += paper_vector(ctx, beta, which == Subspace::First ? Family::V : Family::Wprime, j);
    }
    if (which == Subspace::First) {
        cent.add(BasisElement(beta, FormWord(0, 0, 0b01)), ctx.lambda[1]);
        cent.add(BasisElement(beta, FormWord(0, 0, 0b10)), -ctx.lambda[0]);
    } else {
        cent.add(BasisElement(beta, FormWord(0, 0, 0b01)), ctx.lambda[0]);
        cent.add(BasisElement(beta, FormWord(0, 0, 0b10)), ctx.lambda[1]);
    }
    for (auto* v : {&sum1, &sum2, &cent})
        if (!v->empty()) out.basis.push_back(*v);

    const Compression comp = compress_onto(build_lap1(ctx), out.basis);
    out.compressed = comp.matrix;
    out.leak = comp.leak;

    Eigen::ComplexEigenSolver<Matrix> solver(out.compressed);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        if (std::abs(solver.eigenvalues()[i].imag()) > 1e-8 * (1 + L * L))
            throw std::runtime_error("invariant_3x3: complex eigenvalue in compression");
        out.eigenvalues.push_back(solver.eigenvalues()[i].real());
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

/// Closed-form eigenvalues of the second subspace:
/// { mu'', mu'' + n +- sqrt(n^2 + mu'') }, mu'' = 2|l|(n+|beta|)+|l|^2.
inline std::vector<double> second_subspace_closed(const DGroupContext& ctx, int beta_total) {
    const double L = ctx.lambda.norm();
    const double mu = 2 * L * (ctx.n + beta_total) + L * L;
    std::vector<double> out = {mu, mu + ctx.n - std::sqrt(double(ctx.n) * ctx.n + mu),
                               mu + ctx.n + std::sqrt(double(ctx.n) * ctx.n + mu)};
    std::sort(out.begin(), out.end());
    return out;
}

/// p(mu): the characteristic polynomial (shifted by mu') of the first
/// subspace matrix.
inline double first_subspace_charpoly(int n, double lambda_norm, int beta_total, double mu) {
    const double L = lambda_norm;
    return mu * mu * mu - 2.0 * n * mu * mu - L * (2.0 * beta_total + 9.0 * L + 2.0 * n) * mu +
           12.0 * n * L * L;
}

struct CubicBounds {
    double mu_low = 0.0;
    double mu_high = 0.0;
    int b = 1;
    int n = 1;
    double p_at_low = 0.0, p_at_high = 0.0, p_at_zero = 0.0;
    bool certified = false;  // signs (-, +, +) bracketing the lowest root
};

/// mu_low(b,n) = -((b+n+sqrt((b+n)^2+24n^2))/(2n)) |l|, mu_high = -3|l|;
/// evaluates p at both and at zero and certifies the sign pattern, including
/// the identities p(mu_high) = 6 b |l|^2 and p(mu_low) = mu_low^3 - 9 mu_low |l|^2.
inline CubicBounds cubic_bounds(int b, int n, double lambda_norm) {
    if (b < 1 || n < 1 || !(lambda_norm > 0.0))
        throw std::invalid_argument("cubic_bounds: requires b, n >= 1 and |lambda| > 0");
    const double L = lambda_norm;
    CubicBounds out;
    out.b = b;
    out.n = n;
    out.mu_low = -((b + n + std::sqrt(double(b + n) * (b + n) + 24.0 * n * n)) / (2.0 * n)) * L;
    out.mu_high = -3.0 * L;
    out.p_at_low = first_subspace_charpoly(n, L, b, out.mu_low);
    out.p_at_high = first_subspace_charpoly(n, L, b, out.mu_high);
    out.p_at_zero = first_subspace_charpoly(n, L, b, 0.0);

    const double scale = std::max({std::abs(out.p_at_low), std::abs(out.p_at_high), 1.0});
    const bool identities =
        std::abs(out.p_at_high - 6.0 * b * L * L) <= 1e-12 * scale &&
        std::abs(out.p_at_low - (out.mu_low * out.mu_low * out.mu_low - 9.0 * out.mu_low * L * L)) <=
            1e-12 * scale;
    out.certified = identities && out.p_at_low < 0.0 && out.p_at_high > 0.0 && out.p_at_zero > 0.0;
    return out;
}

struct LowestBracket {
    double lower = 0.0;
    double upper = 0.0;
    double linear_coefficient = 0.0;  // of |lambda| in the lower endpoint
};

/// Bracket for the global lowest eigenvalue of Delta_1(lambda):
/// (mu_low(1,n) + 2(n+1)|l| + |l|^2, mu_high(1,n) + 2(n+1)|l| + |l|^2).
/// The lower endpoint's |l| coefficient is positive (= 3 - sqrt(7) at n=1).
inline LowestBracket lowest_bracket(int n, double lambda_norm) {
    const double L = lambda_norm;
    const CubicBounds cb = cubic_bounds(1, n, L);
    LowestBracket out;
    out.lower = cb.mu_low + 2.0 * (n + 1) * L + L * L;
    out.upper = cb.mu_high + 2.0 * (n + 1) * L + L * L;
    out.linear_coefficient = 2.0 * (n + 1) + cb.mu_low / L;
    return out;
}

struct LowSpectrum {
    std::vector<double> eigenvalues;     // distinct, ascending
    std::vector<int> multiplicities;
    int truncation = 0;
    double truncation_drift = 0.0;       // change of reported values when the
                                         // cutoff grows by 2
};

/// Global low spectrum of Delta_1(lambda) by diagonalizing the projection to
/// all degree-1 elements with |beta| <= cutoff, with the cutoff grown until
/// the values below `window` are stable.  The spectral gap above the window
/// keeps the projection error negligible; stability is reported, not assumed.
inline LowSpectrum global_low_spectrum(const DGroupContext& ctx, double window, int cutoff = 6,
                                       double group_tol = 1e-8) {
    LinearRule lap = build_lap1(ctx);
    const int np = ctx.pairs();

    auto collect = [&](int cut) {
        std::vector<BasisElement> basis;
        std::vector<int> beta(static_cast<std::size_t>(np), 0);
        std::function<void(int, int)> rec = [&](int pos, int rem) {
            if (pos == np) {
                MultiIndex b(beta);
                for (int j = 1; j <= np; ++j) {
                    basis.emplace_back(b, FormWord(1u << (j - 1), 0, 0));
                    basis.emplace_back(b, FormWord(0, 1u << (j - 1), 0));
                }
                basis.emplace_back(b, FormWord(0, 0, 0b01));
                basis.emplace_back(b, FormWord(0, 0, 0b10));
                return;
            }
            for (int v = 0; v <= rem; ++v) {
                beta[static_cast<std::size_t>(pos)] = v;
                rec(pos + 1, rem - v);
            }
        };
        rec(0, cut);

        std::map<BasisElement, Eigen::Index> idx;
        for (std::size_t i = 0; i < basis.size(); ++i) idx[basis[i]] = static_cast<Eigen::Index>(i);
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(basis.size()),
                                static_cast<Eigen::Index>(basis.size()));
        for (std::size_t j = 0; j < basis.size(); ++j) {
            SparseVector y = lap.apply(basis[j]);
            for (const auto& [b, amp] : y.terms()) {
                auto it = idx.find(b);
                if (it != idx.end()) m(it->second, static_cast<Eigen::Index>(j)) = amp;
            }
        }
        std::vector<double> low;
        for (double v : hermitian_spectrum(m, group_tol, 1e-8).raw)
            if (v <= window) low.push_back(v);
        return low;
    };

    std::vector<double> prev = collect(cutoff);
    std::vector<double> next = collect(cutoff + 2);
    double drift = 0.0;
    for (std::size_t i = 0; i < std::min(prev.size(), next.size()); ++i)
        drift = std::max(drift, std::abs(prev[i] - next[i]));

    LowSpectrum out;
    out.truncation = cutoff + 2;
    out.truncation_drift = drift;
    const double scale = std::max(1.0, std::abs(window));
    for (double v : next) {
        if (!out.eigenvalues.empty() && std::abs(v - out.eigenvalues.back()) <= group_tol * scale)
            out.multiplicities.back() += 1;
        else {
            out.eigenvalues.push_back(v);
            out.multiplicities.push_back(1);
        }
    }
    return out;
}

/// U_ij on the D-group frame, indices in 1..2n, defined as for the
/// Heisenberg group.
inline LinearRule build_Uij(int i, int j, const DGroupContext& ctx) {
    if (i < 1 || i > ctx.pairs() || j < 1 || j > ctx.pairs())
        throw std::out_of_range("dgroup::build_Uij: index out of range");
    using LR = LinearRule;
    if (i == j)
        return (LR::creation(i) * LR::annihilation(i) -
                LR::wedge(Generator::holo(i)) * LR::contract(Generator::holo(i)) +
                LR::wedge(Generator::anti(i)) * LR::contract(Generator::anti(i)));
    return (LR::creation(i) * LR::annihilation(j) -
            LR::wedge(Generator::holo(j)) * LR::contract(Generator::holo(i)) +
            LR::wedge(Generator::anti(i)) * LR::contract(Generator::anti(j)));
}

}  // namespace hlap::dgroup

#endif  // HLAP_DGROUP_HPP
