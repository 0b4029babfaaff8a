#ifndef HLAP_HEISENBERG_HPP
#define HLAP_HEISENBERG_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlap/basis.hpp"
#include "hlap/linalg.hpp"
#include "hlap/rule.hpp"

namespace hlap::heisenberg {

/// Parameters of one representation: n ladder pairs (dimension 2n+1), the
/// representation parameter k > 0, and the form degree p.
struct HeisenbergContext {
    int n = 1;
    double k = 1.0;
    int p = 0;

    HeisenbergContext() = default;
    HeisenbergContext(int n_, double k_, int p_) : n(n_), k(k_), p(p_) { validate(); }

    void validate() const {
        if (n < 1 || n > 16) throw std::invalid_argument("HeisenbergContext: n must be in 1..16");
        if (!(k > 0.0)) throw std::invalid_argument("HeisenbergContext: k must be > 0");
        if (p < 0 || p > 2 * n + 1)
            throw std::invalid_argument("HeisenbergContext: p out of range 0..2n+1");
    }
    int dim() const { return 2 * n + 1; }
};

namespace detail {
inline void check_pair_index(int j, int n) {
    if (j < 1 || j > n) throw std::out_of_range("pair index out of range: " + std::to_string(j));
}
}  // namespace detail

// Frame shorthands.  The single central direction is tau^w = cent(1).
inline LinearRule e_holo(int j) { return LinearRule::wedge(Generator::holo(j)); }
inline LinearRule e_anti(int j) { return LinearRule::wedge(Generator::anti(j)); }
inline LinearRule e_w() { return LinearRule::wedge(Generator::cent(1)); }
inline LinearRule i_holo(int j) { return LinearRule::contract(Generator::holo(j)); }
inline LinearRule i_anti(int j) { return LinearRule::contract(Generator::anti(j)); }
inline LinearRule i_w() { return LinearRule::contract(Generator::cent(1)); }

/// theta_j(k) = e(tau^j)Z_j + e(tau^jbar)Z_jbar - i e(tau^j)e(tau^jbar)i(W)
/// under Z_j -> -i sqrt(k) a_j^*, Z_jbar -> -i sqrt(k) a_j.
inline LinearRule build_theta(int j, const HeisenbergContext& ctx) {
    detail::check_pair_index(j, ctx.n);
    const Complex mi(0.0, -1.0);
    const double rk = std::sqrt(ctx.k);
    LinearRule out = (mi * rk) * (e_holo(j) * LinearRule::creation(j)) +
                     (mi * rk) * (e_anti(j) * LinearRule::annihilation(j)) +
                     mi * (e_holo(j) * e_anti(j) * i_w());
    return out.named("theta" + std::to_string(j));
}

inline LinearRule build_theta_star(int j, const HeisenbergContext& ctx) {
    return build_theta(j, ctx).adjoint().named("theta" + std::to_string(j) + "*");
}

/// d(k) = sum_j theta_j(k) + e(tau^w) W with W -> -ik.
inline LinearRule build_d(const HeisenbergContext& ctx) {
    LinearRule out = LinearRule::zero();
    for (int j = 1; j <= ctx.n; ++j) out = out + build_theta(j, ctx);
    out = out + Complex(0.0, -ctx.k) * e_w();
    return out.named("d");
}

inline LinearRule build_d_star(const HeisenbergContext& ctx) {
    return build_d(ctx).adjoint().named("d*");
}

enum class LapMode { Composed, Explicit };

/// The Laplacian on forms in the representation with parameter k.
/// Composed mode assembles d d* + d* d from the theta parts; Explicit mode
/// transcribes the closed formula term by term.  The two agree exactly on
/// every block, which is the Appendix-A consistency check.
inline LinearRule build_laplacian(const HeisenbergContext& ctx, LapMode mode = LapMode::Explicit) {
    if (mode == LapMode::Composed) {
        LinearRule d = build_d(ctx);
        LinearRule ds = d.adjoint();
        return (d * ds + ds * d).named("lap_composed");
    }
    const double k = ctx.k;
    const double rk = std::sqrt(k);
    LinearRule out = LinearRule::scalar(k * k);
    for (int j = 1; j <= ctx.n; ++j) {
        out = out + (2.0 * k) * (LinearRule::creation(j) * LinearRule::annihilation(j));
        out = out + k * (i_holo(j) * e_holo(j));
        out = out + k * (e_anti(j) * i_anti(j));
        out = out + rk * (e_w() * (i_anti(j) * LinearRule::creation(j) -
                                   i_holo(j) * LinearRule::annihilation(j)));
        out = out + rk * (i_w() * (e_holo(j) * LinearRule::creation(j) -
                                   e_anti(j) * LinearRule::annihilation(j)));
        for (int l = 1; l <= ctx.n; ++l) {
            if (l == j) continue;
            out = out + e_holo(j) * e_anti(j) * i_anti(l) * i_holo(l);
        }
        out = out + e_holo(j) * i_holo(j) * e_anti(j) * i_anti(j) * i_w() * e_w();
        out = out + i_holo(j) * e_holo(j) * i_anti(j) * e_anti(j) * e_w() * i_w();
    }
    return out.named("lap_explicit");
}

/// U_jj = a_j^* a_j - e(tau^j)i(Z_j) + e(tau^jbar)i(Z_jbar).
inline LinearRule build_Ujj(int j, const HeisenbergContext& ctx) {
    detail::check_pair_index(j, ctx.n);
    return (LinearRule::creation(j) * LinearRule::annihilation(j) - e_holo(j) * i_holo(j) +
            e_anti(j) * i_anti(j))
        .named("U" + std::to_string(j) + std::to_string(j));
}

/// U_ij = a_i^* a_j - e(tau^j)i(Z_i) + e(tau^ibar)i(Z_jbar), i != j.
inline LinearRule build_Uij(int i, int j, const HeisenbergContext& ctx) {
    detail::check_pair_index(i, ctx.n);
    detail::check_pair_index(j, ctx.n);
    if (i == j) throw std::invalid_argument("build_Uij: indices must differ");
    return (LinearRule::creation(i) * LinearRule::annihilation(j) - e_holo(j) * i_holo(i) +
            e_anti(i) * i_anti(j))
        .named("U" + std::to_string(i) + std::to_string(j));
}

/// chi_ij swaps the i-th and j-th complex directions, states and forms alike.
inline LinearRule build_chi(int i, int j, const HeisenbergContext& ctx) {
    detail::check_pair_index(i, ctx.n);
    detail::check_pair_index(j, ctx.n);
    return LinearRule::swap_pair(i, j);
}

/// The finite simultaneous U_jj-eigenspace V^{p,n,gamma}.
struct Block {
    HeisenbergContext ctx;
    MultiIndex gamma;
    std::vector<BasisElement> basis;

    int dim() const { return static_cast<int>(basis.size()); }
};

/// All basis elements psi_{gamma+I-J} tau^I tau^Jbar (tau^w) with
/// |I|+|J|+w = p and beta = gamma+I-J >= 0, ordered lexicographically on
/// (w, I, J).
inline Block enumerate_block(const HeisenbergContext& ctx, const MultiIndex& gamma) {
    if (static_cast<int>(gamma.size()) != ctx.n)
        throw std::invalid_argument("enumerate_block: gamma length must equal n");
    int minus_ones = 0;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        if (gamma[i] < -1) throw std::invalid_argument("enumerate_block: gamma entries must be >= -1");
        if (gamma[i] == -1) ++minus_ones;
    }
    if (minus_ones > ctx.p)
        throw std::invalid_argument("enumerate_block: more than p entries of gamma equal -1");

    Block block{ctx, gamma, {}};
    const std::uint32_t full = (1u << ctx.n) - 1u;
    for (int w = 0; w <= 1; ++w) {
        if (w > ctx.p) continue;
        for (std::uint32_t imask = 0; imask <= full; ++imask) {
            const int icount = std::popcount(imask);
            if (icount + w > ctx.p) continue;
            for (std::uint32_t jmask = 0; jmask <= full; ++jmask) {
                if (icount + std::popcount(jmask) + w != ctx.p) continue;
                MultiIndex beta(gamma);
                bool ok = true;
                for (int b = 0; b < ctx.n && ok; ++b) {
                    beta[b] += static_cast<int>((imask >> b) & 1u) -
                               static_cast<int>((jmask >> b) & 1u);
                    ok = beta[b] >= 0;
                }
                if (!ok) continue;
                block.basis.emplace_back(beta,
                                         FormWord(imask, jmask, static_cast<std::uint32_t>(w)));
            }
        }
    }
    if (block.basis.empty())
        throw std::domain_error("empty block: no admissible basis element for gamma=" +
                                gamma.str() + ", p=" + std::to_string(ctx.p));
    return block;
}

/// Compress the Laplacian onto a block (the leakage guard machine-checks the
/// invariance theorem) and diagonalize.
inline SpectrumResult block_spectrum(const HeisenbergContext& ctx, const MultiIndex& gamma,
                                     LapMode mode = LapMode::Explicit, double group_tol = 1e-8) {
    const Block block = enumerate_block(ctx, gamma);
    const Matrix m = matrix_of(build_laplacian(ctx, mode), block.basis, block.basis);
    SpectrumResult out = hermitian_spectrum(m, group_tol);
    out.block = gamma;
    return out;
}

/// All admissible non-empty blocks with gamma entries >= -1 and
/// sum(gamma) <= gamma_total_max.
inline std::vector<MultiIndex> enumerate_gammas(const HeisenbergContext& ctx,
                                                int gamma_total_max) {
    std::vector<MultiIndex> out;
    MultiIndex gamma(static_cast<std::size_t>(ctx.n));
    std::function<void(int, int, int)> rec = [&](int pos, int sum, int minus) {
        if (pos == ctx.n) {
            if (minus <= ctx.p) {
                // Non-empty iff some (I, J, w) fits; probe cheaply.
                try {
                    enumerate_block(ctx, gamma);
                    out.push_back(gamma);
                } catch (const std::domain_error&) {
                }
            }
            return;
        }
        for (int v = -1; sum + v <= gamma_total_max; ++v) {
            gamma[pos] = v;
            rec(pos + 1, sum + v, minus + (v == -1 ? 1 : 0));
        }
    };
    rec(0, 0, 0);
    return out;
}

struct EquivalenceReport {
    bool equal = false;
    double max_delta = 0.0;
    std::vector<double> lhs;
    std::vector<double> rhs;
};

/// Compares the eigenvalue multisets of two blocks required to be spectrally
/// equivalent: gamma2 a permutation of gamma, or gamma + e_i - e_j with
/// gamma_i >= 1 and gamma_j >= 2.
inline EquivalenceReport spectral_equivalence_check(const HeisenbergContext& ctx,
                                                    const MultiIndex& gamma,
                                                    const MultiIndex& gamma2,
                                                    double tol = 1e-8) {
    std::vector<int> a = gamma.entries(), b = gamma2.entries();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
        // Allowed only when gamma2 = gamma + e_i - e_j with the lemma's
        // hypotheses; anything else is a precondition violation.
        int raised = -1, lowered = -1;
        for (std::size_t t = 0; t < gamma.size(); ++t) {
            const int d = gamma2[t] - gamma[t];
            if (d == 0) continue;
            if (d == 1 && raised < 0)
                raised = static_cast<int>(t);
            else if (d == -1 && lowered < 0)
                lowered = static_cast<int>(t);
            else
                throw std::invalid_argument(
                    "spectral_equivalence_check: gamma2 must be a permutation or gamma+e_i-e_j");
        }
        if (raised < 0 || lowered < 0)
            throw std::invalid_argument(
                "spectral_equivalence_check: gamma2 must be a permutation or gamma+e_i-e_j");
        if (gamma[static_cast<std::size_t>(raised)] < 1 ||
            gamma[static_cast<std::size_t>(lowered)] < 2)
            throw std::invalid_argument(
                "spectral_equivalence_check: requires gamma_i >= 1 and gamma_j >= 2");
    }

    EquivalenceReport rep;
    rep.lhs = block_spectrum(ctx, gamma).raw;
    rep.rhs = block_spectrum(ctx, gamma2).raw;
    if (rep.lhs.size() != rep.rhs.size()) {
        rep.equal = false;
        rep.max_delta = std::numeric_limits<double>::infinity();
        return rep;
    }
    for (std::size_t i = 0; i < rep.lhs.size(); ++i)
        rep.max_delta = std::max(rep.max_delta, std::abs(rep.lhs[i] - rep.rhs[i]));
    rep.equal = rep.max_delta <= tol;
    return rep;
}

/// Smallest singular value of U_12 restricted to a block; the kernel lemma
/// predicts positivity whenever gamma_2 >= 2.
inline double kernel_lemma_check(const HeisenbergContext& ctx, const MultiIndex& gamma) {
    if (ctx.n < 2) throw std::invalid_argument("kernel_lemma_check: requires n >= 2");
    const Block dom = enumerate_block(ctx, gamma);
    MultiIndex target(gamma);
    target[0] += 1;
    target[1] -= 1;
    const Block cod = enumerate_block(ctx, target);  // throws on empty target
    const Matrix m = matrix_of(build_Uij(1, 2, ctx), dom.basis, cod.basis);
    return smallest_singular_value(m);
}

/// Eigenvalues below `cutoff` aggregated over all blocks with
/// sum(gamma) <= gamma_total_max, ascending.  This is the truncation-safe
/// low-spectrum multiset used by the Hodge-pairing check.
inline std::vector<double> low_spectrum(const HeisenbergContext& ctx, int gamma_total_max,
                                        double cutoff) {
    std::vector<double> out;
    for (const auto& gamma : enumerate_gammas(ctx, gamma_total_max)) {
        const SpectrumResult spec = block_spectrum(ctx, gamma);
        for (double v : spec.raw)
            if (v < cutoff) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace hlap::heisenberg

#endif  // HLAP_HEISENBERG_HPP
