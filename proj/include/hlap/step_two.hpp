#ifndef HLAP_STEP_TWO_HPP
#define HLAP_STEP_TWO_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlap/basis.hpp"
#include "hlap/linalg.hpp"
#include "hlap/rule.hpp"

namespace hlap::nilpotent {

/// A step-2 nilpotent Lie algebra given by dimensions and structure
/// constants: [X_i, X_j] = sum_q C_q(i,j) W_q with C_q antisymmetric.
/// Brackets land in the centre by construction of the data model.
struct StepTwoAlgebra {
    int m = 0;  // dim of the complement v
    int l = 0;  // dim of the centre z
    std::vector<RealMatrix> C;  // l matrices, each m x m antisymmetric

    StepTwoAlgebra() = default;
    StepTwoAlgebra(int m_, int l_) : m(m_), l(l_) {
        if (m < 1 || l < 1) throw std::invalid_argument("StepTwoAlgebra: m, l must be >= 1");
        C.assign(static_cast<std::size_t>(l), RealMatrix::Zero(m, m));
    }

    void set_bracket(int i, int j, int q, double value) {
        check_indices(i, j, q);
        RealMatrix& cq = C[static_cast<std::size_t>(q - 1)];
        cq(i - 1, j - 1) = value;
        cq(j - 1, i - 1) = -value;
    }

    void validate() const {
        if (static_cast<int>(C.size()) != l)
            throw std::invalid_argument("StepTwoAlgebra: C must hold l matrices");
        for (const auto& cq : C) {
            if (cq.rows() != m || cq.cols() != m)
                throw std::invalid_argument("StepTwoAlgebra: C matrices must be m x m");
            if ((cq + cq.transpose()).cwiseAbs().maxCoeff() != 0.0)
                throw std::invalid_argument("StepTwoAlgebra: C matrices must be antisymmetric");
        }
    }

    /// Rows of v whose brackets vanish identically signal a degenerate centre
    /// (the declared centre is too small); reported, not fatal.
    bool has_degenerate_direction() const {
        for (int i = 0; i < m; ++i) {
            bool all_zero = true;
            for (const auto& cq : C)
                if (cq.row(i).cwiseAbs().maxCoeff() > 0.0) all_zero = false;
            if (all_zero) return true;
        }
        return false;
    }

    /// H^{2n+1}: pairs (X_j, Y_j) interleaved, [X_j, Y_j] = W.
    static StepTwoAlgebra heisenberg(int n) {
        StepTwoAlgebra a(2 * n, 1);
        for (int j = 1; j <= n; ++j) a.set_bracket(2 * j - 1, 2 * j, 1, 1.0);
        return a;
    }

    /// D^{4n+2}: blocks of four with two central directions.
    static StepTwoAlgebra double_heisenberg(int n) {
        StepTwoAlgebra a(4 * n, 2);
        for (int b = 0; b < n; ++b) {
            const int o = 4 * b;
            a.set_bracket(o + 1, o + 3, 1, 1.0);
            a.set_bracket(o + 1, o + 4, 2, 1.0);
            a.set_bracket(o + 2, o + 3, 2, 1.0);
            a.set_bracket(o + 2, o + 4, 1, -1.0);
        }
        return a;
    }

private:
    void check_indices(int i, int j, int q) const {
        if (i < 1 || i > m || j < 1 || j > m || i == j)
            throw std::out_of_range("StepTwoAlgebra: bracket indices out of range");
        if (q < 1 || q > l) throw std::out_of_range("StepTwoAlgebra: centre index out of range");
    }
};

/// An element of the dual of the centre, in the orthonormal basis W_q.
struct CentralFunctional {
    std::vector<double> lambda;

    CentralFunctional() = default;
    CentralFunctional(std::initializer_list<double> init) : lambda(init) {}
    explicit CentralFunctional(std::vector<double> v) : lambda(std::move(v)) {}

    int size() const { return static_cast<int>(lambda.size()); }
    double operator[](int q) const { return lambda[static_cast<std::size_t>(q)]; }
    double norm() const {
        double s = 0;
        for (double v : lambda) s += v * v;
        return std::sqrt(s);
    }
    void require_nonzero() const {
        if (!(norm() > 0.0)) throw std::invalid_argument("CentralFunctional: |lambda| must be > 0");
    }
};

/// J(W)_{ij} = sum_q W_q C_{ij}^q, skew-symmetric and linear in W.  With this
/// index convention the defining identity reads <J(W)X, Y> = <W, [X, Y]> for
/// the row action X -> X^T J(W); the matrix of the column action is its
/// transpose.
inline RealMatrix j_map(const StepTwoAlgebra& algebra, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != algebra.l)
        throw std::invalid_argument("j_map: W must have l components");
    RealMatrix out = RealMatrix::Zero(algebra.m, algebra.m);
    for (int q = 0; q < algebra.l; ++q) out += w[static_cast<std::size_t>(q)] * algebra.C[static_cast<std::size_t>(q)];
    return out;
}

/// The bracket form b_lambda(X, Y) = lambda([X, Y]) as a matrix on v.
inline RealMatrix bracket_form(const StepTwoAlgebra& algebra, const CentralFunctional& lambda) {
    return j_map(algebra, lambda.lambda);
}

struct HTypeReport {
    bool is_htype = false;
    double max_deviation = 0.0;
};

/// Checks J(W)^2 = -|W|^2 Id on every basis W_q and on random unit W, plus
/// the polarization identity <J(W)X, J(W')X> = <W,W'>|X|^2.
inline HTypeReport is_htype(const StepTwoAlgebra& algebra, int samples = 32,
                            unsigned seed = 7u) {
    algebra.validate();
    std::mt19937 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    HTypeReport rep;

    auto check_w = [&](const std::vector<double>& w, double wnorm2) {
        const RealMatrix j = j_map(algebra, w);
        const RealMatrix dev = j * j + wnorm2 * RealMatrix::Identity(algebra.m, algebra.m);
        rep.max_deviation = std::max(rep.max_deviation, dev.cwiseAbs().maxCoeff());
    };

    for (int q = 0; q < algebra.l; ++q) {
        std::vector<double> w(static_cast<std::size_t>(algebra.l), 0.0);
        w[static_cast<std::size_t>(q)] = 1.0;
        check_w(w, 1.0);
    }
    for (int s = 0; s < samples; ++s) {
        std::vector<double> w(static_cast<std::size_t>(algebra.l));
        double n2 = 0;
        for (auto& v : w) {
            v = gauss(gen);
            n2 += v * v;
        }
        if (n2 == 0.0) continue;
        for (auto& v : w) v /= std::sqrt(n2);
        check_w(w, 1.0);

        // polarization: <J(W)X, J(W')X> = <W, W'> |X|^2 with the row action
        std::vector<double> w2(static_cast<std::size_t>(algebra.l));
        for (auto& v : w2) v = gauss(gen);
        RealVector x(algebra.m);
        for (int i = 0; i < algebra.m; ++i) x[i] = gauss(gen);
        const RealMatrix ja = j_map(algebra, w), jb = j_map(algebra, w2);
        double ww = 0;
        for (int q = 0; q < algebra.l; ++q) ww += w[static_cast<std::size_t>(q)] * w2[static_cast<std::size_t>(q)];
        const double lhs = (ja.transpose() * x).dot(jb.transpose() * x);
        rep.max_deviation =
            std::max(rep.max_deviation, std::abs(lhs - ww * x.squaredNorm()));
    }
    rep.is_htype = rep.max_deviation < 1e-10;
    return rep;
}

/// Darboux basis for (v, b_lambda): real pairs (X_j, Y_j), orthonormal, with
/// lambda([X_j, X_k]) = 0 = lambda([Y_j, Y_k]) and
/// lambda([X_j, Y_k]) = delta_jk |lambda|.
struct SymplecticFrame {
    std::vector<RealVector> X, Y;
    int pairs() const { return static_cast<int>(X.size()); }

    /// Z_j = (X_j - i Y_j)/sqrt(2) as coordinate vectors in v (x) C.
    Eigen::VectorXcd z(int j) const {
        return (X[static_cast<std::size_t>(j)].cast<Complex>() -
                Complex(0, 1) * Y[static_cast<std::size_t>(j)].cast<Complex>()) /
               std::sqrt(2.0);
    }
    Eigen::VectorXcd zbar(int j) const { return z(j).conjugate(); }
};

/// Deterministic Darboux construction: take the first standard basis vector
/// with residual norm > 1e-8 after projecting out the chosen pairs, then pair
/// it through the bracket form.  For H-type algebras the partner is
/// automatically unit and orthogonal; anything else is reported as a
/// degeneracy with the offending vector.
inline SymplecticFrame symplectic_frame(const StepTwoAlgebra& algebra,
                                        const CentralFunctional& lambda) {
    algebra.validate();
    lambda.require_nonzero();
    if (algebra.m % 2 != 0)
        throw std::invalid_argument("symplectic_frame: odd-dimensional complement");
    if (static_cast<int>(lambda.lambda.size()) != algebra.l)
        throw std::invalid_argument("symplectic_frame: lambda must have l components");

    const RealMatrix b = bracket_form(algebra, lambda);
    const double lnorm = lambda.norm();
    SymplecticFrame frame;

    auto project_out = [&](RealVector v) {
        for (std::size_t i = 0; i < frame.X.size(); ++i) {
            v -= v.dot(frame.X[i]) * frame.X[i];
            v -= v.dot(frame.Y[i]) * frame.Y[i];
        }
        return v;
    };

    for (int cand = 0; cand < algebra.m && frame.pairs() < algebra.m / 2; ++cand) {
        RealVector r = project_out(RealVector::Unit(algebra.m, cand));
        const double rn = r.norm();
        if (rn <= 1e-8) continue;
        r /= rn;
        // Partner through the bracket form; for H-type b(x, y) = |lambda|.
        RealVector y = b.transpose() * r / lnorm;
        y = project_out(y);
        const double pair_strength = r.dot(b * y);
        if (y.norm() < 1e-8 || std::abs(pair_strength) < 1e-8 * lnorm) {
            std::ostringstream os;
            os << "symplectic_frame: bracket form degenerate at direction (";
            for (int i = 0; i < algebra.m; ++i) os << (i ? "," : "") << r[i];
            os << ") - input is not H-type";
            throw std::runtime_error(os.str());
        }
        frame.X.push_back(r);
        frame.Y.push_back(y / y.norm());
    }
    if (frame.pairs() != algebra.m / 2)
        throw std::runtime_error("symplectic_frame: could not complete the frame");

    // Validate the frame contract.
    for (int i = 0; i < frame.pairs(); ++i)
        for (int j = 0; j < frame.pairs(); ++j) {
            const double bxx = frame.X[static_cast<std::size_t>(i)].dot(b * frame.X[static_cast<std::size_t>(j)]);
            const double byy = frame.Y[static_cast<std::size_t>(i)].dot(b * frame.Y[static_cast<std::size_t>(j)]);
            const double bxy = frame.X[static_cast<std::size_t>(i)].dot(b * frame.Y[static_cast<std::size_t>(j)]);
            const double target = (i == j) ? lnorm : 0.0;
            if (std::abs(bxx) > 1e-10 * lnorm || std::abs(byy) > 1e-10 * lnorm ||
                std::abs(bxy - target) > 1e-10 * lnorm)
                throw std::runtime_error("symplectic_frame: frame invariants violated (non-H-type input?)");
        }
    return frame;
}

/// |Pf(lambda)| via the Parlett-Reid tridiagonalization of the bracket form.
inline double pfaffian(const StepTwoAlgebra& algebra, const CentralFunctional& lambda) {
    RealMatrix a = bracket_form(algebra, lambda);
    const int n = static_cast<int>(a.rows());
    if (n % 2 == 1) throw std::invalid_argument("pfaffian: odd effective dimension");
    if (n == 0) return 1.0;

    double result = 1.0;
    for (int k = 0; k + 1 < n; k += 2) {
        // pivot: largest |a(i, k)| for i > k
        int kp = k + 1;
        for (int i = k + 2; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(kp, k))) kp = i;
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            result = -result;
        }
        const double pivot = a(k + 1, k);
        if (pivot == 0.0) return 0.0;
        result *= -pivot;  // a(k, k+1) = -a(k+1, k)
        if (k + 2 < n) {
            RealVector tau = a.col(k).segment(k + 2, n - k - 2) / pivot;
            // a := a + tau w^T - w tau^T with w = a col (k+1)
            RealVector w = a.col(k + 1).segment(k + 2, n - k - 2);
            auto block = a.block(k + 2, k + 2, n - k - 2, n - k - 2);
            block += tau * w.transpose() - w * tau.transpose();
        }
    }
    return std::abs(result);
}

/// Complex structure constants in a symplectic frame: for frame fields
/// E_a (a = 1..2n': Z's then Zbar's), Cc[q](a,b) is the W_q component of
/// [E_a, E_b], extended bilinearly from the real tensor.
inline std::vector<Matrix> frame_structure_constants(const StepTwoAlgebra& algebra,
                                                     const SymplecticFrame& frame) {
    const int np = frame.pairs();
    std::vector<Eigen::VectorXcd> fields;
    for (int j = 0; j < np; ++j) fields.push_back(frame.z(j));
    for (int j = 0; j < np; ++j) fields.push_back(frame.zbar(j));

    std::vector<Matrix> out;
    for (int q = 0; q < algebra.l; ++q) {
        Matrix cq(2 * np, 2 * np);
        const Matrix creal = algebra.C[static_cast<std::size_t>(q)].cast<Complex>();
        for (int a = 0; a < 2 * np; ++a)
            for (int b = 0; b < 2 * np; ++b) cq(a, b) = fields[static_cast<std::size_t>(a)].transpose() * creal * fields[static_cast<std::size_t>(b)];
        out.push_back(std::move(cq));
    }
    return out;
}

/// d(lambda) over the generalized anti-Fock ladder model: frame fields map to
/// ladder operators (Z_j -> -i sqrt|l| a_j^*, Zbar_j -> -i sqrt|l| a_j),
/// central fields to -i lambda_q, and the algebraic part carries the frame
/// structure constants:
///   d = sum_a e(tau^a) pi(E_a) + sum_q e(tau^{w_q})(-i lambda_q)
///       - sum_q sum_{a<b} Cc[q](a,b) e(tau^a) e(tau^b) i(W_q).
inline LinearRule build_d(const StepTwoAlgebra& algebra, const CentralFunctional& lambda,
                          const SymplecticFrame& frame) {
    const int np = frame.pairs();
    const double rl = std::sqrt(lambda.norm());
    const Complex mi(0.0, -1.0);
    const auto cc = frame_structure_constants(algebra, frame);

    auto gen_of = [np](int a) {
        return (a < np) ? Generator::holo(a + 1) : Generator::anti(a - np + 1);
    };
    auto ladder_of = [np](int a) {
        return (a < np) ? LinearRule::creation(a + 1) : LinearRule::annihilation(a - np + 1);
    };

    LinearRule out = LinearRule::zero();
    for (int a = 0; a < 2 * np; ++a)
        out = out + (mi * rl) * (LinearRule::wedge(gen_of(a)) * ladder_of(a));
    for (int q = 0; q < algebra.l; ++q)
        out = out + (mi * lambda[q]) * LinearRule::wedge(Generator::cent(q + 1));
    for (int q = 0; q < algebra.l; ++q)
        for (int a = 0; a < 2 * np; ++a)
            for (int b = a + 1; b < 2 * np; ++b) {
                const Complex c = cc[static_cast<std::size_t>(q)](a, b);
                if (std::abs(c) < 1e-15) continue;
                out = out + (-c) * (LinearRule::wedge(gen_of(a)) * LinearRule::wedge(gen_of(b)) *
                                    LinearRule::contract(Generator::cent(q + 1)));
            }
    return out.named("d_step2");
}

/// The Laplacian d d* + d* d for degree 0 or 1 forms on an H-type algebra.
/// On 0-forms the result is diagonal: psi_beta -> (|l|(2|beta|+n')+|l|^2).
inline LinearRule build_lap(const StepTwoAlgebra& algebra, const CentralFunctional& lambda,
                            int degree) {
    if (degree < 0 || degree > 1)
        throw std::invalid_argument(
            "build_lap: only degrees 0 and 1 are supported for generic step-2 algebras");
    lambda.require_nonzero();
    const SymplecticFrame frame = symplectic_frame(algebra, lambda);
    LinearRule d = build_d(algebra, lambda, frame);
    LinearRule ds = d.adjoint();
    return (d * ds + ds * d).named("lap_step2_deg" + std::to_string(degree));
}

/// The Lemma-style invariant triple {v1, v2, v3} at beta for degree-1 forms:
/// v1 = sum_j sqrt(beta_j+1) psi_{beta+e_j} tau^j,
/// v2 = sum_j sqrt(beta_j) psi_{beta-e_j} tau^jbar,
/// v3 = sum_q lambda_q psi_beta tau^{w_q}.
/// At beta = 0 the middle vector vanishes and is dropped (the subspace is
/// then two-dimensional).
inline std::vector<SparseVector> invariant_triple(const CentralFunctional& lambda, int pairs,
                                                  const MultiIndex& beta) {
    std::vector<SparseVector> out(3);
    const BasisElement seed(beta, FormWord());
    for (int j = 1; j <= pairs; ++j) {
        out[0] += (LinearRule::wedge(Generator::holo(j)) * LinearRule::creation(j)).apply(seed);
        out[1] +=
            (LinearRule::wedge(Generator::anti(j)) * LinearRule::annihilation(j)).apply(seed);
    }
    for (int q = 0; q < lambda.size(); ++q)
        out[2].add(BasisElement(beta, FormWord(0, 0, 1u << q)), lambda[q]);
    std::erase_if(out, [](const SparseVector& v) { return v.empty(); });
    return out;
}

struct LowerBoundReport {
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double bound = 0.0;
    bool holds() const { return min_eigenvalue >= bound - 1e-9; }
};

/// Min over computed spectra vs |lambda|^2.  Degree 0 sweeps the diagonal
/// action over |beta| <= beta_max; degree 1 compresses onto the invariant
/// triples over the same range.
inline LowerBoundReport lower_bound_check(const StepTwoAlgebra& algebra,
                                          const CentralFunctional& lambda, int degree,
                                          int beta_max) {
    LowerBoundReport rep;
    rep.bound = lambda.norm() * lambda.norm();
    const int np = algebra.m / 2;
    LinearRule lap = build_lap(algebra, lambda, degree);

    std::vector<MultiIndex> betas;
    MultiIndex beta(static_cast<std::size_t>(np));
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == np) {
            betas.push_back(beta);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            beta[pos] = v;
            rec(pos + 1, remaining - v);
        }
    };
    rec(0, beta_max);

    for (const auto& b : betas) {
        if (degree == 0) {
            const BasisElement x(b, FormWord());
            SparseVector y = lap.apply(x);
            const Complex diag = y.coeff(x);
            if ((y - SparseVector(x, diag)).norm() > 1e-9 * (1.0 + std::abs(diag)))
                throw std::runtime_error("lower_bound_check: Laplacian not diagonal on 0-forms");
            rep.min_eigenvalue = std::min(rep.min_eigenvalue, diag.real());
        } else {
            auto triple = invariant_triple(lambda, np, b);
            const Compression comp = compress_onto(lap, triple);
            Eigen::ComplexEigenSolver<Matrix> solver(comp.matrix);
            for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
                rep.min_eigenvalue =
                    std::min(rep.min_eigenvalue, solver.eigenvalues()[i].real());
        }
    }
    return rep;
}

}  // namespace hlap::nilpotent

#endif  // HLAP_STEP_TWO_HPP
