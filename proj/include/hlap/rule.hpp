#ifndef HLAP_RULE_HPP
#define HLAP_RULE_HPP

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hlap/basis.hpp"

namespace hlap {

/// Thrown by matrix_of when an operator escapes the span of the codomain.
class LeakageError : public std::runtime_error {
public:
    LeakageError(const BasisElement& offender, Complex amp, const std::string& what)
        : std::runtime_error(what), offender_(offender), amplitude_(amp) {}
    const BasisElement& offender() const { return offender_; }
    Complex amplitude() const { return amplitude_; }

private:
    BasisElement offender_;
    Complex amplitude_;
};

/// A symbolic linear operator, stored as an expression tree over primitive
/// ladder / wedge / contraction rules.  Immutable and cheap to copy; the
/// action on a BasisElement is a finite SparseVector.  Adjoints are exact:
/// each primitive knows its adjoint and composites adjoint structurally.
class LinearRule {
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    enum class Kind : std::uint8_t {
        Zero,
        Identity,
        Create,
        Annihilate,
        Wedge,
        Contract,
        SwapPair,  // chi_ij building block: swaps complex directions i and j
        Sum,
        Compose,
        Scale,
    };

    struct Node {
        Kind kind = Kind::Zero;
        int mode = 0;    // Create/Annihilate: 1-based pair index; SwapPair: i
        int mode2 = 0;   // SwapPair: j
        Generator gen;   // Wedge/Contract
        Complex coeff;   // Scale
        std::vector<NodePtr> children;
    };

public:
    LinearRule() : node_(zero_node()) {}

    // --- primitives ---------------------------------------------------
    static LinearRule zero() { return LinearRule(zero_node(), "0"); }
    static LinearRule identity() { return LinearRule(make(Kind::Identity), "Id"); }
    /// a_j^*: psi_beta -> sqrt(beta_j + 1) psi_{beta + e_j}
    static LinearRule creation(int j) {
        require_index(j);
        auto n = make(Kind::Create);
        n->mode = j;
        return LinearRule(std::move(n), "a*" + std::to_string(j));
    }
    /// a_j: psi_beta -> sqrt(beta_j) psi_{beta - e_j}
    static LinearRule annihilation(int j) {
        require_index(j);
        auto n = make(Kind::Annihilate);
        n->mode = j;
        return LinearRule(std::move(n), "a" + std::to_string(j));
    }
    /// e(tau^g): exterior multiplication on the left.
    static LinearRule wedge(Generator g) {
        require_index(g.index);
        auto n = make(Kind::Wedge);
        n->gen = g;
        return LinearRule(std::move(n), "e(" + g.str() + ")");
    }
    /// i(V_g): contraction dual to generator g.
    static LinearRule contract(Generator g) {
        require_index(g.index);
        auto n = make(Kind::Contract);
        n->gen = g;
        return LinearRule(std::move(n), "i(" + g.str() + ")");
    }
    /// Multiplicative swap of complex directions i and j (forms and states).
    static LinearRule swap_pair(int i, int j) {
        require_index(i);
        require_index(j);
        if (i == j) throw std::invalid_argument("swap_pair: indices must differ");
        auto n = make(Kind::SwapPair);
        n->mode = i;
        n->mode2 = j;
        return LinearRule(std::move(n), "chi" + std::to_string(i) + std::to_string(j));
    }
    static LinearRule scalar(Complex c) { return identity().scaled(c); }

    // --- combinators ----------------------------------------------------
    LinearRule scaled(Complex c) const {
        if (c == 0.0) return zero();
        if (c == 1.0) return *this;
        auto n = make(Kind::Scale);
        n->coeff = c;
        n->children = {node_};
        return LinearRule(std::move(n), name_);
    }
    friend LinearRule operator*(Complex c, const LinearRule& r) { return r.scaled(c); }

    friend LinearRule operator+(const LinearRule& a, const LinearRule& b) {
        if (a.node_->kind == Kind::Zero) return b;
        if (b.node_->kind == Kind::Zero) return a;
        auto n = make(Kind::Sum);
        flatten_sum(n->children, a.node_);
        flatten_sum(n->children, b.node_);
        return LinearRule(std::move(n), a.name_ + "+" + b.name_);
    }
    friend LinearRule operator-(const LinearRule& a, const LinearRule& b) {
        return a + b.scaled(-1.0);
    }

    /// Composition: (a * b)(x) = a(b(x)).
    friend LinearRule operator*(const LinearRule& a, const LinearRule& b) {
        if (a.node_->kind == Kind::Zero || b.node_->kind == Kind::Zero) return zero();
        if (a.node_->kind == Kind::Identity) return b;
        if (b.node_->kind == Kind::Identity) return a;
        auto n = make(Kind::Compose);
        n->children = {a.node_, b.node_};
        return LinearRule(std::move(n), a.name_ + "." + b.name_);
    }

    LinearRule adjoint() const { return LinearRule(adjoint_node(node_), "adj(" + name_ + ")"); }

    static LinearRule commutator(const LinearRule& a, const LinearRule& b) {
        return a * b - b * a;
    }
    static LinearRule anticommutator(const LinearRule& a, const LinearRule& b) {
        return a * b + b * a;
    }

    LinearRule named(std::string name) const {
        LinearRule out(*this);
        out.name_ = std::move(name);
        return out;
    }
    const std::string& name() const { return name_; }

    // --- action -----------------------------------------------------------
    // Evaluation carries ladder factors as an integer radicand under a
    // deferred square root, collapsing only when terms are merged.  Products
    // like sqrt(b+1)*sqrt(b+1) then come out exactly, so the canonical
    // commutation and anticommutation identities hold without tolerance.
    SparseVector apply(const BasisElement& x) const {
        std::vector<RawTerm> raw;
        apply_node(node_, x, 1.0, 1.0, raw);
        return merge(raw);
    }
    SparseVector apply(const SparseVector& v) const {
        std::vector<RawTerm> raw;
        for (const auto& [b, amp] : v.terms()) apply_node(node_, b, amp, 1.0, raw);
        return merge(raw);
    }
    SparseVector operator()(const BasisElement& x) const { return apply(x); }
    SparseVector operator()(const SparseVector& v) const { return apply(v); }

private:
    LinearRule(NodePtr node, std::string name) : node_(std::move(node)), name_(std::move(name)) {}

    static std::shared_ptr<Node> make(Kind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }
    static NodePtr zero_node() {
        static NodePtr z = make(Kind::Zero);
        return z;
    }
    static void require_index(int j) {
        if (j < 1 || j > 32) throw std::out_of_range("generator index out of range: " + std::to_string(j));
    }
    static void flatten_sum(std::vector<NodePtr>& into, const NodePtr& n) {
        if (n->kind == Kind::Sum)
            into.insert(into.end(), n->children.begin(), n->children.end());
        else
            into.push_back(n);
    }

    static NodePtr adjoint_node(const NodePtr& n) {
        switch (n->kind) {
            case Kind::Zero:
            case Kind::Identity:
                return n;
            case Kind::Create: {
                auto out = make(Kind::Annihilate);
                out->mode = n->mode;
                return out;
            }
            case Kind::Annihilate: {
                auto out = make(Kind::Create);
                out->mode = n->mode;
                return out;
            }
            case Kind::Wedge: {
                auto out = make(Kind::Contract);
                out->gen = n->gen;
                return out;
            }
            case Kind::Contract: {
                auto out = make(Kind::Wedge);
                out->gen = n->gen;
                return out;
            }
            case Kind::SwapPair:
                return n;  // chi is self-adjoint (a real isometry with chi^2 = Id)
            case Kind::Sum: {
                auto out = make(Kind::Sum);
                for (const auto& c : n->children) out->children.push_back(adjoint_node(c));
                return out;
            }
            case Kind::Compose: {
                auto out = make(Kind::Compose);
                out->children = {adjoint_node(n->children[1]), adjoint_node(n->children[0])};
                return out;
            }
            case Kind::Scale: {
                auto out = make(Kind::Scale);
                out->coeff = std::conj(n->coeff);
                out->children = {adjoint_node(n->children[0])};
                return out;
            }
        }
        throw std::logic_error("adjoint_node: unreachable");
    }

    struct RawTerm {
        BasisElement elem;
        Complex coeff;
        double radicand;  // accumulated integer products awaiting one sqrt
    };

    static SparseVector merge(const std::vector<RawTerm>& raw) {
        SparseVector out;
        for (const auto& t : raw) out.add(t.elem, t.coeff * std::sqrt(t.radicand));
        return out;
    }

    static void check_mode(const BasisElement& x, int j) {
        if (static_cast<std::size_t>(j) > x.beta.size())
            throw std::out_of_range("ladder index " + std::to_string(j) +
                                    " exceeds dimension n=" + std::to_string(x.beta.size()));
    }

    static void apply_node(const NodePtr& n, const BasisElement& x, Complex amp, double radicand,
                           std::vector<RawTerm>& out) {
        switch (n->kind) {
            case Kind::Zero:
                return;
            case Kind::Identity:
                out.push_back({x, amp, radicand});
                return;
            case Kind::Create: {
                check_mode(x, n->mode);
                const int bj = x.beta[n->mode - 1];
                out.push_back({BasisElement(x.beta.raised(n->mode - 1), x.form), amp,
                               radicand * double(bj + 1)});
                return;
            }
            case Kind::Annihilate: {
                check_mode(x, n->mode);
                const int bj = x.beta[n->mode - 1];
                if (bj == 0) return;
                out.push_back({BasisElement(x.beta.lowered(n->mode - 1), x.form), amp,
                               radicand * double(bj)});
                return;
            }
            case Kind::Wedge: {
                auto [sign, word] = x.form.wedged(n->gen);
                if (sign)
                    out.push_back({BasisElement(x.beta, word), amp * double(sign), radicand});
                return;
            }
            case Kind::Contract: {
                auto [sign, word] = x.form.contracted(n->gen);
                if (sign)
                    out.push_back({BasisElement(x.beta, word), amp * double(sign), radicand});
                return;
            }
            case Kind::SwapPair: {
                check_mode(x, std::max(n->mode, n->mode2));
                auto [sign, word] = x.form.swapped_pair(n->mode, n->mode2);
                out.push_back({BasisElement(x.beta.swapped(n->mode - 1, n->mode2 - 1), word),
                               amp * double(sign), radicand});
                return;
            }
            case Kind::Sum:
                for (const auto& c : n->children) apply_node(c, x, amp, radicand, out);
                return;
            case Kind::Compose: {
                std::vector<RawTerm> mid;
                apply_node(n->children[1], x, amp, radicand, mid);
                for (const auto& t : mid)
                    apply_node(n->children[0], t.elem, t.coeff, t.radicand, out);
                return;
            }
            case Kind::Scale:
                apply_node(n->children[0], x, amp * n->coeff, radicand, out);
                return;
        }
    }

    NodePtr node_;
    std::string name_;
};

}  // namespace hlap

#endif  // HLAP_RULE_HPP
