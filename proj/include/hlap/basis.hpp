#ifndef HLAP_BASIS_HPP
#define HLAP_BASIS_HPP

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlap {

using Complex = std::complex<double>;

/// Multi-index over the ladder pairs. State indices are >= 0; block labels
/// (gamma) may carry -1 entries.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t n) : entries_(n, 0) {}
    MultiIndex(std::initializer_list<int> init) : entries_(init) {}
    explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}

    static MultiIndex unit(std::size_t n, std::size_t j, int value = 1) {
        MultiIndex out(n);
        out.entries_.at(j) = value;
        return out;
    }

    std::size_t size() const { return entries_.size(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    int& operator[](std::size_t i) { return entries_[i]; }
    const std::vector<int>& entries() const { return entries_; }

    int total() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }
    bool nonnegative() const {
        return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e >= 0; });
    }

    MultiIndex raised(std::size_t j) const {
        MultiIndex out(*this);
        out.entries_[j] += 1;
        return out;
    }
    MultiIndex lowered(std::size_t j) const {
        MultiIndex out(*this);
        out.entries_[j] -= 1;
        return out;
    }
    MultiIndex swapped(std::size_t i, std::size_t j) const {
        MultiIndex out(*this);
        std::swap(out.entries_[i], out.entries_[j]);
        return out;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
        return a.entries_ == b.entries_;
    }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
        return a.entries_ < b.entries_;
    }

    std::string str() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) os << ',';
            os << entries_[i];
        }
        os << ')';
        return os.str();
    }

private:
    std::vector<int> entries_;
};

/// One generator of the exterior frame.  Canonical order is
/// tau^1 < ... < tau^n < tau^1bar < ... < tau^nbar < tau^w1 < ... < tau^wl.
struct Generator {
    enum class Slot : std::uint8_t { Holo, Anti, Cent };
    Slot slot = Slot::Holo;
    int index = 1;  // 1-based within its slot

    static Generator holo(int j) { return {Slot::Holo, j}; }
    static Generator anti(int j) { return {Slot::Anti, j}; }
    static Generator cent(int q = 1) { return {Slot::Cent, q}; }

    friend bool operator==(const Generator& a, const Generator& b) {
        return a.slot == b.slot && a.index == b.index;
    }

    std::string str() const {
        switch (slot) {
            case Slot::Holo: return "t" + std::to_string(index);
            case Slot::Anti: return "t" + std::to_string(index) + "~";
            default: return "w" + std::to_string(index);
        }
    }
};

/// An exterior monomial in canonical order, stored as three bitmasks.
/// Signs from reordering are always absorbed into coefficients, so equal
/// FormWords denote the same canonical monomial.
class FormWord {
public:
    FormWord() = default;
    FormWord(std::uint32_t holo, std::uint32_t anti, std::uint32_t cent)
        : holo_(holo), anti_(anti), cent_(cent) {}

    static FormWord empty() { return FormWord(); }

    std::uint32_t holo_mask() const { return holo_; }
    std::uint32_t anti_mask() const { return anti_; }
    std::uint32_t cent_mask() const { return cent_; }

    int degree() const {
        return std::popcount(holo_) + std::popcount(anti_) + std::popcount(cent_);
    }
    int holo_count() const { return std::popcount(holo_); }
    int anti_count() const { return std::popcount(anti_); }
    int cent_count() const { return std::popcount(cent_); }

    bool has(Generator g) const { return (mask_of(g.slot) >> (g.index - 1)) & 1u; }
    bool has_holo(int j) const { return (holo_ >> (j - 1)) & 1u; }
    bool has_anti(int j) const { return (anti_ >> (j - 1)) & 1u; }
    bool has_cent(int q) const { return (cent_ >> (q - 1)) & 1u; }

    /// Number of present generators strictly before g in canonical order.
    int rank_before(Generator g) const {
        const std::uint32_t low = (g.index > 1) ? ((1u << (g.index - 1)) - 1u) : 0u;
        switch (g.slot) {
            case Generator::Slot::Holo:
                return std::popcount(holo_ & low);
            case Generator::Slot::Anti:
                return std::popcount(holo_) + std::popcount(anti_ & low);
            default:
                return std::popcount(holo_) + std::popcount(anti_) + std::popcount(cent_ & low);
        }
    }

    /// Wedge by g on the left: returns {sign, word} or sign 0 if g repeats.
    std::pair<int, FormWord> wedged(Generator g) const {
        if (has(g)) return {0, *this};
        FormWord out(*this);
        out.mask_of(g.slot) |= (1u << (g.index - 1));
        return {(rank_before(g) % 2 == 0) ? +1 : -1, out};
    }

    /// Contraction dual to g: returns {sign, word} or sign 0 if g absent.
    std::pair<int, FormWord> contracted(Generator g) const {
        if (!has(g)) return {0, *this};
        FormWord out(*this);
        out.mask_of(g.slot) &= ~(1u << (g.index - 1));
        return {(rank_before(g) % 2 == 0) ? +1 : -1, out};
    }

    /// Swap the i-th and j-th complex directions (holo and anti in step).
    /// Returns {sign, word}; the sign restores canonical order.
    std::pair<int, FormWord> swapped_pair(int i, int j) const;

    friend bool operator==(const FormWord& a, const FormWord& b) {
        return a.holo_ == b.holo_ && a.anti_ == b.anti_ && a.cent_ == b.cent_;
    }
    friend bool operator!=(const FormWord& a, const FormWord& b) { return !(a == b); }
    friend bool operator<(const FormWord& a, const FormWord& b) {
        if (a.cent_ != b.cent_) return a.cent_ < b.cent_;
        if (a.holo_ != b.holo_) return a.holo_ < b.holo_;
        return a.anti_ < b.anti_;
    }

    std::string str() const {
        std::string out;
        auto emit = [&](std::uint32_t mask, Generator::Slot slot) {
            for (int i = 0; mask >> i; ++i)
                if ((mask >> i) & 1u) {
                    if (!out.empty()) out += '^';
                    out += Generator{slot, i + 1}.str();
                }
        };
        emit(holo_, Generator::Slot::Holo);
        emit(anti_, Generator::Slot::Anti);
        emit(cent_, Generator::Slot::Cent);
        return out.empty() ? "1" : out;
    }

private:
    std::uint32_t& mask_of(Generator::Slot s) {
        switch (s) {
            case Generator::Slot::Holo: return holo_;
            case Generator::Slot::Anti: return anti_;
            default: return cent_;
        }
    }
    std::uint32_t mask_of(Generator::Slot s) const {
        switch (s) {
            case Generator::Slot::Holo: return holo_;
            case Generator::Slot::Anti: return anti_;
            default: return cent_;
        }
    }

    std::uint32_t holo_ = 0;
    std::uint32_t anti_ = 0;
    std::uint32_t cent_ = 0;
};

inline std::pair<int, FormWord> FormWord::swapped_pair(int i, int j) const {
    // Relabelling i <-> j in a sorted word: if both generators are present the
    // relabelled word resorts with one net transposition (parity 1); if
    // exactly one is present, the move passes every present generator
    // strictly between the two positions.
    auto swap_mask = [](std::uint32_t mask, int a, int b, int& parity) {
        const bool ha = (mask >> (a - 1)) & 1u;
        const bool hb = (mask >> (b - 1)) & 1u;
        if (!ha && !hb) return mask;
        if (ha && hb) {
            parity += 1;
            return mask;
        }
        const int lo = std::min(a, b), hi = std::max(a, b);
        std::uint32_t between = 0;
        if (hi - lo > 1) between = (mask >> lo) & ((1u << (hi - lo - 1)) - 1u);
        parity += std::popcount(between);
        mask &= ~(1u << (a - 1));
        mask &= ~(1u << (b - 1));
        if (ha) mask |= (1u << (b - 1));
        if (hb) mask |= (1u << (a - 1));
        return mask;
    };
    int parity = 0;
    FormWord out(*this);
    out.holo_ = swap_mask(out.holo_, i, j, parity);
    out.anti_ = swap_mask(out.anti_, i, j, parity);
    return {(parity % 2 == 0) ? +1 : -1, out};
}

/// psi_beta tensor an exterior word: the atom of all computation here.
struct BasisElement {
    MultiIndex beta;
    FormWord form;

    BasisElement() = default;
    BasisElement(MultiIndex b, FormWord f) : beta(std::move(b)), form(f) {}

    static BasisElement vacuum(std::size_t n) { return BasisElement(MultiIndex(n), FormWord()); }

    friend bool operator==(const BasisElement& a, const BasisElement& b) {
        return a.beta == b.beta && a.form == b.form;
    }
    friend bool operator!=(const BasisElement& a, const BasisElement& b) { return !(a == b); }
    friend bool operator<(const BasisElement& a, const BasisElement& b) {
        if (a.form != b.form) return a.form < b.form;
        return a.beta < b.beta;
    }

    std::string str() const { return "psi" + beta.str() + (form.degree() ? "*" + form.str() : ""); }
};

/// Finite complex combination of BasisElements.  Basis elements are
/// orthonormal.  Map storage keeps iteration order deterministic.
class SparseVector {
public:
    using Terms = std::map<BasisElement, Complex>;

    SparseVector() = default;
    explicit SparseVector(const BasisElement& b, Complex amp = 1.0) { add(b, amp); }

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add(const BasisElement& b, Complex amp) {
        if (amp == 0.0) return;
        auto [it, inserted] = terms_.try_emplace(b, amp);
        if (!inserted) {
            it->second += amp;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    SparseVector& operator+=(const SparseVector& other) {
        for (const auto& [b, amp] : other.terms_) add(b, amp);
        return *this;
    }
    SparseVector& operator-=(const SparseVector& other) {
        for (const auto& [b, amp] : other.terms_) add(b, -amp);
        return *this;
    }
    SparseVector& operator*=(Complex c) {
        if (c == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [b, amp] : terms_) amp *= c;
        return *this;
    }
    friend SparseVector operator+(SparseVector a, const SparseVector& b) { return a += b; }
    friend SparseVector operator-(SparseVector a, const SparseVector& b) { return a -= b; }
    friend SparseVector operator*(Complex c, SparseVector v) { return v *= c; }

    Complex coeff(const BasisElement& b) const {
        auto it = terms_.find(b);
        return it == terms_.end() ? Complex(0.0) : it->second;
    }

    /// <u,v>, conjugate-linear in u.
    friend Complex inner(const SparseVector& u, const SparseVector& v) {
        const SparseVector& small = (u.size() <= v.size()) ? u : v;
        const SparseVector& large = (u.size() <= v.size()) ? v : u;
        Complex out = 0.0;
        for (const auto& [b, amp] : small.terms_) {
            auto it = large.terms_.find(b);
            if (it == large.terms_.end()) continue;
            if (&small == &u)
                out += std::conj(amp) * it->second;
            else
                out += std::conj(it->second) * amp;
        }
        return out;
    }

    double norm() const {
        double s = 0.0;
        for (const auto& [b, amp] : terms_) s += std::norm(amp);
        return std::sqrt(s);
    }

    void prune(double threshold) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (std::abs(it->second) < threshold)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [b, amp] : terms_) {
            if (!first) os << " + ";
            os << "(" << amp.real() << (amp.imag() < 0 ? "-" : "+") << std::abs(amp.imag())
               << "i)" << b.str();
            first = false;
        }
        return os.str();
    }

private:
    Terms terms_;
};

}  // namespace hlap

#endif  // HLAP_BASIS_HPP
