#include <catch2/catch.hpp>

#include "hlap/basis.hpp"
#include "hlap/linalg.hpp"
#include "hlap/rule.hpp"
#include "test_util.hpp"

using namespace hlap;
using hlap::testing::Sampler;

namespace {

std::vector<Generator> frame_generators(int n) {
    std::vector<Generator> gens;
    for (int j = 1; j <= n; ++j) gens.push_back(Generator::holo(j));
    for (int j = 1; j <= n; ++j) gens.push_back(Generator::anti(j));
    gens.push_back(Generator::cent(1));
    return gens;
}

bool same_action(const LinearRule& a, const LinearRule& b, const BasisElement& x,
                 double tol = 0.0) {
    SparseVector diff = a.apply(x) - b.apply(x);
    return diff.norm() <= tol;
}

}  // namespace

TEST_CASE("creation and annihilation on the vacuum") {
    const BasisElement vac = BasisElement::vacuum(2);

    SparseVector up = LinearRule::creation(1).apply(vac);
    REQUIRE(up.size() == 1);
    CHECK(up.coeff(BasisElement(MultiIndex{1, 0}, FormWord())) == Complex(1.0));

    CHECK(LinearRule::annihilation(1).apply(vac).empty());
}

TEST_CASE("canonical commutation relation [a_j, a_j*] = Id") {
    const BasisElement x(MultiIndex{3, 5}, FormWord());
    LinearRule ccr =
        LinearRule::commutator(LinearRule::annihilation(1), LinearRule::creation(1));
    SparseVector y = ccr.apply(x);
    REQUIRE(y.size() == 1);
    CHECK(y.coeff(x) == Complex(1.0));

    // disjoint modes commute
    CHECK(LinearRule::commutator(LinearRule::annihilation(1), LinearRule::creation(2))
              .apply(BasisElement::vacuum(2))
              .empty());
}

TEST_CASE("ladder suite on random states") {
    Sampler s;
    const int n = 3;
    for (int trial = 0; trial < 40; ++trial) {
        const BasisElement x(s.multi_index(n, 10), FormWord());
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                LinearRule comm = LinearRule::commutator(LinearRule::annihilation(i),
                                                         LinearRule::creation(j));
                SparseVector y = comm.apply(x);
                if (i == j) {
                    REQUIRE(y.size() == 1);
                    CHECK(y.coeff(x) == Complex(1.0));  // exact, no tolerance
                } else {
                    CHECK(y.empty());
                }
                CHECK(LinearRule::commutator(LinearRule::annihilation(i),
                                             LinearRule::annihilation(j))
                          .apply(x)
                          .empty());
            }
    }
}

TEST_CASE("wedge in canonical order") {
    const MultiIndex zero{0, 0};

    SECTION("already ordered") {
        BasisElement x(zero, FormWord(0b10, 0, 0));  // tau^2
        SparseVector y = LinearRule::wedge(Generator::holo(1)).apply(x);
        REQUIRE(y.size() == 1);
        CHECK(y.coeff(BasisElement(zero, FormWord(0b11, 0, 0))) == Complex(1.0));
    }
    SECTION("repeated generator vanishes") {
        BasisElement x(zero, FormWord(0b11, 0, 0));  // tau^1 tau^2
        CHECK(LinearRule::wedge(Generator::holo(2)).apply(x).empty());
    }
    SECTION("anti generator before central") {
        BasisElement x(zero, FormWord(0, 0, 1));  // tau^w
        SparseVector y = LinearRule::wedge(Generator::anti(1)).apply(x);
        REQUIRE(y.size() == 1);
        CHECK(y.coeff(BasisElement(zero, FormWord(0, 0b1, 1))) == Complex(1.0));
    }
    SECTION("transposition costs a sign") {
        BasisElement x(zero, FormWord(0b01, 0, 0));  // tau^1
        SparseVector y = LinearRule::wedge(Generator::holo(2)).apply(x);
        CHECK(y.coeff(BasisElement(zero, FormWord(0b11, 0, 0))) == Complex(-1.0));
    }
}

TEST_CASE("contraction removes with position sign") {
    const MultiIndex zero{0, 0};
    BasisElement x(zero, FormWord(0b11, 0, 0));  // tau^1 tau^2

    SparseVector y = LinearRule::contract(Generator::holo(1)).apply(x);
    REQUIRE(y.size() == 1);
    CHECK(y.coeff(BasisElement(zero, FormWord(0b10, 0, 0))) == Complex(1.0));

    y = LinearRule::contract(Generator::holo(2)).apply(x);
    CHECK(y.coeff(BasisElement(zero, FormWord(0b01, 0, 0))) == Complex(-1.0));
}

TEST_CASE("anticommutation suite over the whole frame") {
    Sampler s;
    const int n = 3;
    const auto gens = frame_generators(n);
    for (int trial = 0; trial < 25; ++trial) {
        const BasisElement x = s.basis_element(n, 6);
        for (const auto& u : gens)
            for (const auto& v : gens) {
                const double pairing = (u == v) ? 1.0 : 0.0;
                LinearRule ei = LinearRule::anticommutator(LinearRule::wedge(u),
                                                           LinearRule::contract(v));
                SparseVector y = ei.apply(x);
                if (pairing == 1.0) {
                    REQUIRE(y.size() == 1);
                    CHECK(y.coeff(x) == Complex(1.0));  // exact
                } else {
                    CHECK(y.empty());
                }
                CHECK(LinearRule::anticommutator(LinearRule::wedge(u), LinearRule::wedge(v))
                          .apply(x)
                          .empty());
                CHECK(LinearRule::anticommutator(LinearRule::contract(u),
                                                 LinearRule::contract(v))
                          .apply(x)
                          .empty());
            }
    }
}

TEST_CASE("orthogonal pairing example") {
    // {e(tau^1), i(Z_2)} on psi_0 tau^2 -> 0
    BasisElement x(MultiIndex{0, 0}, FormWord(0b10, 0, 0));
    LinearRule mixed = LinearRule::anticommutator(LinearRule::wedge(Generator::holo(1)),
                                                  LinearRule::contract(Generator::holo(2)));
    CHECK(mixed.apply(x).empty());
}

TEST_CASE("structural adjoints") {
    Sampler s;
    const int n = 2;
    for (int trial = 0; trial < 20; ++trial) {
        const BasisElement x = s.basis_element(n, 5);
        CHECK(same_action(LinearRule::wedge(Generator::holo(1)).adjoint(),
                          LinearRule::contract(Generator::holo(1)), x));
        CHECK(same_action(LinearRule::creation(2).adjoint(), LinearRule::annihilation(2), x));
    }
}

TEST_CASE("adjoint contract <Au,v> = <u,A*v> for composite rules") {
    Sampler s;
    const int n = 2;
    // A representative composite: mixes ladder, wedge, contraction, scaling.
    LinearRule a = Complex(0.0, -1.5) * (LinearRule::wedge(Generator::holo(1)) *
                                         LinearRule::creation(1)) +
                   2.0 * (LinearRule::contract(Generator::anti(2)) * LinearRule::annihilation(2)) +
                   LinearRule::wedge(Generator::cent(1)) * LinearRule::scalar(Complex(0, 3));
    LinearRule astar = a.adjoint();
    for (int trial = 0; trial < 30; ++trial) {
        SparseVector u = s.sparse_vector(n), v = s.sparse_vector(n);
        const Complex lhs = inner(a.apply(u), v);
        const Complex rhs = inner(u, astar.apply(v));
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("double adjoint returns the original action") {
    Sampler s;
    LinearRule a = LinearRule::wedge(Generator::holo(2)) * LinearRule::annihilation(1) -
                   Complex(0, 2) * LinearRule::contract(Generator::cent(1));
    LinearRule aa = a.adjoint().adjoint();
    for (int trial = 0; trial < 10; ++trial)
        CHECK(same_action(a, aa, s.basis_element(2), 0.0));
}

TEST_CASE("wedge twice in either order differs exactly by sign") {
    Sampler s;
    for (int trial = 0; trial < 20; ++trial) {
        const BasisElement x = s.basis_element(3, 4);
        LinearRule ab = LinearRule::wedge(Generator::holo(2)) * LinearRule::wedge(Generator::anti(1));
        LinearRule ba = LinearRule::wedge(Generator::anti(1)) * LinearRule::wedge(Generator::holo(2));
        SparseVector sum = ab.apply(x) + ba.apply(x);
        CHECK(sum.empty());
    }
}

TEST_CASE("matrix_of basics") {
    const BasisElement vac = BasisElement::vacuum(1);
    const BasisElement one(MultiIndex{1}, FormWord());

    SECTION("identity") {
        Matrix m = matrix_of(LinearRule::identity(), {vac, one}, {vac, one});
        CHECK(m(0, 0) == Complex(1.0));
        CHECK(m(1, 1) == Complex(1.0));
        CHECK(m(0, 1) == Complex(0.0));
    }
    SECTION("vacuum excitation") {
        Matrix m = matrix_of(LinearRule::creation(1), {vac}, {one});
        REQUIRE(m.rows() == 1);
        CHECK(m(0, 0) == Complex(1.0));
    }
    SECTION("annihilation of vacuum is the zero matrix") {
        Matrix m = matrix_of(LinearRule::annihilation(1), {vac}, {vac});
        CHECK(m(0, 0) == Complex(0.0));
    }
    SECTION("leakage raises with the offending element") {
        REQUIRE_THROWS_AS(matrix_of(LinearRule::creation(1), {vac}, {vac}), LeakageError);
        try {
            matrix_of(LinearRule::creation(1), {vac}, {vac});
        } catch (const LeakageError& err) {
            CHECK(err.offender() == one);
        }
    }
}

TEST_CASE("swap_pair is a self-adjoint involution") {
    Sampler s;
    LinearRule chi = LinearRule::swap_pair(1, 2);
    for (int trial = 0; trial < 25; ++trial) {
        const BasisElement x = s.basis_element(3, 5);
        SparseVector twice = chi.apply(chi.apply(x));
        REQUIRE(twice.size() == 1);
        CHECK(twice.coeff(x) == Complex(1.0));

        SparseVector u = s.sparse_vector(3), v = s.sparse_vector(3);
        CHECK(std::abs(inner(chi.apply(u), v) - inner(u, chi.apply(v))) < 1e-12);
    }
}

TEST_CASE("sparse vector inner product is positive definite") {
    Sampler s;
    for (int trial = 0; trial < 10; ++trial) {
        SparseVector v = s.sparse_vector(2);
        const Complex ip = inner(v, v);
        CHECK(ip.imag() == 0.0);
        CHECK(ip.real() >= 0.0);
        if (!v.empty()) CHECK(ip.real() > 0.0);
    }
    CHECK(inner(SparseVector(), SparseVector()) == Complex(0.0));
}
