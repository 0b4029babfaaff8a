#include <catch2/catch.hpp>
#include <set>

#include "hlap/catalog.hpp"
#include "test_util.hpp"

using namespace hlap;
using namespace hlap::catalog;
using hlap::testing::Sampler;

namespace {

std::vector<double> family_values(const std::vector<CatalogEntry>& entries, int family) {
    std::vector<double> out;
    for (const auto& e : entries)
        if (e.family == family) out.push_back(e.value);
    std::sort(out.begin(), out.end());
    return out;
}

bool value_in(const std::vector<CatalogEntry>& entries, double v, double tol = 1e-10) {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const CatalogEntry& e) { return std::abs(e.value - v) <= tol; });
}

}  // namespace

TEST_CASE("catalog families at n=1, p=1, k=1") {
    const auto entries = eigenvalues(1, 1, 1.0, 2);

    // p = n: family 1 is the single value k^2.
    CHECK(family_values(entries, 1) == std::vector<double>{1.0});
    // family 3 (r=1) walks 2k(g-1)+k^2+k: {2, 4}
    CHECK(family_values(entries, 3) == std::vector<double>{2.0, 4.0});
    // family 4 (r=1): g=1 gives 4.5 +- sqrt(4.25); g=2 gives 6.5 +- 2.5
    const auto f4 = family_values(entries, 4);
    REQUIRE(f4.size() == 4);
    CHECK(f4.front() == Approx(4.5 - std::sqrt(4.25)).epsilon(1e-14));
    CHECK(f4.back() == Approx(9.0).margin(1e-12));
}

TEST_CASE("family-1 value at n=2, p=1, g=1 is k^2+(n-p)k") {
    const auto entries = eigenvalues(2, 1, 1.0, 1);
    CHECK(value_in(entries, 2.0));  // 1 + 1
}

TEST_CASE("catalog lowest equals k^2+(n-p)k over sampled grid") {
    for (int n = 1; n <= 4; ++n)
        for (int p = 0; p <= n; ++p)
            for (double k : {0.5, 1.0, 2.0}) {
                const auto entries = eigenvalues(n, p, k, 6);
                double lo = entries.front().value;
                for (const auto& e : entries) lo = std::min(lo, e.value);
                CHECK(lo == Approx(k * k + (n - p) * k).margin(1e-12));
            }
}

TEST_CASE("lowest value and multiplicity") {
    SECTION("closed form") {
        auto [v1, m1] = lowest(2, 1, 1.0);
        CHECK(v1 == Approx(2.0));
        CHECK(m1 == 2);
        auto [v2, m2] = lowest(3, 3, 2.0);
        CHECK(v2 == Approx(4.0));
        CHECK(m2 == 1);
        auto [v3, m3] = lowest(1, 0, 1.0);
        CHECK(v3 == Approx(2.0));
        CHECK(m3 == 1);
    }
    SECTION("Hodge reflection for p > n") {
        auto [v, m] = lowest(2, 4, 1.0);  // reflects to p = 1
        CHECK(v == Approx(2.0));
        CHECK(m == 2);
    }
    SECTION("numeric multiplicity oracle, n=2 p=1 k=1") {
        auto numeric = numeric_spectrum(2, 1, 1.0, 6);
        auto [v, m] = lowest(2, 1, 1.0);
        long count = 0;
        for (double x : numeric)
            if (std::abs(x - v) < 1e-6) ++count;
        CHECK(count == m);
        for (double x : numeric) CHECK(x > v - 1e-8);
    }
}

TEST_CASE("symmetric epsilon closed forms") {
    const int n = 3, g = 2;

    SECTION("base case") {
        SparseVector e0 = symmetric_epsilon(0, n, g);
        REQUIRE(e0.size() == 1);
        CHECK(e0.coeff(BasisElement(MultiIndex{g, 0, 0}, FormWord())) == Complex(1.0));
    }
    SECTION("epsilon(1,n) = sum_j psi_{|g|e1+e_j} tau^j") {
        SparseVector e1 = symmetric_epsilon(1, n, g);
        REQUIRE(e1.size() == 2);
        CHECK(std::abs(e1.coeff(BasisElement(MultiIndex{g, 1, 0}, FormWord(0b010, 0, 0))) -
                       Complex(1.0)) < 1e-15);
        CHECK(std::abs(e1.coeff(BasisElement(MultiIndex{g, 0, 1}, FormWord(0b100, 0, 0))) -
                       Complex(1.0)) < 1e-15);
    }
    SECTION("epsilon(2,n) = sum_j psi_{|g|e1} tau^j tau^jbar") {
        SparseVector e2 = symmetric_epsilon(2, n, g);
        REQUIRE(e2.size() == 2);
        CHECK(std::abs(e2.coeff(BasisElement(MultiIndex{g, 0, 0}, FormWord(0b010, 0b010, 0))) -
                       Complex(1.0)) < 1e-15);
        CHECK(std::abs(e2.coeff(BasisElement(MultiIndex{g, 0, 0}, FormWord(0b100, 0b100, 0))) -
                       Complex(1.0)) < 1e-15);
    }
}

TEST_CASE("epsilon is chi-symmetric; the symmbas basis additionally kills U_1j") {
    const int n = 4;
    // epsilon(p,n) itself lies in the +1 eigenspace of every chi_2j; it is
    // the four symmbas combinations that are also in ker U_12 ... ker U_1n.
    for (int p = 0; p <= 5; ++p) {
        for (int g : {0, 1, 3}) {
            SparseVector eps = symmetric_epsilon(p, n, g);
            if (eps.empty()) continue;
            heisenberg::HeisenbergContext ctx(n, 1.0, p);
            for (int j = 3; j <= n; ++j) {
                SparseVector chi_eps = heisenberg::build_chi(2, j, ctx).apply(eps);
                CHECK((chi_eps - eps).norm() < 1e-12 * eps.norm());
            }
        }
    }
    for (int q : {2, 3}) {
        for (int g : {1, 2}) {
            heisenberg::HeisenbergContext ctx(n, 1.0, 2 * q);
            for (const auto& b : symmetric_basis(q, n, g)) {
                REQUIRE(b.norm() > 0.0);
                for (int j = 2; j <= n; ++j)
                    CHECK(heisenberg::build_Uij(1, j, ctx).apply(b).norm() < 1e-12 * b.norm());
                for (int j = 3; j <= n; ++j)
                    CHECK((heisenberg::build_chi(2, j, ctx).apply(b) - b).norm() <
                          1e-12 * b.norm());
            }
        }
    }
}

TEST_CASE("symmetric 4x4 matrix: transcription, eigenvalues and compression agree") {
    for (int q : {2, 3})
        for (int n : {4, 5})
            for (int g : {1, 2})
                for (double k : {0.5, 1.0}) {
                    auto res = symmetric_matrix(q, n, k, g);
                    const RealMatrix ref = symmetric_matrix_reference(q, n, k, g);
                    CHECK((res.matrix - ref).cwiseAbs().maxCoeff() < 1e-9);
                    CHECK(res.agreement < 1e-9);
                }
}

TEST_CASE("symmetric matrix example: q=2, n=4, k=1, |gamma|=1") {
    auto res = symmetric_matrix(2, 4, 1.0, 1);
    CHECK(res.base == Approx(7.0));
    // eigenvalues {11, 11, 11 +- sqrt(11)}
    CHECK(res.eigenvalues[0] == Approx(11.0 - std::sqrt(11.0)).margin(1e-10));
    CHECK(res.eigenvalues[1] == Approx(11.0).margin(1e-10));
    CHECK(res.eigenvalues[2] == Approx(11.0).margin(1e-10));
    CHECK(res.eigenvalues[3] == Approx(11.0 + std::sqrt(11.0)).margin(1e-10));
}

TEST_CASE("symmetric pair is k-continuous at k -> 0+") {
    // root -> n/2, so the +- pair tends to base + (q-1)(n-q) + n/2 +- n/2
    const int q = 2, n = 5, g = 2;
    const auto eigs = symmetric_closed_eigenvalues(q, n, 1e-12, g);
    const double base = 0.0 + 0.0 + 0.0;  // 2k|g| + nk + k^2 -> 0
    CHECK(eigs.front() == Approx(base + (q - 1) * (n - q)).margin(1e-5));
    CHECK(eigs.back() == Approx(base + (q - 1) * (n - q) + n).margin(1e-5));
}

TEST_CASE("symmetric matrix hypothesis violations") {
    CHECK_THROWS_AS(symmetric_matrix(1, 4, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(symmetric_matrix(2, 2, 1.0, 1), std::invalid_argument);  // q = n degenerates
    CHECK_THROWS_AS(symmetric_matrix(2, 4, 1.0, 0), std::invalid_argument);
}

TEST_CASE("catalog nesting: spectrum(n,p) contains spectrum(n-1,p-1)") {
    for (int n : {2, 3, 4})
        for (int p = 1; p <= n; ++p)
            for (double k : {0.5, 1.3}) {
                const auto big = eigenvalues(n, p, k, 5);
                const auto small = eigenvalues(n - 1, p - 1, k, 5);
                for (const auto& e : small) CHECK(value_in(big, e.value, 1e-10));
            }
}

TEST_CASE("family-4 minus branch exceeds k^2+(n-p+r-1)k") {
    for (int n = 1; n <= 6; ++n)
        for (int p = 1; p <= n; ++p)
            for (int r = 1; r <= p; ++r)
                for (double k : {0.1, 0.5, 1.0, 2.0, 10.0})
                    for (int g : {1, 2, 10, 50}) {
                        const int m = n - p + r;
                        const double shift = 2 * k * g + k * k + m * k + 0.5 * m +
                                             double((r - 1) / 2) * (n - p + r / 2);
                        const double root = std::sqrt(0.25 * m * m + m * k + 2 * k * g + k * k);
                        CHECK(shift - root > k * k + (n - p + r - 1) * k);
                    }
}

TEST_CASE("match_spectrum: zero orphans on the worked examples") {
    struct Case {
        int n, p;
        double k;
    };
    for (Case c : {Case{1, 1, 1.0}, Case{2, 1, 1.0}, Case{2, 2, 0.5}}) {
        auto numeric = numeric_spectrum(c.n, c.p, c.k, 4);
        auto rep = match_spectrum(numeric, c.n, c.p, c.k, 2, 1e-8);
        CHECK(rep.orphan_numeric.empty());
        CHECK(rep.orphan_catalog.empty());
        CHECK(rep.matched == numeric.size());
    }
}

TEST_CASE("catalog precondition errors") {
    CHECK_THROWS_AS(eigenvalues(2, 3, 1.0, 4), std::invalid_argument);  // p > n
    CHECK_THROWS_AS(eigenvalues(2, 1, -1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(eigenvalues(2, 1, 1.0, 0), std::invalid_argument);
}
