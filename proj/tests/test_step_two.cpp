#include <catch2/catch.hpp>

#include "hlap/heisenberg.hpp"
#include "hlap/step_two.hpp"
#include "hlap/step_two_io.hpp"
#include "test_util.hpp"

using namespace hlap;
using namespace hlap::nilpotent;
using hlap::testing::Sampler;

TEST_CASE("j_map basics") {
    SECTION("Heisenberg n=1: J(W) = [[0,1],[-1,0]]") {
        auto h = StepTwoAlgebra::heisenberg(1);
        RealMatrix j = j_map(h, {1.0});
        CHECK(j(0, 0) == 0.0);
        CHECK(j(0, 1) == 1.0);
        CHECK(j(1, 0) == -1.0);
        CHECK(j(1, 1) == 0.0);
    }
    SECTION("J(0) = 0 and linearity") {
        auto d = StepTwoAlgebra::double_heisenberg(1);
        CHECK(j_map(d, {0.0, 0.0}).cwiseAbs().maxCoeff() == 0.0);
        RealMatrix j12 = j_map(d, {0.3, -0.7});
        RealMatrix sum = 0.3 * j_map(d, {1.0, 0.0}) - 0.7 * j_map(d, {0.0, 1.0});
        CHECK((j12 - sum).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("D^6 W_2 pairs (X1,X4) and (X2,X3)") {
        auto d = StepTwoAlgebra::double_heisenberg(1);
        RealMatrix j = j_map(d, {0.0, 1.0});
        CHECK(j(0, 3) == 1.0);
        CHECK(j(1, 2) == 1.0);
        CHECK(j(0, 2) == 0.0);
        // skew
        CHECK((j + j.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("H-type detection") {
    CHECK(is_htype(StepTwoAlgebra::heisenberg(1)).is_htype);
    CHECK(is_htype(StepTwoAlgebra::heisenberg(3)).max_deviation < 1e-12);
    CHECK(is_htype(StepTwoAlgebra::double_heisenberg(1)).is_htype);
    CHECK(is_htype(StepTwoAlgebra::double_heisenberg(2)).max_deviation < 1e-12);

    // planted degenerate direction: J(W_2) = 0
    StepTwoAlgebra degen(2, 2);
    degen.set_bracket(1, 2, 1, 1.0);
    auto rep = is_htype(degen);
    CHECK_FALSE(rep.is_htype);
    CHECK(rep.max_deviation >= 0.5);
}

TEST_CASE("symplectic frame invariants") {
    auto check_frame = [](const StepTwoAlgebra& algebra, const CentralFunctional& lambda) {
        const auto frame = symplectic_frame(algebra, lambda);
        const RealMatrix b = bracket_form(algebra, lambda);
        const double ln = lambda.norm();
        REQUIRE(frame.pairs() == algebra.m / 2);
        for (int i = 0; i < frame.pairs(); ++i) {
            CHECK(std::abs(frame.X[i].norm() - 1.0) < 1e-12);
            CHECK(std::abs(frame.Y[i].norm() - 1.0) < 1e-12);
            for (int j = 0; j < frame.pairs(); ++j) {
                CHECK(std::abs(frame.X[i].dot(b * frame.X[j])) < 1e-10 * ln);
                CHECK(std::abs(frame.Y[i].dot(b * frame.Y[j])) < 1e-10 * ln);
                CHECK(std::abs(frame.X[i].dot(b * frame.Y[j]) - (i == j ? ln : 0.0)) <
                      1e-10 * ln);
                // orthonormality of the real frame
                CHECK(std::abs(frame.X[i].dot(frame.Y[j])) < 1e-12);
                if (i != j) {
                    CHECK(std::abs(frame.X[i].dot(frame.X[j])) < 1e-12);
                    CHECK(std::abs(frame.Y[i].dot(frame.Y[j])) < 1e-12);
                }
            }
        }
    };
    check_frame(StepTwoAlgebra::heisenberg(2), CentralFunctional{1.7});
    check_frame(StepTwoAlgebra::double_heisenberg(1), CentralFunctional{1.0, 0.0});
    check_frame(StepTwoAlgebra::double_heisenberg(2), CentralFunctional{3.0, 4.0});

    SECTION("lambda([X_1, Y_1]) = |lambda| on D^6 with lambda=(3,4)") {
        auto d6 = StepTwoAlgebra::double_heisenberg(1);
        CentralFunctional lambda{3.0, 4.0};
        auto frame = symplectic_frame(d6, lambda);
        const RealMatrix b = bracket_form(d6, lambda);
        CHECK(frame.X[0].dot(b * frame.Y[0]) == Approx(5.0).margin(1e-10));
    }
    SECTION("non-H-type input is rejected with a kernel direction") {
        StepTwoAlgebra degen(4, 1);
        degen.set_bracket(1, 2, 1, 1.0);  // X3, X4 central-degenerate
        CHECK_THROWS_AS(symplectic_frame(degen, CentralFunctional{1.0}), std::runtime_error);
    }
}

TEST_CASE("pfaffian") {
    SECTION("Heisenberg: |Pf| = |k|^n") {
        for (int n : {1, 2, 3})
            for (double k : {0.5, 1.0, 2.0}) {
                auto h = StepTwoAlgebra::heisenberg(n);
                CHECK(pfaffian(h, CentralFunctional{k}) ==
                      Approx(std::pow(k, n)).epsilon(1e-10));
            }
    }
    SECTION("double Heisenberg: |Pf| = r^{2n}") {
        for (int n : {1, 2}) {
            auto d = StepTwoAlgebra::double_heisenberg(n);
            CentralFunctional lambda{3.0, 4.0};  // r = 5
            CHECK(pfaffian(d, lambda) == Approx(std::pow(5.0, 2 * n)).epsilon(1e-10));
        }
    }
    SECTION("zero functional") {
        auto h = StepTwoAlgebra::heisenberg(2);
        CHECK(pfaffian(h, CentralFunctional{0.0}) == 0.0);
    }
    SECTION("Pf^2 = det B to relative 1e-8") {
        Sampler s;
        for (int trial = 0; trial < 10; ++trial) {
            StepTwoAlgebra a(4, 2);
            for (int i = 1; i <= 4; ++i)
                for (int j = i + 1; j <= 4; ++j)
                    for (int q = 1; q <= 2; ++q) a.set_bracket(i, j, q, s.uniform(-2, 2));
            CentralFunctional lambda{s.uniform(-2, 2), s.uniform(-2, 2)};
            const double pf = pfaffian(a, lambda);
            const double det = bracket_form(a, lambda).determinant();
            CHECK(pf * pf == Approx(det).epsilon(1e-8).margin(1e-10));
        }
    }
    SECTION("odd dimension rejected") {
        StepTwoAlgebra odd(3, 1);
        odd.set_bracket(1, 2, 1, 1.0);
        CHECK_THROWS_AS(pfaffian(odd, CentralFunctional{1.0}), std::invalid_argument);
    }
}

TEST_CASE("generic d squares to zero") {
    Sampler s;
    auto d6 = StepTwoAlgebra::double_heisenberg(1);
    CentralFunctional lambda{3.0, 4.0};
    auto frame = symplectic_frame(d6, lambda);
    LinearRule d = build_d(d6, lambda, frame);
    LinearRule dd = d * d;
    for (int t = 0; t < 10; ++t) {
        SparseVector v = s.sparse_vector(2, 6, 6, 2);
        CHECK(dd.apply(v).norm() < 1e-12 * (1.0 + v.norm()) * (1 + lambda.norm()));
    }
}

TEST_CASE("H-type Laplacian is diagonal on 0-forms") {
    auto d6 = StepTwoAlgebra::double_heisenberg(1);
    CentralFunctional lambda{0.6, 0.8};  // |lambda| = 1
    LinearRule lap = build_lap(d6, lambda, 0);
    Sampler s;
    const int np = 2;
    for (int t = 0; t < 10; ++t) {
        const BasisElement x(s.multi_index(np, 5), FormWord());
        SparseVector y = lap.apply(x);
        const double expected = 1.0 * (2 * x.beta.total() + np) + 1.0;
        CHECK(std::abs(y.coeff(x) - Complex(expected)) < 1e-10 * (1 + expected));
        CHECK((y - SparseVector(x, y.coeff(x))).norm() < 1e-12 * (1 + expected));
    }
}

TEST_CASE("invariant triple carries the three closed-form eigenvalues") {
    struct Case {
        StepTwoAlgebra algebra;
        CentralFunctional lambda;
    };
    std::vector<Case> cases;
    cases.push_back({StepTwoAlgebra::heisenberg(2), CentralFunctional{1.3}});
    cases.push_back({StepTwoAlgebra::double_heisenberg(1), CentralFunctional{3.0, 4.0}});
    cases.push_back({StepTwoAlgebra::double_heisenberg(2), CentralFunctional{1.0, 0.0}});

    for (auto& c : cases) {
        const int np = c.algebra.m / 2;
        const double L = c.lambda.norm();
        LinearRule lap = build_lap(c.algebra, c.lambda, 1);

        // beta = 0: the triple degenerates to two vectors but stays invariant.
        auto degenerate = invariant_triple(c.lambda, np, MultiIndex(std::vector<int>(np, 0)));
        REQUIRE(degenerate.size() == 2);
        CHECK(compress_onto(lap, degenerate).leak < 1e-9 * (1 + L * L));

        for (const MultiIndex& beta :
             {MultiIndex(std::vector<int>(np, 1)), MultiIndex::unit(np, 0, 2)}) {
            auto triple = invariant_triple(c.lambda, np, beta);
            REQUIRE(triple.size() == 3);
            const Compression comp = compress_onto(lap, triple);
            CHECK(comp.leak < 1e-9 * (1 + L * L));

            Eigen::ComplexEigenSolver<Matrix> solver(comp.matrix);
            std::vector<double> eigs;
            for (Eigen::Index i = 0; i < 3; ++i) {
                CHECK(std::abs(solver.eigenvalues()[i].imag()) < 1e-9);
                eigs.push_back(solver.eigenvalues()[i].real());
            }
            std::sort(eigs.begin(), eigs.end());

            const double mu = L * (2 * beta.total() + np) + L * L;
            std::vector<double> expected = {mu, mu + 0.5 * np - std::sqrt(0.25 * np * np + mu),
                                            mu + 0.5 * np + std::sqrt(0.25 * np * np + mu)};
            std::sort(expected.begin(), expected.end());
            for (int i = 0; i < 3; ++i)
                CHECK(eigs[i] == Approx(expected[i]).margin(1e-9 * (1 + std::abs(expected[i]))));
        }
    }
}

TEST_CASE("master regression: generic pipeline reproduces Heisenberg blocks") {
    for (int n : {1, 2}) {
        for (double k : {0.5, 1.0, 2.0}) {
            auto h = StepTwoAlgebra::heisenberg(n);
            LinearRule generic = build_lap(h, CentralFunctional{k}, 1);
            heisenberg::HeisenbergContext ctx(n, k, 1);
            LinearRule reference = heisenberg::build_laplacian(ctx, heisenberg::LapMode::Explicit);
            for (const auto& gamma : heisenberg::enumerate_gammas(ctx, 3)) {
                auto block = heisenberg::enumerate_block(ctx, gamma);
                const Matrix mg = matrix_of(generic, block.basis, block.basis, 1e-9);
                const Matrix mr = matrix_of(reference, block.basis, block.basis);
                CHECK(max_abs(Matrix(mg - mr)) < 1e-10 * (1 + k * k));
            }
        }
    }
}

TEST_CASE("lower bound |lambda|^2") {
    SECTION("degree 0: min is n'|l| + |l|^2") {
        auto d6 = StepTwoAlgebra::double_heisenberg(1);
        CentralFunctional lambda{3.0, 4.0};
        auto rep = lower_bound_check(d6, lambda, 0, 3);
        CHECK(rep.holds());
        CHECK(rep.min_eigenvalue == Approx(2 * 5.0 + 25.0).margin(1e-9));
    }
    SECTION("degree 1 on the Heisenberg instance") {
        auto h2 = StepTwoAlgebra::heisenberg(2);
        auto rep = lower_bound_check(h2, CentralFunctional{1.0}, 1, 3);
        CHECK(rep.holds());
    }
    SECTION("degree 1 on D^6 is strictly above the bound") {
        auto d6 = StepTwoAlgebra::double_heisenberg(1);
        CentralFunctional lambda{1.0, 0.0};
        auto rep = lower_bound_check(d6, lambda, 1, 3);
        CHECK(rep.holds());
        CHECK(rep.min_eigenvalue > rep.bound + 0.1);
    }
}

TEST_CASE("algebra JSON round trip and validation") {
    SECTION("round trip") {
        auto d = StepTwoAlgebra::double_heisenberg(2);
        auto back = algebra_from_json(algebra_to_json(d));
        REQUIRE(back.m == d.m);
        REQUIRE(back.l == d.l);
        for (int q = 0; q < d.l; ++q)
            CHECK((back.C[q] - d.C[q]).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("antisymmetry completed automatically") {
        nlohmann::json j = {{"m", 2}, {"l", 1}, {"C", {{1, 2, 1, 1.0}}}};
        auto a = algebra_from_json(j);
        CHECK(a.C[0](0, 1) == 1.0);
        CHECK(a.C[0](1, 0) == -1.0);
    }
    SECTION("inconsistent duplicates rejected") {
        nlohmann::json j = {{"m", 2}, {"l", 1}, {"C", {{1, 2, 1, 1.0}, {2, 1, 1, 1.0}}}};
        CHECK_THROWS_AS(algebra_from_json(j), std::invalid_argument);
        nlohmann::json ok = {{"m", 2}, {"l", 1}, {"C", {{1, 2, 1, 1.0}, {2, 1, 1, -1.0}}}};
        CHECK_NOTHROW(algebra_from_json(ok));
    }
    SECTION("degenerate centre warning flag") {
        StepTwoAlgebra degen(4, 1);
        degen.set_bracket(1, 2, 1, 1.0);
        CHECK(degen.has_degenerate_direction());
        CHECK_FALSE(StepTwoAlgebra::heisenberg(2).has_degenerate_direction());
    }
}
