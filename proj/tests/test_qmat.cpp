#include <doctest.h>

#include <cmath>
#include <random>

#include "sicforge/qmat.hpp"

using namespace sicforge;
using qmat::Complex;
using qmat::Direction;
using qmat::Matrix;

namespace {

// Independent oracle: Gram-Schmidt on monomials over the N-point grid, with
// the sign fixed by a positive leading coefficient and the norm matching
// chebyshev_norm.
double chebyshev_oracle(int L, double x, int N) {
    std::vector<std::vector<double>> basis;  // values on the grid
    std::vector<std::vector<double>> coeffs;
    for (int deg = 0; deg <= L; ++deg) {
        std::vector<double> v(static_cast<std::size_t>(N));
        std::vector<double> c(static_cast<std::size_t>(deg) + 1, 0.0);
        c[static_cast<std::size_t>(deg)] = 1.0;
        for (int g = 0; g < N; ++g) v[static_cast<std::size_t>(g)] = std::pow(g, deg);
        for (int prev = 0; prev < deg; ++prev) {
            double dot = 0.0, nrm = 0.0;
            for (int g = 0; g < N; ++g) {
                dot += v[static_cast<std::size_t>(g)] * basis[static_cast<std::size_t>(prev)][static_cast<std::size_t>(g)];
                nrm += basis[static_cast<std::size_t>(prev)][static_cast<std::size_t>(g)] *
                       basis[static_cast<std::size_t>(prev)][static_cast<std::size_t>(g)];
            }
            const double f = dot / nrm;
            for (int g = 0; g < N; ++g) {
                v[static_cast<std::size_t>(g)] -= f * basis[static_cast<std::size_t>(prev)][static_cast<std::size_t>(g)];
            }
            for (std::size_t a = 0; a < coeffs[static_cast<std::size_t>(prev)].size(); ++a) {
                c[a] -= f * coeffs[static_cast<std::size_t>(prev)][a];
            }
        }
        basis.push_back(v);
        coeffs.push_back(c);
    }
    double norm2 = 0.0;
    for (int g = 0; g < N; ++g) {
        norm2 += basis[static_cast<std::size_t>(L)][static_cast<std::size_t>(g)] *
                 basis[static_cast<std::size_t>(L)][static_cast<std::size_t>(g)];
    }
    double value = 0.0;
    for (std::size_t a = 0; a < coeffs[static_cast<std::size_t>(L)].size(); ++a) {
        value += coeffs[static_cast<std::size_t>(L)][a] * std::pow(x, static_cast<double>(a));
    }
    return value / std::sqrt(norm2) * qmat::chebyshev_norm(L, N);
}

Direction random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Vector3d v;
    do {
        v = {g(rng), g(rng), g(rng)};
    } while (v.norm() < 1e-6);
    return Direction::from_cartesian(v.normalized());
}

}  // namespace

TEST_CASE("discrete Chebyshev convention locked by the j=1/2 values") {
    // t_0 = 1 everywhere, t_1(x,2) = 2x-1.
    CHECK(qmat::discrete_chebyshev(0, 0.7, 5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(qmat::discrete_chebyshev(1, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(qmat::discrete_chebyshev(1, 0.0, 2) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(qmat::f_coeff(0, 0.5, 0.5) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(qmat::f_coeff(0, 0.5, -0.5) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(qmat::f_coeff(1, 0.5, 0.5) == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-14));
}

TEST_CASE("t_2(x,3) matches the Gram-Schmidt oracle on the grid") {
    for (double x : {0.0, 1.0, 2.0, 0.3, -1.2}) {
        CHECK(qmat::discrete_chebyshev(2, x, 3) ==
              doctest::Approx(chebyshev_oracle(2, x, 3)).epsilon(1e-12));
    }
    // Also a higher-degree spot check.
    for (double x : {0.0, 2.5, 4.0}) {
        CHECK(qmat::discrete_chebyshev(3, x, 6) ==
              doctest::Approx(chebyshev_oracle(3, x, 6)).epsilon(1e-12));
    }
}

TEST_CASE("domain errors for the grid polynomials") {
    CHECK_THROWS_AS(qmat::discrete_chebyshev(5, 0.0, 5), std::domain_error);
    CHECK_THROWS_AS(qmat::f_coeff(2, 0.5, 0.5), std::domain_error);
}

TEST_CASE("f_L orthonormality by direct summation") {
    for (int two_j = 1; two_j <= 5; ++two_j) {
        const double j = two_j / 2.0;
        for (int l1 = 0; l1 <= two_j; ++l1) {
            for (int l2 = 0; l2 <= two_j; ++l2) {
                double acc = 0.0;
                for (int a = 0; a <= two_j; ++a) acc += qmat::f_coeff(l1, j, -j + a) * qmat::f_coeff(l2, j, -j + a);
                CHECK(acc == doctest::Approx(l1 == l2 ? 1.0 : 0.0).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("spin operators: Pauli at j=1/2, diagonal J_z at j=1, su(2) algebra") {
    const auto half = qmat::spin_operators(0.5);
    CHECK(std::abs(half[0](0, 1) - Complex(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(half[1](0, 1) - Complex(0.0, -0.5)) < 1e-15);
    CHECK(std::abs(half[2](0, 0) - Complex(0.5, 0.0)) < 1e-15);

    const auto one = qmat::spin_operators(1.0);
    CHECK(std::abs(one[2](0, 0) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(one[2](1, 1)) < 1e-15);
    CHECK(std::abs(one[2](2, 2) - Complex(-1.0, 0.0)) < 1e-15);

    for (double j : {0.5, 1.0, 1.5, 2.5}) {
        const auto ops = qmat::spin_operators(j);
        const Complex i(0.0, 1.0);
        CHECK(qmat::max_abs(ops[0] * ops[1] - ops[1] * ops[0] - i * ops[2]) < 1e-12);
        CHECK(qmat::max_abs(ops[1] * ops[2] - ops[2] * ops[1] - i * ops[0]) < 1e-12);
        CHECK(qmat::max_abs(ops[2] * ops[0] - ops[0] * ops[2] - i * ops[1]) < 1e-12);
    }

    const auto j32 = qmat::spin_operators(1.5);
    const Matrix casimir = j32[0] * j32[0] + j32[1] * j32[1] + j32[2] * j32[2];
    CHECK(qmat::max_abs(casimir - 1.5 * 2.5 * Matrix::Identity(4, 4)) < 1e-12);
}

TEST_CASE("(J.n) spectrum is the exact multiset {-j..j}") {
    std::mt19937_64 rng(7);
    for (double j : {0.5, 1.0, 2.5}) {
        const auto ops = qmat::spin_operators(j);
        for (int rep = 0; rep < 5; ++rep) {
            const Direction n = random_direction(rng);
            const Matrix jn = n.n.x() * ops[0] + n.n.y() * ops[1] + n.n.z() * ops[2];
            Eigen::SelfAdjointEigenSolver<Matrix> solver(jn);
            for (Eigen::Index a = 0; a < solver.eigenvalues().size(); ++a) {
                CHECK(std::abs(solver.eigenvalues()(a) - (-j + static_cast<double>(a))) < 1e-10);
            }
        }
    }
}

TEST_CASE("S_L(n) closed forms at j=1/2") {
    std::mt19937_64 rng(11);
    const Direction n = random_direction(rng);
    const Matrix s0 = qmat::s_operator(0, 0.5, n);
    CHECK(qmat::max_abs(s0 - Matrix::Identity(2, 2) / std::sqrt(2.0)) < 1e-13);

    const Direction z = Direction::from_cartesian(0.0, 0.0, 1.0);
    const Matrix s1 = qmat::s_operator(1, 0.5, z);
    const auto ops = qmat::spin_operators(0.5);
    CHECK(qmat::max_abs(s1 - std::sqrt(2.0) * ops[2]) < 1e-13);
}

TEST_CASE("Tr[S_L(n) S_L'(n')] = delta_LL' P_L(n.n')") {
    std::mt19937_64 rng(13);
    for (double j : {0.5, 1.0, 1.5}) {
        const int two_j = static_cast<int>(std::lround(2 * j));
        for (int rep = 0; rep < 4; ++rep) {
            const Direction n = random_direction(rng);
            const Direction np = random_direction(rng);
            for (int l1 = 0; l1 <= two_j; ++l1) {
                for (int l2 = 0; l2 <= two_j; ++l2) {
                    const Complex tr =
                        (qmat::s_operator(l1, j, n) * qmat::s_operator(l2, j, np)).trace();
                    const double expected = (l1 == l2) ? qmat::legendre(l1, 0, n.dot(np)) : 0.0;
                    CHECK(std::abs(tr - expected) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("trace of S_L(n) is sqrt(2j+1) delta_L0") {
    std::mt19937_64 rng(17);
    const Direction n = random_direction(rng);
    for (double j : {0.5, 1.5}) {
        const int two_j = static_cast<int>(std::lround(2 * j));
        for (int L = 0; L <= two_j; ++L) {
            const Complex tr = qmat::s_operator(L, j, n).trace();
            CHECK(std::abs(tr - (L == 0 ? std::sqrt(two_j + 1.0) : 0.0)) < 1e-12);
        }
    }
}

TEST_CASE("Legendre values and the associated-function sign convention") {
    CHECK(qmat::legendre(0, 0, 0.3) == doctest::Approx(1.0));
    CHECK(qmat::legendre(1, 0, 0.5) == doctest::Approx(0.5));
    // P_2^1(x) = -3 x sqrt(1-x^2) with the Condon-Shortley phase.
    const double x = 0.3;
    CHECK(qmat::legendre(2, 1, x) == doctest::Approx(-3.0 * x * std::sqrt(1.0 - x * x)).epsilon(1e-13));
    CHECK_THROWS_AS(qmat::legendre(2, 1, 1.5), std::domain_error);
    CHECK_THROWS_AS(qmat::legendre(2, 3, 0.5), std::domain_error);

    // Stability spot check at high degree against the generating recurrence
    // invariant |P_L(x)| <= 1 on [-1,1].
    for (double xv : {-0.9, 0.1, 0.7}) {
        CHECK(std::abs(qmat::legendre(200, 0, xv)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("psd_check") {
    CHECK(qmat::psd_check(Matrix::Identity(2, 2)) == std::pair<bool, double>{true, 1.0});
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1e-3;
    const auto [ok, min_eig] = qmat::psd_check(m);
    CHECK_FALSE(ok);
    CHECK(min_eig == doctest::Approx(-1e-3));

    Matrix bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(qmat::psd_check(bad), std::invalid_argument);
}

TEST_CASE("direction construction and validation") {
    const Direction d = Direction::from_angles(1.1, 2.2);
    CHECK(d.n.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const Direction back = Direction::from_cartesian(d.n);
    CHECK(back.theta == doctest::Approx(d.theta).epsilon(1e-12));
    CHECK(back.phi == doctest::Approx(d.phi).epsilon(1e-12));
    CHECK_THROWS_AS(Direction::from_cartesian(1.0, 1.0, 1.0), std::invalid_argument);
}
