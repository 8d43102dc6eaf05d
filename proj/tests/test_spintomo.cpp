#include <doctest.h>

#include <cmath>
#include <random>

#include "sicforge/qubitlab.hpp"
#include "sicforge/spintomo.hpp"
#include "sicforge/starprod.hpp"

using namespace sicforge;
using qmat::Complex;
using qmat::Direction;
using qmat::Matrix;

namespace {

Matrix random_density(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
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

TEST_CASE("continuous-scheme dequantizer/quantizer closed forms at j=1/2") {
    std::mt19937_64 rng(2);
    const auto ops = qmat::spin_operators(0.5);
    for (int rep = 0; rep < 5; ++rep) {
        const Direction n = random_direction(rng);
        const Matrix jn = n.n.x() * ops[0] + n.n.y() * ops[1] + n.n.z() * ops[2];
        for (double m : {0.5, -0.5}) {
            const Matrix u = spintomo::spin_dequantizer(0.5, m, n);
            CHECK(qmat::max_abs(u - (0.5 * Matrix::Identity(2, 2) + 2.0 * m * jn)) < 1e-13);
            const Matrix dq = spintomo::spin_quantizer(0.5, m, n);
            CHECK(qmat::max_abs(dq - (0.5 * Matrix::Identity(2, 2) + 6.0 * m * jn)) < 1e-13);
        }
    }
}

TEST_CASE("spin tomogram of eigenstates and normalization") {
    // |1/2, +1/2> measured along z: w(+1/2) = 1, w(-1/2) = 0.
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    const Direction z = Direction::from_cartesian(0.0, 0.0, 1.0);
    CHECK(std::abs((rho * spintomo::spin_dequantizer(0.5, 0.5, z)).trace() - 1.0) < 1e-13);
    CHECK(std::abs((rho * spintomo::spin_dequantizer(0.5, -0.5, z)).trace()) < 1e-13);

    std::mt19937_64 rng(4);
    for (double j : {0.5, 1.0}) {
        const int d = qmat::spin_dimension(j);
        const Matrix state = random_density(d, rng);
        for (int rep = 0; rep < 4; ++rep) {
            const Direction n = random_direction(rng);
            Complex total(0.0, 0.0);
            Matrix usum = Matrix::Zero(d, d);
            for (int a = 0; a < d; ++a) {
                const Matrix u = spintomo::spin_dequantizer(j, j - a, n);
                usum += u;
                total += (state * u).trace();
            }
            CHECK(std::abs(total - 1.0) < 1e-12);
            CHECK(qmat::max_abs(usum - Matrix::Identity(d, d)) < 1e-12);
        }
    }
}

TEST_CASE("continuous scheme reconstructs and reproduces") {
    for (double j : {0.5, 1.0}) {
        const starprod::Scheme s = spintomo::continuous_scheme(j);
        CHECK(starprod::reconstruction_residual(s) < 1e-10);
        CHECK(starprod::delta_reproduction_residual(s) < 1e-10);
    }
}

TEST_CASE("continuous tomogram values are nonnegative probabilities") {
    std::mt19937_64 rng(8);
    for (double j : {0.5, 1.0}) {
        const starprod::Scheme s = spintomo::continuous_scheme(j);
        double min_value = 1.0;
        double max_imag = 0.0;
        for (int rep = 0; rep < 1000; ++rep) {
            const Matrix rho = random_density(qmat::spin_dimension(j), rng);
            const starprod::Symbol w = spintomo::tomogram(rho, s);
            for (Eigen::Index x = 0; x < w.values.size(); ++x) {
                min_value = std::min(min_value, w.values(x).real());
                max_imag = std::max(max_imag, std::abs(w.values(x).imag()));
            }
        }
        CHECK(min_value > -1e-12);
        CHECK(max_imag < 1e-10);
    }
}

TEST_CASE("tomogram of the maximally mixed qubit is flat") {
    const starprod::Scheme s = spintomo::continuous_scheme(0.5);
    const starprod::Symbol w = spintomo::tomogram(0.5 * Matrix::Identity(2, 2), s);
    for (Eigen::Index x = 0; x < w.values.size(); ++x) CHECK(std::abs(w.values(x) - 0.5) < 1e-13);
}

TEST_CASE("qubit tomogram closed form w = (1 + r.n)/2") {
    const sic::SicSet set = qubitlab::canonical_sic();
    const auto param = qubitlab::param_from_set(set);
    const Direction n = Direction::from_cartesian(Eigen::Vector3d{1.0, 1.0, 1.0}.normalized());
    const double w = (set.projectors[0] * spintomo::spin_dequantizer(0.5, 0.5, n)).trace().real();
    CHECK(w == doctest::Approx(0.5 * (1.0 + param.bloch[0].dot(n.n))).epsilon(1e-12));
}

TEST_CASE("FNR M matrix for the orthonormal triad is the identity") {
    const spintomo::DirectionSet triad = spintomo::default_fnr_directions(0.5);
    REQUIRE(triad.count() == 3);
    const Eigen::MatrixXd m = spintomo::fnr_m_matrix(1, triad);
    CHECK((m - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("FNR scheme reconstructs for j = 1/2, 1, 3/2") {
    for (double j : {0.5, 1.0, 1.5}) {
        const spintomo::DirectionSet ds = spintomo::default_fnr_directions(j);
        CHECK(ds.count() == static_cast<std::size_t>(std::lround(4 * j + 1)));
        const starprod::Scheme s = spintomo::fnr_scheme(j, ds);
        CHECK(starprod::reconstruction_residual(s) < 1e-9);
        CHECK(starprod::delta_reproduction_residual(s) < 1e-9);
    }
}

TEST_CASE("FNR tomogram round trip recovers the state") {
    std::mt19937_64 rng(12);
    const starprod::Scheme s = spintomo::fnr_scheme(0.5, spintomo::default_fnr_directions(0.5));
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix rho = random_density(2, rng);
        const starprod::Symbol w = spintomo::tomogram(rho, s);
        CHECK(qmat::max_abs(starprod::reconstruct(w, s) - rho) < 1e-10);
    }
}

TEST_CASE("degenerate direction sets are rejected with the offending level") {
    spintomo::DirectionSet coplanar;
    for (int k = 0; k < 3; ++k) {
        const double phi = 2.0 * M_PI * k / 3.0;
        coplanar.directions.push_back(Direction::from_angles(M_PI / 2.0, phi));
    }
    try {
        spintomo::fnr_scheme(0.5, coplanar);
        FAIL("expected IllPosedDirections");
    } catch (const spintomo::IllPosedDirections& e) {
        CHECK(e.level() == 1);
        CHECK(e.cond() > spintomo::kCondMax);
    }

    spintomo::DirectionSet wrong_count;
    wrong_count.directions.push_back(Direction::from_cartesian(0.0, 0.0, 1.0));
    CHECK_THROWS_AS(spintomo::fnr_scheme(0.5, wrong_count), std::invalid_argument);
}

TEST_CASE("density-matrix validation") {
    Matrix not_unit = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(spintomo::validate_density_matrix(not_unit), std::invalid_argument);

    Matrix negative(2, 2);
    negative << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(spintomo::validate_density_matrix(negative), std::invalid_argument);

    Matrix fine = 0.5 * Matrix::Identity(2, 2);
    CHECK_NOTHROW(spintomo::validate_density_matrix(fine));
}

TEST_CASE("repulsion sets avoid antipodal and coplanar degeneracies") {
    for (std::size_t count : {5, 7}) {
        const spintomo::DirectionSet ds = spintomo::spread_directions(count, 99);
        REQUIRE(ds.count() == count);
        for (std::size_t a = 0; a < count; ++a) {
            for (std::size_t b = a + 1; b < count; ++b) {
                CHECK(std::abs(ds.directions[a].dot(ds.directions[b])) < 0.999);
            }
        }
    }
    // Determinism: same seed, same points.
    const auto a = spintomo::spread_directions(5, 42);
    const auto b = spintomo::spread_directions(5, 42);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK((a.directions[k].n - b.directions[k].n).norm() == 0.0);
    }
}
