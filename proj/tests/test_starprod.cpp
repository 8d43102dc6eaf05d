#include <doctest.h>

#include <cmath>
#include <random>

#include "sicforge/qubitlab.hpp"
#include "sicforge/sic.hpp"
#include "sicforge/spintomo.hpp"
#include "sicforge/starprod.hpp"

using namespace sicforge;
using qmat::Complex;
using qmat::Matrix;

namespace {

Matrix random_matrix(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = Complex(g(rng), g(rng));
    return m;
}

// A self-dual scheme: the orthonormal Pauli basis with D = U.
starprod::Scheme pauli_basis_scheme() {
    const auto ops = qmat::spin_operators(0.5);
    starprod::Scheme s;
    s.label = "pauli-basis";
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Matrix> basis = {inv_sqrt2 * Matrix::Identity(2, 2), std::sqrt(2.0) * ops[0],
                                 std::sqrt(2.0) * ops[1], std::sqrt(2.0) * ops[2]};
    for (std::size_t i = 0; i < basis.size(); ++i) {
        s.points.push_back({{static_cast<double>(i)}});
        s.dequantizers.push_back(basis[i]);
        s.quantizers.push_back(basis[i]);
        s.weights.push_back(1.0);
    }
    s.validate();
    return s;
}

}  // namespace

TEST_CASE("symbols of simple operators under the qubit SIC scheme") {
    const sic::SicSet set = qubitlab::canonical_sic();
    const starprod::Scheme s = sic::sic_scheme(set);

    const starprod::Symbol f_id = starprod::symbol(Matrix::Identity(2, 2), s);
    for (Eigen::Index x = 0; x < 4; ++x) CHECK(std::abs(f_id.values(x) - 0.5) < 1e-14);

    const starprod::Symbol f_mixed = starprod::symbol(0.5 * Matrix::Identity(2, 2), s);
    for (Eigen::Index x = 0; x < 4; ++x) CHECK(std::abs(f_mixed.values(x) - 0.25) < 1e-14);

    const starprod::Symbol f_pi1 = starprod::symbol(set.projectors[0], s);
    CHECK(std::abs(f_pi1.values(0) - 0.5) < 1e-13);
    for (Eigen::Index x = 1; x < 4; ++x) CHECK(std::abs(f_pi1.values(x) - 1.0 / 6.0) < 1e-13);

    Matrix wrong(3, 3);
    CHECK_THROWS_AS(starprod::symbol(wrong, s), std::invalid_argument);
}

TEST_CASE("reconstruction is the identity map on the operator space") {
    const starprod::Scheme s = sic::sic_scheme(qubitlab::canonical_sic());
    CHECK(starprod::reconstruction_residual(s) < 1e-12);

    std::mt19937_64 rng(3);
    const Matrix a = random_matrix(2, rng);
    const Matrix h = a + Matrix(a.adjoint());
    CHECK(qmat::max_abs(starprod::reconstruct(starprod::symbol(h, s), s) - h) < 1e-12);

    // Constant symbol 1/d² reconstructs to I/d.
    starprod::Symbol flat;
    flat.scheme_label = s.label;
    flat.values = Eigen::VectorXcd::Constant(4, Complex(0.25, 0.0));
    CHECK(qmat::max_abs(starprod::reconstruct(flat, s) - 0.5 * Matrix::Identity(2, 2)) < 1e-13);

    starprod::Symbol alien;
    alien.scheme_label = "other";
    alien.values = flat.values;
    CHECK_THROWS_AS(starprod::reconstruct(alien, s), std::invalid_argument);
}

TEST_CASE("delta kernel: Kronecker for SIC, reproducing for FNR, identity for a self-dual basis") {
    const starprod::Scheme s = sic::sic_scheme(qubitlab::canonical_sic());
    const Eigen::MatrixXcd dk = starprod::delta_kernel(s);
    for (Eigen::Index a = 0; a < 4; ++a)
        for (Eigen::Index b = 0; b < 4; ++b)
            CHECK(std::abs(dk(a, b) - ((a == b) ? 1.0 : 0.0)) < 1e-13);

    const starprod::Scheme fnr =
        spintomo::fnr_scheme(0.5, spintomo::default_fnr_directions(0.5));
    CHECK(starprod::delta_reproduction_residual(fnr) < 1e-11);

    const starprod::Scheme basis = pauli_basis_scheme();
    const Eigen::MatrixXcd dk2 = starprod::delta_kernel(basis);
    for (Eigen::Index a = 0; a < 4; ++a)
        for (Eigen::Index b = 0; b < 4; ++b)
            CHECK(std::abs(dk2(a, b) - ((a == b) ? 1.0 : 0.0)) < 1e-13);
}

TEST_CASE("qubit SIC kernel closed-form entries") {
    const sic::SicSet set = qubitlab::canonical_sic();
    const starprod::Scheme s = sic::sic_scheme(set);
    const starprod::KernelTensor k = starprod::kernel(s);

    // K_112 = (1/2)(3 - 0 - 1) = 1 (no epsilon term when two indices agree).
    CHECK(std::abs(k.at(0, 0, 1) - Complex(1.0, 0.0)) < 1e-13);

    // Full closed form with the labeling-dependent epsilon sign.
    const auto closed = qubitlab::qubit_closed_forms(set);
    double diff = 0.0;
    for (std::size_t i = 0; i < k.entries.size(); ++i) {
        diff = std::max(diff, std::abs(k.entries[i] - closed.k.entries[i]));
    }
    CHECK(diff < 1e-12);
}

TEST_CASE("dual kernel: closed form for the qubit SIC and K for a self-dual scheme") {
    const sic::SicSet set = qubitlab::canonical_sic();
    const starprod::Scheme s = sic::sic_scheme(set);
    const starprod::KernelTensor kd = starprod::dual_kernel(s);

    // K^dual_111 = (1/12)(1 + 6 - 1) = 1/2.
    CHECK(std::abs(kd.at(0, 0, 0) - Complex(0.5, 0.0)) < 1e-13);

    const auto closed = qubitlab::qubit_closed_forms(set);
    double diff = 0.0;
    for (std::size_t i = 0; i < kd.entries.size(); ++i) {
        diff = std::max(diff, std::abs(kd.entries[i] - closed.k_dual.entries[i]));
    }
    CHECK(diff < 1e-12);

    const starprod::Scheme basis = pauli_basis_scheme();
    const starprod::KernelTensor k = starprod::kernel(basis);
    const starprod::KernelTensor kd2 = starprod::dual_kernel(basis);
    double self_dual_diff = 0.0;
    for (std::size_t i = 0; i < k.entries.size(); ++i) {
        self_dual_diff = std::max(self_dual_diff, std::abs(k.entries[i] - kd2.entries[i]));
    }
    CHECK(self_dual_diff < 1e-14);
}

TEST_CASE("star product is the symbol of the operator product") {
    const starprod::Scheme s = sic::sic_scheme(qubitlab::canonical_sic());
    const starprod::KernelTensor k = starprod::kernel(s);
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix a = random_matrix(2, rng);
        const Matrix b = random_matrix(2, rng);
        const starprod::Symbol fa = starprod::symbol(a, s);
        const starprod::Symbol fb = starprod::symbol(b, s);
        const starprod::Symbol fab = starprod::star(fa, fb, k);
        const starprod::Symbol expected = starprod::symbol(a * b, s);
        CHECK((fab.values - expected.values).cwiseAbs().maxCoeff() < 1e-10);
    }

    // Identity symbol is the star unit; projector symbols are star-idempotent.
    const starprod::Symbol f_id = starprod::symbol(Matrix::Identity(2, 2), s);
    const starprod::Symbol f_pi = starprod::symbol(qubitlab::canonical_sic().projectors[0], s);
    CHECK((starprod::star(f_id, f_id, k).values - f_id.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((starprod::star(f_id, f_pi, k).values - f_pi.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((starprod::star(f_pi, f_pi, k).values - f_pi.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("associativity residuals vanish for true schemes and flag corruption") {
    const starprod::Scheme s = sic::sic_scheme(qubitlab::canonical_sic());
    starprod::KernelTensor k = starprod::kernel(s);
    CHECK(starprod::check_assoc3(k) < 1e-10);
    CHECK(starprod::check_assoc4(k) < 1e-9);

    const starprod::Scheme fnr =
        spintomo::fnr_scheme(0.5, spintomo::default_fnr_directions(0.5));
    const starprod::KernelTensor kf = starprod::kernel(fnr);
    CHECK(starprod::check_assoc3(kf) < 1e-10);
    CHECK(starprod::check_assoc4(kf) < 1e-9);

    k.at(0, 1, 2) += 0.1;
    CHECK(starprod::check_assoc3(k) > 0.01);

    starprod::KernelTensor junk;
    junk.scheme_label = "junk";
    junk.n = 3;
    junk.entries.assign(27, Complex(0.3, -0.2));
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& e : junk.entries) e = Complex(g(rng), g(rng));
    CHECK(starprod::check_assoc4(junk) > 1e-3);
}

TEST_CASE("the dual scheme reconstructs identically") {
    const starprod::Scheme s = sic::sic_scheme(qubitlab::canonical_sic());
    const starprod::Scheme d = starprod::dual_scheme(s);
    CHECK(starprod::reconstruction_residual(d) < 1e-12);

    // Dual symbols through the dual scheme agree with Tr[A D(x)].
    std::mt19937_64 rng(21);
    const Matrix a = random_matrix(2, rng);
    const starprod::Symbol fd = starprod::symbol(a, d);
    for (std::size_t x = 0; x < s.size(); ++x) {
        CHECK(std::abs(fd.values(static_cast<Eigen::Index>(x)) - (a * s.quantizers[x]).trace()) <
              1e-13);
    }
}

TEST_CASE("scheme validation catches inconsistent construction") {
    starprod::Scheme s;
    s.label = "broken";
    s.points.push_back({{0.0}});
    s.dequantizers.push_back(Matrix::Identity(2, 2));
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
