#include <doctest.h>

#include <cmath>
#include <random>

#include "sicforge/qubitlab.hpp"
#include "sicforge/sic.hpp"
#include "sicforge/sicsearch.hpp"
#include "sicforge/starprod.hpp"

using namespace sicforge;
using qmat::Complex;
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

// One d=3 set from the optimizer, shared across the test cases below.
const sic::SicSet& searched_d3() {
    static const sic::SicSet set = [] {
        sicsearch::SearchConfig cfg;
        cfg.seed = 1;
        const auto gf = sicsearch::gram_factors(3);
        const auto state = sicsearch::optimize(gf, cfg);
        REQUIRE(state.converged);
        return sic::make_sic_set(sicsearch::build_candidate(gf, state.qtilde), 1e-6);
    }();
    return set;
}

}  // namespace

TEST_CASE("verify: canonical set passes tightly, corrupted sets fail with named residuals") {
    const auto canonical = qubitlab::canonical_sic();
    CHECK(canonical.verification.pass);
    CHECK(canonical.verification.max_residual() < 1e-12);
    CHECK(canonical.verification.trace_power2 < 1e-13);
    CHECK(canonical.verification.trace_power3 < 1e-13);

    auto broken = canonical.projectors;
    broken[3] = 0.5 * Matrix::Identity(2, 2);
    const auto rep = sic::verify(broken, 1e-10);
    CHECK_FALSE(rep.pass);
    CHECK(rep.idempotence > 0.2);     // (I/2)² - I/2 = -I/4
    CHECK(rep.pairwise_trace > 0.1);  // Tr[Π_i I/2] = 1/2, not 1/3
    CHECK(rep.hermiticity < 1e-14);
    CHECK(rep.positivity < 1e-14);

    CHECK_THROWS_AS(sic::verify({Matrix::Identity(2, 2)}, 1e-10), std::invalid_argument);
}

TEST_CASE("verify accepts d=3 optimizer output at 1e-6") {
    const auto& set = searched_d3();
    CHECK(set.verification.pass);
    CHECK(set.verification.tolerance == 1e-6);
}

TEST_CASE("the SIC scheme: dequantizer sum, quantizer sum, Kronecker delta") {
    const sic::SicSet canonical_set = qubitlab::canonical_sic();
    for (const sic::SicSet* set : {&canonical_set, &searched_d3()}) {
        const int d = set->dim;
        const starprod::Scheme s = sic::sic_scheme(*set);
        Matrix u_sum = Matrix::Zero(d, d), d_sum = Matrix::Zero(d, d);
        for (std::size_t x = 0; x < s.size(); ++x) {
            u_sum += s.dequantizers[x];
            d_sum += s.quantizers[x];
        }
        CHECK(qmat::max_abs(u_sum - Matrix::Identity(d, d)) < 1e-9);
        // Σ D_i = (d+1)·d·I - d²·I = d·I.
        CHECK(qmat::max_abs(d_sum - static_cast<double>(d) * Matrix::Identity(d, d)) < 1e-9);

        const Eigen::MatrixXcd dk = starprod::delta_kernel(s);
        double res = 0.0;
        for (Eigen::Index a = 0; a < dk.rows(); ++a)
            for (Eigen::Index b = 0; b < dk.cols(); ++b)
                res = std::max(res, std::abs(dk(a, b) - ((a == b) ? 1.0 : 0.0)));
        CHECK(res < 1e-9);
    }

    sic::SicSet unverified;
    unverified.dim = 2;
    unverified.projectors = qubitlab::canonical_sic().projectors;
    CHECK_THROWS_AS(sic::sic_scheme(unverified), std::invalid_argument);
}

TEST_CASE("probabilities of simple states") {
    const auto set = qubitlab::canonical_sic();
    const Eigen::VectorXd flat = sic::probabilities(0.5 * Matrix::Identity(2, 2), set);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(flat(i) == doctest::Approx(0.25).epsilon(1e-13));

    const Eigen::VectorXd p = sic::probabilities(set.projectors[0], set);
    CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-13));
    for (Eigen::Index i = 1; i < 4; ++i) CHECK(p(i) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));

    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 16; ++rep) {
        const Eigen::VectorXd q = sic::probabilities(random_density(2, rng), set);
        CHECK(std::abs(q.sum() - 1.0) < 1e-12);
        CHECK(q.minCoeff() > -1e-12);
        CHECK(q.maxCoeff() < 0.5 + 1e-12);
    }

    CHECK_THROWS_AS(sic::probabilities(Matrix::Identity(2, 2), set), std::invalid_argument);
}

TEST_CASE("state reconstruction round trips; flat vector gives I/d; vertices leave the state space") {
    std::mt19937_64 rng(37);
    const sic::SicSet canonical_set = qubitlab::canonical_sic();
    for (const sic::SicSet* set : {&canonical_set, &searched_d3()}) {
        const int d = set->dim;
        const Eigen::VectorXd flat = Eigen::VectorXd::Constant(d * d, 1.0 / (d * d));
        CHECK(qmat::max_abs(sic::reconstruct_state(flat, *set) -
                            Matrix::Identity(d, d) / static_cast<double>(d)) < 1e-9);
        for (int rep = 0; rep < 100; ++rep) {
            const Matrix rho = random_density(d, rng);
            const Matrix back = sic::reconstruct_state(sic::probabilities(rho, *set), *set);
            CHECK(qmat::max_abs(back - rho) < 1e-10);
        }
    }

    // A simplex vertex reconstructs to 3Π_1 - I, which is not PSD.
    const auto set = qubitlab::canonical_sic();
    Eigen::VectorXd vertex = Eigen::VectorXd::Zero(4);
    vertex(0) = 1.0;
    const Matrix rho = sic::reconstruct_state(vertex, set);
    CHECK(qmat::max_abs(rho - (3.0 * set.projectors[0] - Matrix::Identity(2, 2))) < 1e-13);
    CHECK(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-13);
    const auto [psd, min_eig] = qmat::psd_check(rho);
    CHECK_FALSE(psd);
    CHECK(min_eig < -0.5);

    Eigen::VectorXd off(4);
    off << 0.5, 0.5, 0.5, 0.5;
    CHECK_THROWS_AS(sic::reconstruct_state(off, set), std::invalid_argument);
}

TEST_CASE("inverse portrait: marginals and the relation to SIC probabilities") {
    std::mt19937_64 rng(41);
    const sic::SicSet canonical_set = qubitlab::canonical_sic();
    for (const sic::SicSet* set : {&canonical_set, &searched_d3()}) {
        const int d = set->dim;
        const Matrix rho = random_density(d, rng);
        const Eigen::MatrixXd portrait = sic::inverse_portrait(rho, *set);
        REQUIRE(portrait.rows() == d);
        REQUIRE(portrait.cols() == d * d);
        for (Eigen::Index i = 0; i < portrait.cols(); ++i) {
            CHECK(portrait.col(i).sum() == doctest::Approx(1.0 / (d * d)).epsilon(1e-10));
        }
        CHECK(portrait.sum() == doctest::Approx(1.0).epsilon(1e-10));
        // p_i = d * P(m=j, i); the m=+j row is the first one in basis order.
        // Exact for exact rank-1 projectors, so the optimizer set inherits
        // its verification tolerance.
        const double tol = (d == 2) ? 1e-12 : 1e-5;
        const Eigen::VectorXd p = sic::probabilities(rho, *set);
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            CHECK(p(i) == doctest::Approx(d * portrait(0, i)).epsilon(tol));
        }
    }

    sic::SicSet no_fiducials = qubitlab::canonical_sic();
    no_fiducials.fiducials.clear();
    CHECK_THROWS_AS(sic::inverse_portrait(0.5 * Matrix::Identity(2, 2), no_fiducials),
                    std::invalid_argument);
}

TEST_CASE("triple products: unit diagonal, pairwise values, symmetry, explicit entry") {
    const auto set = qubitlab::canonical_sic();
    const auto t = sic::triple_products(set);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(t.at(i, i, i) - Complex(1.0, 0.0)) < 1e-13);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            CHECK(std::abs(t.at(i, i, j) - Complex(1.0 / 3.0, 0.0)) < 1e-13);
        }
    // T_123 for the reference labeling is purely imaginary of magnitude 1/(3√3);
    // the direct trace fixes the sign (+ for this det class).
    CHECK(t.at(0, 1, 2).real() == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(t.at(0, 1, 2).imag() == doctest::Approx(1.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-12));

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                CHECK(std::abs(t.at(i, j, k) - t.at(j, k, i)) < 1e-12);             // cyclic
                CHECK(std::abs(std::conj(t.at(i, j, k)) - t.at(k, j, i)) < 1e-12);  // reversal
            }
}

TEST_CASE("kernel from T agrees with the direct scheme kernels (two routes)") {
    const sic::SicSet canonical_set = qubitlab::canonical_sic();
    for (const sic::SicSet* set : {&canonical_set, &searched_d3()}) {
        const double tol = (set->dim == 2) ? 1e-12 : 1e-8;
        const auto t = sic::triple_products(*set);
        const starprod::Scheme s = sic::sic_scheme(*set);
        const auto k_direct = starprod::kernel(s);
        const auto k_from_t = sic::kernel_from_T(t, false);
        const auto kd_direct = starprod::dual_kernel(s);
        const auto kd_from_t = sic::kernel_from_T(t, true);
        double diff = 0.0, diff_dual = 0.0;
        for (std::size_t i = 0; i < k_direct.entries.size(); ++i) {
            diff = std::max(diff, std::abs(k_direct.entries[i] - k_from_t.entries[i]));
            diff_dual = std::max(diff_dual, std::abs(kd_direct.entries[i] - kd_from_t.entries[i]));
        }
        CHECK(diff < tol);
        CHECK(diff_dual < tol);
    }
}

TEST_CASE("T-tensor contraction constraints") {
    const auto canonical = qubitlab::canonical_sic();
    const auto rep = sic::check_T_relations(sic::triple_products(canonical));
    CHECK(rep.t3 < 1e-12);
    CHECK(rep.t4_first < 1e-12);
    CHECK(rep.t4_second < 1e-12);

    const auto rep3 = sic::check_T_relations(sic::triple_products(searched_d3()));
    CHECK(rep3.max_residual() < 1e-7);

    // A tensor from a non-SIC projector family violates the constraints.
    sic::TripleProductTensor junk;
    junk.dim = 2;
    junk.entries.assign(64, Complex(0.0, 0.0));
    std::vector<Matrix> ortho;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Matrix e = Matrix::Zero(2, 2);
            e(a, a) = (b == 0) ? 1.0 : 0.0;
            e(1 - a, 1 - a) = (b == 0) ? 0.0 : 1.0;
            ortho.push_back(e);
        }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                junk.at(i, j, k) = (ortho[static_cast<std::size_t>(i)] *
                                    ortho[static_cast<std::size_t>(j)] *
                                    ortho[static_cast<std::size_t>(k)])
                                       .trace();
    CHECK(sic::check_T_relations(junk).max_residual() > 1e-3);
}

TEST_CASE("four- and five-product identities") {
    const auto canonical = qubitlab::canonical_sic();
    const auto rep = sic::higher_products(canonical);
    CHECK(rep.four_product < 1e-12);
    CHECK(rep.five_product < 1e-12);
    CHECK(rep.five_samples == 500);

    const auto rep3 = sic::higher_products(searched_d3());
    CHECK(rep3.four_product < 1e-7);
    CHECK(rep3.five_product < 1e-7);
}
