// Existence-problem machinery: candidate SIC sets are parametrized by an
// orthogonal matrix acting between two explicit Gram factorizations.
//
// Over the index space x = (L, n_k), k = 1..2L+1, L = 0..d-1 (spin
// j = (d-1)/2), the stacked operators S_L(n_k) have the block Gram matrix
// 𝔐 = 𝔖ᵀ𝔖, while the target pairwise-trace matrix factors as Γ = 𝒮ᵀ𝒮 with
// 𝒮 known in closed form.  Candidates
//
//     Π = 𝒮ᵀ Qᵀ 𝔖^{-T} Ŝ,     Q = diag(1, Q̃),   Q̃ ∈ O(d²-1)
//
// satisfy hermiticity, unit trace, Tr[Π_i Π_j] = Γ_ij and Σ_i Π_i = d·I for
// every orthogonal Q̃; idempotence (equivalently V_i = Tr[Π_i³] = 1) is what
// the search optimizes, with Σ_i V_i = d² at a true SIC.
//
// Two search strategies: gradient ascent over a Givens-angle parametrization
// of Q̃ with random restarts, and the greedy sequential-rotation construction
// that fixes one projector per step inside the stabilizer of the previous
// ones.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sicforge/qmat.hpp"
#include "sicforge/sic.hpp"
#include "sicforge/spintomo.hpp"
#include "sicforge/starprod.hpp"

namespace sicforge::sicsearch {

using qmat::Matrix;

struct GramFactors {
    int dim = 0;
    Eigen::MatrixXd gamma;   // Γ_ij = (dδ_ij + 1)/(d+1)
    Eigen::MatrixXd s;       // 𝒮, closed-form factor of Γ
    Eigen::MatrixXd frak_s;  // 𝔖, block-diagonal factor of 𝔐
    Eigen::MatrixXd frak_m;  // 𝔐, block Gram matrix of the S_L(n_k)
    std::vector<spintomo::DirectionSet> directions;  // per L, sizes 2L+1

    // Derived operator data for spin j = (d-1)/2.
    std::vector<Matrix> s_ops;      // stacked S_L(n_k), p = L² + k
    std::vector<Matrix> d_ops;      // quantizers D(L,k) = Σ_k' M^{-1}(L)_{kk'} S_L(n_k')
    std::vector<Matrix> basis_ops;  // orthonormalized ê_b = Σ_p (𝔖^{-1})_{pb} S_p
    Eigen::MatrixXd frak_s_inv;
    std::vector<double> d_tensor;   // Re Tr[D_p D_q D_r], fully symmetric

    double d_tensor_at(int p, int q, int r) const {
        const int n = dim * dim;
        return d_tensor[(static_cast<std::size_t>(p) * n + q) * n + r];
    }
};

/// Builds all factors from per-L direction sets (block L needs 2L+1 of them);
/// the Γ = 𝒮ᵀ𝒮, 𝔐 = 𝔖ᵀ𝔖 and row-sum identities are asserted at build time.
GramFactors gram_factors(int d, const std::vector<spintomo::DirectionSet>& per_l);

/// Same with deterministic default direction sets.
GramFactors gram_factors(int d);

/// The (L, n_k) index space as a star-product scheme: U = S_L(n_k),
/// D = Σ M^{-1} S, unit weights.
starprod::Scheme harmonic_scheme(const GramFactors& gf);

/// d² Hermitian candidates from an orthogonal Q̃; unit trace and pairwise
/// traces hold by construction, idempotence/positivity do not.
std::vector<Matrix> build_candidate(const GramFactors& gf, const Eigen::MatrixXd& qtilde);

/// V_i = Tr[Π_i³] computed through the precomputed Tr[DDD] contraction
/// (never by building the candidates).
Eigen::VectorXd functional_V(const GramFactors& gf, const Eigen::MatrixXd& qtilde);

/// The SO(n) Givens product used by the optimizer: one angle per coordinate
/// plane (a,b), a < b, in lexicographic order.
Eigen::MatrixXd givens_rotation(int n, const Eigen::VectorXd& angles);

/// d(Σ_i V_i)/dθ at the given Givens angles for Q̃(θ); analytic, used by the
/// ascent and cross-checked against finite differences in the tests.
Eigen::VectorXd objective_gradient(const GramFactors& gf, const Eigen::VectorXd& angles);

/// Max residual of the dual-symbol form of the idempotence equation,
/// Tr[D_p Π_i²] = Tr[D_p Π_i] over all (i,p); zero iff every candidate is
/// idempotent.
double matrix_equation_residual(const GramFactors& gf, const Eigen::MatrixXd& qtilde);

struct SearchConfig {
    std::uint64_t seed = 1;
    int restarts = 16;
    int max_iterations = 2000;  // per restart
    double tol_obj = 1e-6;      // convergence declared when d² - ΣV < tol_obj
    double verify_tol = 1e-6;   // independent confirmation of the output set
    double target_gap = 1e-13;  // ascent drives the gap this deep before stopping
    double psd_tol = 1e-6;      // per-step acceptance (sequential rotations)
    int step_restarts = 8;      // per-step random re-inits (sequential rotations)
    int threads = 0;            // 0: SICFORGE_THREADS env var, else hardware
};

struct SearchState {
    int dim = 0;
    Eigen::MatrixXd qtilde;
    double objective = 0.0;  // Σ_i V_i
    Eigen::VectorXd v;
    double residual_matrix_equation = 0.0;
    std::uint64_t seed = 0;  // derived seed of the winning restart
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;             // objective after each accepted step
    std::vector<double> step_psd_residuals;  // sequential method only
};

/// Best state over `restarts` independent gradient-ascent runs (restart 0
/// starts from Q̃ = identity).  Ties in the objective break toward the lowest
/// derived seed.  `converged` additionally requires sic::verify to pass at
/// cfg.verify_tol; exhausting the budget returns the best state unconverged.
SearchState optimize(const GramFactors& gf, const SearchConfig& cfg = {});
SearchState optimize(int d, const SearchConfig& cfg = {});

/// Greedy construction: step i rotates inside the stabilizer of the already
/// fixed projectors to make Π_i positive semidefinite.  On a failed step the
/// partial state is returned with converged = false.
SearchState sequential_rotations(const GramFactors& gf, const SearchConfig& cfg = {});

struct EquiangularFrame {
    int n = 0;                             // ambient dimension N
    std::vector<Eigen::VectorXd> vectors;  // N+1 vectors in R^N
};

/// N+1 equiangular vectors in R^N: |r|² = (d-1)/d, r_i·r_j = -1/(d(d+1))
/// with d = sqrt(N+1) (not necessarily an integer).
EquiangularFrame equiangular_frame(int n);

/// Conjugated set {u Π_i u†} (re-verified at the source tolerance) and the
/// induced orthogonal action Q_u on the operator basis,
/// (Q_u)_{kl} = Σ_{pq} (𝔖^{-1})_{pl} (𝔖^{-1})_{qk} Tr[u S_p u† S_q].
std::pair<sic::SicSet, Eigen::MatrixXd> unitary_orbit(const sic::SicSet& s, const Matrix& u,
                                                      const GramFactors& gf);
std::pair<sic::SicSet, Eigen::MatrixXd> unitary_orbit(const sic::SicSet& s, const Matrix& u);

}  // namespace sicforge::sicsearch
