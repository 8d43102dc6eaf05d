// SIC-POVM core: verification of candidate projector sets, the SIC
// star-product scheme U_i = Π_i/d, D_i = (d+1)Π_i - I, the probability
// representation p_i = (1/d) Tr[ρ Π_i] (with inverse ρ = (d+1) Σ p_i Π_i - I),
// the inverse-portrait distribution, and the identity web tying the triple
// products T_ijk = Tr[Π_i Π_j Π_k] to the star-product kernel:
//
//   K_ijk      = (1/d)          [ (d+1)^2 T_ijk - d(δ_ik + δ_jk) - 1 ]
//   K^dual_ijk = (1/(d^2(d+1))) [ (d+1)^2 T_ijk - (d δ_ij + 1) ]
//
// plus the contraction constraints the T tensor must obey and the closed
// forms for four- and five-fold projector products.

#pragma once

#include <cstdint>
#include <vector>

#include "sicforge/qmat.hpp"
#include "sicforge/starprod.hpp"

namespace sicforge::sic {

using qmat::Complex;
using qmat::Matrix;

struct VerificationReport {
    double hermiticity = 0.0;     // max |Π - Π†|
    double unit_trace = 0.0;      // max |Tr Π - 1|
    double positivity = 0.0;      // max(0, -min eigenvalue)
    double idempotence = 0.0;     // max |Π² - Π|
    double pairwise_trace = 0.0;  // max |Tr[Π_i Π_j] - (dδ_ij+1)/(d+1)|
    // Trace-power form of the unified condition Tr Π = Tr Π² = Tr Π³ = 1.
    double trace_power1 = 0.0;
    double trace_power2 = 0.0;
    double trace_power3 = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    double max_residual() const;
};

struct SicSet {
    int dim = 0;
    std::vector<Matrix> projectors;              // d² candidates
    std::vector<Eigen::VectorXcd> fiducials;     // empty when extraction failed
    VerificationReport verification;
};

/// Residuals of the five defining conditions plus the trace-power form.
VerificationReport verify(const std::vector<Matrix>& candidate, double tol = 1e-10);

/// Verifies and, on pass, extracts fiducial vectors (dominant eigenvector,
/// phase fixed by making the first component above 1e-8 real positive).
SicSet make_sic_set(std::vector<Matrix> projectors, double tol = 1e-10);

/// Scheme with U_i = Π_i/d, D_i = (d+1)Π_i - I, unit weights.
/// Throws if the set did not pass verification.
starprod::Scheme sic_scheme(const SicSet& s);

/// p_i = (1/d) Tr[ρ Π_i]; rho must be a valid density matrix.
Eigen::VectorXd probabilities(const Matrix& rho, const SicSet& s);

/// ρ = (d+1) Σ_i p_i Π_i - I.  Requires length d² and Σp = 1 within 1e-9.
/// The output is Hermitian with unit trace; positivity is the caller's check.
Matrix reconstruct_state(const Eigen::VectorXd& p, const SicSet& s);

/// 𝒫(m,i) = (1/d²) <jm| u_i† ρ u_i |jm> with |ψ_i> = u_i |jj>.  Rows are
/// ordered m = j..-j (basis order), columns i = 1..d².  Requires fiducials.
Eigen::MatrixXd inverse_portrait(const Matrix& rho, const SicSet& s);

struct TripleProductTensor {
    int dim = 0;
    std::vector<Complex> entries;  // d^6, row-major [i][j][k], indices in 0..d²-1

    Complex at(int i, int j, int k) const {
        const auto n = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
        return entries[(static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
                       static_cast<std::size_t>(k)];
    }
    Complex& at(int i, int j, int k) {
        const auto n = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
        return entries[(static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
                       static_cast<std::size_t>(k)];
    }
};

TripleProductTensor triple_products(const SicSet& s);

/// Star-product kernel (or its dual) built from the triple products alone.
starprod::KernelTensor kernel_from_T(const TripleProductTensor& t, bool dual = false);

struct TRelationReport {
    double t3 = 0.0;        // Σ_m (T_ijm T_mkl - T_iml T_jkm) constraint
    double t4_first = 0.0;  // first double-sum constraint
    double t4_second = 0.0; // second double-sum constraint
    double max_residual() const { return std::max(t3, std::max(t4_first, t4_second)); }
};

TRelationReport check_T_relations(const TripleProductTensor& t);

struct HigherProductReport {
    double four_product = 0.0;  // all d^8 index 4-tuples
    double five_product = 0.0;  // sampled 5-tuples
    int five_samples = 0;
    double max_residual() const { return std::max(four_product, five_product); }
};

/// Four-product identity checked exhaustively, five-product on `samples`
/// seeded random 5-tuples.
HigherProductReport higher_products(const SicSet& s, int samples = 500,
                                    std::uint64_t seed = 20100431);

}  // namespace sicforge::sic
