// Closed-form d=2 layer.  Every qubit SIC is Π_i = (I + σ·(R r_i))/2 for a
// single orthogonal 3x3 matrix R acting on the fixed base tetrad {r_i}
// (unit vectors, pairwise dot -1/3).  On top of that sit the closed-form
// triple-product/kernel tensors, the intertwining kernels to the spin and
// FNR schemes, the qubit MUB triple, and the Lie-algebra checks built from
// the projectors.

#pragma once

#include <array>

#include "sicforge/qmat.hpp"
#include "sicforge/sic.hpp"
#include "sicforge/spintomo.hpp"
#include "sicforge/starprod.hpp"

namespace sicforge::qubitlab {

using qmat::Complex;
using qmat::Matrix;

/// The base Bloch tetrad r_1..r_4 (last one is +z).
std::array<Eigen::Vector3d, 4> base_vectors();

/// The reference qubit SIC with closed-form entries; verify passes at 1e-14.
sic::SicSet canonical_sic();

/// The fiducial vectors of the reference set (explicit phases).
std::array<Eigen::Vector2cd, 4> canonical_fiducials();

/// Π_i = (I + σ·(R r_i))/2; R must be orthogonal within 1e-10.
sic::SicSet sic_from_R(const Eigen::Matrix3d& r);

struct QubitSicParam {
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    std::array<Eigen::Vector3d, 4> bloch{};
    int det_class = +1;  // det R: +1 rotation, -1 inversion class
};

/// Bloch vectors, the R mapping the base tetrad onto them, and the det class.
QubitSicParam param_from_set(const sic::SicSet& s);

/// The antisymmetric 4-index symbol fixed by eps(1,2,3)=eps(1,3,4)=
/// eps(1,4,2)=eps(4,3,2)=1 (arguments here are 0-based).
double epsilon4(int i, int j, int k);

struct ClosedFormTensors {
    sic::TripleProductTensor t;
    starprod::KernelTensor k;
    starprod::KernelTensor k_dual;
    int det_class = +1;
};

/// T, K, K^dual from the delta/epsilon closed forms alone:
///   T_ijk = (1/3){ δ_ij + δ_jk + δ_ki - s (i/√3) ε_ijk },  s = det class.
ClosedFormTensors qubit_closed_forms(const sic::SicSet& s);

/// Generic intertwining: f_to(x2) = Σ_x1 w(x1) f_from(x1) Tr[D_from(x1) U_to(x2)].
starprod::Symbol intertwine(const starprod::Symbol& f, const starprod::Scheme& from,
                            const starprod::Scheme& to);

/// K(x1, x2) = Tr[D_from(x1) U_to(x2)] (weights not folded).
Eigen::MatrixXcd intertwine_matrix(const starprod::Scheme& from, const starprod::Scheme& to);

// Closed-form qubit intertwining kernels; b is the Bloch vector of the SIC
// element, n a spin direction, l the dual-basis partner of an FNR direction.
double kernel_spin_to_sic(double m, const Eigen::Vector3d& n, const Eigen::Vector3d& b);
double kernel_sic_to_spin(const Eigen::Vector3d& b, double m, const Eigen::Vector3d& n);
double kernel_fnr_to_sic(double m, int k, const Eigen::Vector3d& l, const Eigen::Vector3d& b);
double kernel_sic_to_fnr(const Eigen::Vector3d& b, double m, const Eigen::Vector3d& n_k);

/// Dual basis {l_k} of a direction triad: Σ_k' M^{-1}(1)_{kk'} n_k'.
std::array<Eigen::Vector3d, 3> dual_triad(const spintomo::DirectionSet& ds);

/// Three mutually unbiased qubit bases {|mu_i>, |nu_i>}: intra-pair overlap 0,
/// all cross overlaps |<.|.>|² = 1/2.  Bloch points are octahedron vertices.
std::array<std::pair<Eigen::Vector2cd, Eigen::Vector2cd>, 3> mub_bases();

struct LieReport {
    double expansion_residual = 0.0;  // max |[Π_i,Π_j] - Σ_k J_ijk Π_k|
    int eps_sign = 0;                 // d=2 only: s in J_ijk = s (i/√3) ε_ijk
    double eps_residual = 0.0;        // d=2 only: fit at the detected sign
    double antisymmetry = 0.0;        // max |J_ijk + J_jik|
};

/// J_ijk = (K_ijk - K_jik)/(d+1) and the expansion residual, any dimension.
LieReport lie_structure(const sic::SicSet& s);

struct CasimirReport {
    int sign = 0;                // s in [Π_i,Π_j] = s (i/√3) Σ_k ε_ijk Π_k
    bool relabeled = false;      // minus-sign input relabeled (Π_3 <-> Π_4)
    bool orientation_flipped = false;  // generator frame made right-handed
    double c1_residual = 0.0;            // |C_1| (should vanish identically)
    double c2_closed_form_residual = 0.0;
    double casimir_commute_residual = 0.0;  // [C_a, H_k], [C_a, F_k]
    double table_residual = 0.0;            // full commutation table residual
    double final_relation_residual = 0.0;   // [Π_k, 3ΣΠ² - Σ_{i≠j}Π_iΠ_j]
    double tolerance = 0.0;
    bool pass = false;
};

/// Builds H_k, F_k = iH_k from the projector combinations, evaluates both
/// Casimir operators, the commutation table (after a 2x rescale of the
/// generators) and the projector-only commutation relation.
CasimirReport casimir_check(const sic::SicSet& s, double tol = 1e-12);

}  // namespace sicforge::qubitlab
