// Spin tomography schemes exposed as starprod::Scheme values.
//
// Continuous scheme, x = (m, n):
//   U(m,n) = Σ_L f_L(m) S_L(n),   D(m,n) = Σ_L (2L+1) f_L(m) S_L(n),
//   pairing Σ_m (4π)^{-1} ∫ dn realized on a Gauss–Legendre × uniform-φ grid.
//
// Finite-number-of-rotations (FNR) scheme, x = (m, n_k), k = 1..4j+1:
//   U(m,n_k) = (4j+1)^{-1} Σ_L f_L(m) S_L(n_k)
//   D(m,k)   = (4j+1) Σ_{L ≥ ceil((k-1)/2)} f_L(m) Σ_{k'} M^{-1}(L)_{kk'} S_L(n_{k'})
// with M(L)_{kk'} = Tr[S_L(n_k) S_L(n_{k'})] = P_L(n_k·n_k') built from the
// first 2L+1 directions.  The L-sum in U is written out explicitly; the
// reconstruction identity fails without it (see README erratum note).

#pragma once

#include <cstdint>
#include <vector>

#include "sicforge/qmat.hpp"
#include "sicforge/starprod.hpp"

namespace sicforge::spintomo {

using qmat::Direction;
using qmat::Matrix;

inline constexpr double kCondMax = 1e6;

struct DirectionSet {
    std::vector<Direction> directions;
    std::size_t count() const { return directions.size(); }
};

/// Raised when a direction set makes some M(L) (or Σ(L)) block numerically
/// singular; carries the offending L and its condition number.
class IllPosedDirections : public std::runtime_error {
  public:
    IllPosedDirections(int L, double cond);
    int level() const { return level_; }
    double cond() const { return cond_; }

  private:
    int level_;
    double cond_;
};

/// Deterministic well-spread directions: count 1 -> {z}, count 3 -> {x,y,z},
/// otherwise golden-spiral points under a seeded rotation (no antipodal
/// pairs, which even-L Gram blocks cannot tolerate, and no symmetric line
/// systems, which break the odd-L blocks).
DirectionSet spread_directions(std::size_t count, std::uint64_t seed);

/// Default FNR direction set for spin j (4j+1 directions), re-seeded until
/// every M(L) has condition number below kCondMax.
DirectionSet default_fnr_directions(double j);

/// M(L)_{kk'} = P_L(n_k · n_k') over the first 2L+1 directions of `ds`.
Eigen::MatrixXd fnr_m_matrix(int L, const DirectionSet& ds);

/// Spectral condition number (largest/smallest singular value).
double condition_number(const Eigen::MatrixXd& m);

/// All S_L(n) for L = 0..2j from a single eigendecomposition of (J·n).
std::vector<Matrix> s_operators_all(double j, const Direction& n);

/// Continuous-scheme dequantizer/quantizer at an arbitrary direction.
Matrix spin_dequantizer(double j, double m, const Direction& n);
Matrix spin_quantizer(double j, double m, const Direction& n);

/// Gauss–Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Continuous spin scheme on a product quadrature grid.  `theta_order` is the
/// Gauss–Legendre node count in cos θ (0 = automatic: integrands polynomial
/// in n up to degree 4j+2 are integrated exactly); φ gets 2·order-1 uniform
/// points.  Index points carry coords {m, nx, ny, nz}.
starprod::Scheme continuous_scheme(double j, int theta_order = 0);

/// FNR scheme for spin j over ds (requires ds.count == 4j+1).  Index points
/// carry coords {m, k} with k the 0-based direction index.
starprod::Scheme fnr_scheme(double j, const DirectionSet& ds);

/// Throws unless rho is Hermitian (1e-10), unit trace (1e-10) and PSD
/// (min eigenvalue >= -1e-9).
void validate_density_matrix(const Matrix& rho);

/// Tomogram of a density matrix: its symbol in the given scheme.
starprod::Symbol tomogram(const Matrix& rho, const starprod::Scheme& s);

}  // namespace sicforge::spintomo
