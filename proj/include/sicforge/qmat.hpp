// Dense complex linear algebra over small Hilbert-space dimensions, plus the
// special functions every quantization scheme in this library is built from:
//
//   discrete_chebyshev  t_L(x,N)   orthogonal on the grid {0,...,N-1}
//   f_coeff             f_L(m)   = t_L(j+m, 2j+1) / d_L   (orthonormal rows)
//   spin_operators      J_x, J_y, J_z in the |j,m> basis, m = j ... -j
//   s_operator          S_L(n)   = f_L( J·n ), rank-L irreducible tensor op
//   legendre            P_L^(m)(x), Condon–Shortley phase
//
// Conventions are pinned by unit tests: t_0 = 1, t_1(x,2) = 2x-1, and the
// basis ordering puts m = +j first so J_z = diag(j, j-1, ..., -j).

#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <utility>

namespace sicforge::qmat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kTolHermitian = 1e-10;
inline constexpr double kTolPsd = 1e-9;
inline constexpr double kTolIdentity = 1e-10;

/// Largest entrywise absolute value.
double max_abs(const Matrix& m);

/// max |M - M†| entrywise.
double hermiticity_residual(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol = kTolHermitian);

/// A point on the unit sphere; (theta, phi) and the cartesian unit vector are
/// kept consistent: n = (cos phi sin theta, sin phi sin theta, cos theta).
struct Direction {
    double theta = 0.0;  // [0, pi]
    double phi = 0.0;    // [0, 2*pi)
    Eigen::Vector3d n{0.0, 0.0, 1.0};

    static Direction from_angles(double theta, double phi);
    /// Validates |n| = 1 within `norm_tol`, then renormalizes exactly.
    static Direction from_cartesian(double nx, double ny, double nz,
                                    double norm_tol = 1e-9);
    static Direction from_cartesian(const Eigen::Vector3d& v,
                                    double norm_tol = 1e-9);

    double dot(const Direction& other) const { return n.dot(other.n); }
};

/// Discrete Chebyshev polynomial t_L(x, N) on the grid {0,...,N-1}.
/// Evaluated for real x through the three-term recurrence of the monic
/// orthogonal family (lowest-degree interpolation of the grid values).
/// Requires 0 <= L <= N-1.
double discrete_chebyshev(int L, double x, int N);

/// Orthonormal grid polynomial t_L(x,N)/d_L evaluated at real x.
/// Stable for large L (no factorial blow-up).
double discrete_chebyshev_normalized(int L, double x, int N);

/// Normalization d_L = sqrt((2j+L+1)! / ((2L+1)(2j-L)!)), N = 2j+1.
double chebyshev_norm(int L, int N);

/// f_L^(j)(m) = t_L(j+m, 2j+1) / d_L.  Requires 0 <= L <= 2j.
double f_coeff(int L, double j, double m);

/// Angular momentum operators (J_x, J_y, J_z) for spin j; dim = 2j+1.
std::array<Matrix, 3> spin_operators(double j);

/// S_L^(j)(n) = f_L^(j)((J·n)), computed by eigendecomposition of the
/// Hermitian matrix (J·n) whose spectrum is exactly {-j,...,j}.
Matrix s_operator(int L, double j, const Direction& n);

/// Associated Legendre P_L^(m)(x) with the Condon–Shortley phase;
/// legendre(L, 0, x) is the Legendre polynomial P_L(x).  Requires |x| <= 1.
double legendre(int L, int m, double x);

/// (min eigenvalue >= -kTolPsd, min eigenvalue).  Input must be Hermitian
/// within kTolHermitian.
std::pair<bool, double> psd_check(const Matrix& m);

/// Number of basis states 2j+1; throws unless 2j is a nonnegative integer.
int spin_dimension(double j);

/// Round-trip check that 2j is integral; returns 2j as an int.
int two_j_of(double j);

}  // namespace sicforge::qmat
