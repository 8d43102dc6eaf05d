#include "sicforge/qmat.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sicforge::qmat {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double hermiticity_residual(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

bool is_hermitian(const Matrix& m, double tol) {
    return m.rows() == m.cols() && hermiticity_residual(m) < tol;
}

Direction Direction::from_angles(double theta, double phi) {
    if (theta < 0.0 || theta > M_PI) {
        throw std::invalid_argument("Direction: theta must lie in [0, pi]");
    }
    phi = std::fmod(phi, 2.0 * M_PI);
    if (phi < 0.0) phi += 2.0 * M_PI;
    Direction d;
    d.theta = theta;
    d.phi = phi;
    d.n = {std::cos(phi) * std::sin(theta), std::sin(phi) * std::sin(theta),
           std::cos(theta)};
    return d;
}

Direction Direction::from_cartesian(double nx, double ny, double nz,
                                    double norm_tol) {
    return from_cartesian(Eigen::Vector3d{nx, ny, nz}, norm_tol);
}

Direction Direction::from_cartesian(const Eigen::Vector3d& v, double norm_tol) {
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > norm_tol) {
        throw std::invalid_argument("Direction: vector is not unit norm (|n| = " +
                                    std::to_string(norm) + ")");
    }
    Direction d;
    d.n = v / norm;
    d.theta = std::acos(std::clamp(d.n.z(), -1.0, 1.0));
    d.phi = std::atan2(d.n.y(), d.n.x());
    if (d.phi < 0.0) d.phi += 2.0 * M_PI;
    return d;
}

int two_j_of(double j) {
    const double two_j = 2.0 * j;
    const int rounded = static_cast<int>(std::lround(two_j));
    if (rounded < 0 || std::abs(two_j - rounded) > 1e-9) {
        throw std::invalid_argument("spin j must be a nonnegative half-integer");
    }
    return rounded;
}

int spin_dimension(double j) { return two_j_of(j) + 1; }

namespace {

// Monic recurrence for the unit-weight grid {0,...,N-1}:
//   p_{n+1} = (x - (N-1)/2) p_n - b_n p_{n-1},
//   b_n = n^2 (N^2 - n^2) / (4 (4n^2 - 1)).
// Normalized values phi_n = p_n/||p_n|| follow from ||p_n||^2 = N b_1...b_n.
double grid_poly_normalized(int L, double x, int N) {
    const double a = 0.5 * (N - 1.0);
    double phi_prev = 0.0;
    double phi = 1.0 / std::sqrt(static_cast<double>(N));
    for (int n = 0; n < L; ++n) {
        const double bn = (n == 0)
                              ? 0.0
                              : (static_cast<double>(n) * n *
                                 (static_cast<double>(N) * N - static_cast<double>(n) * n)) /
                                    (4.0 * (4.0 * n * n - 1.0));
        const double np1 = n + 1.0;
        const double bnp1 = (np1 * np1 * (static_cast<double>(N) * N - np1 * np1)) /
                            (4.0 * (4.0 * np1 * np1 - 1.0));
        const double next = ((x - a) * phi - std::sqrt(bn) * phi_prev) / std::sqrt(bnp1);
        phi_prev = phi;
        phi = next;
    }
    return phi;
}

void check_grid_domain(int L, int N, const char* who) {
    if (N < 1) throw std::invalid_argument(std::string(who) + ": N must be >= 1");
    if (L < 0 || L >= N) {
        throw std::domain_error(std::string(who) + ": require 0 <= L <= N-1, got L=" +
                                std::to_string(L) + ", N=" + std::to_string(N));
    }
}

}  // namespace

double chebyshev_norm(int L, int N) {
    check_grid_domain(L, N, "chebyshev_norm");
    // d_L = sqrt((N+L)! / ((2L+1)(N-L-1)!)) via log-gamma.
    const double log_d2 = std::lgamma(N + L + 1.0) - std::lgamma(N - L + 0.0) -
                          std::log(2.0 * L + 1.0);
    return std::exp(0.5 * log_d2);
}

double discrete_chebyshev_normalized(int L, double x, int N) {
    check_grid_domain(L, N, "discrete_chebyshev");
    return grid_poly_normalized(L, x, N);
}

double discrete_chebyshev(int L, double x, int N) {
    return discrete_chebyshev_normalized(L, x, N) * chebyshev_norm(L, N);
}

double f_coeff(int L, double j, double m) {
    const int two_j = two_j_of(j);
    if (L < 0 || L > two_j) {
        throw std::domain_error("f_coeff: require 0 <= L <= 2j");
    }
    return grid_poly_normalized(L, j + m, two_j + 1);
}

std::array<Matrix, 3> spin_operators(double j) {
    const int d = spin_dimension(j);
    Matrix jp = Matrix::Zero(d, d);  // raising operator, basis m = j ... -j
    for (int a = 1; a < d; ++a) {
        const double m = j - a;
        jp(a - 1, a) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    const Matrix jm = jp.adjoint();
    Matrix jz = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) jz(a, a) = j - a;
    const Complex half(0.5, 0.0);
    const Complex half_over_i(0.0, -0.5);
    return {half * (jp + jm), half_over_i * (jp - jm), jz};
}

Matrix s_operator(int L, double j, const Direction& n) {
    const int two_j = two_j_of(j);
    if (L < 0 || L > two_j) {
        throw std::domain_error("s_operator: require 0 <= L <= 2j");
    }
    const auto ops = spin_operators(j);
    const Matrix jn = n.n.x() * ops[0] + n.n.y() * ops[1] + n.n.z() * ops[2];
    Eigen::SelfAdjointEigenSolver<Matrix> solver(jn);
    const int d = two_j + 1;
    // The spectrum of (J·n) is exactly {-j, ..., j}; snap the computed
    // eigenvalues (ascending) to it before applying f_L.
    Eigen::VectorXd fvals(d);
    for (int a = 0; a < d; ++a) {
        const double m = -j + a;
        fvals(a) = f_coeff(L, j, m);
    }
    Matrix s = solver.eigenvectors() * fvals.asDiagonal().toDenseMatrix().cast<Complex>() *
               solver.eigenvectors().adjoint();
    return 0.5 * (s + Matrix(s.adjoint()));
}

double legendre(int L, int m, double x) {
    if (L < 0 || m < 0 || m > L) {
        throw std::domain_error("legendre: require 0 <= m <= L");
    }
    if (std::abs(x) > 1.0) {
        throw std::domain_error("legendre: require |x| <= 1");
    }
    // P_m^m = (-1)^m (2m-1)!! (1-x^2)^(m/2), then upward recurrence in L.
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    double pmm = 1.0;
    for (int k = 1; k <= m; ++k) pmm *= -(2.0 * k - 1.0) * s;
    if (L == m) return pmm;
    double pm1 = pmm;
    double p = x * (2.0 * m + 1.0) * pmm;  // P_{m+1}^m
    for (int l = m + 2; l <= L; ++l) {
        const double next = ((2.0 * l - 1.0) * x * p - (l + m - 1.0) * pm1) / (l - m);
        pm1 = p;
        p = next;
    }
    return p;
}

std::pair<bool, double> psd_check(const Matrix& m) {
    if (!is_hermitian(m)) {
        throw std::invalid_argument("psd_check: input is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    const double min_eig = solver.eigenvalues().minCoeff();
    return {min_eig >= -kTolPsd, min_eig};
}

}  // namespace sicforge::qmat
