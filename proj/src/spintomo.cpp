#include "sicforge/spintomo.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace sicforge::spintomo {

IllPosedDirections::IllPosedDirections(int L, double cond)
    : std::runtime_error("ill-posed direction set: M(L=" + std::to_string(L) +
                         ") has condition number " + std::to_string(cond)),
      level_(L),
      cond_(cond) {}

namespace {

Eigen::Vector3d random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector3d v;
    do {
        v = {gauss(rng), gauss(rng), gauss(rng)};
    } while (v.norm() < 1e-8);
    return v.normalized();
}

}  // namespace

DirectionSet spread_directions(std::size_t count, std::uint64_t seed) {
    DirectionSet ds;
    if (count == 0) return ds;
    if (count == 1) {
        ds.directions.push_back(Direction::from_cartesian(0.0, 0.0, 1.0));
        return ds;
    }
    if (count == 3) {
        ds.directions.push_back(Direction::from_cartesian(1.0, 0.0, 0.0));
        ds.directions.push_back(Direction::from_cartesian(0.0, 1.0, 0.0));
        ds.directions.push_back(Direction::from_cartesian(0.0, 0.0, 1.0));
        return ds;
    }

    // Golden-spiral points with seeded tangent jitter.  Relaxing a repulsion
    // energy instead lands on symmetric line systems (orthogonal axes plus
    // cube diagonals and the like) whose odd-L Gram blocks are exactly
    // singular, and the unperturbed spiral has singular Gram blocks of its
    // own at some counts.  The jitter breaks those degeneracies while the
    // spiral keeps the lines spread and free of antipodal pairs; the caller's
    // conditioning guard re-seeds on the rare bad draw.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
    const double jitter = 0.12;
    for (std::size_t k = 0; k < count; ++k) {
        const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(k);
        Eigen::Vector3d p(r * std::cos(phi), r * std::sin(phi), z);
        const Eigen::Vector3d noise(gauss(rng), gauss(rng), gauss(rng));
        p = (p + jitter * (noise - noise.dot(p) * p)).normalized();
        ds.directions.push_back(Direction::from_cartesian(p, 1e-6));
    }
    return ds;
}

Eigen::MatrixXd fnr_m_matrix(int L, const DirectionSet& ds) {
    const int size = 2 * L + 1;
    if (static_cast<int>(ds.count()) < size) {
        throw std::invalid_argument("fnr_m_matrix: need at least 2L+1 directions");
    }
    Eigen::MatrixXd m(size, size);
    for (int a = 0; a < size; ++a) {
        for (int b = 0; b < size; ++b) {
            m(a, b) = qmat::legendre(L, 0, std::clamp(ds.directions[a].dot(ds.directions[b]), -1.0, 1.0));
        }
    }
    return m;
}

double condition_number(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

DirectionSet default_fnr_directions(double j) {
    const int two_j = qmat::two_j_of(j);
    const std::size_t count = static_cast<std::size_t>(2 * two_j + 1);
    const std::uint64_t base_seed = 0x5eed0000ull + count;
    for (std::uint64_t attempt = 0; attempt < 32; ++attempt) {
        DirectionSet ds = spread_directions(count, base_seed + attempt);
        bool ok = true;
        for (int L = 0; L <= two_j && ok; ++L) {
            ok = condition_number(fnr_m_matrix(L, ds)) < kCondMax;
        }
        if (ok) return ds;
    }
    throw std::runtime_error("default_fnr_directions: no well-conditioned set found");
}

std::vector<Matrix> s_operators_all(double j, const Direction& n) {
    const int two_j = qmat::two_j_of(j);
    const int d = two_j + 1;
    const auto ops = qmat::spin_operators(j);
    const Matrix jn = n.n.x() * ops[0] + n.n.y() * ops[1] + n.n.z() * ops[2];
    Eigen::SelfAdjointEigenSolver<Matrix> solver(jn);
    const Matrix& v = solver.eigenvectors();

    std::vector<Matrix> result(static_cast<std::size_t>(two_j) + 1);
    for (int L = 0; L <= two_j; ++L) {
        Eigen::VectorXd fvals(d);
        for (int a = 0; a < d; ++a) fvals(a) = qmat::f_coeff(L, j, -j + a);
        Matrix s = v * fvals.asDiagonal().toDenseMatrix().cast<qmat::Complex>() * v.adjoint();
        result[static_cast<std::size_t>(L)] = 0.5 * (s + Matrix(s.adjoint()));
    }
    return result;
}

Matrix spin_dequantizer(double j, double m, const Direction& n) {
    const int two_j = qmat::two_j_of(j);
    const auto s_ops = s_operators_all(j, n);
    Matrix u = Matrix::Zero(two_j + 1, two_j + 1);
    for (int L = 0; L <= two_j; ++L) {
        u += qmat::f_coeff(L, j, m) * s_ops[static_cast<std::size_t>(L)];
    }
    return u;
}

Matrix spin_quantizer(double j, double m, const Direction& n) {
    const int two_j = qmat::two_j_of(j);
    const auto s_ops = s_operators_all(j, n);
    Matrix dq = Matrix::Zero(two_j + 1, two_j + 1);
    for (int L = 0; L <= two_j; ++L) {
        dq += (2.0 * L + 1.0) * qmat::f_coeff(L, j, m) * s_ops[static_cast<std::size_t>(L)];
    }
    return dq;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // P_n(x) and P'_n(x) by the standard recurrence.
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

starprod::Scheme continuous_scheme(double j, int theta_order) {
    const int two_j = qmat::two_j_of(j);
    const int d = two_j + 1;
    int n_theta = theta_order;
    if (n_theta <= 0) n_theta = two_j + 2;   // exact through degree 2*n_theta - 1 >= 4j+2
    const int n_phi = 2 * n_theta - 1;

    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(n_theta, gl_nodes, gl_weights);

    starprod::Scheme s;
    s.label = "spin:j=" + std::to_string(two_j) + "/2";
    const std::size_t n_points =
        static_cast<std::size_t>(d) * static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi);
    s.points.reserve(n_points);
    s.dequantizers.reserve(n_points);
    s.quantizers.reserve(n_points);
    s.weights.reserve(n_points);

    for (int it = 0; it < n_theta; ++it) {
        const double theta = std::acos(std::clamp(gl_nodes[static_cast<std::size_t>(it)], -1.0, 1.0));
        for (int ip = 0; ip < n_phi; ++ip) {
            const double phi = 2.0 * M_PI * ip / n_phi;
            const Direction dir = Direction::from_angles(theta, phi);
            const auto s_ops = s_operators_all(j, dir);
            // weight for Σ_m (4π)^{-1} ∫ dn: GL weight × (2π/n_phi) / (4π)
            const double w = gl_weights[static_cast<std::size_t>(it)] * (2.0 * M_PI / n_phi) / (4.0 * M_PI);
            for (int a = 0; a < d; ++a) {
                const double m = j - a;
                Matrix u = Matrix::Zero(d, d);
                Matrix q = Matrix::Zero(d, d);
                for (int L = 0; L <= two_j; ++L) {
                    const double fl = qmat::f_coeff(L, j, m);
                    u += fl * s_ops[static_cast<std::size_t>(L)];
                    q += (2.0 * L + 1.0) * fl * s_ops[static_cast<std::size_t>(L)];
                }
                s.points.push_back({{m, dir.n.x(), dir.n.y(), dir.n.z()}});
                s.dequantizers.push_back(std::move(u));
                s.quantizers.push_back(std::move(q));
                s.weights.push_back(w);
            }
        }
    }
    s.validate();
    return s;
}

starprod::Scheme fnr_scheme(double j, const DirectionSet& ds) {
    const int two_j = qmat::two_j_of(j);
    const int d = two_j + 1;
    const int n_dirs = 2 * two_j + 1;  // 4j+1
    if (static_cast<int>(ds.count()) != n_dirs) {
        throw std::invalid_argument("fnr_scheme: need exactly 4j+1 = " + std::to_string(n_dirs) +
                                    " directions, got " + std::to_string(ds.count()));
    }

    // Gram blocks M(L) over the first 2L+1 directions, with conditioning guard.
    std::vector<Eigen::MatrixXd> m_inv(static_cast<std::size_t>(two_j) + 1);
    for (int L = 0; L <= two_j; ++L) {
        const Eigen::MatrixXd m = fnr_m_matrix(L, ds);
        const double cond = condition_number(m);
        if (!(cond < kCondMax)) throw IllPosedDirections(L, cond);
        m_inv[static_cast<std::size_t>(L)] = m.inverse();
    }

    std::vector<std::vector<Matrix>> s_ops(ds.count());
    for (std::size_t k = 0; k < ds.count(); ++k) {
        s_ops[k] = s_operators_all(j, ds.directions[k]);
    }

    starprod::Scheme s;
    s.label = "spin-fnr:j=" + std::to_string(two_j) + "/2";
    for (int a = 0; a < d; ++a) {
        const double m = j - a;
        for (int k = 0; k < n_dirs; ++k) {
            Matrix u = Matrix::Zero(d, d);
            for (int L = 0; L <= two_j; ++L) {
                u += qmat::f_coeff(L, j, m) * s_ops[static_cast<std::size_t>(k)][static_cast<std::size_t>(L)];
            }
            u /= static_cast<double>(n_dirs);

            // D(m,k): only the L-blocks whose M(L) has a k-th row contribute,
            // i.e. k <= 2L (0-based).
            Matrix q = Matrix::Zero(d, d);
            for (int L = 0; L <= two_j; ++L) {
                if (k > 2 * L) continue;
                const double fl = qmat::f_coeff(L, j, m);
                const auto& minv = m_inv[static_cast<std::size_t>(L)];
                for (int kp = 0; kp <= 2 * L; ++kp) {
                    q += fl * minv(k, kp) * s_ops[static_cast<std::size_t>(kp)][static_cast<std::size_t>(L)];
                }
            }
            q *= static_cast<double>(n_dirs);

            s.points.push_back({{m, static_cast<double>(k)}});
            s.dequantizers.push_back(std::move(u));
            s.quantizers.push_back(std::move(q));
            s.weights.push_back(1.0);
        }
    }
    s.validate();
    return s;
}

void validate_density_matrix(const Matrix& rho) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("density matrix must be square");
    }
    if (!qmat::is_hermitian(rho, 1e-10)) {
        throw std::invalid_argument("density matrix is not Hermitian within 1e-10");
    }
    if (std::abs(rho.trace() - qmat::Complex(1.0, 0.0)) > 1e-10) {
        throw std::invalid_argument("density matrix trace differs from 1 by more than 1e-10");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
    if (solver.eigenvalues().minCoeff() < -1e-9) {
        throw std::invalid_argument("density matrix has an eigenvalue below -1e-9");
    }
}

starprod::Symbol tomogram(const Matrix& rho, const starprod::Scheme& s) {
    validate_density_matrix(rho);
    return starprod::symbol(rho, s);
}

}  // namespace sicforge::spintomo
