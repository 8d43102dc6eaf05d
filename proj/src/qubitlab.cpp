#include "sicforge/qubitlab.hpp"

#include <cmath>
#include <stdexcept>

namespace sicforge::qubitlab {

namespace {

const Complex kI(0.0, 1.0);

std::array<Matrix, 3> pauli() {
    Matrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, -kI, kI, 0;
    sz << 1, 0, 0, -1;
    return {sx, sy, sz};
}

Matrix bloch_projector(const Eigen::Vector3d& b) {
    const auto s = pauli();
    return 0.5 * (Matrix::Identity(2, 2) + b.x() * s[0] + b.y() * s[1] + b.z() * s[2]);
}

Eigen::Vector3d bloch_of(const Matrix& m) {
    const auto s = pauli();
    return {(m * s[0]).trace().real(), (m * s[1]).trace().real(), (m * s[2]).trace().real()};
}

}  // namespace

std::array<Eigen::Vector3d, 4> base_vectors() {
    const double a = std::sqrt(2.0 / 3.0);
    const double b = std::sqrt(2.0) / 3.0;
    return {Eigen::Vector3d{-a, -b, -1.0 / 3.0}, Eigen::Vector3d{a, -b, -1.0 / 3.0},
            Eigen::Vector3d{0.0, 2.0 * std::sqrt(2.0) / 3.0, -1.0 / 3.0},
            Eigen::Vector3d{0.0, 0.0, 1.0}};
}

sic::SicSet canonical_sic() {
    const double s3 = std::sqrt(3.0);
    const double f = 1.0 / (2.0 * s3);
    Matrix p1(2, 2), p2(2, 2), p3(2, 2), p4(2, 2);
    p1 << f * (s3 + 1.0), f * Complex(1.0, -1.0), f * Complex(1.0, 1.0), f * (s3 - 1.0);
    p2 << f * (s3 - 1.0), f * Complex(1.0, 1.0), f * Complex(1.0, -1.0), f * (s3 + 1.0);
    p3 << f * (s3 - 1.0), f * Complex(-1.0, -1.0), f * Complex(-1.0, 1.0), f * (s3 + 1.0);
    p4 << f * (s3 + 1.0), f * Complex(-1.0, 1.0), f * Complex(-1.0, -1.0), f * (s3 - 1.0);
    return sic::make_sic_set({p1, p2, p3, p4}, 1e-14);
}

std::array<Eigen::Vector2cd, 4> canonical_fiducials() {
    const double s3 = std::sqrt(3.0);
    const double norm = 1.0 / std::sqrt(2.0 * s3);
    const double up = std::sqrt(s3 + 1.0);
    const double dn = std::sqrt(s3 - 1.0);
    auto phase = [](double angle) { return std::exp(Complex(0.0, angle)); };
    std::array<Eigen::Vector2cd, 4> psi;
    psi[0] << norm * up, norm * dn * phase(M_PI / 4.0);
    psi[1] << norm * dn, norm * up * phase(-M_PI / 4.0);
    psi[2] << norm * dn, norm * up * phase(3.0 * M_PI / 4.0);
    psi[3] << norm * up, norm * dn * phase(-3.0 * M_PI / 4.0);
    return psi;
}

sic::SicSet sic_from_R(const Eigen::Matrix3d& r) {
    const Eigen::Matrix3d gram = r.transpose() * r;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("sic_from_R: R is not orthogonal within 1e-10");
    }
    std::vector<Matrix> projectors;
    for (const auto& base : base_vectors()) projectors.push_back(bloch_projector(r * base));
    return sic::make_sic_set(std::move(projectors), 1e-12);
}

QubitSicParam param_from_set(const sic::SicSet& s) {
    if (s.dim != 2) throw std::invalid_argument("param_from_set: qubit sets only");
    if (!s.verification.pass) throw std::invalid_argument("param_from_set: unverified set");
    QubitSicParam param;
    for (int i = 0; i < 4; ++i) {
        param.bloch[static_cast<std::size_t>(i)] = bloch_of(s.projectors[static_cast<std::size_t>(i)]);
    }
    // R maps the base tetrad onto the Bloch tetrad; three vectors pin it down.
    const auto base = base_vectors();
    Eigen::Matrix3d b_mat, c_mat;
    for (int i = 0; i < 3; ++i) {
        b_mat.col(i) = base[static_cast<std::size_t>(i)];
        c_mat.col(i) = param.bloch[static_cast<std::size_t>(i)];
    }
    param.r = c_mat * b_mat.inverse();
    param.det_class = (param.r.determinant() > 0.0) ? +1 : -1;
    return param;
}

double epsilon4(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0.0;
    // 1-based reference triples with value +1: (1,2,3), (1,3,4), (1,4,2), (4,3,2).
    static const std::array<std::array<int, 3>, 4> plus = {
        {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {3, 2, 1}}};
    for (const auto& ref : plus) {
        // Same element set?
        const int set_ref = (1 << ref[0]) | (1 << ref[1]) | (1 << ref[2]);
        const int set_arg = (1 << i) | (1 << j) | (1 << k);
        if (set_ref != set_arg) continue;
        // Parity of the permutation ref -> (i,j,k).
        std::array<int, 3> arg = {i, j, k};
        int swaps = 0;
        for (int a = 0; a < 3; ++a) {
            if (arg[static_cast<std::size_t>(a)] == ref[static_cast<std::size_t>(a)]) continue;
            for (int b = a + 1; b < 3; ++b) {
                if (arg[static_cast<std::size_t>(b)] == ref[static_cast<std::size_t>(a)]) {
                    std::swap(arg[static_cast<std::size_t>(a)], arg[static_cast<std::size_t>(b)]);
                    ++swaps;
                    break;
                }
            }
        }
        return (swaps % 2 == 0) ? 1.0 : -1.0;
    }
    return 0.0;  // unreachable for distinct indices in 0..3
}

ClosedFormTensors qubit_closed_forms(const sic::SicSet& s) {
    if (s.dim != 2) throw std::invalid_argument("qubit_closed_forms: qubit sets only");
    const QubitSicParam param = param_from_set(s);
    const double sign = param.det_class;
    ClosedFormTensors out;
    out.det_class = param.det_class;
    out.t.dim = 2;
    out.t.entries.resize(64);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                const double deltas = (i == j ? 1.0 : 0.0) + (j == k ? 1.0 : 0.0) + (k == i ? 1.0 : 0.0);
                out.t.at(i, j, k) =
                    (deltas - sign * kI / std::sqrt(3.0) * epsilon4(i, j, k)) / 3.0;
            }
    out.k = sic::kernel_from_T(out.t, false);
    out.k_dual = sic::kernel_from_T(out.t, true);
    return out;
}

Eigen::MatrixXcd intertwine_matrix(const starprod::Scheme& from, const starprod::Scheme& to) {
    if (from.op_dim() != to.op_dim()) {
        throw std::invalid_argument("intertwine: schemes act on different Hilbert dimensions");
    }
    Eigen::MatrixXcd k(static_cast<Eigen::Index>(from.size()), static_cast<Eigen::Index>(to.size()));
    for (std::size_t x1 = 0; x1 < from.size(); ++x1) {
        for (std::size_t x2 = 0; x2 < to.size(); ++x2) {
            k(static_cast<Eigen::Index>(x1), static_cast<Eigen::Index>(x2)) =
                (from.quantizers[x1] * to.dequantizers[x2]).trace();
        }
    }
    return k;
}

starprod::Symbol intertwine(const starprod::Symbol& f, const starprod::Scheme& from,
                            const starprod::Scheme& to) {
    if (f.scheme_label != from.label) {
        throw std::invalid_argument("intertwine: symbol does not belong to the source scheme");
    }
    if (static_cast<std::size_t>(f.values.size()) != from.size()) {
        throw std::invalid_argument("intertwine: symbol length mismatch");
    }
    const Eigen::MatrixXcd k = intertwine_matrix(from, to);
    starprod::Symbol out;
    out.scheme_label = to.label;
    out.values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.size()));
    for (std::size_t x1 = 0; x1 < from.size(); ++x1) {
        const Complex c = from.weights[x1] * f.values(static_cast<Eigen::Index>(x1));
        out.values += c * k.row(static_cast<Eigen::Index>(x1)).transpose();
    }
    return out;
}

double kernel_spin_to_sic(double m, const Eigen::Vector3d& n, const Eigen::Vector3d& b) {
    return 0.25 * (1.0 + 6.0 * m * n.dot(b));
}

double kernel_sic_to_spin(const Eigen::Vector3d& b, double m, const Eigen::Vector3d& n) {
    return 0.5 * (1.0 + 6.0 * m * n.dot(b));
}

double kernel_fnr_to_sic(double m, int k, const Eigen::Vector3d& l, const Eigen::Vector3d& b) {
    return 0.75 * ((k == 0 ? 1.0 : 0.0) + 2.0 * m * l.dot(b));
}

double kernel_sic_to_fnr(const Eigen::Vector3d& b, double m, const Eigen::Vector3d& n_k) {
    return (1.0 + 6.0 * m * n_k.dot(b)) / 6.0;
}

std::array<Eigen::Vector3d, 3> dual_triad(const spintomo::DirectionSet& ds) {
    if (ds.count() != 3) throw std::invalid_argument("dual_triad: need exactly 3 directions");
    const Eigen::MatrixXd minv = spintomo::fnr_m_matrix(1, ds).inverse();
    std::array<Eigen::Vector3d, 3> l;
    for (int k = 0; k < 3; ++k) {
        l[static_cast<std::size_t>(k)].setZero();
        for (int kp = 0; kp < 3; ++kp) {
            l[static_cast<std::size_t>(k)] += minv(k, kp) * ds.directions[static_cast<std::size_t>(kp)].n;
        }
    }
    return l;
}

std::array<std::pair<Eigen::Vector2cd, Eigen::Vector2cd>, 3> mub_bases() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::Vector2cd up, down;
    up << 1.0, 0.0;
    down << 0.0, 1.0;
    std::array<std::pair<Eigen::Vector2cd, Eigen::Vector2cd>, 3> mubs;
    mubs[0] = {up, down};
    mubs[1] = {inv_sqrt2 * (up + down), inv_sqrt2 * (up - down)};
    mubs[2] = {inv_sqrt2 * (up + kI * down), inv_sqrt2 * (up - kI * down)};
    return mubs;
}

LieReport lie_structure(const sic::SicSet& s) {
    if (!s.verification.pass) throw std::invalid_argument("lie_structure: unverified set");
    const int d = s.dim;
    const int n = d * d;
    const starprod::KernelTensor k = starprod::kernel(sic::sic_scheme(s));
    LieReport rep;
    std::vector<Complex> j_tensor(static_cast<std::size_t>(n) * n * n);
    auto jt = [&](int i, int jj, int kk) -> Complex& {
        return j_tensor[(static_cast<std::size_t>(i) * n + jj) * n + kk];
    };
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
            for (int kk = 0; kk < n; ++kk) {
                jt(i, jj, kk) = (k.at(static_cast<std::size_t>(i), static_cast<std::size_t>(jj),
                                      static_cast<std::size_t>(kk)) -
                                 k.at(static_cast<std::size_t>(jj), static_cast<std::size_t>(i),
                                      static_cast<std::size_t>(kk))) /
                                (d + 1.0);
                rep.antisymmetry = std::max(rep.antisymmetry, std::abs(jt(i, jj, kk) +
                                                                        (k.at(static_cast<std::size_t>(jj),
                                                                              static_cast<std::size_t>(i),
                                                                              static_cast<std::size_t>(kk)) -
                                                                         k.at(static_cast<std::size_t>(i),
                                                                              static_cast<std::size_t>(jj),
                                                                              static_cast<std::size_t>(kk))) /
                                                                            (d + 1.0)));
            }
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
            Matrix expansion = Matrix::Zero(d, d);
            for (int kk = 0; kk < n; ++kk) {
                expansion += jt(i, jj, kk) * s.projectors[static_cast<std::size_t>(kk)];
            }
            const Matrix commutator = s.projectors[static_cast<std::size_t>(i)] *
                                          s.projectors[static_cast<std::size_t>(jj)] -
                                      s.projectors[static_cast<std::size_t>(jj)] *
                                          s.projectors[static_cast<std::size_t>(i)];
            rep.expansion_residual =
                std::max(rep.expansion_residual, qmat::max_abs(commutator - expansion));
        }
    if (d == 2) {
        double res_plus = 0.0, res_minus = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int jj = 0; jj < 4; ++jj)
                for (int kk = 0; kk < 4; ++kk) {
                    const Complex target = kI / std::sqrt(3.0) * epsilon4(i, jj, kk);
                    res_plus = std::max(res_plus, std::abs(jt(i, jj, kk) - target));
                    res_minus = std::max(res_minus, std::abs(jt(i, jj, kk) + target));
                }
        rep.eps_sign = (res_plus <= res_minus) ? +1 : -1;
        rep.eps_residual = std::min(res_plus, res_minus);
    }
    return rep;
}

namespace {

double commutator_residual(const Matrix& a, const Matrix& b, const Matrix& target) {
    return qmat::max_abs(a * b - b * a - target);
}

}  // namespace

CasimirReport casimir_check(const sic::SicSet& s, double tol) {
    if (s.dim != 2) throw std::invalid_argument("casimir_check: qubit sets only");
    if (!s.verification.pass) throw std::invalid_argument("casimir_check: unverified set");
    CasimirReport rep;
    rep.tolerance = tol;

    // Detect the sign in [Π_i, Π_j] = s (i/√3) Σ_k ε_ijk Π_k.
    auto relation_residual = [&](const std::vector<Matrix>& p, double sign) {
        double res = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                Matrix rhs = Matrix::Zero(2, 2);
                for (int k = 0; k < 4; ++k) {
                    rhs += sign * kI / std::sqrt(3.0) * epsilon4(i, j, k) *
                           p[static_cast<std::size_t>(k)];
                }
                res = std::max(res, commutator_residual(p[static_cast<std::size_t>(i)],
                                                        p[static_cast<std::size_t>(j)], rhs));
            }
        return res;
    };

    std::vector<Matrix> w = s.projectors;
    const double res_plus = relation_residual(w, +1.0);
    const double res_minus = relation_residual(w, -1.0);
    rep.sign = (res_plus <= res_minus) ? +1 : -1;
    if (rep.sign < 0) {
        // A transposition flips the epsilon pattern; retry with Π_3 <-> Π_4.
        std::swap(w[2], w[3]);
        rep.relabeled = true;
        rep.sign = +1;
    }

    // Generator combinations (the middle one may need a sign to make the
    // induced Bloch frame right-handed, which the commutation table requires).
    Matrix a1 = w[0] + w[1] - w[2] - w[3];
    Matrix a2 = -w[0] + w[1] - w[2] + w[3];
    Matrix a3 = w[0] - w[1] - w[2] + w[3];
    Eigen::Matrix3d frame;
    frame.col(0) = bloch_of(a1);
    frame.col(1) = bloch_of(a2);
    frame.col(2) = bloch_of(a3);
    if (frame.determinant() < 0.0) {
        a2 = -a2;
        rep.orientation_flipped = true;
    }

    const double coeff = std::sqrt(3.0) / 8.0;
    const std::array<Matrix, 3> h = {coeff * a1, coeff * a2, coeff * a3};
    std::array<Matrix, 3> f;
    for (int k = 0; k < 3; ++k) f[static_cast<std::size_t>(k)] = kI * h[static_cast<std::size_t>(k)];

    Matrix h2 = Matrix::Zero(2, 2), f2 = Matrix::Zero(2, 2), hf = Matrix::Zero(2, 2);
    for (int k = 0; k < 3; ++k) {
        h2 += h[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)];
        f2 += f[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(k)];
        hf += h[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(k)];
    }
    const Matrix c1 = h2 - f2 + 2.0 * kI * hf;
    const Matrix c2 = h2 - f2 - 2.0 * kI * hf;
    rep.c1_residual = qmat::max_abs(c1);

    Matrix sum_sq = Matrix::Zero(2, 2), sum_cross = Matrix::Zero(2, 2);
    for (int i = 0; i < 4; ++i) {
        sum_sq += s.projectors[static_cast<std::size_t>(i)] * s.projectors[static_cast<std::size_t>(i)];
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            sum_cross +=
                s.projectors[static_cast<std::size_t>(i)] * s.projectors[static_cast<std::size_t>(j)];
        }
    }
    const Matrix closed_form = (3.0 / 16.0) * (3.0 * sum_sq - sum_cross);
    rep.c2_closed_form_residual = qmat::max_abs(c2 - closed_form);

    for (int k = 0; k < 3; ++k) {
        for (const Matrix* c : {&c1, &c2}) {
            rep.casimir_commute_residual = std::max(
                rep.casimir_commute_residual,
                commutator_residual(*c, h[static_cast<std::size_t>(k)], Matrix::Zero(2, 2)));
            rep.casimir_commute_residual = std::max(
                rep.casimir_commute_residual,
                commutator_residual(*c, f[static_cast<std::size_t>(k)], Matrix::Zero(2, 2)));
        }
    }

    // The printed commutation table closes for generators twice as large.
    const Matrix g1 = 2.0 * h[0], g2 = 2.0 * h[1], g3 = 2.0 * h[2];
    const Matrix gp = g1 + kI * g2, gm = g1 - kI * g2;
    const Matrix fp = kI * gp, fm = kI * gm, f3 = kI * g3;
    double table = 0.0;
    table = std::max(table, commutator_residual(gp, gm, 2.0 * g3));
    table = std::max(table, commutator_residual(gp, g3, -gp));
    table = std::max(table, commutator_residual(gm, g3, gm));
    table = std::max(table, commutator_residual(fp, fm, -2.0 * g3));
    table = std::max(table, commutator_residual(fp, f3, gp));
    table = std::max(table, commutator_residual(fm, f3, -gm));
    table = std::max(table, commutator_residual(fp, gp, Matrix::Zero(2, 2)));
    table = std::max(table, commutator_residual(gm, fm, Matrix::Zero(2, 2)));
    table = std::max(table, commutator_residual(g3, f3, Matrix::Zero(2, 2)));
    table = std::max(table, commutator_residual(gp, fm, 2.0 * f3));
    table = std::max(table, commutator_residual(gm, fp, -2.0 * f3));
    table = std::max(table, commutator_residual(fp, g3, -fp));
    table = std::max(table, commutator_residual(fm, g3, fm));
    rep.table_residual = table;

    const Matrix invariant = 3.0 * sum_sq - sum_cross;
    for (int k = 0; k < 4; ++k) {
        rep.final_relation_residual =
            std::max(rep.final_relation_residual,
                     commutator_residual(s.projectors[static_cast<std::size_t>(k)], invariant,
                                         Matrix::Zero(2, 2)));
    }

    rep.pass = std::min(res_plus, res_minus) < 1e-6 && rep.c1_residual < tol &&
               rep.c2_closed_form_residual < tol && rep.casimir_commute_residual < tol &&
               rep.table_residual < tol && rep.final_relation_residual < tol;
    return rep;
}

}  // namespace sicforge::qubitlab
