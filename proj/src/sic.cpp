#include "sicforge/sic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "sicforge/spintomo.hpp"

namespace sicforge::sic {

double VerificationReport::max_residual() const {
    double r = hermiticity;
    r = std::max(r, unit_trace);
    r = std::max(r, positivity);
    r = std::max(r, idempotence);
    r = std::max(r, pairwise_trace);
    return r;
}

VerificationReport verify(const std::vector<Matrix>& candidate, double tol) {
    if (candidate.empty()) throw std::invalid_argument("verify: empty candidate set");
    const int d = static_cast<int>(candidate.front().rows());
    if (static_cast<int>(candidate.size()) != d * d) {
        throw std::invalid_argument("verify: expected d² = " + std::to_string(d * d) +
                                    " matrices, got " + std::to_string(candidate.size()));
    }
    for (const auto& m : candidate) {
        if (m.rows() != d || m.cols() != d) {
            throw std::invalid_argument("verify: mixed matrix dimensions");
        }
    }

    VerificationReport rep;
    rep.tolerance = tol;
    for (const auto& pi : candidate) {
        rep.hermiticity = std::max(rep.hermiticity, qmat::hermiticity_residual(pi));
        rep.unit_trace = std::max(rep.unit_trace, std::abs(pi.trace() - Complex(1.0, 0.0)));
        const Matrix herm = 0.5 * (pi + Matrix(pi.adjoint()));
        Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
        rep.positivity = std::max(rep.positivity, std::max(0.0, -solver.eigenvalues().minCoeff()));
        const Matrix sq = pi * pi;
        rep.idempotence = std::max(rep.idempotence, qmat::max_abs(sq - pi));
        rep.trace_power1 = rep.unit_trace;
        rep.trace_power2 = std::max(rep.trace_power2, std::abs(sq.trace() - Complex(1.0, 0.0)));
        rep.trace_power3 = std::max(rep.trace_power3, std::abs((sq * pi).trace() - Complex(1.0, 0.0)));
    }
    const double dd = d;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        for (std::size_t j = 0; j < candidate.size(); ++j) {
            const double target = (i == j) ? 1.0 : 1.0 / (dd + 1.0);
            rep.pairwise_trace = std::max(
                rep.pairwise_trace, std::abs((candidate[i] * candidate[j]).trace() - Complex(target, 0.0)));
        }
    }
    rep.pass = rep.max_residual() < tol;
    return rep;
}

namespace {

Eigen::VectorXcd extract_fiducial(const Matrix& pi) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(pi);
    const Eigen::Index top = solver.eigenvalues().size() - 1;  // ascending order
    Eigen::VectorXcd psi = solver.eigenvectors().col(top);
    for (Eigen::Index a = 0; a < psi.size(); ++a) {
        if (std::abs(psi(a)) > 1e-8) {
            psi *= std::conj(psi(a)) / std::abs(psi(a));
            break;
        }
    }
    return psi;
}

}  // namespace

SicSet make_sic_set(std::vector<Matrix> projectors, double tol) {
    SicSet s;
    s.dim = static_cast<int>(projectors.empty() ? 0 : projectors.front().rows());
    s.verification = verify(projectors, tol);
    s.projectors = std::move(projectors);
    if (s.verification.pass) {
        s.fiducials.reserve(s.projectors.size());
        for (const auto& pi : s.projectors) s.fiducials.push_back(extract_fiducial(pi));
    }
    return s;
}

starprod::Scheme sic_scheme(const SicSet& s) {
    if (!s.verification.pass) {
        throw std::invalid_argument("sic_scheme: set did not pass verification");
    }
    const int d = s.dim;
    starprod::Scheme scheme;
    scheme.label = "sic:d=" + std::to_string(d);
    const Matrix eye = Matrix::Identity(d, d);
    for (std::size_t i = 0; i < s.projectors.size(); ++i) {
        scheme.points.push_back({{static_cast<double>(i)}});
        scheme.dequantizers.push_back(s.projectors[i] / static_cast<double>(d));
        scheme.quantizers.push_back((d + 1.0) * s.projectors[i] - eye);
        scheme.weights.push_back(1.0);
    }
    scheme.validate();
    return scheme;
}

Eigen::VectorXd probabilities(const Matrix& rho, const SicSet& s) {
    spintomo::validate_density_matrix(rho);
    if (rho.rows() != s.dim) {
        throw std::invalid_argument("probabilities: state dimension does not match SIC set");
    }
    Eigen::VectorXd p(static_cast<Eigen::Index>(s.projectors.size()));
    for (std::size_t i = 0; i < s.projectors.size(); ++i) {
        p(static_cast<Eigen::Index>(i)) = (rho * s.projectors[i]).trace().real() / s.dim;
    }
    return p;
}

Matrix reconstruct_state(const Eigen::VectorXd& p, const SicSet& s) {
    if (p.size() != static_cast<Eigen::Index>(s.projectors.size())) {
        throw std::invalid_argument("reconstruct_state: probability vector has wrong length");
    }
    if (std::abs(p.sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("reconstruct_state: probabilities do not sum to 1 within 1e-9");
    }
    Matrix rho = -Matrix::Identity(s.dim, s.dim);
    for (std::size_t i = 0; i < s.projectors.size(); ++i) {
        rho += (s.dim + 1.0) * p(static_cast<Eigen::Index>(i)) * s.projectors[i];
    }
    return rho;
}

Eigen::MatrixXd inverse_portrait(const Matrix& rho, const SicSet& s) {
    spintomo::validate_density_matrix(rho);
    if (s.fiducials.empty()) {
        throw std::invalid_argument("inverse_portrait: fiducial vectors unavailable");
    }
    const int d = s.dim;
    // u_i maps |jj> (the first basis vector) to |ψ_i>; the remaining columns
    // come from Gram–Schmidt on the standard basis after inserting |ψ_i>.
    Eigen::MatrixXd portrait(d, static_cast<Eigen::Index>(s.fiducials.size()));
    for (std::size_t i = 0; i < s.fiducials.size(); ++i) {
        Matrix u = Matrix::Zero(d, d);
        u.col(0) = s.fiducials[i].normalized();
        int col = 1;
        for (int b = 0; b < d && col < d; ++b) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
            v(b) = Complex(1.0, 0.0);
            for (int c = 0; c < col; ++c) v -= u.col(c).dot(v) * u.col(c);
            const double norm = v.norm();
            if (norm > 1e-8) u.col(col++) = v / norm;
        }
        if (col != d) throw std::logic_error("inverse_portrait: unitary completion failed");
        const Matrix rotated = u.adjoint() * rho * u;
        for (int m = 0; m < d; ++m) {
            portrait(m, static_cast<Eigen::Index>(i)) = rotated(m, m).real() / (d * d);
        }
    }
    return portrait;
}

TripleProductTensor triple_products(const SicSet& s) {
    if (!s.verification.pass) {
        throw std::invalid_argument("triple_products: set did not pass verification");
    }
    const int n = static_cast<int>(s.projectors.size());
    TripleProductTensor t;
    t.dim = s.dim;
    t.entries.resize(static_cast<std::size_t>(n) * n * n);
    std::vector<Matrix> pairs(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            pairs[static_cast<std::size_t>(i) * n + j] = s.projectors[static_cast<std::size_t>(i)] *
                                                          s.projectors[static_cast<std::size_t>(j)];
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                t.at(i, j, k) =
                    (pairs[static_cast<std::size_t>(i) * n + j] * s.projectors[static_cast<std::size_t>(k)])
                        .trace();
    return t;
}

starprod::KernelTensor kernel_from_T(const TripleProductTensor& t, bool dual) {
    const int d = t.dim;
    const int n = d * d;
    starprod::KernelTensor k;
    k.scheme_label = "sic:d=" + std::to_string(d);
    k.dual = dual;
    k.n = static_cast<std::size_t>(n);
    k.entries.resize(static_cast<std::size_t>(n) * n * n);
    const double dp1 = d + 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int x = 0; x < n; ++x) {
                const Complex tijx = t.at(i, j, x);
                if (dual) {
                    const double delta_ij = (i == j) ? 1.0 : 0.0;
                    k.at(i, j, x) = (dp1 * dp1 * tijx - (d * delta_ij + 1.0)) / (d * d * dp1);
                } else {
                    const double delta_ix = (i == x) ? 1.0 : 0.0;
                    const double delta_jx = (j == x) ? 1.0 : 0.0;
                    k.at(i, j, x) =
                        (dp1 * dp1 * tijx - d * (delta_ix + delta_jx) - 1.0) / static_cast<double>(d);
                }
            }
    return k;
}

TRelationReport check_T_relations(const TripleProductTensor& t) {
    const int d = t.dim;
    const int n = d * d;
    const std::size_t un = static_cast<std::size_t>(n);
    const double dp1 = d + 1.0;
    TRelationReport rep;

    auto gram = [&](int a, int b) { return (d * ((a == b) ? 1.0 : 0.0) + 1.0) / dp1; };

    // Σ_m (T_ijm T_mkl - T_iml T_jkm)
    //   = d/(d+1)^3 [ (dδ_ij+1)(dδ_kl+1) - (dδ_jk+1)(dδ_il+1) ]
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    Complex lhs(0.0, 0.0);
                    for (int m = 0; m < n; ++m) {
                        lhs += t.at(i, j, m) * t.at(m, k, l) - t.at(i, m, l) * t.at(j, k, m);
                    }
                    const double rhs = d / (dp1 * dp1 * dp1) *
                                       ((d * (i == j ? 1.0 : 0.0) + 1.0) * (d * (k == l ? 1.0 : 0.0) + 1.0) -
                                        (d * (j == k ? 1.0 : 0.0) + 1.0) * (d * (i == l ? 1.0 : 0.0) + 1.0));
                    rep.t3 = std::max(rep.t3, std::abs(lhs - rhs));
                }

    // Both double-sum relations share the contraction Σ_b T_akb T_blm; it and
    // the partner contractions are precomputed so the 5-index sweep is O(n^6).
    auto idx4 = [un](int a, int b, int c, int e) {
        return ((static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)) * un +
                static_cast<std::size_t>(c)) * un + static_cast<std::size_t>(e);
    };
    std::vector<Complex> u1(un * un * un * un);  // u1[p,q,l,m] = Σ_b T_pqb T_blm
    std::vector<Complex> x2(un * un * un * un);  // x2[k,l,b,m] = Σ_a T_kla T_bam
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    Complex s1(0.0, 0.0), s3(0.0, 0.0);
                    for (int b = 0; b < n; ++b) {
                        s1 += t.at(a, k, b) * t.at(b, l, m);
                        s3 += t.at(k, l, b) * t.at(a, b, m);
                    }
                    u1[idx4(a, k, l, m)] = s1;
                    x2[idx4(k, l, a, m)] = s3;
                }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int m = 0; m < n; ++m) {
                        Complex first(0.0, 0.0), second1(0.0, 0.0), second2(0.0, 0.0);
                        for (int a = 0; a < n; ++a) {
                            first += t.at(i, j, a) * u1[idx4(a, k, l, m)];
                            second1 += t.at(j, k, a) * u1[idx4(i, a, l, m)];
                            second2 += t.at(i, j, a) * x2[idx4(k, l, a, m)];
                        }
                        const double g_ij = gram(i, j);
                        const double g_jk = gram(j, k);
                        const double g_lm = gram(l, m);
                        const double g_kl = gram(k, l);
                        // Both double contractions reduce through the frame
                        // identity Σ_n Tr[A Π_n] Π_n = d/(d+1) (A + Tr[A] I),
                        // which fixes the prefactor to (d/(d+1))².
                        const double scale = (static_cast<double>(d) * d) / (dp1 * dp1);
                        const Complex rhs1 =
                            scale * (g_ij * t.at(k, l, m) + g_ij * g_lm - t.at(i, l, m) * g_jk - g_jk * g_lm);
                        const Complex rhs2 =
                            scale * (t.at(i, j, k) * g_lm + g_ij * g_lm - t.at(i, j, m) * g_kl - g_ij * g_kl);
                        rep.t4_first = std::max(rep.t4_first, std::abs((first - second1) - rhs1));
                        rep.t4_second = std::max(rep.t4_second, std::abs((first - second2) - rhs2));
                    }
    return rep;
}

HigherProductReport higher_products(const SicSet& s, int samples, std::uint64_t seed) {
    if (!s.verification.pass) {
        throw std::invalid_argument("higher_products: set did not pass verification");
    }
    const int d = s.dim;
    const int n = d * d;
    const double dp1 = d + 1.0;
    const TripleProductTensor t = triple_products(s);

    std::vector<Matrix> pairs(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            pairs[static_cast<std::size_t>(i) * n + j] =
                s.projectors[static_cast<std::size_t>(i)] * s.projectors[static_cast<std::size_t>(j)];

    HigherProductReport rep;
    auto gram = [&](int a, int b) { return (d * ((a == b) ? 1.0 : 0.0) + 1.0) / dp1; };

    // Tr[Π_i Π_j Π_k Π_l] = (d+1)/d Σ_m T_ijm T_mkl - Γ_ij Γ_kl, exhaustively.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const Complex lhs = (pairs[static_cast<std::size_t>(i) * n + j] *
                                         pairs[static_cast<std::size_t>(k) * n + l])
                                            .trace();
                    Complex acc(0.0, 0.0);
                    for (int m = 0; m < n; ++m) acc += t.at(i, j, m) * t.at(m, k, l);
                    const Complex rhs = dp1 / d * acc - gram(i, j) * gram(k, l);
                    rep.four_product = std::max(rep.four_product, std::abs(lhs - rhs));
                }

    // Five-product identity on sampled tuples.
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    rep.five_samples = samples;
    for (int sample = 0; sample < samples; ++sample) {
        const int i = pick(rng), j = pick(rng), k = pick(rng), l = pick(rng), m = pick(rng);
        const Complex lhs = (pairs[static_cast<std::size_t>(i) * n + j] *
                             pairs[static_cast<std::size_t>(k) * n + l] *
                             s.projectors[static_cast<std::size_t>(m)])
                                .trace();
        Complex acc(0.0, 0.0);
        for (int a = 0; a < n; ++a) {
            Complex inner(0.0, 0.0);
            for (int b = 0; b < n; ++b) inner += t.at(a, k, b) * t.at(b, l, m);
            acc += t.at(i, j, a) * inner;
        }
        const Complex rhs = (dp1 * dp1) / (static_cast<double>(d) * d) * acc -
                            t.at(i, j, k) * gram(l, m) - gram(i, j) * gram(l, m) -
                            gram(i, j) * t.at(k, l, m);
        rep.five_product = std::max(rep.five_product, std::abs(lhs - rhs));
    }
    return rep;
}

}  // namespace sicforge::sic
