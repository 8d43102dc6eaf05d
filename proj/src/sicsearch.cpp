#include "sicforge/sicsearch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace sicforge::sicsearch {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using qmat::Complex;

// 𝒮 for a (possibly non-integer) "dimension" dd, size n x n:
//   first row 1/sqrt(dd); below the diagonal -sqrt(dd/(k(k-1)(dd+1)));
//   diagonal sqrt((k-1)dd/(k(dd+1))); zero above.
MatrixXd s_closed_form(int n, double dd) {
    MatrixXd s = MatrixXd::Zero(n, n);
    for (int l = 0; l < n; ++l) s(0, l) = 1.0 / std::sqrt(dd);
    for (int k = 2; k <= n; ++k) {
        const double off = -std::sqrt(dd / (k * (k - 1.0) * (dd + 1.0)));
        for (int l = 1; l < k; ++l) s(k - 1, l - 1) = off;
        s(k - 1, k - 1) = std::sqrt((k - 1.0) * dd / (k * (dd + 1.0)));
    }
    return s;
}

// Σ(L): rows are the real spherical-harmonic samples of the directions,
//   row 1    -> P_L(cos θ_j)
//   row 2m   -> sqrt(2 (L-m)!/(L+m)!) P_L^m(cos θ_j) cos(m φ_j)
//   row 2m+1 -> sqrt(2 (L-m)!/(L+m)!) P_L^m(cos θ_j) sin(m φ_j)
// The associated Legendre functions carry the Condon–Shortley phase; a sign
// flip of any row is a relabeling of the orthonormal operator basis and is
// absorbed by the orthogonal freedom Q.
MatrixXd sigma_block(int L, const spintomo::DirectionSet& ds) {
    const int size = 2 * L + 1;
    MatrixXd sig(size, size);
    for (int jdir = 0; jdir < size; ++jdir) {
        const auto& dir = ds.directions[static_cast<std::size_t>(jdir)];
        const double ct = std::clamp(dir.n.z(), -1.0, 1.0);
        sig(0, jdir) = qmat::legendre(L, 0, ct);
        for (int m = 1; m <= L; ++m) {
            const double norm =
                std::sqrt(2.0 * std::exp(std::lgamma(L - m + 1.0) - std::lgamma(L + m + 1.0)));
            const double plm = qmat::legendre(L, m, ct);
            sig(2 * m - 1, jdir) = norm * plm * std::cos(m * dir.phi);
            if (2 * m < size) sig(2 * m, jdir) = norm * plm * std::sin(m * dir.phi);
        }
    }
    return sig;
}

std::vector<spintomo::DirectionSet> default_per_l_directions(int d) {
    std::vector<spintomo::DirectionSet> sets;
    sets.reserve(static_cast<std::size_t>(d));
    for (int L = 0; L < d; ++L) {
        const std::size_t count = static_cast<std::size_t>(2 * L + 1);
        const std::uint64_t base = 0x51c00000ull + 100ull * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(L);
        bool placed = false;
        for (std::uint64_t attempt = 0; attempt < 32 && !placed; ++attempt) {
            spintomo::DirectionSet ds = spintomo::spread_directions(count, base + attempt);
            if (spintomo::condition_number(sigma_block(L, ds)) < spintomo::kCondMax) {
                sets.push_back(std::move(ds));
                placed = true;
            }
        }
        if (!placed) throw spintomo::IllPosedDirections(L, std::numeric_limits<double>::infinity());
    }
    return sets;
}

int block_offset(int L) { return L * L; }

MatrixXd q_full(int d, const MatrixXd& qtilde) {
    const int n = d * d;
    MatrixXd q = MatrixXd::Zero(n, n);
    q(0, 0) = 1.0;
    q.block(1, 1, n - 1, n - 1) = qtilde;
    return q;
}

void check_orthogonal(const MatrixXd& q, double tol, const char* who) {
    if (q.rows() != q.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    }
    const MatrixXd gram = q.transpose() * q;
    const double res = (gram - MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
    if (res > tol) {
        throw std::invalid_argument(std::string(who) + ": matrix is not orthogonal (|QᵀQ - I| = " +
                                    std::to_string(res) + ")");
    }
}

}  // namespace

GramFactors gram_factors(int d, const std::vector<spintomo::DirectionSet>& per_l) {
    if (d < 2) throw std::invalid_argument("gram_factors: require d >= 2");
    if (static_cast<int>(per_l.size()) != d) {
        throw std::invalid_argument("gram_factors: need one direction set per L = 0..d-1");
    }
    const int n = d * d;
    GramFactors gf;
    gf.dim = d;
    gf.directions = per_l;

    gf.gamma = MatrixXd(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gf.gamma(i, j) = (d * ((i == j) ? 1.0 : 0.0) + 1.0) / (d + 1.0);

    gf.s = s_closed_form(n, static_cast<double>(d));

    gf.frak_s = MatrixXd::Zero(n, n);
    gf.frak_m = MatrixXd::Zero(n, n);
    for (int L = 0; L < d; ++L) {
        const int size = 2 * L + 1;
        if (static_cast<int>(per_l[static_cast<std::size_t>(L)].count()) != size) {
            throw std::invalid_argument("gram_factors: direction set for L=" + std::to_string(L) +
                                        " must have 2L+1 entries");
        }
        const MatrixXd sig = sigma_block(L, per_l[static_cast<std::size_t>(L)]);
        const double cond = spintomo::condition_number(sig);
        if (!(cond < spintomo::kCondMax)) throw spintomo::IllPosedDirections(L, cond);
        gf.frak_s.block(block_offset(L), block_offset(L), size, size) = sig;
        gf.frak_m.block(block_offset(L), block_offset(L), size, size) =
            spintomo::fnr_m_matrix(L, per_l[static_cast<std::size_t>(L)]);
    }

    // Build-time identities.
    const double res_gamma = (gf.s.transpose() * gf.s - gf.gamma).cwiseAbs().maxCoeff();
    const double res_m = (gf.frak_s.transpose() * gf.frak_s - gf.frak_m).cwiseAbs().maxCoeff();
    double res_rowsum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double target = (k == 0) ? std::pow(static_cast<double>(d), 1.5) : 0.0;
        res_rowsum = std::max(res_rowsum, std::abs(gf.s.row(k).sum() - target));
    }
    if (res_gamma > 1e-10 || res_m > 1e-10 || res_rowsum > 1e-10) {
        throw std::logic_error("gram_factors: factorization identities violated at build time");
    }

    gf.frak_s_inv = gf.frak_s.inverse();

    // Stacked operators, block quantizers and the orthonormalized basis.
    const double j = (d - 1.0) / 2.0;
    gf.s_ops.resize(static_cast<std::size_t>(n));
    gf.d_ops.resize(static_cast<std::size_t>(n));
    for (int L = 0; L < d; ++L) {
        const auto& ds = per_l[static_cast<std::size_t>(L)];
        std::vector<Matrix> s_l(ds.count());
        for (std::size_t k = 0; k < ds.count(); ++k) {
            s_l[k] = qmat::s_operator(L, j, ds.directions[k]);
        }
        const MatrixXd minv = spintomo::fnr_m_matrix(L, ds).inverse();
        for (int k = 0; k <= 2 * L; ++k) {
            gf.s_ops[static_cast<std::size_t>(block_offset(L) + k)] = s_l[static_cast<std::size_t>(k)];
            Matrix dq = Matrix::Zero(d, d);
            for (int kp = 0; kp <= 2 * L; ++kp) dq += minv(k, kp) * s_l[static_cast<std::size_t>(kp)];
            gf.d_ops[static_cast<std::size_t>(block_offset(L) + k)] = dq;
        }
    }
    gf.basis_ops.resize(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        Matrix e = Matrix::Zero(d, d);
        for (int p = 0; p < n; ++p) e += gf.frak_s_inv(p, b) * gf.s_ops[static_cast<std::size_t>(p)];
        gf.basis_ops[static_cast<std::size_t>(b)] = e;
    }

    gf.d_tensor.resize(static_cast<std::size_t>(n) * n * n);
    std::vector<Matrix> pair(static_cast<std::size_t>(n) * n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            pair[static_cast<std::size_t>(p) * n + q] =
                gf.d_ops[static_cast<std::size_t>(p)] * gf.d_ops[static_cast<std::size_t>(q)];
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                gf.d_tensor[(static_cast<std::size_t>(p) * n + q) * n + r] =
                    (pair[static_cast<std::size_t>(p) * n + q] * gf.d_ops[static_cast<std::size_t>(r)])
                        .trace()
                        .real();
    return gf;
}

GramFactors gram_factors(int d) { return gram_factors(d, default_per_l_directions(d)); }

starprod::Scheme harmonic_scheme(const GramFactors& gf) {
    starprod::Scheme s;
    s.label = "harmonic:d=" + std::to_string(gf.dim);
    const int n = gf.dim * gf.dim;
    for (int L = 0; L < gf.dim; ++L) {
        for (int k = 0; k <= 2 * L; ++k) {
            const int p = block_offset(L) + k;
            s.points.push_back({{static_cast<double>(L), static_cast<double>(k)}});
            s.dequantizers.push_back(gf.s_ops[static_cast<std::size_t>(p)]);
            s.quantizers.push_back(gf.d_ops[static_cast<std::size_t>(p)]);
            s.weights.push_back(1.0);
        }
    }
    (void)n;
    s.validate();
    return s;
}

std::vector<Matrix> build_candidate(const GramFactors& gf, const MatrixXd& qtilde) {
    const int n = gf.dim * gf.dim;
    if (qtilde.rows() != n - 1 || qtilde.cols() != n - 1) {
        throw std::invalid_argument("build_candidate: Q̃ must be (d²-1) x (d²-1)");
    }
    check_orthogonal(qtilde, 1e-8, "build_candidate");
    const MatrixXd q = q_full(gf.dim, qtilde);
    // Π_i = Σ_b (Q s_i)_b ê_b with s_i the i-th column of 𝒮.
    const MatrixXd qs = q * gf.s;
    std::vector<Matrix> candidate(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Matrix pi = Matrix::Zero(gf.dim, gf.dim);
        for (int b = 0; b < n; ++b) pi += qs(b, i) * gf.basis_ops[static_cast<std::size_t>(b)];
        candidate[static_cast<std::size_t>(i)] = 0.5 * (pi + Matrix(pi.adjoint()));
    }
    return candidate;
}

namespace {

// Symbol matrix F = 𝔖ᵀ Q 𝒮; column i holds the symbols of Π_i.
MatrixXd symbol_matrix(const GramFactors& gf, const MatrixXd& qtilde) {
    return gf.frak_s.transpose() * q_full(gf.dim, qtilde) * gf.s;
}

VectorXd functional_from_f(const GramFactors& gf, const MatrixXd& f) {
    const int n = gf.dim * gf.dim;
    VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        const VectorXd w = f.col(i);
        double acc = 0.0;
        for (int p = 0; p < n; ++p) {
            double quad = 0.0;
            for (int a = 0; a < n; ++a) {
                double row = 0.0;
                for (int b = 0; b < n; ++b) row += gf.d_tensor_at(p, a, b) * w(b);
                quad += w(a) * row;
            }
            acc += f(p, i) * quad;
        }
        v(i) = acc;
    }
    return v;
}

// dΣV/dF; uses the full symmetry of Re Tr[DDD].
MatrixXd functional_grad_f(const GramFactors& gf, const MatrixXd& f) {
    const int n = gf.dim * gf.dim;
    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        const VectorXd w = f.col(i);
        for (int a = 0; a < n; ++a) {
            double quad = 0.0;
            for (int p = 0; p < n; ++p) {
                double row = 0.0;
                for (int b = 0; b < n; ++b) row += gf.d_tensor_at(a, p, b) * w(b);
                quad += w(p) * row;
            }
            g(a, i) = 3.0 * quad;
        }
    }
    return g;
}

}  // namespace

VectorXd functional_V(const GramFactors& gf, const MatrixXd& qtilde) {
    const int n = gf.dim * gf.dim;
    if (qtilde.rows() != n - 1 || qtilde.cols() != n - 1) {
        throw std::invalid_argument("functional_V: Q̃ must be (d²-1) x (d²-1)");
    }
    check_orthogonal(qtilde, 1e-8, "functional_V");
    return functional_from_f(gf, symbol_matrix(gf, qtilde));
}

double matrix_equation_residual(const GramFactors& gf, const MatrixXd& qtilde) {
    const int n = gf.dim * gf.dim;
    const MatrixXd f = symbol_matrix(gf, qtilde);
    // Dual symbols of Π_i: Tr[D_p Π_i] = (𝔖^{-1} Q 𝒮)_{pi}.
    const MatrixXd dual = gf.frak_s_inv * q_full(gf.dim, qtilde) * gf.s;
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
        const VectorXd w = f.col(i);
        for (int p = 0; p < n; ++p) {
            double lhs = 0.0;  // Tr[D_p Π_i²]
            for (int a = 0; a < n; ++a) {
                double row = 0.0;
                for (int b = 0; b < n; ++b) row += gf.d_tensor_at(p, a, b) * w(b);
                lhs += w(a) * row;
            }
            residual = std::max(residual, std::abs(lhs - dual(p, i)));
        }
    }
    return residual;
}

// ── Givens-angle parametrization of SO(n) ────────────────────────────────────

namespace {

struct GivensChain {
    int n = 0;
    std::vector<std::pair<int, int>> planes;

    explicit GivensChain(int dim) : n(dim) {
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) planes.emplace_back(a, b);
    }

    int angle_count() const { return static_cast<int>(planes.size()); }

    static void apply_left(MatrixXd& m, int a, int b, double c, double s) {
        // m <- G(a,b,θ) m with rows a,b mixed.
        const Eigen::RowVectorXd ra = m.row(a);
        const Eigen::RowVectorXd rb = m.row(b);
        m.row(a) = c * ra - s * rb;
        m.row(b) = s * ra + c * rb;
    }

    MatrixXd rotation(const VectorXd& angles) const {
        MatrixXd q = MatrixXd::Identity(n, n);
        // Q = G_0 G_1 ... G_{T-1}; build by left-applying in reverse order.
        for (int t = angle_count() - 1; t >= 0; --t) {
            apply_left(q, planes[static_cast<std::size_t>(t)].first,
                       planes[static_cast<std::size_t>(t)].second, std::cos(angles(t)),
                       std::sin(angles(t)));
        }
        return q;
    }

    // dΦ/dθ_t for Φ with known matrix gradient dΦ/dQ.
    VectorXd chain_gradient(const VectorXd& angles, const MatrixXd& dphi_dq) const {
        const int T = angle_count();
        std::vector<MatrixXd> prefix(static_cast<std::size_t>(T) + 1);
        prefix[0] = MatrixXd::Identity(n, n);
        for (int t = 0; t < T; ++t) {
            MatrixXd next = prefix[static_cast<std::size_t>(t)];
            // right-multiply by G_t == transpose-left trick: (P G)ᵀ = Gᵀ Pᵀ.
            MatrixXd tmp = next.transpose();
            apply_left(tmp, planes[static_cast<std::size_t>(t)].first,
                       planes[static_cast<std::size_t>(t)].second, std::cos(angles(t)),
                       -std::sin(angles(t)));  // Gᵀ has the opposite sine sign
            prefix[static_cast<std::size_t>(t) + 1] = tmp.transpose();
        }
        std::vector<MatrixXd> suffix(static_cast<std::size_t>(T) + 1);
        suffix[static_cast<std::size_t>(T)] = MatrixXd::Identity(n, n);
        for (int t = T - 1; t >= 0; --t) {
            MatrixXd next = suffix[static_cast<std::size_t>(t) + 1];
            apply_left(next, planes[static_cast<std::size_t>(t)].first,
                       planes[static_cast<std::size_t>(t)].second, std::cos(angles(t)),
                       std::sin(angles(t)));
            suffix[static_cast<std::size_t>(t)] = next;
        }
        VectorXd grad(T);
        for (int t = 0; t < T; ++t) {
            const auto [a, b] = planes[static_cast<std::size_t>(t)];
            const double c = std::cos(angles(t));
            const double s = std::sin(angles(t));
            const MatrixXd w = prefix[static_cast<std::size_t>(t)].transpose() * dphi_dq *
                               suffix[static_cast<std::size_t>(t) + 1].transpose();
            grad(t) = -s * w(a, a) - c * w(a, b) + c * w(b, a) - s * w(b, b);
        }
        return grad;
    }
};

// ── Minimal L-BFGS with Armijo backtracking ──────────────────────────────────

struct AscentResult {
    VectorXd x;
    double f = 0.0;  // minimized value
    int iterations = 0;
    std::vector<double> history;
};

template <typename FGrad, typename FOnly>
AscentResult lbfgs_minimize(FGrad&& f_grad, FOnly&& f_only, VectorXd x0, int max_iter,
                            double f_target, double grad_tol) {
    const int memory = 10;
    const Eigen::Index dim = x0.size();
    AscentResult res;
    res.x = std::move(x0);

    VectorXd g(dim);
    double f = f_grad(res.x, g);
    res.history.push_back(f);

    std::vector<VectorXd> s_hist, y_hist;
    std::vector<double> rho_hist;
    VectorXd x_prev = res.x, g_prev = g;

    for (int iter = 0; iter < max_iter; ++iter) {
        if (f <= f_target || g.lpNorm<Eigen::Infinity>() < grad_tol) break;

        // Two-loop recursion.
        VectorXd q = g;
        const int m = static_cast<int>(s_hist.size());
        std::vector<double> alpha(static_cast<std::size_t>(m));
        for (int k = m - 1; k >= 0; --k) {
            alpha[static_cast<std::size_t>(k)] =
                rho_hist[static_cast<std::size_t>(k)] * s_hist[static_cast<std::size_t>(k)].dot(q);
            q -= alpha[static_cast<std::size_t>(k)] * y_hist[static_cast<std::size_t>(k)];
        }
        if (m > 0) {
            const auto& sl = s_hist.back();
            const auto& yl = y_hist.back();
            q *= sl.dot(yl) / yl.squaredNorm();
        }
        for (int k = 0; k < m; ++k) {
            const double beta =
                rho_hist[static_cast<std::size_t>(k)] * y_hist[static_cast<std::size_t>(k)].dot(q);
            q += (alpha[static_cast<std::size_t>(k)] - beta) * s_hist[static_cast<std::size_t>(k)];
        }
        VectorXd dir = -q;
        double slope = g.dot(dir);
        if (slope >= 0.0) {  // not a descent direction; fall back
            dir = -g;
            slope = g.dot(dir);
        }

        double step = 1.0;
        double f_new = f;
        VectorXd x_new;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = res.x + step * dir;
            f_new = f_only(x_new);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        x_prev = res.x;
        g_prev = g;
        res.x = x_new;
        f = f_grad(res.x, g);
        res.history.push_back(f);
        ++res.iterations;

        VectorXd s_vec = res.x - x_prev;
        VectorXd y_vec = g - g_prev;
        const double sy = s_vec.dot(y_vec);
        if (sy > 1e-12 * s_vec.norm() * y_vec.norm()) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > memory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }
    }
    res.f = f;
    return res;
}

int resolve_threads(const SearchConfig& cfg, int jobs) {
    int threads = cfg.threads;
    if (threads <= 0) {
        if (const char* env = std::getenv("SICFORGE_THREADS")) {
            threads = std::atoi(env);
        }
    }
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
    return std::min(threads, std::max(1, jobs));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    // splitmix64 step; deterministic per (base, salt).
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct RestartOutcome {
    double objective = -1.0;
    VectorXd angles;
    std::uint64_t seed = 0;
    int iterations = 0;
    std::vector<double> history;
};

}  // namespace

MatrixXd givens_rotation(int n, const VectorXd& angles) {
    const GivensChain chain(n);
    if (angles.size() != chain.angle_count()) {
        throw std::invalid_argument("givens_rotation: expected n(n-1)/2 angles");
    }
    return chain.rotation(angles);
}

namespace {

// Φ = Σ_i V_i and (optionally) dΦ/dθ through the Givens chain.
double objective_pieces(const GramFactors& gf, const GivensChain& chain, const VectorXd& angles,
                        VectorXd* grad) {
    const int n = gf.dim * gf.dim;
    const MatrixXd qtilde = chain.rotation(angles);
    const MatrixXd f = gf.frak_s.transpose() * q_full(gf.dim, qtilde) * gf.s;
    const double phi = functional_from_f(gf, f).sum();
    if (grad != nullptr) {
        const MatrixXd g_f = functional_grad_f(gf, f);
        const MatrixXd g_q = gf.frak_s * g_f * gf.s.transpose();  // dΦ/dQ (full block)
        *grad = chain.chain_gradient(angles, g_q.block(1, 1, n - 1, n - 1));
    }
    return phi;
}

}  // namespace

VectorXd objective_gradient(const GramFactors& gf, const VectorXd& angles) {
    const GivensChain chain(gf.dim * gf.dim - 1);
    if (angles.size() != chain.angle_count()) {
        throw std::invalid_argument("objective_gradient: expected (d²-1)(d²-2)/2 angles");
    }
    VectorXd grad(angles.size());
    objective_pieces(gf, chain, angles, &grad);
    return grad;
}

SearchState optimize(const GramFactors& gf, const SearchConfig& cfg) {
    const int n = gf.dim * gf.dim;
    const double target = static_cast<double>(n);
    const GivensChain chain(n - 1);

    auto run_restart = [&](int r) {
        RestartOutcome out;
        out.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        VectorXd angles = VectorXd::Zero(chain.angle_count());
        if (r > 0) {
            std::mt19937_64 rng(out.seed);
            std::uniform_real_distribution<double> uni(-M_PI, M_PI);
            for (Eigen::Index t = 0; t < angles.size(); ++t) angles(t) = uni(rng);
        }
        auto f_grad = [&](const VectorXd& x, VectorXd& g) {
            const double phi = objective_pieces(gf, chain, x, &g);
            g = -g;
            return target - phi;
        };
        auto f_only = [&](const VectorXd& x) {
            return target - objective_pieces(gf, chain, x, nullptr);
        };
        AscentResult res = lbfgs_minimize(f_grad, f_only, std::move(angles), cfg.max_iterations,
                                          cfg.target_gap, 1e-11);
        out.objective = target - res.f;
        out.angles = std::move(res.x);
        out.iterations = res.iterations;
        out.history.reserve(res.history.size());
        for (double h : res.history) out.history.push_back(target - h);
        return out;
    };

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(std::max(1, cfg.restarts)));
    const int jobs = static_cast<int>(outcomes.size());
    const int threads = resolve_threads(cfg, jobs);
    if (threads <= 1) {
        bool done = false;
        for (int r = 0; r < jobs && !done; ++r) {
            outcomes[static_cast<std::size_t>(r)] = run_restart(r);
            if (target - outcomes[static_cast<std::size_t>(r)].objective <= cfg.target_gap) done = true;
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (int r = next.fetch_add(1); r < jobs; r = next.fetch_add(1)) {
                    outcomes[static_cast<std::size_t>(r)] = run_restart(r);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Restarts after the first one that reached the deep gap target never
    // influence the result; truncating there keeps the outcome identical for
    // any thread count (the single-thread path simply skips computing them).
    std::size_t considered = outcomes.size();
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        if (outcomes[r].angles.size() != 0 && target - outcomes[r].objective <= cfg.target_gap) {
            considered = r + 1;
            break;
        }
    }

    const RestartOutcome* best = nullptr;
    for (std::size_t r = 0; r < considered; ++r) {
        const auto& out = outcomes[r];
        if (out.angles.size() == 0) continue;
        if (best == nullptr || out.objective > best->objective ||
            (out.objective == best->objective && out.seed < best->seed)) {
            best = &out;
        }
    }

    SearchState state;
    state.dim = gf.dim;
    state.qtilde = chain.rotation(best->angles);
    state.objective = best->objective;
    state.v = functional_V(gf, state.qtilde);
    state.residual_matrix_equation = matrix_equation_residual(gf, state.qtilde);
    state.seed = best->seed;
    state.iterations = best->iterations;
    state.history = best->history;
    state.converged = (target - state.objective) < cfg.tol_obj;
    if (state.converged) {
        // Success is never declared on the objective alone.
        state.converged = sic::verify(build_candidate(gf, state.qtilde), cfg.verify_tol).pass;
    }
    return state;
}

SearchState optimize(int d, const SearchConfig& cfg) { return optimize(gram_factors(d), cfg); }

SearchState sequential_rotations(const GramFactors& gf, const SearchConfig& cfg) {
    const int d = gf.dim;
    const int n = d * d;
    const int nt = n - 1;

    // Π_i depends on Q s_i only; step s rotates with P = diag(1, P̃) where P̃
    // fixes the previously rotated tail vectors.
    auto candidate_from_vec = [&](const VectorXd& u) {
        Matrix pi = Matrix::Zero(d, d);
        for (int b = 0; b < n; ++b) pi += u(b) * gf.basis_ops[static_cast<std::size_t>(b)];
        return Matrix(0.5 * (pi + Matrix(pi.adjoint())));
    };

    SearchState state;
    state.dim = d;
    state.converged = false;

    for (int attempt = 0; attempt < std::max(1, cfg.restarts); ++attempt) {
        MatrixXd q_cur = MatrixXd::Identity(n, n);
        std::vector<double> psd_residuals;
        bool failed = false;

        for (int step = 0; step < n - 1 && !failed; ++step) {
            // Orthonormal basis of the stabilizer complement.
            MatrixXd basis(nt, nt - step);
            if (step == 0) {
                basis = MatrixXd::Identity(nt, nt);
            } else {
                MatrixXd fixed(nt, step);
                for (int k = 0; k < step; ++k) fixed.col(k) = (q_cur * gf.s.col(k)).tail(nt);
                Eigen::HouseholderQR<MatrixXd> qr(fixed);
                const MatrixXd full = qr.householderQ();
                for (int c = step; c < nt; ++c) basis.col(c - step) = full.col(c);
            }
            const int m = nt - step;
            const VectorXd v_full = q_cur * gf.s.col(step);
            const VectorXd tail = v_full.tail(nt);
            const VectorXd c0 = basis.transpose() * tail;
            const VectorXd tail_fixed = tail - basis * c0;

            auto pi_of = [&](const VectorXd& rc0) {
                VectorXd u(n);
                u(0) = v_full(0);
                u.tail(nt) = tail_fixed + basis * rc0;
                return candidate_from_vec(u);
            };

            double best_v = -1e300;
            MatrixXd best_r = MatrixXd::Identity(m, m);
            if (m >= 2) {
                const GivensChain chain(m);
                auto eval = [&](const VectorXd& angles, VectorXd* grad) {
                    const MatrixXd r = chain.rotation(angles);
                    const Matrix pi = pi_of(r * c0);
                    const Matrix pi2 = pi * pi;
                    const double v_val = (pi2 * pi).trace().real();
                    if (grad != nullptr) {
                        // dV = 3 Re Tr[Π² ê_b] (dP tail)_b with dP = B dR c0.
                        VectorXd gvec(nt);
                        for (int b = 0; b < nt; ++b) {
                            gvec(b) =
                                3.0 * (pi2 * gf.basis_ops[static_cast<std::size_t>(b + 1)]).trace().real();
                        }
                        const VectorXd a_vec = basis.transpose() * gvec;
                        // dΦ/dR = a_vec c0ᵀ; chain through the Givens product.
                        *grad = -chain.chain_gradient(angles, a_vec * c0.transpose());
                    }
                    return 1.0 - v_val;  // maximize V_step
                };
                for (int sr = 0; sr < std::max(1, cfg.step_restarts); ++sr) {
                    VectorXd angles = VectorXd::Zero(chain.angle_count());
                    if (sr > 0) {
                        std::mt19937_64 rng(derive_seed(
                            cfg.seed, 0x5eull + 1000ull * static_cast<std::uint64_t>(attempt) +
                                          100ull * static_cast<std::uint64_t>(step) +
                                          static_cast<std::uint64_t>(sr)));
                        std::uniform_real_distribution<double> uni(-M_PI, M_PI);
                        for (Eigen::Index t = 0; t < angles.size(); ++t) angles(t) = uni(rng);
                    }
                    auto f_grad = [&](const VectorXd& x, VectorXd& g) { return eval(x, &g); };
                    auto f_only = [&](const VectorXd& x) { return eval(x, nullptr); };
                    AscentResult res = lbfgs_minimize(f_grad, f_only, std::move(angles),
                                                      cfg.max_iterations, cfg.target_gap, 1e-11);
                    const double v_val = 1.0 - res.f;
                    if (v_val > best_v) {
                        best_v = v_val;
                        best_r = chain.rotation(res.x);
                    }
                    if (1.0 - best_v <= cfg.target_gap) break;
                }
            } else {
                const Matrix pi = pi_of(c0);
                best_v = (pi * pi * pi).trace().real();
            }

            // Accept the step rotation and record the PSD residual.
            MatrixXd p_tilde = MatrixXd::Identity(nt, nt);
            if (m >= 2) {
                p_tilde = basis * best_r * basis.transpose() +
                          (MatrixXd::Identity(nt, nt) - basis * basis.transpose());
            }
            MatrixXd p = MatrixXd::Identity(n, n);
            p.block(1, 1, nt, nt) = p_tilde;
            q_cur = p * q_cur;

            const Matrix pi = candidate_from_vec(q_cur * gf.s.col(step));
            Eigen::SelfAdjointEigenSolver<Matrix> solver(pi);
            const double psd_res = std::max(0.0, -solver.eigenvalues().minCoeff());
            psd_residuals.push_back(psd_res);
            if (psd_res > cfg.psd_tol) failed = true;
        }

        // The last projector is fully determined; include its residual too.
        {
            const Matrix pi = candidate_from_vec(q_cur * gf.s.col(n - 1));
            Eigen::SelfAdjointEigenSolver<Matrix> solver(pi);
            const double psd_res = std::max(0.0, -solver.eigenvalues().minCoeff());
            psd_residuals.push_back(psd_res);
            if (psd_res > cfg.psd_tol) failed = true;
        }

        const MatrixXd qtilde = q_cur.block(1, 1, nt, nt);
        const VectorXd v = functional_V(gf, qtilde);
        const double objective = v.sum();
        if (objective > state.objective || attempt == 0) {
            state.qtilde = qtilde;
            state.objective = objective;
            state.v = v;
            state.residual_matrix_equation = matrix_equation_residual(gf, qtilde);
            state.seed = derive_seed(cfg.seed, 0x5e00ull + static_cast<std::uint64_t>(attempt));
            state.step_psd_residuals = psd_residuals;
            state.iterations = static_cast<int>(psd_residuals.size());
        }
        if (!failed) {
            state.converged = sic::verify(build_candidate(gf, state.qtilde), cfg.verify_tol).pass;
            if (state.converged) break;
        }
    }
    return state;
}

EquiangularFrame equiangular_frame(int n) {
    if (n < 1) throw std::invalid_argument("equiangular_frame: require N >= 1");
    const double dd = std::sqrt(n + 1.0);
    const MatrixXd s = s_closed_form(n + 1, dd);
    EquiangularFrame frame;
    frame.n = n;
    frame.vectors.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) frame.vectors.push_back(s.col(i).tail(n));
    return frame;
}

std::pair<sic::SicSet, Eigen::MatrixXd> unitary_orbit(const sic::SicSet& set, const Matrix& u,
                                                      const GramFactors& gf) {
    if (u.rows() != set.dim || u.cols() != set.dim) {
        throw std::invalid_argument("unitary_orbit: unitary has wrong dimension");
    }
    const Matrix gram = u.adjoint() * u;
    if (qmat::max_abs(gram - Matrix::Identity(set.dim, set.dim)) > 1e-10) {
        throw std::invalid_argument("unitary_orbit: matrix is not unitary within 1e-10");
    }
    std::vector<Matrix> rotated;
    rotated.reserve(set.projectors.size());
    for (const auto& pi : set.projectors) rotated.push_back(u * pi * u.adjoint());
    sic::SicSet out = sic::make_sic_set(std::move(rotated), set.verification.tolerance);

    const int n = set.dim * set.dim;
    Eigen::MatrixXd overlap(n, n);  // O_pq = Tr[u S_p u† S_q], real
    for (int p = 0; p < n; ++p) {
        const Matrix moved = u * gf.s_ops[static_cast<std::size_t>(p)] * u.adjoint();
        for (int q = 0; q < n; ++q) {
            overlap(p, q) = (moved * gf.s_ops[static_cast<std::size_t>(q)]).trace().real();
        }
    }
    const Eigen::MatrixXd q_u =
        gf.frak_s_inv.transpose() * overlap.transpose() * gf.frak_s_inv;
    return {std::move(out), q_u};
}

std::pair<sic::SicSet, Eigen::MatrixXd> unitary_orbit(const sic::SicSet& set, const Matrix& u) {
    return unitary_orbit(set, u, gram_factors(set.dim));
}

}  // namespace sicforge::sicsearch
