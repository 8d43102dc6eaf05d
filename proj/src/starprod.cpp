#include "sicforge/starprod.hpp"

#include <stdexcept>

namespace sicforge::starprod {

int Scheme::op_dim() const {
    if (dequantizers.empty()) {
        throw std::logic_error("Scheme: no operators");
    }
    return static_cast<int>(dequantizers.front().rows());
}

void Scheme::validate() const {
    const std::size_t n = points.size();
    if (dequantizers.size() != n || quantizers.size() != n || weights.size() != n) {
        throw std::invalid_argument("Scheme '" + label +
                                    "': operator/weight counts do not match index space");
    }
    const int d = op_dim();
    for (std::size_t x = 0; x < n; ++x) {
        if (dequantizers[x].rows() != d || dequantizers[x].cols() != d ||
            quantizers[x].rows() != d || quantizers[x].cols() != d) {
            throw std::invalid_argument("Scheme '" + label + "': non-square or mixed-size operators");
        }
    }
}

Symbol symbol(const Matrix& a, const Scheme& s) {
    if (a.rows() != s.op_dim() || a.cols() != s.op_dim()) {
        throw std::invalid_argument("symbol: operator dimension does not match scheme '" +
                                    s.label + "'");
    }
    Symbol f;
    f.scheme_label = s.label;
    f.values.resize(static_cast<Eigen::Index>(s.size()));
    for (std::size_t x = 0; x < s.size(); ++x) {
        f.values(static_cast<Eigen::Index>(x)) = (a * s.dequantizers[x]).trace();
    }
    return f;
}

Matrix reconstruct(const Symbol& f, const Scheme& s) {
    if (f.scheme_label != s.label) {
        throw std::invalid_argument("reconstruct: symbol belongs to scheme '" +
                                    f.scheme_label + "', not '" + s.label + "'");
    }
    if (static_cast<std::size_t>(f.values.size()) != s.size()) {
        throw std::invalid_argument("reconstruct: symbol length does not match scheme");
    }
    const int d = s.op_dim();
    Matrix a = Matrix::Zero(d, d);
    for (std::size_t x = 0; x < s.size(); ++x) {
        a += s.weights[x] * f.values(static_cast<Eigen::Index>(x)) * s.quantizers[x];
    }
    return a;
}

Eigen::MatrixXcd delta_kernel(const Scheme& s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXcd dk(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            dk(x, y) = (s.dequantizers[static_cast<std::size_t>(x)] *
                        s.quantizers[static_cast<std::size_t>(y)])
                           .trace();
        }
    }
    return dk;
}

namespace {

KernelTensor kernel_impl(const Scheme& s, bool dual) {
    const std::size_t n = s.size();
    const auto& a_ops = dual ? s.dequantizers : s.quantizers;
    const auto& b_ops = dual ? s.quantizers : s.dequantizers;
    KernelTensor k;
    k.scheme_label = s.label;
    k.dual = dual;
    k.n = n;
    k.entries.resize(n * n * n);
    for (std::size_t x1 = 0; x1 < n; ++x1) {
        for (std::size_t x2 = 0; x2 < n; ++x2) {
            const Matrix prod = a_ops[x1] * a_ops[x2];
            const double w12 = s.weights[x1] * s.weights[x2];
            for (std::size_t x = 0; x < n; ++x) {
                k.at(x1, x2, x) = w12 * (prod * b_ops[x]).trace();
            }
        }
    }
    return k;
}

}  // namespace

KernelTensor kernel(const Scheme& s) { return kernel_impl(s, false); }

KernelTensor dual_kernel(const Scheme& s) { return kernel_impl(s, true); }

Symbol star(const Symbol& f, const Symbol& g, const KernelTensor& k) {
    if (f.scheme_label != g.scheme_label || f.scheme_label != k.scheme_label) {
        throw std::invalid_argument("star: symbols/kernel belong to different schemes");
    }
    const std::size_t n = k.n;
    if (static_cast<std::size_t>(f.values.size()) != n ||
        static_cast<std::size_t>(g.values.size()) != n) {
        throw std::invalid_argument("star: symbol length mismatch");
    }
    Symbol out;
    out.scheme_label = f.scheme_label;
    out.values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t x1 = 0; x1 < n; ++x1) {
        const Complex fv = f.values(static_cast<Eigen::Index>(x1));
        if (fv == Complex(0.0, 0.0)) continue;
        for (std::size_t x2 = 0; x2 < n; ++x2) {
            const Complex fg = fv * g.values(static_cast<Eigen::Index>(x2));
            const Complex* row = &k.entries[(x1 * n + x2) * n];
            for (std::size_t x = 0; x < n; ++x) {
                out.values(static_cast<Eigen::Index>(x)) += fg * row[x];
            }
        }
    }
    return out;
}

double check_assoc3(const KernelTensor& k) {
    const std::size_t n = k.n;
    // Route A: Σ_y K[x1][x2][y] K[y][x3][x]
    // Route B: Σ_y K[x1][y][x]  K[x2][x3][y]
    double residual = 0.0;
    for (std::size_t x1 = 0; x1 < n; ++x1) {
        for (std::size_t x2 = 0; x2 < n; ++x2) {
            for (std::size_t x3 = 0; x3 < n; ++x3) {
                for (std::size_t x = 0; x < n; ++x) {
                    Complex a(0.0, 0.0), b(0.0, 0.0);
                    for (std::size_t y = 0; y < n; ++y) {
                        a += k.at(x1, x2, y) * k.at(y, x3, x);
                        b += k.at(x1, y, x) * k.at(x2, x3, y);
                    }
                    residual = std::max(residual, std::abs(a - b));
                }
            }
        }
    }
    return residual;
}

namespace {

// Dense n^5 tensor indexed [x1][x2][x3][x4][x].
using Tensor5 = std::vector<Complex>;

std::size_t idx5(std::size_t n, std::size_t a, std::size_t b, std::size_t c,
                 std::size_t d, std::size_t e) {
    return (((a * n + b) * n + c) * n + d) * n + e;
}

}  // namespace

double check_assoc4(const KernelTensor& k) {
    const std::size_t n = k.n;
    if (n > 32) {
        throw std::invalid_argument("check_assoc4: index space too large for the dense check");
    }
    auto K = [&](std::size_t a, std::size_t b, std::size_t c) { return k.at(a, b, c); };

    // The five pairings of (f1 ⋆ f2 ⋆ f3 ⋆ f4)(x); y, z are the contracted slots.
    std::vector<Tensor5> pairings(5, Tensor5(n * n * n * n * n, Complex(0.0, 0.0)));
    for (std::size_t x1 = 0; x1 < n; ++x1)
        for (std::size_t x2 = 0; x2 < n; ++x2)
            for (std::size_t x3 = 0; x3 < n; ++x3)
                for (std::size_t x4 = 0; x4 < n; ++x4)
                    for (std::size_t x = 0; x < n; ++x) {
                        Complex p0(0, 0), p1(0, 0), p2(0, 0), p3(0, 0), p4(0, 0);
                        for (std::size_t y = 0; y < n; ++y)
                            for (std::size_t z = 0; z < n; ++z) {
                                p0 += K(x1, x2, y) * K(y, x3, z) * K(z, x4, x);
                                p1 += K(x1, x2, y) * K(y, z, x) * K(x3, x4, z);
                                p2 += K(x1, y, z) * K(x2, x3, y) * K(z, x4, x);
                                p3 += K(x1, y, x) * K(x2, x3, z) * K(z, x4, y);
                                p4 += K(x1, y, x) * K(x2, z, y) * K(x3, x4, z);
                            }
                        const std::size_t i = idx5(n, x1, x2, x3, x4, x);
                        pairings[0][i] = p0;
                        pairings[1][i] = p1;
                        pairings[2][i] = p2;
                        pairings[3][i] = p3;
                        pairings[4][i] = p4;
                    }

    double residual = 0.0;
    for (std::size_t a = 0; a < 5; ++a) {
        for (std::size_t b = a + 1; b < 5; ++b) {
            for (std::size_t i = 0; i < pairings[a].size(); ++i) {
                residual = std::max(residual, std::abs(pairings[a][i] - pairings[b][i]));
            }
        }
    }
    return residual;
}

Scheme dual_scheme(const Scheme& s) {
    Scheme d = s;
    d.label = s.label + ":dual";
    std::swap(d.dequantizers, d.quantizers);
    return d;
}

namespace {

// Matrix units E_ab as a basis of the d x d operator space.
Matrix matrix_unit(int d, int a, int b) {
    Matrix e = Matrix::Zero(d, d);
    e(a, b) = Complex(1.0, 0.0);
    return e;
}

}  // namespace

double reconstruction_residual(const Scheme& s) {
    const int d = s.op_dim();
    double residual = 0.0;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const Matrix e = matrix_unit(d, a, b);
            residual = std::max(residual, qmat::max_abs(reconstruct(symbol(e, s), s) - e));
        }
    }
    return residual;
}

double delta_reproduction_residual(const Scheme& s) {
    const int d = s.op_dim();
    const Eigen::MatrixXcd dk = delta_kernel(s);
    const auto n = static_cast<Eigen::Index>(s.size());
    double residual = 0.0;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const Symbol f = symbol(matrix_unit(d, a, b), s);
            for (Eigen::Index x = 0; x < n; ++x) {
                Complex acc(0.0, 0.0);
                for (Eigen::Index y = 0; y < n; ++y) {
                    acc += s.weights[static_cast<std::size_t>(y)] * dk(x, y) * f.values(y);
                }
                residual = std::max(residual, std::abs(acc - f.values(x)));
            }
        }
    }
    return residual;
}

}  // namespace sicforge::starprod
