// Generic star-product engine.  A Scheme is a finite index space together
// with paired dequantizer/quantizer families U(x), D(x) and a quadrature
// weight w(x) standing in for the "∫ dx" pairing:
//
//   symbol       f_A(x) = Tr[A U(x)]
//   reconstruct  A      = Σ_x w(x) f_A(x) D(x)
//   delta        𝔇(x,x') = Tr[U(x) D(x')]          (reproducing kernel)
//   kernel       K(x1,x2,x)      = Tr[D(x1) D(x2) U(x)]
//   dual kernel  K^dual(x1,x2,x) = Tr[U(x1) U(x2) D(x)]
//
// KernelTensor entries are stored with the weights of the two input slots
// folded in, so every contraction below is a plain summation.

#pragma once

#include <string>
#include <vector>

#include "sicforge/qmat.hpp"

namespace sicforge::starprod {

using qmat::Complex;
using qmat::Matrix;

/// Opaque index-space point, e.g. {m,k}, {m,nx,ny,nz} or {i}.
struct IndexPoint {
    std::vector<double> coords;
};

struct Scheme {
    std::string label;
    std::vector<IndexPoint> points;
    std::vector<Matrix> dequantizers;  // U(x)
    std::vector<Matrix> quantizers;    // D(x)
    std::vector<double> weights;       // w(x)

    std::size_t size() const { return points.size(); }
    int op_dim() const;
    /// Throws unless points, operators and weights are consistent.
    void validate() const;
};

struct Symbol {
    std::string scheme_label;
    Eigen::VectorXcd values;
};

struct KernelTensor {
    std::string scheme_label;
    bool dual = false;
    std::size_t n = 0;
    std::vector<Complex> entries;  // n^3, row-major [x1][x2][x], weights folded

    Complex at(std::size_t x1, std::size_t x2, std::size_t x) const {
        return entries[(x1 * n + x2) * n + x];
    }
    Complex& at(std::size_t x1, std::size_t x2, std::size_t x) {
        return entries[(x1 * n + x2) * n + x];
    }
};

Symbol symbol(const Matrix& a, const Scheme& s);

Matrix reconstruct(const Symbol& f, const Scheme& s);

/// 𝔇(x,x') = Tr[U(x) D(x')], weights not folded; the reproducing identity is
/// f(x) = Σ_{x'} w(x') 𝔇(x,x') f(x').
Eigen::MatrixXcd delta_kernel(const Scheme& s);

KernelTensor kernel(const Scheme& s);
KernelTensor dual_kernel(const Scheme& s);

/// (f ⋆ g)(x) = Σ_{x1,x2} f(x1) g(x2) K[x1][x2][x].
Symbol star(const Symbol& f, const Symbol& g, const KernelTensor& k);

/// Max residual between the two pairings of the three-fold kernel.
double check_assoc3(const KernelTensor& k);

/// Max pairwise discrepancy among all five pairings of the four-fold kernel.
double check_assoc4(const KernelTensor& k);

/// The dual scheme: dequantizer and quantizer families swapped.
Scheme dual_scheme(const Scheme& s);

/// Max reconstruction error of symbol→reconstruct round trips over the
/// matrix-unit basis of the scheme's operator space.
double reconstruction_residual(const Scheme& s);

/// Max delta-kernel reproduction error over the matrix-unit basis.
double delta_reproduction_residual(const Scheme& s);

}  // namespace sicforge::starprod
