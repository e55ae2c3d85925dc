#pragma once

// 2x2 block-constant algebra. A block-constant 2n x 2n matrix has four
// n x n blocks that are each a scalar multiple of the identity; the algebra
// of such matrices is isomorphic to the 2x2 complex matrices, which is the
// representation used here.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace girko {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using BlockConstant = Eigen::Matrix2cd;

inline BlockConstant bc(Complex b11, Complex b12, Complex b21, Complex b22) {
    BlockConstant B;
    B << b11, b12, b21, b22;
    return B;
}

namespace basis {
inline BlockConstant I() { return BlockConstant::Identity(); }
inline BlockConstant E1() { return bc(1, 0, 0, 0); }
inline BlockConstant E2() { return bc(0, 0, 0, 1); }
inline BlockConstant F() { return bc(0, 0, 1, 0); }
inline BlockConstant Fstar() { return bc(0, 1, 0, 0); }
inline BlockConstant Eminus() { return bc(1, 0, 0, -1); }
} // namespace basis

// normalized trace <A> = tr(A) / dim, identical for the 2x2 representation
// and its 2n x 2n embedding
inline Complex ntrace(const BlockConstant& B) { return B.trace() / 2.0; }
inline Complex ntrace(const ComplexMatrix& A) {
    return A.trace() / static_cast<double>(A.rows());
}

// trace pairing <AB> in the 2x2 representation
inline Complex ntrace_prod(const BlockConstant& A, const BlockConstant& B) {
    return (A * B).trace() / 2.0;
}

// embed a block constant into the full 2n x 2n space
inline ComplexMatrix embed(const BlockConstant& B, int n) {
    ComplexMatrix A = ComplexMatrix::Zero(2 * n, 2 * n);
    ComplexMatrix id = ComplexMatrix::Identity(n, n);
    A.topLeftCorner(n, n) = B(0, 0) * id;
    A.topRightCorner(n, n) = B(0, 1) * id;
    A.bottomLeftCorner(n, n) = B(1, 0) * id;
    A.bottomRightCorner(n, n) = B(1, 1) * id;
    return A;
}

struct BlockDecomposition {
    Complex c_id;     // <A>
    Complex c_eminus; // <A E_->
    Complex c_f;      // 2 <A F*>, coefficient of F
    Complex c_fstar;  // 2 <A F>, coefficient of F*
    ComplexMatrix traceless; // remainder with all four block traces zero
};

// A = <A> I + <A E_-> E_- + 2<A F*> F + 2<A F> F* + traceless
inline BlockDecomposition block_decompose(const ComplexMatrix& A) {
    if (A.rows() != A.cols() || A.rows() % 2 != 0)
        throw std::invalid_argument("block_decompose: even square matrix required");
    const int n = static_cast<int>(A.rows()) / 2;
    auto btr = [&](int i, int j) {
        return A.block(n * i, n * j, n, n).trace() / static_cast<double>(n);
    };
    Complex t11 = btr(0, 0), t12 = btr(0, 1), t21 = btr(1, 0), t22 = btr(1, 1);
    BlockDecomposition d;
    d.c_id = (t11 + t22) / 2.0;
    d.c_eminus = (t11 - t22) / 2.0;
    d.c_f = t21;     // 2<A F*> = t21, coefficient of F
    d.c_fstar = t12; // 2<A F> = t12, coefficient of F*
    ComplexMatrix rec = embed(d.c_id * basis::I() + d.c_eminus * basis::Eminus() +
                                  d.c_f * basis::F() + d.c_fstar * basis::Fstar(),
                              n);
    d.traceless = A - rec;
    return d;
}

} // namespace girko
