#pragma once

// Numerical resolvents G = (H - i eta)^{-1} of sampled Hermitizations,
// spectral data organized by the +/- symmetry, local-law error measurements,
// and singular-vector overlap matrices.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "girko/block.hpp"
#include "girko/ensembles.hpp"
#include "girko/stability.hpp"

namespace girko {

// dense LU solve; (H - i eta) is non-Hermitian complex but always invertible
// for real spectrum and eta != 0
inline ComplexMatrix resolve(const ComplexMatrix& H, double eta) {
    if (eta == 0.0)
        throw std::invalid_argument("resolve: eta must be nonzero");
    const int N = static_cast<int>(H.rows());
    ComplexMatrix shifted = H - Complex(0.0, eta) * ComplexMatrix::Identity(N, N);
    Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    return lu.solve(ComplexMatrix::Identity(N, N));
}

struct SpectralData {
    Eigen::VectorXd lambdas; // sorted ascending, length 2n
    ComplexMatrix U;         // n x n, u-halves of the positive-lambda eigenvectors
    ComplexMatrix V;         // n x n, v-halves; ||u_i||^2 = ||v_i||^2 = 1/2
    Eigen::VectorXd positive; // ascending positive eigenvalues, length n
};

// full Hermitian eigendecomposition; columns i of U/V belong to the i-th
// smallest positive eigenvalue
inline SpectralData spectral_data(const ComplexMatrix& H, double sym_tol = 1e-8) {
    const int N = static_cast<int>(H.rows());
    if (N % 2 != 0)
        throw std::invalid_argument("spectral_data: even dimension required");
    const int n = N / 2;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_data: eigensolver failed");
    SpectralData sd;
    sd.lambdas = es.eigenvalues(); // ascending
    const double scale = std::max(1.0, sd.lambdas.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
        if (std::abs(sd.lambdas(k) + sd.lambdas(N - 1 - k)) > sym_tol * scale)
            throw std::runtime_error("spectral_data: +/- spectral symmetry violated");
    }
    sd.positive.resize(n);
    sd.U.resize(n, n);
    sd.V.resize(n, n);
    for (int i = 0; i < n; ++i) {
        sd.positive(i) = sd.lambdas(n + i);
        sd.U.col(i) = es.eigenvectors().col(n + i).head(n);
        sd.V.col(i) = es.eigenvectors().col(n + i).tail(n);
    }
    return sd;
}

struct SingleLawError {
    double error;      // |<A (G - M)>|
    double normalized; // n |eta| * error
};

inline SingleLawError single_law_error(const ComplexMatrix& X, const SpectralPoint& p,
                                       const BlockConstant& A) {
    const int n = static_cast<int>(X.rows());
    ComplexMatrix H = hermitize(X, p.z);
    ComplexMatrix G = resolve(H, p.eta);
    BlockConstant M = build_M(p);
    // <A(G - M)> with block-constant A: tr(A_embed (G - M_embed)) / 2n
    ComplexMatrix D = G - embed(M, n);
    Complex acc = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            acc += A(i, j) * D.block(n * j, n * i, n, n).trace();
    double err = std::abs(acc / static_cast<double>(2 * n));
    return {err, n * std::abs(p.eta) * err};
}

struct TwoResolventError {
    double error;           // |<(G1 A G2 - M12^A) B>|
    double predicted_bound; // rhs of the two-resolvent local law with n^xi = 1
};

inline double two_resolvent_bound(int n, double eta1, double eta2, Complex z1,
                                  Complex z2) {
    const double lo = std::min(std::abs(eta1), std::abs(eta2));
    const double hi = std::max(std::abs(eta1), std::abs(eta2));
    const double dz2 = std::norm(z1 - z2);
    const double pref = 1.0 / (n * std::pow(lo, 1.5) * std::sqrt(hi));
    return pref * (std::pow(lo, 1.0 / 6.0) + std::pow(n, -0.1) +
                   1.0 / std::sqrt(n * lo) + std::pow(hi / (hi + dz2), 0.25));
}

inline TwoResolventError two_resolvent_error(const ComplexMatrix& X,
                                             const SpectralPoint& p1,
                                             const SpectralPoint& p2,
                                             const BlockConstant& A,
                                             const BlockConstant& B) {
    const int n = static_cast<int>(X.rows());
    ComplexMatrix G1 = resolve(hermitize(X, p1.z), p1.eta);
    ComplexMatrix G2 = resolve(hermitize(X, p2.z), p2.eta);
    StabilityPair pair = eigendecompose(p1, p2);
    BlockConstant M12A = m12(pair, A);
    // <G1 A G2 B> without forming the triple product: sum_ij (G1A)_ij (G2B)_ji
    ComplexMatrix G1A = G1 * embed(A, n);
    ComplexMatrix G2B = G2 * embed(B, n);
    Complex t = (G1A.transpose().cwiseProduct(G2B)).sum() / static_cast<double>(2 * n);
    Complex det = ntrace_prod(M12A, B);
    TwoResolventError out;
    out.error = std::abs(t - det);
    out.predicted_bound = two_resolvent_bound(n, p1.eta, p2.eta, p1.z, p2.z);
    return out;
}

// entry (i,j) = |<u_i^{z1}, u_j^{z2}>| + |<v_i^{z1}, v_j^{z2}>| over the k
// lowest positive-lambda indices; perfect overlap = 1 with the 1/2-norm halves
inline Eigen::MatrixXd overlap_matrix(const SpectralData& s1, const SpectralData& s2,
                                      int k) {
    const int n = static_cast<int>(s1.U.rows());
    if (k > n) throw std::invalid_argument("overlap_matrix: k > n");
    Eigen::MatrixXd O(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            O(i, j) = std::abs(s1.U.col(i).dot(s2.U.col(j))) +
                      std::abs(s1.V.col(i).dot(s2.V.col(j)));
    return O;
}

inline Eigen::MatrixXd overlap_matrix(const ComplexMatrix& X, Complex z1, Complex z2,
                                      int k) {
    return overlap_matrix(spectral_data(hermitize(X, z1)),
                          spectral_data(hermitize(X, z2)), k);
}

} // namespace girko
