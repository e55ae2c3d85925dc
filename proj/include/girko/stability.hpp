#pragma once

// Stability operator B12 = 1 - M1 S[.] M2 on the 2x2 block-constant algebra,
// its explicit eigendecomposition (eigenvalues 1, 1, beta+, beta- with right
// eigenvectors F, F*, R+, R- and left eigenvectors L+, L-), the spectral
// projection onto the unstable direction, and the deterministic two-resolvent
// approximation M12^A = B12^{-1}[M1 A M2].

#include <cmath>
#include <stdexcept>

#include "girko/block.hpp"
#include "girko/mde.hpp"

namespace girko {

// S[R] = diag(<R22>, <R11>) = <R> - <R E_-> E_-
inline BlockConstant s_op(const BlockConstant& R) {
    return bc(R(1, 1), 0, 0, R(0, 0));
}

struct StabilityPair {
    SpectralPoint p1, p2;
    Complex m1, u1, m2, u2;
    BlockConstant M1, M2;
    Complex s;                      // m1^2 m2^2 - u1^2 u2^2 (Im z1 conj(z2))^2
    Complex betaPlus, betaMinus;    // 1 +/- sqrt(s) - u1 u2 Re z1 conj(z2)
    BlockConstant Rplus, Rminus;    // right eigenvectors, eq-normalized
    BlockConstant Lplus, Lminus;    // left eigenvectors
};

inline BlockConstant apply_B12(const StabilityPair& pair, const BlockConstant& R) {
    return R - pair.M1 * s_op(R) * pair.M2;
}

inline StabilityPair eigendecompose(const SpectralPoint& p1, const SpectralPoint& p2) {
    StabilityPair pr;
    pr.p1 = p1;
    pr.p2 = p2;
    ScalarMSolution s1 = solve_m(p1), s2 = solve_m(p2);
    pr.m1 = s1.m; pr.u1 = s1.u;
    pr.m2 = s2.m; pr.u2 = s2.u;
    pr.M1 = build_M(p1, s1);
    pr.M2 = build_M(p2, s2);

    const Complex zz = p1.z * std::conj(p2.z);
    const double re = zz.real(), im = zz.imag();
    const Complex uu = pr.u1 * pr.u2;
    pr.s = pr.m1 * pr.m1 * pr.m2 * pr.m2 - uu * uu * (im * im);
    if (pr.s.real() < 0.0 && std::abs(pr.s) < 1e-14)
        throw std::runtime_error("eigendecompose: sqrt branch cut hit with |s| < 1e-14");
    const Complex sq = std::sqrt(pr.s); // principal branch, cut on (-inf, 0)
    pr.betaPlus = 1.0 + sq - uu * re;
    pr.betaMinus = 1.0 - sq - uu * re;

    auto right = [&](double sign) {
        const Complex sg = sign * sq;
        const Complex den = Complex(0, 1) * uu * im - sg;
        const Complex a = -uu * re + sg;
        return bc(a,
                  p1.z * pr.u1 * pr.m2 + p2.z * pr.u2 * pr.m1 * pr.m1 * pr.m2 / den,
                  std::conj(p2.z) * pr.u2 * pr.m1 +
                      std::conj(p1.z) * pr.u1 * pr.m2 * pr.m2 * pr.m1 / den,
                  pr.m1 * pr.m2 / den * a);
    };
    auto left = [&](double sign) {
        const Complex sg = sign * sq;
        return bc((Complex(0, 1) * uu * im - sg) / (pr.m1 * pr.m2), 0, 0, 1.0);
    };
    pr.Rplus = right(+1.0);
    pr.Rminus = right(-1.0);
    pr.Lplus = left(+1.0);
    pr.Lminus = left(-1.0);
    return pr;
}

// B12^{-1} via the eigenbasis: resolve the beta+/- components with the left
// eigenvector functionals <L_pm . >, divide by the eigenvalues, and leave the
// eigenvalue-1 remainder (span{F, F*}) untouched. Falls back to a dense 4x4
// solve when beta+ resonates with 1 and <L+R+> degenerates.
inline BlockConstant m12(const StabilityPair& pair, const BlockConstant& A) {
    if (std::abs(pair.betaMinus) < 1e-13)
        throw std::runtime_error("m12: |beta_-| below threshold (" +
                                 std::to_string(std::abs(pair.betaMinus)) + ")");
    const BlockConstant K = pair.M1 * A * pair.M2;
    const Complex lr_p = ntrace_prod(pair.Lplus, pair.Rplus);
    const Complex lr_m = ntrace_prod(pair.Lminus, pair.Rminus);
    if (std::abs(lr_p) < 1e-3 || std::abs(lr_m) < 1e-3) {
        // vectorized 4x4 linear solve of B12[X] = K
        Eigen::Matrix4cd op;
        for (int k = 0; k < 4; ++k) {
            BlockConstant E = BlockConstant::Zero();
            E(k / 2, k % 2) = 1.0;
            BlockConstant BE = apply_B12(pair, E);
            op(0, k) = BE(0, 0);
            op(1, k) = BE(0, 1);
            op(2, k) = BE(1, 0);
            op(3, k) = BE(1, 1);
        }
        Eigen::Vector4cd rhs(K(0, 0), K(0, 1), K(1, 0), K(1, 1));
        Eigen::Vector4cd x = op.fullPivLu().solve(rhs);
        return bc(x(0), x(1), x(2), x(3));
    }
    const Complex cp = ntrace_prod(pair.Lplus, K) / lr_p;
    const Complex cm = ntrace_prod(pair.Lminus, K) / lr_m;
    BlockConstant rest = K - cp * pair.Rplus - cm * pair.Rminus;
    return rest + (cp / pair.betaPlus) * pair.Rplus +
           (cm / pair.betaMinus) * pair.Rminus;
}

// <M12^I> in closed form
inline Complex trace_m12_I(const SpectralPoint& p1, const SpectralPoint& p2) {
    ScalarMSolution s1 = solve_m(p1), s2 = solve_m(p2);
    const Complex zz = p1.z * std::conj(p2.z);
    const Complex uu = s1.u * s2.u;
    const Complex mm = s1.m * s2.m;
    const Complex den = 1.0 + std::norm(p1.z) * std::norm(p2.z) * uu * uu -
                        mm * mm - 2.0 * uu * zz.real();
    if (std::abs(den) < 1e-13)
        throw std::runtime_error("trace_m12_I: denominator below threshold");
    return (mm + 1.0 - zz.real() * uu) / den - 1.0;
}

// Pi_-[Q] = <R_-^* Q> / <R_-^* L_-^*>  L_-^*
inline BlockConstant project_minus(const StabilityPair& pair, const BlockConstant& Q) {
    const BlockConstant Rm_star = pair.Rminus.adjoint();
    const BlockConstant Lm_star = pair.Lminus.adjoint();
    const Complex denom = ntrace_prod(Rm_star, Lm_star);
    if (std::abs(denom) < 1e-13)
        throw std::runtime_error("project_minus: vanishing pairing");
    return (ntrace_prod(Rm_star, Q) / denom) * Lm_star;
}

} // namespace girko
