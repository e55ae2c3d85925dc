#pragma once

// Scalar Dyson equation on the imaginary axis:
//
//     -1/m = w + m - |z|^2/(w+m),   w = i*eta,   Im(m) Im(w) > 0,
//
// together with u = m/(w+m), the block-constant deterministic resolvent
// approximation M = (m, -z u; -conj(z) u, m), and the analytic
// eta-derivatives needed by the covariance kernels.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

#include "girko/block.hpp"

namespace girko {

struct SpectralPoint {
    Complex z;
    double eta = 0.0; // nonzero; sign selects the half-plane
};

struct ScalarMSolution {
    Complex m;
    Complex u;
    double residual = 0.0;
};

class DysonError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double mde_residual(Complex m, Complex w, double zabs2) {
    return std::abs(1.0 / m + w + m - zabs2 / (w + m));
}

} // namespace detail

// Clearing denominators turns the Dyson equation into the cubic
//   m^3 + 2w m^2 + (w^2 - |z|^2 + 1) m + w = 0.
// All roots are found by a companion-matrix eigensolve, the side-condition
// root is selected, and a few Newton steps polish it.
inline ScalarMSolution solve_m(const SpectralPoint& p) {
    if (p.eta == 0.0)
        throw DysonError("solve_m: eta must be nonzero");
    const Complex w(0.0, p.eta);
    const double zabs2 = std::norm(p.z);

    Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(0, 2) = -w;
    companion(1, 2) = -(w * w - zabs2 + 1.0);
    companion(2, 2) = -2.0 * w;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(companion, false);

    std::optional<Complex> best;
    double best_res = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        Complex m = es.eigenvalues()(k);
        // Newton polishing on f(m) = m(w+m)^2 + (1-|z|^2)m + w... use the
        // cleared cubic to avoid poles
        for (int it = 0; it < 8; ++it) {
            Complex f = m * m * m + 2.0 * w * m * m + (w * w - zabs2 + 1.0) * m + w;
            Complex df = 3.0 * m * m + 4.0 * w * m + (w * w - zabs2 + 1.0);
            if (std::abs(df) < 1e-300) break;
            Complex step = f / df;
            m -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(m))) break;
        }
        if (m.imag() * p.eta <= 0.0) continue;
        double res = detail::mde_residual(m, w, zabs2);
        if (res < best_res) {
            best = m;
            best_res = res;
        }
    }
    // the residual terms grow like |w|, so the accept gate is scale-aware;
    // on |eta| <= 1e2 it coincides with the absolute 1e-10 tolerance
    const double gate = 1e-10 * std::max(1.0, 1e-2 * std::abs(w));
    if (!best || best_res > gate)
        throw DysonError("solve_m: no side-condition root within tolerance at z=(" +
                         std::to_string(p.z.real()) + "," + std::to_string(p.z.imag()) +
                         "), eta=" + std::to_string(p.eta) +
                         ", best residual=" + std::to_string(best_res));
    ScalarMSolution sol;
    sol.m = *best;
    sol.u = sol.m / (w + sol.m);
    sol.residual = best_res;
    return sol;
}

inline BlockConstant build_M(const SpectralPoint& p) {
    ScalarMSolution s = solve_m(p);
    return bc(s.m, -p.z * s.u, -std::conj(p.z) * s.u, s.m);
}

inline BlockConstant build_M(const SpectralPoint& p, const ScalarMSolution& s) {
    return bc(s.m, -p.z * s.u, -std::conj(p.z) * s.u, s.m);
}

// dm/deta by implicit differentiation of f(m,w) = 1/m + w + m - |z|^2/(w+m):
//   dm/dw = -f_w/f_m,  dm/deta = i dm/dw
inline Complex dm_deta(const SpectralPoint& p) {
    ScalarMSolution s = solve_m(p);
    const Complex w(0.0, p.eta);
    const double zabs2 = std::norm(p.z);
    const Complex q = w + s.m;
    Complex f_m = -1.0 / (s.m * s.m) + 1.0 + zabs2 / (q * q);
    Complex f_w = 1.0 + zabs2 / (q * q);
    if (std::abs(f_m) < 1e-12)
        throw DysonError("dm_deta: near-singular Dyson Jacobian");
    return Complex(0.0, 1.0) * (-f_w / f_m);
}

// du/deta with u = m/(w+m): u' = (m' w - i m)/(w+m)^2
inline Complex du_deta(const SpectralPoint& p) {
    ScalarMSolution s = solve_m(p);
    const Complex w(0.0, p.eta);
    Complex mp = dm_deta(p);
    Complex q = w + s.m;
    return (mp * w - Complex(0.0, 1.0) * s.m) / (q * q);
}

// <E G> to order 1/n:  <M> - i kappa4/(4n) d/deta (m^4)
inline Complex expected_trace_correction(const SpectralPoint& p, int n,
                                         double kappa4) {
    ScalarMSolution s = solve_m(p);
    if (kappa4 == 0.0) return s.m;
    Complex mp = dm_deta(p);
    Complex d_m4 = 4.0 * s.m * s.m * s.m * mp;
    return s.m - Complex(0.0, kappa4 / (4.0 * n)) * d_m4;
}

} // namespace girko
