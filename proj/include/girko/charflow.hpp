#pragma once

// Characteristic flow for the generalized spectral parameter
// Lambda = i eta I + z F* + conj(z) F:
//
//     d Lambda / dt = -Lambda/2 - S[M(Lambda)]
//
// componentwise d z/dt = -z/2, d eta/dt = -Im m - eta/2. Along the flow
// m_t = e^{t/2} m_0, u_t = e^t u_0, with the closed-form eta trajectory
// eta_t = e^{-t/2} eta_0 - (e^{t/2} - e^{-t/2}) Im m_0.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "girko/mde.hpp"
#include "girko/stability.hpp"

namespace girko {

struct FlowPoint {
    SpectralPoint p;
    Complex m, u;
};

struct FlowState {
    FlowPoint c1, c2;
    double t = 0.0;
};

inline FlowPoint make_flow_point(const SpectralPoint& p) {
    ScalarMSolution s = solve_m(p);
    return {p, s.m, s.u};
}

inline FlowState make_flow_state(const SpectralPoint& p1, const SpectralPoint& p2) {
    return {make_flow_point(p1), make_flow_point(p2), 0.0};
}

// root in t of eta_t = 0 for one characteristic; monotone bisection
inline double max_time(const SpectralPoint& p) {
    FlowPoint fp = make_flow_point(p);
    const double eta0 = p.eta, im0 = fp.m.imag();
    auto eta_t = [&](double t) {
        return std::exp(-t / 2.0) * eta0 - (std::exp(t / 2.0) - std::exp(-t / 2.0)) * im0;
    };
    double lo = 0.0, hi = 1.0;
    while (eta_t(hi) * eta0 > 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("max_time: no sign crossing found");
    }
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (eta_t(mid) * eta0 > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

inline FlowPoint evolve_point(const FlowPoint& fp0, double t, double dyson_tol) {
    const double ep = std::exp(t / 2.0), em = std::exp(-t / 2.0);
    SpectralPoint pt;
    pt.z = em * fp0.p.z;
    pt.eta = em * fp0.p.eta - (ep - em) * fp0.m.imag();
    if (pt.eta * fp0.p.eta <= 0.0)
        throw std::runtime_error("flow: eta sign crossing (t >= T*)");
    FlowPoint out;
    out.p = pt;
    out.m = ep * fp0.m;
    out.u = ep * ep * fp0.u;
    // the propagated m must solve the Dyson equation at the new point
    const Complex w(0.0, pt.eta);
    double res = detail::mde_residual(out.m, w, std::norm(pt.z));
    if (res > dyson_tol)
        throw std::runtime_error("flow: propagated m violates Dyson equation, residual=" +
                                 std::to_string(res));
    return out;
}

} // namespace detail

inline FlowState flow_closed_form(const FlowState& s0, double t,
                                  double dyson_tol = 1e-9) {
    if (t == 0.0) return s0;
    FlowState out;
    out.c1 = detail::evolve_point(s0.c1, t, dyson_tol);
    out.c2 = detail::evolve_point(s0.c2, t, dyson_tol);
    out.t = s0.t + t;
    return out;
}

// classical RK4 on (z, eta) per characteristic; validates the ODE itself
// against the closed form
inline FlowState integrate_flow(const FlowState& s0, double t, double dt) {
    if (dt <= 0.0 || dt > t)
        throw std::invalid_argument("integrate_flow: need 0 < dt <= t");
    auto rhs = [](const SpectralPoint& p) {
        ScalarMSolution s = solve_m(p);
        return std::pair<Complex, double>{-p.z / 2.0, -s.m.imag() - p.eta / 2.0};
    };
    auto step = [&](SpectralPoint p, double h) {
        auto [kz1, ke1] = rhs(p);
        auto [kz2, ke2] = rhs({p.z + 0.5 * h * kz1, p.eta + 0.5 * h * ke1});
        auto [kz3, ke3] = rhs({p.z + 0.5 * h * kz2, p.eta + 0.5 * h * ke2});
        auto [kz4, ke4] = rhs({p.z + h * kz3, p.eta + h * ke3});
        p.z += h / 6.0 * (kz1 + 2.0 * kz2 + 2.0 * kz3 + kz4);
        p.eta += h / 6.0 * (ke1 + 2.0 * ke2 + 2.0 * ke3 + ke4);
        return p;
    };
    SpectralPoint p1 = s0.c1.p, p2 = s0.c2.p;
    double elapsed = 0.0;
    while (elapsed < t - 1e-15) {
        double h = std::min(dt, t - elapsed);
        SpectralPoint q1 = step(p1, h), q2 = step(p2, h);
        if (q1.eta * p1.eta <= 0.0 || q2.eta * p2.eta <= 0.0)
            throw std::runtime_error("integrate_flow: eta sign crossing mid-trajectory");
        p1 = q1;
        p2 = q2;
        elapsed += h;
    }
    FlowState out;
    out.c1 = make_flow_point(p1);
    out.c2 = make_flow_point(p2);
    out.t = s0.t + t;
    return out;
}

// initial point flowing to `target` after time T; z0 is explicit, eta0 by
// secant iteration on the closed form
inline SpectralPoint backward_shoot(const SpectralPoint& target, double T) {
    if (T == 0.0) return target;
    const double ep = std::exp(T / 2.0), em = std::exp(-T / 2.0);
    const Complex z0 = ep * target.z;
    auto land = [&](double eta0) {
        FlowPoint fp = make_flow_point({z0, eta0});
        return em * eta0 - (ep - em) * fp.m.imag() - target.eta;
    };
    // linearized speed sqrt(1-|z0|^2) gives the starting guesses
    const double sgn = target.eta > 0.0 ? 1.0 : -1.0;
    const double speed = std::sqrt(std::max(0.05, 1.0 - std::norm(z0)));
    double x0 = target.eta + sgn * speed * T;
    double x1 = x0 * 1.05 + sgn * 1e-4;
    double f0 = land(x0), f1 = land(x1);
    for (int it = 0; it < 80 && std::abs(f1) > 1e-14; ++it) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (x2 * sgn <= 0.0) x2 = 0.5 * (x1 + std::abs(target.eta) * sgn);
        x0 = x1; f0 = f1;
        x1 = x2; f1 = land(x1);
    }
    if (std::abs(f1) > 1e-12)
        throw std::runtime_error("backward_shoot: root-finder failed to converge");
    return {z0, x1};
}

// lhs: central finite difference of <M12,t^A B> along the flow (step h);
// rhs: <M12,t^A B> + <S[M12,t^A] M21,t^B>
struct FlowDerivativeCheck {
    Complex lhs, rhs;
};

inline FlowDerivativeCheck m12_flow_derivative(const FlowState& s0, double t,
                                               const BlockConstant& A,
                                               const BlockConstant& B,
                                               double h = 1e-5) {
    auto pair_at = [&](double tt) {
        FlowState s = flow_closed_form(s0, tt);
        return eigendecompose(s.c1.p, s.c2.p);
    };
    auto trace_ab = [&](const StabilityPair& pr) {
        return ntrace_prod(m12(pr, A), B);
    };
    StabilityPair pr = pair_at(t);
    StabilityPair pr_p = pair_at(t + h), pr_m = pair_at(t - h);

    FlowDerivativeCheck out;
    out.lhs = (trace_ab(pr_p) - trace_ab(pr_m)) / (2.0 * h);
    // M21^B uses the swapped pair (p2, p1)
    StabilityPair pr21 = eigendecompose(pr.p2, pr.p1);
    BlockConstant M12A = m12(pr, A);
    BlockConstant M21B = m12(pr21, B);
    out.rhs = ntrace_prod(M12A, B) + ntrace_prod(s_op(M12A), M21B);
    return out;
}

// coefficients of the |<M12,t^I>| <= a0/(b0 - a0 t) envelope
struct M12BoundCoeffs {
    double a0, b0;
};

inline M12BoundCoeffs m12_bound_coeffs(const FlowState& s0) {
    const double z1s = std::norm(s0.c1.p.z), z2s = std::norm(s0.c2.p.z);
    M12BoundCoeffs c;
    c.a0 = 2.0 - z1s - z2s;
    c.b0 = std::norm(s0.c1.p.z - s0.c2.p.z) +
           std::abs(s0.c1.p.eta) * std::sqrt(1.0 - z1s) +
           std::abs(s0.c2.p.eta) * std::sqrt(1.0 - z2s);
    return c;
}

} // namespace girko
