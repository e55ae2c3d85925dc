// Acceptance suite: every release-blocking check in one binary. Each
// criterion prints a single pass/fail line with its pinned tolerance; the
// exit code is 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <vector>

#include "girko/charflow.hpp"
#include "girko/girko.hpp"
#include "girko/harness.hpp"
#include "girko/resolvent.hpp"
#include "girko/stats.hpp"

using namespace girko;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_t0;

void start() { g_t0 = std::chrono::steady_clock::now(); }

void report(int idx, const char* name, bool pass, const std::string& detail) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - g_t0)
                      .count();
    std::printf("[%s] %2d %-28s %s (%.1fs)\n", pass ? "PASS" : "FAIL", idx, name,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
void dyson_residual_suite() {
    start();
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < 40 && ok; ++i) {
        double za = 0.95 * i / 39.0;
        for (int j = 0; j < 40; ++j) {
            double eta = std::pow(10.0, -4.0 + 6.0 * j / 39.0);
            ScalarMSolution s = solve_m({Complex(za, 0.0), eta});
            worst = std::max(worst, s.residual);
            if (s.residual > 1e-10 || s.m.imag() <= 0.0) { ok = false; break; }
            ScalarMSolution sr = solve_m({Complex(za, 0.0), -eta});
            if (std::abs(sr.m - std::conj(s.m)) > 1e-10 ||
                std::abs(sr.u - s.u) > 1e-10) { ok = false; break; }
            ScalarMSolution rot = solve_m({za * std::polar(1.0, 1.1), eta});
            if (std::abs(rot.m - s.m) > 1e-10) { ok = false; break; }
        }
    }
    report(1, "dyson residual suite", ok, "max residual " + fmt(worst) + " <= 1e-10");
}

// ---------------------------------------------------------------- criterion 2
void expansion_check() {
    start();
    bool ok = true;
    double worst = 0.0;
    // m(i eta) = i (b0 + c1 eta + c2 eta^2 + O(eta^3)) with
    //   b0 = sqrt(1-r), c1 = (2r-1)/(2(1-r)), c2 = (1-4r)/(8(1-r)^{5/2}), r = |z|^2;
    // note c2 vanishes at r = 1/4, so the remainder is gated at the eta^3 level
    for (double za : {0.0, 0.5, 0.8}) {
        const double r = za * za;
        const double b0 = std::sqrt(1.0 - r);
        const double c1 = (2.0 * r - 1.0) / (2.0 * (1.0 - r));
        const double c2 = (1.0 - 4.0 * r) / (8.0 * std::pow(1.0 - r, 2.5));
        for (double eta = 1e-2; eta >= 1e-4; eta /= 2.0) {
            Complex m = solve_m({Complex(za, 0.0), eta}).m;
            double rem =
                std::abs(m - Complex(0.0, b0 + c1 * eta + c2 * eta * eta)) /
                (eta * eta * eta);
            worst = std::max(worst, rem);
            if (rem > 20.0) ok = false;
        }
    }
    report(2, "small-eta expansion", ok,
           "second-order remainder " + fmt(worst) + " * eta^3, constant <= 20");
}

// ---------------------------------------------------------------- criterion 3
ComplexMatrix s_full(const ComplexMatrix& R) {
    const int n = static_cast<int>(R.rows()) / 2;
    Complex t11 = R.topLeftCorner(n, n).trace() / static_cast<double>(n);
    Complex t22 = R.bottomRightCorner(n, n).trace() / static_cast<double>(n);
    return embed(bc(t22, 0, 0, t11), n);
}

void stability_suite() {
    start();
    bool ok = true;
    std::string why;
    CounterRng rng({2024, 0});
    std::uint64_t c = 0;
    // eigen-residuals, closed-form denominator, brute-force inversion
    for (int trial = 0; trial < 10 && ok; ++trial) {
        Complex z1(0.7 * (rng.uniform(c++) - 0.5), 0.7 * (rng.uniform(c++) - 0.5));
        Complex z2 = z1 + Complex(0.1 * (rng.uniform(c++) - 0.5),
                                  0.1 * (rng.uniform(c++) - 0.5));
        double e1 = std::pow(10.0, -4.0 + 3.0 * rng.uniform(c++));
        double e2 = std::pow(10.0, -4.0 + 3.0 * rng.uniform(c++)) *
                    (rng.uniform(c++) < 0.5 ? -1.0 : 1.0);
        SpectralPoint p1{z1, e1}, p2{z2, e2};
        StabilityPair pr = eigendecompose(p1, p2);
        if ((apply_B12(pr, pr.Rplus) - pr.betaPlus * pr.Rplus).cwiseAbs().maxCoeff() >
                1e-9 ||
            (apply_B12(pr, pr.Rminus) - pr.betaMinus * pr.Rminus).cwiseAbs().maxCoeff() >
                1e-9) {
            ok = false; why = "eigen-residual > 1e-9";
        }
        ScalarMSolution s1 = solve_m(p1), s2 = solve_m(p2);
        Complex uu = s1.u * s2.u, mm = s1.m * s2.m;
        Complex den = 1.0 + std::norm(z1) * std::norm(z2) * uu * uu - mm * mm -
                      2.0 * uu * (z1 * std::conj(z2)).real();
        if (std::abs(den - pr.betaPlus * pr.betaMinus) > 1e-10) {
            ok = false; why = "denominator != beta+ beta-";
        }
        // 36x36 brute force at n = 3
        BlockConstant A = bc(rng.gaussian(c), rng.gaussian(c + 1), rng.gaussian(c + 2),
                             rng.gaussian(c + 3));
        c += 4;
        const int N = 6, NN = 36;
        ComplexMatrix M1 = embed(pr.M1, 3), M2 = embed(pr.M2, 3);
        Eigen::MatrixXcd op(NN, NN);
        for (int col = 0; col < NN; ++col) {
            ComplexMatrix E = ComplexMatrix::Zero(N, N);
            E(col % N, col / N) = 1.0;
            ComplexMatrix BE = E - M1 * s_full(E) * M2;
            op.col(col) = Eigen::Map<Eigen::VectorXcd>(BE.data(), NN);
        }
        ComplexMatrix K = M1 * embed(A, 3) * M2;
        Eigen::VectorXcd rhs = Eigen::Map<Eigen::VectorXcd>(K.data(), NN);
        Eigen::VectorXcd x = op.partialPivLu().solve(rhs);
        ComplexMatrix brute = Eigen::Map<ComplexMatrix>(x.data(), N, N);
        ComplexMatrix spec = embed(m12(pr, A), 3);
        if ((brute - spec).cwiseAbs().maxCoeff() >
            1e-7 * std::max(1e-30, spec.cwiseAbs().maxCoeff())) {
            ok = false; why = "36x36 brute force mismatch > 1e-7";
        }
    }
    // <L-R-> -> 1 at coinciding bulk parameters
    {
        StabilityPair pr = eigendecompose({Complex(0.5, 0.0), 1e-4},
                                          {Complex(0.5, 0.0), 1e-4});
        if (std::abs(ntrace_prod(pr.Lminus, pr.Rminus) - 1.0) > 1e-3) {
            ok = false; why = "<L-R-> not within 1e-3 of 1";
        }
    }
    // beta- bracket over the sweep
    double rmax = 0.0, rmin = 1e300;
    for (double dz : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1})
        for (double eta : {1e-4, 1e-3, 1e-2}) {
            StabilityPair pr = eigendecompose({Complex(0.5, 0.0), eta},
                                              {Complex(0.5, dz), eta});
            double r = std::abs(pr.betaMinus) / (dz * dz + 2.0 * eta);
            rmax = std::max(rmax, r);
            rmin = std::min(rmin, r);
        }
    if (rmax > 20.0 || rmin < 0.05) { ok = false; why = "beta- outside [1/20, 20]"; }
    report(3, "stability identities", ok,
           ok ? "residuals, closed forms, 36x36, beta- in [" + fmt(rmin) + "," +
                    fmt(rmax) + "]"
              : why);
}

// ---------------------------------------------------------------- criterion 4
void flow_suite() {
    start();
    bool ok = true;
    std::string why;
    // RK4 vs closed form
    {
        FlowState s0 = make_flow_state({Complex(0.4, 0.0), 0.2}, {Complex(0.4, 0.0), 0.2});
        FlowState ex = flow_closed_form(s0, 0.05);
        FlowState rk = integrate_flow(s0, 0.05, 1e-3);
        double err = std::abs(rk.c1.p.z - ex.c1.p.z) + std::abs(rk.c1.p.eta - ex.c1.p.eta);
        if (err > 1e-8) { ok = false; why = "RK4 vs closed form " + fmt(err); }
    }
    // 20 trajectories: propagated m solves the Dyson equation
    CounterRng rng({2025, 0});
    std::uint64_t c = 0;
    for (int k = 0; k < 20 && ok; ++k) {
        Complex z(0.8 * (rng.uniform(c++) - 0.5), 0.8 * (rng.uniform(c++) - 0.5));
        double eta = 0.01 + 0.2 * rng.uniform(c++);
        SpectralPoint p{z, eta};
        FlowState s0 = make_flow_state(p, p);
        double T = max_time(p);
        for (double frac : {0.3, 0.6, 0.9}) {
            FlowState s = flow_closed_form(s0, frac * T);
            Complex re = solve_m(s.c1.p).m;
            if (std::abs(re - s.c1.m) > 1e-9) {
                ok = false; why = "m conservation residual " + fmt(std::abs(re - s.c1.m));
            }
        }
    }
    // Mdot = M/2 and the m12 derivative identity by finite differences
    if (ok) {
        FlowState s0 = make_flow_state({Complex(0.3, 0.0), 0.1},
                                       {Complex(0.3, 0.0), -0.1});
        const double h = 1e-5, t = 0.02;
        auto M_at = [&](double tt) {
            FlowState s = flow_closed_form(s0, tt);
            return build_M(s.c1.p);
        };
        BlockConstant lhs = (M_at(t + h) - M_at(t - h)) / (2.0 * h);
        BlockConstant rhs = 0.5 * M_at(t);
        if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-5 * rhs.cwiseAbs().maxCoeff()) {
            ok = false; why = "Mdot != M/2";
        }
        for (auto [A, B] : {std::pair{basis::I(), basis::I()},
                            std::pair{basis::F(), basis::Fstar()}}) {
            FlowDerivativeCheck chk = m12_flow_derivative(s0, t, A, B);
            if (std::abs(chk.lhs - chk.rhs) > 1e-5 * std::max(1.0, std::abs(chk.rhs))) {
                ok = false; why = "m12 flow derivative identity";
            }
        }
    }
    // backward_shoot round trips
    for (auto [z, eta, T] : {std::tuple{Complex(0.0, 0.0), 1e-3, 0.05},
                             std::tuple{Complex(0.4, 0.1), 5e-3, 0.1}}) {
        SpectralPoint p0 = backward_shoot({z, eta}, T);
        FlowState landed = flow_closed_form(make_flow_state(p0, p0), T);
        if (std::abs(landed.c1.p.eta - eta) > 1e-10 ||
            std::abs(landed.c1.p.z - z) > 1e-10) {
            ok = false; why = "backward_shoot round trip";
        }
    }
    report(4, "flow conservation", ok, ok ? "closed form, RK4, identities" : why);
}

// ---------------------------------------------------------------- criterion 5
void girko_identity() {
    start();
    const int n = 32;
    ComplexMatrix X = sample_iid({EnsembleKind::ComplexGinibre, n}, {7, 0});
    double direct = linear_statistic(
        X, make_test_function(Profile::MollifierBump, 0.0, 0.0, n, 128, 0.5));
    auto rel = [&](int res) {
        TestFunction tf = make_test_function(Profile::MollifierBump, 0.0, 0.0, n, res, 0.5);
        GirkoResult g = girko_rhs(X, tf, 100.0);
        return std::abs(g.value - direct) / std::abs(direct);
    };
    double r128 = rel(128), r256 = rel(256);
    bool ok = r128 <= 0.03 && r256 <= 0.5 * r128;
    report(5, "girko exact identity", ok,
           "rel err " + fmt(r128) + " @128 (<=3%), " + fmt(r256) + " @256 (halved)");
}

// ---------------------------------------------------------------- criterion 6
void resolvent_invariants() {
    start();
    bool ok = true;
    std::string why;
    CounterRng rng({2026, 0});
    std::uint64_t c = 0;
    for (int k = 0; k < 20 && ok; ++k) {
        int n = 16 + static_cast<int>(rng.uniform(c++) * 112);
        Complex z(0.8 * (rng.uniform(c++) - 0.5), 0.8 * (rng.uniform(c++) - 0.5));
        double eta = std::pow(10.0, -2.0 + 2.0 * rng.uniform(c++)) *
                     (rng.uniform(c++) < 0.5 ? -1.0 : 1.0);
        EnsembleKind kind = k % 3 == 0   ? EnsembleKind::BernoulliPhase
                            : k % 3 == 1 ? EnsembleKind::UniformDisk
                                         : EnsembleKind::ComplexGinibre;
        ComplexMatrix X = sample_iid({kind, n}, {2026, static_cast<std::uint64_t>(k)});
        ComplexMatrix H = hermitize(X, z);
        ComplexMatrix G = resolve(H, eta);
        ComplexMatrix ImG = (G - G.adjoint()) / Complex(0, 2);
        double ward = (G * G.adjoint() - ImG / eta).cwiseAbs().maxCoeff() /
                      (ImG / eta).cwiseAbs().maxCoeff();
        if (ward > 1e-8) { ok = false; why = "ward residual " + fmt(ward); }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H, Eigen::EigenvaluesOnly);
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        for (int i = 0; i < n; ++i) {
            double d = std::abs(es.eigenvalues()(i) + es.eigenvalues()(2 * n - 1 - i));
            if (d > 1e-8 * scale) { ok = false; why = "spectral symmetry " + fmt(d); }
        }
    }
    report(6, "ward + spectral symmetry", ok, ok ? "20 instances, tol 1e-8" : why);
}

// ---------------------------------------------------------------- criterion 7
void covariance_closed_form() {
    start();
    bool ok = true;
    double worst = 0.0;
    const std::vector<std::pair<Complex, Complex>> pairs = {
        {Complex(0.3, 0.0), Complex(0.3, 0.02)},
        {Complex(0.3, 0.0), Complex(0.35, 0.05)},
        {Complex(0.0, 0.0), Complex(0.1, 0.0)},
        {Complex(0.5, 0.2), Complex(0.45, 0.0)},
        {Complex(0.2, -0.3), Complex(0.25, 0.0)},
    };
    for (double k4 : {0.0, -1.0}) {
        for (auto& [zi, zj] : pairs) {
            CovarianceIntegral ci = covariance_integral(zi, zj, k4);
            worst = std::max(worst, std::abs(ci.quadrature - ci.closed_form));
        }
    }
    ok = worst <= 1e-4;
    report(7, "covariance closed form", ok, "max |quad - closed| " + fmt(worst) + " <= 1e-4");
}

// ------------------------------------------------------- criteria 8 and 9
void clt_and_expectation() {
    start();
    const int n = 256, seeds = 500, res = 128;
    // scale exponent kept mild: at n = 256 the a = 0.25 window is only ~2x the
    // n^{-1/2} eigenvalue scale and the variance is visibly suppressed (~30%);
    // a = 0.1 separates the scales enough for the 6-SE gates at 500 seeds
    const double a = 0.1;
    TestFunction tf = make_test_function(Profile::MollifierBump, 0.0, a, n, res, 0.5);
    CLTPrediction pred = clt_prediction(tf, 0.0, n);

    auto run = [&](EnsembleKind kind, std::uint64_t sv) {
        std::vector<Complex> L(seeds);
        for (int s = 0; s < seeds; ++s) {
            ComplexMatrix X = sample_iid({kind, n}, {sv, static_cast<std::uint64_t>(s)});
            L[s] = linear_statistic(X, tf);
        }
        return summarize(L);
    };
    Moments g = run(EnsembleKind::ComplexGinibre, 501);
    Moments bp = run(EnsembleKind::BernoulliPhase, 502);

    double z_var = std::abs(g.variance - pred.variance) / g.se_variance;
    double z_kurt = std::abs(g.kurtosis_re) / g.se_kurtosis;
    double z_pseudo = std::abs(g.pseudo_variance - pred.pseudo_variance) / g.se_variance;
    double z_cross = std::abs(g.variance - bp.variance) /
                     std::hypot(g.se_variance, bp.se_variance);
    bool ok8 = z_var <= 6.0 && z_kurt <= 6.0 && z_pseudo <= 6.0 && z_cross <= 6.0;
    report(8, "mesoscopic CLT (reduced)", ok8,
           "z: var " + fmt(z_var) + ", kurt " + fmt(z_kurt) + ", pseudo " +
               fmt(z_pseudo) + ", kappa4-indep " + fmt(z_cross) + " (<= 6 SE)");

    start();
    double z_mean = std::abs(g.mean - pred.mean) / g.se_mean;
    report(9, "expectation of L_n", z_mean <= 4.0,
           "z " + fmt(z_mean) + " <= 4 SE (pred " + fmt(pred.mean.real()) + ")");
}

// ---------------------------------------------------------------- criterion 10
void two_resolvent_scaling() {
    start();
    bool ok = true;
    std::string detail;
    for (int n : {128, 256, 512}) {
        const double eta = 1.0 / std::sqrt(static_cast<double>(n));
        std::vector<double> err_small, err_large;
        double q90_small = 0, q90_large = 0, bound_small = 0, bound_large = 0;
        for (int s = 0; s < 50; ++s) {
            ComplexMatrix X = sample_iid({EnsembleKind::ComplexGinibre, n},
                                         {601, static_cast<std::uint64_t>(s)});
            SpectralPoint p1{Complex(0.5, 0.0), eta};
            // the far offset must clearly exceed eta (~0.09 at n=128) or the
            // separation gain drowns in Monte Carlo noise
            for (double dz : {0.01, 0.3}) {
                SpectralPoint p2{Complex(0.5, dz), eta};
                TwoResolventError e =
                    two_resolvent_error(X, p1, p2, basis::I(), basis::I());
                (dz < 0.05 ? err_small : err_large).push_back(e.error);
                (dz < 0.05 ? bound_small : bound_large) = e.predicted_bound;
            }
        }
        q90_small = quantile(err_small, 0.9);
        q90_large = quantile(err_large, 0.9);
        bool mono = median(err_large) < median(err_small);
        bool q_ok = q90_small <= 10.0 * bound_small && q90_large <= 10.0 * bound_large;
        if (!mono || !q_ok) ok = false;
        detail += "n=" + std::to_string(n) + " med " + fmt(median(err_large)) + "<" +
                  fmt(median(err_small)) + " ";
    }
    report(10, "two-resolvent scaling", ok, detail + "(medians + q90 <= 10x bound)");
}

// ---------------------------------------------------------------- criterion 11
void overlap_decay() {
    start();
    const int n = 512, seeds = 30, k = 3;
    const Complex z1(0.3, 0.0);
    const double nn = static_cast<double>(n);
    const std::vector<double> dzs = {std::pow(nn, -0.5), std::pow(nn, -0.375),
                                     std::pow(nn, -0.25)};
    std::vector<std::vector<double>> pools(dzs.size());
    for (int s = 0; s < seeds; ++s) {
        ComplexMatrix X = sample_iid({EnsembleKind::ComplexGinibre, n},
                                     {701, static_cast<std::uint64_t>(s)});
        SpectralData s1 = spectral_data(hermitize(X, z1));
        for (std::size_t d = 0; d < dzs.size(); ++d) {
            SpectralData s2 = spectral_data(hermitize(X, z1 + dzs[d]));
            Eigen::MatrixXd O = overlap_matrix(s1, s2, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) pools[d].push_back(O(i, j));
        }
    }
    double m0 = median(pools[0]), m1 = median(pools[1]), m2 = median(pools[2]);
    bool ok = m0 > m1 && m1 > m2;
    report(11, "overlap decay", ok,
           "medians " + fmt(m0) + " > " + fmt(m1) + " > " + fmt(m2));
}

// ---------------------------------------------------------------- criterion 12
void resolvent_clt_pairing() {
    start();
    const int n = 256, seeds = 1000;
    const double eta = 0.1;
    const std::vector<Complex> zs = {Complex(0.3, 0.0), Complex(0.3, 0.1),
                                     Complex(0.45, 0.0), Complex(0.3, -0.1)};
    const int P = static_cast<int>(zs.size());
    // per-seed <G_i> through the squared singular values of X - z_i
    std::vector<std::vector<Complex>> tr(P, std::vector<Complex>(seeds));
    for (int s = 0; s < seeds; ++s) {
        ComplexMatrix X = sample_iid({EnsembleKind::ComplexGinibre, n},
                                     {801, static_cast<std::uint64_t>(s)});
        for (int i = 0; i < P; ++i) {
            ComplexMatrix Y = X - zs[i] * ComplexMatrix::Identity(n, n);
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Y.adjoint() * Y,
                                                            Eigen::EigenvaluesOnly);
            Complex acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += Complex(0.0, eta) / (es.eigenvalues()(j) + eta * eta);
            tr[i][s] = acc / static_cast<double>(n);
        }
    }
    std::vector<std::vector<Complex>> c(P, std::vector<Complex>(seeds));
    for (int i = 0; i < P; ++i) {
        Complex mean = 0.0;
        for (auto& v : tr[i]) mean += v;
        mean /= static_cast<double>(seeds);
        for (int s = 0; s < seeds; ++s) c[i][s] = tr[i][s] - mean;
    }
    auto K = [&](int i, int j) {
        return v_kernel({zs[i], eta}, {zs[j], eta}) / 2.0; // kappa4 = 0 for Ginibre
    };
    const double n2 = static_cast<double>(n) * n;
    // p = 2
    std::vector<double> prod2(seeds);
    for (int s = 0; s < seeds; ++s) prod2[s] = (c[0][s] * c[1][s]).real();
    Moments m2;
    {
        std::vector<Complex> rows(seeds);
        for (int s = 0; s < seeds; ++s) rows[s] = prod2[s];
        m2 = summarize(rows);
    }
    double pred2 = K(0, 1).real() / n2;
    double z2 = std::abs(m2.mean.real() - pred2) / m2.se_mean;
    // p = 4
    std::vector<Complex> prod4(seeds);
    for (int s = 0; s < seeds; ++s) prod4[s] = c[0][s] * c[1][s] * c[2][s] * c[3][s];
    Moments m4 = summarize(prod4);
    double pred4 = (K(0, 1) * K(2, 3) + K(0, 2) * K(1, 3) + K(0, 3) * K(1, 2)).real() /
                   (n2 * n2);
    double z4 = std::abs(m4.mean.real() - pred4) / m4.se_mean;
    bool ok = z2 <= 4.0 && z4 <= 5.0;
    report(12, "resolvent CLT pairing", ok,
           "z(p=2) " + fmt(z2) + " <= 4, z(p=4) " + fmt(z4) + " <= 5");
}

} // namespace

int main() {
    dyson_residual_suite();
    expansion_check();
    stability_suite();
    flow_suite();
    girko_identity();
    resolvent_invariants();
    covariance_closed_form();
    clt_and_expectation();
    two_resolvent_scaling();
    overlap_decay();
    resolvent_clt_pairing();
    if (g_failures == 0) std::printf("all 12 acceptance criteria passed\n");
    else std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
