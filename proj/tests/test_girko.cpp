#include <doctest.h>

#include "girko/girko.hpp"

using namespace girko;

TEST_CASE("test function: compact support, zero-mean laplacian, refinement") {
    TestFunction tf = make_test_function(Profile::MollifierBump, 0.0, 0.0, 32, 128, 0.5);
    // boundary ring vanishes
    for (int i = 0; i < tf.resolution; ++i) {
        CHECK(tf.f[tf.at(i, 0)] == 0.0);
        CHECK(tf.f[tf.at(0, i)] == 0.0);
        CHECK(tf.f[tf.at(i, tf.resolution - 1)] == 0.0);
    }
    // divergence theorem: integral of the laplacian is ~0
    double l1 = 0.0;
    for (double v : tf.lap) l1 += std::abs(v) * tf.h * tf.h;
    CHECK(std::abs(tf.integral_lap) < 1e-6 * l1);

    TestFunction hi = make_test_function(Profile::MollifierBump, 0.0, 0.0, 32, 256, 0.5);
    CHECK(tf.grad_sq == doctest::Approx(hi.grad_sq).epsilon(0.01));
    CHECK(tf.integral_f == doctest::Approx(hi.integral_f).epsilon(0.01));

    TestFunction g =
        make_test_function(Profile::GaussianTruncated, 0.0, 0.25, 256, 128, 0.5);
    double gl1 = 0.0;
    for (double v : g.lap) gl1 += std::abs(v) * g.h * g.h;
    CHECK(std::abs(g.integral_lap) < 1e-6 * gl1);

    // rejected configurations
    CHECK_THROWS_AS(make_test_function(Profile::MollifierBump, 0.9, 0.0, 32, 128, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_test_function(Profile::MollifierBump, 0.0, 0.6, 32, 128, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_test_function(Profile::MollifierBump, 0.0, 0.0, 32, 32, 0.5),
                    std::invalid_argument);
}

TEST_CASE("custom-grid profile reproduces the analytic derivatives") {
    TestFunction ref = make_test_function(Profile::MollifierBump, 0.0, 0.0, 32, 192, 0.5);
    TestFunction cus = make_custom_test_function(ref.f, ref.resolution, ref.extent,
                                                 ref.z0, ref.a, ref.n);
    CHECK(cus.grad_sq == doctest::Approx(ref.grad_sq).epsilon(0.02));
    CHECK(cus.lap_sq == doctest::Approx(ref.lap_sq).epsilon(0.05));
    CHECK(cus.integral_f == doctest::Approx(ref.integral_f).epsilon(1e-10));
}

TEST_CASE("linear_statistic: eigenvalue pile-up at the center") {
    TestFunction tf = make_test_function(Profile::MollifierBump, 0.0, 0.0, 4, 128, 0.5);
    ComplexMatrix X = ComplexMatrix::Zero(4, 4); // all eigenvalues at z0 = 0
    double expect = 4.0 * tf.eval(0.0, 0.0);
    CHECK(linear_statistic(X, tf) == doctest::Approx(expect).epsilon(1e-10));
    // (0,0) is not a grid node at even resolution; bilinear error is O(h^2)
    CHECK(tf.eval(0.0, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));

    // f evaluates to zero outside its support
    ComplexMatrix Y = 5.0 * ComplexMatrix::Identity(4, 4);
    CHECK(linear_statistic(Y, tf) == 0.0);
}

TEST_CASE("girko_rhs validates T_cap and agrees with the direct statistic") {
    const int n = 16;
    ComplexMatrix X = sample_iid({EnsembleKind::ComplexGinibre, n}, {91, 0});
    TestFunction tf = make_test_function(Profile::MollifierBump, 0.0, 0.0, n, 96, 0.5);
    CHECK_THROWS_AS(girko_rhs(X, tf, 1.0), std::invalid_argument);
    GirkoResult g = girko_rhs(X, tf, 200.0);
    double direct = linear_statistic(X, tf);
    CHECK(g.flagged_nodes == 0);
    CHECK(std::abs(g.value - direct) < 0.08 * std::abs(direct));
}

TEST_CASE("v_kernel: symmetry, reality, finite-difference oracle") {
    SpectralPoint pi{Complex(0.3, 0.0), 0.2}, pj{Complex(0.1, 0.25), 0.7};
    Complex v = v_kernel(pi, pj);
    CHECK(std::abs(v - v_kernel(pj, pi)) < 1e-10);
    CHECK(std::abs(v.imag()) < 1e-8);

    auto logD = [&](double ei, double ej) {
        ScalarMSolution si = solve_m({pi.z, ei}), sj = solve_m({pj.z, ej});
        Complex D = 1.0 +
                    si.u * si.u * sj.u * sj.u * std::norm(pi.z) * std::norm(pj.z) -
                    si.m * si.m * sj.m * sj.m -
                    2.0 * si.u * sj.u * (pi.z * std::conj(pj.z)).real();
        return std::log(D);
    };
    const double h = 1e-4;
    Complex fd = (logD(pi.eta + h, pj.eta + h) - logD(pi.eta + h, pj.eta - h) -
                  logD(pi.eta - h, pj.eta + h) + logD(pi.eta - h, pj.eta - h)) /
                 (4.0 * h * h) * 0.5;
    CHECK(std::abs(v - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
}

TEST_CASE("v_kernel decay bound with one fitted constant") {
    double cmax = 0.0;
    for (double ei : {0.01, 0.1, 1.0, 10.0})
        for (double ej : {0.01, 0.1, 1.0, 10.0}) {
            SpectralPoint pi{Complex(0.3, 0.0), ei}, pj{Complex(0.4, 0.1), ej};
            double bound = 1.0 / (std::pow(1 + ei, 2) * std::pow(1 + ej, 2) *
                                  (std::norm(pi.z - pj.z) + ei + ej));
            cmax = std::max(cmax, std::abs(v_kernel(pi, pj)) / bound);
        }
    CHECK(cmax < 50.0);
}

TEST_CASE("u_kernel: hand value at z=0, eta=1 and finite differences") {
    SpectralPoint p{0.0, 1.0};
    // m = i(sqrt5-1)/2 from m^2 + i m + 1 = 0; m' = -i m/(2m + i)
    Complex m(0.0, (std::sqrt(5.0) - 1.0) / 2.0);
    Complex mp = -Complex(0, 1) * m / (2.0 * m + Complex(0, 1));
    Complex hand = Complex(0, std::numbers::sqrt2) * m * mp;
    CHECK(std::abs(u_kernel(p) - hand) < 1e-10);

    const double h = 1e-5;
    auto m2 = [&](double e) {
        Complex mm = solve_m({p.z, e}).m;
        return mm * mm;
    };
    Complex fd = Complex(0, 1.0 / std::numbers::sqrt2) * (m2(1.0 + h) - m2(1.0 - h)) /
                 (2.0 * h);
    CHECK(std::abs(u_kernel(p) - fd) < 1e-5);

    double cmax = 0.0;
    for (double e : {0.01, 0.1, 1.0, 10.0, 100.0})
        cmax = std::max(cmax,
                        std::abs(u_kernel({Complex(0.5, 0.0), e})) * std::pow(1 + e, 3));
    CHECK(cmax < 30.0);
}

TEST_CASE("covariance integral: monotone in the separation") {
    CovarianceIntegral near = covariance_integral(0.3, Complex(0.3, 0.05), 0.0, 80);
    CovarianceIntegral far = covariance_integral(0.3, Complex(0.3, 0.25), 0.0, 80);
    CHECK(near.quadrature > far.quadrature);
    CHECK(near.closed_form > far.closed_form);
    CHECK_THROWS_AS(covariance_integral(0.3, 0.3, 0.0), std::invalid_argument);
}

TEST_CASE("covariance integral closed form at a hand-checked pair") {
    CovarianceIntegral ci = covariance_integral(0.3, Complex(0.3, 0.1), 0.0);
    CHECK(ci.closed_form == doctest::Approx(-std::log(0.1)).epsilon(1e-12));
    CHECK(std::abs(ci.quadrature - ci.closed_form) < 1e-4);
    // kappa4 difference isolates the U-term
    CovarianceIntegral cik = covariance_integral(0.3, Complex(0.3, 0.1), -1.0);
    double uterm = cik.quadrature - ci.quadrature;
    double expect = -0.5 * (1.0 - 0.09) * (1.0 - std::norm(Complex(0.3, 0.1)));
    CHECK(uterm == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("clt_prediction fields") {
    TestFunction tf = make_test_function(Profile::MollifierBump, 0.0, 0.25, 256, 128, 0.5);
    CLTPrediction p = clt_prediction(tf, -1.0, 256);
    const double pi = std::numbers::pi;
    CHECK(p.variance == doctest::Approx(tf.grad_sq / (4.0 * pi)));
    CHECK(std::abs(p.pseudo_variance - p.variance) < 1e-15);
    CHECK(p.mean.real() == doctest::Approx(std::pow(256.0, 0.5) / pi * tf.integral_f +
                                           tf.integral_lap / (8.0 * pi)));
    CHECK(p.kappa4_term == doctest::Approx(-tf.integral_f * tf.integral_f / (pi * pi)));
}
