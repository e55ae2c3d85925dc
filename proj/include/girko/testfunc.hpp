#pragma once

// Compactly supported test functions on a square grid, with analytic
// gradient and Laplacian for the built-in profiles and 4th-order central
// differences for custom grids. The rescaled function is
// f_{z0,a}(z) = f(n^a (z - z0)).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "girko/block.hpp"

namespace girko {

enum class Profile { MollifierBump, GaussianTruncated, CustomGrid };

struct TestFunction {
    Profile profile = Profile::MollifierBump;
    double support_radius = 1.0; // base f vanishes for |zeta| >= support_radius
    int resolution = 128;        // grid points per side
    Complex z0 = 0.0;
    double a = 0.0;   // rescaling exponent, f(n^a (z - z0))
    int n = 0;        // matrix dimension the rescaling refers to
    double extent = 1.0; // grid covers [-extent, extent]^2 in zeta coordinates
    double h = 0.0;      // grid spacing

    std::vector<double> f, fx, fy, lap; // row-major, resolution^2 entries

    // grid quadrature accumulators
    double integral_f = 0.0;
    double integral_lap = 0.0;
    double grad_sq = 0.0;       // ||grad f||_{L2}^2
    double lap_sq = 0.0;        // ||lap f||_{L2}^2

    double x_of(int i) const { return -extent + h * i; }
    double y_of(int j) const { return -extent + h * j; }
    std::size_t at(int i, int j) const {
        return static_cast<std::size_t>(j) * resolution + i;
    }

    // bilinear interpolation of the stored values; 0 outside the grid
    double eval(double x, double y) const {
        double gx = (x + extent) / h, gy = (y + extent) / h;
        int i = static_cast<int>(std::floor(gx)), j = static_cast<int>(std::floor(gy));
        if (i < 0 || j < 0 || i + 1 >= resolution || j + 1 >= resolution) return 0.0;
        double tx = gx - i, ty = gy - j;
        return (1 - tx) * (1 - ty) * f[at(i, j)] + tx * (1 - ty) * f[at(i + 1, j)] +
               (1 - tx) * ty * f[at(i, j + 1)] + tx * ty * f[at(i + 1, j + 1)];
    }

    // rescaled test function evaluated at a point of the complex plane
    double eval_rescaled(Complex z) const {
        const double s = std::pow(static_cast<double>(n), a);
        Complex zeta = s * (z - z0);
        return eval(zeta.real(), zeta.imag());
    }
};

namespace detail {

struct AnalyticProfile {
    std::function<double(double, double)> f, fx, fy, lap;
};

// f = exp(1/(rho^2 - 1)) inside rho = |zeta|/R < 1
inline AnalyticProfile mollifier_profile(double R) {
    auto inside = [R](double x, double y) {
        return (x * x + y * y) / (R * R) < 1.0 - 1e-12;
    };
    auto core = [R, inside](double x, double y, int what) -> double {
        if (!inside(x, y)) return 0.0;
        const double s = (x * x + y * y) / (R * R);
        const double g = 1.0 / (s - 1.0);
        const double f = std::exp(g);
        const double gp = -1.0 / ((s - 1.0) * (s - 1.0));  // g'(s)
        const double gpp = 2.0 / std::pow(s - 1.0, 3);     // g''(s)
        switch (what) {
        case 0: return f;
        case 1: return f * gp * 2.0 * x / (R * R);
        case 2: return f * gp * 2.0 * y / (R * R);
        default:
            return f * ((gp * gp + gpp) * 4.0 * s / (R * R) + 4.0 * gp / (R * R)) /
                   1.0;
        }
    };
    AnalyticProfile p;
    p.f = [core](double x, double y) { return core(x, y, 0); };
    p.fx = [core](double x, double y) { return core(x, y, 1); };
    p.fy = [core](double x, double y) { return core(x, y, 2); };
    p.lap = [core](double x, double y) { return core(x, y, 3); };
    return p;
}

// gaussian windowed by the mollifier bump so the support stays compact:
// f = exp(-2|zeta|^2/R^2) * bump(|zeta|/R)
inline AnalyticProfile gaussian_profile(double R) {
    AnalyticProfile b = mollifier_profile(R);
    const double c = 2.0 / (R * R);
    AnalyticProfile p;
    p.f = [b, c](double x, double y) {
        return std::exp(-c * (x * x + y * y)) * b.f(x, y);
    };
    p.fx = [b, c](double x, double y) {
        double g = std::exp(-c * (x * x + y * y));
        return g * (b.fx(x, y) - 2.0 * c * x * b.f(x, y));
    };
    p.fy = [b, c](double x, double y) {
        double g = std::exp(-c * (x * x + y * y));
        return g * (b.fy(x, y) - 2.0 * c * y * b.f(x, y));
    };
    p.lap = [b, c](double x, double y) {
        double g = std::exp(-c * (x * x + y * y));
        double r2 = x * x + y * y;
        // product rule: lap(gb) = b lap g + 2 grad g . grad b + g lap b
        double lapg = g * (4.0 * c * c * r2 - 4.0 * c);
        double cross = -2.0 * c * g * (x * b.fx(x, y) + y * b.fy(x, y));
        return b.f(x, y) * lapg + 2.0 * cross + g * b.lap(x, y);
    };
    return p;
}

} // namespace detail

inline TestFunction make_test_function(Profile profile, Complex z0, double a, int n,
                                       int resolution, double support_radius = 1.0,
                                       double bulk_tau = 0.05) {
    if (resolution < 64)
        throw std::invalid_argument("make_test_function: resolution >= 64 required");
    if (a < 0.0 || a >= 0.5)
        throw std::invalid_argument("make_test_function: a in [0, 1/2) required");
    // rescaled support is a disk of radius support_radius / n^a around z0
    const double scaled_r = support_radius / std::pow(static_cast<double>(n), a);
    if (std::abs(z0) + scaled_r > 1.0 - bulk_tau)
        throw std::invalid_argument(
            "make_test_function: rescaled support escapes the bulk disk");

    TestFunction tf;
    tf.profile = profile;
    tf.support_radius = support_radius;
    tf.resolution = resolution;
    tf.z0 = z0;
    tf.a = a;
    tf.n = n;
    tf.extent = support_radius * 1.05; // margin ring where f vanishes
    tf.h = 2.0 * tf.extent / (resolution - 1);

    detail::AnalyticProfile p = profile == Profile::GaussianTruncated
                                    ? detail::gaussian_profile(support_radius)
                                    : detail::mollifier_profile(support_radius);
    const std::size_t total = static_cast<std::size_t>(resolution) * resolution;
    tf.f.resize(total);
    tf.fx.resize(total);
    tf.fy.resize(total);
    tf.lap.resize(total);
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
            double x = tf.x_of(i), y = tf.y_of(j);
            std::size_t k = tf.at(i, j);
            tf.f[k] = p.f(x, y);
            tf.fx[k] = p.fx(x, y);
            tf.fy[k] = p.fy(x, y);
            tf.lap[k] = p.lap(x, y);
        }
    }
    const double cell = tf.h * tf.h;
    for (std::size_t k = 0; k < total; ++k) {
        tf.integral_f += tf.f[k] * cell;
        tf.integral_lap += tf.lap[k] * cell;
        tf.grad_sq += (tf.fx[k] * tf.fx[k] + tf.fy[k] * tf.fy[k]) * cell;
        tf.lap_sq += tf.lap[k] * tf.lap[k] * cell;
    }
    return tf;
}

// custom profile from caller-supplied grid values; derivatives by 4th-order
// central differences
inline TestFunction make_custom_test_function(const std::vector<double>& values,
                                              int resolution, double extent,
                                              Complex z0, double a, int n) {
    if (resolution < 64)
        throw std::invalid_argument("make_custom_test_function: resolution >= 64");
    if (values.size() != static_cast<std::size_t>(resolution) * resolution)
        throw std::invalid_argument("make_custom_test_function: size mismatch");
    TestFunction tf;
    tf.profile = Profile::CustomGrid;
    tf.resolution = resolution;
    tf.z0 = z0;
    tf.a = a;
    tf.n = n;
    tf.extent = extent;
    tf.support_radius = extent;
    tf.h = 2.0 * extent / (resolution - 1);
    tf.f = values;
    const std::size_t total = values.size();
    tf.fx.assign(total, 0.0);
    tf.fy.assign(total, 0.0);
    tf.lap.assign(total, 0.0);
    auto fv = [&](int i, int j) -> double {
        if (i < 0 || j < 0 || i >= resolution || j >= resolution) return 0.0;
        return tf.f[tf.at(i, j)];
    };
    const double h = tf.h;
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
            std::size_t k = tf.at(i, j);
            tf.fx[k] = (-fv(i + 2, j) + 8 * fv(i + 1, j) - 8 * fv(i - 1, j) +
                        fv(i - 2, j)) / (12 * h);
            tf.fy[k] = (-fv(i, j + 2) + 8 * fv(i, j + 1) - 8 * fv(i, j - 1) +
                        fv(i, j - 2)) / (12 * h);
            double dxx = (-fv(i + 2, j) + 16 * fv(i + 1, j) - 30 * fv(i, j) +
                          16 * fv(i - 1, j) - fv(i - 2, j)) / (12 * h * h);
            double dyy = (-fv(i, j + 2) + 16 * fv(i, j + 1) - 30 * fv(i, j) +
                          16 * fv(i, j - 1) - fv(i, j - 2)) / (12 * h * h);
            tf.lap[k] = dxx + dyy;
        }
    }
    const double cell = h * h;
    for (std::size_t k = 0; k < total; ++k) {
        tf.integral_f += tf.f[k] * cell;
        tf.integral_lap += tf.lap[k] * cell;
        tf.grad_sq += (tf.fx[k] * tf.fx[k] + tf.fy[k] * tf.fy[k]) * cell;
        tf.lap_sq += tf.lap[k] * tf.lap[k] * cell;
    }
    return tf;
}

} // namespace girko
