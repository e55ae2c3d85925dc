#pragma once

// Aggregation of per-seed observables: mean, unbiased variance, complex
// pseudo-variance, excess kurtosis, quantiles, and Monte Carlo standard
// errors for each.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace girko {

struct Moments {
    std::size_t count = 0;
    std::complex<double> mean;
    double variance = 0.0;               // unbiased, of the complex samples: E|x-mean|^2
    std::complex<double> pseudo_variance; // E[(x-mean)^2]
    double kurtosis_re = 0.0, kurtosis_im = 0.0; // excess kurtosis per component
    double se_mean = 0.0;      // MC standard error of |mean|
    double se_variance = 0.0;  // MC standard error of the variance estimate
    double se_kurtosis = 0.0;  // asymptotic SE of excess kurtosis, sqrt(24/N)
};

inline Moments summarize(const std::vector<std::complex<double>>& rows) {
    if (rows.size() < 2)
        throw std::invalid_argument("summarize: at least 2 rows required");
    const double N = static_cast<double>(rows.size());
    Moments m;
    m.count = rows.size();
    std::complex<double> sum = 0.0;
    for (auto& x : rows) sum += x;
    m.mean = sum / N;

    double s2 = 0.0, s4 = 0.0;
    std::complex<double> ps = 0.0;
    double re2 = 0, re4 = 0, im2 = 0, im4 = 0;
    for (auto& x : rows) {
        auto d = x - m.mean;
        s2 += std::norm(d);
        s4 += std::norm(d) * std::norm(d);
        ps += d * d;
        re2 += d.real() * d.real();
        re4 += std::pow(d.real(), 4);
        im2 += d.imag() * d.imag();
        im4 += std::pow(d.imag(), 4);
    }
    m.variance = s2 / (N - 1.0);
    m.pseudo_variance = ps / (N - 1.0);
    m.kurtosis_re = re2 > 0 ? re4 / N / std::pow(re2 / N, 2) - 3.0 : 0.0;
    m.kurtosis_im = im2 > 0 ? im4 / N / std::pow(im2 / N, 2) - 3.0 : 0.0;
    m.se_mean = std::sqrt(m.variance / N);
    // var of the sample variance: (m4 - sigma^4)/N for complex modulus moments
    m.se_variance = std::sqrt(std::max(0.0, s4 / N - std::pow(s2 / N, 2)) / N);
    m.se_kurtosis = std::sqrt(24.0 / N);
    return m;
}

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(v.begin(), v.end());
    double pos = q * (v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    double t = pos - lo;
    return (1 - t) * v[lo] + t * v[lo + 1];
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

} // namespace girko
