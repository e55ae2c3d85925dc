#pragma once

// i.i.d. matrix ensembles with E chi = E chi^2 = 0, E|chi|^2 = 1, entries
// scaled by 1/sqrt(n), plus the exact-in-distribution Ornstein-Uhlenbeck
// step and the Hermitization H^z.

#include <cmath>
#include <stdexcept>

#include "girko/block.hpp"
#include "girko/rng.hpp"

namespace girko {

enum class EnsembleKind { ComplexGinibre, BernoulliPhase, UniformDisk };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::ComplexGinibre;
    int n = 0;
};

inline const char* ensemble_name(EnsembleKind k) {
    switch (k) {
    case EnsembleKind::ComplexGinibre: return "complex-ginibre";
    case EnsembleKind::BernoulliPhase: return "bernoulli-phase";
    default: return "uniform-disk";
    }
}

// fourth cumulant kappa4 = E|chi|^4 - 2 of the unnormalized entry law
inline double kappa4(const EnsembleSpec& spec) {
    switch (spec.kind) {
    case EnsembleKind::ComplexGinibre: return 0.0;   // E|chi|^4 = 2
    case EnsembleKind::BernoulliPhase: return -1.0;  // |chi| = 1
    default: return -2.0 / 3.0; // radius sqrt(2): E|chi|^4 = 4/3
    }
}

inline ComplexMatrix sample_iid(const EnsembleSpec& spec, Seed seed) {
    if (spec.n < 2)
        throw std::invalid_argument("sample_iid: n >= 2 required");
    const int n = spec.n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CounterRng rng(seed);
    ComplexMatrix X(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const std::uint64_t idx =
                static_cast<std::uint64_t>(a) * n + static_cast<std::uint64_t>(b);
            Complex chi;
            switch (spec.kind) {
            case EnsembleKind::ComplexGinibre: chi = rng.gaussian(idx); break;
            case EnsembleKind::BernoulliPhase: chi = rng.phase4(idx); break;
            default: chi = rng.disk(idx); break;
            }
            X(a, b) = scale * chi;
        }
    }
    return X;
}

// One exact distributional OU step:
//   X_t = e^{-t/2} X_0 + sqrt(1 - e^{-t}) * fresh Ginibre.
// The SDE dX = -X/2 dt + dB/sqrt(n) is never discretized; only the law of
// X_t is needed.
inline ComplexMatrix ou_evolve(const ComplexMatrix& X0, double t, Seed seed) {
    if (t < 0.0)
        throw std::invalid_argument("ou_evolve: negative time");
    if (t == 0.0) return X0;
    EnsembleSpec g{EnsembleKind::ComplexGinibre, static_cast<int>(X0.rows())};
    ComplexMatrix fresh = sample_iid(g, seed);
    return std::exp(-t / 2.0) * X0 + std::sqrt(1.0 - std::exp(-t)) * fresh;
}

// H^z = (0, X-z; (X-z)*, 0); Hermitian, spectrum = +/- singular values of X-z
inline ComplexMatrix hermitize(const ComplexMatrix& X, Complex z) {
    if (X.rows() != X.cols())
        throw std::invalid_argument("hermitize: square matrix required");
    const int n = static_cast<int>(X.rows());
    ComplexMatrix Y = X - z * ComplexMatrix::Identity(n, n);
    ComplexMatrix H = ComplexMatrix::Zero(2 * n, 2 * n);
    H.topRightCorner(n, n) = Y;
    H.bottomLeftCorner(n, n) = Y.adjoint();
    return H;
}

} // namespace girko
