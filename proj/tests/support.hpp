#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "kinf/types.hpp"

namespace kinf::testing {

inline Matrix random_matrix(Eigen::Index n, std::uint64_t seed, bool hermitian = false)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
    }
    if (hermitian) a = (0.5 * (a + a.adjoint())).eval();
    return a;
}

inline Vector random_vector(Eigen::Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(normal(rng), normal(rng));
    return v;
}

// Physicists' Hermite polynomial from its explicit sum, independent of any recurrence.
inline double hermite_polynomial(int n, double x)
{
    double sum = 0.0;
    for (int m = 0; m <= n / 2; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const double log_coeff = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - 2.0 * m + 1.0);
        sum += sign * std::exp(log_coeff) * std::pow(2.0 * x, n - 2 * m);
    }
    return sum;
}

inline double hermite_function_oracle(int n, double x)
{
    const double log_norm = -0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0) + 0.5 * std::log(std::numbers::pi));
    return std::exp(log_norm - 0.5 * x * x) * hermite_polynomial(n, x);
}

// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
auto simpson(F f, double a, double b, int panels)
{
    const double h = (b - a) / panels;
    auto sum = f(a) + f(b);
    for (int k = 1; k < panels; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h);
    return sum * (h / 3.0);
}

}  // namespace kinf::testing
