#pragma once

// Reference implementations used only by tests. Each one evaluates its
// quantity by the most literal route available (triple loops, materialized
// matrices, full sorts) and must stay independent of the library paths it
// is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

/// Two-sample energy statistic by direct evaluation of the three double
/// sums: 2/(n1 n2) sum ||x_i - y_m|| - 1/n1^2 sum ||x_i - x_j||
/// - 1/n2^2 sum ||y_l - y_m||, diagonal terms included.
template <typename Point, typename Metric>
double energy_triple_loop(const std::vector<Point>& x, const std::vector<Point>& y, Metric m) {
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    double cross = 0.0;
    for (const Point& a : x)
        for (const Point& b : y) cross += m(a, b);
    double wx = 0.0;
    for (const Point& a : x)
        for (const Point& b : x) wx += m(a, b);
    double wy = 0.0;
    for (const Point& a : y)
        for (const Point& b : y) wy += m(a, b);
    return 2.0 / (n1 * n2) * cross - wx / (n1 * n1) - wy / (n2 * n2);
}

/// Chord distance by materializing both k x k projector matrices and taking
/// the Frobenius norm of their difference.
inline double chord_via_matrices(const std::vector<std::complex<double>>& z,
                                 const std::vector<std::complex<double>>& w) {
    const std::size_t k = z.size();
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const std::complex<double> diff = z[i] * std::conj(z[j]) - w[i] * std::conj(w[j]);
            s += std::norm(diff);
        }
    return std::sqrt(s);
}

/// Upper-alpha empirical quantile: the ceil((1-alpha) B)-th smallest value.
inline double quantile_by_sort(std::vector<double> values, double alpha) {
    std::sort(values.begin(), values.end());
    const double b = static_cast<double>(values.size());
    double rank = std::ceil((1.0 - alpha) * b - 1e-9);
    if (rank < 1.0) rank = 1.0;
    if (rank > b) rank = b;
    return values[static_cast<std::size_t>(rank) - 1];
}

} // namespace oracle
