#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "exen/error.hpp"

namespace exen {

// Point introspection hooks. A point type participates in SampleSet by
// providing point_dimension / point_is_finite overloads findable from here
// (declared before the templates below, or via ADL for types in this
// namespace). Euclidean points are plain coordinate vectors.

inline std::size_t point_dimension(const std::vector<double>& p) { return p.size(); }

inline bool point_is_finite(const std::vector<double>& p) {
    for (double v : p)
        if (!std::isfinite(v)) return false;
    return true;
}

/// An immutable set of sample points sharing one representation and
/// dimension. Construction validates: at least one point, uniform positive
/// dimension, finite coordinates.
template <typename Point>
class SampleSet {
public:
    explicit SampleSet(std::vector<Point> points) : points_(std::move(points)) {
        if (points_.empty()) throw InvalidInputError("sample set must contain at least one point");
        dim_ = point_dimension(points_.front());
        if (dim_ == 0) throw InvalidInputError("sample points must have positive dimension");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (point_dimension(points_[i]) != dim_)
                throw InvalidInputError("sample set mixes point dimensions");
            if (!point_is_finite(points_[i]))
                throw InvalidInputError("sample point has non-finite coordinates");
        }
    }

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dimension() const noexcept { return dim_; }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Point>& points() const noexcept { return points_; }

    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

private:
    std::vector<Point> points_;
    std::size_t dim_ = 0;
};

/// Euclidean distance between coordinate vectors.
struct EuclideanDistance {
    double operator()(const std::vector<double>& a, const std::vector<double>& b) const {
        if (a.size() != b.size())
            throw InvalidInputError("euclidean distance: dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            s += d * d;
        }
        return std::sqrt(s);
    }
};

/// Dense row-major matrix of pairwise distances.
class DistanceMatrix {
public:
    DistanceMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), v_(rows * cols, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }
    double& at(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> v_;
};

/// Entry (i, j) = metric(a[i], b[j]), computed in row-major order.
/// A metric that produces a non-finite or negative value is a hard error.
template <typename Point, typename Metric>
DistanceMatrix pairwise_distance_matrix(const SampleSet<Point>& a, const SampleSet<Point>& b,
                                        Metric metric) {
    if (a.dimension() != b.dimension())
        throw InvalidInputError("pairwise distances: sample sets have different dimensions");
    DistanceMatrix d(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double v = metric(a[i], b[j]);
            if (!std::isfinite(v) || v < 0.0)
                throw NumericError("metric produced a non-finite or negative distance");
            d.at(i, j) = v;
        }
    }
    return d;
}

/// Two-sample energy statistic, decomposed.
///
/// energy     = 2 * cross_mean - within_x_mean - within_y_mean
/// t_energy   = (n1 * n2 / (n1 + n2)) * energy
///
/// cross_mean is the mean distance over all n1*n2 cross pairs; the within
/// means run over all n^2 ordered pairs of one sample, diagonal included.
struct EnergyReport {
    double cross_mean = 0.0;
    double within_x_mean = 0.0;
    double within_y_mean = 0.0;
    double energy = 0.0;
    double t_energy = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Scaling factor n1*n2/(n1+n2) applied to the energy statistic.
inline double t_energy(const EnergyReport& r) {
    const double n1 = static_cast<double>(r.n1);
    const double n2 = static_cast<double>(r.n2);
    return n1 * n2 / (n1 + n2) * r.energy;
}

namespace detail {

inline EnergyReport assemble_report(double cross_sum, double within_x_sum, double within_y_sum,
                                    std::size_t n1, std::size_t n2) {
    EnergyReport r;
    r.n1 = n1;
    r.n2 = n2;
    const double d1 = static_cast<double>(n1);
    const double d2 = static_cast<double>(n2);
    r.cross_mean = cross_sum / (d1 * d2);
    r.within_x_mean = within_x_sum / (d1 * d1);
    r.within_y_mean = within_y_sum / (d2 * d2);
    r.energy = 2.0 * r.cross_mean - r.within_x_mean - r.within_y_mean;
    r.t_energy = d1 * d2 / (d1 + d2) * r.energy;
    return r;
}

} // namespace detail

/// Energy statistic of two samples under the supplied metric. Sums
/// accumulate in row-major pair order, so results are reproducible.
template <typename Point, typename Metric>
EnergyReport energy_statistic(const SampleSet<Point>& x, const SampleSet<Point>& y, Metric metric) {
    if (x.dimension() != y.dimension())
        throw InvalidInputError("energy statistic: sample sets have different dimensions");
    auto pair_sum = [&metric](const SampleSet<Point>& a, const SampleSet<Point>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                const double v = metric(a[i], b[j]);
                if (!std::isfinite(v) || v < 0.0)
                    throw NumericError("metric produced a non-finite or negative distance");
                s += v;
            }
        return s;
    };
    return detail::assemble_report(pair_sum(x, y), pair_sum(x, x), pair_sum(y, y),
                                   x.size(), y.size());
}

/// Energy statistic evaluated through a precomputed square distance matrix
/// over a pooled sample; xi and yi index rows/columns of that matrix. This
/// is the kernel resampling reuses: resampled distances are lookups.
inline EnergyReport energy_from_matrix(const DistanceMatrix& pooled,
                                       std::span<const std::size_t> xi,
                                       std::span<const std::size_t> yi) {
    if (pooled.rows() != pooled.cols())
        throw InvalidInputError("energy from matrix: pooled matrix must be square");
    if (xi.empty() || yi.empty())
        throw InvalidInputError("energy from matrix: index lists must be nonempty");
    const std::size_t n = pooled.rows();
    for (std::size_t i : xi)
        if (i >= n) throw InvalidInputError("energy from matrix: index out of range");
    for (std::size_t j : yi)
        if (j >= n) throw InvalidInputError("energy from matrix: index out of range");

    double cross = 0.0, wx = 0.0, wy = 0.0;
    for (std::size_t i : xi)
        for (std::size_t j : yi) cross += pooled(i, j);
    for (std::size_t i : xi)
        for (std::size_t j : xi) wx += pooled(i, j);
    for (std::size_t i : yi)
        for (std::size_t j : yi) wy += pooled(i, j);
    return detail::assemble_report(cross, wx, wy, xi.size(), yi.size());
}

/// V-statistic (1/n^2) sum_{i,j} h(x_i, x_j) of a symmetric kernel,
/// diagonal terms included.
template <typename Point, typename Kernel>
double v_statistic(const SampleSet<Point>& x, Kernel h) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double v = h(x[i], x[j]);
            if (!std::isfinite(v)) throw NumericError("kernel produced a non-finite value");
            s += v;
        }
    const double n = static_cast<double>(x.size());
    return s / (n * n);
}

} // namespace exen
