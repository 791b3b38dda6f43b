#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "exen/energy.hpp"
#include "exen/error.hpp"
#include "exen/rng.hpp"

namespace exen {

enum class ResampleMethod { bootstrap_with_replacement, permutation };

/// How the null distribution of the t-energy statistic is resampled.
/// Trial b draws from the substream rng::derive(seed, b), so trials are
/// independent of execution order and thread count.
struct ResamplePlan {
    ResampleMethod method;
    std::size_t trials;
    std::uint64_t seed;
    std::size_t n1;
    std::size_t n2;

    ResamplePlan(ResampleMethod method_, std::size_t trials_, std::uint64_t seed_,
                 std::size_t n1_, std::size_t n2_)
        : method(method_), trials(trials_), seed(seed_), n1(n1_), n2(n2_) {
        if (trials == 0) throw InvalidInputError("resample plan needs at least one trial");
        if (n1 == 0 || n2 == 0) throw InvalidInputError("resample plan needs nonempty groups");
    }
};

/// Draws n1 + n2 indices independently and uniformly from {0..n-1} with
/// replacement: first the n1 pseudo-X indices, then the n2 pseudo-Y indices.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
bootstrap_resample_pooled(std::size_t pooled_size, std::size_t n1, std::size_t n2,
                          rng::Stream& stream) {
    if (pooled_size != n1 + n2)
        throw InvalidInputError("bootstrap resample: pooled size must equal n1 + n2");
    std::vector<std::size_t> xi(n1), yi(n2);
    for (std::size_t i = 0; i < n1; ++i) xi[i] = stream.uniform_below(pooled_size);
    for (std::size_t j = 0; j < n2; ++j) yi[j] = stream.uniform_below(pooled_size);
    return {std::move(xi), std::move(yi)};
}

/// Splits a uniform random permutation of {0..n-1} into its first n1 and
/// last n2 entries. Fisher-Yates from the back.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
permutation_resample_pooled(std::size_t pooled_size, std::size_t n1, std::size_t n2,
                            rng::Stream& stream) {
    if (pooled_size != n1 + n2)
        throw InvalidInputError("permutation resample: pooled size must equal n1 + n2");
    std::vector<std::size_t> perm(pooled_size);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = pooled_size - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.uniform_below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return {std::vector<std::size_t>(perm.begin(), perm.begin() + n1),
            std::vector<std::size_t>(perm.begin() + n1, perm.end())};
}

template <typename Point>
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
bootstrap_resample_pooled(const SampleSet<Point>& pooled, std::size_t n1, std::size_t n2,
                          rng::Stream& stream) {
    return bootstrap_resample_pooled(pooled.size(), n1, n2, stream);
}

template <typename Point>
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
permutation_resample_pooled(const SampleSet<Point>& pooled, std::size_t n1, std::size_t n2,
                            rng::Stream& stream) {
    return permutation_resample_pooled(pooled.size(), n1, n2, stream);
}

/// Index draw for one trial of a plan. Exposed so the resample path can be
/// replayed independently of calibrate().
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
draw_trial_indices(const ResamplePlan& plan, std::uint64_t trial) {
    rng::Stream stream = rng::Stream::substream(plan.seed, trial);
    const std::size_t n = plan.n1 + plan.n2;
    return plan.method == ResampleMethod::bootstrap_with_replacement
               ? bootstrap_resample_pooled(n, plan.n1, plan.n2, stream)
               : permutation_resample_pooled(n, plan.n1, plan.n2, stream);
}

/// Resampled null distribution of the t-energy statistic.
struct CalibrationResult {
    std::vector<double> t_star; // trial order, size plan.trials
    ResamplePlan plan;
    double t_observed = 0.0;
    double p_value = 0.0;
    std::map<double, double> critical_values;
};

namespace detail {

inline double critical_from_sorted(std::span<const double> sorted, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInputError("alpha must be in (0, 1)");
    if (sorted.empty()) throw InvalidInputError("critical value of an empty resample");
    const double b = static_cast<double>(sorted.size());
    // Inclusive upper order statistic: rank ceil((1 - alpha) * B), 1-based.
    // The epsilon absorbs decimal-to-binary dust next to exact integers.
    double r = std::ceil((1.0 - alpha) * b - 1e-9);
    if (r < 1.0) r = 1.0;
    std::size_t rank = static_cast<std::size_t>(r);
    if (rank > sorted.size()) rank = sorted.size();
    return sorted[rank - 1];
}

} // namespace detail

/// Empirical upper-alpha critical value of a resampled statistic sample.
inline double critical_value(std::span<const double> t_star, double alpha) {
    std::vector<double> sorted(t_star.begin(), t_star.end());
    std::sort(sorted.begin(), sorted.end());
    return detail::critical_from_sorted(sorted, alpha);
}

inline double critical_value(const CalibrationResult& cal, double alpha) {
    return critical_value(std::span<const double>(cal.t_star), alpha);
}

/// Add-one resampling p-value: (1 + #{t* >= t_observed}) / (B + 1).
inline double p_value(std::span<const double> t_star, double t_observed) {
    std::size_t count = 0;
    for (double t : t_star)
        if (t >= t_observed) ++count;
    return static_cast<double>(1 + count) / static_cast<double>(t_star.size() + 1);
}

inline double p_value(const CalibrationResult& cal) {
    return p_value(std::span<const double>(cal.t_star), cal.t_observed);
}

/// Two-sample test outcome at a fixed level. reject iff the observed
/// t-energy strictly exceeds the resampled critical value.
struct TwoSampleResult {
    EnergyReport report;
    CalibrationResult calibration;
    double alpha = 0.0;
    bool reject = false;
};

namespace detail {

inline void fill_trial_indices(const ResamplePlan& plan, std::uint64_t trial,
                               std::vector<std::size_t>& xi, std::vector<std::size_t>& yi,
                               std::vector<std::size_t>& perm) {
    rng::Stream stream = rng::Stream::substream(plan.seed, trial);
    const std::size_t n = plan.n1 + plan.n2;
    xi.resize(plan.n1);
    yi.resize(plan.n2);
    if (plan.method == ResampleMethod::bootstrap_with_replacement) {
        for (std::size_t i = 0; i < plan.n1; ++i)
            xi[i] = static_cast<std::size_t>(stream.uniform_below(n));
        for (std::size_t j = 0; j < plan.n2; ++j)
            yi[j] = static_cast<std::size_t>(stream.uniform_below(n));
        return;
    }
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.uniform_below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::copy(perm.begin(), perm.begin() + plan.n1, xi.begin());
    std::copy(perm.begin() + plan.n1, perm.end(), yi.begin());
}

inline void run_trials(const DistanceMatrix& pooled, const ResamplePlan& plan,
                       std::vector<double>& t_star, unsigned threads) {
    const std::size_t trials = plan.trials;
    t_star.assign(trials, 0.0);

    auto worker = [&pooled, &plan, &t_star](std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> xi, yi, perm;
        for (std::size_t b = lo; b < hi; ++b) {
            fill_trial_indices(plan, b, xi, yi, perm);
            t_star[b] = energy_from_matrix(pooled, xi, yi).t_energy;
        }
    };

    if (threads <= 1 || trials < 2) {
        worker(0, trials);
        return;
    }
    const std::size_t nworkers = std::min<std::size_t>(threads, trials);
    const std::size_t chunk = (trials + nworkers - 1) / nworkers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nworkers);
    for (std::size_t w = 0; w < nworkers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi, w] {
            try {
                worker(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

constexpr double kDefaultAlphas[] = {0.01, 0.05, 0.10};

template <typename Point, typename Metric>
std::pair<CalibrationResult, EnergyReport> calibrate_impl(const SampleSet<Point>& x,
                                                          const SampleSet<Point>& y, Metric metric,
                                                          const ResamplePlan& plan,
                                                          unsigned threads) {
    if (plan.n1 != x.size() || plan.n2 != y.size())
        throw InvalidInputError("calibrate: plan group sizes do not match the samples");

    std::vector<Point> pooled_points;
    pooled_points.reserve(x.size() + y.size());
    pooled_points.insert(pooled_points.end(), x.begin(), x.end());
    pooled_points.insert(pooled_points.end(), y.begin(), y.end());
    const SampleSet<Point> pooled(std::move(pooled_points));
    const DistanceMatrix d = pairwise_distance_matrix(pooled, pooled, metric);

    std::vector<std::size_t> xi(plan.n1), yi(plan.n2);
    std::iota(xi.begin(), xi.end(), std::size_t{0});
    std::iota(yi.begin(), yi.end(), plan.n1);
    const EnergyReport observed = energy_from_matrix(d, xi, yi);

    CalibrationResult cal{std::vector<double>{}, plan, observed.t_energy, 0.0, {}};
    run_trials(d, plan, cal.t_star, threads);

    std::vector<double> sorted = cal.t_star;
    std::sort(sorted.begin(), sorted.end());
    for (double a : kDefaultAlphas) cal.critical_values[a] = critical_from_sorted(sorted, a);
    cal.p_value = p_value(std::span<const double>(cal.t_star), cal.t_observed);
    return {std::move(cal), observed};
}

} // namespace detail

/// Calibrates the t-energy statistic of (x, y) under the null by resampling
/// the pooled sample. The pooled pairwise distance matrix is computed once;
/// every trial evaluates through index lookups into it.
template <typename Point, typename Metric>
CalibrationResult calibrate(const SampleSet<Point>& x, const SampleSet<Point>& y, Metric metric,
                            const ResamplePlan& plan, unsigned threads = 1) {
    return detail::calibrate_impl(x, y, metric, plan, threads).first;
}

/// Runs the full two-sample energy test at level alpha.
template <typename Point, typename Metric>
TwoSampleResult two_sample_energy_test(const SampleSet<Point>& x, const SampleSet<Point>& y,
                                       Metric metric, const ResamplePlan& plan, double alpha,
                                       unsigned threads = 1) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInputError("alpha must be in (0, 1)");
    auto [cal, report] = detail::calibrate_impl(x, y, metric, plan, threads);
    const double c = critical_value(cal, alpha);
    cal.critical_values[alpha] = c;
    TwoSampleResult out{report, std::move(cal), alpha, false};
    out.reject = out.calibration.t_observed > c;
    return out;
}

} // namespace exen
