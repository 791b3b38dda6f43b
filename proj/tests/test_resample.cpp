#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "exen/resample.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using exen::CalibrationResult;
using exen::EuclideanDistance;
using exen::ResampleMethod;
using exen::ResamplePlan;
using exen::SampleSet;

namespace {

using Vec = std::vector<double>;

SampleSet<Vec> gaussian_sample(exen::rng::Stream& s, std::size_t n, std::size_t dim) {
    std::vector<Vec> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(gen::random_vector(s, dim));
    return SampleSet<Vec>(std::move(pts));
}

} // namespace

TEST(ResamplePlanType, ValidatesOnConstruction) {
    EXPECT_THROW(ResamplePlan(ResampleMethod::bootstrap_with_replacement, 0, 1, 5, 5),
                 exen::InvalidInputError);
    EXPECT_THROW(ResamplePlan(ResampleMethod::permutation, 10, 1, 0, 5),
                 exen::InvalidInputError);
    EXPECT_NO_THROW(ResamplePlan(ResampleMethod::permutation, 1, 1, 1, 1));
}

TEST(BootstrapResample, SizeMismatchIsAnError) {
    exen::rng::Stream s(1);
    EXPECT_THROW(exen::bootstrap_resample_pooled(std::size_t{1}, 1, 1, s),
                 exen::InvalidInputError);
    EXPECT_THROW(exen::permutation_resample_pooled(std::size_t{4}, 1, 1, s),
                 exen::InvalidInputError);
}

TEST(BootstrapResample, UniformOverPooledIndices) {
    exen::rng::Stream s(2);
    std::size_t hits_first = 0;
    std::size_t hits_second = 0;
    const int draws = 10000;
    for (int it = 0; it < draws; ++it) {
        const auto [xi, yi] = exen::bootstrap_resample_pooled(std::size_t{2}, 1, 1, s);
        hits_first += xi[0] == 0;
        hits_second += yi[0] == 0;
    }
    EXPECT_NEAR(static_cast<double>(hits_first) / draws, 0.5, 0.02);
    EXPECT_NEAR(static_cast<double>(hits_second) / draws, 0.5, 0.02);
}

TEST(BootstrapResample, DeterministicGivenStreamState) {
    exen::rng::Stream a(99);
    exen::rng::Stream b(99);
    const auto r1 = exen::bootstrap_resample_pooled(std::size_t{20}, 12, 8, a);
    const auto r2 = exen::bootstrap_resample_pooled(std::size_t{20}, 12, 8, b);
    EXPECT_EQ(r1.first, r2.first);
    EXPECT_EQ(r1.second, r2.second);
}

TEST(PermutationResample, PartitionsThePooledIndices) {
    exen::rng::Stream s(3);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n1 = 1 + s.uniform_below(10);
        const std::size_t n2 = 1 + s.uniform_below(10);
        const auto [xi, yi] = exen::permutation_resample_pooled(n1 + n2, n1, n2, s);
        ASSERT_EQ(xi.size(), n1);
        ASSERT_EQ(yi.size(), n2);
        std::set<std::size_t> all(xi.begin(), xi.end());
        all.insert(yi.begin(), yi.end());
        EXPECT_EQ(all.size(), n1 + n2); // no repeats, full coverage
        EXPECT_EQ(*all.rbegin(), n1 + n2 - 1);
    }
}

TEST(PermutationResample, TwoElementPartitionIsBalanced) {
    exen::rng::Stream s(4);
    std::size_t first_kept = 0;
    const int draws = 10000;
    for (int it = 0; it < draws; ++it) {
        const auto [xi, yi] = exen::permutation_resample_pooled(std::size_t{2}, 1, 1, s);
        first_kept += xi[0] == 0;
    }
    EXPECT_NEAR(static_cast<double>(first_kept) / draws, 0.5, 0.02);
}

TEST(DrawTrialIndices, ReproducibleAndMethodFaithful) {
    const ResamplePlan boot(ResampleMethod::bootstrap_with_replacement, 5, 1234, 6, 4);
    const ResamplePlan perm(ResampleMethod::permutation, 5, 1234, 6, 4);
    const auto b1 = exen::draw_trial_indices(boot, 3);
    const auto b2 = exen::draw_trial_indices(boot, 3);
    EXPECT_EQ(b1, b2);

    const auto p1 = exen::draw_trial_indices(perm, 3);
    std::vector<std::size_t> joined = p1.first;
    joined.insert(joined.end(), p1.second.begin(), p1.second.end());
    std::sort(joined.begin(), joined.end());
    std::vector<std::size_t> expect(10);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    EXPECT_EQ(joined, expect);
}

TEST(CriticalValue, ForcedOrderStatisticExamples) {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0); // 1..100
    EXPECT_DOUBLE_EQ(exen::critical_value(v, 0.05), 95.0);

    std::vector<double> w(1000);
    std::iota(w.begin(), w.end(), 1.0); // 1..1000
    EXPECT_DOUBLE_EQ(exen::critical_value(w, 0.01), 990.0);

    std::vector<double> flat(37, 2.5);
    for (double a : {0.01, 0.05, 0.5, 0.99}) EXPECT_DOUBLE_EQ(exen::critical_value(flat, a), 2.5);
}

TEST(CriticalValue, RejectsBadAlpha) {
    std::vector<double> v{1.0, 2.0};
    EXPECT_THROW(exen::critical_value(v, 0.0), exen::InvalidInputError);
    EXPECT_THROW(exen::critical_value(v, 1.0), exen::InvalidInputError);
    EXPECT_THROW(exen::critical_value(v, -0.2), exen::InvalidInputError);
}

TEST(CriticalValue, MatchesSortOracleOnRandomData) {
    exen::rng::Stream s(5);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> v(1 + s.uniform_below(500));
        for (double& x : v) x = s.normal();
        const double alpha = 0.001 + 0.998 * s.uniform01();
        EXPECT_DOUBLE_EQ(exen::critical_value(v, alpha), oracle::quantile_by_sort(v, alpha));
    }
}

TEST(PValue, ForcedExamples) {
    std::vector<double> stars(999, 0.0);
    EXPECT_DOUBLE_EQ(exen::p_value(stars, 1.0), 1.0 / 1000.0); // above all
    EXPECT_DOUBLE_EQ(exen::p_value(stars, -1.0), 1.0);         // below all

    const std::vector<double> three{0.1, 0.2, 0.3};
    EXPECT_DOUBLE_EQ(exen::p_value(three, 0.2), 0.75); // ties count as >=
}

TEST(PValue, NonincreasingInObservedStatistic) {
    exen::rng::Stream s(6);
    std::vector<double> stars(200);
    for (double& x : stars) x = s.normal();
    double prev = 2.0;
    for (double t = -3.0; t <= 3.0; t += 0.05) {
        const double p = exen::p_value(stars, t);
        EXPECT_LE(p, prev);
        EXPECT_GT(p, 0.0);
        EXPECT_LE(p, 1.0);
        prev = p;
    }
}

TEST(Calibrate, IdenticalSamplesGiveZeroStatistic) {
    exen::rng::Stream s(7);
    const SampleSet<Vec> x = gaussian_sample(s, 12, 3);
    const ResamplePlan plan(ResampleMethod::bootstrap_with_replacement, 99, 11, 12, 12);
    const CalibrationResult cal = exen::calibrate(x, x, EuclideanDistance{}, plan);
    EXPECT_DOUBLE_EQ(cal.t_observed, 0.0);
    EXPECT_GE(cal.p_value, 1.0 / 100.0);
}

TEST(Calibrate, AllPointsIdenticalIsFullyDegenerate) {
    const SampleSet<Vec> x(std::vector<Vec>(5, Vec{1.0, 2.0}));
    const ResamplePlan plan(ResampleMethod::permutation, 50, 3, 5, 5);
    const CalibrationResult cal = exen::calibrate(x, x, EuclideanDistance{}, plan);
    EXPECT_DOUBLE_EQ(cal.t_observed, 0.0);
    EXPECT_DOUBLE_EQ(cal.p_value, 1.0);
    for (double t : cal.t_star) EXPECT_DOUBLE_EQ(t, 0.0);
}

TEST(Calibrate, PlanMustMatchSampleSizes) {
    exen::rng::Stream s(8);
    const SampleSet<Vec> x = gaussian_sample(s, 4, 2);
    const SampleSet<Vec> y = gaussian_sample(s, 5, 2);
    const ResamplePlan plan(ResampleMethod::permutation, 10, 3, 4, 4);
    EXPECT_THROW(exen::calibrate(x, y, EuclideanDistance{}, plan), exen::InvalidInputError);
}

TEST(Calibrate, DeterministicAcrossRunsAndThreadCounts) {
    exen::rng::Stream s(9);
    const SampleSet<Vec> x = gaussian_sample(s, 15, 4);
    const SampleSet<Vec> y = gaussian_sample(s, 10, 4);
    for (const auto method : {ResampleMethod::bootstrap_with_replacement,
                              ResampleMethod::permutation}) {
        const ResamplePlan plan(method, 64, 777, 15, 10);
        const CalibrationResult serial = exen::calibrate(x, y, EuclideanDistance{}, plan, 1);
        const CalibrationResult rerun = exen::calibrate(x, y, EuclideanDistance{}, plan, 1);
        const CalibrationResult parallel = exen::calibrate(x, y, EuclideanDistance{}, plan, 5);
        EXPECT_EQ(serial.t_star, rerun.t_star);
        EXPECT_EQ(serial.t_star, parallel.t_star);
        EXPECT_EQ(serial.p_value, parallel.p_value);
        EXPECT_EQ(serial.critical_values, parallel.critical_values);
    }
}

TEST(Calibrate, MatrixReuseEqualsRecomputingPerTrial) {
    exen::rng::Stream s(10);
    for (const auto method : {ResampleMethod::bootstrap_with_replacement,
                              ResampleMethod::permutation}) {
        const std::size_t n1 = 2 + s.uniform_below(8);
        const std::size_t n2 = 2 + s.uniform_below(8);
        const std::size_t dim = 1 + s.uniform_below(4);
        const SampleSet<Vec> x = gaussian_sample(s, n1, dim);
        const SampleSet<Vec> y = gaussian_sample(s, n2, dim);
        const ResamplePlan plan(method, 40, 4242, n1, n2);
        const CalibrationResult cal = exen::calibrate(x, y, EuclideanDistance{}, plan);

        std::vector<Vec> pooled(x.begin(), x.end());
        pooled.insert(pooled.end(), y.begin(), y.end());
        for (std::size_t b = 0; b < plan.trials; ++b) {
            const auto [xi, yi] = exen::draw_trial_indices(plan, b);
            std::vector<Vec> px, py;
            for (std::size_t i : xi) px.push_back(pooled[i]);
            for (std::size_t j : yi) py.push_back(pooled[j]);
            const double direct = exen::energy_statistic(SampleSet<Vec>(px), SampleSet<Vec>(py),
                                                         EuclideanDistance{})
                                      .t_energy;
            EXPECT_NEAR(cal.t_star[b], direct, 1e-12);
        }
    }
}

TEST(TwoSampleTest, IdenticalSamplesNeverReject) {
    exen::rng::Stream s(20);
    const SampleSet<Vec> x = gaussian_sample(s, 10, 2);
    const ResamplePlan plan(ResampleMethod::bootstrap_with_replacement, 39, 101, 10, 10);
    for (double alpha : {0.01, 0.05, 0.2, 0.5}) {
        const auto result = exen::two_sample_energy_test(x, x, EuclideanDistance{}, plan, alpha);
        EXPECT_FALSE(result.reject);
        EXPECT_DOUBLE_EQ(result.calibration.t_observed, 0.0);
    }
}

TEST(TwoSampleTest, RejectionRuleIsStrictThresholdComparison) {
    exen::rng::Stream s(21);
    const SampleSet<Vec> x = gaussian_sample(s, 12, 3);
    std::vector<Vec> shifted_pts;
    for (const Vec& p : x) {
        Vec q = p;
        q[0] += 3.0;
        shifted_pts.push_back(q);
    }
    const SampleSet<Vec> y(shifted_pts);
    const ResamplePlan plan(ResampleMethod::permutation, 199, 5, 12, 12);
    const auto result = exen::two_sample_energy_test(x, y, EuclideanDistance{}, plan, 0.05);
    const double c = exen::critical_value(result.calibration, 0.05);
    EXPECT_EQ(result.reject, result.calibration.t_observed > c);
    EXPECT_TRUE(result.reject); // a 3-sigma shift is far beyond the null spread
    ASSERT_TRUE(result.calibration.critical_values.count(0.05));
    EXPECT_DOUBLE_EQ(result.calibration.critical_values.at(0.05), c);
}

TEST(TwoSampleTest, ReportAndCalibrationAgree) {
    exen::rng::Stream s(22);
    const SampleSet<Vec> x = gaussian_sample(s, 9, 4);
    const SampleSet<Vec> y = gaussian_sample(s, 7, 4);
    const ResamplePlan plan(ResampleMethod::bootstrap_with_replacement, 25, 8, 9, 7);
    const auto result = exen::two_sample_energy_test(x, y, EuclideanDistance{}, plan, 0.1);
    EXPECT_DOUBLE_EQ(result.report.t_energy, result.calibration.t_observed);
    EXPECT_DOUBLE_EQ(exen::t_energy(result.report), result.report.t_energy);
    EXPECT_DOUBLE_EQ(result.calibration.p_value, exen::p_value(result.calibration));
    // Every stored critical value obeys the quantile rule.
    for (const auto& [a, c] : result.calibration.critical_values)
        EXPECT_DOUBLE_EQ(c, exen::critical_value(result.calibration, a));
}
