// exen: two-sample energy-statistic testing for planar landmark shapes.
//
// Subcommands:
//   test A.csv B.csv   compare two landmark files
//   simulate           contour templates + Gaussian noise, then the test
//   mean A.csv         extrinsic mean shape of one landmark file
//
// The report goes to stdout; progress and diagnostics go to stderr. Exit
// codes: 0 completed, 2 input error, 3 numerical failure, 4 usage error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exen/exen.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

enum class MetricKind { vw, vw_squared, euclidean };

struct CommonOptions {
    double alpha = 0.05;
    std::uint64_t trials = 1000;
    std::uint64_t seed = kDefaultSeed;
    std::string method = "bootstrap";
    std::string metric = "vw";
    std::string format = "json";
    unsigned threads = 1;
};

exen::ResampleMethod to_method(const std::string& name) {
    return name == "permutation" ? exen::ResampleMethod::permutation
                                 : exen::ResampleMethod::bootstrap_with_replacement;
}

MetricKind to_metric(const std::string& name) {
    if (name == "vw-squared") return MetricKind::vw_squared;
    if (name == "euclidean") return MetricKind::euclidean;
    return MetricKind::vw;
}

exen::ReportFormat to_format(const std::string& name) {
    return name == "csv" ? exen::ReportFormat::csv : exen::ReportFormat::json;
}

// Substream layout under the master seed: 0 drives resampling, 1 and 2
// drive the simulated groups. Documented in the README.
std::uint64_t resampling_seed(std::uint64_t master) { return exen::rng::derive(master, 0); }

exen::TwoSampleResult run_test(const std::vector<exen::Preshape>& a,
                               const std::vector<exen::Preshape>& b, MetricKind metric,
                               const CommonOptions& opt) {
    const exen::ResamplePlan plan(to_method(opt.method), opt.trials, resampling_seed(opt.seed),
                                  a.size(), b.size());
    switch (metric) {
    case MetricKind::vw_squared:
        return exen::two_sample_energy_test(exen::SampleSet<exen::Preshape>(a),
                                            exen::SampleSet<exen::Preshape>(b),
                                            exen::SquaredChordDistance{}, plan, opt.alpha,
                                            opt.threads);
    case MetricKind::euclidean: {
        std::vector<std::vector<double>> fa, fb;
        fa.reserve(a.size());
        fb.reserve(b.size());
        for (const exen::Preshape& p : a) fa.push_back(exen::flatten(p));
        for (const exen::Preshape& p : b) fb.push_back(exen::flatten(p));
        return exen::two_sample_energy_test(
            exen::SampleSet<std::vector<double>>(std::move(fa)),
            exen::SampleSet<std::vector<double>>(std::move(fb)), exen::EuclideanDistance{}, plan,
            opt.alpha, opt.threads);
    }
    case MetricKind::vw:
    default:
        return exen::two_sample_energy_test(exen::SampleSet<exen::Preshape>(a),
                                            exen::SampleSet<exen::Preshape>(b),
                                            exen::ChordDistance{}, plan, opt.alpha, opt.threads);
    }
}

std::vector<exen::Preshape> preshape_all(const exen::LandmarkTable& table) {
    std::vector<exen::Preshape> out;
    out.reserve(table.size());
    for (const exen::KAd& kad : table.observations) out.push_back(exen::preshape(kad));
    return out;
}

int cmd_test(const std::string& path_a, const std::string& path_b, const CommonOptions& opt) {
    const exen::GroupedDataset ds = exen::load_grouped_dataset(path_a, path_b);
    std::fprintf(stderr, "loaded %s (n=%zu) and %s (n=%zu), k=%zu\n", ds.names.first.c_str(),
                 ds.group_a.size(), ds.names.second.c_str(), ds.group_b.size(), ds.group_a.k());
    std::fprintf(stderr, "running %llu %s trials\n",
                 static_cast<unsigned long long>(opt.trials), opt.method.c_str());

    const auto result = run_test(preshape_all(ds.group_a), preshape_all(ds.group_b),
                                 to_metric(opt.metric), opt);
    exen::RunInfo info{"test", opt.metric, path_a, path_b, opt.seed, ds.group_a.k(),
                       std::nullopt};
    std::fputs(exen::write_report(result, info, to_format(opt.format)).c_str(), stdout);
    return 0;
}

int cmd_simulate(const CommonOptions& opt, std::size_t k, std::size_t n, double sigma,
                 const std::string& kind_a, const std::string& kind_b) {
    const exen::ContourKind ka =
        kind_a == "square" ? exen::ContourKind::square : exen::ContourKind::circle;
    const exen::ContourKind kb =
        kind_b == "square" ? exen::ContourKind::square : exen::ContourKind::circle;
    const auto shapes_a = exen::perturbed_preshapes(exen::make_template(ka, k), sigma, n,
                                                    exen::rng::derive(opt.seed, 1));
    const auto shapes_b = exen::perturbed_preshapes(exen::make_template(kb, k), sigma, n,
                                                    exen::rng::derive(opt.seed, 2));
    std::fprintf(stderr, "simulated %s vs %s: k=%zu, n=%zu per group, sigma=%g\n",
                 kind_a.c_str(), kind_b.c_str(), k, n, sigma);

    const auto result = run_test(shapes_a, shapes_b, to_metric(opt.metric), opt);
    exen::RunInfo info{"simulate", opt.metric, kind_a, kind_b, opt.seed, k, sigma};
    std::fputs(exen::write_report(result, info, to_format(opt.format)).c_str(), stdout);
    return 0;
}

int cmd_mean(const std::string& path) {
    const exen::LandmarkTable table = exen::load_landmark_file(path);
    std::fprintf(stderr, "loaded %s: n=%zu, k=%zu\n", path.c_str(), table.size(), table.k());
    const exen::Preshape mean = exen::vw_extrinsic_mean(preshape_all(table));
    exen::LandmarkTable out;
    out.observations.emplace_back(mean.coords());
    std::fputs(exen::write_landmarks(out).c_str(), stdout);
    return 0;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--alpha", opt.alpha, "significance level, a fraction in (0,1)")
        ->check([](const std::string& str) -> std::string {
            const double v = std::strtod(str.c_str(), nullptr);
            if (v > 0.0 && v < 1.0) return {};
            return "alpha must be a fraction strictly between 0 and 1 "
                   "(percent values such as 5 are not accepted)";
        })
        ->capture_default_str();
    cmd->add_option("--trials", opt.trials, "number of resampling trials")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}))
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "master random seed")->capture_default_str();
    cmd->add_option("--method", opt.method, "null calibration method")
        ->check(CLI::IsMember({"bootstrap", "permutation"}))
        ->capture_default_str();
    cmd->add_option("--metric", opt.metric, "distance between shapes")
        ->check(CLI::IsMember({"vw", "vw-squared", "euclidean"}))
        ->capture_default_str();
    cmd->add_option("--format", opt.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--threads", opt.threads, "worker threads (never changes results)")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-sample energy-statistic tests for planar landmark shapes"};
    app.require_subcommand(1);

    CommonOptions test_opt;
    std::string path_a, path_b;
    CLI::App* test = app.add_subcommand("test", "test two landmark files for equal shape "
                                                "distributions");
    test->add_option("group_a", path_a, "first landmark file")->required();
    test->add_option("group_b", path_b, "second landmark file")->required();
    add_common_flags(test, test_opt);

    CommonOptions sim_opt;
    std::size_t sim_k = 40;
    std::size_t sim_n = 100;
    double sim_sigma = 0.1;
    std::string sim_a = "circle";
    std::string sim_b = "square";
    CLI::App* simulate = app.add_subcommand("simulate", "generate noisy contour samples and "
                                                        "test them");
    add_common_flags(simulate, sim_opt);
    simulate->add_option("--k", sim_k, "landmarks per contour")
        ->check(CLI::Range(std::size_t{4}, std::size_t{100000}))
        ->capture_default_str();
    simulate->add_option("--n", sim_n, "observations per group")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}))
        ->capture_default_str();
    simulate->add_option("--sigma", sim_sigma, "landmark noise standard deviation")
        ->check(CLI::Range(0.0, 1e6))
        ->capture_default_str();
    simulate->add_option("--group-a", sim_a, "contour for the first group")
        ->check(CLI::IsMember({"circle", "square"}))
        ->capture_default_str();
    simulate->add_option("--group-b", sim_b, "contour for the second group")
        ->check(CLI::IsMember({"circle", "square"}))
        ->capture_default_str();

    std::string mean_path;
    CLI::App* mean = app.add_subcommand("mean", "extrinsic mean shape of a landmark file");
    mean->add_option("group", mean_path, "landmark file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    try {
        if (test->parsed()) return cmd_test(path_a, path_b, test_opt);
        if (simulate->parsed()) return cmd_simulate(sim_opt, sim_k, sim_n, sim_sigma, sim_a, sim_b);
        return cmd_mean(mean_path);
    } catch (const exen::NonUniqueMeanError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const exen::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const exen::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
